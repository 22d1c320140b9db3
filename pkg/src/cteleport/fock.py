"""Truncated multimode Fock-space states and passive linear optics.

States are stored as dense complex tensors of shape ``(cutoff + 1,) * num_modes``;
the ``amplitudes`` property gives the sparse view keyed by occupation tuple.
Every operation returns a new state.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "CutoffError",
    "FockState",
    "DensityMatrix",
    "BeamSplitter",
    "PolarizingBeamSplitter",
    "make_fock_state",
    "from_amplitudes",
    "vacuum",
    "tensor_product",
    "permute_modes",
    "beam_splitter_matrix",
    "apply_transfer",
    "apply_beam_splitter",
    "apply_polarizing_bs",
    "inner_product",
    "count_distribution",
    "project_counts",
    "reduced_density",
    "von_neumann_entropy",
    "coherent_to_fock",
    "required_cutoff",
]

UNITARY_TOL = 1e-12
DEFAULT_LEAK_TOL = 1e-8


class CutoffError(ValueError):
    """Raised when the photon-number cutoff is too small for the requested state."""


class FockState:
    """Pure state on ``num_modes`` bosonic modes with a per-mode photon cutoff."""

    __slots__ = ("tensor", "leaked")

    def __init__(self, tensor: np.ndarray, leaked: float = 0.0):
        tensor = np.asarray(tensor, dtype=complex)
        if tensor.ndim == 0 or len(set(tensor.shape)) != 1:
            raise ValueError(f"tensor must be a hypercube, got shape {tensor.shape}")
        self.tensor = tensor
        self.leaked = float(leaked)

    @property
    def num_modes(self) -> int:
        return self.tensor.ndim

    @property
    def cutoff(self) -> int:
        return self.tensor.shape[0] - 1

    @property
    def amplitudes(self) -> dict[tuple[int, ...], complex]:
        idx = np.argwhere(self.tensor != 0)
        return {tuple(int(i) for i in row): complex(self.tensor[tuple(row)]) for row in idx}

    def amplitude(self, occupation: Sequence[int]) -> complex:
        return complex(self.tensor[tuple(occupation)])

    def norm_squared(self) -> float:
        return float(np.vdot(self.tensor, self.tensor).real)

    def normalize(self) -> FockState:
        n2 = self.norm_squared()
        if n2 <= 0.0:
            raise ValueError("cannot normalize the null state")
        return FockState(self.tensor / math.sqrt(n2), self.leaked)

    def __mul__(self, scalar: complex) -> FockState:
        return FockState(self.tensor * scalar, self.leaked)

    __rmul__ = __mul__

    def __add__(self, other: FockState) -> FockState:
        _check_compatible(self, other)
        return FockState(self.tensor + other.tensor, self.leaked + other.leaked)

    def __sub__(self, other: FockState) -> FockState:
        return self + (-1.0) * other

    def __repr__(self) -> str:
        terms = sorted(self.amplitudes.items(), key=lambda kv: -abs(kv[1]))[:6]
        body = ", ".join(f"{k}: {v:.4g}" for k, v in terms)
        return f"FockState(modes={self.num_modes}, cutoff={self.cutoff}, {{{body}}})"


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced state of a subset of modes; ``labels[i]`` is the occupation tuple of row ``i``."""

    labels: tuple[tuple[int, ...], ...]
    matrix: np.ndarray

    def index(self, label: Sequence[int]) -> int:
        return self.labels.index(tuple(label))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


def _check_compatible(a: FockState, b: FockState) -> None:
    if a.tensor.shape != b.tensor.shape:
        raise ValueError(
            f"shape mismatch: {a.num_modes} modes/cutoff {a.cutoff} "
            f"vs {b.num_modes} modes/cutoff {b.cutoff}"
        )


def make_fock_state(num_modes: int, cutoff: int, occupation: Sequence[int]) -> FockState:
    """Basis ket ``|n_0, n_1, ...>`` with unit amplitude."""
    occupation = tuple(int(n) for n in occupation)
    if num_modes < 1:
        raise ValueError("num_modes must be positive")
    if len(occupation) != num_modes:
        raise ValueError(f"occupation {occupation} does not have {num_modes} entries")
    bad = [n for n in occupation if n < 0 or n > cutoff]
    if bad:
        raise CutoffError(f"occupation {occupation} outside [0, {cutoff}]")
    tensor = np.zeros((cutoff + 1,) * num_modes, dtype=complex)
    tensor[occupation] = 1.0
    return FockState(tensor)


def from_amplitudes(
    num_modes: int, cutoff: int, amplitudes: dict[tuple[int, ...], complex]
) -> FockState:
    tensor = np.zeros((cutoff + 1,) * num_modes, dtype=complex)
    for occ, amp in amplitudes.items():
        if len(occ) != num_modes or min(occ) < 0 or max(occ) > cutoff:
            raise CutoffError(f"occupation {occ} invalid for {num_modes} modes, cutoff {cutoff}")
        tensor[tuple(occ)] += amp
    return FockState(tensor)


def vacuum(num_modes: int, cutoff: int) -> FockState:
    return make_fock_state(num_modes, cutoff, (0,) * num_modes)


def tensor_product(*states: FockState) -> FockState:
    """Kronecker product; modes are concatenated in argument order."""
    if not states:
        raise ValueError("need at least one state")
    cutoff = states[0].cutoff
    out = states[0].tensor
    leaked = states[0].leaked
    for s in states[1:]:
        if s.cutoff != cutoff:
            raise ValueError("all factors must share the same cutoff")
        out = np.multiply.outer(out, s.tensor)
        leaked += s.leaked
    return FockState(out, leaked)


def permute_modes(state: FockState, order: Sequence[int]) -> FockState:
    """New state whose mode ``i`` is mode ``order[i]`` of ``state``."""
    if sorted(order) != list(range(state.num_modes)):
        raise ValueError(f"{order} is not a permutation of {state.num_modes} modes")
    return FockState(np.transpose(state.tensor, tuple(order)), state.leaked)


def beam_splitter_matrix(transmission: float, reflection: float | None = None) -> np.ndarray:
    """Creation-operator transfer matrix of a real beam splitter.

    Row ``i`` is the image of input ``i``: with transmission ``t`` and reflection
    ``r >= 0`` (default ``sqrt(1 - t^2)``) the first input maps to ``t out1 - r out2``
    and the second to ``r out1 + t out2``.
    """
    t, r = transmission, reflection
    if not 0.0 < t <= 1.0:
        raise ValueError(f"transmission must lie in (0, 1], got {t}")
    if r is None:
        r = math.sqrt(max(0.0, 1.0 - t * t))
    if r < 0.0 or abs(t * t + r * r - 1.0) > UNITARY_TOL:
        raise ValueError(f"transmission {t} and reflection {r} are not power-conserving")
    return np.array([[t, -r], [r, t]], dtype=float)


def _check_unitary(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("transfer matrix must be 2x2")
    if not np.allclose(m @ m.conj().T, np.eye(2), atol=UNITARY_TOL, rtol=0.0):
        raise ValueError(f"transfer matrix is not unitary:\n{m}")
    return m


@lru_cache(maxsize=64)
def _transfer_blocks(entries: tuple[complex, ...], nmax: int) -> tuple[np.ndarray, ...]:
    """Fixed-photon-number blocks of the two-mode transfer unitary.

    ``blocks[n][j, k]`` is the amplitude of output ``|j, n-j>`` for input ``|k, n-k>``.
    Columns are built by applying the transformed creation operators one photon at a
    time, which stays well conditioned for large ``n``.
    """
    m00, m01, m10, m11 = entries
    blocks = [np.ones((1, 1), dtype=complex)]
    for n in range(1, nmax + 1):
        prev = blocks[-1]
        cur = np.zeros((n + 1, n + 1), dtype=complex)
        j = np.arange(n)
        up = np.sqrt(j + 1.0)  # P^dagger on |j, n-1-j>
        stay = np.sqrt(n - j.astype(float))  # Q^dagger on |j, n-1-j>
        for k in range(n + 1):
            if k > 0:
                col, a, b, norm = prev[:, k - 1], m00, m01, math.sqrt(k)
            else:
                col, a, b, norm = prev[:, 0], m10, m11, math.sqrt(n)
            cur[1:, k] += a * up * col / norm
            cur[:-1, k] += b * stay * col / norm
        blocks.append(cur)
    return tuple(blocks)


def apply_transfer(
    state: FockState,
    mode_p: int,
    mode_q: int,
    matrix: np.ndarray,
    leak_tol: float = DEFAULT_LEAK_TOL,
) -> FockState:
    """Apply a two-mode passive transformation given by its creation-operator transfer matrix.

    Output amplitude that would exceed the cutoff is dropped and its squared norm is
    added to ``leaked``; a :class:`CutoffError` is raised if the leak for this element
    exceeds ``leak_tol``.
    """
    if mode_p == mode_q:
        raise ValueError("beam splitter needs two distinct modes")
    for m in (mode_p, mode_q):
        if not 0 <= m < state.num_modes:
            raise ValueError(f"mode {m} out of range for {state.num_modes} modes")
    m = _check_unitary(matrix)
    d = state.cutoff + 1
    blocks = _transfer_blocks(tuple(complex(v) for v in m.ravel()), 2 * (d - 1))

    src = np.moveaxis(state.tensor, (mode_p, mode_q), (-2, -1))
    out = np.zeros_like(src)
    leaked = 0.0
    for n in range(2 * d - 1):
        ks = np.arange(max(0, n - d + 1), min(n, d - 1) + 1)
        inp = src[..., ks, n - ks]
        if not inp.any():
            continue
        res = inp @ blocks[n][:, ks].T
        js = np.arange(n + 1)
        ok = (js < d) & (n - js < d)
        out[..., js[ok], n - js[ok]] = res[..., ok]
        if not ok.all():
            leaked += float(np.sum(np.abs(res[..., ~ok]) ** 2))
    if leaked > leak_tol:
        raise CutoffError(
            f"beam splitter on modes ({mode_p}, {mode_q}) leaked {leaked:.3e} of squared "
            f"norm past cutoff {state.cutoff}; increase the cutoff"
        )
    return FockState(np.moveaxis(out, (-2, -1), (mode_p, mode_q)), state.leaked + leaked)


def apply_beam_splitter(
    state: FockState,
    mode_p: int,
    mode_q: int,
    transmission: float,
    leak_tol: float = DEFAULT_LEAK_TOL,
    reflection: float | None = None,
) -> FockState:
    """Beam splitter with ``mode_p`` as first input/output port and ``mode_q`` as second."""
    matrix = beam_splitter_matrix(transmission, reflection)
    return apply_transfer(state, mode_p, mode_q, matrix, leak_tol)


def apply_polarizing_bs(
    state: FockState, spatial_a: tuple[int, int], spatial_b: tuple[int, int]
) -> FockState:
    """Polarizing beam splitter between two dual-rail spatial modes ``(v_rail, h_rail)``.

    Vertical rails are transmitted, horizontal rails are reflected (swapped).
    """
    (av, ah), (bv, bh) = spatial_a, spatial_b
    rails = [av, ah, bv, bh]
    if len(set(rails)) != 4 or not all(0 <= r < state.num_modes for r in rails):
        raise ValueError(f"invalid rails {spatial_a}, {spatial_b}")
    order = list(range(state.num_modes))
    order[ah], order[bh] = bh, ah
    return permute_modes(state, order)


@dataclass(frozen=True)
class BeamSplitter:
    """Real beam splitter between ``mode_p`` (first port) and ``mode_q`` (second port)."""

    mode_p: int
    mode_q: int
    transmission: float
    reflection: float | None = None

    @property
    def transfer_matrix(self) -> np.ndarray:
        return beam_splitter_matrix(self.transmission, self.reflection)

    def apply(self, state, leak_tol: float = DEFAULT_LEAK_TOL):
        if isinstance(state, FockState):
            return apply_transfer(state, self.mode_p, self.mode_q, self.transfer_matrix, leak_tol)
        return state.apply_linear_optic(self.transfer_matrix, self.mode_p, self.mode_q)


@dataclass(frozen=True)
class PolarizingBeamSplitter:
    spatial_a: tuple[int, int]
    spatial_b: tuple[int, int]

    def apply(self, state, leak_tol: float = DEFAULT_LEAK_TOL):
        return apply_polarizing_bs(state, self.spatial_a, self.spatial_b)


def inner_product(a: FockState, b: FockState) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _check_compatible(a, b)
    return complex(np.vdot(a.tensor, b.tensor))


def _probabilities(state: FockState, detector_modes: Sequence[int]) -> np.ndarray:
    detector_modes = list(detector_modes)
    if len(set(detector_modes)) != len(detector_modes):
        raise ValueError("duplicate detector modes")
    rest = [m for m in range(state.num_modes) if m not in detector_modes]
    p = np.abs(np.transpose(state.tensor, detector_modes + rest)) ** 2
    return p.reshape(p.shape[: len(detector_modes)] + (-1,)).sum(axis=-1)


def count_distribution(
    state: FockState, detector_modes: Sequence[int]
) -> dict[tuple[int, ...], float]:
    """Joint photon-count distribution on ``detector_modes``, marginal over the rest."""
    probs = _probabilities(state, detector_modes)
    return {
        tuple(int(i) for i in idx): float(probs[tuple(idx)]) for idx in np.argwhere(probs > 0.0)
    }


def project_counts(
    state: FockState, detector_modes: Sequence[int], counts: Sequence[int]
) -> tuple[float, FockState | None]:
    """Probability of ``counts`` and the normalized state of the undetected modes.

    The conditional state is ``None`` when the pattern has zero probability or when
    every mode is detected.
    """
    detector_modes = list(detector_modes)
    if len(counts) != len(detector_modes):
        raise ValueError("counts and detector_modes differ in length")
    if any(c < 0 or c > state.cutoff for c in counts):
        return 0.0, None
    rest = [m for m in range(state.num_modes) if m not in detector_modes]
    t = np.transpose(state.tensor, detector_modes + rest)[tuple(counts)]
    prob = float(np.vdot(t, t).real)
    if prob == 0.0 or not rest:
        return prob, None
    return prob, FockState(t / math.sqrt(prob))


def reduced_density(state: FockState, keep_modes: Sequence[int]) -> DensityMatrix:
    """Partial trace over every mode not in ``keep_modes`` (unit trace)."""
    keep_modes = list(keep_modes)
    if not keep_modes or len(keep_modes) >= state.num_modes:
        raise ValueError("keep_modes must be a nonempty proper subset")
    rest = [m for m in range(state.num_modes) if m not in keep_modes]
    d = state.cutoff + 1
    t = np.transpose(state.tensor, keep_modes + rest).reshape(d ** len(keep_modes), -1)
    rho = t @ t.conj().T
    tr = np.trace(rho).real
    if tr <= 0.0:
        raise ValueError("null state has no reduced density")
    labels = tuple(tuple(int(i) for i in idx) for idx in np.ndindex(*(d,) * len(keep_modes)))
    return DensityMatrix(labels, rho / tr)


def von_neumann_entropy(density: DensityMatrix | np.ndarray) -> float:
    """Entropy in bits; eigenvalues below 1e-12 contribute nothing."""
    m = density.matrix if isinstance(density, DensityMatrix) else np.asarray(density)
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    w = w[w > 1e-12]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def required_cutoff(max_amplitude: float) -> int:
    """Smallest cutoff that keeps the Poisson tail of ``|max_amplitude>`` below 1e-8."""
    m = abs(max_amplitude)
    return int(math.ceil(m * m + 6 * m + 10))


def coherent_to_fock(alpha: complex, cutoff: int, guard: bool = True) -> FockState:
    """Single-mode coherent state truncated at ``cutoff``."""
    need = required_cutoff(abs(alpha))
    if guard and cutoff < need:
        raise CutoffError(
            f"cutoff {cutoff} too small for |alpha|={abs(alpha):.4g}; need at least {need}"
        )
    c = np.empty(cutoff + 1, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, cutoff + 1):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return FockState(c)


def occupation_tuples(num_modes: int, total: int) -> Iterable[tuple[int, ...]]:
    """All occupation tuples of ``num_modes`` entries summing to at most ``total``."""
    for idx in np.ndindex(*(total + 1,) * num_modes):
        if sum(idx) <= total:
            yield tuple(int(i) for i in idx)
