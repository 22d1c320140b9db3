"""Finite superpositions of multimode coherent-product states.

A :class:`CoherentSuperposition` is ``sum_k c_k |g_k1>|g_k2>...`` held as a coefficient
vector and an amplitude matrix. Overlaps are computed exactly, so the kets are never
assumed orthogonal. Passive linear optics only rotates the amplitude rows, and parity
detection is handled through closed-form sector kernels.
"""

from __future__ import annotations

import enum
import math
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .fock import CutoffError, FockState, coherent_to_fock, required_cutoff

MERGE_TOL = 1e-9
NULL_NORM = 1e-20
ORTHOGONALITY_TOL = 1e-12


class ParityClass(enum.Enum):
    """Photon-number sector reported by a parity-resolving detector."""

    ZERO = "zero"
    ODD = "odd"
    EVEN_NONZERO = "even_nonzero"
    EVEN_INCLUDING_ZERO = "even_including_zero"

    def contains(self, n: int) -> bool:
        if self is ParityClass.ZERO:
            return n == 0
        if self is ParityClass.ODD:
            return n % 2 == 1
        if self is ParityClass.EVEN_NONZERO:
            return n > 0 and n % 2 == 0
        return n % 2 == 0

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CoherentTerm:
    coefficient: complex
    amplitudes: tuple[complex, ...]


def overlap_matrix(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """``G[j, k] = <left_j|right_k>`` for rows of per-mode coherent amplitudes."""
    left = np.atleast_2d(np.asarray(left, dtype=complex))
    right = np.atleast_2d(np.asarray(right, dtype=complex))
    if left.shape[1] != right.shape[1]:
        raise ValueError("mode count mismatch")
    na = np.sum(np.abs(left) ** 2, axis=1)
    nb = np.sum(np.abs(right) ** 2, axis=1)
    cross = left.conj() @ right.T
    return np.exp(-0.5 * na[:, None] - 0.5 * nb[None, :] + cross)


def overlap(term_a: CoherentTerm, term_b: CoherentTerm) -> complex:
    """Inner product of two coefficient-weighted coherent products."""
    g = overlap_matrix(np.array([term_a.amplitudes]), np.array([term_b.amplitudes]))[0, 0]
    return complex(np.conj(term_a.coefficient) * term_b.coefficient * g)


def sector_kernel(u: np.ndarray, v: np.ndarray, parity: ParityClass) -> np.ndarray:
    """``<u|P|v>`` for single-mode coherent kets and the sector projector ``P`` (broadcast)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    z = np.conj(u) * v
    damp = np.exp(-0.5 * (np.abs(u) ** 2 + np.abs(v) ** 2))
    if parity is ParityClass.ZERO:
        return damp * np.ones_like(z)
    if parity is ParityClass.ODD:
        return damp * np.sinh(z)
    if parity is ParityClass.EVEN_INCLUDING_ZERO:
        return damp * np.cosh(z)
    # cosh(z) - 1 without cancellation for small z
    return damp * 2.0 * np.sinh(z / 2.0) ** 2


class CoherentSuperposition:
    """Linear combination of coherent-product kets on ``num_modes`` modes."""

    __slots__ = ("coefficients", "amplitudes")

    def __init__(self, coefficients, amplitudes):
        c = np.asarray(coefficients, dtype=complex).reshape(-1)
        a = np.asarray(amplitudes, dtype=complex)
        if a.ndim != 2 or a.shape[0] != c.shape[0]:
            raise ValueError("one amplitude row per coefficient required")
        self.coefficients = c
        self.amplitudes = a

    @classmethod
    def from_terms(
        cls, terms: Sequence[tuple[complex, Sequence[complex]]]
    ) -> CoherentSuperposition:
        coeffs = [c for c, _ in terms]
        amps = [list(a) for _, a in terms]
        widths = {len(a) for a in amps}
        if len(widths) != 1:
            raise ValueError("all terms must have the same number of modes")
        return cls(coeffs, np.array(amps, dtype=complex))

    @classmethod
    def coherent(cls, *amplitudes: complex) -> CoherentSuperposition:
        """Single product ket ``|a_0>|a_1>...``."""
        return cls([1.0], np.array([amplitudes], dtype=complex))

    @property
    def num_modes(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def terms(self) -> list[CoherentTerm]:
        return [
            CoherentTerm(complex(c), tuple(complex(x) for x in row))
            for c, row in zip(self.coefficients, self.amplitudes)
        ]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __repr__(self) -> str:
        parts = []
        for term in self.terms[:6]:
            amps = ", ".join(f"{a:.4g}" for a in term.amplitudes)
            parts.append(f"{term.coefficient:.4g}|{amps}>")
        more = " + ..." if len(self) > 6 else ""
        return f"CoherentSuperposition({' + '.join(parts)}{more})"

    def __mul__(self, scalar: complex) -> CoherentSuperposition:
        return CoherentSuperposition(self.coefficients * scalar, self.amplitudes.copy())

    __rmul__ = __mul__

    def __add__(self, other: CoherentSuperposition) -> CoherentSuperposition:
        if other.num_modes != self.num_modes:
            raise ValueError("mode count mismatch")
        return CoherentSuperposition(
            np.concatenate([self.coefficients, other.coefficients]),
            np.vstack([self.amplitudes, other.amplitudes]),
        )

    def __sub__(self, other: CoherentSuperposition) -> CoherentSuperposition:
        return self + (-1.0) * other

    def tensor(self, other: CoherentSuperposition) -> CoherentSuperposition:
        """Product state; ``other``'s modes are appended after ``self``'s."""
        n, m = len(self), len(other)
        coeffs = np.outer(self.coefficients, other.coefficients).reshape(-1)
        amps = np.hstack([np.repeat(self.amplitudes, m, axis=0), np.tile(other.amplitudes, (n, 1))])
        return CoherentSuperposition(coeffs, amps)

    def permute_modes(self, order: Sequence[int]) -> CoherentSuperposition:
        if sorted(order) != list(range(self.num_modes)):
            raise ValueError(f"{order} is not a permutation of {self.num_modes} modes")
        return CoherentSuperposition(self.coefficients.copy(), self.amplitudes[:, list(order)])

    def merge_terms(self, tol: float = MERGE_TOL) -> CoherentSuperposition:
        """Combine terms whose amplitude rows agree componentwise within ``tol``."""
        keep_c: list[complex] = []
        keep_a: list[np.ndarray] = []
        for c, row in zip(self.coefficients, self.amplitudes):
            for i, other in enumerate(keep_a):
                if np.all(np.abs(other - row) <= tol):
                    keep_c[i] += c
                    break
            else:
                keep_c.append(complex(c))
                keep_a.append(row.copy())
        if not keep_c:
            return CoherentSuperposition(np.zeros(0), np.zeros((0, self.num_modes)))
        c = np.array(keep_c)
        scale = np.max(np.abs(c))
        mask = np.abs(c) > 1e-15 * scale if scale > 0 else np.zeros(len(c), bool)
        return CoherentSuperposition(c[mask], np.array(keep_a)[mask].reshape(-1, self.num_modes))

    def gram(self) -> np.ndarray:
        return overlap_matrix(self.amplitudes, self.amplitudes)

    def norm_squared(self) -> float:
        return float(np.real(self.coefficients.conj() @ self.gram() @ self.coefficients))

    def normalize(self) -> CoherentSuperposition:
        n2 = self.norm_squared()
        if n2 < NULL_NORM:
            raise ValueError(f"cannot normalize a null superposition (<psi|psi> = {n2:.3e})")
        return self * (1.0 / math.sqrt(n2))

    def apply_linear_optic(
        self, matrix: np.ndarray, mode_p: int, mode_q: int
    ) -> CoherentSuperposition:
        return apply_linear_optic(self, matrix, mode_p, mode_q)

    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.amplitudes))) if self.amplitudes.size else 0.0


def inner_product(psi: CoherentSuperposition, phi: CoherentSuperposition) -> complex:
    """``<psi|phi>`` by bilinear expansion over term pairs."""
    if psi.num_modes != phi.num_modes:
        raise ValueError("mode count mismatch")
    g = overlap_matrix(psi.amplitudes, phi.amplitudes)
    return complex(psi.coefficients.conj() @ g @ phi.coefficients)


def normalize(psi: CoherentSuperposition) -> CoherentSuperposition:
    return psi.normalize()


def distance_squared(psi: CoherentSuperposition, phi: CoherentSuperposition) -> float:
    """``|| psi - phi ||^2`` evaluated with exact overlaps.

    Coinciding kets are cancelled before the norm is taken; expanding
    ``<psi|psi> + <phi|phi> - 2 Re <psi|phi>`` instead would bottom out near 1e-16.
    """
    diff = (psi - phi).merge_terms(tol=1e-12)
    return max(0.0, diff.norm_squared()) if len(diff) else 0.0


def apply_linear_optic(
    psi: CoherentSuperposition, matrix: np.ndarray, mode_p: int, mode_q: int
) -> CoherentSuperposition:
    """Pass ``psi`` through a two-mode element with creation-operator transfer ``matrix``.

    Input amplitude ``g_i`` on port ``i`` contributes ``g_i * matrix[i, j]`` to output
    port ``j``; coefficients are untouched.
    """
    m = np.asarray(matrix)
    if m.shape != (2, 2):
        raise ValueError("transfer matrix must be 2x2")
    if not np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12, rtol=0.0):
        raise ValueError(f"transfer matrix is not unitary:\n{m}")
    if mode_p == mode_q or not (0 <= mode_p < psi.num_modes and 0 <= mode_q < psi.num_modes):
        raise ValueError(f"invalid modes ({mode_p}, {mode_q})")
    amps = psi.amplitudes.copy()
    amps[:, [mode_p, mode_q]] = psi.amplitudes[:, [mode_p, mode_q]] @ m
    return CoherentSuperposition(psi.coefficients.copy(), amps)


def _weight_matrix(
    psi: CoherentSuperposition,
    modes: Sequence[int],
    sectors: Mapping[int, ParityClass],
) -> np.ndarray:
    """``W[l, k] = prod over modes of <u_l|P_m|u_k>`` (overlap where no sector is given)."""
    n = len(psi)
    w = np.ones((n, n), dtype=complex)
    for m in modes:
        u = psi.amplitudes[:, m]
        parity = sectors.get(m)
        if parity is None:
            w *= overlap_matrix(u[:, None], u[:, None])
        else:
            w *= sector_kernel(u[:, None], u[None, :], parity)
    return w


def sector_probability(psi: CoherentSuperposition, sectors: Mapping[int, ParityClass]) -> float:
    """Joint probability that each mode in ``sectors`` lands in its parity class."""
    w = _weight_matrix(psi, range(psi.num_modes), sectors)
    p = float(np.real(psi.coefficients.conj() @ w @ psi.coefficients))
    return max(0.0, p)


def _distinct_rows(rows: np.ndarray, tol: float = MERGE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Representative rows and, for every input row, the index of its representative."""
    reps: list[np.ndarray] = []
    index = np.empty(len(rows), dtype=int)
    for i, row in enumerate(rows):
        for j, rep in enumerate(reps):
            if np.all(np.abs(rep - row) <= tol):
                index[i] = j
                break
        else:
            index[i] = len(reps)
            reps.append(row)
    width = rows.shape[1] if rows.ndim == 2 else 0
    return np.array(reps, dtype=complex).reshape(-1, width), index


@dataclass(frozen=True)
class CoherentDensity:
    """Unnormalized operator ``sum_ij R[i, j] |k_i><k_j|`` over coherent-product kets ``k``.

    ``gram[i, j] = <k_i|k_j>``. The trace of the operator is the probability of the
    conditioning event that produced it.
    """

    kets: np.ndarray
    coefficients: np.ndarray
    gram: np.ndarray

    def trace(self) -> float:
        return float(np.real(np.trace(self.coefficients @ self.gram)))

    def eigenvalues(self) -> np.ndarray:
        """Spectrum of the operator itself, via the symmetric square root of the Gram."""
        half = _psd_sqrt(self.gram)
        return np.linalg.eigvalsh(half @ self.coefficients @ half)

    def expectation(self, target: np.ndarray) -> complex:
        """``<t|rho|t>`` for ``|t> = sum_i target_i |k_i>``."""
        st = self.gram @ np.asarray(target, dtype=complex)
        return complex(st.conj() @ self.coefficients @ st)

    def transformed(self, matrix: np.ndarray) -> CoherentDensity:
        """Apply a linear map to the ket coefficients: ``R -> M R M^dagger``."""
        m = np.asarray(matrix, dtype=complex)
        return CoherentDensity(self.kets, m @ self.coefficients @ m.conj().T, self.gram)

    def pure_state(self, tol: float = 1e-9) -> CoherentSuperposition | None:
        """The state vector if the operator has rank one, else ``None``."""
        tr = self.trace()
        if tr <= 0.0:
            return None
        ev = np.sort(self.eigenvalues())[::-1]
        if len(ev) > 1 and ev[1] > tol * tr:
            return None
        w, v = np.linalg.eigh((self.coefficients + self.coefficients.conj().T) / 2)
        top = v[:, np.argmax(w)] * math.sqrt(max(w.max(), 0.0))
        return CoherentSuperposition(top, self.kets).normalize()


def conditional_density(
    psi: CoherentSuperposition,
    keep_modes: Sequence[int],
    sectors: Mapping[int, ParityClass] | None = None,
) -> CoherentDensity:
    """Project the modes in ``sectors`` onto their parity classes and trace out all modes
    outside ``keep_modes``. The result's trace is the event probability."""
    sectors = dict(sectors or {})
    keep_modes = list(keep_modes)
    if set(keep_modes) & set(sectors):
        raise ValueError("measured modes cannot be kept")
    traced = [m for m in range(psi.num_modes) if m not in keep_modes]
    w = _weight_matrix(psi, traced, sectors)
    kets, index = _distinct_rows(psi.amplitudes[:, keep_modes])
    n = len(kets)
    onehot = np.zeros((len(psi), n))
    onehot[np.arange(len(psi)), index] = 1.0
    c = psi.coefficients
    # R[i, j] = sum_{k in i, l in j} c_k conj(c_l) W[l, k]
    r = onehot.T @ (c[:, None] * w.T * c.conj()[None, :]) @ onehot
    return CoherentDensity(kets, r, overlap_matrix(kets, kets))


def _parity_image(u: complex, parity: ParityClass) -> list[tuple[complex, complex]]:
    """Coherent-ket expansion of ``P|u>`` as (coefficient, amplitude) pairs."""
    vac = math.exp(-abs(u) ** 2 / 2)
    if parity is ParityClass.ZERO:
        return [(vac, 0.0)]
    if parity is ParityClass.ODD:
        return [(0.5, u), (-0.5, -u)]
    if parity is ParityClass.EVEN_INCLUDING_ZERO:
        return [(0.5, u), (0.5, -u)]
    return [(0.5, u), (0.5, -u), (-vac, 0.0)]


def _factor_weights(u: np.ndarray, parity: ParityClass) -> tuple[np.ndarray, complex] | None:
    """Weights ``w_k`` and reference amplitude ``a`` with ``P|u_k> = w_k P|a>`` for every k,
    or ``None`` if the projected kets are not all parallel."""
    if parity is ParityClass.ZERO:
        return np.exp(-0.5 * np.abs(u) ** 2), 0.0
    nonzero = np.abs(u) > MERGE_TOL
    if not nonzero.any():
        if parity is ParityClass.EVEN_INCLUDING_ZERO:
            return np.ones(len(u)), 0.0
        return None
    ref = u[np.argmax(nonzero)]
    w = np.zeros(len(u), dtype=complex)
    for k, uk in enumerate(u):
        if abs(uk - ref) <= MERGE_TOL:
            w[k] = 1.0
        elif abs(uk + ref) <= MERGE_TOL:
            w[k] = -1.0 if parity is ParityClass.ODD else 1.0
        elif abs(uk) <= MERGE_TOL and parity is not ParityClass.EVEN_INCLUDING_ZERO:
            w[k] = 0.0
        else:
            return None
    return w, ref


def project_parity(
    psi: CoherentSuperposition, mode: int, parity: ParityClass
) -> tuple[float, CoherentSuperposition | None]:
    """Probability of ``parity`` on ``mode`` and the normalized post-measurement state.

    The measured mode is kept (now holding a cat or vacuum component), which makes the
    result exact for any input.
    """
    if not 0 <= mode < psi.num_modes:
        raise ValueError(f"mode {mode} out of range")
    prob = sector_probability(psi, {mode: parity})
    if prob <= 0.0:
        return 0.0, None
    coeffs, rows = [], []
    for c, row in zip(psi.coefficients, psi.amplitudes):
        for w, a in _parity_image(row[mode], parity):
            new = row.copy()
            new[mode] = a
            coeffs.append(c * w / math.sqrt(prob))
            rows.append(new)
    return prob, CoherentSuperposition(coeffs, np.array(rows)).merge_terms()


def parity_projection(
    psi: CoherentSuperposition, mode: int, parity: ParityClass, keep_mode: bool = False
) -> tuple[float, CoherentSuperposition | None]:
    """Probability of ``parity`` on ``mode`` and the conditional state of the other modes.

    With ``keep_mode=False`` the measured mode is removed, which requires the projected
    mode to factor out (its projected kets must all be parallel, as for amplitudes
    ``+u``/``-u``/``0``). A :class:`ValueError` is raised otherwise, since the remaining
    modes would then be in a mixed state.
    """
    if keep_mode:
        return project_parity(psi, mode, parity)
    psi = psi.merge_terms()
    prob = sector_probability(psi, {mode: parity})
    if prob <= 0.0:
        return 0.0, None
    factor = _factor_weights(psi.amplitudes[:, mode], parity)
    if factor is None:
        raise ValueError(
            f"mode {mode} does not factor out after a {parity} projection; "
            "the remaining modes are mixed (use keep_mode=True)"
        )
    w, _ = factor
    rest = [m for m in range(psi.num_modes) if m != mode]
    cond = CoherentSuperposition(psi.coefficients * w, psi.amplitudes[:, rest]).merge_terms()
    if len(cond) == 0 or cond.norm_squared() < NULL_NORM:
        return prob, None
    return prob, cond.normalize()


def to_fock(psi: CoherentSuperposition, cutoff: int, guard: bool = True) -> FockState:
    """Expand into a truncated Fock state (dense).

    With ``guard`` off the expansion is truncated silently and the caller is expected
    to compare norms.
    """
    need = required_cutoff(psi.max_amplitude())
    if guard and cutoff < need:
        raise CutoffError(
            f"cutoff {cutoff} too small for max amplitude {psi.max_amplitude():.4g}; "
            f"need at least {need}"
        )
    d = cutoff + 1
    tensor = np.zeros((d,) * psi.num_modes, dtype=complex)
    for c, row in zip(psi.coefficients, psi.amplitudes):
        factor = np.array(c, dtype=complex)
        for a in row:
            factor = np.multiply.outer(factor, coherent_to_fock(a, cutoff, guard=False).tensor)
        tensor += factor
    return FockState(tensor)


def _psd_sqrt(gram: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((gram + gram.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def _side_basis(
    psi: CoherentSuperposition, modes: Sequence[int]
) -> tuple[np.ndarray, np.ndarray, int]:
    kets, index = _distinct_rows(psi.amplitudes[:, list(modes)])
    gram = overlap_matrix(kets, kets)
    w = np.linalg.eigvalsh(gram)
    if w.min() < ORTHOGONALITY_TOL * max(1.0, w.max()):
        warnings.warn(
            f"near-singular Gram matrix on modes {list(modes)} (min eigenvalue {w.min():.2e}); "
            "entropy uses the regularized square root",
            RuntimeWarning,
            stacklevel=3,
        )
    return index, _psd_sqrt(gram), len(kets)


def schmidt_weights(
    psi: CoherentSuperposition, modes_a: Sequence[int], modes_b: Sequence[int]
) -> np.ndarray:
    """Squared Schmidt coefficients of the normalized state across the ``a|b`` cut.

    Each side's distinct kets form a non-orthogonal basis; the coefficient matrix is
    moved into the symmetrically orthogonalized bases (``S_a^1/2 C S_b^1/2^T``) and its
    singular values are taken.
    """
    modes_a, modes_b = list(modes_a), list(modes_b)
    if sorted(modes_a + modes_b) != list(range(psi.num_modes)) or not modes_a or not modes_b:
        raise ValueError("modes_a and modes_b must partition all modes")
    psi = psi.merge_terms()
    ia, half_a, na = _side_basis(psi, modes_a)
    ib, half_b, nb = _side_basis(psi, modes_b)
    coeff = np.zeros((na, nb), dtype=complex)
    np.add.at(coeff, (ia, ib), psi.coefficients)
    s = np.linalg.svd(half_a @ coeff @ half_b.T, compute_uv=False)
    p = s**2
    return p / p.sum()


def entanglement_entropy(
    psi: CoherentSuperposition, modes_a: Sequence[int], modes_b: Sequence[int]
) -> float:
    """Von Neumann entropy (bits) of either side of a pure coherent superposition."""
    p = schmidt_weights(psi, modes_a, modes_b)
    p = p[p > 1e-12]
    return float(max(0.0, -np.sum(p * np.log2(p))))
