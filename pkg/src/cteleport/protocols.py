"""Conclusive teleportation over a nonmaximally entangled channel, three encodings.

Case ``a`` teleports ``x|1> + y|0>`` (photon number), case ``b`` teleports
``x|V> + y|H>`` (polarization, dual rail) and case ``c`` teleports
``x|alpha> + y|-alpha>`` (coherent states). Each case builds the shared resource,
sends Alice's modes through a lossy Bell-measurement network, enumerates every
detector pattern exactly and scores Bob's corrected state against the input.

Mode layouts after the network (before it, E/F are Alice's A/C modes):

* case a: ``E, F, Y, B``
* case b: rails ``E_V, E_H, F_V, F_H, Y_V, Y_H, W_V, W_H, B_V, B_H``; detectors
  ``E1, E2, F1, F2`` are the ``E_V, E_H, F_V, F_H`` rails and ``W`` is the
  auxiliary port used to route the horizontal component of A around the attenuator
* case c: ``E, F, Y, B``
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import coherent as coh
from . import fock
from .coherent import CoherentDensity, CoherentSuperposition, ParityClass
from .fock import BeamSplitter, DensityMatrix, FockState, PolarizingBeamSplitter

CASES = ("a", "b", "c")
PROB_FLOOR = 1e-12
CONSISTENCY_TOL = 1e-10
NORM_TOL = 1e-12
SUM_TOL = 1e-8

FOCK_CUTOFF = 2
# transmission of a 50:50 splitter, also the default equal-weight input amplitude
BALANCED = 1.0 / math.sqrt(2.0)

# detector modes after each network
DETECTORS = {"a": (0, 1, 2), "b": (0, 1, 2, 3), "c": (0, 1, 2)}
BOB_MODES = {"a": (3,), "b": (8, 9), "c": (3,)}
# Bob's qubit basis kets (first, second) as occupation tuples of BOB_MODES
BOB_BASIS = {"a": ((1,), (0,)), "b": ((1, 0), (0, 1))}

PARITY_E_F = (ParityClass.ZERO, ParityClass.ODD, ParityClass.EVEN_NONZERO)
PARITY_Y = (ParityClass.ODD, ParityClass.EVEN_INCLUDING_ZERO)

Pattern = tuple
State = FockState | CoherentSuperposition


class ToleranceError(RuntimeError):
    """A numerical self-consistency check failed."""


@dataclass(frozen=True)
class QubitSpec:
    """Input qubit ``x|first> + y|second>`` and channel parameters.

    For cases ``a``/``b`` the pair ``(x, y)`` must be normalized; for case ``c`` it is
    free and normalization accounts for the overlap of ``|alpha>`` and ``|-alpha>``.
    """

    case: str
    x: complex
    y: complex
    eta: float
    alpha: float | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}, got {self.case!r}")
        check_eta(self.eta)
        if self.case == "c":
            if self.alpha is None or self.alpha <= 0:
                raise ValueError("case c requires alpha > 0")
            if abs(self.x) == 0 and abs(self.y) == 0:
                raise ValueError("x and y cannot both vanish")
        else:
            n2 = abs(self.x) ** 2 + abs(self.y) ** 2
            if abs(n2 - 1.0) > NORM_TOL:
                raise ValueError(f"|x|^2 + |y|^2 = {n2!r}, must be 1 for case {self.case}")

    @classmethod
    def normalized(cls, case: str, x: complex, y: complex, eta: float, alpha: float | None = None):
        """Like the constructor but rescales ``(x, y)`` to unit norm for cases a/b."""
        if case in ("a", "b"):
            n = math.sqrt(abs(x) ** 2 + abs(y) ** 2)
            if n == 0:
                raise ValueError("x and y cannot both vanish")
            x, y = x / n, y / n
        return cls(case, complex(x), complex(y), float(eta), alpha)


@dataclass
class OutcomeRecord:
    pattern: Pattern
    probability: float
    branch: int | None
    bob_state: object | None = None
    fidelity: float | None = None

    @property
    def conclusive(self) -> bool:
        return self.branch is not None

    def pattern_label(self) -> str:
        return "(" + ",".join(str(p) for p in self.pattern) + ")"


@dataclass
class ProtocolResult:
    spec: QubitSpec
    resource_entanglement: float
    records: list[OutcomeRecord] = field(repr=False)
    success_probability: float
    min_conclusive_fidelity: float

    @property
    def conclusive_records(self) -> list[OutcomeRecord]:
        return [r for r in self.records if r.conclusive]

    @property
    def total_probability(self) -> float:
        return float(sum(r.probability for r in self.records))


def check_eta(eta: float) -> None:
    if not (0.0 < eta <= math.pi / 4 + 1e-15):
        raise ValueError(f"eta must lie in (0, pi/4], got {eta}")


def attenuator_t(eta: float) -> float:
    """Transmission of the loss beam splitter, ``tan(eta)`` clipped to 1."""
    return min(math.sin(eta) / math.cos(eta), 1.0)


def attenuator_r(eta: float) -> float:
    """``sqrt(1 - tan^2 eta)`` written to stay accurate near ``pi/4``."""
    return math.sqrt(max(0.0, math.cos(2 * eta))) / math.cos(eta)


# --------------------------------------------------------------------------- resources


def _resource_a_direct(eta: float) -> FockState:
    return fock.from_amplitudes(2, FOCK_CUTOFF, {(1, 0): math.cos(eta), (0, 1): -math.sin(eta)})


def _resource_a_circuit(eta: float) -> FockState:
    # single photon enters port J (first input); outputs A (first) and B (second)
    photon = fock.make_fock_state(2, FOCK_CUTOFF, (1, 0))
    return BeamSplitter(0, 1, math.cos(eta)).apply(photon)


def _resource_b_direct(eta: float) -> FockState:
    # rails A_V, A_H, B_V, B_H
    return fock.from_amplitudes(
        4, FOCK_CUTOFF, {(1, 0, 0, 1): math.cos(eta), (0, 1, 1, 0): -math.sin(eta)}
    )


def _resource_c_direct(eta: float, alpha: float) -> CoherentSuperposition:
    beta = alpha * math.tan(eta)
    psi = CoherentSuperposition.from_terms([(1.0, (beta, -alpha)), (-1.0, (-beta, alpha))])
    return psi.normalize()


def _resource_c_circuit(eta: float, alpha: float) -> CoherentSuperposition:
    # odd cat of amplitude alpha/cos(eta) on port J (first input), vacuum on I
    g = alpha / math.cos(eta)
    cat = CoherentSuperposition.from_terms([(1.0, (g, 0.0)), (-1.0, (-g, 0.0))])
    return BeamSplitter(0, 1, math.sin(eta)).apply(cat).merge_terms().normalize()


def make_resource(case: str, eta: float, alpha: float | None = None) -> State:
    """Shared entangled state on Alice's mode A and Bob's mode B.

    Cases a and c are built both from the closed form and by simulating the source
    beam splitter; a :class:`ToleranceError` is raised if the two disagree.
    """
    check_eta(eta)
    if case == "a":
        direct = _resource_a_direct(eta)
        built = _resource_a_circuit(eta)
        gap = (direct - built).norm_squared()
    elif case == "b":
        return _resource_b_direct(eta)
    elif case == "c":
        if alpha is None or alpha <= 0:
            raise ValueError("case c requires alpha > 0")
        if alpha < 3:
            warnings.warn(
                f"alpha={alpha} < 3: |alpha> and |-alpha> overlap noticeably", stacklevel=2
            )
        direct = _resource_c_direct(eta, alpha)
        built = _resource_c_circuit(eta, alpha)
        gap = coh.distance_squared(direct, built)
    else:
        raise ValueError(f"unknown case {case!r}")
    if gap > CONSISTENCY_TOL:
        raise ToleranceError(f"source circuit and closed form differ by {gap:.3e} (case {case})")
    return direct


def make_input(spec: QubitSpec) -> State:
    """Alice's unknown qubit on mode C (two rails for case b)."""
    if spec.case == "a":
        return fock.from_amplitudes(1, FOCK_CUTOFF, {(1,): spec.x, (0,): spec.y})
    if spec.case == "b":
        return fock.from_amplitudes(2, FOCK_CUTOFF, {(1, 0): spec.x, (0, 1): spec.y})
    a = spec.alpha
    return CoherentSuperposition.from_terms([(spec.x, (a,)), (spec.y, (-a,))]).normalize()


# --------------------------------------------------------------------------- networks


def network(case: str, eta: float) -> list:
    """Optical elements of the measurement network, in application order."""
    t2, r2 = attenuator_t(eta), attenuator_r(eta)
    if case == "a":
        return [BeamSplitter(0, 2, t2, r2), BeamSplitter(0, 1, BALANCED)]
    if case == "b":
        a, c, y, w = (0, 1), (2, 3), (4, 5), (6, 7)
        return [
            PolarizingBeamSplitter(a, w),
            BeamSplitter(y[0], a[0], t2, r2),
            BeamSplitter(y[1], a[1], t2, r2),
            PolarizingBeamSplitter(a, w),
            BeamSplitter(a[0], c[0], BALANCED),
            BeamSplitter(a[1], c[1], BALANCED),
        ]
    if case == "c":
        return [BeamSplitter(2, 1, t2, r2), BeamSplitter(0, 1, BALANCED)]
    raise ValueError(f"unknown case {case!r}")


def initial_state(spec: QubitSpec) -> State:
    """Resource, input and vacuum ancillas laid out in the network's mode order."""
    res = make_resource(spec.case, spec.eta, spec.alpha)
    inp = make_input(spec)
    if spec.case == "a":
        vac = fock.vacuum(1, FOCK_CUTOFF)
        joint = fock.tensor_product(res, inp, vac)  # A, B, C, Y
        return fock.permute_modes(joint, [0, 2, 3, 1])
    if spec.case == "b":
        vac = fock.vacuum(4, FOCK_CUTOFF)
        joint = fock.tensor_product(res, inp, vac)  # A(2), B(2), C(2), Y(2), W(2)
        return fock.permute_modes(joint, [0, 1, 4, 5, 6, 7, 8, 9, 2, 3])
    joint = res.tensor(inp).tensor(CoherentSuperposition.coherent(0.0))  # A, B, C, Y
    return joint.permute_modes([0, 2, 3, 1])


@lru_cache(maxsize=256)
def _photon_basis_outputs(case: str, eta: float) -> tuple[FockState, FockState]:
    # the photon networks are linear in (x, y), so two runs per eta cover every input
    return tuple(
        run_network(QubitSpec(case, x, y, eta), network(case, eta)) for x, y in ((1, 0), (0, 1))
    )


def run_network(spec: QubitSpec, elements: Sequence | None = None) -> State:
    """Joint output state on the detector modes and Bob's mode."""
    if elements is None and spec.case in ("a", "b"):
        first, second = _photon_basis_outputs(spec.case, spec.eta)
        return first * spec.x + second * spec.y
    state = initial_state(spec)
    for element in elements if elements is not None else network(spec.case, spec.eta):
        state = element.apply(state)
    if isinstance(state, CoherentSuperposition):
        state = state.merge_terms()
    return state


# --------------------------------------------------------------------------- classification


def classify(case: str, pattern: Pattern) -> int | None:
    """Branch 1-4 of a conclusive detector pattern, ``None`` when inconclusive."""
    if case == "a":
        return {(0, 1, 0): 1, (1, 0, 0): 2}.get(tuple(pattern))
    if case == "b":
        return {(1, 0, 0, 1): 1, (0, 1, 1, 0): 1, (1, 1, 0, 0): 2, (0, 0, 1, 1): 2}.get(
            tuple(pattern)
        )
    if case == "c":
        e, f, y = pattern
        zero = ParityClass.ZERO
        if (e is zero) == (f is zero):
            # both silent: failure; both firing: cannot occur
            return None
        active, first = (f, 1) if e is zero else (e, 3)
        odd_active = active is ParityClass.ODD
        odd_y = y is ParityClass.ODD
        return first if odd_active != odd_y else first + 1
    raise ValueError(f"unknown case {case!r}")


@dataclass(frozen=True)
class Correction:
    """Linear map on Bob's (first, second) basis coefficients and the ideal target."""

    matrix: np.ndarray
    target: np.ndarray


_BRANCH_MAPS = {
    1: np.array([[1, 0], [0, 1]], dtype=complex),
    2: np.array([[1, 0], [0, -1]], dtype=complex),
    3: np.array([[0, 1], [1, 0]], dtype=complex),
    4: np.array([[0, 1], [-1, 0]], dtype=complex),
}


def bob_correct(branch: int | None, spec: QubitSpec) -> Correction:
    """Bob's formal inverse of the branch's coefficient map.

    Branch vectors are ``(x, y)``, ``(x, -y)``, ``(y, x)`` and ``(-y, x)``; each matrix
    sends its branch vector back to ``(x, y)``.
    """
    if branch not in _BRANCH_MAPS:
        raise ValueError(f"no correction for inconclusive outcome (branch={branch!r})")
    return Correction(_BRANCH_MAPS[branch], np.array([spec.x, spec.y], dtype=complex))


def branch_vector(branch: int, x: complex, y: complex) -> np.ndarray:
    return {1: (x, y), 2: (x, -y), 3: (y, x), 4: (-y, x)}[branch]


# --------------------------------------------------------------------------- outcomes


def fock_fidelity(density: DensityMatrix, case: str, correction: Correction) -> float:
    first, second = BOB_BASIS[case]
    idx = [density.index(first), density.index(second)]
    block = density.matrix[np.ix_(idx, idx)]
    corrected = correction.matrix @ block @ correction.matrix.conj().T
    t = correction.target / np.linalg.norm(correction.target)
    return float(np.real(t.conj() @ corrected @ t))


def coherent_fidelity(density: CoherentDensity, alpha: float, correction: Correction) -> float:
    """Fidelity of Bob's corrected state with ``x|alpha> + y|-alpha>``."""
    basis = np.array([[alpha], [-alpha]], dtype=complex)
    expanded = _expand_to_basis(density, basis)
    corrected = expanded.transformed(correction.matrix)
    tr = corrected.trace()
    if tr <= 0.0:
        return 0.0
    target = correction.target
    tnorm = float(np.real(target.conj() @ corrected.gram @ target))
    return float(np.real(corrected.expectation(target)) / (tr * tnorm))


def _expand_to_basis(density: CoherentDensity, basis: np.ndarray) -> CoherentDensity:
    """Re-express ``density`` on the fixed ket list ``basis`` (every ket must appear there)."""
    n = len(basis)
    embed = np.zeros((n, len(density.kets)))
    for j, ket in enumerate(density.kets):
        hits = np.flatnonzero(np.all(np.abs(basis - ket) <= coh.MERGE_TOL, axis=1))
        if len(hits) != 1:
            raise ToleranceError(f"Bob's ket {ket} is not one of the qubit basis kets")
        embed[hits[0], j] = 1.0
    return CoherentDensity(
        basis, embed @ density.coefficients @ embed.T, coh.overlap_matrix(basis, basis)
    )


def patterns(case: str) -> list[Pattern]:
    """Every detector pattern considered for ``case``, including impossible ones."""
    if case == "a":
        return list(fock.occupation_tuples(3, FOCK_CUTOFF))
    if case == "b":
        return list(fock.occupation_tuples(4, FOCK_CUTOFF))
    return [(e, f, y) for e in PARITY_E_F for f in PARITY_E_F for y in PARITY_Y]


def _fock_record(spec: QubitSpec, joint: FockState, pattern: Pattern) -> OutcomeRecord:
    branch = classify(spec.case, pattern)
    prob, rest = fock.project_counts(joint, DETECTORS[spec.case], pattern)
    record = OutcomeRecord(pattern, prob, branch)
    if rest is None or prob <= PROB_FLOOR:
        return record
    remaining = [m for m in range(joint.num_modes) if m not in DETECTORS[spec.case]]
    bob = [remaining.index(m) for m in BOB_MODES[spec.case]]
    if len(bob) == rest.num_modes:
        record.bob_state = rest
        density = DensityMatrix(
            tuple(np.ndindex(*(rest.cutoff + 1,) * rest.num_modes)),
            np.outer(rest.tensor.ravel(), rest.tensor.ravel().conj()),
        )
    else:
        density = fock.reduced_density(rest, bob)
        record.bob_state = density
    if branch is not None:
        record.fidelity = fock_fidelity(density, spec.case, bob_correct(branch, spec))
    return record


def _coherent_record(
    spec: QubitSpec, joint: CoherentSuperposition, pattern: Pattern
) -> OutcomeRecord:
    branch = classify(spec.case, pattern)
    sectors = dict(zip(DETECTORS["c"], pattern))
    density = coh.conditional_density(joint, BOB_MODES["c"], sectors)
    prob = max(0.0, density.trace())
    record = OutcomeRecord(pattern, prob, branch)
    if prob <= PROB_FLOOR:
        return record
    record.bob_state = density.pure_state()
    if branch is not None:
        record.fidelity = coherent_fidelity(density, spec.alpha, bob_correct(branch, spec))
    return record


def enumerate_outcomes(spec: QubitSpec, joint: State) -> list[OutcomeRecord]:
    """One record per detector pattern with exact probability and Bob's conditional state.

    Fidelities are only reported for patterns above ``PROB_FLOOR``; below it the
    conditional state is numerically meaningless and the record carries ``None``.
    """
    make = _coherent_record if spec.case == "c" else _fock_record
    return [make(spec, joint, p) for p in patterns(spec.case)]


def resource_entanglement(case: str, eta: float, alpha: float | None = None) -> float:
    """Entropy (bits) of Alice's half of the shared resource."""
    res = make_resource(case, eta, alpha)
    if case == "a":
        return fock.von_neumann_entropy(fock.reduced_density(res, [0]))
    if case == "b":
        return fock.von_neumann_entropy(fock.reduced_density(res, [0, 1]))
    return coh.entanglement_entropy(res, [0], [1])


def summarize(records: list[OutcomeRecord], spec: QubitSpec) -> ProtocolResult:
    total = sum(r.probability for r in records)
    if abs(total - 1.0) > SUM_TOL:
        raise ToleranceError(f"outcome probabilities sum to {total!r}")
    conclusive = [r for r in records if r.conclusive]
    success = float(sum(r.probability for r in conclusive))
    fids = [r.fidelity for r in conclusive if r.fidelity is not None]
    return ProtocolResult(
        spec=spec,
        resource_entanglement=resource_entanglement(spec.case, spec.eta, spec.alpha),
        records=records,
        success_probability=success,
        min_conclusive_fidelity=min(fids) if fids else float("nan"),
    )


def run_protocol(spec: QubitSpec) -> ProtocolResult:
    joint = run_network(spec)
    return summarize(enumerate_outcomes(spec, joint), spec)


def success_probability(spec: QubitSpec) -> float:
    """Success probability alone, skipping conditional states and fidelities."""
    joint = run_network(spec)
    if spec.case != "c":
        dist = fock.count_distribution(joint, DETECTORS[spec.case])
        return float(sum(p for pattern, p in dist.items() if classify(spec.case, pattern)))
    fail = coh.sector_probability(joint, {0: ParityClass.ZERO, 1: ParityClass.ZERO})
    return 1.0 - fail


def closed_form_success(eta: float) -> float:
    """Success probability of the photon-number and polarization schemes."""
    return math.sin(eta) ** 2


def binary_entropy(p: float) -> float:
    return float(-sum(q * math.log2(q) for q in (p, 1.0 - p) if q > 0.0))
