"""Invariant suite behind ``cteleport validate``.

Each group returns ``(ok, message)``. Groups never raise for a failed check; numerical
errors such as :class:`~cteleport.fock.CutoffError` are caught and reported as the
group's diagnostic.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np

from . import closed_forms as cf
from . import coherent as coh
from . import fock, oracle
from . import protocols as proto

CHECK_ETAS = (math.pi / 12, math.pi / 8, math.pi / 6, math.pi / 4)
MATCH_TOL = 1e-9
ORACLE_TOL = 1e-6
# |alpha> and |-alpha> overlap by exp(-2 alpha^2), which bounds the case c fidelity
CAT_FIDELITY_TOL = 1e-5
ALPHA = 3.0
SEED = 20240229

GroupResult = tuple[bool, str]


def _random_qubits(count: int, seed: int = SEED) -> list[tuple[complex, complex]]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.normal(size=4)
        x, y = complex(v[0], v[1]), complex(v[2], v[3])
        n = math.hypot(abs(x), abs(y))
        out.append((x / n, y / n))
    return out


def fock_unitarity(cutoff: int = 6) -> GroupResult:
    worst = 0.0
    for t in (0.1, 0.3, 1 / math.sqrt(2), 0.9, 1.0):
        entries = tuple(complex(v) for v in fock.beam_splitter_matrix(t).ravel())
        for block in fock._transfer_blocks(entries, cutoff):
            eye = np.eye(len(block))
            worst = max(worst, float(np.abs(block @ block.conj().T - eye).max()))
    # Hong-Ou-Mandel dip: no coincidences behind a balanced splitter
    hom = fock.BeamSplitter(0, 1, proto.BALANCED).apply(fock.make_fock_state(2, 2, (1, 1)))
    worst = max(worst, abs(hom.amplitude((1, 1))))
    return worst < MATCH_TOL, f"max unitarity defect {worst:.2e}"


def _fock_gap(case: str, build: Callable, count: int = 3) -> float:
    worst = 0.0
    for eta in CHECK_ETAS:
        for x, y in _random_qubits(count):
            # explicit elements bypass the cached basis outputs
            spec = proto.QubitSpec(case, x, y, eta)
            out = proto.run_network(spec, proto.network(case, eta))
            worst = max(worst, math.sqrt((out - build(eta, x, y)).norm_squared()))
    return worst


def bell_type_expansion() -> GroupResult:
    worst = 0.0
    for eta in CHECK_ETAS:
        for x, y in _random_qubits(3):
            spec = proto.QubitSpec("a", x, y, eta)
            joint = fock.tensor_product(proto.make_resource("a", eta), proto.make_input(spec))
            worst = max(
                worst, math.sqrt((joint - cf.bell_type_expansion(eta, x, y)).norm_squared())
            )
            spec = proto.QubitSpec("c", x, y, eta, ALPHA)
            pair = proto.make_resource("c", eta, ALPHA).tensor(proto.make_input(spec))
            ref = cf.quasi_bell_expansion(eta, ALPHA, x, y)
            worst = max(worst, math.sqrt(coh.distance_squared(pair.permute_modes([0, 2, 1]), ref)))
    return worst < MATCH_TOL, f"max distance {worst:.2e}"


def number_network_output() -> GroupResult:
    gap = _fock_gap("a", cf.number_network_output)
    return gap < MATCH_TOL, f"max distance {gap:.2e}"


def polarization_network_output() -> GroupResult:
    gap = _fock_gap("b", cf.polarization_network_output)
    return gap < MATCH_TOL, f"max distance {gap:.2e}"


def cat_network_output() -> GroupResult:
    worst = 0.0
    for eta in CHECK_ETAS:
        for x, y in _random_qubits(3):
            out = proto.run_network(proto.QubitSpec("c", x, y, eta, ALPHA))
            ref = cf.cat_network_output(eta, ALPHA, x, y)
            worst = max(worst, math.sqrt(coh.distance_squared(out, ref)))
    return worst < MATCH_TOL, f"max distance {worst:.2e}"


def coherent_fock_equivalence(cutoff: int | None = None, trials: int = 30) -> GroupResult:
    try:
        worst = max(err for _, err in oracle.random_trials(trials, SEED))
        for eta in (math.pi / 6, math.pi / 4):
            spec = proto.QubitSpec.normalized("c", 0.6, 0.8j, eta, ALPHA)
            fast = proto.success_probability(spec)
            worst = max(worst, abs(fast - oracle.success_probability(spec, cutoff)))
    except fock.CutoffError as exc:
        return False, f"leakage: {exc}"
    return worst < ORACLE_TOL, f"max discrepancy {worst:.2e}"


def parity_table_classification(cutoff: int | None = None) -> GroupResult:
    """Every conclusive pattern, checked against Fock-basis conditionals, restores the
    input after its branch correction."""
    photon_loss, cat_loss = 0.0, 0.0
    try:
        for x, y in _random_qubits(2):
            for case in ("a", "b"):
                result = proto.run_protocol(proto.QubitSpec(case, x, y, math.pi / 6))
                photon_loss = max(photon_loss, 1.0 - result.min_conclusive_fidelity)
            spec = proto.QubitSpec("c", x, y, math.pi / 6, ALPHA)
            fids = oracle.conclusive_fidelities(spec, cutoff)
            if len({proto.classify("c", p) for p in fids}) != 4:
                return False, "case c oracle does not reach all four branches"
            cat_loss = max(cat_loss, 1.0 - min(fids.values()))
    except fock.CutoffError as exc:
        return False, f"leakage: {exc}"
    ok = photon_loss < MATCH_TOL and cat_loss < CAT_FIDELITY_TOL
    return ok, f"infidelity {photon_loss:.2e} (photon cases), {cat_loss:.2e} (cat case)"


GROUPS: dict[str, Callable[..., GroupResult]] = {
    "fock_unitarity": fock_unitarity,
    "bell_type_expansion": bell_type_expansion,
    "number_network_output": number_network_output,
    "polarization_network_output": polarization_network_output,
    "cat_network_output": cat_network_output,
    "coherent_fock_equivalence": coherent_fock_equivalence,
    "parity_table_classification": parity_table_classification,
}
_TAKES_CUTOFF = {"coherent_fock_equivalence", "parity_table_classification"}


def run_all(cutoff: int | None = None) -> list[tuple[str, bool, str]]:
    results = []
    for name, group in GROUPS.items():
        kwargs = {"cutoff": cutoff} if name in _TAKES_CUTOFF else {}
        try:
            ok, msg = group(**kwargs)
        except (proto.ToleranceError, ValueError, ArithmeticError) as exc:
            ok, msg = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, msg))
    return results
