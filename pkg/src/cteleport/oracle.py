"""Brute-force truncated-Fock evaluation of the coherent-state scheme.

Alice's modes (A, C and the loss port Y) are expanded in the photon-number basis and
propagated with :func:`cteleport.fock.apply_transfer`. Bob's mode never interacts, so
it is kept as a label over its two coherent kets and only their exact overlap enters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import coherent as coh
from . import fock
from . import protocols as proto
from .coherent import ParityClass
from .fock import FockState


@dataclass(frozen=True)
class OracleOutcome:
    pattern: tuple
    probability: float
    bob: coh.CoherentDensity


def oracle_cutoff(spec: proto.QubitSpec) -> int:
    """Cutoff covering the largest coherent amplitude anywhere in the circuit."""
    beta = spec.alpha * proto.attenuator_t(spec.eta)
    return fock.required_cutoff(max(spec.alpha, np.sqrt(2.0) * beta))


def _parity_mask(cutoff: int, parity: ParityClass) -> np.ndarray:
    return np.array([parity.contains(n) for n in range(cutoff + 1)], dtype=float)


def alice_branches(
    spec: proto.QubitSpec, cutoff: int | None = None
) -> tuple[np.ndarray, list[FockState]]:
    """Bob's kets and, for each, the Fock state of modes E, F, Y after the network."""
    if spec.case != "c":
        raise ValueError("the Fock oracle is only needed for case c")
    cutoff = oracle_cutoff(spec) if cutoff is None else cutoff
    joint = proto.initial_state(spec).merge_terms()  # A, C, Y, B
    kets, index = coh._distinct_rows(joint.amplitudes[:, [3]])
    states = []
    for i in range(len(kets)):
        sel = index == i
        part = coh.CoherentSuperposition(joint.coefficients[sel], joint.amplitudes[sel][:, :3])
        state = coh.to_fock(part, cutoff, guard=False)
        lost = part.norm_squared() - state.norm_squared()
        if lost > fock.DEFAULT_LEAK_TOL:
            raise fock.CutoffError(
                f"truncation at cutoff {cutoff} leaked {lost:.3e} of squared norm "
                f"(need about {oracle_cutoff(spec)})"
            )
        for element in proto.network("c", spec.eta):
            state = element.apply(state)
        states.append(state)
    return kets, states


def outcomes(spec: proto.QubitSpec, cutoff: int | None = None) -> list[OracleOutcome]:
    """Probability and Bob's conditional operator for every parity pattern."""
    kets, states = alice_branches(spec, cutoff)
    gram = coh.overlap_matrix(kets, kets)
    d = states[0].cutoff + 1
    result = []
    for pattern in proto.patterns("c"):
        masks = [_parity_mask(d - 1, p) for p in pattern]
        proj = np.einsum("i,j,k->ijk", *masks)
        n = len(states)
        r = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                # coefficient of |b_i><b_j| is <phi_j|P|phi_i>
                r[i, j] = np.vdot(states[j].tensor, proj * states[i].tensor)
        density = coh.CoherentDensity(kets, r, gram)
        result.append(OracleOutcome(pattern, max(0.0, density.trace()), density))
    return result


def success_probability(spec: proto.QubitSpec, cutoff: int | None = None) -> float:
    kets, states = alice_branches(spec, cutoff)
    gram = coh.overlap_matrix(kets, kets)
    # both E and F silent
    fail = 0.0
    for i, si in enumerate(states):
        for j, sj in enumerate(states):
            fail += (gram[j, i] * np.vdot(sj.tensor[0, 0], si.tensor[0, 0])).real
    return 1.0 - fail


def conclusive_fidelities(spec: proto.QubitSpec, cutoff: int | None = None) -> dict[tuple, float]:
    """Corrected fidelity of every conclusive pattern above the probability floor."""
    out = {}
    for o in outcomes(spec, cutoff):
        branch = proto.classify("c", o.pattern)
        if branch is None or o.probability <= proto.PROB_FLOOR:
            continue
        out[o.pattern] = proto.coherent_fidelity(o.bob, spec.alpha, proto.bob_correct(branch, spec))
    return out


# --------------------------------------------------------------------------- random trials

TRIAL_KINDS = ("inner_product", "beam_splitter", "parity_probability")
# amplitude errors scale like the square root of the truncated tail, so the trials
# pad the default cutoff to push that tail well below 1e-12
TRIAL_PADDING = 12


def _trial_cutoff(*psis: coh.CoherentSuperposition) -> int:
    return fock.required_cutoff(max(p.max_amplitude() for p in psis)) + TRIAL_PADDING


def _random_superposition(rng: np.random.Generator, num_modes: int, radius: float):
    n_terms = int(rng.integers(1, 4))
    r = radius * np.sqrt(rng.random((n_terms, num_modes)))
    amps = r * np.exp(2j * np.pi * rng.random((n_terms, num_modes)))
    coefs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    return coh.CoherentSuperposition(coefs, amps).normalize()


def random_trial(rng: np.random.Generator, kind: str, radius: float = 4.0) -> float:
    """Absolute discrepancy between the coherent algebra and the Fock pipeline for one
    randomly drawn computation of type ``kind``."""
    modes = int(rng.integers(1 if kind != "beam_splitter" else 2, 4))
    psi = _random_superposition(rng, modes, radius)
    if kind == "inner_product":
        phi = _random_superposition(rng, modes, radius)
        cutoff = _trial_cutoff(psi, phi)
        exact = coh.inner_product(psi, phi)
        approx = fock.inner_product(coh.to_fock(psi, cutoff), coh.to_fock(phi, cutoff))
        return abs(exact - approx)
    if kind == "beam_splitter":
        p, q = rng.choice(modes, size=2, replace=False)
        element = fock.BeamSplitter(int(p), int(q), float(rng.random()))
        out = element.apply(psi)
        cutoff = _trial_cutoff(psi, out)
        ref = coh.to_fock(out, cutoff)
        got = element.apply(coh.to_fock(psi, cutoff))
        return float(np.sqrt((ref - got).norm_squared()))
    if kind == "parity_probability":
        classes = list(ParityClass)
        sectors = {m: classes[int(rng.integers(len(classes)))] for m in range(modes)}
        cutoff = _trial_cutoff(psi)
        state = coh.to_fock(psi, cutoff)
        masks = [_parity_mask(cutoff, sectors[m]) for m in range(modes)]
        weight = masks[0]
        for mask in masks[1:]:
            weight = np.multiply.outer(weight, mask)
        approx = float(np.sum(weight * np.abs(state.tensor) ** 2))
        return abs(coh.sector_probability(psi, sectors) - approx)
    raise ValueError(f"unknown trial kind {kind!r}")


def random_trials(count: int, seed: int = 0, radius: float = 4.0) -> list[tuple[str, float]]:
    """``count`` trials cycling through :data:`TRIAL_KINDS`; returns ``(kind, error)``."""
    rng = np.random.default_rng(seed)
    return [
        (kind, random_trial(rng, kind, radius))
        for kind in (TRIAL_KINDS[i % len(TRIAL_KINDS)] for i in range(count))
    ]
