"""Analytic expansions of the teleportation states, written term by term.

These are independent of the beam-splitter simulation and serve as its reference:
each function spells out the state by hand in the same mode layout that
:mod:`cteleport.protocols` produces.
"""

from __future__ import annotations

import math

import numpy as np

from . import fock
from .coherent import CoherentSuperposition
from .fock import FockState

SQ2 = math.sqrt(2.0)


def _combine(num_modes: int, pieces) -> FockState:
    """Sum of ``coef * |left> (x) |right>`` for sparse dict kets ``left`` and ``right``."""
    amps: dict[tuple[int, ...], complex] = {}
    for coef, left, right in pieces:
        for kl, al in left.items():
            for kr, ar in right.items():
                key = tuple(kl) + tuple(kr)
                amps[key] = amps.get(key, 0.0) + coef * al * ar
    return fock.from_amplitudes(num_modes, 2, amps)


def _scale(ket: dict, s: complex) -> dict:
    return {k: s * v for k, v in ket.items()}


def _add(*kets: dict) -> dict:
    out: dict = {}
    for ket in kets:
        for k, v in ket.items():
            out[k] = out.get(k, 0.0) + v
    return out


# --------------------------------------------------------------------------- photon number


def _qubit_number(p: complex, q: complex) -> dict:
    """``p|1> + q|0>`` on one mode."""
    return {(1,): p, (0,): q}


def bell_type_expansion(eta: float, x: complex, y: complex) -> FockState:
    """Resource times input, rewritten over the four Bell-type states of A and C.

    Modes ``A, B, C``.
    """
    c, s = math.cos(eta), math.sin(eta)

    def ac(a1c0, a0c1, a1c1, a0c0):
        return {(1, 0): a1c0, (0, 1): a0c1, (1, 1): a1c1, (0, 0): a0c0}

    psi_m = ac(c, -s, 0, 0)
    psi_p = ac(c, s, 0, 0)
    phi_m = ac(0, 0, c, -s)
    phi_p = ac(0, 0, c, s)
    amps: dict = {}
    for coef, pair, (p, q) in [
        (0.5, psi_m, (x, y)),
        (-0.5, psi_p, (x, -y)),
        (0.5, phi_m, (y, x)),
        (0.5, phi_p, (-y, x)),
    ]:
        for (na, nc), a in pair.items():
            for (nb,), b in _qubit_number(p, q).items():
                key = (na, nb, nc)
                amps[key] = amps.get(key, 0.0) + coef * a * b
    return fock.from_amplitudes(3, 2, amps)


def number_network_output(eta: float, x: complex, y: complex) -> FockState:
    """Output of the photon-number network on modes ``E, F, Y, B``."""
    s = math.sin(eta)
    c2 = math.sqrt(max(0.0, math.cos(2 * eta)))
    psi_m20 = {(2, 0, 0): 1 / SQ2, (0, 2, 0): -1 / SQ2}
    psi_p10_y1 = {(1, 0, 1): 1 / SQ2, (0, 1, 1): 1 / SQ2}
    line1 = {(0, 1, 0): -SQ2 * s, (0, 0, 1): -c2}
    line2 = {(1, 0, 0): SQ2 * s, (0, 0, 1): -c2}
    line3 = _add(_scale(psi_m20, s), _scale(psi_p10_y1, -c2), {(0, 0, 0): -s})
    line4 = _add(_scale(psi_m20, s), _scale(psi_p10_y1, -c2), {(0, 0, 0): s})
    return _combine(
        4,
        [
            (0.5, line1, _qubit_number(x, y)),
            (-0.5, line2, _qubit_number(x, -y)),
            (0.5, line3, _qubit_number(y, x)),
            (0.5, line4, _qubit_number(-y, x)),
        ],
    )


# --------------------------------------------------------------------------- polarization

# rails: E_V, E_H, F_V, F_H, Y_V, Y_H, W_V, W_H (detector side), then B_V, B_H
_Y0 = (0, 0, 0, 0)
_YV = (1, 0, 0, 0)


def _ef(terms: dict, y: tuple) -> dict:
    return {ef + y: v for ef, v in terms.items()}


def _qubit_polarization(p: complex, q: complex) -> dict:
    return {(1, 0): p, (0, 1): q}


def polarization_network_output(eta: float, x: complex, y: complex) -> FockState:
    """Output of the polarization network on the ten dual-rail modes."""
    s = math.sin(eta)
    c2 = math.sqrt(max(0.0, math.cos(2 * eta)))
    h = 1 / SQ2
    psi_m_v_h = {(1, 0, 0, 1): h, (0, 1, 1, 0): -h}
    psi_p_h_0 = {(0, 1, 0, 0): h, (0, 0, 0, 1): h}
    psi_m_vh_0 = {(1, 1, 0, 0): h, (0, 0, 1, 1): -h}
    psi_m_2v_0 = {(2, 0, 0, 0): h, (0, 0, 2, 0): -h}
    psi_m_2h_0 = {(0, 2, 0, 0): h, (0, 0, 0, 2): -h}
    psi_p_v_0 = {(1, 0, 0, 0): h, (0, 0, 1, 0): h}

    line1 = _add(_ef(_scale(psi_m_v_h, SQ2 * s), _Y0), _ef(_scale(psi_p_h_0, c2), _YV))
    line2 = _add(_ef(_scale(psi_m_vh_0, SQ2 * s), _Y0), _ef(_scale(psi_p_h_0, c2), _YV))
    line3 = _add(
        _ef(_scale(_add(psi_m_2v_0, _scale(psi_m_2h_0, -1)), s), _Y0),
        _ef(_scale(psi_p_v_0, c2), _YV),
    )
    line4 = _add(
        _ef(_scale(_add(psi_m_2v_0, psi_m_2h_0), s), _Y0),
        _ef(_scale(psi_p_v_0, c2), _YV),
    )
    return _combine(
        10,
        [
            (0.5, line1, _qubit_polarization(x, y)),
            (-0.5, line2, _qubit_polarization(x, -y)),
            (0.5, line3, _qubit_polarization(y, x)),
            (0.5, line4, _qubit_polarization(-y, x)),
        ],
    )


# --------------------------------------------------------------------------- coherent states


def resource_normalization(alpha: float, beta: float) -> float:
    return 1.0 / math.sqrt(2.0 * (1.0 - math.exp(-2.0 * (alpha**2 + beta**2))))


def input_normalization(alpha: float, x: complex, y: complex) -> float:
    cross = (np.conj(x) * y + x * np.conj(y)).real
    return 1.0 / math.sqrt(abs(x) ** 2 + abs(y) ** 2 + cross * math.exp(-2.0 * alpha**2))


def _cat_terms(prefactor: complex, pairs, bob: tuple[complex, complex], alpha: float):
    """Terms ``prefactor * sum_i s_i |pair_i> (x) (p|alpha> + q|-alpha>)``."""
    p, q = bob
    out = []
    for sign, amps in pairs:
        out.append((prefactor * sign * p, tuple(amps) + (alpha,)))
        out.append((prefactor * sign * q, tuple(amps) + (-alpha,)))
    return out


def quasi_bell_expansion(eta: float, alpha: float, x: complex, y: complex) -> CoherentSuperposition:
    """Resource times input over the four quasi-Bell-type states; modes ``A, C, B``."""
    beta = alpha * math.tan(eta)
    k = resource_normalization(alpha, beta) * input_normalization(alpha, x, y) / 2
    terms = []
    terms += _cat_terms(k, [(1, (beta, -alpha)), (-1, (-beta, alpha))], (x, y), alpha)
    terms += _cat_terms(-k, [(1, (beta, -alpha)), (1, (-beta, alpha))], (x, -y), alpha)
    terms += _cat_terms(k, [(1, (beta, alpha)), (-1, (-beta, -alpha))], (y, x), alpha)
    terms += _cat_terms(k, [(1, (beta, alpha)), (1, (-beta, -alpha))], (-y, x), alpha)
    return CoherentSuperposition.from_terms(terms)


def cat_network_output(eta: float, alpha: float, x: complex, y: complex) -> CoherentSuperposition:
    """Output of the coherent-state network on modes ``E, F, Y, B``."""
    beta = alpha * math.tan(eta)
    u = SQ2 * beta
    # sqrt(1 - tan^2 eta), evaluated without cancellation near pi/4
    v = math.sqrt(max(0.0, math.cos(2 * eta))) / math.cos(eta) * alpha
    k = resource_normalization(alpha, beta) * input_normalization(alpha, x, y) / 2
    terms = []
    terms += _cat_terms(k, [(1, (0, -u, -v)), (-1, (0, u, v))], (x, y), alpha)
    terms += _cat_terms(-k, [(1, (0, -u, -v)), (1, (0, u, v))], (x, -y), alpha)
    terms += _cat_terms(k, [(1, (u, 0, v)), (-1, (-u, 0, -v))], (y, x), alpha)
    terms += _cat_terms(k, [(1, (u, 0, v)), (1, (-u, 0, -v))], (-y, x), alpha)
    return CoherentSuperposition.from_terms(terms)
