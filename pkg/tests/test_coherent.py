import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cteleport import coherent as coh
from cteleport import fock
from cteleport.coherent import CoherentSuperposition, ParityClass

amplitude = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def superposition(rng, modes, terms=3, radius=3.0):
    amps = radius * (rng.random((terms, modes)) - 0.5) * 2 + 1j * radius * (
        rng.random((terms, modes)) - 0.5
    )
    coefs = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return CoherentSuperposition(coefs, amps).normalize()


def fock_of(psi, pad=8):
    return coh.to_fock(psi, fock.required_cutoff(psi.max_amplitude()) + pad)


@settings(max_examples=50, deadline=None)
@given(u=amplitude, v=amplitude)
def test_overlap_matches_fock_expansion(u, v):
    a = CoherentSuperposition.coherent(u)
    b = CoherentSuperposition.coherent(v)
    cutoff = fock.required_cutoff(max(abs(u), abs(v))) + 8
    ref = fock.inner_product(coh.to_fock(a, cutoff), coh.to_fock(b, cutoff))
    assert abs(coh.inner_product(a, b) - ref) < 1e-12


@settings(max_examples=50, deadline=None)
@given(u=amplitude, v=amplitude, parity=st.sampled_from(list(ParityClass)))
def test_sector_kernel_matches_number_sums(u, v, parity):
    cutoff = fock.required_cutoff(max(abs(u), abs(v))) + 8
    fu = fock.coherent_to_fock(u, cutoff).tensor
    fv = fock.coherent_to_fock(v, cutoff).tensor
    mask = np.array([parity.contains(n) for n in range(cutoff + 1)])
    ref = np.vdot(fu[mask], fv[mask])
    got = coh.sector_kernel(np.array([u]), np.array([v]), parity)
    assert abs(np.ravel(got)[0] - ref) < 1e-12


def test_parity_classes_partition_the_number_line():
    for n in range(12):
        hits = [
            p for p in ParityClass if p is not ParityClass.EVEN_INCLUDING_ZERO and p.contains(n)
        ]
        assert len(hits) == 1
        assert ParityClass.EVEN_INCLUDING_ZERO.contains(n) == (n % 2 == 0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_sector_probabilities_are_complete(seed):
    psi = superposition(np.random.default_rng(seed), 2)
    total = sum(
        coh.sector_probability(psi, {0: p, 1: q})
        for p in (ParityClass.ZERO, ParityClass.ODD, ParityClass.EVEN_NONZERO)
        for q in (ParityClass.ODD, ParityClass.EVEN_INCLUDING_ZERO)
    )
    assert total == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(0.05, 1.0))
def test_linear_optics_preserve_inner_products(seed, t):
    rng = np.random.default_rng(seed)
    psi, phi = superposition(rng, 3), superposition(rng, 3)
    m = fock.beam_splitter_matrix(t)
    before = coh.inner_product(psi, phi)
    after = coh.inner_product(psi.apply_linear_optic(m, 0, 2), phi.apply_linear_optic(m, 0, 2))
    assert abs(before - after) < 1e-12


def test_linear_optic_must_be_unitary():
    psi = CoherentSuperposition.coherent(1.0, 0.5)
    with pytest.raises(ValueError):
        psi.apply_linear_optic(np.array([[1.0, 0.2], [0.0, 1.0]]), 0, 1)


def test_beam_splitter_moves_coherent_amplitudes_like_photons():
    t, r = 0.6, 0.8
    out = CoherentSuperposition.coherent(1.5, 0.0).apply_linear_optic(
        fock.beam_splitter_matrix(t), 0, 1
    )
    assert np.allclose(out.amplitudes[0], [1.5 * t, -1.5 * r])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_merge_terms_is_idempotent_and_exact(seed):
    rng = np.random.default_rng(seed)
    psi = superposition(rng, 2)
    doubled = psi + psi * 0.5 - psi * 0.5
    merged = doubled.merge_terms()
    assert len(merged) <= len(psi)
    assert len(merged.merge_terms()) == len(merged)
    assert coh.distance_squared(merged, psi) < 1e-14


def test_normalize_rejects_null_state():
    psi = CoherentSuperposition.coherent(1.0) - CoherentSuperposition.coherent(1.0)
    with pytest.raises(ValueError):
        psi.merge_terms().normalize()


def test_cat_norm_accounts_for_overlap():
    alpha = 0.7
    odd = CoherentSuperposition.from_terms([(1.0, (alpha,)), (-1.0, (-alpha,))])
    assert odd.norm_squared() == pytest.approx(2 * (1 - math.exp(-2 * alpha**2)))


def test_conditional_density_trace_is_event_probability():
    rng = np.random.default_rng(11)
    psi = superposition(rng, 3, terms=4)
    sectors = {0: ParityClass.ODD, 1: ParityClass.ZERO}
    rho = coh.conditional_density(psi, [2], sectors)
    assert rho.trace() == pytest.approx(coh.sector_probability(psi, sectors), abs=1e-13)
    # Fock reference for the conditional operator on mode 2
    state = fock_of(psi)
    d = state.cutoff + 1
    m0 = np.array([ParityClass.ODD.contains(n) for n in range(d)])
    cond = state.tensor[m0][:, 0, :]
    ref = cond.T @ cond.conj()
    kets = np.array(
        [coh.to_fock(CoherentSuperposition.coherent(k[0]), d - 1).tensor for k in rho.kets]
    )
    got = kets.T @ rho.coefficients @ kets.conj()
    assert np.abs(got - ref).max() < 1e-10


def test_project_parity_keeps_mode_and_matches_fock():
    psi = CoherentSuperposition.from_terms([(1.0, (1.2, 0.5)), (0.5j, (-1.2, -0.5))]).normalize()
    prob, post = coh.project_parity(psi, 0, ParityClass.EVEN_NONZERO)
    state = fock_of(psi)
    mask = np.array([ParityClass.EVEN_NONZERO.contains(n) for n in range(state.cutoff + 1)])
    ref = state.tensor * mask[:, None]
    assert prob == pytest.approx(np.sum(np.abs(ref) ** 2), abs=1e-12)
    ref = ref / math.sqrt(prob)
    got = coh.to_fock(post, state.cutoff).tensor
    assert abs(abs(np.vdot(ref, got)) - 1) < 1e-10


def test_parity_projection_removes_factorizing_mode():
    # odd parity on mode 0 of |u,a> - |-u,-a> leaves the odd cat... here an even/odd mix
    psi = CoherentSuperposition.from_terms([(1.0, (1.0, 2.0)), (-1.0, (-1.0, -2.0))]).normalize()
    prob, rest = coh.parity_projection(psi, 0, ParityClass.ODD)
    even_cat = CoherentSuperposition.from_terms([(1.0, (2.0,)), (1.0, (-2.0,))]).normalize()
    assert abs(abs(coh.inner_product(rest, even_cat)) - 1) < 1e-12
    assert 0 < prob < 1


def test_parity_projection_refuses_mixed_remainder():
    psi = CoherentSuperposition.from_terms([(1.0, (1.0, 2.0)), (1.0, (0.3, -2.0))]).normalize()
    with pytest.raises(ValueError, match="factor"):
        coh.parity_projection(psi, 0, ParityClass.ODD)
    prob, post = coh.parity_projection(psi, 0, ParityClass.ODD, keep_mode=True)
    assert post.num_modes == 2 and prob > 0


def test_to_fock_guard():
    with pytest.raises(fock.CutoffError):
        coh.to_fock(CoherentSuperposition.coherent(3.0), 9)
    truncated = coh.to_fock(CoherentSuperposition.coherent(3.0), 9, guard=False)
    assert truncated.norm_squared() < 0.9


def test_entropy_of_product_and_bell_like_cats():
    prod = CoherentSuperposition.coherent(1.0, 2.0)
    assert coh.entanglement_entropy(prod, [0], [1]) == pytest.approx(0.0, abs=1e-12)
    a = 4.0
    bell = CoherentSuperposition.from_terms([(1.0, (a, a)), (1.0, (-a, -a))]).normalize()
    assert coh.entanglement_entropy(bell, [0], [1]) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_entropy_matches_fock_reduced_density(seed):
    rng = np.random.default_rng(seed)
    psi = superposition(rng, 2, terms=3, radius=2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        got = coh.entanglement_entropy(psi, [0], [1])
    ref = fock.von_neumann_entropy(fock.reduced_density(fock_of(psi), [0]))
    assert 0.0 <= got <= math.log2(3) + 1e-9
    assert got == pytest.approx(ref, abs=1e-6)


def test_schmidt_weights_need_a_partition():
    with pytest.raises(ValueError):
        coh.schmidt_weights(CoherentSuperposition.coherent(1.0, 1.0, 1.0), [0], [1])


def test_near_singular_gram_warns():
    eps = 1e-7
    psi = CoherentSuperposition.from_terms([(1.0, (0.0, 1.0)), (1.0, (eps, -1.0))]).normalize()
    with pytest.warns(RuntimeWarning, match="near-singular"):
        coh.entanglement_entropy(psi, [0], [1])
