import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from cteleport import fock
from cteleport.fock import BeamSplitter, CutoffError, PolarizingBeamSplitter


def ladder(d):
    return np.diag(np.sqrt(np.arange(1, d)), 1)


def expm_beam_splitter(theta, cutoff):
    """Reference two-mode unitary exp(theta (a^dag b - b^dag a)) on the truncated space.

    Built on a wider space and cropped so truncation of the generator does not bias
    the low-photon block being compared.
    """
    d = cutoff + 1
    wide = d + 12
    a, eye = ladder(wide), np.eye(wide)
    A, B = np.kron(a, eye), np.kron(eye, a)
    u = expm(theta * (A.conj().T @ B - B.conj().T @ A)).reshape(wide, wide, wide, wide)
    return u[:d, :d, :d, :d]


def random_state(rng, modes, cutoff, max_photons=None):
    d = cutoff + 1
    t = rng.normal(size=(d,) * modes) + 1j * rng.normal(size=(d,) * modes)
    if max_photons is not None:
        total = sum(np.indices((d,) * modes))
        t[total > max_photons] = 0
    return fock.FockState(t).normalize()


@pytest.mark.parametrize("theta", [0.1, math.pi / 6, math.pi / 4, 1.2])
def test_beam_splitter_matches_matrix_exponential(theta):
    cutoff = 6
    rng = np.random.default_rng(3)
    state = random_state(rng, 2, cutoff, max_photons=cutoff)
    got = fock.apply_beam_splitter(state, 0, 1, math.cos(theta), reflection=math.sin(theta))
    ref = np.einsum("ijkl,kl->ij", expm_beam_splitter(theta, cutoff), state.tensor)
    assert np.abs(got.tensor - ref).max() < 1e-12


def test_single_photon_routing_convention():
    t, r = 0.8, 0.6
    first = fock.apply_beam_splitter(fock.make_fock_state(2, 2, (1, 0)), 0, 1, t)
    second = fock.apply_beam_splitter(fock.make_fock_state(2, 2, (0, 1)), 0, 1, t)
    assert first.amplitude((1, 0)) == pytest.approx(t)
    assert first.amplitude((0, 1)) == pytest.approx(-r)
    assert second.amplitude((1, 0)) == pytest.approx(r)
    assert second.amplitude((0, 1)) == pytest.approx(t)


def test_hong_ou_mandel():
    out = BeamSplitter(0, 1, 1 / math.sqrt(2)).apply(fock.make_fock_state(2, 2, (1, 1)))
    assert abs(out.amplitude((1, 1))) < 1e-15
    assert out.amplitude((2, 0)) == pytest.approx(1 / math.sqrt(2))
    assert out.amplitude((0, 2)) == pytest.approx(-1 / math.sqrt(2))


def test_beam_splitter_on_embedded_modes_leaves_others_alone():
    rng = np.random.default_rng(5)
    state = random_state(rng, 3, 3, max_photons=3)
    got = fock.apply_beam_splitter(state, 2, 0, 0.3)
    ref = fock.permute_modes(
        fock.apply_beam_splitter(fock.permute_modes(state, [2, 0, 1]), 0, 1, 0.3), [1, 2, 0]
    )
    assert np.abs(got.tensor - ref.tensor).max() < 1e-13


@settings(max_examples=40, deadline=None)
@given(
    t=st.floats(0.05, 1.0),
    seed=st.integers(0, 2**32 - 1),
    modes=st.sampled_from([(0, 1), (1, 0), (0, 2), (2, 1)]),
)
def test_beam_splitter_is_unitary_and_invertible(t, seed, modes):
    rng = np.random.default_rng(seed)
    cutoff = 4
    state = random_state(rng, 3, cutoff, max_photons=cutoff)
    p, q = modes
    out = fock.apply_beam_splitter(state, p, q, t)
    assert out.norm_squared() == pytest.approx(1.0, abs=1e-12)
    back = fock.apply_transfer(out, p, q, fock.beam_splitter_matrix(t).T)
    assert np.abs(back.tensor - state.tensor).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(0.05, 1.0))
def test_beam_splitter_conserves_photon_number(seed, t):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 2, 5, max_photons=5)
    out = fock.apply_beam_splitter(state, 0, 1, t)
    total = sum(np.indices(state.tensor.shape))
    for n in range(6):
        mask = total == n
        before = np.sum(np.abs(state.tensor[mask]) ** 2)
        after = np.sum(np.abs(out.tensor[mask]) ** 2)
        assert after == pytest.approx(before, abs=1e-12)


def test_leakage_is_tracked_and_raised():
    state = fock.make_fock_state(2, 2, (2, 2))
    with pytest.raises(CutoffError, match="leaked"):
        fock.apply_beam_splitter(state, 0, 1, 1 / math.sqrt(2))
    out = fock.apply_beam_splitter(state, 0, 1, 1 / math.sqrt(2), leak_tol=1.0)
    assert out.leaked + out.norm_squared() == pytest.approx(1.0)
    assert out.leaked > 0.1


def test_transmission_validation():
    with pytest.raises(ValueError):
        fock.beam_splitter_matrix(0.0)
    with pytest.raises(ValueError):
        fock.beam_splitter_matrix(0.6, 0.7)
    m = fock.beam_splitter_matrix(0.6, 0.8)
    assert np.allclose(m @ m.T, np.eye(2))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_polarizing_splitter_is_an_involutive_permutation(seed):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 4, 1)
    pbs = PolarizingBeamSplitter((0, 1), (2, 3))
    once = pbs.apply(state)
    assert np.allclose(pbs.apply(once).tensor, state.tensor)
    # vertical rails stay, horizontal rails swap
    assert np.allclose(once.tensor, np.transpose(state.tensor, (0, 3, 2, 1)))


def test_polarizing_splitter_routes_single_photons():
    pbs = PolarizingBeamSplitter((0, 1), (2, 3))
    v = pbs.apply(fock.make_fock_state(4, 1, (1, 0, 0, 0)))
    h = pbs.apply(fock.make_fock_state(4, 1, (0, 1, 0, 0)))
    assert v.amplitude((1, 0, 0, 0)) == 1
    assert h.amplitude((0, 0, 0, 1)) == 1


def test_project_counts_and_distribution():
    state = fock.from_amplitudes(2, 2, {(1, 0): 0.6, (0, 1): 0.8j})
    dist = fock.count_distribution(state, [0])
    assert dist[(1,)] == pytest.approx(0.36)
    assert dist[(0,)] == pytest.approx(0.64)
    prob, rest = fock.project_counts(state, [0], (0,))
    assert prob == pytest.approx(0.64)
    assert rest.amplitude((1,)) == pytest.approx(1j)
    prob, rest = fock.project_counts(state, [0], (2,))
    assert prob == 0 and rest is None


def test_reduced_density_and_entropy():
    c, s = math.cos(0.4), math.sin(0.4)
    state = fock.from_amplitudes(2, 1, {(1, 0): c, (0, 1): -s})
    rho = fock.reduced_density(state, [0])
    assert rho.trace() == pytest.approx(1.0)
    p = s * s
    assert fock.von_neumann_entropy(rho) == pytest.approx(
        -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    )
    assert fock.von_neumann_entropy(fock.reduced_density(fock.vacuum(2, 1), [1])) == 0.0


def test_coherent_to_fock_is_poissonian():
    alpha = 1.3 - 0.4j
    state = fock.coherent_to_fock(alpha, fock.required_cutoff(abs(alpha)))
    n = np.arange(state.cutoff + 1)
    probs = np.abs(state.tensor) ** 2
    lam = abs(alpha) ** 2
    ref = np.exp(-lam) * lam**n / np.array([math.factorial(k) for k in n], dtype=float)
    assert np.allclose(probs, ref, atol=1e-14)
    with pytest.raises(CutoffError):
        fock.coherent_to_fock(3.0, 9)


def test_required_cutoff_bounds_the_tail():
    for m in (0.5, 1.0, 3.0, 4.5):
        cutoff = fock.required_cutoff(m)
        state = fock.coherent_to_fock(m, cutoff)
        assert 1 - state.norm_squared() < 1e-8


def test_occupation_tuples():
    # every occupation with at most ``total`` photons overall
    assert sorted(fock.occupation_tuples(2, 1)) == [(0, 0), (0, 1), (1, 0)]
    assert len(list(fock.occupation_tuples(3, 2))) == 10
