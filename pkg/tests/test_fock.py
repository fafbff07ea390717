import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvbench import fock
from cvbench.fock import (
    FockVector,
    SqueezeParams,
    TruncationError,
    ZeroStateError,
    annihilate,
    apply_displacement,
    apply_squeeze,
    make_cat,
    make_coherent,
    make_fock,
    make_squeezed_fock,
    mean_photon,
    parity_expectation,
    quadrature_variance,
    state_fidelity,
    subtract_photons,
)

R6 = 0.69078  # 6 dB
C = 80


def squeezed_vacuum_closed_form(r, size):
    """c_{2m} = (-tanh r)^m sqrt((2m)!) / (2^m m!) / sqrt(cosh r)."""
    out = np.zeros(size)
    t = math.tanh(r)
    for m in range(size // 2 + 1):
        if 2 * m >= size:
            break
        log_mag = 0.5 * math.lgamma(2 * m + 1) - m * math.log(2) - math.lgamma(m + 1)
        out[2 * m] = (-t) ** m * math.exp(log_mag) / math.sqrt(math.cosh(r))
    return out


def random_state(cutoff, support, seed):
    rng = np.random.default_rng(seed)
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[:support] = rng.normal(size=support) + 1j * rng.normal(size=support)
    return FockVector(amps / np.linalg.norm(amps))


# ---------------------------------------------------------------- constructors


def test_fock_vacuum_and_number_state():
    vac = make_fock(0, C)
    assert vac.cutoff == C and mean_photon(vac) == 0.0
    assert mean_photon(make_fock(2, C)) == 2.0


def test_fock_too_close_to_cutoff():
    with pytest.raises(TruncationError):
        make_fock(79, C)
    make_fock(78, C)


def test_coherent_examples():
    assert state_fidelity(make_coherent(0, C), make_fock(0, C)) == pytest.approx(1.0, abs=1e-15)
    coh = make_coherent(1.6, C)
    assert mean_photon(coh) == pytest.approx(2.56, abs=1e-12)
    assert coh.amplitudes[0].real == pytest.approx(math.exp(-1.28), abs=1e-12)
    assert math.exp(-1.28) == pytest.approx(0.27804, abs=5e-6)
    assert coh.norm() == pytest.approx(1.0, abs=1e-12)


def test_coherent_tail_guard():
    with pytest.raises(TruncationError):
        make_coherent(7.0, 40)


def test_cat_examples():
    odd = make_cat(1.6, "odd", C)
    even = make_cat(1.6, "even", C)
    u = 1.6**2
    assert mean_photon(odd) == pytest.approx(u / math.tanh(u), abs=1e-10)
    assert mean_photon(odd) == pytest.approx(2.5908, abs=5e-5)
    assert mean_photon(even) == pytest.approx(u * math.tanh(u), abs=1e-10)
    # quoted 2.5298 sits 2e-4 above the closed form (2.52958)
    assert mean_photon(even) == pytest.approx(2.5298, abs=5e-4)
    assert np.all(even.amplitudes[1::2] == 0)
    assert np.all(odd.amplitudes[0::2] == 0)


def test_odd_cat_at_zero_alpha_is_an_error():
    with pytest.raises(ZeroStateError):
        make_cat(0.0, "odd", C)
    assert mean_photon(make_cat(0.0, "even", C)) == 0.0


def test_global_phase_convention():
    for s in (make_coherent(-1.0 + 0.5j, C), make_cat(0.9j, "odd", C), make_squeezed_fock(0.4, 1.0, 1, C)):
        first = s.amplitudes[np.flatnonzero(np.abs(s.amplitudes) > 1e-12)[0]]
        assert first.imag == 0.0 and first.real > 0


def test_amplitudes_are_read_only():
    s = make_fock(1, C)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1.0


# ---------------------------------------------------------------- squeezing


def test_squeeze_identity_at_zero():
    vac = make_fock(0, C)
    assert np.array_equal(apply_squeeze(vac, SqueezeParams(0.0)).amplitudes, vac.amplitudes)


def test_squeezed_vacuum_matches_closed_form():
    s = make_squeezed_fock(R6, 0.0, 0, C)
    ref = squeezed_vacuum_closed_form(R6, C + 1)
    assert np.max(np.abs(s.amplitudes - ref)) < 1e-12
    assert np.all(s.amplitudes[1::2] == 0)
    assert mean_photon(s) == pytest.approx(math.sinh(R6) ** 2, abs=1e-10)
    assert mean_photon(s) == pytest.approx(0.5581, abs=5e-5)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
@pytest.mark.parametrize("r", [0.0, 0.3, R6, 1.0])
def test_squeezed_fock_mean_photon(n, r):
    s = make_squeezed_fock(r, 0.4, n, 160)
    assert mean_photon(s) == pytest.approx(n + (2 * n + 1) * math.sinh(r) ** 2, abs=1e-8)


def test_squeezed_single_examples():
    assert state_fidelity(make_squeezed_fock(0, 0, 1, C), make_fock(1, C)) == 1.0
    s = make_squeezed_fock(R6, 0.0, 1, C)
    assert mean_photon(s) == pytest.approx(1 + 3 * math.sinh(R6) ** 2, abs=1e-10)
    # quoted 2.6744 is 2e-4 above the closed form (2.67422)
    assert mean_photon(s) == pytest.approx(2.6744, abs=5e-4)
    assert parity_expectation(s) == pytest.approx(-1.0, abs=1e-15)


def test_squeeze_params_validation():
    with pytest.raises(ValueError):
        SqueezeParams(-0.1)
    with pytest.raises(ValueError):
        SqueezeParams(1.5)
    assert SqueezeParams(0.1, 7.0).theta == pytest.approx(7.0 - 2 * math.pi)
    SqueezeParams(fock.R_MAX)


def test_squeeze_tail_guard_fires_at_low_cutoff():
    with pytest.raises(TruncationError):
        make_squeezed_fock(1.4, 0.0, 0, 80)
    make_squeezed_fock(1.4, 0.0, 0, 240)


def test_db_conversion():
    assert fock.db_to_r(6.0) == pytest.approx(0.690776, abs=1e-6)
    assert fock.db_to_r(0.0) == 0.0
    assert fock.db_to_r(12.5) == pytest.approx(1.439116, abs=1e-6)
    assert fock.r_to_db(fock.db_to_r(3.3)) == pytest.approx(3.3, abs=1e-14)


# ---------------------------------------------------------------- subtraction


def test_annihilate_examples():
    out, res = annihilate(make_fock(1, C))
    assert res == 1.0 and state_fidelity(out, make_fock(0, C)) == 1.0
    with pytest.raises(ZeroStateError):
        annihilate(make_fock(0, C))


@pytest.mark.parametrize("n", range(0, 40, 3))
def test_ladder_consistency(n):
    out, res = annihilate(make_fock(n + 1, C))
    assert res**2 == pytest.approx(n + 1, rel=1e-14)
    assert out.amplitudes[n] == pytest.approx(1.0, abs=1e-15)


def test_annihilate_amplitude_rule():
    s = random_state(20, 10, 3)
    out, res = annihilate(s)
    expected = np.sqrt(np.arange(1, 21)) * s.amplitudes[1:]
    assert np.allclose(out.amplitudes[:-1] * res, expected, atol=1e-15)


@pytest.mark.parametrize("r", [0.1, R6, 1.0])
@pytest.mark.parametrize("theta", [0.0, 0.9])
def test_single_subtraction_gives_squeezed_single(r, theta):
    parent = make_squeezed_fock(r, theta, 0, 120)
    one = subtract_photons(parent, 1)
    target = make_squeezed_fock(r, theta, 1, 120)
    assert state_fidelity(one, target) >= 1 - 1e-10
    assert np.allclose(one.amplitudes, target.amplitudes, atol=1e-9)


@pytest.mark.parametrize("r", [0.2, R6, 1.2])
@pytest.mark.parametrize("theta", [0.0, 1.3])
def test_two_photon_frame_identity(r, theta):
    cutoff = 280  # the frame unsqueeze amplifies edge error; 160 leaves 2e-6 at r=1.2
    two = subtract_photons(make_squeezed_fock(r, theta, 0, cutoff), 2)
    assert np.max(np.abs(two.amplitudes[1::2])) < 1e-12
    assert parity_expectation(two) == pytest.approx(1.0, abs=1e-12)
    frame = apply_squeeze(two, SqueezeParams(r, (theta + math.pi) % (2 * math.pi)))  # S^dag(r, theta)
    amps = frame.amplitudes
    off = np.delete(np.abs(amps), [0, 2])
    assert off.max() < 1e-8
    nu = -np.exp(1j * theta) * math.sinh(r)
    ref = np.array([math.cosh(r) * nu, math.sqrt(2) * nu**2])
    ref /= np.linalg.norm(ref)
    assert abs(abs(np.vdot(ref, amps[[0, 2]])) - 1) < 1e-8
    ratio = amps[2] / amps[0]
    assert ratio == pytest.approx(-math.sqrt(2) * np.exp(1j * theta) * math.tanh(r), abs=1e-8)


def test_two_photon_ratio_value_at_6db():
    two = subtract_photons(make_squeezed_fock(R6, 0.0, 0, C), 2)
    frame = apply_squeeze(two, SqueezeParams(R6, math.pi))
    assert abs(frame.amplitudes[2] / frame.amplitudes[0]) == pytest.approx(0.84639, abs=1e-5)


def test_two_photon_large_r_limit():
    # frame ratio -sqrt(2) tanh r -> -sqrt(2)
    ratios = []
    for r in (0.5, 1.0, fock.R_MAX):
        two = subtract_photons(make_squeezed_fock(r, 0.0, 0, 240), 2)
        frame = apply_squeeze(two, SqueezeParams(r, math.pi)).amplitudes
        ratios.append(abs(frame[2] / frame[0]))
    assert ratios[0] < ratios[1] < ratios[2] < math.sqrt(2)
    assert math.sqrt(2) - ratios[2] < 0.16


def test_subtract_invalid_k():
    with pytest.raises(ValueError):
        subtract_photons(make_fock(3, C), 3)


# ---------------------------------------------------------------- operator properties


@pytest.mark.parametrize("theta", [0.0, 0.7, 2.5])
def test_bogoliubov_identity(theta):
    # columns S|j> spread to ~ j + (2j+1) sinh^2 r, so compare far below dim
    r, dim = 0.8, 300
    s = fock.squeeze_matrix(r, theta, dim)
    a = fock.lowering(dim)
    lhs = s.conj().T @ a @ s
    rhs = math.cosh(r) * a - np.exp(1j * theta) * math.sinh(r) * a.T
    edge = 40
    assert np.max(np.abs((lhs - rhs)[:edge, :edge])) < 1e-8


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.0, 0.8), theta=st.floats(0, 2 * math.pi), seed=st.integers(0, 1000))
def test_squeeze_unitarity_and_parity(r, theta, seed):
    s = random_state(160, 12, seed)
    t = random_state(160, 12, seed + 1)
    p = SqueezeParams(r, theta)
    s2, t2 = apply_squeeze(s, p), apply_squeeze(t, p)
    assert s2.norm() == pytest.approx(1.0, abs=1e-10)
    ov = abs(np.vdot(s.amplitudes, t.amplitudes))
    ov2 = abs(np.vdot(s2.amplitudes, t2.amplitudes))
    assert ov2 == pytest.approx(ov, abs=1e-8)
    assert parity_expectation(s2) == pytest.approx(parity_expectation(s), abs=1e-10)


def test_squeeze_keeps_even_subspace():
    even = make_cat(1.2, "even", C)
    out = apply_squeeze(even, SqueezeParams(0.6, 0.3))
    assert np.max(np.abs(out.amplitudes[1::2])) < 1e-14


@settings(max_examples=20, deadline=None)
@given(re=st.floats(-1.5, 1.5), im=st.floats(-1.5, 1.5), seed=st.integers(0, 1000))
def test_displacement_unitarity(re, im, seed):
    s = random_state(80, 10, seed)
    t = random_state(80, 10, seed + 7)
    alpha = complex(re, im)
    s2, t2 = apply_displacement(s, alpha), apply_displacement(t, alpha)
    assert s2.norm() == pytest.approx(1.0, abs=1e-10)
    assert abs(np.vdot(s2.amplitudes, t2.amplitudes)) == pytest.approx(abs(np.vdot(s.amplitudes, t.amplitudes)), abs=1e-8)


def test_displacement_examples():
    alpha = 0.9 - 0.4j
    coh = apply_displacement(make_fock(0, C), alpha)
    ref = fock.coherent_amplitudes(alpha, C + 1)
    assert np.allclose(coh.amplitudes, ref, atol=1e-14)
    psi = make_cat(1.1, "even", C)
    assert apply_displacement(psi, 0) is psi
    one = make_fock(1, C)
    moved = apply_displacement(one, 0.3)
    f = state_fidelity(one, moved)
    assert f == pytest.approx(math.exp(-0.09) * (1 - 0.09) ** 2, abs=1e-12)
    # quoted 0.75703 is 2e-4 above exp(-0.09) * 0.91**2 = 0.756826
    assert f == pytest.approx(0.75703, abs=5e-4)


def test_displacement_tail_guard():
    with pytest.raises(TruncationError):
        apply_displacement(make_fock(0, 30), 5.0)


# ---------------------------------------------------------------- diagnostics


def test_parity_examples():
    assert parity_expectation(make_fock(1, C)) == -1.0
    assert parity_expectation(make_squeezed_fock(0.5, 0.0, 0, C)) == pytest.approx(1.0, abs=1e-15)
    two = subtract_photons(make_squeezed_fock(0.5, 0.0, 0, C), 2)
    assert parity_expectation(two) == pytest.approx(1.0, abs=1e-15)


def test_quadrature_variance_examples():
    vac = make_fock(0, C)
    for phi in (0.0, 0.4, math.pi / 2):
        assert quadrature_variance(vac, phi) == pytest.approx(0.5, abs=1e-15)
    sv = make_squeezed_fock(R6, 0.0, 0, C)
    assert quadrature_variance(sv, 0.0) == pytest.approx(math.exp(-2 * R6) / 2, abs=1e-12)
    # quoted 0.12564 is 5e-5 above exp(-2r)/2 = 0.125593
    assert quadrature_variance(sv, 0.0) == pytest.approx(0.12564, abs=1e-4)
    s1 = make_squeezed_fock(R6, 0.0, 1, C)
    assert quadrature_variance(s1, math.pi / 2) == pytest.approx(1.5 * math.exp(2 * R6), abs=1e-10)


def test_quadrature_variance_of_coherent_state_is_vacuum_noise():
    coh = make_coherent(1.2 - 0.3j, C)
    for phi in np.linspace(0, math.pi, 5):
        assert quadrature_variance(coh, phi) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_examples():
    psi = make_cat(1.3, "odd", C)
    assert state_fidelity(psi, psi) == pytest.approx(1.0, abs=1e-14)
    assert state_fidelity(make_fock(0, C), make_fock(1, C)) == 0.0
    with pytest.raises(ValueError):
        state_fidelity(make_fock(0, C), make_fock(0, 90))
