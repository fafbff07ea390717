import math
import warnings

import numpy as np
import pytest
from scipy import integrate, special

from cvbench import fock
from cvbench.statespec import StateSpec
from cvbench.wigner import (
    PhaseGrid,
    Setting,
    WignerField,
    WindowWarning,
    convergence_probe,
    integrated_negativity,
    normalization_integral,
    wigner_at_origin,
    wigner_field,
    wigner_parity,
    wigner_wavefunction,
)

R6 = 0.69078
C = 80


def fock_negativity_oracle(n):
    """delta(|n>) = (int_0^inf e^{-s} |L_n(2s)| ds - 1) / 2, split at the Laguerre roots."""
    roots = sorted(special.roots_laguerre(n)[0] / 2) if n else []
    edges = [0.0, *roots, np.inf]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        val, _ = integrate.quad(lambda s: math.exp(-s) * special.eval_laguerre(n, 2 * s), a, b, epsabs=1e-13)
        total += abs(val)
    return (total - 1) / 2


def test_negativity_oracles_themselves():
    assert fock_negativity_oracle(0) == pytest.approx(0.0, abs=1e-12)
    assert fock_negativity_oracle(1) == pytest.approx(2 * math.exp(-0.5) - 1, abs=1e-12)
    assert fock_negativity_oracle(1) == pytest.approx(0.21306, abs=5e-6)
    assert fock_negativity_oracle(2) == pytest.approx(0.36449, abs=5e-6)


@pytest.fixture(scope="module")
def default_fields():
    states = {
        "vac": fock.make_fock(0, C),
        "one": fock.make_fock(1, C),
        "two": fock.make_fock(2, C),
        "sv": fock.make_squeezed_fock(R6, 0.0, 0, C),
        "s1": fock.make_squeezed_fock(R6, 0.0, 1, C),
        "two_sub": fock.subtract_photons(fock.make_squeezed_fock(R6, 0.0, 0, C), 2),
        "cat": fock.make_cat(1.6, "odd", C),
        "coh": fock.make_coherent(1.5 - 1.0j, C),
    }
    return states, {k: wigner_field(s) for k, s in states.items()}


def test_default_grid():
    g = PhaseGrid()
    assert (g.x_min, g.x_max, g.n_x, g.n_p) == (-7.0, 7.0, 201, 201)
    i, j = g.origin_index
    assert g.xs[i] == 0.0 and g.ps[j] == 0.0


@pytest.mark.parametrize("kw", [dict(n_x=200), dict(n_p=1), dict(x_min=-6.0), dict(p_min=1.0, p_max=-1.0)])
def test_grid_validation(kw):
    with pytest.raises(ValueError):
        PhaseGrid(**kw)


def test_vacuum_is_gaussian(default_fields):
    _, fields = default_fields
    f = fields["vac"]
    xx, pp = np.meshgrid(f.grid.xs, f.grid.ps, indexing="ij")
    assert np.max(np.abs(f.values - np.exp(-(xx**2 + pp**2)) / np.pi)) < 1e-14
    assert f.origin_value == pytest.approx(1 / math.pi, abs=1e-15)


def test_fock_wigner_closed_form(default_fields):
    _, fields = default_fields
    f = fields["two"]
    xx, pp = np.meshgrid(f.grid.xs, f.grid.ps, indexing="ij")
    rho2 = xx**2 + pp**2
    ref = np.exp(-rho2) * special.eval_laguerre(2, 2 * rho2) / np.pi
    assert np.max(np.abs(f.values - ref)) < 1e-13


@pytest.mark.parametrize("n, sign", [(0, 1), (1, -1), (2, 1)])
def test_parity_at_origin(default_fields, n, sign):
    _, fields = default_fields
    f = fields[["vac", "one", "two"][n]]
    assert f.origin_value == pytest.approx(sign / math.pi, abs=1e-6)


def test_origin_matches_parity_for_all_states(default_fields):
    states, fields = default_fields
    for key, s in states.items():
        assert fields[key].origin_value == pytest.approx(wigner_at_origin(s), abs=1e-6), key


def test_wigner_at_origin_examples():
    assert wigner_at_origin(fock.make_fock(2, C)) == 1 / math.pi
    assert wigner_at_origin(fock.make_fock(1, C)) == -1 / math.pi
    two = fock.subtract_photons(fock.make_squeezed_fock(0.5, 0.0, 0, C), 2)
    assert wigner_at_origin(two) == pytest.approx(1 / math.pi, abs=1e-15)


def test_pure_state_bound_and_normalization(default_fields):
    _, fields = default_fields
    for key, f in fields.items():
        assert np.max(np.abs(f.values)) <= 1 / math.pi + 1e-9, key
        assert not f.window_limited, key
    assert normalization_integral(fields["vac"]) == pytest.approx(1.0, abs=1e-6)
    assert normalization_integral(fields["two"]) == pytest.approx(1.0, abs=1e-6)


def test_squeezed_vacuum_nonnegative(default_fields):
    _, fields = default_fields
    assert fields["sv"].values.min() > -1e-10  # cancellation roundoff only


@pytest.mark.parametrize("n, expected", [(1, 0.21306), (2, 0.36449)])
def test_fock_negativity(default_fields, n, expected):
    _, fields = default_fields
    delta = integrated_negativity(fields[["vac", "one", "two"][n]])
    assert delta == pytest.approx(fock_negativity_oracle(n), abs=6e-3)
    assert delta == pytest.approx(expected, abs=6e-3)


def test_gaussian_states_have_no_negativity(default_fields):
    _, fields = default_fields
    for key in ("vac", "sv", "coh"):
        assert integrated_negativity(fields[key]) < 5e-4


@pytest.mark.parametrize("r", [0.0, 0.5, 1.0, fock.R_MAX])
def test_gaussian_positivity_over_squeezing(r):
    state = fock.make_squeezed_fock(r, 0.0, 0, 240)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowWarning)
        assert integrated_negativity(wigner_field(state)) < 5e-4


def test_negativity_is_clamped_at_zero():
    g = PhaseGrid.square(1.0, 3)
    f = WignerField(g, np.full((3, 3), 0.25))
    assert integrated_negativity(f) == 0.0


def test_window_warning_for_strong_squeezing():
    state = fock.make_squeezed_fock(fock.R_MAX, 0.0, 0, 240)
    with pytest.warns(WindowWarning):
        f = wigner_field(state)
    assert f.window_limited and f.normalization < 0.995
    wide = wigner_field(state, PhaseGrid.square(12.0, 161))
    assert not wide.window_limited


def test_tail_guard_is_enforced():
    bad = fock.FockVector(np.ones(10) / math.sqrt(10))
    with pytest.raises(fock.TruncationError):
        wigner_field(bad)


@pytest.mark.parametrize(
    "state",
    [
        fock.make_fock(3, 40),
        fock.make_cat(1.3 + 0.4j, "even", 40),
        fock.make_squeezed_fock(0.6, 0.8, 1, 60),
        fock.subtract_photons(fock.make_squeezed_fock(0.5, 0.3, 0, 60), 2),
    ],
    ids=["fock3", "cat", "squeezed1", "two_sub"],
)
def test_methods_agree(state):
    xs = np.linspace(-4, 4, 17)
    ps = np.linspace(-3, 3, 13)
    a = wigner_parity(state, xs, ps)
    b = wigner_wavefunction(state, xs, ps)
    assert np.max(np.abs(a - b)) < 1e-8


def test_method_switch_on_field():
    state = fock.make_fock(1, 20)
    g = PhaseGrid.square(3.0, 9)
    a = wigner_field(state, g, method="parity").values
    b = wigner_field(state, g, method="wavefunction").values
    assert np.max(np.abs(a - b)) < 1e-8
    with pytest.raises(ValueError):
        wigner_field(state, g, method="fft")


def test_negativity_invariant_under_squeezing():
    deltas = []
    for r in (0.0, 0.3, R6, 1.0, 1.4391):
        state = fock.make_squeezed_fock(r, 0.0, 1, 240)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WindowWarning)
            deltas.append(integrated_negativity(wigner_field(state)))
    assert max(deltas) - min(deltas) <= 6e-3


def test_convergence_probe_examples():
    one = StateSpec.make("fock", 80, n=1)
    base = Setting(PhaseGrid(), 80)
    grid_rep = convergence_probe(one, base, Setting(PhaseGrid.square(7.0, 301), 80))
    assert grid_rep.delta_change < 6e-3
    cut_rep = convergence_probe(one, base, Setting(PhaseGrid(), 120))
    assert cut_rep.delta_change < 6e-3
    vac = StateSpec.make("fock", 80, n=0)
    vac_rep = convergence_probe(vac, base, Setting(PhaseGrid.square(9.0, 301), 120))
    assert vac_rep.delta_change < 1e-6
    assert vac_rep.delta_per_n_change == 0.0


def test_convergence_probe_requires_refinement():
    spec = StateSpec.make("fock", 80, n=1)
    base = Setting(PhaseGrid(), 80)
    with pytest.raises(ValueError):
        convergence_probe(spec, base, base)
    with pytest.raises(ValueError):
        convergence_probe(spec, base, Setting(PhaseGrid.square(7.0, 101), 120))
