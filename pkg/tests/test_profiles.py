import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from henonlab import profiles as P
from henonlab.constants import (
    ELL,
    ProblemParams,
    delta1_of_alpha,
    delta_of_ell,
    gamma_of_ell,
    kappa_of_ell,
)
from henonlab.shooting import rescale, rescale_henon, solve_radial

GAMMA, DELTA = gamma_of_ell(ELL), delta_of_ell(ELL)


def sol(p, m, alpha=0.0):
    return solve_radial(ProblemParams(alpha, p), m)


def test_eval_examples():
    assert P.V_family(8.0)(np.array([0.0]))[0] == 0.0
    r = np.geomspace(1e-3, 1e3, 200)
    assert np.array_equal(P.U_family(0.0, 8.0)(r), P.V_family(8.0)(r))
    val, der = P.Z_family(GAMMA, DELTA).eval(np.array([ELL]))
    assert abs(val[0]) < 1e-13 and abs(der[0]) < 1e-13


def test_derivative_matches_fd():
    prof = P.Z_henon_family(1.3, GAMMA, 2.0)
    r = np.linspace(0.3, 8.0, 25)
    h = 1e-6
    fd = (prof(r + h) - prof(r - h)) / (2 * h)
    assert np.allclose(prof.eval(r)[1], fd, rtol=1e-7, atol=1e-8)


def test_singular_rejects_zero():
    with pytest.raises(ValueError):
        P.Z_ell()(np.array([0.0]))
    with pytest.raises(ValueError):
        P.V_family(-1.0)


@pytest.mark.parametrize("prof,window", [
    (P.U_family(0.0, 8.0), (0.1, 10)),
    (P.Z_ell(), (0.5, 20)),
    (P.eta1(), (0.1, 10)),
    (P.eta2_limit(), (0.1, 10)),
    (P.Z_ell_henon(2.5), (0.5, 20)),
])
def test_residuals(prof, window):
    assert P.pde_residual(prof, np.linspace(*window, 400)) <= 1e-6


def test_residual_rejects_potentials():
    with pytest.raises(ValueError):
        P.pde_residual(P.W1(), [1.0])


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0, 3.7])
def test_u_normalized_at_origin(alpha):
    assert P.U_family(alpha, delta1_of_alpha(alpha))(np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-15)


def test_mass_identity():
    got, want = P.mass_identity("lane_emden")
    assert want == pytest.approx(8.3740, abs=1e-3)
    assert got == pytest.approx(want, rel=1e-8)
    assert P.mass_identity("henon", 0.0)[1] == want
    got2, want2 = P.mass_identity("henon", 2.0)
    assert want2 == pytest.approx(2 * GAMMA, rel=1e-15)
    assert want2 == pytest.approx(16.748, abs=1e-3)
    assert got2 == pytest.approx(want2, rel=1e-8)


def test_correspondence_examples():
    r = np.linspace(0.1, 5.0, 100)
    assert P.correspondence_check(0.0, 8.0, r) <= 1e-12
    assert P.correspondence_check(2.0, 8.0, r) <= 1e-12
    assert P.correspondence_check(1.0, DELTA, r) <= 1e-12


@given(st.floats(0.0, 6.0), st.floats(0.05, 200.0))
def test_correspondence_property(alpha, delta):
    assert P.correspondence_check(alpha, delta, np.geomspace(0.05, 5.0, 40)) <= 1e-11


def test_normalizations():
    d = P.normalization_defects()
    assert d["eta1"] <= 1e-10 and d["eta1_sq"] <= 1e-10


def test_z_unique_max():
    z = P.Z_ell()
    r = np.geomspace(1e-2, 1e3, 20001)
    vals = z(r)
    k = int(np.argmax(vals))
    assert r[k] == pytest.approx(ELL, rel=1e-3)
    assert np.all(vals <= 1e-12)
    d = np.diff(vals)
    assert np.all(d[:k - 1] > 0) and np.all(d[k + 1:] < 0)


def test_potential_decay():
    r = np.array([1e3])
    assert r[0] ** 2 * P.W1()(r)[0] < 1e-3
    assert r[0] ** 2 * P.W2_limit()(r)[0] < 1e-3


def test_w_is_exp_of_profile():
    r = np.geomspace(0.01, 100, 50)
    assert np.allclose(P.W1()(r), np.exp(P.V_family(8.0)(r)), rtol=1e-14)
    assert np.allclose(P.W2_limit()(r), np.exp(P.Z_ell()(r)), rtol=1e-13)


def test_bump_argmax():
    am = P.bump_argmax()
    for key, w in (("g", P.W1()), ("h", P.W2_limit())):
        res = minimize_scalar(lambda x: -x * x * w(np.array([x]))[0], bounds=(0.1, 50), method="bounded",
                              options={"xatol": 1e-10})
        assert res.x == pytest.approx(am[key], rel=1e-6)


def test_profile_distance_zone1():
    c0, _ = P.profile_distance(rescale(sol(400, 1), 1), P.V_family(8.0), 10.0)
    assert c0 <= 0.15


def test_profile_distance_henon_decreasing():
    c = [P.profile_distance(rescale_henon(sol(p, 1, 2.0), 1), P.U_family(2.0, 32.0), 5.0)[0]
         for p in (100, 200, 400)]
    assert c[0] > c[1] > c[2]


def test_profile_distance_zone2_decreasing():
    c = [P.profile_distance(rescale(sol(p, 2), 2), P.Z_ell(), 20.0, 0.5)[0] for p in (100, 200, 400)]
    assert c[0] > c[1] > c[2]


def test_profile_distance_errors():
    tr = rescale(sol(20, 1), 1)
    with pytest.raises(ValueError):
        P.profile_distance(tr, P.Z_ell(), 10.0, 0.0)
    with pytest.raises(ValueError):
        P.profile_distance(tr, P.V_family(8.0), 1e9)


def test_estimate_ell():
    grid = [100, 200, 400, 800]
    ratios = P.ell_ratios(grid)
    assert np.all(np.diff(ratios) > 0)
    assert P.extrapolate_in_inverse_p(grid, ratios) == pytest.approx(ELL, rel=0.02)
    assert P.estimate_ell([400]) == ratios[2]


def test_estimate_ell_validation():
    with pytest.raises(ValueError):
        P.estimate_ell([])
    with pytest.raises(ValueError):
        P.estimate_ell([200, 100])


def test_eta2_prefactor():
    k = kappa_of_ell()
    e = P.eta1_sq(k, DELTA)
    r = np.array([0.7, 1.3])
    bare = r**k / (DELTA + r ** (2 * k))
    assert np.allclose(e(r), math.sqrt(2 * k * DELTA) * bare, rtol=1e-14)
