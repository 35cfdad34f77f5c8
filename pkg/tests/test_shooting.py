import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from henonlab import io
from henonlab.constants import ELL, SQRT_E, ProblemParams, kappa_of_ell
from henonlab.shooting import (
    IntegrationError,
    integrate_ivp,
    rescale,
    rescale_henon,
    scaling_report,
    solve_radial,
    to_henon,
)

# mpmath, 30 digits; regenerate with tests/oracles/mp_oracles.py
MP_V0 = {
    20: 1.70680040484995814900305029463,
    50: 1.64763209533559324533595386306,
    100: 1.63821953069129352923719897337,
    200: 1.63819662192194952046005099771,
}
MP_NODAL = {
    3: dict(mu1=12.28704320977303208, mu2=5.1817129839835323698,
            t1=0.29086745451378328201, s2=0.58882665780801686846),
    5: dict(mu1=5.2834404830501094898, mu2=2.2856925797741184367,
            t1=0.19443397779217868231, s2=0.50014167121333511902),
}


def sol(p, m, alpha=0.0, a=1.0):
    return solve_radial(ProblemParams(alpha, p), m, a=a)


def test_bessel_limit():
    tr = integrate_ivp(1.001, 1.0, t_max=10.0, zero_budget=1)
    assert tr.zeros[0] == pytest.approx(2.404825557695773, abs=1e-2)


def test_series_start():
    tr = integrate_ivp(3.0, 1.0, t_max=1.0, zero_budget=1)
    t0 = tr.grid[0]
    assert tr.v[0] == pytest.approx(1 - t0**2 / 4, abs=1e-20)


def test_p3_decreasing_to_first_zero():
    tr = integrate_ivp(3.0, 1.0, t_max=20.0, zero_budget=1)
    z = tr.zeros[0]
    inside = tr.grid < z
    assert np.all(np.diff(tr.v[inside]) < 0)
    assert np.all(tr.dv[inside] < 0)


def test_budget_exhaustion_is_not_error():
    tr = integrate_ivp(3.0, 1.0, t_max=1.0, zero_budget=1)
    assert tr.zeros.size == 0


def test_bad_ivp_inputs():
    with pytest.raises(ValueError):
        integrate_ivp(1.0, 1.0, t_max=1.0)
    with pytest.raises(ValueError):
        integrate_ivp(3.0, 0.0, t_max=1.0)
    with pytest.raises(ValueError):
        sol(3.0, 3)


def test_horizon_failure(monkeypatch):
    from henonlab import shooting

    monkeypatch.setattr(shooting, "_default_log_horizon", lambda p, a: 0.0)
    with pytest.raises(IntegrationError) as exc:
        sol(3.0, 2)
    assert exc.value.t > 0


@pytest.mark.parametrize("p", sorted(MP_V0))
def test_v0_against_mpmath(p):
    assert sol(p, 1).mu[0] == pytest.approx(MP_V0[p], rel=1e-11)


@pytest.mark.parametrize("p", sorted(MP_NODAL))
def test_nodal_against_mpmath(p):
    ref = MP_NODAL[p]
    s = sol(p, 2)
    got = dict(mu1=s.mu[0], mu2=s.mu[1], t1=s.t1, s2=s.s2)
    for key, want in ref.items():
        assert got[key] == pytest.approx(want, rel=1e-10), key


@pytest.mark.parametrize("p,a", [(5, 2.0), (20, 0.5)])
@pytest.mark.parametrize("m", [1, 2])
def test_scale_invariance(p, a, m):
    s1, s2 = sol(p, m), sol(p, m, a=a)
    t = np.linspace(0.0, 1.0, 301)
    dev = np.max(np.abs(s1(t)[0] - s2(t)[0])) / s1.mu[0]
    assert dev <= 1e-8
    assert s2.mu == pytest.approx(s1.mu, rel=1e-8)


@pytest.mark.parametrize("p", [1.5, 3, 11, 60, 250])
@pytest.mark.parametrize("m", [1, 2])
def test_normalization_and_nehari(p, m):
    s = sol(p, m)
    v1 = s(np.array([1.0]))[0][0]
    assert abs(v1) <= 1e-10
    assert s.profile.v[0] > 0
    interior = s.profile.zeros[s.profile.zeros < 1.0]
    assert interior.size == m - 1
    assert s.nehari_defect <= 1e-6
    for mu, le in zip(s.mu, s.log_eps):
        assert le == pytest.approx(-0.5 * (math.log(p) + (p - 1) * math.log(mu)), rel=1e-15)


@pytest.mark.parametrize("m", [1, 2])
def test_derivative_roots(m):
    s = sol(7, m)
    # crit points include t = 0
    assert s.profile.crit_points.size == m
    t = s.profile.grid
    signs = np.sign(s.profile.dv[(t > 1e-3) & (t < 1)])
    assert np.count_nonzero(np.diff(signs)) == m - 1


def test_refined_zero_accuracy():
    tr = integrate_ivp(4.0, 1.0, t_max=50.0, zero_budget=3)
    assert tr.zeros.size == 3
    vmax = np.max(np.abs(tr.v))
    vals = tr(tr.zeros)[0]
    assert np.all(np.abs(vals) <= 1e-10 * vmax)


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=1.2, max_value=40.0), st.sampled_from([1, 2]))
def test_solution_properties(p, m):
    s = sol(p, m)
    assert s.nehari_defect <= 1e-6
    assert abs(s(np.array([1.0]))[0][0]) <= 1e-10
    assert (s.profile.zeros < 1.0).sum() == m - 1
    assert np.all(np.diff(s.profile.grid) > 0)


def test_large_p_limits():
    s1, s2 = sol(400, 1), sol(400, 2)
    assert s1.mu[0] == pytest.approx(SQRT_E, rel=0.02)
    assert s2.mu[0] == pytest.approx(2.46, rel=0.05)
    assert s2.mu[1] == pytest.approx(1.17, rel=0.05)


def test_to_henon_identity_at_alpha_zero():
    s = sol(9, 2)
    u, h = to_henon(s, 0.0)
    r = np.linspace(0.01, 1.0, 50)
    assert np.max(np.abs(u(r)[0] - s(r)[0])) <= 1e-14
    assert h.mu_henon == s.mu


def test_to_henon_alpha_two():
    s = sol(9, 2, alpha=2.0)
    u, h = to_henon(s)
    assert h.r_p == pytest.approx(math.sqrt(s.t1), rel=1e-15)
    assert h.sigma_p == pytest.approx(math.sqrt(s.s2), rel=1e-15)
    assert u.zeros[0] == pytest.approx(h.r_p, rel=1e-13)
    k = 2.0 ** (2.0 / 8)
    assert h.mu_henon[0] == pytest.approx(k * s.mu[0], rel=1e-15)
    # u(r) = k v(r^2)
    r = np.linspace(0.05, 1.0, 40)
    assert np.allclose(u(r)[0], k * s(r**2)[0], rtol=0, atol=1e-12)
    # derivative: u' = 2 k r v'(r^2)
    assert np.allclose(u(r)[1], 2 * k * r * s(r**2)[1], rtol=1e-10, atol=1e-10)


def test_henon_amplitude_to_one():
    ratios = [to_henon(sol(p, 1), 3.0)[1].mu_henon[0] / sol(p, 1).mu[0] for p in (50, 400)]
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1) < 0.04


def test_rescale_zone1_origin():
    r = rescale(sol(30, 1), 1)
    assert r(np.array([0.0]))[0][0] == 0.0


def test_rescale_zone2_and_limit_zone():
    s = sol(400, 2)
    r = rescale(s, 2)
    c = r.crit_points[0]
    val, der = r(np.array([c]))
    assert abs(val[0]) < 1e-9 and abs(der[0]) < 1e-6
    x = np.linspace(2.0, 20.0, 4001)
    assert x[np.argmin(np.abs(r(x)[0]))] == pytest.approx(ELL, rel=0.05)
    rep = scaling_report(s)
    assert rep["t1_over_eps1"] > 10
    assert rep["t1_over_eps2"] < 0.5


def test_rescale_henon_matches_lane_emden():
    s = sol(60, 2, alpha=1.0)
    k = 1.5
    a, b = rescale(s, 2), rescale_henon(s, 2)
    x = np.linspace(0.5, 10.0, 30)
    y = (2.0 / 3.0) * x**k
    assert np.allclose(b(x)[0], a(y)[0], atol=1e-11, rtol=0)


def test_rescale_bad_zone():
    with pytest.raises(ValueError):
        rescale(sol(5, 1), 2)


def test_scaling_report_schema():
    assert set(scaling_report(sol(20, 1))) == {"mu", "eps", "rho"}
    rep = scaling_report(sol(400, 2), 0.0)
    assert rep["sigma_over_rho2"] == pytest.approx(ELL, rel=0.05)
    assert rep["s2_over_eps2"] == pytest.approx(rep["sigma_over_rho2"], rel=1e-12)
    rep2 = scaling_report(sol(400, 2), 2.0)
    assert rep2["sigma_over_rho2"] == pytest.approx(math.sqrt(2 * ELL), rel=0.05)


def test_f_p_bounded():
    # the limit maxima of p t^2 |v|^(p-1) are 2 and 2 kappa^2
    cap = {1: 2.0, 2: 2.0 * kappa_of_ell() ** 2}
    for m in (1, 2):
        peaks = []
        for p in (50, 100, 200, 400):
            s = sol(p, m)
            t, v = s.profile.grid, s.profile.v
            with np.errstate(divide="ignore"):
                f = p * np.exp(2 * np.log(t) + (p - 1) * np.log(np.abs(v)))
            peaks.append(f.max())
        assert max(peaks) <= 1.05 * cap[m]
        steps = np.abs(np.diff(peaks))
        assert np.all(steps[1:] < steps[:-1])


def test_scales_decrease():
    for m in (1, 2):
        for alpha in (0.0, 2.0):
            eps = [sol(p, m, alpha).log_eps for p in (50, 100, 200, 400)]
            rho = [[math.log(x) for x in sol(p, m, alpha).henon.rho] for p in (50, 100, 200, 400)]
            assert np.all(np.diff(np.array(eps), axis=0) < 0)
            assert np.all(np.diff(np.array(rho), axis=0) < 0)


def test_json_round_trip(tmp_path):
    s = sol(12, 2, alpha=1.0)
    path = tmp_path / "s.json"
    io.save_solution(s, path)
    d = json.loads(path.read_text())
    for key in ("alpha", "p", "zones", "grid", "v", "dv", "zeros", "crit", "mu", "eps", "rho",
                "t1", "s2", "r_p", "sigma_p"):
        assert key in d
    back = io.load_solution(path)
    assert back.mu == s.mu and back.t1 == s.t1 and back.s2 == s.s2
    assert np.array_equal(back.profile.grid, s.profile.grid)
    assert np.array_equal(back.profile.v, s.profile.v)
    t = np.linspace(0.01, 1.0, 97)
    assert np.max(np.abs(back(t)[0] - s(t)[0])) <= 1e-6
    assert io.dumps(io.solution_to_dict(back)) == path.read_text()


def test_json_schema_rejected():
    with pytest.raises(ValueError):
        io.solution_from_dict({"schema": "other"})
