import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from henonlab.constants import ProblemParams, alpha_resonances, is_resonant, kappa_of_ell
from henonlab.morse import (
    CEIL_UNSTABLE_TOL,
    IndexRange,
    asymptotic_morse,
    asymptotic_morse_rewritten,
    asymptotic_sym_morse,
    find_p_star,
    full_report,
    morse_index,
    morse_index_sym,
    multiplicity,
)
from henonlab.spectral import SpectralResult

KAPPA = kappa_of_ell()
ALPHA6 = alpha_resonances(6)[0][1]

alphas = st.floats(min_value=0.0, max_value=10.0)
neg = st.floats(min_value=1e-6, max_value=60.0).map(lambda x: -x)


def nus(m):
    return st.lists(neg, min_size=m, max_size=m).map(sorted)


def test_morse_examples():
    assert morse_index(1, 0.0, [-0.99]) == 1
    assert morse_index(2, 0.0, [-26.9, -0.99]) == 12
    assert morse_index(1, 2.5, [-0.999]) == 5


def test_sym_examples():
    nu = [-(KAPPA**2), -0.99]
    assert morse_index_sym(5, 2, 0.0, nu) == 4
    assert morse_index_sym(6, 2, 0.0, nu) == 2
    assert morse_index_sym(1, 2, 0.0, nu) == morse_index(2, 0.0, nu)


def test_asymptotic_examples():
    assert [asymptotic_morse(1, a) for a in (0, 0.5, 1, 2, 3)] == [1, 3, 3, 3, 5]
    assert asymptotic_morse(2, 0.0) == 12
    assert asymptotic_sym_morse(1, 2, 0.0) == 12
    assert asymptotic_sym_morse(5, 2, 0.0) == 4
    assert asymptotic_sym_morse(6, 1, 2.0) == 1


def test_multiplicity_examples():
    assert multiplicity(0.0) == (0, 5)
    assert multiplicity(2.0) == (1, 10)
    assert multiplicity(1e-4) == (1, 5)


def test_resonant_interval():
    r = asymptotic_morse(2, ALPHA6)
    assert isinstance(r, IndexRange)
    assert (r.lo, r.hi) == (14, 16)
    lo = (2 + ALPHA6) * KAPPA + 2 * math.ceil(ALPHA6 / 2)
    assert r.lo == pytest.approx(lo, abs=1e-8)
    assert 15 in r and 17 not in r
    rep = full_report(ProblemParams(ALPHA6, 2.0), 2, "asymptotic")
    assert rep.resonant and rep.morse == IndexRange(14, 16)
    assert rep.as_dict()["morse"] == [14, 16]


def test_full_report_sym_table():
    rep = full_report(ProblemParams(3.0, 2.0), 1, None, n_max=3)
    assert rep.sym_morse == {1: 5, 2: 3, 3: 1}
    assert rep.p == "asymptotic"


def test_full_report_computed():
    rep = full_report(ProblemParams(0.0, 500.0), 2, [-26.78, -0.999])
    assert rep.morse == 12 and rep.agrees and not rep.ceiling_unstable
    assert rep.multiplicity_nodal == 5


def test_ceiling_unstable_flag():
    # level exactly 2 + tiny at alpha = 2
    nu = -((2.0 + 1e-8) / 2.0) ** 2
    rep = full_report(ProblemParams(2.0, 10.0), 1, [nu])
    assert rep.ceiling_unstable and "ceiling-unstable" in rep.notes


def test_resolved_gap_settles_side():
    # nu_2 rounds to -1 but is known to lie above it; the level 2 sqrt(1 - gap) < 2
    res = SpectralResult(np.array([-26.8, -1.0]), np.zeros((2, 3)), np.zeros(3),
                         {"h": 1.0}, minus_one_gap={1: (1, -700.0)})
    rep = full_report(ProblemParams(2.0, 800.0), 2, res)
    assert not rep.ceiling_unstable
    assert rep.morse == 2 * math.ceil(2 * math.sqrt(26.8)) + 2 * 2 - 2
    res.minus_one_gap[1] = (-1, -700.0)
    assert full_report(ProblemParams(2.0, 800.0), 2, res).morse == rep.morse + 2


def test_errors():
    with pytest.raises(ValueError):
        morse_index(1, 0.0, [0.1])
    with pytest.raises(ValueError):
        morse_index(2, 0.0, [-1.0])
    with pytest.raises(ValueError):
        morse_index_sym(0, 1, 0.0, [-1.0])
    with pytest.raises(ValueError):
        full_report(ProblemParams(0.0, 2.0), 1, [-0.5], n_max=0)


def test_rewritten_form():
    for a in np.round(np.arange(0.0, 10.0 + 1e-9, 0.01), 10):
        if is_resonant(a):
            continue
        assert asymptotic_morse_rewritten(a) == asymptotic_morse(2, a)


def test_multiplicity_jumps():
    for _, an in alpha_resonances(12):
        before = multiplicity(max(an - 1e-7, 0.0))[1]
        after = multiplicity(an + 1e-7)[1]
        assert after - before == 1


def test_find_p_star():
    table = {50: [-25.0, -0.2], 100: [-26.0, -0.99], 200: [-26.5, -0.999]}
    assert find_p_star(0.0, 2, [50, 100, 200], table.__getitem__) == 100


@given(st.integers(1, 2).flatmap(lambda m: st.tuples(st.just(m), alphas, nus(m))))
def test_formula_paths_agree(args):
    m, a, nu = args
    assert morse_index_sym(1, m, a, nu) == morse_index(m, a, nu)


@given(st.integers(1, 2).flatmap(lambda m: st.tuples(st.just(m), alphas, nus(m))))
def test_report_invariants(args):
    m, a, nu = args
    rep = full_report(ProblemParams(a, 3.0), m, nu, n_max=12)
    assert rep.morse >= m
    vals = [rep.sym_morse[n] for n in range(1, 13)]
    assert all(x >= y for x, y in zip(vals, vals[1:]))
    top = max(math.ceil((2 + a) / 2 * math.sqrt(-v)) for v in nu)
    for n in range(top, 13):
        assert rep.sym_morse[n] == m


@given(alphas, st.integers(1, 15), st.floats(1e-6, 1 - 1e-6), st.floats(1e-6, 1 - 1e-6))
def test_ceiling_cell(a, n, f1, f2):
    k = (2 + a) / 2
    nu1, nu2 = -(((n - 1 + f1) / k) ** 2), -(((n - 1 + f2) / k) ** 2)
    assert morse_index(1, a, [nu1]) == morse_index(1, a, [nu2])


@given(alphas)
def test_asymptotic_sym_consistency(a):
    assume(not is_resonant(a))
    assert asymptotic_sym_morse(1, 2, a) == asymptotic_morse(2, a)
    assert asymptotic_sym_morse(1, 1, a) == asymptotic_morse(1, a)


def test_unstable_tol_value():
    assert CEIL_UNSTABLE_TOL == 1e-6
