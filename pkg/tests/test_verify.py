import json
import math

import mpmath as mp
import numpy as np
import pytest

from ramc.coeffs import s_value
from ramc.errors import DomainError
from ramc.hyper import Params, beta, ramanujan_r
from ramc.realfun import CONSTANTS, digamma
from ramc.verify import (
    Axis,
    CheckReport,
    GridSpec,
    alpha_star_closed_forms,
    case_constants,
    check_absolute_monotonicity,
    check_diag_props,
    check_k_bounds,
    check_limit_dn,
    check_prop_delta,
    check_prop_qc,
    check_prop_rtilde,
    check_s_lemmas,
    conjecture_coefficients,
    explore_kanother,
    fd_derivative,
    interval_grid,
    rtilde_psi,
    rtilde_sum,
    run_all,
    triangle_grid,
)

mp.mp.dps = 40
LN2 = math.log(2.0)
HALF = Params(0.5, 0.5)
R_HALF = ramanujan_r(0.5, 0.5)


def assert_report_invariants(rep: CheckReport):
    if rep.status == "fail":
        assert rep.worst_margin < -rep.tolerance
    if rep.status == "pass":
        assert rep.worst_margin >= -rep.tolerance
        assert rep.witness
    for sub in rep.subchecks.values():
        if sub["status"] == "fail":
            assert sub["worst_margin"] < -rep.tolerance
    json.dumps(rep.to_dict(), allow_nan=False)


# -- grids ------------------------------------------------------------------------


def test_triangle_grid():
    pts = triangle_grid().points()
    assert all(p["a"] + p["b"] <= 1.0 + 1e-12 for p in pts)
    assert min(p["a"] for p in pts) == 0.01
    assert max(p["a"] for p in pts) == 0.96
    # 20 values per axis, pairs with i + j <= 19
    assert len(pts) == 20 * 21 // 2


def test_refined_axis_clusters_at_both_ends():
    v = interval_grid("x", 0.0, 2.0).dims[0].values()
    assert len(v) == 199
    assert np.all(np.diff(v) > 0)
    assert v[0] == pytest.approx(2e-6) and v[-1] == pytest.approx(2.0 - 2e-6)
    closed = interval_grid("x", 0.0, 0.5, closed_hi=True).dims[0].values()
    assert closed[-1] == 0.5


def test_axis_validation():
    for kwargs in [dict(count=1), dict(lo=1.0, hi=0.0), dict(spacing="cubic"),
                   dict(lo=0.0, spacing="log")]:
        base = dict(name="x", lo=0.0, hi=1.0, count=5)
        base.update(kwargs)
        with pytest.raises(ValueError):
            Axis(**base)
    with pytest.raises(ValueError):
        GridSpec((Axis("x", 0, 1, 3),), "x<c")


def test_grid_round_trip():
    grid = GridSpec((Axis("a", 0.1, 0.9, 5, "log"), Axis("b", 0.1, 0.9, 3)), "a+b<=1")
    d = grid.to_dict()
    assert json.loads(json.dumps(d)) == d
    rebuilt = GridSpec(tuple(Axis(**ax) for ax in d["dims"]), d["constraint"])
    assert rebuilt.points() == grid.points()


# -- finite differences ----------------------------------------------------------


@pytest.mark.parametrize("order, expected", [(1, math.cos(0.7)), (2, -math.sin(0.7)),
                                             (3, -math.cos(0.7))])
def test_fd_derivative(order, expected):
    value, ok = fd_derivative(math.sin, 0.7, 1e-2, order)
    assert ok
    assert abs(value - expected) <= 1e-6


def test_fd_derivative_flags_noise():
    # a derivative that is zero at the node has no resolvable sign
    _, ok = fd_derivative(math.cos, 0.0, 1e-3, 1)
    assert not ok


# -- coefficient checks --------------------------------------------------------------


def test_absolute_monotonicity_examples():
    rep = check_absolute_monotonicity(HALF, R_HALF, n_max=2000)
    assert rep.passed and not rep.exploratory
    rep2 = check_absolute_monotonicity(Params(0.3, 0.6), 2.0, n_max=2000)
    assert rep2.passed
    for r in (rep, rep2):
        assert_report_invariants(r)


def test_absolute_monotonicity_p_equal_pi_is_exploratory():
    rep = check_absolute_monotonicity(HALF, math.pi, n_max=200)
    assert rep.exploratory
    # S(p) = p^2 - B (a+b+ab)/(a+b) p + B with B = pi and (a+b+ab)/(a+b) = 5/4
    s_pi = math.pi**2 - 1.25 * math.pi**2 + math.pi
    assert abs(rep.values["alpha_1"] - (-s_pi / math.pi**2)) <= 1e-15
    assert not rep.values["E2"] and not rep.values["E3"]
    assert rep.status == "fail"
    assert_report_invariants(rep)


def test_limit_dn_examples():
    rep = check_limit_dn(HALF, 2.0, n_max=100_000)
    assert rep.passed
    assert rep.values["gap_last"] < 1e-3
    assert rep.subchecks["d_positive"]["status"] == "pass"
    rng = np.random.default_rng(3)
    for _ in range(3):
        a = rng.uniform(0.05, 0.6)
        b = rng.uniform(0.05, 1 - a)
        rep_r = check_limit_dn(Params(a, b), ramanujan_r(a, b), n_max=20_000)
        assert rep_r.passed
        assert rep_r.subchecks["d_positive"]["worst_margin"] > 0
    above = check_limit_dn(HALF, R_HALF + 1.0, n_max=20_000)
    assert above.values["d_last"] < 0
    assert "d_positive" not in above.subchecks
    assert_report_invariants(rep)


# -- lemma and proposition checks ----------------------------------------------------


def test_case_constants_against_mpmath():
    k = case_constants()

    def parts(x):
        x = mp.mpf(x)
        big_b = mp.beta(x, x)
        big_r = -2 * mp.digamma(x) - 2 * mp.euler
        return big_r / big_b, (big_b - big_r) / x**2, (x * big_r - 2) / (2 * x**2)

    for tag, x in (("1_4", 0.25), ("7_16", 7 / 16)):
        q, d, r = (float(v) for v in parts(x))
        assert abs(k[f"q_{tag}"] - q) <= 1e-13
        assert abs(k[f"d_{tag}"] - d) <= 1e-12
        assert abs(k[f"r_{tag}"] - r) <= 1e-12
    assert abs(k["q_1_2"] - 4 * LN2 / math.pi) <= 1e-15
    assert abs(k["d_1_2"] - (4 * math.pi - 16 * LN2)) <= 1e-13
    assert abs(k["r_1_4"] - (2 * math.pi + 12 * LN2 - 16)) <= 1e-12
    assert abs(k["r_0"] + math.pi**2 / 6) <= 1e-15
    for name in ("case1", "case2", "case3"):
        assert k[name] > 0


def test_case_constants_printed_digits():
    k = case_constants()
    # truncated printed digits; the third one is recorded as measured
    assert str(k["q_1_4"]).startswith("0.98438")
    assert str(k["d_1_4"]).startswith("1.853167")
    assert str(k["q_7_16"]).startswith("0.92071")
    assert str(k["d_7_16"]).startswith("1.558533")
    assert str(k["r_7_16"]).startswith("-1.265376")
    assert str(k["case1"]).startswith("0.179")
    assert str(k["case2"]).startswith("0.035")


def test_s_lemmas_pass():
    rep = check_s_lemmas()
    assert rep.passed
    for name in ("S_at_2_negative", "S_at_R_negative", "beta_lower_bound", "case1_positive",
                 "case2_positive", "case3_positive"):
        assert rep.subchecks[name]["status"] == "pass"
    assert_report_invariants(rep)


def test_s_at_two_matches_formula():
    # S(2) = 4 - B (a+b+2ab)/(a+b)
    for a, b in [(0.5, 0.5), (0.1, 0.3), (0.45, 0.55)]:
        expected = 4 - beta(a, b) * (a + b + 2 * a * b) / (a + b)
        assert abs(s_value(Params(a, b), 2.0) - expected) <= 1e-13
        assert expected < 0
    assert abs(s_value(HALF, 2.0) - (4 - 1.5 * math.pi)) <= 1e-14


@pytest.mark.parametrize("c", [0.5, 1.0, 1.5, 2.0])
def test_prop_qc(c):
    rep = check_prop_qc(c)
    assert rep.passed
    assert abs(rep.values["q_at_probe"] - 1.0) <= 1e-4
    assert_report_invariants(rep)


def test_prop_qc_values():
    rep = check_prop_qc(1.0)
    assert abs(rep.values["q_at_half"] - 4 * LN2 / math.pi) <= 1e-14
    rep2 = check_prop_qc(2.0)
    assert abs(rep2.values["q_at_half"]) <= 1e-12
    rep3 = check_prop_qc(3.0)
    assert rep3.values["q_at_half"] < 0


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_prop_delta(c):
    rep = check_prop_delta(c)
    assert rep.passed, rep.details
    assert_report_invariants(rep)


def test_prop_delta_values():
    rep = check_prop_delta(1.0)
    assert abs(rep.values["delta_at_half"] - (math.pi - 4 * LN2)) <= 1e-12
    assert abs(rep.values["ratio_at_half"] - (4 * math.pi - 16 * LN2)) <= 1e-12


def test_rtilde_forms_agree():
    for c in (0.5, 1.0, 2.0):
        # the sum form has a pole at x = c, so only interior points
        for x in (0.01 * c, 0.3 * c, 0.5 * c, 0.9 * c):
            for n in (1, 2, 3):
                assert abs(rtilde_sum(c, n, x) - rtilde_psi(c, n, x)) <= 1e-10 * max(
                    1.0, abs(rtilde_psi(c, n, x))
                )


def test_rtilde_examples():
    assert abs(rtilde_psi(1.0, 1, 1e-12) + 1.0) <= 1e-10
    assert abs(rtilde_psi(1.0, 1, 0.5) - (4 * LN2 - 4)) <= 1e-12
    assert abs(-digamma(2.0) - CONSTANTS.euler_gamma + 1.0) <= 1e-15


@pytest.mark.parametrize("c, n", [(1.0, 1), (1.0, 2), (0.5, 1), (2.0, 3)])
def test_prop_rtilde(c, n):
    rep = check_prop_rtilde(c, n)
    assert rep.passed
    assert rep.subchecks["negative"]["worst_margin"] > 0
    assert_report_invariants(rep)


def test_diag_props():
    rep = check_diag_props()
    assert rep.passed, rep.details
    assert abs(rep.values["excess_at_1e-4"] - 2 * CONSTANTS.zeta3) <= 1e-2
    assert abs(rep.values["shifted_r_at_1e-4"] + math.pi**2 / 3) <= 1e-2
    assert rep.values["excess_at_1e3"] <= 1e-4
    assert_report_invariants(rep)


# -- elliptic bounds and the exploratory conjecture --------------------------------------


def test_alpha_star_closed_forms_values():
    a0, a1, a2, a3 = alpha_star_closed_forms()
    assert abs(a0 - (math.pi / (4 * LN2) - 1)) <= 1e-15
    assert abs(a0 - 0.1330) < 1e-4
    assert a1 > 0 and a2 > 0 and a3 > 0


def test_k_bounds():
    rep = check_k_bounds()
    assert rep.passed
    assert abs(rep.values["q_first"] - (math.pi / math.log(16) - 1)) <= 1e-6
    assert rep.values["q_last"] < 0.25
    assert rep.values["mp_resolved"] > 0
    assert_report_invariants(rep)


def test_k_bounds_at_half():
    from ramc.oracles import agm_complete_k

    r = 0.5
    rp2 = 1 - r * r
    ratio = agm_complete_k(r) / math.log(4 / math.sqrt(rp2))
    assert 1 + (math.pi / math.log(16) - 1) * rp2 < ratio < 1 + rp2 / 4


def test_explore_kanother_is_inconclusive():
    rep = explore_kanother()
    assert rep.status == "inconclusive" and rep.exploratory
    assert rep.values["negative_count"] == 0
    coeffs = conjecture_coefficients(50)
    assert len(coeffs) == 51 and np.all(coeffs >= 0)


def test_run_all_ignores_exploratory():
    good = check_prop_qc(1.0)
    explore = explore_kanother()
    assert run_all([good, explore])
    bad = CheckReport("x", "fail", None, -1.0, {"x": 0.0}, "")
    assert not run_all([good, bad])


def test_reports_are_deterministic():
    for make in (lambda: check_prop_delta(0.5), lambda: check_k_bounds(),
                 lambda: check_absolute_monotonicity(HALF, 2.0, 500)):
        r1, r2 = make(), make()
        assert r1.to_dict() == r2.to_dict()


def test_bad_inputs():
    for check in (check_prop_qc, check_prop_delta, check_prop_rtilde):
        with pytest.raises(DomainError):
            check(-1.0)
    rep2 = check_absolute_monotonicity(HALF, 2.0, n_max=10**8)
    assert rep2.status == "inconclusive"
