"""Full-size acceptance runs, one test and one printed PASS/FAIL line per
criterion.

Criteria whose Monte Carlo rates are stated asymptotically use the band
rate - 3 sqrt(rate (1-rate) / reps); the embedded scenario checks carry the
same bands.  Two criteria fail honestly at the stated sample sizes and are
marked strict-xfail rather than weakened:

* criterion 1: at N=500 the likelihood gap is too small for the ML rule to
  discard the true i.i.d. 1/3 candidate 99% of the time (observed ~0.78,
  analytic ~0.780); the rate does reach ~0.992 at N=5000, covered in
  test_theorems.py.
* criterion 8, middle clause: the posterior mass on the wrong branch exceeds
  0.99 in ~84% of replications at N=300 (analytic ~0.842), short of the 95%
  band; the equality and payoff clauses hold.
"""

import math
import time

import numpy as np
import pytest

from robustupdate import (
    OutcomeSpace,
    bern_prediction_ml,
    bern_theta_asymptotic,
    bern_theta_finite,
    binary_space,
    parse_config,
    periodic_dgp,
    run_scenario,
    wilson_interval,
)
from robustupdate.dgp import SampleData
from robustupdate.scenarios import mc_threshold
from robustupdate.stats import (
    average_covariance,
    gram_difference,
    iid_average_covariance,
    min_eigenvalue,
    normal_upper_quantile,
    score_interval,
)


def emit(capsys, num: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")


def run(text: str):
    t0 = time.perf_counter()
    report = run_scenario(parse_config(text))
    return report, time.perf_counter() - t0


@pytest.mark.xfail(strict=True, reason="at N=500 the ML rule discards the "
                   "true candidate in ~78% of replications, not 99%")
def test_criterion_01_ml_failure(capsys):
    report, elapsed = run('{"scenario": "illustrative", "rule": "ml", '
                          '"seed": 1001}')
    check = {c.name: c for c in report.checks}["ml_excludes_truth_and_loses"]
    need = mc_threshold(0.99, 500)
    ok = check.passed and elapsed < 10.0
    emit(capsys, 1, ok,
         f"ML exclusion-and-loss frequency {check.observed:.4f} "
         f"(need >= {need:.5f}), runtime {elapsed:.1f}s < 10s")
    assert elapsed < 10.0
    assert check.passed


def test_criterion_02_atu_success(capsys):
    rep_third, t1 = run('{"scenario": "illustrative", "rule": "atu", '
                        '"seed": 1002}')
    rep_eight, t2 = run('{"scenario": "illustrative", "rule": "atu", '
                        '"seed": 1003, '
                        '"truth": {"prefix": [], "tail": {"iid": [0.8, 0.2]}}}')
    c1 = {c.name: c for c in rep_third.checks}["atu_retains_truth_no_loss"]
    c2 = {c.name: c for c in rep_eight.checks}["atu_gains_under_box_truth"]
    elapsed = t1 + t2
    need = mc_threshold(0.99, 500)
    ok = c1.passed and c2.passed and elapsed < 10.0
    emit(capsys, 2, ok,
         f"ATU retention-no-loss {c1.observed:.4f} and gain-under-0.8 "
         f"{c2.observed:.4f} (need >= {need:.5f}), runtime {elapsed:.1f}s < 10s")
    assert c1.passed and c2.passed
    assert elapsed < 10.0


def test_criterion_03_dominance_equivalence(capsys):
    report, elapsed = run('{"scenario": "dominance", "reps": 100, '
                          '"problems": 10000, "seed": 1004}')
    by = {c.name: c for c in report.checks}
    viol = by["dominance_if_directions"]
    wit = by["separating_witness_found"]
    ok = viol.passed and wit.passed and elapsed < 60.0
    emit(capsys, 3, ok,
         f"{int(viol.observed)} dominance violations over 100 instances x 1e4 "
         f"problems, witnesses {int(wit.observed)}/100, "
         f"runtime {elapsed:.1f}s < 60s")
    assert viol.passed and wit.passed
    assert elapsed < 60.0


def test_criterion_04_coverage(capsys):
    report, elapsed = run('{"scenario": "coverage", "seed": 1005}')
    check = report.checks[0]
    need = mc_threshold(0.95, 2000)
    ok = check.passed and elapsed < 30.0
    emit(capsys, 4, ok,
         f"truth-acceptance frequency {check.observed:.4f} >= {need:.5f}, "
         f"runtime {elapsed:.1f}s < 30s")
    assert check.passed
    assert elapsed < 30.0


def test_criterion_05_gram_psd_and_ordering(capsys):
    t0 = time.perf_counter()
    combos = [(d, n) for d in (2, 3, 5) for n in (2, 10, 100)]
    per_combo = 112  # 9 * 112 = 1008 >= 1000 random non-identical DGPs
    min_eig = math.inf
    max_excess = -math.inf
    for idx, (d, n) in enumerate(combos):
        rng = np.random.default_rng(np.random.SeedSequence((1006, idx)))
        space = OutcomeSpace(tuple(f"s{j}" for j in range(d)))
        for _ in range(per_combo):
            rows = rng.dirichlet(np.ones(d), size=n)
            dgp = periodic_dgp(space, rows)
            min_eig = min(min_eig, min_eigenvalue(gram_difference(dgp, n)))
        dgp = periodic_dgp(space, rng.dirichlet(np.ones(d), size=n))
        pooled = iid_average_covariance(dgp, n)
        avg = average_covariance(dgp, n)
        x = rng.random((1112, d - 1))
        stat_pooled = np.einsum("ij,ij->i", x, np.linalg.solve(pooled, x.T).T)
        stat_avg = np.einsum("ij,ij->i", x, np.linalg.solve(avg, x.T).T)
        max_excess = max(max_excess, float((stat_pooled - stat_avg).max()))
    elapsed = time.perf_counter() - t0
    ok = min_eig >= -1e-10 and max_excess <= 1e-9 and elapsed < 10.0
    emit(capsys, 5, ok,
         f"gram-difference min eigenvalue {min_eig:.2e} >= -1e-10 over 1008 "
         f"DGPs; statistic excess {max_excess:.2e} <= 1e-9 over 10008 points; "
         f"runtime {elapsed:.1f}s < 10s")
    assert min_eig >= -1e-10
    assert max_excess <= 1e-9
    assert elapsed < 10.0


def test_criterion_06_closed_forms(capsys):
    t0 = time.perf_counter()
    sp = binary_space()
    thetas = np.linspace(0.0, 1.0, 2001)
    worst_theta = 0.0
    worst_ml = 0.0
    worst_wilson = 0.0
    exact = True
    for phi in (0.1, 0.3, 0.5, 0.7, 0.9):
        for delta in (0.0, 0.1, 0.2, 0.5):
            # state interval vs attainable-average brute force
            iv = bern_theta_asymptotic(phi, delta)
            gap = phi - (1.0 - delta) * thetas
            keep = thetas[(gap >= -1e-12) & (gap <= delta + 1e-12)]
            worst_theta = max(worst_theta, abs(iv.lo - keep.min()),
                              abs(iv.hi - keep.max()))
            # displayed formula reproduced exactly
            exact &= iv.lo == max((phi - delta) / (1.0 - delta), 0.0) if delta < 1.0 else True
            exact &= iv.hi == min(phi / (1.0 - delta), 1.0) if delta < 1.0 else True
            # ML prediction vs sup-likelihood image, interior regime only
            t_star = phi - (1.0 - phi) * delta
            if 0.0 <= t_star and phi * (1.0 + delta) <= 1.0:
                ml = bern_prediction_ml(phi, delta)
                t = (1.0 - delta) * thetas
                with np.errstate(divide="ignore"):
                    g = phi * np.log(t + delta) + (1.0 - phi) * np.log1p(-t)
                kept = t[g >= g.max() - 1e-12]
                worst_ml = max(worst_ml, abs(ml.lo - kept.min()),
                               abs(ml.hi - (kept.max() + delta)))
                exact &= ml.lo == max(t_star, 0.0)
                exact &= ml.hi == min(phi + phi * delta, 1.0)
    for phi in (0.1, 0.5, 0.9):
        for n in (50, 200):
            for alpha in (0.05, 0.1):
                # Wilson endpoints vs direct root-finding on the score test
                from scipy.optimize import brentq
                z = normal_upper_quantile(alpha / 2.0)
                w_lo, w_hi = wilson_interval(phi, n, alpha)
                g = lambda p: n * (phi - p) ** 2 - z * z * p * (1.0 - p)
                c = (n * phi + z * z / 2.0) / (n + z * z)
                inv_lo = brentq(g, 0.0, c, xtol=1e-13)
                inv_hi = brentq(g, c, 1.0, xtol=1e-13)
                worst_wilson = max(worst_wilson, abs(w_lo - inv_lo),
                                   abs(w_hi - inv_hi))
                # finite-sample state interval == displayed transform
                k = round(phi * n)
                data = SampleData(sp, np.array([0] * k + [1] * (n - k)))
                fin = bern_theta_finite(data, 0.2, alpha)
                s_lo, s_hi = score_interval(k / n, n, z)
                exact &= fin.lo == max((s_lo - 0.2) / 0.8, 0.0)
                exact &= fin.hi == min(s_hi / 0.8, 1.0)
    elapsed = time.perf_counter() - t0
    ok = (worst_theta <= 2e-3 and worst_ml <= 2e-3
          and worst_wilson <= 1e-9 and exact and elapsed < 10.0)
    emit(capsys, 6, ok,
         f"closed forms vs brute force: state {worst_theta:.1e}, "
         f"ML {worst_ml:.1e} (both <= 2e-3); Wilson vs inversion "
         f"{worst_wilson:.1e} <= 1e-9; displayed formulas exact: {exact}; "
         f"runtime {elapsed:.1f}s < 10s")
    assert worst_theta <= 2e-3 and worst_ml <= 2e-3
    assert worst_wilson <= 1e-9
    assert exact
    assert elapsed < 10.0


def test_criterion_07_gaussian_coverage(capsys):
    report, elapsed = run('{"scenario": "gaussian_model", "seed": 1007}')
    check = report.checks[0]
    need = mc_threshold(0.99, 500)
    ok = check.passed and elapsed < 20.0
    emit(capsys, 7, ok,
         f"state coverage {check.observed:.4f} >= {need:.5f} at N=1e4, "
         f"eps=0.1, sigmas (0.5, 2); runtime {elapsed:.1f}s < 20s")
    assert check.passed
    assert elapsed < 20.0


@pytest.mark.xfail(strict=True, reason="posterior mass reaches 0.99 on the "
                   "wrong branch in ~84% of replications at N=300, not 95%")
def test_criterion_08_bayes_counterexample(capsys):
    report, elapsed = run('{"scenario": "bayes_counterexample", "seed": 1008}')
    by = {c.name: c for c in report.checks}
    prior = by["prior_expected_payoff"]
    conc = by["wrong_branch_concentration"]
    worse = by["concentration_implies_worse_choice"]
    need = mc_threshold(0.95, 500)
    ok = prior.passed and conc.passed and worse.passed and elapsed < 20.0
    emit(capsys, 8, ok,
         f"prior payoff {prior.observed!r} == 0.625 exact: {prior.passed}; "
         f"wrong-branch concentration {conc.observed:.4f} "
         f"(need >= {need:.5f}): {conc.passed}; concentrated reps all choose "
         f"x at 0.55 < 0.6: {worse.passed}; runtime {elapsed:.1f}s < 20s")
    assert prior.passed
    assert worse.passed
    assert elapsed < 20.0
    assert conc.passed


def test_criterion_09_regret_values(capsys):
    report, _ = run('{"scenario": "regret_example", "pstar": 0.62, '
                    '"seed": 1009}')
    by = {c.name: c for c in report.checks}
    names = ("initial_regret_f", "initial_regret_x", "updated_regret_f",
             "updated_regret_x", "choices_flip", "payoff_reversal")
    ok = all(by[n].passed for n in names)
    values = ", ".join(f"{by[n].observed:.15f}" for n in names[:4])
    emit(capsys, 9, ok,
         f"regret values ({values}) match (2/3, 1/3, 4/15, 1/3) to machine "
         f"precision; choice flip and payoff reversal at P*=0.62: "
         f"{by['choices_flip'].passed and by['payoff_reversal'].passed}")
    for n in names:
        assert by[n].passed, n


def test_criterion_10_determinism(capsys):
    configs = (
        '{"scenario": "illustrative", "n": 200, "reps": 50, "seed": 2001}',
        '{"scenario": "coverage", "n": 300, "reps": 100, "seed": 2002}',
        '{"scenario": "dominance", "reps": 10, "problems": 1000, "seed": 2003}',
        '{"scenario": "bayes_counterexample", "n": 150, "reps": 30, "seed": 2004}',
        '{"scenario": "regret_example", "seed": 2005}',
        '{"scenario": "bernoulli_model", "n": 200, "reps": 50, "seed": 2006}',
        '{"scenario": "gaussian_model", "n": 1000, "reps": 50, "seed": 2007}',
        '{"scenario": "theorem2_demo", "seed": 2008}',
    )
    stable = []
    for text in configs:
        cfg = parse_config(text)
        first = run_scenario(cfg)
        second = run_scenario(cfg)
        stable.append(first.to_json_text() == second.to_json_text()
                      and first.to_csv_text() == second.to_csv_text())
    ok = all(stable)
    emit(capsys, 10, ok,
         f"byte-identical reruns (JSON and CSV) for "
         f"{sum(stable)}/{len(configs)} scenarios")
    assert ok
