"""Acceptance suite.

One test per acceptance criterion; each prints a single PASS/FAIL line
(visible with pytest -v -s) and asserts the stated tolerance.
"""

import math

import numpy as np
import pytest

from lctails import (
    ReferenceDensity,
    SortedSample,
    certify,
    chernov_H,
    eval_phi,
    fit_mle,
    nu,
    prop1b_envelope,
    prop1c_envelope,
)
from lctails import lcmle
from lctails.oracle import brute_force_mle, mc_violation_rate
from lctails.simcli import SimulationConfig, _doob_mean_sup, simulate_quantiles, write_quantile_csv

FAMILIES = {
    "uniform": ReferenceDensity.uniform(),
    "gaussian": ReferenceDensity.gaussian(),
    "exponential": ReferenceDensity.exponential(),
    "logistic": ReferenceDensity.logistic(),
    "gamma": ReferenceDensity.gamma(2.0, 1.5),
}


def _line(name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[ACCEPT] {name}: {status} ({detail})")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def certificate_sweep():
    """100 random samples per family for n in {10, 100, 1000}."""
    reports, residuals = [], []
    for d in FAMILIES.values():
        for n in (10, 100, 1000):
            for seed in range(100):
                sample = d.sample(n, seed)
                fit = fit_mle(sample)
                reports.append(certify(fit, sample))
                residuals.append(fit.norm_residual)
    return reports, residuals


def test_certificate_suite(certificate_sweep):
    reports, _ = certificate_sweep
    worst1 = min(r.max_violation_char1 for r in reports)
    worst_eq = max(r.max_eq_residual_char1 for r in reports)
    worst2 = max(r.max_violation_char2 for r in reports)
    ok = all(r.passed for r in reports)
    _line("certificate suite (1500 fits)", ok and worst1 >= -1e-6
          and worst_eq <= 1e-6 and worst2 <= 1e-8,
          f"min slack {worst1:.2e}, max |eq| {worst_eq:.2e}, max cdf breach {worst2:.2e}")


def test_normalization(certificate_sweep):
    _, residuals = certificate_sweep
    worst = max(residuals)
    _line("normalization |integral - 1|", worst <= 1e-8, f"max {worst:.2e}")


def test_two_point_closed_form():
    worst_slope, worst_value = 0.0, 0.0
    rng = np.random.default_rng(0)
    for _ in range(20):
        pts = np.sort(rng.normal(size=2) * rng.uniform(0.1, 10.0))
        fit = fit_mle(SortedSample.from_data(pts))
        worst_slope = max(worst_slope, abs(float(fit.slopes[0])))
        worst_value = max(worst_value,
                          abs(float(fit.values[0]) + math.log(pts[1] - pts[0])))
    _line("n=2 closed form", worst_slope < 1e-6 and worst_value < 1e-6,
          f"max |slope| {worst_slope:.2e}, max value error {worst_value:.2e}")


def test_oracle_equivalence():
    fams = list(FAMILIES.values())
    worst_gap, worst_sup = -np.inf, 0.0
    for i in range(50):
        d = fams[i % len(fams)]
        sample = d.sample(2 + i % 4, 100 + i)
        fit = fit_mle(sample)
        ora = brute_force_mle(sample)
        worst_gap = max(worst_gap, ora.loglik - fit.loglik)
        grid = np.linspace(sample.values[0], sample.values[-1], 400)
        sup = float(np.max(np.abs(eval_phi(fit, grid)
                                  - np.interp(grid, ora.grid, ora.phi))))
        worst_sup = max(worst_sup, sup)
    _line("oracle equivalence (50 tiny samples)",
          worst_gap <= 1e-6 and worst_sup <= 1e-3,
          f"max oracle-fit loglik gap {worst_gap:.2e}, max sup diff {worst_sup:.2e}")


def test_nu_identities():
    e0 = abs(nu(0.0) - 0.5)
    grid = np.array([-50.0, -10.0, -1.0, -0.01, 1e-5, 0.01, 1.0, 10.0, 50.0])
    sym = float(np.max(np.abs(nu(grid) + nu(-grid) - 1.0)))
    h = 1e-6
    deriv = abs((nu(h) - nu(-h)) / (2.0 * h) - 1.0 / 12.0)
    _line("nu identities", e0 <= 1e-12 and sym <= 1e-10 and deriv <= 1e-6,
          f"nu(0) err {e0:.1e}, symmetry {sym:.1e}, nu'(0) err {deriv:.1e}")


def test_H_inequalities():
    r = np.linspace(0.0, 100.0, 200)
    lhs = chernov_H(np.sqrt(2.0 * r) + r)
    ok_r = bool(np.all(lhs >= r - 1e-12))
    eps = np.linspace(1e-4, 1.0 - 1e-4, 200)
    ok_e = bool(np.all(chernov_H(-eps) >= chernov_H(eps)))
    _line("H inequalities", ok_r and ok_e,
          f"H(sqrt(2r)+r)>=r: {ok_r}, H(-e)>=H(e): {ok_e}")


def test_prop1_envelopes():
    worst = 0.0
    for d in FAMILIES.values():
        a, b = d.support
        lo = float(d.quantile(0.01))
        hi = float(d.quantile(0.99))
        if not np.isfinite(b):
            # the unbounded-support envelope needs a falling log-density
            while not d.log_density_rderiv(lo) < 0:
                lo = 0.5 * (lo + hi)
        for x in np.linspace(lo, hi, 50):
            mu = float(d.mean_excess(x))
            env_lo, env_hi = (prop1b_envelope(d, x) if np.isfinite(b)
                              else prop1c_envelope(d, x))
            worst = max(worst, env_lo - mu, mu - env_hi)
    gauss_tail = float(FAMILIES["gaussian"].mean_excess(10.0)) * 10.0
    _line("proposition 1 envelopes", worst <= 1e-8
          and 0.98 < gauss_tail <= 1.0,
          f"max envelope breach {worst:.2e}, gaussian mu(10)*10 = {gauss_tail:.5f}")


def test_prop2_monte_carlo():
    rate = mc_violation_rate(FAMILIES["exponential"], 100, 2.0, 2000, 0)
    _line("proposition 2 Monte Carlo", rate <= 0.02,
          f"violation rate {rate:.4f} <= 0.02")


def test_chernov_one_sided():
    n, reps = 50, 5000
    rng = np.random.default_rng(1)
    means = rng.exponential(size=(reps, n)).mean(axis=1)
    ok = True
    details = []
    for eps in (0.1, 0.3, 0.5):
        for sign, obs in (("+", float(np.mean(means >= 1.0 + eps))),
                          ("-", float(np.mean(means <= 1.0 - eps)))):
            bound = math.exp(-n * chernov_H(eps if sign == "+" else -eps))
            sigma = math.sqrt(max(bound * (1.0 - bound), 1e-12) / reps)
            ok = ok and obs <= bound + 3.0 * sigma
            details.append(f"{sign}{eps}: {obs:.4f}<={bound + 3 * sigma:.4f}")
    _line("Chernov one-sided exponential", ok, "; ".join(details))


def test_doob_bound():
    d = FAMILIES["uniform"]
    mean_sup = _doob_mean_sup(d, 200, float(d.quantile(0.9)), 2000, 0)
    _line("Doob supremum bound", mean_sup <= 0.2,
          f"mean sup-square {mean_sup:.4f} <= 0.2")


def _median_over_reps(d, n, reps, seed, stat):
    vals = np.empty(reps)
    for r in range(reps):
        fit = fit_mle(d.sample(n, seed + r))
        vals[r] = stat(fit)
    return float(np.median(vals))


def test_theorem1_shape():
    reps = 200
    details = []
    ok = True
    for name in ("uniform", "gaussian"):
        d = FAMILIES[name]
        grid = np.linspace(float(d.quantile(0.001)), float(d.quantile(0.999)), 120)
        f_true = np.exp(d.log_density(grid))

        def sup_over(fit):
            f_hat = np.exp(eval_phi(fit, grid))
            return float(np.max(np.maximum(f_hat - f_true, 0.0)))

        small = _median_over_reps(d, 150, reps, 10_000, sup_over)
        big = _median_over_reps(d, 2000, reps, 20_000, sup_over)
        ok = ok and big < small
        details.append(f"{name}: {small:.4f} -> {big:.4f}")
    _line("theorem 1 shape (median sup (f_hat - f)+ decreases)", ok,
          "; ".join(details))


def test_theorem2_shape():
    d = FAMILIES["uniform"]
    reps = 200
    meds = []
    for n in (200, 2000):
        b_n = float(d.quantile(1.0 - n ** -0.25))
        grid = np.linspace(0.1, b_n, 150)

        def sup_err(fit):
            return float(np.max(np.abs(eval_phi(fit, grid))))

        meds.append(_median_over_reps(d, n, reps, 30_000, sup_err))
    _line("theorem 2 shape (uniform sup |phi_hat - phi| decreases)",
          meds[1] < meds[0], f"{meds[0]:.4f} -> {meds[1]:.4f}")


def test_theorem3_shape():
    d = FAMILIES["logistic"]
    reps = 200
    errs = []
    for n in (200, 2000):
        b_n = float(d.quantile(1.0 - n ** -0.5))

        def slope_at(fit):
            return float(lcmle._phi_rderiv_raw(fit, np.array([b_n]))[0])

        med = _median_over_reps(d, n, reps, 40_000, slope_at)
        errs.append(abs(med + 1.0))
    _line("theorem 3 shape (logistic slope at b_n approaches -1)",
          errs[1] < errs[0], f"|median slope + 1|: {errs[0]:.4f} -> {errs[1]:.4f}")


def test_determinism_across_threads(tmp_path):
    cfg1 = SimulationConfig(family="uniform", n=100, reps=60, grid_lo=0.1,
                            grid_hi=0.9, grid_step=0.2, seed=4, threads=1)
    cfg4 = SimulationConfig(family="uniform", n=100, reps=60, grid_lo=0.1,
                            grid_hi=0.9, grid_step=0.2, seed=4, threads=4)
    p1, p4 = tmp_path / "t1.csv", tmp_path / "t4.csv"
    for cfg, p in ((cfg1, p1), (cfg4, p4)):
        _, rows, _ = simulate_quantiles(cfg)
        write_quantile_csv(rows, p)
    _line("determinism across thread counts",
          p1.read_bytes() == p4.read_bytes(), "1 vs 4 threads byte-identical")
