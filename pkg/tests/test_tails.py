"""Unit tests for tail diagnostics, bounds and certificates."""

import dataclasses
import math

import numpy as np
import pytest

from lctails import (
    CertificateReport,
    ReferenceDensity,
    TailBoundSpec,
    certify,
    chernov_H,
    chernov_tail_bound,
    doob_sup_bound,
    fit_mle,
    nu,
    prop1b_envelope,
    prop1c_envelope,
    prop2_threshold,
)
from lctails.oracle import adaptive_quadrature


def test_nu_special_values():
    assert nu(0.0) == 0.5
    assert nu(np.inf) == 1.0
    assert nu(-np.inf) == 0.0
    assert abs(nu(1.0) - (math.e * 0.0 + 1.0) / (1.0 * (math.e - 1.0))) < 1e-12


def test_nu_matches_quadrature():
    for t in (-30.0, -2.0, -1e-3, 1e-5, 0.5, 8.0, 100.0):
        num = adaptive_quadrature(lambda u: u * math.exp(t * u), 0.0, 1.0)
        den = adaptive_quadrature(lambda u: math.exp(t * u), 0.0, 1.0)
        assert abs(nu(t) - num / den) < 1e-9


def test_nu_monotone_and_symmetric():
    ts = np.linspace(-50, 50, 401)
    vals = nu(ts)
    assert np.all(np.diff(vals) > 0)
    assert np.max(np.abs(vals + nu(-ts) - 1.0)) < 1e-10


def test_chernov_H():
    assert chernov_H(0.0) == 0.0
    assert chernov_H(-1.0) == np.inf
    assert chernov_H(-2.0) == np.inf
    assert abs(chernov_H(1.0) - (1.0 - math.log(2.0))) < 1e-14
    assert np.all(chernov_H(np.array([-0.5, 0.5, 2.0])) > 0)


def test_chernov_tail_bound():
    assert abs(chernov_tail_bound(10, 0.3) - math.exp(-10 * chernov_H(0.3))) < 1e-15
    assert chernov_tail_bound(10, -0.3) == math.exp(-10 * chernov_H(-0.3))
    assert chernov_tail_bound(10, 0.3, two_sided=True) == 2.0 * chernov_tail_bound(10, 0.3)
    assert chernov_tail_bound(5, 0.0) == 1.0


def test_tail_bound_spec_validation():
    with pytest.raises(ValueError):
        TailBoundSpec(n=10, k=0, tau=2.0)
    with pytest.raises(ValueError):
        TailBoundSpec(n=10, k=10, tau=2.0)
    with pytest.raises(ValueError):
        TailBoundSpec(n=10, k=5, tau=1.0)


def test_prop2_threshold_formula():
    spec = TailBoundSpec(n=100, k=40, tau=2.0)
    r = 2.0 * math.log(100) / 60.0
    assert abs(prop2_threshold(spec) - (math.sqrt(2 * r) + r)) < 1e-15


def test_doob_sup_bound():
    assert abs(doob_sup_bound(200, 0.9) - 0.2) < 1e-12
    with pytest.raises(ValueError):
        doob_sup_bound(100, 1.0)


def test_prop1b_requires_bounded_support():
    with pytest.raises(ValueError):
        prop1b_envelope(ReferenceDensity.gaussian(), 0.0)
    lo, hi = prop1b_envelope(ReferenceDensity.uniform(), 0.4)
    assert lo <= 0.3 <= hi


def test_prop1c_requires_unbounded_support():
    with pytest.raises(ValueError):
        prop1c_envelope(ReferenceDensity.uniform(), 0.4)
    d = ReferenceDensity.exponential(2.0)
    lo, hi = prop1c_envelope(d, 1.0)
    assert lo <= 0.5 <= hi


def test_certificate_roundtrip_csv():
    rep = CertificateReport(-1e-12, 2e-12, 0.0, True)
    back = CertificateReport.from_csv_row(rep.to_csv_row())
    assert back == rep


def test_certify_passes_on_fresh_fit():
    d = ReferenceDensity.gaussian()
    s = d.sample(150, 13)
    fit = fit_mle(s)
    rep = certify(fit, s)
    assert rep.passed
    assert rep.max_violation_char1 >= -1e-6
    assert rep.max_eq_residual_char1 <= 1e-6
    assert rep.max_violation_char2 <= 1e-8


def test_certify_detects_tampering():
    d = ReferenceDensity.gaussian()
    s = d.sample(150, 13)
    fit = fit_mle(s)
    values = fit.values.copy()
    values[0] += 0.05
    bad = dataclasses.replace(fit, values=values)
    assert not certify(bad, s).passed


def test_certify_rejects_unconverged():
    d = ReferenceDensity.gaussian()
    s = d.sample(50, 1)
    fit = fit_mle(s)
    bad = dataclasses.replace(fit, converged=False)
    with pytest.raises(ValueError):
        certify(bad, s)
