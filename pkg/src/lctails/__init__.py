"""Univariate log-concave maximum likelihood estimation with tail
diagnostics, optimality certificates and Monte Carlo experiment tooling."""

from .distributions import ReferenceDensity
from .lcmle import (
    LogConcaveFit,
    SolverConfig,
    SolverError,
    SortedSample,
    cdf_hat,
    eval_phi,
    eval_phi_rderiv,
    exp_linear_integral,
    fit_mle,
    kink_set,
    load_fit,
    mean_excess_emp,
    mean_excess_hat,
    save_fit,
)
from .tails import (
    CertificateReport,
    CertTolerances,
    TailBoundSpec,
    certify,
    chernov_H,
    chernov_tail_bound,
    doob_sup_bound,
    nu,
    prop1b_envelope,
    prop1c_envelope,
    prop2_threshold,
)

__version__ = "0.1.0"
