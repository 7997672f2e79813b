"""Command-line harness for the quantile-band experiments, tail-inequality
validations and certificate sweeps.  Emits CSV artifacts.

Subcommands: fit, simulate, tailprob, verify.
Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lcmle, oracle, tails
from .distributions import FAMILIES, ReferenceDensity

DEFAULT_GAMMAS = (0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)


@dataclass(frozen=True)
class SimulationConfig:
    family: str = "uniform"
    family_kwargs: dict = field(default_factory=dict)
    n: int = 150
    reps: int = 1000
    grid_lo: float = 0.0
    grid_hi: float = 1.0
    grid_step: float = 0.05
    gammas: tuple = DEFAULT_GAMMAS
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        g = np.asarray(self.gammas)
        if g.size == 0 or np.any(np.diff(g) <= 0) or np.any(g <= 0) or np.any(g >= 1):
            raise ValueError("gammas must be strictly increasing in (0, 1)")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.grid_hi < self.grid_lo or self.grid_step <= 0:
            raise ValueError("grid must be non-empty")

    def density(self) -> ReferenceDensity:
        return ReferenceDensity.from_name(self.family, **self.family_kwargs)

    def grid(self) -> np.ndarray:
        count = int(math.floor((self.grid_hi - self.grid_lo) / self.grid_step + 1e-9)) + 1
        return self.grid_lo + self.grid_step * np.arange(count)


def _format(v: float) -> str:
    if v == -np.inf:
        return "-inf"
    if v == np.inf:
        return "inf"
    return repr(float(v))


def _simulate_one(args):
    """One replication: sample, fit, evaluate on the grid.

    Uses seed + replication index, so results do not depend on how the
    replications are split across workers.
    """
    family, family_kwargs, n, seed, rep, grid = args
    d = ReferenceDensity.from_name(family, **family_kwargs)
    sample = d.sample(n, seed + rep)
    try:
        fit = lcmle.fit_mle(sample)
    except lcmle.SolverError:
        return rep, None, None
    phi = lcmle.eval_phi(fit, grid)
    dphi = lcmle._phi_rderiv_raw(fit, grid)
    return rep, phi, dphi


def _empirical_quantile(sorted_vals: np.ndarray, gamma: float) -> float:
    r = sorted_vals.size
    k = min(max(int(math.ceil(gamma * r)), 1), r) - 1
    return sorted_vals[k]


def simulate_quantiles(cfg: SimulationConfig):
    """Run the replication loop and return (grid, rows) where rows follow
    the long CSV schema x,stat,gamma,value,n_minus_inf."""
    grid = cfg.grid()
    tasks = [(cfg.family, cfg.family_kwargs, cfg.n, cfg.seed, r, grid) for r in range(cfg.reps)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_simulate_one, tasks, chunksize=max(1, cfg.reps // (4 * cfg.threads))))
    else:
        results = [_simulate_one(t) for t in tasks]
    results.sort(key=lambda t: t[0])
    failures = sum(1 for _, phi, _ in results if phi is None)
    if failures > 0.01 * cfg.reps:
        raise RuntimeError(f"{failures}/{cfg.reps} replications failed to converge")
    phis = np.array([phi for _, phi, _ in results if phi is not None])
    dphis = np.array([dphi for _, _, dphi in results if dphi is not None])
    n_minus_inf = np.sum(phis == -np.inf, axis=0)
    rows = []
    for j, x in enumerate(grid):
        for stat, mat in (("phi", phis), ("phiprime", dphis)):
            col = np.sort(mat[:, j])
            for g in cfg.gammas:
                rows.append((x, stat, g, _empirical_quantile(col, g), int(n_minus_inf[j])))
    return grid, rows, failures


def write_quantile_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write("x,stat,gamma,value,n_minus_inf\n")
        for x, stat, g, v, nmi in rows:
            fh.write(f"{_format(x)},{stat},{_format(g)},{_format(v)},{nmi}\n")


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_fit(input_path: str, output_path: str) -> int:
    try:
        with open(input_path) as fh:
            data = [float(line) for line in fh if line.strip()]
    except (OSError, ValueError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return 1
    if len(data) < 2:
        print("error: at least 2 observations are required", file=sys.stderr)
        return 1
    sample = lcmle.SortedSample.from_data(data)
    try:
        fit = lcmle.fit_mle(sample)
    except lcmle.SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    lcmle.save_fit(fit, output_path)
    report = tails.certify(fit, sample)
    cert_path = output_path + ".cert.csv"
    with open(cert_path, "w") as fh:
        fh.write("max_violation_char1,max_eq_residual_char1,max_violation_char2,pass\n")
        fh.write(report.to_csv_row() + "\n")
    print(f"fit written to {output_path}; certificate to {cert_path}")
    return 0 if report.passed else 2


def cmd_simulate(cfg: SimulationConfig, output_path: str) -> int:
    try:
        _, rows, failures = simulate_quantiles(cfg)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    write_quantile_csv(rows, output_path)
    print(f"quantile grid written to {output_path} ({cfg.reps - failures} replications)")
    return 0


def cmd_tailprob(family: str, n: int, tau: float, reps: int, seed: int,
                 output_path: str, family_kwargs: dict | None = None) -> int:
    d = ReferenceDensity.from_name(family, **(family_kwargs or {}))
    rate = oracle.mc_violation_rate(d, n, tau, reps, seed)
    union_bound = 2.0 * n ** (1.0 - tau)
    lines = ["check,eps,observed,bound"]
    lines.append(f"prop2_union,,{rate!r},{union_bound!r}")
    # one-sided exceedance rates of the mean-excess ratio at the origin for
    # the exponential case (memoryless, so the origin is representative)
    if family == "exponential":
        lam = d.params[0]
        eps_grid = (0.0, 0.1, 0.2, 0.3, 0.5)
        devs = np.empty(reps)
        for r in range(reps):
            rng = np.random.default_rng(seed + r)
            u = np.clip(rng.random(n), 1e-16, 1.0 - 1e-16)
            x = d.quantile(u)
            devs[r] = float(np.mean(x)) * lam - 1.0
        for eps in eps_grid:
            up = float(np.mean(devs >= eps))
            dn = float(np.mean(-devs >= eps))
            lines.append(f"chernov_plus,{eps!r},{up!r},{tails.chernov_tail_bound(n, eps)!r}")
            lines.append(f"chernov_minus,{eps!r},{dn!r},{tails.chernov_tail_bound(n, -eps)!r}")
    with open(output_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"tail probability table written to {output_path}")
    return 0


def _doob_mean_sup(d: ReferenceDensity, n: int, b: float, reps: int, seed: int) -> float:
    """Monte Carlo mean of sup_{x<=b} |(F_emp - F)/(1 - F)|^2."""
    f_b = d.cdf(b)
    sups = np.empty(reps)
    for r in range(reps):
        rng = np.random.default_rng(seed + r)
        u = np.clip(rng.random(n), 1e-16, 1.0 - 1e-16)
        x = np.sort(d.quantile(u))
        xb = x[x <= b]
        fx = np.asarray(d.cdf(xb))
        i = np.arange(1, xb.size + 1)
        hi = np.abs((i / n - fx) / (1.0 - fx))
        loi = np.abs(((i - 1) / n - fx) / (1.0 - fx))
        at_b = abs((xb.size / n - f_b) / (1.0 - f_b))
        vals = np.concatenate((hi, loi, [at_b]))
        sups[r] = float(np.max(vals)) ** 2 if vals.size else 0.0
    return float(np.mean(sups))


def cmd_verify(seed: int, output_path: str) -> int:
    rows = []

    def check(suite, detail, value, bound, ok):
        rows.append((suite, detail, value, bound, bool(ok)))

    # nu identities
    check("nu", "nu(0)=1/2", tails.nu(0.0), 0.5, abs(tails.nu(0.0) - 0.5) <= 1e-12)
    sym = max(abs(tails.nu(t) + tails.nu(-t) - 1.0) for t in (0.001, 0.1, 1.0, 10.0, 50.0))
    check("nu", "symmetry", sym, 1e-10, sym <= 1e-10)
    h = 1e-6
    d0 = (tails.nu(h) - tails.nu(-h)) / (2.0 * h)
    check("nu", "nu'(0)=1/12", d0, 1.0 / 12.0, abs(d0 - 1.0 / 12.0) <= 1e-6)
    # H inequalities
    rgrid = np.linspace(0.0, 100.0, 200)
    hineq = np.all(tails.chernov_H(np.sqrt(2.0 * rgrid) + rgrid) >= rgrid - 1e-12)
    check("H", "H(sqrt(2r)+r)>=r", float(hineq), 1.0, hineq)
    eg = np.linspace(0.01, 0.99, 50)
    hmono = np.all(tails.chernov_H(-eg) >= tails.chernov_H(eg))
    check("H", "H(-e)>=H(e)", float(hmono), 1.0, hmono)
    # envelopes
    for family, kwargs in (("uniform", {}), ("gaussian", {}), ("logistic", {}),
                           ("exponential", {}), ("gamma", {"shape": 2.0})):
        d = ReferenceDensity.from_name(family, **kwargs)
        worst = 0.0
        for x in np.linspace(*_envelope_grid(d), 50):
            if np.isfinite(d.support[1]):
                lo, hi = tails.prop1b_envelope(d, x)
            else:
                if not d.log_density_rderiv(x) < 0:
                    continue
                lo, hi = tails.prop1c_envelope(d, x)
            mu = d.mean_excess(x)
            worst = max(worst, lo - mu, mu - hi)
        check("envelope", family, worst, 1e-8, worst <= 1e-8)
    # certificates on fresh random fits
    rng_seeds = [seed + 1000 + i for i in range(6)]
    ok_all = True
    worst = 0.0
    for i, s in enumerate(rng_seeds):
        d = ReferenceDensity.from_name(FAMILIES[i % len(FAMILIES)],
                                       **({"shape": 2.0} if FAMILIES[i % len(FAMILIES)] == "gamma" else {}))
        sample = d.sample(100, s)
        fit = lcmle.fit_mle(sample)
        rep = tails.certify(fit, sample)
        ok_all &= rep.passed
        worst = max(worst, -rep.max_violation_char1, rep.max_eq_residual_char1, rep.max_violation_char2)
    check("certificate", "random fits", worst, 1e-6, ok_all)
    # Doob bound
    d = ReferenceDensity.uniform()
    b = d.quantile(0.9)
    mean_sup = _doob_mean_sup(d, 200, b, 2000, seed)
    bound = tails.doob_sup_bound(200, 0.9)
    check("doob", "uniform n=200", mean_sup, bound, mean_sup <= bound)
    with open(output_path, "w") as fh:
        fh.write("suite,detail,value,bound,pass\n")
        for suite, detail, value, bound_, ok in rows:
            fh.write(f"{suite},{detail},{float(value)!r},{float(bound_)!r},{int(ok)}\n")
    failed = [r for r in rows if not r[4]]
    print(f"verify: {len(rows) - len(failed)}/{len(rows)} suites passed; table at {output_path}")
    return 0 if not failed else 2


def _envelope_grid(d: ReferenceDensity):
    a_o, b_o = d.support
    if d.family == "uniform":
        return a_o, b_o - 1e-3
    if d.family == "gaussian":
        return 0.1, 6.0
    if d.family == "logistic":
        return 0.1, 10.0
    if d.family == "exponential":
        return 0.0, 5.0
    # gamma with shape k: phi' < 0 needs x > (k-1)/rate
    k, lam = d.params
    return (k - 1.0) / lam + 0.1, (k - 1.0) / lam + 8.0


# ---------------------------------------------------------------------------
# Argument parsing.


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_grid(text: str):
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be lo:hi:step")
    return lo, hi, step


def _family_kwargs(args) -> dict:
    kw = {}
    if args.family == "gamma":
        kw["shape"] = args.shape
        kw["rate"] = args.rate
    elif args.family == "exponential":
        kw["rate"] = args.rate
    return kw


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lctails", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit one sample (one value per line)")
    p_fit.add_argument("input")
    p_fit.add_argument("--out", required=True)

    p_sim = sub.add_parser("simulate", help="Monte Carlo quantile bands")
    p_sim.add_argument("--family", choices=FAMILIES, default="uniform")
    p_sim.add_argument("--shape", type=float, default=2.0)
    p_sim.add_argument("--rate", type=float, default=1.0)
    p_sim.add_argument("--n", type=int, default=150)
    p_sim.add_argument("--reps", type=int, default=1000)
    p_sim.add_argument("--grid", type=_parse_grid, default=(0.0, 1.0, 0.05))
    p_sim.add_argument("--gammas", type=float, nargs="+", default=list(DEFAULT_GAMMAS))
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--threads", type=int, default=1)
    p_sim.add_argument("--out", required=True)

    p_tail = sub.add_parser("tailprob", help="tail inequality validation")
    p_tail.add_argument("--family", choices=FAMILIES, default="exponential")
    p_tail.add_argument("--shape", type=float, default=2.0)
    p_tail.add_argument("--rate", type=float, default=1.0)
    p_tail.add_argument("--n", type=int, default=100)
    p_tail.add_argument("--tau", type=float, default=2.0)
    p_tail.add_argument("--reps", type=int, default=2000)
    p_tail.add_argument("--seed", type=int, default=0)
    p_tail.add_argument("--out", required=True)

    p_ver = sub.add_parser("verify", help="run the property battery")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "fit":
            return cmd_fit(args.input, args.out)
        if args.command == "simulate":
            lo, hi, step = args.grid
            cfg = SimulationConfig(
                family=args.family,
                family_kwargs=_family_kwargs(args),
                n=args.n,
                reps=args.reps,
                grid_lo=lo,
                grid_hi=hi,
                grid_step=step,
                gammas=tuple(args.gammas),
                seed=args.seed,
                threads=args.threads,
            )
            return cmd_simulate(cfg, args.out)
        if args.command == "tailprob":
            return cmd_tailprob(args.family, args.n, args.tau, args.reps,
                                args.seed, args.out, _family_kwargs(args))
        if args.command == "verify":
            return cmd_verify(args.seed, args.out)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeError, lcmle.SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
