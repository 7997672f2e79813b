"""Parsers for the artifacts produced by the estimation CLI.

Two formats are read: the long-format quantile CSV with header
``x,stat,gamma,value,n_minus_inf`` (stat is ``phi`` or ``phiprime``, the
tokens ``-inf``/``inf`` denote infinite values) and the tab-separated fit
file whose first line is a ``#`` header followed by ``x phi slope_right``
rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["QuantileTable", "FitCurve", "SchemaError",
           "read_quantile_csv", "read_fit_file", "read_sample_file"]

_QUANTILE_HEADER = ("x", "stat", "gamma", "value", "n_minus_inf")
_STATS = ("phi", "phiprime")


class SchemaError(ValueError):
    """Input does not match the expected artifact schema."""


@dataclass(frozen=True)
class QuantileTable:
    """Parsed long-format quantile grid."""

    x: np.ndarray          # row-wise grid value
    stat: np.ndarray       # row-wise "phi" / "phiprime"
    gamma: np.ndarray      # row-wise quantile level
    value: np.ndarray      # row-wise quantile value (may be +-inf)
    n_minus_inf: np.ndarray

    def gammas(self) -> np.ndarray:
        return np.unique(self.gamma)

    def grid(self) -> np.ndarray:
        return np.unique(self.x)

    def series(self, stat: str, gamma: float):
        """(x, value) for one band, ordered by x."""
        mask = (self.stat == stat) & (self.gamma == gamma)
        if not mask.any():
            raise SchemaError(f"no rows for stat={stat!r}, gamma={gamma!r}")
        order = np.argsort(self.x[mask], kind="stable")
        return self.x[mask][order], self.value[mask][order]


@dataclass(frozen=True)
class FitCurve:
    """Parsed single-fit file: knots, log-density values, right slopes."""

    knots: np.ndarray
    phi: np.ndarray
    slope_right: np.ndarray   # one per knot; -inf after the last knot
    n_obs: int
    converged: bool


def _parse_float(token: str, column: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise SchemaError(
            f"line {line_no}: column {column!r} is not a number: {token!r}"
        ) from None


def read_quantile_csv(path) -> QuantileTable:
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise SchemaError("empty quantile CSV")
    header = tuple(lines[0].split(","))
    if header != _QUANTILE_HEADER:
        missing = [c for c in _QUANTILE_HEADER if c not in header]
        name = missing[0] if missing else header[0]
        raise SchemaError(f"bad quantile CSV header: missing or misplaced column {name!r}")
    xs, stats, gammas, values, nmis = [], [], [], [], []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise SchemaError(f"line {i}: expected 5 columns, got {len(parts)}")
        xs.append(_parse_float(parts[0], "x", i))
        if parts[1] not in _STATS:
            raise SchemaError(f"line {i}: column 'stat' must be phi or phiprime, got {parts[1]!r}")
        stats.append(parts[1])
        g = _parse_float(parts[2], "gamma", i)
        if not 0.0 < g < 1.0:
            raise SchemaError(f"line {i}: column 'gamma' out of (0, 1): {g!r}")
        gammas.append(g)
        values.append(_parse_float(parts[3], "value", i))
        try:
            nmis.append(int(parts[4]))
        except ValueError:
            raise SchemaError(
                f"line {i}: column 'n_minus_inf' is not an integer: {parts[4]!r}"
            ) from None
    return QuantileTable(
        x=np.array(xs), stat=np.array(stats), gamma=np.array(gammas),
        value=np.array(values), n_minus_inf=np.array(nmis, dtype=int),
    )


def read_fit_file(path) -> FitCurve:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise SchemaError("fit file must start with a '#' header line")
        meta = dict(tok.split("=", 1) for tok in header[1:].split() if "=" in tok)
        if "n" not in meta or "converged" not in meta:
            raise SchemaError("fit header is missing column 'n' or 'converged'")
        columns = fh.readline().split()
        if columns != ["x", "phi", "slope_right"]:
            raise SchemaError(f"bad fit column line: {columns!r}")
        rows = [line.split("\t") for line in fh if line.strip()]
    if len(rows) < 2:
        raise SchemaError("fit file needs at least two knots")
    knots = np.array([_parse_float(r[0], "x", i + 3) for i, r in enumerate(rows)])
    phi = np.array([_parse_float(r[1], "phi", i + 3) for i, r in enumerate(rows)])
    slopes = np.array([_parse_float(r[2], "slope_right", i + 3) for i, r in enumerate(rows)])
    return FitCurve(knots=knots, phi=phi, slope_right=slopes,
                    n_obs=int(meta["n"]), converged=bool(int(meta["converged"])))


def read_sample_file(path) -> np.ndarray:
    """One real per line, as accepted by the fit subcommand."""
    with open(path) as fh:
        vals = [_parse_float(line.strip(), "sample", i + 1)
                for i, line in enumerate(fh) if line.strip()]
    return np.sort(np.array(vals))
