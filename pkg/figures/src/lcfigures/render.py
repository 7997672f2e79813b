"""Figure rendering: quantile-band panels and single-fit panels.

Plotted band data are taken verbatim from the CSV (infinite values are
kept in the line data and fall outside the axis limits, which are set
from the finite portion only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import FitCurve, QuantileTable, SchemaError, read_fit_file, read_quantile_csv, read_sample_file
from .truth import log_density, log_density_deriv

__all__ = ["FigureSpec", "render_quantile_figure", "render_fit_figure"]

_TRUTH_STYLE = {"color": "red", "linewidth": 1.2, "zorder": 5}


@dataclass(frozen=True)
class FigureSpec:
    """Inputs of one figure: CSV rows (label, path), the family for the
    truth overlay, and the output image path."""

    csv_paths: tuple          # ((label, path), ...); one figure row each
    family: str
    params: tuple = ()
    out_path: str = "figure.png"
    gammas: tuple | None = None   # subset to draw; None = all in the CSV


def _finite_limits(values: np.ndarray, pad: float = 0.05):
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise SchemaError("column 'value' contains no finite entries")
    lo, hi = float(np.min(finite)), float(np.max(finite))
    span = (hi - lo) or 1.0
    return lo - pad * span, hi + pad * span


def _draw_bands(ax, table: QuantileTable, stat: str, gammas) -> list:
    lines = []
    for g in gammas:
        x, v = table.series(stat, g)
        (line,) = ax.plot(x, v, linewidth=0.9, label=f"{g:g}")
        lines.append(line)
    vals = table.value[table.stat == stat]
    ax.set_ylim(*_finite_limits(vals))
    return lines


def render_quantile_figure(spec: FigureSpec) -> str:
    """Render one 2-panel row per CSV: log-density quantile bands on the
    left, right-derivative bands on the right, truth overlaid in red.
    Returns the output path."""
    rows = list(spec.csv_paths)
    if not rows:
        raise SchemaError("no CSV inputs")
    fig, axes = plt.subplots(len(rows), 2, squeeze=False,
                             figsize=(9.6, 3.2 * len(rows)))
    for i, (label, path) in enumerate(rows):
        table = read_quantile_csv(path)
        gammas = spec.gammas if spec.gammas is not None else tuple(table.gammas())
        if not gammas:
            raise SchemaError("empty gamma subset")
        ax_phi, ax_dphi = axes[i]
        _draw_bands(ax_phi, table, "phi", gammas)
        _draw_bands(ax_dphi, table, "phiprime", gammas)
        grid = table.grid()
        dense = np.linspace(grid[0], grid[-1], 400)
        ax_phi.plot(dense, log_density(spec.family, dense, spec.params), **_TRUTH_STYLE)
        ax_dphi.plot(dense, log_density_deriv(spec.family, dense, spec.params), **_TRUTH_STYLE)
        ax_phi.set_ylabel(label)
        if i == 0:
            ax_phi.set_title("log-density quantile bands")
            ax_dphi.set_title("right-derivative quantile bands")
            ax_phi.legend(fontsize=7, title="level", title_fontsize=7)
    for ax in axes[-1]:
        ax.set_xlabel("x")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=130)
    plt.close(fig)
    return spec.out_path


def _step_series(fit: FitCurve):
    """(x, y) pairs tracing the piecewise-constant right derivative."""
    return np.repeat(fit.knots, 2)[1:-1], np.repeat(fit.slope_right[:-1], 2)


def render_fit_figure(fit_path, sample_path, spec: FigureSpec) -> str:
    """Render a single fit: the piecewise-linear log-density with a rug of
    the sample on the left, its step right-derivative on the right, truth
    in red.  Returns the output path."""
    fit = read_fit_file(fit_path)
    sample = read_sample_file(sample_path)
    fig, (ax_phi, ax_dphi) = plt.subplots(1, 2, figsize=(9.6, 3.4))
    ax_phi.plot(fit.knots, fit.phi, linewidth=1.1, label="estimate")
    lo, hi = _finite_limits(fit.phi, pad=0.1)
    ax_phi.plot(sample, np.full(sample.size, lo), linestyle="none",
                marker="|", markersize=6, color="black", alpha=0.6)
    dense = np.linspace(fit.knots[0], fit.knots[-1], 400)
    ax_phi.plot(dense, log_density(spec.family, dense, spec.params), **_TRUTH_STYLE)
    ax_phi.set_ylim(lo - 0.05 * (hi - lo), hi)
    ax_phi.set_title("fitted log-density")
    ax_phi.set_xlabel("x")
    ax_phi.legend(fontsize=7)
    sx, sy = _step_series(fit)
    ax_dphi.plot(sx, sy, linewidth=1.1)
    ax_dphi.plot(dense, log_density_deriv(spec.family, dense, spec.params), **_TRUTH_STYLE)
    ax_dphi.set_ylim(*_finite_limits(fit.slope_right[:-1], pad=0.1))
    ax_dphi.set_title("right derivative")
    ax_dphi.set_xlabel("x")
    fig.tight_layout()
    fig.savefig(spec.out_path, dpi=130)
    plt.close(fig)
    return spec.out_path
