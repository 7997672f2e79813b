"""Figure rendering for log-concave density estimation artifacts."""

from .io import FitCurve, QuantileTable, SchemaError, read_fit_file, read_quantile_csv, read_sample_file
from .render import FigureSpec, render_fit_figure, render_quantile_figure
from .truth import log_density, log_density_deriv

__version__ = "0.1.0"
