"""Figure rendering for bwpc result CSVs."""

from .render import load_table, render
from .specs import PRESETS, EmptyDataError, FigureSpec, MissingColumnError

__version__ = "0.1.0"
