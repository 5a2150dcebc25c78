"""Figure rendering for coolsim scenario outputs (CSV + manifest in,
images out; no recomputation)."""

__version__ = "0.1.0"

from .render import FigureJob, render
from .schemas import SCENARIO_SCHEMAS, SchemaMismatchError, Table, load_table
