"""Chart generation for foraging-run results directories.

Consumes only the stats.csv files written by the simulator; the simulator
package itself is never imported, so the two packages can be installed and
tested independently.
"""

from .charts import plot_all
from .loader import Run, Row, SchemaError, discover_runs, read_stats_file

__all__ = [
    "Run",
    "Row",
    "SchemaError",
    "discover_runs",
    "read_stats_file",
    "plot_all",
]
