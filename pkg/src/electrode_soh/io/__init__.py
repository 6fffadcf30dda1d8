"""CSV ingestion and emission. Plotting lives in :mod:`electrode_soh.io.plots` and is imported on demand."""

from .csv_io import FLOAT_FORMAT, CsvSink, iter_frames, iter_records, read_header
from .records import CyclingRecord

__all__ = [
    "FLOAT_FORMAT",
    "CsvSink",
    "CyclingRecord",
    "iter_frames",
    "iter_records",
    "read_header",
]
