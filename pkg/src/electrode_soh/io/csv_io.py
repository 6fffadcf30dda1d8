"""
Chunked CSV ingestion and emission.

Reading goes through ``pandas.read_csv(chunksize=...)`` so a multi-day log never
sits in memory at once. Row numbers in :class:`DataError` are file line
numbers, the header being line 1.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from electrode_soh.errors import DataError

from .records import CyclingRecord

logger = logging.getLogger(__name__)

__all__ = [
    "FLOAT_FORMAT",
    "CsvSink",
    "iter_frames",
    "iter_records",
    "read_header",
]

FLOAT_FORMAT = "%.10g"
RECORD_COLUMNS = ("t_s", "current_a", "voltage_v")


def read_header(path: str | os.PathLike) -> List[str]:
    """Column names of ``path``."""

    try:
        return [str(c).strip() for c in pd.read_csv(path, nrows=0).columns]
    except FileNotFoundError as exc:
        raise DataError(f"Input file not found: {path}") from exc
    except pd.errors.EmptyDataError as exc:
        raise DataError(f"{path} is empty", row=1) from exc


def iter_frames(
    path: str | os.PathLike,
    required: Sequence[str],
    *,
    optional: Sequence[str] = (),
    chunk_size: int = 10000,
    nullable: Sequence[str] = (),
) -> Iterator[pd.DataFrame]:
    """
    Yield numeric chunks of ``path`` holding ``required`` plus any present ``optional`` columns.

    Each chunk carries a ``line`` column with the 1-based file line number.

    :param nullable: Columns allowed to be empty or NaN; other NaNs are malformed.
    :raises DataError: On missing columns, unparsable cells or ragged rows.
    """

    header = read_header(path)
    missing = [c for c in required if c not in header]
    if missing:
        raise DataError(f"{path} is missing column(s) {', '.join(missing)}", row=1)
    wanted = list(required) + [c for c in optional if c in header]

    reader = pd.read_csv(
        path,
        usecols=wanted,
        dtype=str,
        chunksize=chunk_size,
        skipinitialspace=True,
    )
    offset = 2
    try:
        for chunk in reader:
            chunk.columns = [c.strip() for c in chunk.columns]
            lines = np.arange(offset, offset + len(chunk))
            offset += len(chunk)

            out = pd.DataFrame({"line": lines})
            for column in wanted:
                raw = chunk[column].reset_index(drop=True)
                values = pd.to_numeric(raw, errors="coerce")
                text = raw.fillna("").str.strip().str.lower()
                malformed = values.isna() & ~text.isin(["", "nan"])
                if column not in nullable:
                    malformed |= values.isna()
                if malformed.any():
                    where = int(np.flatnonzero(malformed.to_numpy())[0])
                    raise DataError(f"bad value {raw.iloc[where]!r} in column '{column}'", row=int(lines[where]))
                out[column] = values.to_numpy(dtype=float)
            yield out
    except pd.errors.ParserError as exc:
        raise DataError(f"{path}: {exc}") from exc


def iter_records(path: str | os.PathLike, *, chunk_size: int = 10000) -> Iterator[CyclingRecord]:
    """
    Stream :class:`CyclingRecord` objects from a ``t_s,current_a,voltage_v`` CSV.

    Rows with a NaN voltage are skipped with a warning. Time must increase
    strictly.

    :raises DataError: On malformed rows, with the file line number.
    """

    last_t: Optional[float] = None
    skipped = 0
    for frame in iter_frames(
        path, RECORD_COLUMNS, optional=("temperature_c",), chunk_size=chunk_size, nullable=("voltage_v", "temperature_c")
    ):
        has_temp = "temperature_c" in frame
        for row in frame.itertuples(index=False):
            line = int(row.line)
            if np.isnan(row.voltage_v):
                skipped += 1
                logger.warning("Skipping line %d: voltage is NaN", line)
                continue
            if last_t is not None and not row.t_s > last_t:
                raise DataError(f"time {row.t_s} does not increase (previous {last_t})", row=line)
            last_t = row.t_s
            temp = row.temperature_c if has_temp and not np.isnan(row.temperature_c) else None
            yield CyclingRecord(float(row.t_s), float(row.current_a), float(row.voltage_v), temp)
    if skipped:
        logger.warning("Skipped %d row(s) with NaN voltage in %s", skipped, path)


class CsvSink:
    """
    Buffered CSV writer with a fixed column order.

    Rows are appended in chunks through :meth:`pandas.DataFrame.to_csv`. A sink
    that never receives a row still writes its header on :meth:`close`.

    :param path: Output file (parents are created, an existing file is replaced).
    :param columns: Column names, in order.
    :param chunk_size: Rows buffered before each flush.
    """

    def __init__(self, path: str | os.PathLike, columns: Sequence[str], *, chunk_size: int = 10000) -> None:
        self.path = Path(path)
        self.columns = list(columns)
        self.chunk_size = int(chunk_size)
        self.rows_written = 0
        self._buffer: List[Mapping[str, Any]] = []
        self._header_written = False
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists():
            self.path.unlink()

    def write(self, row: Mapping[str, Any]) -> None:
        self._buffer.append(row)
        if len(self._buffer) >= self.chunk_size:
            self.flush()

    def write_many(self, rows: Iterable[Mapping[str, Any]]) -> None:
        for row in rows:
            self.write(row)

    def write_frame(self, frame: pd.DataFrame) -> None:
        self.flush()
        self._emit(frame.loc[:, self.columns])

    def flush(self) -> None:
        if not self._buffer:
            return
        frame = pd.DataFrame.from_records(self._buffer, columns=self.columns)
        self._buffer = []
        self._emit(frame)

    def _emit(self, frame: pd.DataFrame) -> None:
        frame.to_csv(
            self.path,
            mode="a",
            header=not self._header_written,
            index=False,
            float_format=FLOAT_FORMAT,
            lineterminator="\n",
        )
        self._header_written = True
        self.rows_written += len(frame)

    def close(self) -> Path:
        self.flush()
        if not self._header_written:
            pd.DataFrame(columns=self.columns).to_csv(self.path, index=False, lineterminator="\n")
            self._header_written = True
        logger.info("Wrote %d row(s) to %s", self.rows_written, self.path)
        return self.path

    def __enter__(self) -> "CsvSink":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()
