"""Half-cell HPPC series and their pulse-block segmentation."""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import os
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from electrode_soh.errors import FittingError
from electrode_soh.io.csv_io import iter_frames, read_header
from electrode_soh.model.ocp import ELECTRODES

logger = logging.getLogger(__name__)

__all__ = [
    "HPPC_COLUMNS",
    "PulseBlock",
    "HppcDataset",
    "segment_hppc",
    "load_hppc_csv",
]

HPPC_COLUMNS = ("t_s", "current_a", "potential_v", "sol")

Span = Tuple[int, int]


@dataclass(frozen=True, slots=True)
class PulseBlock:
    """
    Samples ``[start, stop)`` around one SOL level.

    ``pulses`` and ``rests`` are half-open index spans inside the block; ``sol``
    is the SOL just before the first pulse.
    """

    start: int
    stop: int
    pulses: Tuple[Span, ...]
    rests: Tuple[Span, ...]
    sol: float

    @property
    def fit_window(self) -> Span:
        """From the last rest sample before the first pulse to the block end."""

        return max(self.pulses[0][0] - 1, self.start), self.stop


def _step_sizes(t: np.ndarray) -> np.ndarray:
    if t.size < 2:
        return np.ones_like(t)
    steps = np.diff(t)
    return np.append(steps, steps[-1])


def _runs(current: np.ndarray, tol: float) -> List[Tuple[int, int, int]]:
    sign = np.where(np.abs(current) <= tol, 0, np.sign(current)).astype(int)
    edges = np.flatnonzero(np.diff(sign)) + 1
    bounds = np.concatenate([[0], edges, [sign.size]])
    return [(int(s), int(e), int(sign[s])) for s, e in zip(bounds[:-1], bounds[1:])]


def segment_hppc(
    t,
    current,
    sol,
    *,
    pulse_max_s: float = 60.0,
    current_tol: float = 1e-9,
) -> List[PulseBlock]:
    """
    Split a series into pulse blocks.

    Zero-current runs are rests, nonzero runs up to ``pulse_max_s`` are pulses
    and longer nonzero runs move the SOL to the next level. A move opens a new
    block once the current one holds a pulse; a trailing block without pulses
    is folded into its predecessor, so the blocks tile the series.

    :returns: Blocks in time order; empty when the series has no pulse.
    """

    t = np.asarray(t, dtype=float)
    current = np.asarray(current, dtype=float)
    sol = np.asarray(sol, dtype=float)
    if not (t.size == current.size == sol.size):
        raise ValueError("t, current and sol must have the same length")
    if t.size == 0:
        return []

    steps = _step_sizes(t)
    spans: List[dict] = []
    block = {"start": 0, "pulses": [], "rests": []}
    for start, stop, sign in _runs(current, current_tol):
        duration = float(np.sum(steps[start:stop]))
        if sign == 0:
            block["rests"].append((start, stop))
        elif duration <= pulse_max_s:
            block["pulses"].append((start, stop))
        elif block["pulses"]:
            block["stop"] = start
            spans.append(block)
            block = {"start": start, "pulses": [], "rests": []}
    block["stop"] = t.size
    if block["pulses"] or not spans:
        spans.append(block)
    else:
        spans[-1]["stop"] = t.size
        spans[-1]["rests"].extend(block["rests"])

    blocks = [
        PulseBlock(
            start=b["start"],
            stop=b["stop"],
            pulses=tuple(b["pulses"]),
            rests=tuple(b["rests"]),
            sol=float(sol[max(b["pulses"][0][0] - 1, b["start"])]),
        )
        for b in spans
        if b["pulses"]
    ]
    logger.debug("Segmented %d samples into %d block(s)", t.size, len(blocks))
    return blocks


@dataclass(frozen=True, eq=False)
class HppcDataset:
    """One electrode's potential response to an HPPC current series."""

    electrode: str
    t: np.ndarray
    current: np.ndarray
    potential: np.ndarray
    sol: np.ndarray
    pulse_max_s: float = 60.0
    blocks: Tuple[PulseBlock, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.electrode not in ELECTRODES:
            raise FittingError(f"Unknown electrode '{self.electrode}'")
        for name in ("t", "current", "potential", "sol"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.t.size
        if not (self.current.size == self.potential.size == self.sol.size == n):
            raise FittingError("HPPC columns have different lengths")
        if n < 2:
            raise FittingError("HPPC dataset is empty")
        if np.any(np.diff(self.t) <= 0):
            raise FittingError("HPPC time stamps must increase strictly")
        blocks = segment_hppc(self.t, self.current, self.sol, pulse_max_s=self.pulse_max_s)
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def dt_steps(self) -> np.ndarray:
        """Hold time after each sample (the last one repeats the previous)."""

        return _step_sizes(self.t)

    def block_for(self, sol: float, tolerance: float) -> Optional[PulseBlock]:
        """The block whose SOL is nearest ``sol``, if within ``tolerance``."""

        if not self.blocks:
            return None
        best = min(self.blocks, key=lambda b: abs(b.sol - sol))
        return best if abs(best.sol - sol) <= tolerance else None

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"t_s": self.t, "current_a": self.current, "potential_v": self.potential, "sol": self.sol}
        )


def load_hppc_csv(path: str | os.PathLike, electrode: str, *, chunk_size: int = 10000) -> HppcDataset:
    """
    Read a ``t_s,current_a,potential_v,sol`` CSV.

    :raises FittingError: When the ``sol`` column is missing.
    :raises DataError: On other missing columns or malformed rows.
    """

    if "sol" not in read_header(path):
        raise FittingError(f"{path} has no 'sol' column; breakpoints cannot be located")
    frames = list(iter_frames(path, HPPC_COLUMNS, chunk_size=chunk_size))
    data = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=HPPC_COLUMNS)
    logger.info("Loaded %d HPPC samples for the %s electrode from %s", len(data), electrode, path)
    return HppcDataset(
        electrode=electrode,
        t=data["t_s"].to_numpy(dtype=float),
        current=data["current_a"].to_numpy(dtype=float),
        potential=data["potential_v"].to_numpy(dtype=float),
        sol=data["sol"].to_numpy(dtype=float),
    )
