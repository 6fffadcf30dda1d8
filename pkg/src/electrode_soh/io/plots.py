"""SVG line charts of estimates against truth (Agg backend, no display needed)."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

__all__ = ["plot_estimates"]


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def plot_estimates(
    estimates: pd.DataFrame,
    out_dir: str | os.PathLike,
    truth: Optional[pd.DataFrame] = None,
) -> List[Path]:
    """
    Write ``soc.svg``, ``sol.svg``, ``capacity.svg`` and ``voltage.svg``.

    :param estimates: Estimator output (the ``estimates.csv`` columns).
    :param out_dir: Destination directory.
    :param truth: Optional ``t_s,thn,thp,soc`` truth table drawn dashed.
    """

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matplotlib.rcParams["svg.hashsalt"] = "electrode-soh"
    hours = estimates["t_s"] / 3600.0
    truth_hours = truth["t_s"] / 3600.0 if truth is not None else None
    written: List[Path] = []

    fig, ax = plt.subplots(figsize=(10, 4))
    ax.plot(hours, estimates["soc"], label="estimate")
    if truth is not None:
        ax.plot(truth_hours, truth["soc"], "--", label="truth")
    ax.set_xlabel("time (h)")
    ax.set_ylabel("SOC")
    ax.legend()
    written.append(_save(fig, out / "soc.svg"))

    fig, axes = plt.subplots(2, 1, figsize=(10, 6), sharex=True)
    for ax, column, title in zip(axes, ("thp", "thn"), ("positive SOL", "negative SOL")):
        ax.plot(hours, estimates[column], label="estimate")
        if truth is not None:
            ax.plot(truth_hours, truth[column], "--", label="truth")
        ax.set_ylabel(title)
        ax.legend()
    axes[-1].set_xlabel("time (h)")
    written.append(_save(fig, out / "sol.svg"))

    fig, ax = plt.subplots(figsize=(10, 4))
    for column, label in (("qp_ah", "Qp"), ("qn_ah", "Qn")):
        ax.plot(hours, estimates[column], label=label)
    ax.set_xlabel("time (h)")
    ax.set_ylabel("capacity (Ah)")
    ax.legend()
    written.append(_save(fig, out / "capacity.svg"))

    fig, ax = plt.subplots(figsize=(10, 4))
    ax.plot(hours, estimates["voltage_v"], label="measured")
    ax.plot(hours, estimates["vhat_v"], label="predicted")
    ax.set_xlabel("time (h)")
    ax.set_ylabel("voltage (V)")
    ax.legend()
    written.append(_save(fig, out / "voltage.svg"))

    return written
