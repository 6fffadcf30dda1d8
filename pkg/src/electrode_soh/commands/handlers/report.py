from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional

from electrode_soh.config.run import RunConfig
from electrode_soh.errors import ConfigurationError
from electrode_soh.health.report import REPORT_COLUMNS, HealthReport, assess, cell_capacity
from electrode_soh.io.csv_io import CsvSink, iter_frames
from electrode_soh.model.esoh import EsohParams
from electrode_soh.model.pack import load_pack

from .. import Command, CommandResult, CommandSpec, register_command

logger = logging.getLogger(__name__)

_ESOH_COLUMNS = ("qp_ah", "qn_ah", "thp0", "thp100", "thn0", "thn100")


def summary_text(source: str, rows: int, reports: List[HealthReport], fresh: EsohParams) -> str:
    lines = [
        "electrode-soh health summary",
        f"source: {source}",
        f"estimate rows: {rows}",
        f"reports: {len(reports)}",
    ]
    if not reports:
        lines.append("no estimates to report")
        return "\n".join(lines) + "\n"

    last = reports[-1]
    lines += [
        f"final t_s: {last.timestamp:.0f}",
        f"LAM positive: {last.lam_p:.2f} %",
        f"LAM negative: {last.lam_n:.2f} %",
        f"LLI: {last.lli:.2f} %",
        f"cell capacity: {last.q_cell:.4f} Ah (fresh {cell_capacity(fresh):.4f} Ah)",
        f"SOH: {last.soh:.4f}",
        f"lithium inventory: {last.n_li:.5f} mol",
    ]
    flagged = sum(r.flagged for r in reports)
    if flagged:
        lines.append(f"flagged reports: {flagged}")
    return "\n".join(lines) + "\n"


@register_command(CommandSpec(name="report", help="Degradation modes and SOH from an estimates CSV."))
class Report(Command):
    """
    Assess every distinct eSOH state in ``--input`` (an ``estimates.csv``).

    A report row is written whenever the capacities or windows change and for
    the final row. Writes ``health_report.csv`` and ``summary.txt``.
    """

    def run(self, config: RunConfig) -> CommandResult:
        core = config.core
        pack = load_pack(core.PARAM_PACK)
        out = config.output_dir
        result = CommandResult()

        reports: List[HealthReport] = []
        rows = 0
        previous: Optional[tuple] = None
        pending: Optional[tuple] = None

        def emit(t_s: float, values: tuple) -> None:
            esoh = EsohParams(*values, eta=pack.esoh.eta)
            try:
                report = assess(esoh, pack.esoh, t_s)
            except (ConfigurationError, ValueError) as exc:
                logger.warning("Skipping report at t=%.0f s: %s", t_s, exc)
                return
            sink.write(report.as_row())
            reports.append(report)

        with CsvSink(out / "health_report.csv", REPORT_COLUMNS, chunk_size=core.CHUNK_SIZE) as sink:
            for frame in iter_frames(core.INPUT, ("t_s", *_ESOH_COLUMNS), chunk_size=core.CHUNK_SIZE):
                for row in frame.itertuples(index=False):
                    rows += 1
                    values = tuple(float(getattr(row, c)) for c in _ESOH_COLUMNS)
                    if values != previous:
                        emit(float(row.t_s), values)
                        previous = values
                        pending = None
                    else:
                        pending = (float(row.t_s), values)
            if pending is not None:
                emit(*pending)
        result.add(sink.path)

        summary = Path(out / "summary.txt")
        summary.write_text(summary_text(str(core.INPUT), rows, reports, pack.esoh))
        logger.info("Wrote %s", summary)
        result.add(summary)
        return result
