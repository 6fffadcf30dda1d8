from __future__ import annotations

import logging
from typing import Iterator, Optional

import pandas as pd

from electrode_soh.config.run import RunConfig
from electrode_soh.estimation.estimator import (
    ESTIMATE_COLUMNS,
    PAIR_COLUMNS,
    WINDOW_COLUMNS,
    ElectrodeSohEstimator,
    discharge_equivalent_end,
    score_run,
)
from electrode_soh.health.report import REPORT_COLUMNS
from electrode_soh.io.csv_io import CsvSink, iter_records
from electrode_soh.io.records import CyclingRecord
from electrode_soh.model.esoh import useful_capacity
from electrode_soh.model.pack import load_pack
from electrode_soh.truth.simulator import Trajectory

from .. import Command, CommandResult, CommandSpec, register_command, write_json
from .simulate import run_scenario, scenario_for, write_truth

logger = logging.getLogger(__name__)


def trajectory_records(trajectory: Trajectory) -> Iterator[CyclingRecord]:
    for t, i, v in zip(trajectory.t, trajectory.current, trajectory.voltage):
        yield CyclingRecord(float(t), float(i), float(v))


@register_command(
    CommandSpec(
        name="estimate",
        help="Run the electrode estimator over recorded or synthesized data.",
        options={"--init-soc": ("estimator", "init_soc", {"type": float, "help": "Initial SOC guess"})},
    )
)
class Estimate(Command):
    """
    Stream samples through :class:`ElectrodeSohEstimator`.

    Writes ``estimates.csv`` (one row per sample), ``windows.csv`` and
    ``health.csv`` (one row per solver tick) and ``awtls.csv`` (one row per
    harvested pair). Scenario runs also write the truth files and
    ``score.json``; ``--plots`` adds SVG charts.
    """

    def run(self, config: RunConfig) -> CommandResult:
        core = config.core
        pack = load_pack(core.PARAM_PACK)
        out = config.output_dir
        result = CommandResult()

        truth_frame: Optional[pd.DataFrame] = None
        truth_esoh = None
        if core.SCENARIO is not None:
            scenario = scenario_for(config)
            truth, trajectory = run_scenario(pack, scenario)
            write_truth(out, pack, scenario, truth, trajectory, result)
            records = trajectory_records(trajectory)
            truth_frame, truth_esoh = trajectory.truth(), truth.esoh
        else:
            records = iter_records(core.INPUT, chunk_size=core.CHUNK_SIZE)
            if core.TRUTH is not None:
                truth_frame = pd.read_csv(core.TRUTH)

        estimator = ElectrodeSohEstimator(pack, config.estimator, config.awtls, config.solver)
        chunk = core.CHUNK_SIZE
        with (
            CsvSink(out / "estimates.csv", ESTIMATE_COLUMNS, chunk_size=chunk) as estimates,
            CsvSink(out / "windows.csv", WINDOW_COLUMNS, chunk_size=chunk) as windows,
            CsvSink(out / "health.csv", REPORT_COLUMNS, chunk_size=chunk) as health,
            CsvSink(out / "awtls.csv", PAIR_COLUMNS, chunk_size=chunk) as pairs,
        ):
            for record in records:
                estimates.write(estimator.step(record).as_row())
                events = estimator.take_events()
                windows.write_many(events.windows)
                health.write_many(events.health)
                pairs.write_many(events.pairs)
        for sink in (estimates, windows, health, pairs):
            result.add(sink.path)

        logger.info(
            "Estimated %d sample(s): %d covariance reset(s), %d window solve(s)",
            estimator.samples,
            estimator.resets,
            estimator.schedule.fired,
        )

        if truth_esoh is not None and estimator.samples:
            frame = pd.read_csv(estimates.path)
            score = score_run(frame, truth_frame, truth_esoh, pack.esoh).to_dict()
            end = discharge_equivalent_end(frame["t_s"], frame["current_a"], useful_capacity(truth_esoh))
            if end is None:
                logger.info("Run never discharged one full capacity; no early checkpoint scored")
            else:
                early = score_run(frame, truth_frame, truth_esoh, pack.esoh, tail_fraction=0.0, until_s=end)
                score["first_discharge_equivalent"] = {"t_s": end, **early.to_dict()}
            result.add(write_json(out / "score.json", score))

        if core.PLOTS:
            # matplotlib is only imported when charts are requested
            from electrode_soh.io.plots import plot_estimates

            frame = pd.read_csv(estimates.path)
            if len(frame):
                for path in plot_estimates(frame, out, truth_frame):
                    result.add(path)
            else:
                logger.warning("No estimates to plot")

        return result
