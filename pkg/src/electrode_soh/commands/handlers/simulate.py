from __future__ import annotations

from dataclasses import replace
import logging
from pathlib import Path
from typing import Any, Dict

from electrode_soh.config.run import RunConfig
from electrode_soh.health.report import assess
from electrode_soh.io.csv_io import CsvSink
from electrode_soh.model.pack import ParameterPack, load_pack
from electrode_soh.truth.simulator import (
    MEASUREMENT_COLUMNS,
    TRUTH_COLUMNS,
    Scenario,
    Trajectory,
    TruthCell,
    build_truth,
    load_scenario,
    simulate_trajectory,
)

from .. import Command, CommandResult, CommandSpec, register_command, write_json

logger = logging.getLogger(__name__)


def scenario_for(config: RunConfig) -> Scenario:
    """Load the configured scenario, applying the seed override."""

    scenario = load_scenario(config.core.SCENARIO, defaults=config.simulation)
    if config.core.SEED is not None:
        seed = int(config.core.SEED)
        scenario = replace(scenario, seed=seed, profile=replace(scenario.profile, seed=seed))
    return scenario


def run_scenario(pack: ParameterPack, scenario: Scenario) -> tuple[TruthCell, Trajectory]:
    truth = build_truth(pack, scenario)
    trajectory = simulate_trajectory(
        truth.pack,
        truth.esoh,
        scenario.profile,
        init_soc=scenario.init_soc,
        cutoffs=scenario.cutoffs,
    )
    return truth, trajectory


def truth_document(pack: ParameterPack, scenario: Scenario, truth: TruthCell, trajectory: Trajectory) -> Dict[str, Any]:
    return {
        "scenario": scenario.name,
        "seed": scenario.seed,
        "degradation": {"lam_p": truth.degradation.lam_p, "lam_n": truth.degradation.lam_n, "lli": truth.degradation.lli},
        "fresh_esoh": pack.esoh.to_dict(),
        "esoh": truth.esoh.to_dict(),
        "health": assess(truth.esoh, pack.esoh).to_dict(),
        "samples": len(trajectory),
        "sol_clamps": trajectory.clamp_count,
        "terminated_segments": list(trajectory.terminated),
    }


def write_truth(out: Path, pack, scenario, truth, trajectory, result: CommandResult) -> None:
    with CsvSink(out / "measurements.csv", MEASUREMENT_COLUMNS) as sink:
        sink.write_frame(trajectory.measurements())
    result.add(sink.path)
    with CsvSink(out / "truth.csv", TRUTH_COLUMNS) as sink:
        sink.write_frame(trajectory.truth())
    result.add(sink.path)
    result.add(write_json(out / "truth_esoh.json", truth_document(pack, scenario, truth, trajectory)))


@register_command(CommandSpec(name="simulate", help="Synthesize measurements and hidden truth from a scenario."))
class Simulate(Command):
    """Write ``measurements.csv``, ``truth.csv`` and ``truth_esoh.json``."""

    def run(self, config: RunConfig) -> CommandResult:
        pack = load_pack(config.core.PARAM_PACK)
        scenario = scenario_for(config)
        truth, trajectory = run_scenario(pack, scenario)

        result = CommandResult()
        write_truth(config.output_dir, pack, scenario, truth, trajectory, result)
        return result
