"""Closed-loop truth simulation of a (possibly aged, mismatched) cell."""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from electrode_soh.config.simulation import Simulation
from electrode_soh.errors import ConfigurationError
from electrode_soh.model.eecm import EecmState, cell_voltage, step_state
from electrode_soh.model.esoh import EsohParams, soc_from_sol, sol_from_soc
from electrode_soh.model.pack import ParameterPack
from electrode_soh.model.tables import ELEMENTS

from .degradation import DegradationSpec, apply_degradation
from .profiles import ProfileSpec, noise_rng, segment_current, segment_rngs

logger = logging.getLogger(__name__)

__all__ = [
    "Scenario",
    "Trajectory",
    "TruthCell",
    "build_truth",
    "load_scenario",
    "perturb_pack",
    "simulate_trajectory",
    "MEASUREMENT_COLUMNS",
    "TRUTH_COLUMNS",
]

MEASUREMENT_COLUMNS = ("t_s", "current_a", "voltage_v")
TRUTH_COLUMNS = ("t_s", "thn", "thp", "soc")

_SCENARIO_KEYS = {"name", "degradation", "profile", "init_soc", "mismatch", "seed", "cutoffs"}


@dataclass(frozen=True)
class Scenario:
    """Everything needed to synthesise one truth run."""

    name: str
    degradation: DegradationSpec
    profile: ProfileSpec
    init_soc: float = 1.0
    mismatch: float = 0.10
    seed: int = 0
    cutoffs: Tuple[float, float] = (2.0, 4.4)

    def __post_init__(self) -> None:
        if not 0.0 <= self.init_soc <= 1.0:
            raise ConfigurationError(f"init_soc={self.init_soc} outside [0, 1]")
        if not 0.0 <= self.mismatch < 1.0:
            raise ConfigurationError(f"mismatch={self.mismatch} outside [0, 1)")
        if not self.cutoffs[0] < self.cutoffs[1]:
            raise ConfigurationError("cutoffs must be (low, high) with low < high")

    @classmethod
    def from_dict(
        cls,
        data: Mapping[str, Any],
        *,
        name: str = "scenario",
        defaults: Optional[Simulation] = None,
    ) -> "Scenario":
        """
        Build a scenario; keys the document omits fall back to ``defaults``.

        :param defaults: Mismatch, noise and cutoff defaults (the ``simulation`` config section).
        """

        unknown = set(data) - _SCENARIO_KEYS
        if unknown:
            raise ConfigurationError(f"Unknown scenario keys {sorted(unknown)}")
        if "profile" not in data:
            raise ConfigurationError("Scenario needs a 'profile'")
        sim = defaults or Simulation()
        profile = dict(data["profile"])
        profile.setdefault("noise_std", sim.NOISE_STD)
        return cls(
            name=str(data.get("name", name)),
            degradation=DegradationSpec.from_dict(data.get("degradation")),
            profile=ProfileSpec.from_dict(profile),
            init_soc=float(data.get("init_soc", 1.0)),
            mismatch=float(data.get("mismatch", sim.MISMATCH)),
            seed=int(data.get("seed", 0)),
            cutoffs=tuple(float(v) for v in data.get("cutoffs", (sim.V_CUTOFF_LOW, sim.V_CUTOFF_HIGH))),
        )


def load_scenario(path: str | os.PathLike, defaults: Optional[Simulation] = None) -> Scenario:
    """Read a scenario JSON file."""

    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigurationError(f"Scenario not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"Invalid JSON in scenario {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"Scenario {path} must hold a JSON object")
    scenario = Scenario.from_dict(data, name=Path(path).stem, defaults=defaults)
    logger.info("Loaded scenario '%s' from %s", scenario.name, path)
    return scenario


def perturb_pack(pack: ParameterPack, mismatch: float, rng: np.random.Generator) -> ParameterPack:
    """Scale every table entry by an independent factor drawn from ``[1 - m, 1 + m]``."""

    if mismatch == 0:
        return pack
    tables = {}
    for electrode in ("negative", "positive"):
        table = pack.table(electrode)
        factors = {
            name: rng.uniform(1.0 - mismatch, 1.0 + mismatch, size=table.breakpoints.size) for name in ELEMENTS
        }
        tables[electrode] = table.scaled(factors)
    return pack.with_tables(tables["negative"], tables["positive"])


@dataclass(frozen=True, eq=False)
class TruthCell:
    """The hidden cell: aged eSOH parameters and the mismatched model pack."""

    pack: ParameterPack
    esoh: EsohParams
    degradation: DegradationSpec


def build_truth(pack: ParameterPack, scenario: Scenario) -> TruthCell:
    """Age the fresh pack per the scenario and perturb its tables."""

    aged = apply_degradation(
        pack.esoh,
        scenario.degradation,
        pack.vmin,
        pack.vmax,
        pack.ocp_positive,
        pack.ocp_negative,
    )
    rng = np.random.default_rng(np.random.SeedSequence(scenario.seed).spawn(1)[0])
    truth_pack = perturb_pack(pack, scenario.mismatch, rng).with_esoh(aged)
    return TruthCell(pack=truth_pack, esoh=aged, degradation=scenario.degradation)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Measured series plus the hidden truth behind them."""

    t: np.ndarray
    current: np.ndarray
    voltage: np.ndarray
    voltage_true: np.ndarray
    thp: np.ndarray
    thn: np.ndarray
    soc: np.ndarray
    esoh: EsohParams
    clamp_count: int = 0
    terminated: Tuple[int, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return int(self.t.size)

    def measurements(self) -> pd.DataFrame:
        return pd.DataFrame({"t_s": self.t, "current_a": self.current, "voltage_v": self.voltage})

    def truth(self) -> pd.DataFrame:
        return pd.DataFrame({"t_s": self.t, "thn": self.thn, "thp": self.thp, "soc": self.soc})


def simulate_trajectory(
    pack: ParameterPack,
    esoh: EsohParams,
    profile: ProfileSpec,
    *,
    init_soc: float = 1.0,
    noise_std: Optional[float] = None,
    seed: Optional[int] = None,
    cutoffs: Tuple[float, float] = (2.0, 4.4),
) -> Trajectory:
    """
    Drive the circuit model through ``profile``.

    Each segment is truncated at its termination voltage and at the global
    cutoffs, both checked on the noise-free model voltage; the sample that
    crosses is the last one of its segment. The measured voltage adds Gaussian
    noise of ``noise_std`` (profile default).

    :param pack: Model used as the truth (tables and OCPs).
    :param esoh: True eSOH parameters.
    :param profile: Segment list, sample period and noise.
    :param init_soc: Starting SOC; the circuit starts relaxed.
    :returns: :class:`Trajectory`.
    """

    std = profile.noise_std if noise_std is None else noise_std
    if std < 0:
        raise ValueError("noise_std must be non-negative")
    low, high = cutoffs
    dt = profile.dt
    thp0, thn0 = sol_from_soc(esoh, init_soc)
    state = EecmState(thp=float(thp0), thn=float(thn0))

    t_out, i_out, v_out, thp_out, thn_out = [], [], [], [], []
    terminated = []
    k = 0
    expanded = profile.expanded
    for index, rng in enumerate(segment_rngs(profile)):
        segment = expanded[index]
        for current in segment_current(profile, index, rng):
            v = cell_voltage(state, pack, current)
            t_out.append(k * dt)
            i_out.append(current)
            v_out.append(v)
            thp_out.append(state.thp)
            thn_out.append(state.thn)
            state = step_state(state, pack, esoh, current, dt)
            k += 1

            term = segment.termination_v
            hit = False
            if term is not None:
                hit = v >= term if segment.charging else v <= term
            if hit or not low <= v <= high:
                terminated.append(index)
                logger.debug("Segment %d (%s) terminated at t=%.0f s, v=%.4f V", index, segment.kind, k * dt, v)
                break

    v_true = np.asarray(v_out, dtype=float)
    noise = noise_rng(profile, seed).normal(0.0, std, size=v_true.size) if std > 0 else np.zeros_like(v_true)
    thn = np.asarray(thn_out, dtype=float)

    logger.info(
        "Simulated %d samples (%.1f h), %d segment(s) terminated early, %d SOL clamp(s)",
        v_true.size,
        v_true.size * dt / 3600.0,
        len(terminated),
        state.clamp_count,
    )
    return Trajectory(
        t=np.asarray(t_out, dtype=float),
        current=np.asarray(i_out, dtype=float),
        voltage=v_true + noise,
        voltage_true=v_true,
        thp=np.asarray(thp_out, dtype=float),
        thn=thn,
        soc=np.asarray(soc_from_sol(esoh, thn), dtype=float),
        esoh=esoh,
        clamp_count=state.clamp_count,
        terminated=tuple(terminated),
    )
