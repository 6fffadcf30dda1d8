"""
Per-sample estimation pipeline.

Every sample runs both electrode filters (prediction, interconnected output
prediction, measurement update). Completed harvesting windows feed the
capacity regressions, and the window solver and the health report run on
their own schedule. Recoverable failures are logged and counted; the run
never stops for them.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
import logging
from typing import Any, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd

from electrode_soh.config.awtls import Awtls
from electrode_soh.config.estimator import Estimator
from electrode_soh.config.solver import Solver
from electrode_soh.errors import (
    ConfigurationError,
    CovarianceDegenerateError,
    EstimationFailure,
    NumericalDegeneracyError,
)
from electrode_soh.health.report import HealthReport, assess
from electrode_soh.io.records import CyclingRecord
from electrode_soh.model.eecm import EecmState, cell_voltage
from electrode_soh.model.esoh import EsohParams, soc_from_sol, sol_from_soc
from electrode_soh.model.ocp import ELECTRODES
from electrode_soh.model.pack import ParameterPack
from electrode_soh.windows.solver import SolverSchedule, WindowSolveInput, solve_windows

from .awtls import AwtlsAccumulator, CapacityEstimate, HarvestedPair, PairHarvester, estimate_capacity, push_pair
from .spkf import (
    FilterState,
    NoiseConfig,
    gain_and_update,
    output_prediction,
    predict_covariance,
    predict_state,
    sigma_points,
)

logger = logging.getLogger(__name__)

__all__ = [
    "ESTIMATE_COLUMNS",
    "WINDOW_COLUMNS",
    "PAIR_COLUMNS",
    "EstimateRow",
    "EstimatorEvents",
    "ElectrodeSohEstimator",
    "RunScore",
    "discharge_equivalent_end",
    "score_run",
]

ESTIMATE_COLUMNS = (
    "t_s",
    "current_a",
    "voltage_v",
    "vhat_v",
    "soc",
    "thp",
    "thn",
    "var_thp",
    "var_thn",
    "qp_ah",
    "qn_ah",
    "sigma_qp_ah",
    "sigma_qn_ah",
    "thp0",
    "thp100",
    "thn0",
    "thn100",
    "resets",
    "solver_flag",
)
WINDOW_COLUMNS = ("t_s", "thp0", "thp100", "thn0", "thn100", "flag")
PAIR_COLUMNS = (
    "t_start_s",
    "t_end_s",
    "electrode",
    "dtheta",
    "dah_ah",
    "var_x",
    "var_y",
    "accepted",
    "q_ah",
    "sigma_q_ah",
)


@dataclass(frozen=True, slots=True)
class EstimateRow:
    """One output row per input sample."""

    t_s: float
    current_a: float
    voltage_v: float
    vhat_v: float
    soc: float
    thp: float
    thn: float
    var_thp: float
    var_thn: float
    qp_ah: float
    qn_ah: float
    sigma_qp_ah: float
    sigma_qn_ah: float
    thp0: float
    thp100: float
    thn0: float
    thn100: float
    resets: int
    solver_flag: int

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


class EstimatorEvents(NamedTuple):
    """Rows produced since the last drain: solver ticks, health reports and regression pairs."""

    windows: List[Dict[str, Any]]
    health: List[Dict[str, Any]]
    pairs: List[Dict[str, Any]]


class ElectrodeSohEstimator:
    """
    Interconnected electrode filters with capacity regression, window solving
    and health reporting.

    :param pack: Fresh parameter pack; its eSOH parameters are the BOL reference.
    :param estimator_cfg: Filter noise and initialisation (defaults: :class:`Estimator`).
    :param awtls_cfg: Regression settings (defaults: :class:`Awtls`).
    :param solver_cfg: Window-solve period, limits and tolerances (defaults: :class:`Solver`).
    """

    def __init__(
        self,
        pack: ParameterPack,
        estimator_cfg: Optional[Estimator] = None,
        awtls_cfg: Optional[Awtls] = None,
        solver_cfg: Optional[Solver] = None,
    ) -> None:
        self.pack = pack
        self.fresh = pack.esoh
        self.cfg = estimator_cfg or Estimator()
        self.awtls_cfg = awtls_cfg or Awtls()
        self.solver_cfg = solver_cfg or Solver()

        self.noise = NoiseConfig(
            process=np.asarray(self.cfg.PROCESS_NOISE, dtype=float),
            measurement=float(self.cfg.MEASUREMENT_NOISE),
            h=float(self.cfg.H),
        )
        init_cov = np.asarray(self.cfg.INIT_COVARIANCE, dtype=float)
        self.init_cov = np.diag(init_cov) if init_cov.ndim == 1 else init_cov
        if self.init_cov.shape != (3, 3):
            raise ConfigurationError("estimator.init_covariance must have three entries")

        self.vmin = pack.vmin if self.solver_cfg.VMIN is None else float(self.solver_cfg.VMIN)
        self.vmax = pack.vmax if self.solver_cfg.VMAX is None else float(self.solver_cfg.VMAX)

        soc0 = 0.5 if self.cfg.INIT_SOC is None else float(self.cfg.INIT_SOC)
        thp0, thn0 = sol_from_soc(self.fresh, soc0)
        thp0 = float(thp0) if self.cfg.INIT_THP is None else float(self.cfg.INIT_THP)
        thn0 = float(thn0) if self.cfg.INIT_THN is None else float(self.cfg.INIT_THN)

        qp = self.fresh.qp * float(self.cfg.INIT_QP_SCALE)
        qn = self.fresh.qn * float(self.cfg.INIT_QN_SCALE)
        self.esoh: EsohParams = self.fresh.with_capacities(qp, qn)

        self.filters: Dict[str, FilterState] = {
            "positive": FilterState("positive", [0.0, 0.0, thp0], self.init_cov),
            "negative": FilterState("negative", [0.0, 0.0, thn0], self.init_cov),
        }

        a = self.awtls_cfg
        self.accumulators: Dict[str, AwtlsAccumulator] = {
            e: AwtlsAccumulator.seeded(
                self.esoh.capacity(e), a.PRIOR_VAR_X, a.PRIOR_VAR_Y, gamma=a.GAMMA, floor=a.DTHETA_FLOOR
            )
            for e in ELECTRODES
        }
        self.capacity: Dict[str, CapacityEstimate] = {
            e: estimate_capacity(acc) for e, acc in self.accumulators.items()
        }
        self.harvester = PairHarvester(a.WINDOW_S, a.CURRENT_NOISE_STD, self.fresh.eta)
        self.schedule = SolverSchedule(self.solver_cfg.PERIOD_S)

        self.resets = 0
        self.solver_flag = 0
        self.samples = 0
        self.health: Optional[HealthReport] = None
        self._t_prev: Optional[float] = None
        self._u_prev = 0.0
        self._events = EstimatorEvents([], [], [])

        logger.info(
            "Estimator initialised: SOC0=%.3f thp=%.4f thn=%.4f Qp=%.4f Ah Qn=%.4f Ah",
            soc0,
            thp0,
            thn0,
            qp,
            qn,
        )

    # ---- filters

    def _reset(self, electrode: str, mean: np.ndarray, exc: Exception) -> FilterState:
        self.resets += 1
        logger.warning("%s filter degenerate (%s); covariance reset (%d resets)", electrode, exc, self.resets)
        return FilterState(electrode, mean, self.init_cov)

    def _filter_step(self, record: CyclingRecord, dt: float) -> Dict[str, np.ndarray]:
        means: Dict[str, np.ndarray] = {}
        covs: Dict[str, np.ndarray] = {}
        for e in ELECTRODES:
            fs = self.filters[e]
            if dt > 0:
                x_minus, A = predict_state(fs, self.pack.table(e), self.capacity[e].q, self.esoh.eta, self._u_prev, dt)
                covs[e] = predict_covariance(fs.cov, A, self.noise.process)
            else:
                x_minus, covs[e] = fs.xhat.copy(), fs.cov.copy()
            means[e] = x_minus

        curves = (self.pack.ocp_negative, self.pack.ocp_positive)
        tables = (self.pack.table_negative, self.pack.table_positive)
        tries = int(self.cfg.JITTER_TRIES)
        updated: Dict[str, FilterState] = {}
        for e in ELECTRODES:
            other = means["negative" if e == "positive" else "positive"]
            try:
                points = sigma_points(means[e], covs[e], self.noise.h, tries)
                Y, yhat = output_prediction(e, points, other, curves, tables, record.current_a, self.noise.wm)
                fs = gain_and_update(
                    e, means[e], covs[e], points, Y, yhat, record.voltage_v, self.noise.wc, self.noise.measurement, tries
                )
            except (CovarianceDegenerateError, NumericalDegeneracyError) as exc:
                fs = self._reset(e, means[e], exc)
            xhat = fs.xhat.copy()
            xhat[2] = min(max(xhat[2], 0.0), 1.0)
            updated[e] = fs.with_mean(xhat)

        self.filters = updated
        return means

    # ---- capacity regression

    def _absorb(self, pair: HarvestedPair) -> None:
        e = pair.electrode
        before = self.accumulators[e]
        acc = push_pair(before, pair.dtheta, pair.dah, pair.var_x, pair.var_y)
        self.accumulators[e] = acc
        accepted = acc.count > before.count
        if accepted:
            try:
                self.capacity[e] = estimate_capacity(acc, previous=self.capacity[e].q)
                logger.info(
                    "%s capacity %.4f Ah (sigma %.4f) after %d pair(s)",
                    e,
                    self.capacity[e].q,
                    self.capacity[e].sigma,
                    acc.count,
                )
            except EstimationFailure as exc:
                logger.warning("%s capacity update failed (%s); keeping %.4f Ah", e, exc, self.capacity[e].q)
        self._events.pairs.append(
            {
                "t_start_s": pair.t_start,
                "t_end_s": pair.t_end,
                "electrode": e,
                "dtheta": pair.dtheta,
                "dah_ah": pair.dah,
                "var_x": pair.var_x,
                "var_y": pair.var_y,
                "accepted": int(accepted),
                "q_ah": self.capacity[e].q,
                "sigma_q_ah": self.capacity[e].sigma,
            }
        )

    # ---- windows and health

    def _solve(self, t_s: float) -> None:
        qp, qn = self.capacity["positive"].q, self.capacity["negative"].q
        inp = WindowSolveInput(
            qp=qp,
            qn=qn,
            thp=self.filters["positive"].theta,
            thn=self.filters["negative"].theta,
            vmin=self.vmin,
            vmax=self.vmax,
            previous=self.esoh.windows,
        )
        solution = solve_windows(
            inp,
            self.pack.ocp_positive,
            self.pack.ocp_negative,
            max_iter=self.solver_cfg.MAX_ITER,
            tol=self.solver_cfg.TOL,
            fd_step=self.solver_cfg.FD_STEP,
        )
        self.solver_flag = int(solution.failed)
        if not solution.failed:
            self.esoh = solution.as_esoh(qp, qn, self.esoh.eta)
        logger.info(
            "Window solve at t=%.0f s (%s, %d it): thp=[%.4f, %.4f] thn=[%.4f, %.4f]",
            t_s,
            solution.method,
            solution.iterations,
            self.esoh.thp100,
            self.esoh.thp0,
            self.esoh.thn0,
            self.esoh.thn100,
        )
        self._events.windows.append(dict(zip(WINDOW_COLUMNS, (t_s, *self.esoh.windows, self.solver_flag))))

        try:
            self.health = assess(self.esoh, self.fresh, t_s)
        except (ConfigurationError, ValueError) as exc:
            logger.warning("Health report skipped at t=%.0f s: %s", t_s, exc)
            return
        self._events.health.append(self.health.as_row())

    # ---- public surface

    def step(self, record: CyclingRecord) -> EstimateRow:
        """
        Advance the pipeline by one sample.

        The time update holds the previous sample's current over the elapsed
        time; the output map uses the present current.

        :param record: The new measurement.
        :returns: :class:`EstimateRow` for this sample.
        """

        dt = 0.0 if self._t_prev is None else record.t_s - self._t_prev
        if dt < 0:
            raise ValueError(f"Samples must be time-ordered (t={record.t_s} after {self._t_prev})")

        means = self._filter_step(record, dt)
        predicted = EecmState(
            vc1p=float(means["positive"][0]),
            vc2p=float(means["positive"][1]),
            vc1n=float(means["negative"][0]),
            vc2n=float(means["negative"][1]),
            thp=float(means["positive"][2]),
            thn=float(means["negative"][2]),
        )
        vhat = float(cell_voltage(predicted, self.pack, record.current_a))

        pos, neg = self.filters["positive"], self.filters["negative"]
        for pair in self.harvester.push(
            record.t_s, pos.theta, neg.theta, pos.theta_var, neg.theta_var, self._u_prev, dt
        ):
            self._absorb(pair)

        if self.schedule(record.t_s):
            self._solve(record.t_s)

        self._t_prev = record.t_s
        self._u_prev = record.current_a
        self.samples += 1

        return EstimateRow(
            t_s=record.t_s,
            current_a=record.current_a,
            voltage_v=record.voltage_v,
            vhat_v=vhat,
            soc=float(soc_from_sol(self.esoh, neg.theta)),
            thp=pos.theta,
            thn=neg.theta,
            var_thp=pos.theta_var,
            var_thn=neg.theta_var,
            qp_ah=self.capacity["positive"].q,
            qn_ah=self.capacity["negative"].q,
            sigma_qp_ah=self.capacity["positive"].sigma,
            sigma_qn_ah=self.capacity["negative"].sigma,
            thp0=self.esoh.thp0,
            thp100=self.esoh.thp100,
            thn0=self.esoh.thn0,
            thn100=self.esoh.thn100,
            resets=self.resets,
            solver_flag=self.solver_flag,
        )

    def run(self, records: Iterable[CyclingRecord]) -> Iterator[EstimateRow]:
        for record in records:
            yield self.step(record)

    def take_events(self) -> EstimatorEvents:
        """Return and clear the rows buffered since the previous call."""

        events, self._events = self._events, EstimatorEvents([], [], [])
        return events


@dataclass(frozen=True, slots=True)
class RunScore:
    """Errors of a finished run against its truth (percentage points and relative fractions)."""

    soc_err_pp: float
    thp_err: float
    thn_err: float
    qp_rel_err: float
    qn_rel_err: float
    q_cell_rel_err: float
    lam_p_err_pp: float
    lam_n_err_pp: float
    lli_err_pp: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def discharge_equivalent_end(t: Sequence[float], current: Sequence[float], capacity_ah: float) -> Optional[float]:
    """
    Time at which the discharged charge first reaches ``capacity_ah``.

    ``current[k]`` is held from ``t[k]`` to ``t[k + 1]``; charging and rest add
    nothing. Returns ``None`` when the data never discharges that much.
    """

    t = np.asarray(t, dtype=float)
    current = np.asarray(current, dtype=float)
    if t.size < 2 or not capacity_ah > 0:
        return None
    discharged = np.cumsum(np.clip(current[:-1], 0.0, None) * np.diff(t)) / 3600.0
    reached = np.flatnonzero(discharged >= capacity_ah)
    return float(t[reached[0] + 1]) if reached.size else None


def score_run(
    estimates: pd.DataFrame,
    truth: pd.DataFrame,
    truth_esoh: EsohParams,
    fresh: EsohParams,
    *,
    tail_fraction: float = 0.2,
    until_s: Optional[float] = None,
) -> RunScore:
    """
    Score an estimates table against the simulator's truth.

    SOL and SOC errors are the largest absolute errors over the last
    ``tail_fraction`` of samples; capacity and degradation-mode errors use the
    final row. With ``until_s`` only samples up to that time are scored.

    :raises ValueError: When the tables share no timestamps.
    """

    merged = estimates.merge(truth, on="t_s", suffixes=("", "_true"))
    if until_s is not None:
        merged = merged[merged["t_s"] <= until_s]
    if merged.empty:
        raise ValueError("Estimates and truth share no timestamps")
    tail = merged.iloc[int(len(merged) * (1.0 - tail_fraction)) :]
    if tail.empty:
        tail = merged.iloc[-1:]

    last = merged.iloc[-1]
    estimated = EsohParams(
        qp=float(last["qp_ah"]),
        qn=float(last["qn_ah"]),
        thp0=float(last["thp0"]),
        thp100=float(last["thp100"]),
        thn0=float(last["thn0"]),
        thn100=float(last["thn100"]),
        eta=fresh.eta,
    )
    est_report = assess(estimated, fresh)
    true_report = assess(truth_esoh, fresh)

    return RunScore(
        soc_err_pp=float(np.max(np.abs(tail["soc"] - tail["soc_true"]))) * 100.0,
        thp_err=float(np.max(np.abs(tail["thp"] - tail["thp_true"]))),
        thn_err=float(np.max(np.abs(tail["thn"] - tail["thn_true"]))),
        qp_rel_err=abs(estimated.qp / truth_esoh.qp - 1.0),
        qn_rel_err=abs(estimated.qn / truth_esoh.qn - 1.0),
        q_cell_rel_err=abs(est_report.q_cell / true_report.q_cell - 1.0),
        lam_p_err_pp=abs(est_report.lam_p - true_report.lam_p),
        lam_n_err_pp=abs(est_report.lam_n - true_report.lam_n),
        lli_err_pp=abs(est_report.lli - true_report.lli),
    )

