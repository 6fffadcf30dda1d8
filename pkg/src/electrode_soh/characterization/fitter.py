"""
Passive-element tables from half-cell HPPC data.

Both modes minimise ``w1*J1 + w2*J2`` with a seeded
:func:`scipy.optimize.differential_evolution`. ``local`` mode fits one constant
five-element set per breakpoint on that block's pulses: the population
searches the two log10 time constants, and for each candidate the resistances
(plus any branch voltage left at the window start) follow from linear least
squares. ``joint`` mode searches log10 of every element of the whole table at
once against the whole series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import differential_evolution, least_squares
from scipy.signal import lfilter

from electrode_soh.config.fitting import Fitting
from electrode_soh.errors import FittingError
from electrode_soh.model.eecm import rc_discretize, simulate_half_cell, sol_direction
from electrode_soh.model.ocp import OcpCurve, ocp
from electrode_soh.model.pack import ParameterPack
from electrode_soh.model.tables import ELEMENTS, HalfCellParamTable, interpolate_rc
from electrode_soh.truth.profiles import generate_profile

from .costs import cost_j1, cost_j2, scalarized_cost
from .dataset import HppcDataset, PulseBlock
from .schedule import hppc_schedule, schedule_targets

logger = logging.getLogger(__name__)

__all__ = ["FitResult", "fit_half_cell", "synthesize_hppc", "canonical_order", "reference_elements"]


@dataclass(frozen=True, eq=False)
class FitResult:
    """Fitted elements per breakpoint (SI units), achieved costs and optimizer metadata."""

    electrode: str
    breakpoints: np.ndarray
    r0: np.ndarray
    r1: np.ndarray
    c1: np.ndarray
    r2: np.ndarray
    c2: np.ndarray
    j1: float
    j2: float
    j1_blocks: np.ndarray
    j2_blocks: np.ndarray
    mode: str
    population: int
    generations: int
    seed: int
    nfev: int = 0
    block_sol: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def element(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def merged_into(self, base: HalfCellParamTable) -> HalfCellParamTable:
        """
        ``base`` with the fitted breakpoints replaced (or inserted).

        Inserted breakpoints take the base values interpolated elsewhere.
        """

        grid = np.union1d(base.breakpoints, self.breakpoints)
        rc = interpolate_rc(base, grid)
        columns = {name: np.array(getattr(rc, name), dtype=float) for name in ELEMENTS}
        for k, bp in enumerate(self.breakpoints):
            idx = int(np.argmin(np.abs(grid - bp)))
            for name in ELEMENTS:
                columns[name][idx] = self.element(name)[k]
        return HalfCellParamTable(self.electrode, grid, **columns)

    def summary(self) -> Dict[str, Any]:
        return {
            "electrode": self.electrode,
            "mode": self.mode,
            "breakpoints": self.breakpoints.tolist(),
            "block_sol": self.block_sol.tolist(),
            "j1_v": self.j1,
            "j2_v_per_s": self.j2,
            "j1_blocks_v": self.j1_blocks.tolist(),
            "j2_blocks_v_per_s": self.j2_blocks.tolist(),
            "elements": {name: self.element(name).tolist() for name in ELEMENTS},
            "optimizer": {
                "method": "differential_evolution",
                "population": self.population,
                "generations": self.generations,
                "seed": self.seed,
                "nfev": self.nfev,
            },
        }


def canonical_order(r1: float, c1: float, r2: float, c2: float) -> Tuple[float, float, float, float]:
    """Swap the branches so that ``r1*c1 <= r2*c2``."""

    if r1 * c1 > r2 * c2:
        return r2, c2, r1, c1
    return r1, c1, r2, c2


def reference_elements(table: HalfCellParamTable, sols) -> Dict[str, np.ndarray]:
    """
    ``table`` interpolated at ``sols`` with its branches in canonical order.

    Fitted branches come out sorted by time constant; this is what they match.
    """

    rc = interpolate_rc(table, np.atleast_1d(np.asarray(sols, dtype=float)))
    rows = [canonical_order(*values) for values in zip(rc.r1, rc.c1, rc.r2, rc.c2)]
    r1, c1, r2, c2 = (np.array(col, dtype=float) for col in zip(*rows))
    return {"r0": np.asarray(rc.r0, dtype=float), "r1": r1, "c1": c1, "r2": r2, "c2": c2}


def _bounds(cfg: Fitting) -> List[Tuple[float, float]]:
    r_lo, r_hi = (math.log10(v) for v in cfg.R_BOUNDS)
    c_lo, c_hi = (math.log10(v) for v in cfg.C_BOUNDS)
    return [(r_lo, r_hi), (r_lo, r_hi), (c_lo, c_hi), (r_lo, r_hi), (c_lo, c_hi)]


def _rc_voltage(current: np.ndarray, steps: np.ndarray, r: float, c: float) -> np.ndarray:
    """Branch voltage at each sample for a branch relaxed at the first one."""

    a, b = rc_discretize(r, c, steps)
    if np.allclose(steps, steps[0]):
        return lfilter([0.0, b[0]], [1.0, -a[0]], current)
    out = np.zeros_like(current)
    for k in range(1, current.size):
        out[k] = a[k - 1] * out[k - 1] + b[k - 1] * current[k - 1]
    return out


class _SeparableBlock:
    """
    One pulse block as a model linear in ``R0, R1, R2`` and the branch voltages
    left over at the window start, once both time constants are fixed.

    Rows are weighted so the least-squares objective is
    ``(w1 J1)^2 + (w2 J2)^2``.
    """

    def __init__(self, data: HppcDataset, curve: OcpCurve, block: PulseBlock, cfg: Fitting) -> None:
        lo, hi = block.fit_window
        self.electrode = data.electrode
        self.cfg = cfg
        self.current = data.current[lo:hi]
        self.measured = data.potential[lo:hi]
        self.steps = data.dt_steps[lo:hi]
        self.elapsed = data.t[lo:hi] - data.t[lo]
        self.u = ocp(curve, data.sol[lo:hi])
        n = self.current.size
        self._w_level = cfg.W1 / math.sqrt(n)
        self._w_slope = cfg.W2 / math.sqrt(max(n - 1, 1))
        target = sol_direction(self.electrode) * (self.u - self.measured)
        self._rhs = self._stack(target[:, None])[:, 0]

    def _stack(self, columns: np.ndarray) -> np.ndarray:
        slopes = np.diff(columns, axis=0) / self.steps[:-1, None]
        return np.vstack([self._w_level * columns, self._w_slope * slopes])

    def design(self, tau1: float, tau2: float) -> np.ndarray:
        return np.column_stack(
            [
                self.current,
                _rc_voltage(self.current, self.steps, 1.0, tau1),
                _rc_voltage(self.current, self.steps, 1.0, tau2),
                np.exp(-self.elapsed / tau1),
                np.exp(-self.elapsed / tau2),
            ]
        )

    def solve(self, log_tau: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Time constants (ascending) and the linear coefficients for them."""

        taus = np.sort(10.0 ** np.asarray(log_tau, dtype=float))
        X = self.design(*taus)
        coef, *_ = np.linalg.lstsq(self._stack(X), self._rhs, rcond=None)
        coef[:3] = np.clip(coef[:3], *self.cfg.R_BOUNDS)
        return taus, coef

    def model(self, taus: np.ndarray, coef: np.ndarray) -> np.ndarray:
        return self.u - sol_direction(self.electrode) * (self.design(*taus) @ coef)

    def residuals(self, log_tau: np.ndarray) -> np.ndarray:
        taus, coef = self.solve(log_tau)
        return self._stack(self.design(*taus)) @ coef - self._rhs

    def cost(self, log_tau: np.ndarray) -> float:
        taus, coef = self.solve(log_tau)
        return scalarized_cost(self.model(taus, coef), self.measured, self.steps[:-1], self.cfg.W1, self.cfg.W2)


def _fit_block(
    data: HppcDataset,
    curve: OcpCurve,
    block: PulseBlock,
    cfg: Fitting,
    seed: int,
) -> Tuple[np.ndarray, float, float, int]:
    problem = _SeparableBlock(data, curve, block, cfg)
    lo, hi = (math.log10(v) for v in cfg.TAU_BOUNDS)

    result = differential_evolution(
        problem.cost,
        [(lo, hi), (lo, hi)],
        popsize=max(1, math.ceil(cfg.POPULATION / 2)),
        maxiter=cfg.GENERATIONS,
        seed=seed,
        tol=1e-6,
        atol=1e-12,
        polish=False,
    )
    best, nfev = np.sort(result.x), int(result.nfev)
    refined = least_squares(
        problem.residuals, best, bounds=(lo, hi), xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=200
    )
    nfev += int(refined.nfev)
    if problem.cost(refined.x) < problem.cost(best):
        best = refined.x

    taus, coef = problem.solve(best)
    r0, r1, r2 = (float(v) for v in coef[:3])
    c1 = float(np.clip(taus[0] / r1, *cfg.C_BOUNDS))
    c2 = float(np.clip(taus[1] / r2, *cfg.C_BOUNDS))
    model = problem.model(np.array([r1 * c1, r2 * c2]), coef)
    r1, c1, r2, c2 = canonical_order(r1, c1, r2, c2)
    elements = np.array([r0, r1, c1, r2, c2])
    measured, steps = problem.measured, problem.steps
    return elements, cost_j1(model, measured), cost_j2(model, measured, steps[:-1]), nfev


def _match_blocks(data: HppcDataset, breakpoints: Sequence[float], tolerance: float) -> List[PulseBlock]:
    if not data.blocks:
        raise FittingError("No current pulses in the dataset; elements are unidentifiable", uncovered=[float(b) for b in breakpoints])
    matched, uncovered = [], []
    for bp in breakpoints:
        block = data.block_for(bp, tolerance)
        if block is None:
            uncovered.append(float(bp))
        matched.append(block)
    if uncovered:
        raise FittingError("Dataset does not reach every breakpoint", uncovered=uncovered)
    return matched


def _fit_local(data, curve, breakpoints, cfg, seed) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[PulseBlock], int]:
    blocks = _match_blocks(data, breakpoints, cfg.SOL_TOLERANCE)
    children = np.random.SeedSequence(seed).spawn(len(blocks))
    elements, j1s, j2s, nfev = [], [], [], 0
    for bp, block, child in zip(breakpoints, blocks, children):
        block_seed = int(child.generate_state(1)[0])
        values, j1, j2, evals = _fit_block(data, curve, block, cfg, block_seed)
        logger.info(
            "Breakpoint %.2f: R0=%.2f mOhm tau1=%.1f s tau2=%.1f s J1=%.3g V J2=%.3g V/s",
            bp,
            values[0] * 1e3,
            values[1] * values[2],
            values[3] * values[4],
            j1,
            j2,
        )
        elements.append(values)
        j1s.append(j1)
        j2s.append(j2)
        nfev += evals
    return np.array(elements), np.array(j1s), np.array(j2s), blocks, nfev


def _fit_joint(data, curve, q_ah, breakpoints, cfg, seed) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[PulseBlock], int]:
    blocks = _match_blocks(data, breakpoints, cfg.SOL_TOLERANCE)
    if not (math.isclose(breakpoints[0], 0.0) and math.isclose(breakpoints[-1], 1.0)):
        raise FittingError("Joint mode needs breakpoints spanning [0, 1]")
    n_bp = len(breakpoints)
    steps = data.dt_steps

    def table_from(x: np.ndarray) -> HalfCellParamTable:
        values = (10.0 ** x).reshape(n_bp, len(ELEMENTS))
        return HalfCellParamTable(data.electrode, breakpoints, *values.T)

    def cost(x: np.ndarray) -> float:
        model, _ = simulate_half_cell(data.electrode, curve, table_from(x), q_ah, data.sol[0], data.current, steps)
        return scalarized_cost(model, data.potential, steps[:-1], cfg.W1, cfg.W2)

    result = differential_evolution(
        cost,
        _bounds(cfg) * n_bp,
        popsize=max(1, math.ceil(cfg.POPULATION / (len(ELEMENTS) * n_bp))),
        maxiter=cfg.GENERATIONS,
        seed=seed,
        tol=1e-10,
        polish=False,
    )
    values = (10.0 ** result.x).reshape(n_bp, len(ELEMENTS))
    for row in values:
        row[1], row[2], row[3], row[4] = canonical_order(*row[1:])

    model, _ = simulate_half_cell(
        data.electrode, curve, HalfCellParamTable(data.electrode, breakpoints, *values.T), q_ah, data.sol[0], data.current, steps
    )
    j1s, j2s = [], []
    for block in blocks:
        lo, hi = block.fit_window
        j1s.append(cost_j1(model[lo:hi], data.potential[lo:hi]))
        j2s.append(cost_j2(model[lo:hi], data.potential[lo:hi], steps[lo : hi - 1]))
    return values, np.array(j1s), np.array(j2s), blocks, int(result.nfev)


def fit_half_cell(
    data: HppcDataset,
    curve: OcpCurve,
    q_ah: float,
    cfg: Optional[Fitting] = None,
    *,
    seed: int = 0,
    breakpoints: Optional[Sequence[float]] = None,
) -> FitResult:
    """
    Fit the five passive elements at each breakpoint.

    :param data: HPPC series of ``curve``'s electrode.
    :param curve: That electrode's OCP.
    :param q_ah: Electrode capacity, used by the joint-mode simulation.
    :param cfg: Weights, bounds, optimizer size and mode (defaults: :class:`Fitting`).
    :param seed: Optimizer seed; equal seeds give identical results.
    :param breakpoints: SOL breakpoints to fit (defaults to ``cfg.BREAKPOINTS``).
    :raises FittingError: On a dataset without pulses or with unreached breakpoints.
    """

    cfg = cfg or Fitting()
    if curve.electrode != data.electrode:
        raise FittingError(f"OCP is for the {curve.electrode} electrode, data for the {data.electrode}")
    bps = np.asarray(cfg.BREAKPOINTS if breakpoints is None else breakpoints, dtype=float)
    if bps.size == 0:
        raise FittingError("No breakpoints to fit")

    logger.info(
        "Fitting %d breakpoint(s) of the %s electrode (%s mode, population %d, %d generations, seed %d)",
        bps.size,
        data.electrode,
        cfg.MODE,
        cfg.POPULATION,
        cfg.GENERATIONS,
        seed,
    )
    if cfg.MODE == "local":
        values, j1s, j2s, blocks, nfev = _fit_local(data, curve, bps, cfg, seed)
    elif cfg.MODE == "joint":
        values, j1s, j2s, blocks, nfev = _fit_joint(data, curve, q_ah, bps, cfg, seed)
    else:
        raise FittingError(f"Unknown fitting mode '{cfg.MODE}'")

    weights = np.array([b.fit_window[1] - b.fit_window[0] for b in blocks], dtype=float)
    return FitResult(
        electrode=data.electrode,
        breakpoints=bps,
        r0=values[:, 0],
        r1=values[:, 1],
        c1=values[:, 2],
        r2=values[:, 3],
        c2=values[:, 4],
        j1=float(np.sqrt(np.average(j1s**2, weights=weights))),
        j2=float(np.sqrt(np.average(j2s**2, weights=weights))),
        j1_blocks=j1s,
        j2_blocks=j2s,
        mode=cfg.MODE,
        population=cfg.POPULATION,
        generations=cfg.GENERATIONS,
        seed=seed,
        nfev=nfev,
        block_sol=np.array([b.sol for b in blocks]),
    )


def synthesize_hppc(
    pack: ParameterPack,
    electrode: str,
    cfg: Optional[Fitting] = None,
    *,
    sol_lo: Optional[float] = None,
    sol_hi: Optional[float] = None,
    dt: float = 1.0,
    seed: int = 0,
) -> HppcDataset:
    """
    HPPC data generated by the pack's own half-cell model.

    :param sol_lo: First SOL level (defaults to the lowest configured breakpoint).
    :param sol_hi: Last SOL level (defaults to the highest).
    :param seed: Seed for the potential noise (``cfg.NOISE_STD``).
    """

    cfg = cfg or Fitting()
    lo = min(cfg.BREAKPOINTS) if sol_lo is None else sol_lo
    hi = max(cfg.BREAKPOINTS) if sol_hi is None else sol_hi
    q_ah = pack.esoh.capacity(electrode)
    profile = hppc_schedule(
        lo,
        hi,
        cfg.PULSE_CRATE,
        cfg.REST_S,
        step=cfg.STEP,
        electrode=electrode,
        q_ah=q_ah,
        pulse_s=cfg.PULSE_S,
        relax_s=cfg.RELAX_S,
        dt=dt,
    )
    current = generate_profile(profile).current
    theta0 = float(schedule_targets(lo, hi, cfg.STEP)[0])
    potential, thetas = simulate_half_cell(
        electrode, pack.curve(electrode), pack.table(electrode), q_ah, theta0, current, dt, eta=pack.esoh.eta
    )
    if cfg.NOISE_STD > 0:
        potential = potential + np.random.default_rng(seed).normal(0.0, cfg.NOISE_STD, size=potential.size)
    logger.info("Synthesized %d HPPC samples for the %s electrode", current.size, electrode)
    return HppcDataset(electrode, np.arange(current.size) * dt, current, potential, thetas)
