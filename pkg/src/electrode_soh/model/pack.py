"""
Parameter packs: OCP curves, element tables, fresh eSOH parameters and voltage
limits in one JSON document. ``docs/parameter_pack.md`` describes the schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping, Optional

from electrode_soh.errors import ConfigurationError

from .esoh import EsohParams, capacity_from_geometry, sol_from_soc, useful_capacity
from .ocp import OcpCurve, ocp
from .tables import ELEMENTS, HalfCellParamTable

logger = logging.getLogger(__name__)

__all__ = [
    "ParameterPack",
    "load_pack",
    "dump_pack",
    "pack_from_dict",
    "scale_tables",
    "DEFAULT_PACK_RESOURCE",
]

DEFAULT_PACK_RESOURCE = "default_pack.json"


@dataclass(frozen=True, eq=False)
class ParameterPack:
    """Everything the circuit model needs for one cell."""

    name: str
    ocp_negative: OcpCurve
    ocp_positive: OcpCurve
    table_negative: HalfCellParamTable
    table_positive: HalfCellParamTable
    esoh: EsohParams
    vmin: float
    vmax: float
    geometry: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    reference_windows: Optional[Mapping[str, float]] = None

    def curve(self, electrode: str) -> OcpCurve:
        return self.ocp_positive if electrode == "positive" else self.ocp_negative

    def table(self, electrode: str) -> HalfCellParamTable:
        return self.table_positive if electrode == "positive" else self.table_negative

    def ocv(self, soc, esoh: Optional[EsohParams] = None):
        """Rest cell voltage at ``soc`` for ``esoh`` (fresh parameters by default)."""

        thp, thn = sol_from_soc(esoh or self.esoh, soc)
        return ocp(self.ocp_positive, thp) - ocp(self.ocp_negative, thn)

    def with_tables(self, negative: HalfCellParamTable, positive: HalfCellParamTable) -> "ParameterPack":
        return replace(self, table_negative=negative, table_positive=positive)

    def with_table(self, electrode: str, table: HalfCellParamTable) -> "ParameterPack":
        if electrode == "positive":
            return replace(self, table_positive=table)
        return replace(self, table_negative=table)

    def with_esoh(self, esoh: EsohParams) -> "ParameterPack":
        return replace(self, esoh=esoh)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "ocp": {
                "negative": self.ocp_negative.to_dict(),
                "positive": self.ocp_positive.to_dict(),
            },
            "tables": {
                "negative": self.table_negative.to_dict(),
                "positive": self.table_positive.to_dict(),
            },
            "geometry": {k: dict(v) for k, v in self.geometry.items()},
            "esoh": {
                **self.esoh.to_dict(),
                "reference_windows": dict(self.reference_windows) if self.reference_windows else None,
            },
            "voltage_limits": {"vmin": self.vmin, "vmax": self.vmax},
        }


def _capacities(esoh_block: Mapping[str, Any], geometry: Mapping[str, Any], reference: Optional[Mapping[str, float]]):
    qn = esoh_block.get("qn_ah")
    qp = esoh_block.get("qp_ah")

    if qn is None:
        if "negative" not in geometry:
            raise ConfigurationError("qn_ah is null and no negative geometry is given")
        qn = capacity_from_geometry(**geometry["negative"])
    if qp is None:
        if reference is None:
            if "positive" not in geometry:
                raise ConfigurationError("qp_ah is null and there is nothing to derive it from")
            qp = capacity_from_geometry(**geometry["positive"])
        else:
            # balanced against the negative electrode over the reference windows
            dn = reference["thn100"] - reference["thn0"]
            dp = reference["thp0"] - reference["thp100"]
            qp = qn * dn / dp
    return float(qp), float(qn)


def _reference_limits(
    reference: Mapping[str, float], positive: OcpCurve, negative: OcpCurve
) -> tuple[float, float]:
    vmin = ocp(positive, reference["thp0"]) - ocp(negative, reference["thn0"])
    vmax = ocp(positive, reference["thp100"]) - ocp(negative, reference["thn100"])
    return float(vmin), float(vmax)


def pack_from_dict(data: Mapping[str, Any]) -> ParameterPack:
    """
    Build a :class:`ParameterPack` from its JSON form.

    When ``esoh`` carries no explicit windows they are solved from the
    reference windows, anchored at 50 % reference SOC, for the pack's voltage
    limits. Null limits default to the rest voltage at the reference endpoints.

    :raises ConfigurationError: On any malformed block or infeasible windows.
    """

    try:
        ocp_block = data["ocp"]
        tables_block = data["tables"]
        esoh_block = dict(data["esoh"])
        ocp_n, ocp_p = ocp_block["negative"], ocp_block["positive"]
        rows_n, rows_p = tables_block["negative"], tables_block["positive"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"Parameter pack is missing block {exc}") from exc

    negative = OcpCurve.from_dict("negative", ocp_n)
    positive = OcpCurve.from_dict("positive", ocp_p)
    table_n = HalfCellParamTable.from_dict("negative", rows_n)
    table_p = HalfCellParamTable.from_dict("positive", rows_p)
    geometry = {
        k: {name: float(v) for name, v in block.items()} for k, block in (data.get("geometry") or {}).items()
    }

    reference = esoh_block.get("reference_windows")
    if reference is not None:
        reference = {k: float(reference[k]) for k in ("thp0", "thp100", "thn0", "thn100")}

    qp, qn = _capacities(esoh_block, geometry, reference)
    eta = float(esoh_block.get("eta", 1.0))

    limits = data.get("voltage_limits") or {}
    vmin, vmax = limits.get("vmin"), limits.get("vmax")
    if vmin is None or vmax is None:
        if reference is None:
            raise ConfigurationError("Voltage limits are null and no reference windows are given")
        ref_min, ref_max = _reference_limits(reference, positive, negative)
        vmin = ref_min if vmin is None else vmin
        vmax = ref_max if vmax is None else vmax
    vmin, vmax = float(vmin), float(vmax)

    if all(esoh_block.get(k) is not None for k in ("thp0", "thp100", "thn0", "thn100")):
        esoh = EsohParams.from_dict({**esoh_block, "qp_ah": qp, "qn_ah": qn, "eta": eta})
    elif reference is not None:
        esoh = _solve_fresh_windows(qp, qn, eta, reference, vmin, vmax, positive, negative)
    else:
        raise ConfigurationError("eSOH block needs explicit windows or reference_windows")
    esoh.validate()

    pack = ParameterPack(
        name=str(data.get("name", "unnamed")),
        ocp_negative=negative,
        ocp_positive=positive,
        table_negative=table_n,
        table_positive=table_p,
        esoh=esoh,
        vmin=vmin,
        vmax=vmax,
        geometry=geometry,
        reference_windows=reference,
    )
    logger.info(
        "Pack '%s': Qp=%.4f Ah Qn=%.4f Ah Q=%.4f Ah limits [%.3f, %.3f] V",
        pack.name,
        qp,
        qn,
        useful_capacity(esoh),
        vmin,
        vmax,
    )
    return pack


def _solve_fresh_windows(qp, qn, eta, reference, vmin, vmax, positive, negative) -> EsohParams:
    # deferred: the solver package imports this one
    from electrode_soh.windows.solver import WindowSolveInput, solve_windows

    ref = EsohParams(qp=qp, qn=qn, eta=eta, **reference)
    thp, thn = sol_from_soc(ref, 0.5)
    solution = solve_windows(
        WindowSolveInput(
            qp=qp,
            qn=qn,
            thp=thp,
            thn=thn,
            vmin=vmin,
            vmax=vmax,
            previous=ref.windows,
        ),
        positive,
        negative,
    )
    if solution.failed:
        raise ConfigurationError(
            f"No stoichiometric windows satisfy limits [{vmin:.4f}, {vmax:.4f}] V for this pack"
        )
    return solution.as_esoh(qp, qn, eta)


def load_pack(path: str | os.PathLike | None = None) -> ParameterPack:
    """
    Load a parameter pack; the shipped default when ``path`` is ``None``.

    :raises ConfigurationError: If the file is missing or malformed.
    """

    try:
        if path is None:
            text = resources.files("electrode_soh.model.data").joinpath(DEFAULT_PACK_RESOURCE).read_text()
            source = f"<package>/{DEFAULT_PACK_RESOURCE}"
        else:
            text = Path(path).read_text()
            source = str(path)
    except FileNotFoundError as exc:
        raise ConfigurationError(f"Parameter pack not found: {path}") from exc

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"Invalid JSON in parameter pack {source}: {exc}") from exc
    logger.info("Loading parameter pack from %s", source)
    return pack_from_dict(data)


def dump_pack(pack: ParameterPack, path: str | os.PathLike) -> Path:
    """Write ``pack`` as JSON (explicit windows included) and return the path."""

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(pack.to_dict(), indent=2) + "\n")
    logger.info("Wrote parameter pack to %s", target)
    return target


def scale_tables(pack: ParameterPack, factors: Mapping[str, Mapping[str, Any]]) -> ParameterPack:
    """
    Multiply table columns by per-electrode factors.

    :param factors: ``{electrode: {element: scalar or per-breakpoint array}}``.
    """

    for electrode, columns in factors.items():
        unknown = set(columns) - set(ELEMENTS)
        if unknown:
            raise ValueError(f"Unknown table elements {sorted(unknown)} for {electrode}")
    negative = pack.table_negative.scaled(factors.get("negative", {}))
    positive = pack.table_positive.scaled(factors.get("positive", {}))
    return pack.with_tables(negative, positive)
