"""Electrode-level equivalent-circuit model: OCPs, element tables, eSOH maps and packs."""

from .ocp import ELECTRODES, OcpCurve, TanhTerm, affine_ocp, negative_ocp, ocp, positive_ocp
from .tables import ELEMENTS, HalfCellParamTable, RcElements, interpolate_rc
from .esoh import FARADAY, EsohParams, capacity_from_geometry, soc_from_sol, sol_from_soc, useful_capacity
from .eecm import (
    EecmState,
    cell_voltage,
    electrode_potential,
    half_cell_potential,
    rc_discretize,
    simulate_half_cell,
    sol_direction,
    step_state,
)
from .pack import ParameterPack, dump_pack, load_pack, pack_from_dict, scale_tables

__all__ = [
    "ELECTRODES",
    "ELEMENTS",
    "FARADAY",
    "OcpCurve",
    "TanhTerm",
    "affine_ocp",
    "negative_ocp",
    "positive_ocp",
    "ocp",
    "HalfCellParamTable",
    "RcElements",
    "interpolate_rc",
    "EsohParams",
    "capacity_from_geometry",
    "soc_from_sol",
    "sol_from_soc",
    "useful_capacity",
    "EecmState",
    "cell_voltage",
    "electrode_potential",
    "half_cell_potential",
    "rc_discretize",
    "simulate_half_cell",
    "sol_direction",
    "step_state",
    "ParameterPack",
    "dump_pack",
    "load_pack",
    "pack_from_dict",
    "scale_tables",
]
