from __future__ import annotations

import logging
from typing import Any, Dict

import numpy as np

from electrode_soh.characterization.dataset import HPPC_COLUMNS, load_hppc_csv
from electrode_soh.characterization.fitter import FitResult, fit_half_cell, reference_elements, synthesize_hppc
from electrode_soh.config.run import RunConfig
from electrode_soh.io.csv_io import CsvSink
from electrode_soh.model.pack import dump_pack, load_pack
from electrode_soh.model.tables import ELEMENTS, HalfCellParamTable

from .. import Command, CommandResult, CommandSpec, register_command, write_json

logger = logging.getLogger(__name__)


def reference_errors(fit: FitResult, reference: HalfCellParamTable) -> Dict[str, Any]:
    """
    Relative error of each fitted element against ``reference``.

    The reference is taken at the SOL each block was actually measured at,
    which differs from the breakpoint at the clamped ends of the range.
    """

    sols = fit.block_sol if fit.block_sol.size else fit.breakpoints
    expected = reference_elements(reference, sols)
    return {name: (np.abs(fit.element(name) / expected[name] - 1.0)).tolist() for name in ELEMENTS}


@register_command(
    CommandSpec(
        name="fit",
        help="Fit one electrode's passive-element table from HPPC data.",
        options={
            "--electrode": ("fitting", "electrode", {"choices": ["positive", "negative"], "help": "Half-cell to fit"}),
            "--mode": ("fitting", "mode", {"choices": ["local", "joint"], "help": "Per-block or whole-table fit"}),
        },
    )
)
class Fit(Command):
    """
    Fit from ``--input`` (``t_s,current_a,potential_v,sol``) or, without an
    input, from HPPC data synthesized by the pack itself.

    Writes ``fitted_pack.json`` and ``fit_summary.json``; synthesized runs also
    write ``hppc.csv``.
    """

    def run(self, config: RunConfig) -> CommandResult:
        core, cfg = config.core, config.fitting
        electrode = cfg.ELECTRODE
        seed = 0 if core.SEED is None else int(core.SEED)
        pack = load_pack(core.PARAM_PACK)
        out = config.output_dir
        result = CommandResult()

        synthesized = core.INPUT is None
        if synthesized:
            data = synthesize_hppc(pack, electrode, cfg, seed=seed)
            with CsvSink(out / "hppc.csv", HPPC_COLUMNS, chunk_size=core.CHUNK_SIZE) as sink:
                sink.write_frame(data.frame())
            result.add(sink.path)
        else:
            data = load_hppc_csv(core.INPUT, electrode, chunk_size=core.CHUNK_SIZE)

        fit = fit_half_cell(data, pack.curve(electrode), pack.esoh.capacity(electrode), cfg, seed=seed)
        fitted = pack.with_table(electrode, fit.merged_into(pack.table(electrode)))
        result.add(dump_pack(fitted, out / "fitted_pack.json"))

        summary = fit.summary()
        summary["source"] = "synthesized" if synthesized else str(core.INPUT)
        if synthesized:
            summary["reference_rel_err"] = reference_errors(fit, pack.table(electrode))
        result.add(write_json(out / "fit_summary.json", summary))

        logger.info("Fit finished: J1=%.3g V, J2=%.3g V/s over %d breakpoint(s)", fit.j1, fit.j2, fit.breakpoints.size)
        return result
