"""Discharge pulse, relaxation, charge pulse, relaxation."""

from __future__ import annotations

import numpy as np

from . import amps, register, samples


@register
class HppcPulse:
    kind = "hppc"

    @staticmethod
    def generate(segment, dt, rng, nominal_capacity_ah):
        level = amps(segment.magnitude, segment.unit, nominal_capacity_ah)
        pulse = samples(segment.pulse_s, dt)
        relax = samples(segment.relax_s, dt)
        return np.concatenate(
            [
                np.full(pulse, level),
                np.zeros(relax),
                np.full(pulse, -level),
                np.zeros(relax),
            ]
        )
