"""Constant current."""

from __future__ import annotations

import numpy as np

from . import amps, register, samples


@register
class ConstantCurrent:
    kind = "cc"

    @staticmethod
    def generate(segment, dt, rng, nominal_capacity_ah):
        level = amps(segment.magnitude, segment.unit, nominal_capacity_ah)
        return np.full(samples(segment.duration_s, dt), level)
