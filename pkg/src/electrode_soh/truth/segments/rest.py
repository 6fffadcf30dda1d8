"""Open-circuit rest."""

from __future__ import annotations

import numpy as np

from . import register, samples


@register
class Rest:
    kind = "rest"

    @staticmethod
    def generate(segment, dt, rng, nominal_capacity_ah):
        return np.zeros(samples(segment.duration_s, dt))
