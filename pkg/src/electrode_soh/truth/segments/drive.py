"""
Synthetic drive cycle: low-pass filtered Gaussian noise, shifted so that the
requested fraction of samples is regenerative (negative) and scaled to the
requested RMS.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import signal

from . import amps, register, samples

logger = logging.getLogger(__name__)


@register
class DriveCycle:
    kind = "drive"

    @staticmethod
    def generate(segment, dt, rng, nominal_capacity_ah):
        n = samples(segment.duration_s, dt)
        if n == 0:
            return np.zeros(0)

        nyquist = 0.5 / dt
        cutoff = min(segment.bandwidth_hz, 0.9 * nyquist)
        sos = signal.butter(4, cutoff, btype="low", fs=1.0 / dt, output="sos")
        shaped = signal.sosfilt(sos, rng.standard_normal(n))
        shaped = (shaped - shaped.mean()) / (shaped.std() or 1.0)

        shaped = shaped - np.quantile(shaped, segment.regen_fraction)
        rms = amps(segment.rms if segment.rms is not None else segment.magnitude, segment.unit, nominal_capacity_ah)
        scale = rms / np.sqrt(np.mean(shaped**2))
        logger.debug("Drive segment: %d samples, cutoff %.3g Hz, rms %.3f A", n, cutoff, rms)
        return shaped * scale
