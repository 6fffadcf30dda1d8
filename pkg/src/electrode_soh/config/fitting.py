from dataclasses import dataclass, field
from typing import List


def _default_breakpoints() -> List[float]:
    return [round(0.1 * k, 10) for k in range(11)]


@dataclass
class Fitting:
    ELECTRODE: str = "positive"                                             # Half-cell to characterize
    MODE: str = "local"                                                     # "local" per block or "joint"
    POPULATION: int = 64                                                    # Optimizer population
    GENERATIONS: int = 500                                                  # Optimizer generations
    W1: float = 1.0                                                         # Weight of J1
    W2: float = 100.0                                                       # Weight of J2 (s)
    R_BOUNDS: List[float] = field(default_factory=lambda: [1e-5, 0.5])      # Ohm
    C_BOUNDS: List[float] = field(default_factory=lambda: [10.0, 1e7])      # F
    TAU_BOUNDS: List[float] = field(default_factory=lambda: [1.0, 1e4])     # RC time constants (s), local mode
    BREAKPOINTS: List[float] = field(default_factory=_default_breakpoints)  # SOL breakpoints to fit
    SOL_TOLERANCE: float = 0.005                                            # Block-to-breakpoint match
    PULSE_CRATE: float = 1.0                                                # HPPC pulse magnitude (C)
    PULSE_S: float = 10.0                                                   # HPPC pulse length (s)
    RELAX_S: float = 600.0                                                  # Rest after each pulse (s)
    REST_S: float = 1800.0                                                  # Settling rest before a block (s)
    STEP: float = 0.1                                                       # SOL increment between blocks
    NOISE_STD: float = 0.0                                                  # Noise on synthetic potentials (V)
