from dataclasses import dataclass


@dataclass
class Simulation:
    V_CUTOFF_LOW: float = 2.0            # Cycler cutoff (V)
    V_CUTOFF_HIGH: float = 4.4           # Cycler cutoff (V)
    MISMATCH: float = 0.10               # Truth R/C perturbation half-width
    NOISE_STD: float = 1e-3              # Voltage noise std (V)
