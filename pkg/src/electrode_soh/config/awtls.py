from dataclasses import dataclass


@dataclass
class Awtls:
    GAMMA: float = 0.999                 # Forgetting factor per pair
    DTHETA_FLOOR: float = 0.05           # Minimum |delta SOL| for a pair
    WINDOW_S: float = 1800.0             # Pair harvesting window (s)
    CURRENT_NOISE_STD: float = 0.01      # Current-sensor noise (A)
    PRIOR_VAR_X: float = 1e-4            # Variance of the seeded prior pair (x)
    PRIOR_VAR_Y: float = 1e-2            # Variance of the seeded prior pair (Ah^2)
