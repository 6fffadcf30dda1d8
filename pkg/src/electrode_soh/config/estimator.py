from dataclasses import dataclass, field
import math
from typing import List, Optional


@dataclass
class Estimator:
    H: float = math.sqrt(3.0)                                                       # Sigma-point spread
    PROCESS_NOISE: List[float] = field(default_factory=lambda: [1e-8, 1e-8, 1e-10])  # diag(Sigma_w) per electrode
    MEASUREMENT_NOISE: float = 4e-6                                                 # Sigma_v (V^2)
    INIT_COVARIANCE: List[float] = field(default_factory=lambda: [1e-6, 1e-6, 1e-2])  # diag(Sigma_0) per electrode
    INIT_SOC: Optional[float] = None                                                # Initial SOC guess (None -> 0.5)
    INIT_THP: Optional[float] = None                                                # Explicit PE SOL guess
    INIT_THN: Optional[float] = None                                                # Explicit NE SOL guess
    INIT_QP_SCALE: float = 1.0                                                      # Initial PE capacity / fresh
    INIT_QN_SCALE: float = 1.0                                                      # Initial NE capacity / fresh
    JITTER_TRIES: int = 3                                                           # Cholesky retries before reset
