from dataclasses import dataclass
from typing import Optional


@dataclass
class Solver:
    PERIOD_S: float = 10000.0            # Window solve period in data time
    VMIN: Optional[float] = None         # Lower OCV limit (None -> pack)
    VMAX: Optional[float] = None         # Upper OCV limit (None -> pack)
    MAX_ITER: int = 50                   # Newton iterations
    TOL: float = 1e-10                   # Residual infinity-norm target
    FD_STEP: float = 1e-7                # Central-difference step
