from dataclasses import dataclass
import os
from typing import Optional

_DEFAULT_OUTPUT_DIR = "results"


@dataclass
class Core:
    PARAM_PACK: Optional[str] = None                                        # Parameter-pack JSON (None -> shipped pack)
    SCENARIO: Optional[str] = None                                          # Scenario JSON for synthetic runs
    INPUT: Optional[str] = None                                             # Recorded CSV input
    TRUTH: Optional[str] = None                                             # Truth sidecar CSV (plots / scoring)
    OUTPUT_DIR: str = os.getenv("ESOH_OUTPUT_DIR", _DEFAULT_OUTPUT_DIR)  # Where results are written
    SEED: Optional[int] = None                                              # Overrides scenario and fit seeds
    PLOTS: bool = False                                                     # Emit SVG charts
    CHUNK_SIZE: int = 10000                                                 # Rows per CSV read/write chunk
