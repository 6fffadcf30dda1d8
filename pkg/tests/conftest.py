import json
import os, sys
from pathlib import Path

import pytest

# Ensure the src-based package is importable during tests
PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT / "src"))
sys.path.insert(0, str(PROJECT_ROOT))

# Outputs always go to an explicit tmp_path, never to a directory from the environment
os.environ.pop("ESOH_OUTPUT_DIR", None)

SCENARIOS = PROJECT_ROOT / "scenarios"


@pytest.fixture(scope="session")
def pack():
    from electrode_soh.model.pack import load_pack

    return load_pack()


@pytest.fixture
def short_scenario(tmp_path):
    """A mildly aged cell driven for ten minutes, then rested."""

    path = tmp_path / "short.json"
    path.write_text(
        json.dumps(
            {
                "name": "short",
                "degradation": {"lam_p": 5.0, "lam_n": 3.0, "lli": 4.0},
                "init_soc": 0.8,
                "seed": 5,
                "profile": {
                    "dt": 1.0,
                    "noise_std": 0.001,
                    "seed": 5,
                    "segments": [
                        {"kind": "drive", "magnitude": 2.0, "duration_s": 600},
                        {"kind": "rest", "duration_s": 120},
                    ],
                },
            }
        )
    )
    return path
