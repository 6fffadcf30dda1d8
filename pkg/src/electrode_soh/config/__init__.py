"""Application configuration"""

import logging
from dotenv import load_dotenv

load_dotenv()

LOG_FORMAT = "[%(asctime)s] [%(levelname)s] [%(name)s]: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

logging.basicConfig(format=LOG_FORMAT, datefmt=DATE_FORMAT, level=logging.INFO)
logging.getLogger("matplotlib").setLevel(logging.WARNING)

from .core import Core
from .estimator import Estimator
from .awtls import Awtls
from .solver import Solver
from .simulation import Simulation
from .fitting import Fitting
from .run import RunConfig, load_run_config

core = Core()
estimator = Estimator()
awtls = Awtls()
solver = Solver()
simulation = Simulation()
fitting = Fitting()


class Config:
    core = core
    estimator = estimator
    awtls = awtls
    solver = solver
    simulation = simulation
    fitting = fitting

__all__ = [
    "core",
    "estimator",
    "awtls",
    "solver",
    "simulation",
    "fitting",
    "Config",
    "RunConfig",
    "load_run_config",
]
