"""
Electrode-level state-of-health toolkit.

A two-electrode equivalent-circuit cell model, interconnected sigma-point
filters for the electrode states of lithiation, recursive electrode-capacity
regression, stoichiometric-window solving and degradation-mode reporting,
plus HPPC characterization and a synthetic truth generator to validate it all.
"""

__version__ = "0.1.0"
