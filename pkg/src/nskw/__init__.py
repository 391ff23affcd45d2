"""Simulation and verification laboratory for the one-dimensional
nonisothermal Navier-Stokes-Korteweg system in Lagrangian coordinates.

.. autosummary::
   :nosignatures:

   model
   grid
   solver
   diagnostics
   scenario
   experiments
"""

from .diagnostics import DiagnosticsRecord, Recorder, decay_metric, energy_ledger, kanel_check
from .grid import FieldState, Grid, d1, d2, integrate, make_initial
from .model import ParamSet, RegimeVerdict, classify_thm11, classify_thm12, f_func, g_func
from .scenario import Scenario, load_preset
from .solver import StepControl, rhs, run, stable_dt, step_rk4

__version__ = "0.1.0"
