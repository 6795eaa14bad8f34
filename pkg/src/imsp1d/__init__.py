"""1-D inverse medium scattering by Carleman-weighted convexification."""
from .forward import MediumProfile, ScatterData, StepTarget, add_noise, solve_forward, synthesize_data
from .numgrid import SpatialGrid, WavenumberGrid

__all__ = ["MediumProfile", "ScatterData", "StepTarget", "SpatialGrid", "WavenumberGrid",
           "add_noise", "solve_forward", "synthesize_data"]
__version__ = "0.1.0"
