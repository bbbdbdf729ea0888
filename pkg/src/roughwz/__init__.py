"""Rough-path calculus driven by G-Brownian motion, with Wong–Zakai convergence experiments."""

__version__ = "0.1.0"

from ._accel import backend_name
from .errors import DivergenceError, ParameterError
from .path_core import GridPath, Level2, RoughPath, TimeGrid

__all__ = [
    "DivergenceError",
    "GridPath",
    "Level2",
    "ParameterError",
    "RoughPath",
    "TimeGrid",
    "backend_name",
]
