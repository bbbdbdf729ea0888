"""Rough lifts of a G-Brownian sample and of its polygonal approximation."""

import numpy as np

from .errors import ParameterError
from .gsim import GBMSample
from .path_core import GridPath, RoughPath, rough_distance, rough_distance_parts

STRATONOVICH = "stratonovich"
ITO = "ito"
PIECEWISE_LINEAR = "piecewise_linear"


def _check_alpha(alpha):
    if not 1.0 / 3.0 < alpha < 0.5:
        raise ParameterError(f"lift exponent must lie in (1/3, 1/2), got {alpha}")


def strat_lift(sample: GBMSample, alpha: float) -> RoughPath:
    """Stratonovich lift: cell blocks ``dB^2 / 2``, hence ``BB_{s,t} = B_{s,t}^2 / 2``."""
    _check_alpha(alpha)
    db = sample.db
    return RoughPath.from_blocks(sample.b, 0.5 * db * db, alpha)


def ito_lift(sample: GBMSample, alpha: float) -> RoughPath:
    """Itô lift: cell blocks ``(dB^2 - d<B>) / 2``."""
    _check_alpha(alpha)
    db = sample.db
    return RoughPath.from_blocks(sample.b, 0.5 * (db * db - sample.dq), alpha)


def pw_linear_values(b_values: np.ndarray, n_coarse: int) -> np.ndarray:
    """Polygonal interpolation of fine node values through every ``N/n``-th node."""
    n_fine = b_values.shape[-1] - 1
    if n_coarse < 1 or n_fine % n_coarse:
        raise ParameterError(f"n_coarse={n_coarse} does not divide n_steps={n_fine}")
    r = n_fine // n_coarse
    anchors = b_values[..., ::r]
    w = np.arange(r) / r
    left = anchors[..., :-1, None]
    right = anchors[..., 1:, None]
    inner = (left + (right - left) * w).reshape(b_values.shape[:-1] + (n_fine,))
    return np.concatenate([inner, b_values[..., -1:]], axis=-1)


def pw_linear(sample: GBMSample, n_coarse: int) -> GridPath:
    """``B^(n)`` on the fine grid: equal to ``B`` at coarse nodes, linear between them."""
    return GridPath(sample.grid, pw_linear_values(sample.b.values, n_coarse))


def pw_linear_lift(bn: GridPath, alpha: float) -> RoughPath:
    """Riemann–Stieltjes lift of a polygonal path: blocks ``dB^(n)^2 / 2``."""
    _check_alpha(alpha)
    d = bn.increments()
    return RoughPath.from_blocks(bn, 0.5 * d * d, alpha)


def lift(sample: GBMSample, alpha: float, kind: str = STRATONOVICH, n_coarse: int = None) -> RoughPath:
    if kind == STRATONOVICH:
        return strat_lift(sample, alpha)
    if kind == ITO:
        return ito_lift(sample, alpha)
    if kind == PIECEWISE_LINEAR:
        if n_coarse is None:
            raise ParameterError("piecewise_linear lift needs n_coarse")
        return pw_linear_lift(pw_linear(sample, n_coarse), alpha)
    raise ParameterError(f"unknown lift kind {kind!r}")


def lift_distance(a: RoughPath, b: RoughPath, exact=None) -> float:
    return rough_distance(a, b, exact)


def lift_distance_parts(a: RoughPath, b: RoughPath, exact=None):
    return rough_distance_parts(a, b, exact)
