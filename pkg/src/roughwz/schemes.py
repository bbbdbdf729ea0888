"""Time-stepping schemes for the G-Stratonovich SDE

    dX = f(X) o dB + g(X) d<B> + h(X) dt.

* :func:`reference_solution`: Euler–Maruyama on the Itô form, whose
  ``d<B>`` drift is ``g + f'f / 2``, run on the fine simulation grid.
* :func:`wong_zakai_ode`: the ODE driven by the polygonal path ``B^(n)``;
  on each coarse cell ``y' = (B_{cell} / |cell|) f(y) + g(y) d<B>/dt + h(y)``
  is integrated by ``m_sub`` explicit Euler sub-steps.
* :func:`euler_maruyama_g`: the coarse Maruyama recursion with the
  Itô–Stratonovich correction.

All three read their increments from one fine :class:`~roughwz.gsim.GBMSample`
and have batched variants working on ``(n_paths, n_steps)`` arrays.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError
from .fields import ZERO, ScalarField, parse_field
from .gsim import GBMSample, ito_integral, qv_bracket
from .path_core import GridPath, TimeGrid
from .rde import DIVERGENCE_GUARD, raise_divergence


@dataclass(frozen=True)
class CoeffSet:
    f: ScalarField = ZERO
    g: ScalarField = ZERO
    h: ScalarField = ZERO

    @property
    def all_zero(self) -> bool:
        return self.f.is_zero and self.g.is_zero and self.h.is_zero


PRESETS = {
    "zero": CoeffSet(),
    "const": CoeffSet(ScalarField("const", 1.0)),
    "sin": CoeffSet(ScalarField("sin")),
    "cos": CoeffSet(ScalarField("cos")),
    "tanh": CoeffSet(ScalarField("tanh")),
    "linear": CoeffSet(ScalarField("linear")),
    "sin-drift": CoeffSet(ScalarField("sin"), ScalarField("cos", 0.5), ScalarField("tanh", -0.5)),
}


def coeffs_from_name(name: str) -> CoeffSet:
    """A preset name, or ``"f,g,h"`` with each part parsed by :func:`parse_field`."""
    if name in PRESETS:
        return PRESETS[name]
    parts = [p for p in name.split(",")]
    if not 1 <= len(parts) <= 3:
        raise ParameterError(f"unknown coefficient preset {name!r}")
    fields = [parse_field(p) if p.strip() else ZERO for p in parts]
    return CoeffSet(*fields)


def _rows(x):
    x = np.asarray(x, dtype=float)
    return x[None, :] if x.ndim == 1 else x


def _x0_array(x0, n_paths):
    return np.broadcast_to(np.asarray(x0, dtype=float), (n_paths,)).copy()


def reference_batch(x0, db, dq, dt, coeffs: CoeffSet) -> np.ndarray:
    """Itô-form Euler–Maruyama on every row of ``db``/``dq``."""
    db, dq = _rows(db), _rows(dq)
    out, bad_path, bad_step = kernels.taylor2(
        _x0_array(x0, db.shape[0]), db, 0.5 * dq, dq, dt,
        coeffs.f.spec, coeffs.g.spec, coeffs.h.spec, DIVERGENCE_GUARD,
    )
    if bad_step >= 0:
        raise_divergence(bad_path, bad_step, "reference solution")
    return out


def reference_solution(sample: GBMSample, coeffs: CoeffSet, x0: float) -> GridPath:
    grid = sample.grid
    return GridPath(grid, reference_batch(x0, sample.db, sample.dq, grid.dt, coeffs)[0])


def default_m_sub(n_fine: int, n_coarse: int) -> int:
    """Sub-steps per coarse cell that make the sub-grid equal to the fine grid."""
    if n_coarse < 1 or n_fine % n_coarse:
        raise ParameterError(f"n_coarse={n_coarse} does not divide n_fine={n_fine}")
    return n_fine // n_coarse


def _sub_qv(dq, n_coarse, m_sub):
    n_paths, n_fine = dq.shape
    r = n_fine // n_coarse
    if m_sub % r == 0:
        k = m_sub // r
        return np.repeat(dq / k, k, axis=1)
    if r % m_sub == 0:
        k = r // m_sub
        return dq.reshape(n_paths, n_coarse * m_sub, k).sum(axis=2)
    raise ParameterError(
        f"m_sub={m_sub} does not align with {r} fine cells per coarse cell"
    )


def wz_batch(x0, db, dq, dt, coeffs: CoeffSet, n_coarse: int, m_sub: int = None) -> np.ndarray:
    """Wong–Zakai ODE on every row; returns values on the ``n_coarse * m_sub`` sub-grid."""
    db, dq = _rows(db), _rows(dq)
    n_paths, n_fine = db.shape
    r = default_m_sub(n_fine, n_coarse)
    if m_sub is None:
        m_sub = r
    if m_sub < 1:
        raise ParameterError("m_sub must be at least 1")
    cell = r * dt
    b_coarse = db.reshape(n_paths, n_coarse, r).sum(axis=2)
    out, bad_path, bad_step = kernels.wz_ode(
        _x0_array(x0, n_paths), b_coarse / cell, _sub_qv(dq, n_coarse, m_sub), cell / m_sub, m_sub,
        coeffs.f.spec, coeffs.g.spec, coeffs.h.spec, DIVERGENCE_GUARD,
    )
    if bad_step >= 0:
        raise_divergence(bad_path, bad_step, "Wong-Zakai ODE")
    return out


def wong_zakai_ode(sample: GBMSample, coeffs: CoeffSet, x0: float, n_coarse: int, m_sub: int = None) -> GridPath:
    """Wong–Zakai approximation ``Y^(n)`` on the sub-grid of ``n_coarse * m_sub`` cells.

    ``m_sub`` defaults to the number of fine cells per coarse cell, so the
    result lives on the sample's own grid.
    """
    grid = sample.grid
    r = default_m_sub(grid.n_steps, n_coarse)
    m = r if m_sub is None else m_sub
    values = wz_batch(x0, sample.db, sample.dq, grid.dt, coeffs, n_coarse, m)[0]
    return GridPath(TimeGrid(n_coarse * m, grid.t_start, grid.t_end), values)


def coarse_increments(db, dq, n_coarse):
    db, dq = _rows(db), _rows(dq)
    n_paths, n_fine = db.shape
    r = default_m_sub(n_fine, n_coarse)
    return (
        db.reshape(n_paths, n_coarse, r).sum(axis=2),
        dq.reshape(n_paths, n_coarse, r).sum(axis=2),
    )


def em_g_batch(x0, db, dq, dt, coeffs: CoeffSet, n_coarse: int, correction: bool = True) -> np.ndarray:
    db_c, dq_c = coarse_increments(db, dq, n_coarse)
    cell = dt * (db.shape[-1] // n_coarse)
    blocks = 0.5 * dq_c if correction else np.zeros_like(dq_c)
    out, bad_path, bad_step = kernels.taylor2(
        _x0_array(x0, db_c.shape[0]), db_c, blocks, dq_c, cell,
        coeffs.f.spec, coeffs.g.spec, coeffs.h.spec, DIVERGENCE_GUARD,
    )
    if bad_step >= 0:
        raise_divergence(bad_path, bad_step, "Maruyama scheme")
    return out


def euler_maruyama_g(sample: GBMSample, coeffs: CoeffSet, x0: float, n_coarse: int, correction: bool = True) -> GridPath:
    """Coarse recursion ``X_j = X_{j-1} + f dB + (g + f'f/2) d<B> + h dt``.

    With ``correction=False`` the ``f'f/2`` term is dropped.
    """
    grid = sample.grid
    values = em_g_batch(x0, sample.db, sample.dq, grid.dt, coeffs, n_coarse, correction)[0]
    return GridPath(grid.coarsen(n_coarse), values)


def stratonovich_integral(y: GridPath, sample: GBMSample) -> float:
    """``int Y o dB = int Y dB + <Y, B> / 2`` with discrete Itô sum and covariation."""
    return ito_integral(y, sample) + 0.5 * qv_bracket(y, sample.b)
