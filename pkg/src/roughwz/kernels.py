"""Hot numeric kernels, each with a numba loop and a pure-numpy twin.

The public wrappers at the bottom dispatch on :data:`roughwz._accel.USE_NUMBA`
at call time. Both twins evaluate the same pair sets and the same recursions,
so they agree to rounding (the test suite checks this).

Field codes used by the scheme kernels::

    0 zero, 1 const, 2 linear (scale * x), 3 sin, 4 cos, 5 tanh

Every field is ``scale * base(x)``.
"""

import numpy as np

from . import _accel
from ._accel import njit

FIELD_ZERO = 0
FIELD_CONST = 1
FIELD_LINEAR = 2
FIELD_SIN = 3
FIELD_COS = 4
FIELD_TANH = 5


def field_eval(code, scale, x):
    """Return ``(f, f', f'')`` of a catalogue field at ``x`` (scalar or array)."""
    zero = 0.0 * x
    if code == FIELD_CONST:
        return scale + zero, zero, zero
    if code == FIELD_LINEAR:
        return scale * x, scale + zero, zero
    if code == FIELD_SIN:
        s = np.sin(x)
        c = np.cos(x)
        return scale * s, scale * c, -scale * s
    if code == FIELD_COS:
        s = np.sin(x)
        c = np.cos(x)
        return scale * c, -scale * s, -scale * c
    if code == FIELD_TANH:
        t = np.tanh(x)
        d = 1.0 - t * t
        return scale * t, scale * d, -2.0 * scale * t * d
    return zero, zero, zero


_field_nb = njit(cache=True)(field_eval)


# ---------------------------------------------------------------------------
# Hölder sups over a set of index gaps


@njit(cache=True)
def _holder_sup_nb(x, dt, alpha, gaps):
    n = x.shape[0] - 1
    best = 0.0
    for g in gaps:
        m = 0.0
        for s in range(n - g + 1):
            d = abs(x[s + g] - x[s])
            if d > m:
                m = d
        v = m / (g * dt) ** alpha
        if v > best:
            best = v
    return best


def _holder_sup_np(x, dt, alpha, gaps):
    best = 0.0
    for g in gaps:
        g = int(g)
        m = np.max(np.abs(x[g:] - x[:-g]))
        best = max(best, m / (g * dt) ** alpha)
    return float(best)


def level2_prefix(x, blocks):
    """Prefix sums ``P[k] = sum_{i<k} (blocks[i] + x[i] * dx[i])``.

    With them the Chen-composed second level is
    ``eval(s, t) = P[t] - P[s] - x[s] * (x[t] - x[s])``.
    """
    p = np.zeros(x.shape[0])
    np.cumsum(blocks + x[:-1] * np.diff(x), out=p[1:])
    return p


@njit(cache=True)
def _level2_diff_sup_nb(pa, xa, pb, xb, dt, two_alpha, gaps):
    n = xa.shape[0] - 1
    best = 0.0
    for g in gaps:
        m = 0.0
        for s in range(n - g + 1):
            t = s + g
            va = pa[t] - pa[s] - xa[s] * (xa[t] - xa[s])
            vb = pb[t] - pb[s] - xb[s] * (xb[t] - xb[s])
            d = abs(va - vb)
            if d > m:
                m = d
        v = m / (g * dt) ** two_alpha
        if v > best:
            best = v
    return best


def _level2_diff_sup_np(pa, xa, pb, xb, dt, two_alpha, gaps):
    best = 0.0
    for g in gaps:
        g = int(g)
        va = pa[g:] - pa[:-g] - xa[:-g] * (xa[g:] - xa[:-g])
        vb = pb[g:] - pb[:-g] - xb[:-g] * (xb[g:] - xb[:-g])
        m = np.max(np.abs(va - vb))
        best = max(best, m / (g * dt) ** two_alpha)
    return float(best)


# ---------------------------------------------------------------------------
# Chen composition of a single second-level increment


@njit(cache=True)
def _chen_eval_nb(x, blocks, s, t):
    acc = 0.0
    run = 0.0
    for i in range(s, t):
        dx = x[i + 1] - x[i]
        acc += blocks[i] + run * dx
        run += dx
    return acc


def _chen_eval_np(x, blocks, s, t):
    if t == s:
        return 0.0
    dx = np.diff(x[s : t + 1])
    run = np.concatenate(([0.0], np.cumsum(dx)[:-1]))
    return float(np.sum(blocks[s:t]) + np.dot(run, dx))


# ---------------------------------------------------------------------------
# Scheme recursions, batched over paths (rows)
#
# taylor2:  y <- y + f dB + f'f * block + g dq + h dt
# wz_ode:   per coarse cell, m Euler sub-steps of y' = speed f(y) + g dq/dt + h


@njit(cache=True)
def _taylor2_nb(y0, dB, blocks, dq, dt, fc, fs, gc, gs, hc, hs, guard):
    n_paths, n = dB.shape
    out = np.empty((n_paths, n + 1))
    for p in range(n_paths):
        y = y0[p]
        out[p, 0] = y
        for k in range(n):
            f, f1, _ = _field_nb(fc, fs, y)
            g, _, _ = _field_nb(gc, gs, y)
            h, _, _ = _field_nb(hc, hs, y)
            y = y + f * dB[p, k] + f1 * f * blocks[p, k] + g * dq[p, k] + h * dt
            out[p, k + 1] = y
            if not (abs(y) <= guard):
                return out, p, k
    return out, -1, -1


def _taylor2_np(y0, dB, blocks, dq, dt, fc, fs, gc, gs, hc, hs, guard):
    n_paths, n = dB.shape
    out = np.empty((n_paths, n + 1))
    y = np.array(y0, dtype=float)
    out[:, 0] = y
    for k in range(n):
        f, f1, _ = field_eval(fc, fs, y)
        g, _, _ = field_eval(gc, gs, y)
        h, _, _ = field_eval(hc, hs, y)
        y = y + f * dB[:, k] + f1 * f * blocks[:, k] + g * dq[:, k] + h * dt
        out[:, k + 1] = y
        bad = ~(np.abs(y) <= guard)
        if bad.any():
            return out, int(np.argmax(bad)), k
    return out, -1, -1


@njit(cache=True)
def _wz_ode_nb(y0, speed, dq_sub, delta, m, fc, fs, gc, gs, hc, hs, guard):
    n_paths, n = speed.shape
    out = np.empty((n_paths, n * m + 1))
    for p in range(n_paths):
        y = y0[p]
        out[p, 0] = y
        k = 0
        for j in range(n):
            v = speed[p, j]
            for _ in range(m):
                f, _, _ = _field_nb(fc, fs, y)
                g, _, _ = _field_nb(gc, gs, y)
                h, _, _ = _field_nb(hc, hs, y)
                y = y + v * f * delta + g * dq_sub[p, k] + h * delta
                k += 1
                out[p, k] = y
                if not (abs(y) <= guard):
                    return out, p, k - 1
    return out, -1, -1


def _wz_ode_np(y0, speed, dq_sub, delta, m, fc, fs, gc, gs, hc, hs, guard):
    n_paths, n = speed.shape
    out = np.empty((n_paths, n * m + 1))
    y = np.array(y0, dtype=float)
    out[:, 0] = y
    k = 0
    for j in range(n):
        v = speed[:, j]
        for _ in range(m):
            f, _, _ = field_eval(fc, fs, y)
            g, _, _ = field_eval(gc, gs, y)
            h, _, _ = field_eval(hc, hs, y)
            y = y + v * f * delta + g * dq_sub[:, k] + h * delta
            k += 1
            out[:, k] = y
            bad = ~(np.abs(y) <= guard)
            if bad.any():
                return out, int(np.argmax(bad)), k - 1
    return out, -1, -1


# ---------------------------------------------------------------------------
# dispatch


def holder_sup(x, dt, alpha, gaps):
    x = np.ascontiguousarray(x, dtype=float)
    gaps = np.ascontiguousarray(gaps, dtype=np.int64)
    if _accel.USE_NUMBA:
        return float(_holder_sup_nb(x, float(dt), float(alpha), gaps))
    return _holder_sup_np(x, dt, alpha, gaps)


def level2_diff_sup(xa, blocks_a, xb, blocks_b, dt, two_alpha, gaps):
    xa = np.ascontiguousarray(xa, dtype=float)
    xb = np.ascontiguousarray(xb, dtype=float)
    pa = level2_prefix(xa, np.asarray(blocks_a, dtype=float))
    pb = level2_prefix(xb, np.asarray(blocks_b, dtype=float))
    gaps = np.ascontiguousarray(gaps, dtype=np.int64)
    if _accel.USE_NUMBA:
        return float(_level2_diff_sup_nb(pa, xa, pb, xb, float(dt), float(two_alpha), gaps))
    return _level2_diff_sup_np(pa, xa, pb, xb, dt, two_alpha, gaps)


def chen_eval(x, blocks, s, t):
    if _accel.USE_NUMBA:
        return float(_chen_eval_nb(x, blocks, int(s), int(t)))
    return _chen_eval_np(x, blocks, s, t)


def taylor2(y0, dB, blocks, dq, dt, f, g, h, guard):
    """Batched second-order step; ``f, g, h`` are ``(code, scale)`` pairs."""
    args = (
        np.ascontiguousarray(y0, dtype=float),
        np.ascontiguousarray(dB, dtype=float),
        np.ascontiguousarray(blocks, dtype=float),
        np.ascontiguousarray(dq, dtype=float),
        float(dt),
        f[0], float(f[1]), g[0], float(g[1]), h[0], float(h[1]),
        float(guard),
    )
    kernel = _taylor2_nb if _accel.USE_NUMBA else _taylor2_np
    out, bad_path, bad_step = kernel(*args)
    return out, int(bad_path), int(bad_step)


def wz_ode(y0, speed, dq_sub, delta, m, f, g, h, guard):
    args = (
        np.ascontiguousarray(y0, dtype=float),
        np.ascontiguousarray(speed, dtype=float),
        np.ascontiguousarray(dq_sub, dtype=float),
        float(delta),
        int(m),
        f[0], float(f[1]), g[0], float(g[1]), h[0], float(h[1]),
        float(guard),
    )
    kernel = _wz_ode_nb if _accel.USE_NUMBA else _wz_ode_np
    out, bad_path, bad_step = kernel(*args)
    return out, int(bad_path), int(bad_step)
