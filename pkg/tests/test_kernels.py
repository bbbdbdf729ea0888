"""The numba loops and the numpy twins must agree."""

import numpy as np
import pytest

from roughwz import _accel, kernels
from roughwz.path_core import pair_gaps

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def both(monkeypatch, fn, *args):
    monkeypatch.setattr(_accel, "USE_NUMBA", True)
    a = fn(*args)
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    b = fn(*args)
    return a, b


@pytest.mark.parametrize("n, exact", [(1, True), (7, True), (300, True), (300, False)])
def test_holder_sup_twins(monkeypatch, rng, n, exact):
    x = np.cumsum(rng.standard_normal(n + 1))
    a, b = both(monkeypatch, kernels.holder_sup, x, 1.0 / n, 0.4, pair_gaps(n, exact))
    assert a == pytest.approx(b, rel=1e-14)


@pytest.mark.parametrize("n, exact", [(1, True), (64, True), (257, False)])
def test_level2_diff_sup_twins(monkeypatch, rng, n, exact):
    xa = np.cumsum(rng.standard_normal(n + 1))
    xb = np.cumsum(rng.standard_normal(n + 1))
    ba, bb = rng.standard_normal(n), rng.standard_normal(n)
    a, b = both(monkeypatch, kernels.level2_diff_sup, xa, ba, xb, bb, 1.0 / n, 0.8, pair_gaps(n, exact))
    assert a == pytest.approx(b, rel=1e-13)


def test_chen_eval_twins(monkeypatch, rng):
    x = np.cumsum(rng.standard_normal(51))
    blocks = rng.standard_normal(50)
    for s, t in [(0, 0), (0, 50), (3, 17), (49, 50)]:
        a, b = both(monkeypatch, kernels.chen_eval, x, blocks, s, t)
        assert a == pytest.approx(b, abs=1e-12)


FIELDS = [(kernels.FIELD_SIN, 1.0), (kernels.FIELD_COS, 0.5), (kernels.FIELD_TANH, -0.7),
          (kernels.FIELD_CONST, 2.0), (kernels.FIELD_LINEAR, 0.3), (kernels.FIELD_ZERO, 1.0)]


@pytest.mark.parametrize("f", FIELDS)
def test_taylor2_twins(monkeypatch, rng, f):
    db = rng.standard_normal((3, 40)) * 0.1
    dq = np.full((3, 40), 0.01)
    blocks = 0.5 * db * db
    args = (np.array([0.3, -1.0, 2.0]), db, blocks, dq, 0.01, f, (kernels.FIELD_COS, 0.2), (kernels.FIELD_SIN, -0.1), 1e6)
    (a, pa, sa), (b, pb, sb) = both(monkeypatch, kernels.taylor2, *args)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-14)
    assert (pa, sa) == (pb, sb) == (-1, -1)


def test_wz_ode_twins(monkeypatch, rng):
    speed = rng.standard_normal((2, 4)) * 2
    dq = np.full((2, 4 * 5), 0.05)
    args = (np.array([0.1, 1.0]), speed, dq, 0.05, 5, FIELDS[0], FIELDS[1], FIELDS[2], 1e6)
    (a, _, _), (b, _, _) = both(monkeypatch, kernels.wz_ode, *args)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-14)


def test_divergence_reported_at_same_step(monkeypatch):
    # y' = y dB with huge increments blows up deterministically
    db = np.full((1, 50), 3.0)
    args = (np.array([1.0]), db, np.zeros_like(db), np.zeros_like(db), 0.02,
            (kernels.FIELD_LINEAR, 1.0), (0, 0.0), (0, 0.0), 1e6)
    (_, pa, sa), (_, pb, sb) = both(monkeypatch, kernels.taylor2, *args)
    assert pa == pb == 0
    assert sa == sb
    assert 4 ** (sa + 1) > 1e6 >= 4**sa


def test_field_eval_derivatives_by_finite_differences():
    x = np.linspace(-2, 2, 9)
    h = 1e-6
    for code, scale in FIELDS:
        f, f1, f2 = kernels.field_eval(code, scale, x)
        fp, _, _ = kernels.field_eval(code, scale, x + h)
        fm, _, _ = kernels.field_eval(code, scale, x - h)
        np.testing.assert_allclose(f1, (fp - fm) / (2 * h), atol=1e-7)
        _, f1p, _ = kernels.field_eval(code, scale, x + h)
        _, f1m, _ = kernels.field_eval(code, scale, x - h)
        np.testing.assert_allclose(f2, (f1p - f1m) / (2 * h), atol=1e-7)
