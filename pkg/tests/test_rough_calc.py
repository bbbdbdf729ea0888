import numpy as np
import pytest

from helpers import fixed_sample
from roughwz.errors import ParameterError
from roughwz.fields import ScalarField, parse_field
from roughwz.lifts import ito_lift, strat_lift
from roughwz.path_core import TimeGrid, canonical_lift, linear_path, random_triples
from roughwz.rough_calc import (
    compose_field,
    default_gap_ladder,
    gubinelli_integral,
    local_error_exponent,
    make_controlled,
)

TOL = 1e-12


@pytest.fixture
def smooth():
    return canonical_lift(linear_path(TimeGrid(32), 1.0), 0.5)


@pytest.fixture
def brownian(sample_256):
    return strat_lift(sample_256, 0.4)


def pairs(n, count=200, seed=0):
    return random_triples(n, count, seed)[:, [0, 2]]


class TestControlledPath:
    def test_self_controlled(self, brownian):
        x = brownian.first.values
        cp = make_controlled(x, np.ones_like(x), brownian)
        assert cp.remainder_norm() == 0.0

    def test_constant(self, brownian):
        x = brownian.first.values
        cp = make_controlled(np.full_like(x, 4.0), np.zeros_like(x), brownian)
        assert cp.remainder_norm() == 0.0

    def test_square(self, brownian):
        x = brownian.first.values
        cp = make_controlled(x * x, 2 * x, brownian)
        for s, t in pairs(256):
            assert cp.remainder(s, t) == pytest.approx((x[t] - x[s]) ** 2, abs=TOL)

    def test_length_mismatch(self, brownian):
        with pytest.raises(ParameterError):
            make_controlled(np.zeros(10), np.zeros(257), brownian)

    def test_seminorm_of_self_is_zero(self, brownian):
        x = brownian.first.values
        assert make_controlled(x, np.ones_like(x), brownian).seminorm() == 0.0


class TestComposeField:
    def test_identity_field(self, brownian):
        x = brownian.first.values
        cp = make_controlled(x * x, 2 * x, brownian)
        out = compose_field(ScalarField("linear"), cp)
        np.testing.assert_array_equal(out.y.values, cp.y.values)
        np.testing.assert_array_equal(out.y_prime.values, cp.y_prime.values)

    def test_constant_field(self, brownian):
        x = brownian.first.values
        out = compose_field(parse_field("const:2.5"), make_controlled(x, np.ones_like(x), brownian))
        assert np.all(out.y.values == 2.5) and not np.any(out.y_prime.values)

    def test_sin_taylor_bound(self):
        rough = canonical_lift(linear_path(TimeGrid(32), 3.0), 0.45)
        x = rough.first.values
        out = compose_field(ScalarField("sin"), make_controlled(x, np.ones_like(x), rough))
        np.testing.assert_allclose(out.y.values, np.sin(x))
        np.testing.assert_allclose(out.y_prime.values, np.cos(x))
        for s in range(33):
            for t in range(s, 33):
                assert abs(out.remainder(s, t)) <= 0.5 * (x[t] - x[s]) ** 2 + 1e-15
        assert np.isfinite(out.remainder_norm())


class TestGubinelli:
    def test_self_integral_telescopes(self, brownian):
        x = brownian.first.values
        cp = make_controlled(x, np.ones_like(x), brownian)
        assert gubinelli_integral(cp, brownian) == pytest.approx(0.5 * x[-1] ** 2, abs=TOL)
        for s, t in pairs(256, 50):
            assert gubinelli_integral(cp, brownian, s, t) == pytest.approx(
                x[s] * (x[t] - x[s]) + 0.5 * (x[t] - x[s]) ** 2, abs=TOL
            )

    def test_constant_integrand(self, brownian):
        x = brownian.first.values
        cp = make_controlled(np.full_like(x, -1.5), np.zeros_like(x), brownian)
        assert gubinelli_integral(cp, brownian, 10, 200) == pytest.approx(-1.5 * (x[200] - x[10]), abs=TOL)

    def test_chain_rule_value(self):
        for n, tol in ((64, 1e-3), (4096, 1e-6)):
            rough = canonical_lift(linear_path(TimeGrid(n), 1.0), 0.5)
            x = rough.first.values
            assert gubinelli_integral(make_controlled(x * x, 2 * x, rough), rough) == pytest.approx(1 / 3, abs=tol)

    def test_additive(self, brownian):
        x = brownian.first.values
        cp = compose_field(ScalarField("sin"), make_controlled(x, np.ones_like(x), brownian))
        for s, u, t in random_triples(256, 100, 4):
            whole = gubinelli_integral(cp, brownian, s, t)
            parts = gubinelli_integral(cp, brownian, s, u) + gubinelli_integral(cp, brownian, u, t)
            assert abs(whole - parts) <= TOL

    def test_linear_in_integrand(self, brownian):
        x = brownian.first.values
        cp1 = compose_field(ScalarField("sin"), make_controlled(x, np.ones_like(x), brownian))
        cp2 = make_controlled(x * x, 2 * x, brownian)
        a, b = 0.7, -2.2
        lhs = gubinelli_integral(cp1.scaled(a) + cp2.scaled(b), brownian)
        rhs = a * gubinelli_integral(cp1, brownian) + b * gubinelli_integral(cp2, brownian)
        assert abs(lhs - rhs) <= TOL

    def test_strat_minus_ito(self, sample_256):
        s_lift, i_lift = strat_lift(sample_256, 0.4), ito_lift(sample_256, 0.4)
        x = s_lift.first.values
        cp_s = make_controlled(x, np.ones_like(x), s_lift)
        cp_i = make_controlled(x, np.ones_like(x), i_lift)
        diff = gubinelli_integral(cp_s, s_lift) - gubinelli_integral(cp_i, i_lift)
        assert diff == pytest.approx(0.5 * sample_256.qv.values[-1], abs=TOL)

    def test_index_order(self, brownian):
        x = brownian.first.values
        cp = make_controlled(x, np.ones_like(x), brownian)
        with pytest.raises(ParameterError):
            gubinelli_integral(cp, brownian, 5, 2)


class TestLocalExponent:
    def test_exact_sentinel(self, brownian):
        x = brownian.first.values
        report = local_error_exponent(make_controlled(x, np.ones_like(x), brownian), brownian)
        assert report.exact and report.slope is None

    def test_smooth_cubic(self):
        rough = canonical_lift(linear_path(TimeGrid(4096), 1.0), 0.5)
        x = rough.first.values
        report = local_error_exponent(make_controlled(x * x, 2 * x, rough), rough)
        assert report.gaps == (8, 16, 32, 64, 128, 256)
        assert report.slope >= 2.5

    def test_gap_ladder(self):
        assert default_gap_ladder(1024) == [64, 32, 16, 8, 4, 2]
        with pytest.raises(ParameterError):
            default_gap_ladder(16)

    def test_bad_gaps(self, brownian):
        x = brownian.first.values
        cp = make_controlled(x, np.ones_like(x), brownian)
        with pytest.raises(ParameterError):
            local_error_exponent(cp, brownian, gaps=[0, 4])


class TestFields:
    @pytest.mark.parametrize("text, kind, scale", [("sin", "sin", 1.0), ("0.5*tanh", "tanh", 0.5), ("const:2", "const", 2.0)])
    def test_parse(self, text, kind, scale):
        f = parse_field(text)
        assert (f.kind, f.scale) == (kind, scale)

    def test_unknown(self):
        with pytest.raises(ParameterError):
            parse_field("exp")

    def test_third_derivative(self):
        x = np.linspace(-1.5, 1.5, 7)
        h = 1e-5
        for kind in ("sin", "cos", "tanh"):
            f = ScalarField(kind, 0.8)
            np.testing.assert_allclose(f.d3(x), (f.d2(x + h) - f.d2(x - h)) / (2 * h), atol=1e-8)

    def test_sup_norms_cover_samples(self):
        x = np.linspace(-6, 6, 2001)
        for kind in ("sin", "cos", "tanh", "const"):
            f = ScalarField(kind, -1.3)
            norms = f.sup_norms()
            for k, fn in enumerate((f.eval, f.d1, f.d2, f.d3)):
                assert np.max(np.abs(fn(x))) <= norms[k] + 1e-12
        assert ScalarField("linear").sup_norms()[0] == np.inf
        assert not ScalarField("linear").bounded
