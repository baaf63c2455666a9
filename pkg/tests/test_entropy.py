import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

import repscan as rs
from repscan.entropy import q_add, q_exp, q_log
from repscan.errors import NonIntegrablePower, QExpDomain
from repscan.grid import GriddedDensity

LN2 = math.log(2.0)


class TestRenyiEntropy:
    @pytest.mark.parametrize("q", [0.5, 1.5, 2.0, 3.0])
    def test_unit_box_is_zero(self, unit_box, q):
        assert rs.renyi_entropy(unit_box, q).value == pytest.approx(0.0, abs=1e-12)

    def test_gaussian_order_two(self, gauss1):
        # integral F^2 = 1/(2 sqrt(pi)) => I_2 = ln(2 sqrt(pi)) = ln(4 pi)/2
        assert rs.renyi_entropy(gauss1, 2.0).value == pytest.approx(
            0.5 * math.log(4 * math.pi), abs=1e-6
        )

    def test_continuity_at_one(self, gauss1):
        near = rs.renyi_entropy(gauss1, 1.0 + 1e-6).value
        exact = rs.shannon_entropy(gauss1).value
        assert abs(near - exact) < 1e-4

    def test_base_conversion_exact(self, gauss1):
        nats = rs.renyi_entropy(gauss1, 2.0, "nats")
        bits = rs.renyi_entropy(gauss1, 2.0, "bits")
        assert bits.value == nats.value / LN2
        assert nats.to("bits").value == bits.value

    def test_nonfinite_density_rejected(self, grid1d):
        vals = np.ones(2048)
        vals[0] = np.inf
        with pytest.raises(NonIntegrablePower):
            rs.renyi_entropy(GriddedDensity(grid1d, vals), 2.0)


class TestShannonEntropy:
    def test_unit_box_zero(self, unit_box):
        assert rs.shannon_entropy(unit_box).value == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("var", [0.5, 1.0, 2.0])
    def test_gaussian_closed_form(self, grid1d, var):
        d = rs.gaussian_density(grid1d, 0.0, var)
        expected = 0.5 * math.log(2 * math.pi * math.e * var)
        assert rs.shannon_entropy(d).value == pytest.approx(expected, abs=1e-6)

    def test_doubling_scale_adds_ln2(self, grid1d):
        # x -> 2x maps N(0, 1/2) to N(0, 2)
        h_half = rs.shannon_entropy(rs.gaussian_density(grid1d, 0.0, 0.5)).value
        h_two = rs.shannon_entropy(rs.gaussian_density(grid1d, 0.0, 2.0)).value
        assert h_two - h_half == pytest.approx(LN2, abs=1e-9)


class TestTsallisEntropy:
    @pytest.mark.parametrize("q", [0.5, 2.0, 3.0])
    def test_unit_box_zero(self, unit_box, q):
        assert rs.tsallis_entropy(unit_box, q).value == pytest.approx(0.0, abs=1e-12)

    def test_gaussian_order_two(self, gauss1):
        expected = 1.0 - 1.0 / (2.0 * math.sqrt(math.pi))
        value = rs.tsallis_entropy(gauss1, 2.0).value
        assert value == pytest.approx(expected, abs=1e-6)
        # Same number through the q-log closed form for a unit Gaussian.
        q, qp = 2.0, 2.0
        assert value == pytest.approx(
            q_log(math.sqrt(2 * math.pi * q ** (qp / q)), 2.0), abs=1e-6
        )

    def test_near_one_matches_shannon(self, gauss1):
        near = rs.tsallis_entropy(gauss1, 1.0 + 1e-6).value
        assert abs(near - rs.shannon_entropy(gauss1).value) < 1e-4

    def test_q_one_rejected(self, gauss1):
        with pytest.raises(ValueError):
            rs.tsallis_entropy(gauss1, 1.0)


class TestRenyiEntropyPower:
    def test_gaussian_any_order_gives_variance(self, grid1d):
        d = rs.gaussian_density(grid1d, 0.0, 2.0)
        assert rs.renyi_entropy_power(d, 1.7) == pytest.approx(2.0, abs=1e-5)

    def test_unit_box_order_two(self, unit_box):
        assert rs.renyi_entropy_power(unit_box, 2.0) == pytest.approx(
            1.0 / (4.0 * math.pi), abs=1e-6
        )

    def test_shannon_dispatch_continuous(self, gauss1):
        a = rs.renyi_entropy_power(gauss1, 1.0)
        b = rs.renyi_entropy_power(gauss1, 1.0 + 1e-6)
        assert abs(a - b) / a < 1e-4

    def test_conventions_agree(self, bcs):
        for p in (0.7, 1.0, 1.5, 3.0):
            a = rs.renyi_entropy_power(bcs, p, "nats_exp")
            b = rs.renyi_entropy_power(bcs, p, "bits_exp")
            assert abs(a - b) / a < 1e-12

    def test_scale_covariance(self, grid1d):
        # x -> 2x: N_p picks up the squared factor.
        base = rs.gaussian_density(grid1d, 0.0, 1.0)
        wide_grid = rs.grid_1d(-24.0, 24.0, 2048)
        scaled = rs.gaussian_density(wide_grid, 0.0, 4.0)
        for p in (0.8, 1.5):
            assert rs.renyi_entropy_power(scaled, p) == pytest.approx(
                4.0 * rs.renyi_entropy_power(base, p), rel=1e-6
            )


class TestTsallisEntropyPower:
    def test_coincides_with_renyi(self, all_fixtures):
        for name, d in all_fixtures.items():
            for q in (0.7, 1.3, 2.0):
                nt = rs.tsallis_entropy_power(d, q)
                nr = rs.renyi_entropy_power(d, q)
                assert abs(nt - nr) / nr < 1e-10, (name, q)

    def test_gaussian_order_two(self, gauss1):
        assert rs.tsallis_entropy_power(gauss1, 2.0) == pytest.approx(1.0, abs=1e-5)

    def test_near_one_matches_shannon_power(self, gauss1):
        a = rs.tsallis_entropy_power(gauss1, 1.0 + 1e-6)
        b = rs.renyi_entropy_power(gauss1, 1.0)
        assert abs(a - b) / b < 1e-4

    def test_qexp_domain_guard(self, grid1d):
        degenerate = GriddedDensity(grid1d, np.full(2048, 1e-250))
        with pytest.raises(QExpDomain):
            rs.tsallis_entropy_power(degenerate, 2.0)


class TestEntropyPowerCurve:
    def test_gaussian_constant(self, gauss1):
        curve = rs.entropy_power_curve(gauss1, 0.01, 6)
        assert np.allclose(curve.values, 1.0, atol=1e-5)
        assert [k for k, _ in curve.powers] == list(range(6))

    def test_bcs_constant_within_tolerance(self, bcs):
        curve = rs.entropy_power_curve(bcs, 0.01, 6)
        vals = curve.values
        assert np.ptp(vals) / vals.mean() <= 1e-4

    def test_ucs_spread_exceeds_gaussian(self, gauss1, ucs):
        gvals = rs.entropy_power_curve(gauss1, 0.01, 6).values
        uvals = rs.entropy_power_curve(ucs, 0.01, 6).values
        g_spread = np.ptp(gvals) / gvals.mean()
        u_spread = np.ptp(uvals) / uvals.mean()
        assert u_spread > 10.0 * g_spread

    def test_delta_validated(self, gauss1):
        with pytest.raises(ValueError):
            rs.entropy_power_curve(gauss1, 0.5, 4)


class TestTwoDimensional:
    @pytest.fixture(scope="class")
    @staticmethod
    def gauss2d():
        spec = rs.GridSpec((rs.Axis(-10, 10, 256), rs.Axis(-16, 16, 384)))
        return rs.gaussian_density(spec, [0.0, 0.0], [[1.0, 0.0], [0.0, 4.0]])

    def test_shannon_closed_form(self, gauss2d):
        expected = 0.5 * math.log((2 * math.pi * math.e) ** 2 * 4.0)
        assert rs.shannon_entropy(gauss2d).value == pytest.approx(expected, abs=1e-5)

    @pytest.mark.parametrize("p", [0.8, 1.0, 2.0])
    def test_entropy_power_is_det_root(self, gauss2d, p):
        assert rs.renyi_entropy_power(gauss2d, p) == pytest.approx(2.0, abs=1e-4)


class TestOrderMonotonicity:
    def test_renyi_entropy_nonincreasing_in_q(self, all_fixtures):
        qs = [0.5, 0.8, 1.0, 1.5, 2.0, 3.0]
        for name, d in all_fixtures.items():
            vals = [rs.renyi_entropy(d, q).value for q in qs]
            diffs = np.diff(vals)
            assert np.all(diffs <= 1e-12), (name, vals)


class TestGaussianBounds:
    def test_shannon_power_below_variance(self, all_fixtures):
        for name, d in all_fixtures.items():
            n1 = rs.renyi_entropy_power(d, 1.0)
            cap = float(np.linalg.det(rs.covariance_matrix(d))) ** (1.0 / d.spec.dim)
            assert n1 <= cap + 1e-8, name

    @pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0])
    def test_order_chain(self, smooth_fixtures, q):
        # q^{1/(q-1)}/e * N_q <= N_1 <= det(cov)^{1/D}
        prefactor = math.e if q == 1.0 else math.exp(math.log(q) / (q - 1.0))
        for name, d in smooth_fixtures.items():
            nq = rs.renyi_entropy_power(d, q)
            n1 = rs.renyi_entropy_power(d, 1.0)
            cap = float(np.linalg.det(rs.covariance_matrix(d))) ** (1.0 / d.spec.dim)
            assert prefactor / math.e * nq <= n1 + 1e-8, (name, q)
            assert n1 <= cap + 1e-8, name


class TestTsallisScaling:
    @pytest.mark.parametrize("q", [0.8, 1.5, 2.0])
    def test_scaling_property(self, q):
        a = 2.0
        base_grid = rs.grid_1d(-12.0, 12.0, 2048)
        wide_grid = rs.grid_1d(-24.0, 24.0, 2048)
        s_base = rs.tsallis_entropy(rs.gaussian_density(base_grid, 0.0, 1.0), q).value
        s_scaled = rs.tsallis_entropy(rs.gaussian_density(wide_grid, 0.0, a**2), q).value
        expected = q_add(s_base, q_log(a, q), q)
        assert s_scaled == pytest.approx(expected, abs=1e-6)


class TestQCalculus:
    @settings(max_examples=50, deadline=None)
    @given(x=hst.floats(0.1, 10.0), q=hst.floats(0.2, 3.0))
    def test_qexp_inverts_qlog(self, x, q):
        assert q_exp(q_log(x, q), q) == pytest.approx(x, rel=1e-9)

    @settings(max_examples=50, deadline=None)
    @given(x=hst.floats(0.1, 10.0), y=hst.floats(0.1, 10.0), q=hst.floats(0.2, 3.0))
    def test_qlog_product_rule(self, x, y, q):
        assert q_add(q_log(x, q), q_log(y, q), q) == pytest.approx(q_log(x * y, q), rel=1e-9)
