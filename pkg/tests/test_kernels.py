import math

import numpy as np
import pytest

from qprobe import (
    AdimensionalPoint,
    NoiseKernel,
    QuadratureSpec,
    beta,
    beta_numeric,
    dbeta_dg,
    kernel_value,
)

OU = NoiseKernel.ou()
GAUSS = NoiseKernel.gaussian()
PL3 = NoiseKernel.power_law(3.0)
KERNELS = [OU, GAUSS, PL3]

G_GRID = [0.01, 0.1, 1.0, 10.0, 100.0]
TAU_GRID = [0.1, 0.5, 1.0, 2.0, 5.0]


def richardson_fd_dbeta(kernel, g, tau, rel_step=1e-6):
    """Independent derivative oracle: Richardson-extrapolated central
    differences of the closed-form beta."""

    def central(h):
        up = beta(kernel, AdimensionalPoint(g + h, tau))
        down = beta(kernel, AdimensionalPoint(g - h, tau))
        return (up - down) / (2.0 * h)

    h = rel_step * g
    return (4.0 * central(0.5 * h) - central(h)) / 3.0


class TestConstruction:
    def test_power_law_alpha_must_exceed_two(self):
        with pytest.raises(ValueError):
            NoiseKernel.power_law(2.0)
        with pytest.raises(ValueError):
            NoiseKernel.power_law(1.5)
        assert NoiseKernel.power_law(2.0 + 1e-12).alpha > 2.0

    def test_alpha_rejected_for_other_kinds(self):
        from qprobe import KernelKind

        with pytest.raises(ValueError):
            NoiseKernel(KernelKind.OU, alpha=3.0)

    def test_point_validation(self):
        with pytest.raises(ValueError):
            AdimensionalPoint(0.0, 1.0)
        with pytest.raises(ValueError):
            AdimensionalPoint(-1.0, 1.0)
        with pytest.raises(ValueError):
            AdimensionalPoint(1.0, -0.1)
        with pytest.raises(ValueError):
            AdimensionalPoint(math.inf, 1.0)

    def test_dimensional_normalization(self):
        point = AdimensionalPoint.from_dimensional(gamma=2.0, damping_rate=2.0, t=0.5)
        assert point.g == 1.0 and point.tau == 1.0

    def test_quadrature_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(1)
        with pytest.raises(ValueError):
            QuadratureSpec(511, "simpson")
        with pytest.raises(ValueError):
            QuadratureSpec(512, "gauss")
        QuadratureSpec(511, "midpoint")


class TestKernelValue:
    def test_ou_zero_lag(self):
        assert kernel_value(OU, 1.0, 0.0) == 0.5

    def test_power_law_direct_substitution(self):
        # independent evaluation of the closed form at alpha=3, g=1, dt=1
        assert kernel_value(PL3, 1.0, 1.0) == pytest.approx(
            0.5 * (3.0 - 1.0) * 1.0 / (1.0 + 1.0) ** 3, rel=1e-15
        )
        assert kernel_value(PL3, 1.0, 1.0) == pytest.approx(0.125, rel=1e-15)

    def test_gauss_zero_lag(self):
        assert kernel_value(GAUSS, 2.0, 0.0) == pytest.approx(
            2.0 / math.sqrt(math.pi), rel=1e-15
        )

    @pytest.mark.parametrize("kernel", KERNELS)
    @pytest.mark.parametrize("dt", [0.0, 1e-6, 0.3, 1.0, 7.5, 123.0])
    def test_evenness(self, kernel, dt):
        for g in (0.05, 1.0, 40.0):
            assert kernel_value(kernel, g, dt) == kernel_value(kernel, g, -dt)

    def test_positive_everywhere(self):
        # all three kernels are nonnegative with no anticorrelation lobes;
        # the Gaussian one underflows to zero at very large lag
        for kernel in KERNELS:
            for dt in (0.0, 0.5, 5.0, 20.0):
                assert kernel_value(kernel, 1.0, dt) > 0.0
            assert kernel_value(kernel, 1.0, 1e6) >= 0.0

    def test_rejects_nonpositive_g(self):
        with pytest.raises(ValueError):
            kernel_value(OU, 0.0, 1.0)


class TestBetaClosedForm:
    def test_zero_at_tau_zero(self):
        for kernel in KERNELS:
            assert beta(kernel, AdimensionalPoint(1.0, 0.0)) == 0.0

    def test_ou_unit_point(self):
        assert beta(OU, AdimensionalPoint(1.0, 1.0)) == pytest.approx(
            math.exp(-1.0), rel=1e-14
        )

    def test_power_law_unit_point(self):
        assert beta(PL3, AdimensionalPoint(1.0, 1.0)) == pytest.approx(0.5, rel=1e-14)

    @pytest.mark.parametrize("kernel", KERNELS)
    @pytest.mark.parametrize("g", G_GRID)
    def test_monotone_in_tau(self, kernel, g):
        taus = [0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0]
        values = [beta(kernel, AdimensionalPoint(g, t)) for t in taus]
        assert all(b > a for a, b in zip(values, values[1:]))
        assert all(v > 0.0 for v in values)

    @pytest.mark.parametrize("kernel", KERNELS)
    @pytest.mark.parametrize("tau", TAU_GRID)
    def test_monotone_in_g(self, kernel, tau):
        gs = np.logspace(-3, 3, 25)
        values = [beta(kernel, AdimensionalPoint(g, tau)) for g in gs]
        assert all(b > a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("kernel", KERNELS)
    @pytest.mark.parametrize("tau", TAU_GRID)
    def test_saturates_to_tau_at_large_g(self, kernel, tau):
        assert beta(kernel, AdimensionalPoint(1e6, tau)) == pytest.approx(
            tau, abs=1e-3
        )

    @pytest.mark.parametrize("g", [1e-6, 3e-5, 9.9e-5])
    def test_series_branch_matches_stable_closed_form(self, g):
        # below g*tau = 1e-4 a short series replaces the closed forms; check
        # it against direct expm1/log1p evaluations, which stay accurate in
        # this range
        tau = 1.0
        x = g * tau
        # the direct evaluations cancel like x^2/terms, so they are only
        # trustworthy to ~eps/x^2 relative here; the series is the sharper path
        rel = max(1e-12, 4e-16 / (x * x) * x)
        assert beta(OU, AdimensionalPoint(g, tau)) == pytest.approx(
            (x + math.expm1(-x)) / g, rel=rel
        )
        assert beta(GAUSS, AdimensionalPoint(g, tau)) == pytest.approx(
            tau * math.erf(x) + math.expm1(-x * x) / (g * math.sqrt(math.pi)),
            rel=1e-10,
        )
        alpha = PL3.alpha
        assert beta(PL3, AdimensionalPoint(g, tau)) == pytest.approx(
            (math.expm1((2.0 - alpha) * math.log1p(x)) + (alpha - 2.0) * x)
            / (g * (alpha - 2.0)),
            rel=rel,
        )
        # the derivative's direct form cancels like x^2 against 1
        assert dbeta_dg(OU, AdimensionalPoint(g, tau)) == pytest.approx(
            (1.0 - math.exp(-x) * (1.0 + x)) / (g * g),
            rel=max(1e-8, 2e-15 / (x * x)),
        )


class TestBetaNumericOracle:
    def test_zero_measure_domain(self):
        for kernel in KERNELS:
            for rule in ("midpoint", "simpson"):
                assert (
                    beta_numeric(kernel, AdimensionalPoint(1.0, 0.0), QuadratureSpec(64, rule))
                    == 0.0
                )

    def test_gauss_default_spec_hits_closed_form(self):
        point = AdimensionalPoint(1.0, 1.0)
        quad = beta_numeric(GAUSS, point, QuadratureSpec(512, "simpson"))
        assert quad == pytest.approx(beta(GAUSS, point), abs=1e-8)

    def test_ou_small_g_long_time(self):
        point = AdimensionalPoint(0.01, 8.0)
        quad = beta_numeric(OU, point, QuadratureSpec(512, "simpson"))
        assert quad == pytest.approx(beta(OU, point), abs=1e-8)

    def test_refinement_study_converges_at_fourth_order(self):
        # halving h must shrink the Simpson error by roughly 2^4
        point = AdimensionalPoint(1.0, 1.0)
        errors = [
            abs(beta_numeric(OU, point, QuadratureSpec(n, "simpson")) - beta(OU, point))
            for n in (64, 128, 256)
        ]
        assert errors[0] / errors[1] > 8.0
        assert errors[1] / errors[2] > 8.0

    def test_midpoint_rule_agrees_at_its_own_order(self):
        point = AdimensionalPoint(1.0, 1.0)
        quad = beta_numeric(OU, point, QuadratureSpec(2048, "midpoint"))
        assert quad == pytest.approx(beta(OU, point), abs=1e-6)

    @pytest.mark.parametrize("kernel", KERNELS)
    def test_moderate_grid_agreement(self, kernel):
        # cheap sweep of the moderate corner of the oracle grid; the full
        # 5x5 grid with adaptive refinement runs in the acceptance suite
        for g in (0.01, 0.1, 1.0):
            for tau in (0.1, 0.5, 1.0, 2.0):
                point = AdimensionalPoint(g, tau)
                quad = beta_numeric(kernel, point, QuadratureSpec(512, "simpson"))
                assert quad == pytest.approx(beta(kernel, point), abs=1e-8), (g, tau)


class TestDbetaDg:
    def test_ou_unit_point_closed_form(self):
        assert dbeta_dg(OU, AdimensionalPoint(1.0, 1.0)) == pytest.approx(
            1.0 - 2.0 * math.exp(-1.0), rel=1e-14
        )

    def test_zero_limit_at_tau_zero(self):
        for kernel in KERNELS:
            assert dbeta_dg(kernel, AdimensionalPoint(1.0, 0.0)) == 0.0

    @pytest.mark.parametrize("kernel", KERNELS)
    def test_finite_difference_agreement(self, kernel):
        for g in G_GRID:
            for tau in TAU_GRID:
                fd = richardson_fd_dbeta(kernel, g, tau)
                closed = dbeta_dg(kernel, AdimensionalPoint(g, tau))
                assert closed == pytest.approx(fd, rel=1e-6), (g, tau)

    @pytest.mark.parametrize("kernel", KERNELS)
    def test_positive_for_positive_tau(self, kernel):
        for g in G_GRID:
            for tau in TAU_GRID:
                assert dbeta_dg(kernel, AdimensionalPoint(g, tau)) > 0.0

    def test_vanishes_with_tau(self):
        for kernel in KERNELS:
            small = dbeta_dg(kernel, AdimensionalPoint(1.0, 1e-7))
            assert 0.0 < small < 1e-13
