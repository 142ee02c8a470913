import math

import numpy as np
import pytest

from bwpc import analytic
from bwpc.analytic import (
    DegenerateDistributionError,
    EnergyMoments,
    GammaFit,
    energy_moments,
    energy_outage,
    energy_outage_approx,
    energy_outage_cantelli,
    gamma_fit,
    info_outage,
    mean_harvested_energy,
    poisson_cdf,
    poisson_cdf_deriv,
    spatial_throughput,
    variance_harvested_energy,
)
from bwpc.model import DerivedConstants, LinkTargets, NetworkParams, SlotConfig, derive, rate_bits


def defaults():
    return NetworkParams(), SlotConfig()


class TestMean:
    def test_reference_parameters(self):
        # 0.8*100*0.5*(2*2^-3 + pi*0.03*1*3*2^-1) = 40*(0.25 + 0.045*pi)
        p, s = defaults()
        assert mean_harvested_energy(p, s) == pytest.approx(
            40.0 * (0.25 + 0.045 * math.pi), rel=1e-14
        )

    def test_dedicated_reader_only(self):
        p, s = NetworkParams(lam=0.0), SlotConfig()
        assert mean_harvested_energy(p, s) == 10.0

    def test_no_harvest_phase(self):
        assert mean_harvested_energy(NetworkParams(), SlotConfig(T1=0.0, T2=0.5)) == 0.0


class TestVariance:
    def test_deterministic_without_interferers(self):
        assert variance_harvested_energy(NetworkParams(lam=0.0), SlotConfig()) == 0.0

    def test_density_scaling_structure(self):
        # var(lam) = A*lam + B*lam^2: the quadratic part quadruples when
        # the density doubles, the linear part doubles
        p, s = defaults()
        quad = (
            (p.eta * p.P_T * s.T1) ** 2
            * (math.pi * p.lam * (p.alpha / (p.alpha - 2.0)) * p.r_o ** (2.0 - p.alpha)) ** 2
            * (3.0 * s.T1**2 + 8.0 * s.T1 * s.T2 + 6.0 * s.T2**2)
            / 6.0
        )
        v1 = variance_harvested_energy(p, s)
        v2 = variance_harvested_energy(NetworkParams(lam=2 * p.lam), s)
        assert v2 == pytest.approx(2.0 * (v1 - quad) + 4.0 * quad, rel=1e-12)


class TestGammaFit:
    def test_exponential_case(self):
        fit = gamma_fit(EnergyMoments(mean=2.0, variance=4.0))
        assert (fit.k, fit.theta) == (1.0, 2.0)

    def test_shape_four(self):
        fit = gamma_fit(EnergyMoments(mean=4.0, variance=4.0))
        assert (fit.k, fit.theta) == (4.0, 1.0)

    def test_roundtrip(self):
        k, theta = 3.7, 0.2
        fit = gamma_fit(EnergyMoments(mean=k * theta, variance=k * theta**2))
        assert fit.k == pytest.approx(k, rel=1e-12)
        assert fit.theta == pytest.approx(theta, rel=1e-12)

    def test_degenerate_distribution_rejected(self):
        with pytest.raises(DegenerateDistributionError):
            gamma_fit(EnergyMoments(mean=10.0, variance=0.0))


class TestEnergyOutage:
    def test_exponential_cdf(self):
        p = energy_outage_approx(GammaFit(k=1.0, theta=2.0), E_C=2.0)
        assert p == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_zero_threshold(self):
        assert energy_outage_approx(GammaFit(k=1.7, theta=3.0), 0.0) == 0.0

    def test_matches_mpmath_reference(self):
        # independent high-precision oracle for the regularized lower gamma
        import mpmath

        for k, x in [(0.7, 0.3), (1.74, 0.89), (4.4, 2.3), (12.0, 15.0)]:
            want = float(mpmath.gammainc(k, 0, x, regularized=True))
            got = energy_outage_approx(GammaFit(k=k, theta=1.0), x)
            assert got == pytest.approx(want, rel=1e-10)

    def test_monotone_in_threshold_with_limits(self):
        fit = gamma_fit(energy_moments(*defaults()))
        grid = np.linspace(0.0, 200.0, 400)
        vals = [energy_outage_approx(fit, ec) for ec in grid]
        assert vals[0] == 0.0
        assert vals[-1] > 0.999999
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_degenerate_network_uses_indicator(self):
        p, s = NetworkParams(lam=0.0), SlotConfig()
        assert energy_outage(p, s, 12.0) == 1.0
        assert energy_outage(p, s, 8.0) == 0.0


class TestCantelli:
    def test_zero_gap_case(self):
        m = EnergyMoments(mean=10.0, variance=4.0)
        b = energy_outage_cantelli(m, 10.0)
        assert b.upper == 1.0
        assert b.lower == 0.0

    def test_one_sigma_upper(self):
        m = EnergyMoments(mean=10.0, variance=4.0)
        b = energy_outage_cantelli(m, 10.0 - 2.0)
        assert b.upper == pytest.approx(0.5)
        assert b.lower is None

    def test_one_sigma_lower(self):
        m = EnergyMoments(mean=10.0, variance=4.0)
        b = energy_outage_cantelli(m, 10.0 + 2.0)
        assert b.lower == pytest.approx(0.5)
        assert b.upper is None

    def test_bounds_bracket_gamma_approximation(self):
        # the fitted Gamma has the same first two moments, so the
        # distribution-free bounds must contain its CDF on their domains
        p, s = defaults()
        m = energy_moments(p, s)
        fit = gamma_fit(m)
        for ec in np.linspace(2.0, 20.0, 37):
            approx = energy_outage_approx(fit, ec)
            b = energy_outage_cantelli(m, ec)
            if b.upper is not None:
                assert approx <= b.upper + 1e-12
            if b.lower is not None:
                assert approx >= b.lower - 1e-12


class TestPoissonCdf:
    def test_at_zero(self):
        for m in (1, 2, 5, 8):
            assert poisson_cdf(0.0, m) == 1.0

    def test_single_antenna_closed_form(self):
        assert poisson_cdf(0.5, 1) == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            m = int(rng.integers(1, 9))
            x = float(rng.uniform(0.0, 10.0 * m))
            direct = math.exp(-x) * sum(x**i / math.factorial(i) for i in range(m))
            assert poisson_cdf(x, m) == pytest.approx(direct, rel=1e-10, abs=1e-300)

    def test_strictly_decreasing_in_x(self):
        x = np.linspace(0.0, 30.0, 500)
        for m in (1, 3, 6):
            vals = poisson_cdf(x, m)
            assert np.all(np.diff(vals) < 0)

    def test_strictly_increasing_in_antennas(self):
        for x in (0.5, 2.0, 7.0):
            vals = [poisson_cdf(x, m) for m in range(1, 9)]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_derivative_matches_central_differences(self):
        h = 1e-5
        for x in (0.5, 2.0, 7.0):
            for m in (1, 3, 5):
                numeric = (poisson_cdf(x + h, m) - poisson_cdf(x - h, m)) / (2 * h)
                assert poisson_cdf_deriv(x, m) == pytest.approx(numeric, abs=1e-6)

    def test_derivative_nonpositive(self):
        x = np.linspace(0.0, 20.0, 100)
        for m in (1, 2, 4):
            assert np.all(poisson_cdf_deriv(x, m) <= 0.0)


class TestInfoOutage:
    @staticmethod
    def _dc(active_density, interference_scale, noise_ratio, scaled_target):
        return DerivedConstants(
            delta=2 / 3,
            geom_const=1.0,
            scaled_target=scaled_target,
            interference_scale=interference_scale,
            incident_power_mw=1.0,
            noise_ratio=noise_ratio,
            active_density=active_density,
        )

    def test_silent_noise_free_network(self):
        dc = self._dc(0.0, 10.0, 0.0, 5.0)
        assert info_outage(dc, SlotConfig(), 3) == 0.0

    def test_single_antenna_closed_form(self):
        # load 0.5 with one antenna: 1 - e^-0.5
        dc = self._dc(1.0, 1.0, 0.0, 5.0)
        got = info_outage(dc, SlotConfig(T1=0.5, T2=0.5), 1, interference_limited=True)
        assert got == pytest.approx(1.0 - math.exp(-0.5), rel=1e-12)

    def test_noise_only_matches_gamma_tail(self):
        # no interferers: outage is the Gamma(M,1) lower tail at the
        # noise-scaled target
        from scipy import special

        dc = self._dc(0.0, 1.0, 0.1, 20.0)
        for m in (1, 3, 5):
            want = float(special.gammainc(m, 0.1 * 20.0))
            assert info_outage(dc, SlotConfig(), m) == pytest.approx(want, rel=1e-12)

    def test_interference_limited_monotone_in_slot_durations(self):
        p = NetworkParams()
        ec = 6.0
        t = LinkTargets(E_C=ec)

        def pio(T1, T2):
            s = SlotConfig(T1=T1, T2=T2)
            dc = derive(p, s, t, energy_outage(p, s, ec))
            return info_outage(dc, s, p.M, interference_limited=True)

        t1_vals = [pio(T1, 0.5) for T1 in np.linspace(0.1, 2.0, 12)]
        assert all(b >= a - 1e-12 for a, b in zip(t1_vals, t1_vals[1:]))
        t2_vals = [pio(0.5, T2) for T2 in np.linspace(0.1, 2.0, 12)]
        assert all(b >= a - 1e-12 for a, b in zip(t2_vals, t2_vals[1:]))


class TestSpatialThroughput:
    def test_silent_network(self):
        p, s = defaults()
        assert spatial_throughput(p, s, LinkTargets(), P_eo=1.0) == 0.0

    def test_peak_attained_at_optimal_load(self):
        # with P_eo = 0 and T2 chosen so the load hits the peak, the
        # interference-limited throughput equals the closed-form optimum
        # and a T2 grid search finds no better value
        from bwpc.optimize import interference_scale, optimal_load

        p = NetworkParams()
        t = LinkTargets()
        tau = interference_scale(p, t)
        xm = optimal_load(p.M)
        T2_star = xm / (tau * p.lam)
        r_star = spatial_throughput(
            p, SlotConfig(T1=0.5, T2=T2_star), t, P_eo=0.0, interference_limited=True
        )
        want = (xm / tau) * poisson_cdf(xm, p.M) * rate_bits(t.gamma_R)
        assert r_star == pytest.approx(want, rel=1e-12)
        for T2 in np.linspace(0.05 * T2_star, 3.0 * T2_star, 301):
            r = spatial_throughput(
                p, SlotConfig(T1=0.5, T2=T2), t, P_eo=0.0, interference_limited=True
            )
            assert r <= r_star * (1.0 + 1e-9)

    def test_full_mode_uses_noise_term(self):
        p = NetworkParams(N0=1.0)  # absurdly loud receiver to split the modes
        s = SlotConfig()
        t = LinkTargets()
        full = spatial_throughput(p, s, t, P_eo=0.2)
        il = spatial_throughput(p, s, t, P_eo=0.2, interference_limited=True)
        assert full < il
