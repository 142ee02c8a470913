import math
from dataclasses import replace

import numpy as np
import pytest

from bwpc import _kernels
from bwpc import montecarlo as mc
from bwpc.analytic import energy_outage, mean_harvested_energy, variance_harvested_energy
from bwpc.model import LinkTargets, NetworkParams, SlotConfig, derive


def defaults():
    return NetworkParams(), SlotConfig()


def riemann_energy(realization, params, slot, tag_position=(0.0, 0.0), start=0.0, n_steps=100_000):
    """Independent oracle: midpoint Riemann sum on the uniform grid refined
    by the activity switch times, with the active set at every node found
    by brute-force masking (no event walk, no cumulative sums)."""
    t0 = start
    t1 = start + slot.T1
    s = np.maximum(realization.times, t0)
    e = np.minimum(realization.times + slot.T, t1)
    keep = s < e
    s, e = s[keep], e[keep]
    cuts = np.unique(np.concatenate((np.linspace(t0, t1, n_steps + 1), s, e)))
    mids = 0.5 * (cuts[:-1] + cuts[1:])
    dt = np.diff(cuts)
    dx = realization.positions[keep, 0] - tag_position[0]
    dy = realization.positions[keep, 1] - tag_position[1]
    dist = np.maximum(np.hypot(dx, dy), params.r_o)
    amp = math.sqrt(params.P_T) * realization.xi[keep] * dist ** (-params.alpha / 2.0)
    active = (s[None, :] <= mids[:, None]) & (mids[:, None] < e[None, :])
    y = mc.dedicated_amplitude(params) + active @ amp
    return params.eta * float(np.sum((y.real**2 + y.imag**2) * dt))


class TestSampleNetwork:
    def test_zero_density_is_empty(self):
        p, s = NetworkParams(lam=0.0), SlotConfig()
        r = mc.sample_network(p, s, mc.SimWindow.for_slot(s), 1, 0)
        assert r.n_points == 0

    def test_point_count_is_poisson(self):
        p, s = defaults()
        w = mc.SimWindow(R_harvest=5.0, R_interf=0.0, t_lo=-s.T, t_hi=s.T)
        counts = [
            mc.sample_network(p, s, w, 3, i, attach_reverse=False).n_points for i in range(10_000)
        ]
        want = p.lam * w.area * w.duration
        se = math.sqrt(want / len(counts))
        assert abs(np.mean(counts) - want) <= 3.0 * se

    def test_deterministic_per_trial(self):
        p, s = defaults()
        w = mc.SimWindow.for_slot(s)
        a = mc.sample_network(p, s, w, 42, 7)
        b = mc.sample_network(p, s, w, 42, 7)
        assert np.array_equal(a.positions, b.positions)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.xi, b.xi)
        assert np.array_equal(a.g, b.g)
        assert a.typ_dir == b.typ_dir

    def test_trials_are_distinct(self):
        p, s = defaults()
        w = mc.SimWindow.for_slot(s)
        a = mc.sample_network(p, s, w, 42, 0)
        b = mc.sample_network(p, s, w, 42, 1)
        assert a.n_points != b.n_points or not np.array_equal(a.positions, b.positions)

    def test_light_sampling_shares_stream_prefix(self):
        p, s = defaults()
        w = mc.SimWindow.for_slot(s)
        full = mc.sample_network(p, s, w, 11, 5)
        light = mc.sample_network(p, s, w, 11, 5, attach_reverse=False)
        assert np.array_equal(full.positions, light.positions)
        assert np.array_equal(full.xi, light.xi)
        assert light.g is None

    def test_window_must_cover_slot(self):
        p, s = defaults()
        with pytest.raises(ValueError):
            mc.sample_network(p, s, mc.SimWindow(t_lo=-0.5, t_hi=0.5), 1, 0)


class TestHarvestedEnergy:
    def test_dedicated_reader_only(self):
        p, s = NetworkParams(lam=0.0), SlotConfig()
        r = mc.sample_network(p, s, mc.SimWindow.for_slot(s), 1, 0)
        assert mc.harvested_energy(r, p, s) == pytest.approx(10.0, rel=1e-12)

    @pytest.mark.parametrize("trial", range(8))
    def test_matches_riemann_oracle(self, trial):
        p = NetworkParams(lam=0.02)
        s = SlotConfig(T1=0.4, T2=0.6)
        w = mc.SimWindow(R_harvest=30.0, R_interf=0.0, t_lo=-s.T, t_hi=s.T)
        r = mc.sample_network(p, s, w, 99, trial, attach_reverse=False)
        exact = mc.harvested_energy(r, p, s)
        oracle = riemann_energy(r, p, s, n_steps=100_000)
        assert exact == pytest.approx(oracle, rel=1e-6)

    def test_kernel_agrees_with_reference_walk(self):
        # same amplitudes through the compiled merge kernel and the
        # numpy event walk must integrate to the same energy
        p, s = defaults()
        w = mc.SimWindow(R_harvest=60.0, R_interf=0.0, t_lo=-s.T, t_hi=s.T)
        for trial in range(5):
            r = mc.sample_network(p, s, w, 5, trial, attach_reverse=False)
            want = mc.harvested_energy(r, p, s)
            order = np.argsort(r.times, kind="stable")
            t_sorted = r.times[order]
            sv = np.maximum(t_sorted, 0.0)
            ev = np.minimum(t_sorted + s.T, s.T1)
            keep = sv < ev
            dist = np.maximum(
                np.hypot(r.positions[order, 0], r.positions[order, 1]), p.r_o
            )[keep]
            amp = math.sqrt(p.P_T) * r.xi[order][keep] * dist ** (-p.alpha / 2.0)
            tag_off = np.array([0, amp.size], dtype=np.int64)
            out = np.empty(1)
            _kernels.batch_tag_energies(
                tag_off,
                np.ascontiguousarray(sv[keep]),
                np.ascontiguousarray(ev[keep]),
                np.ascontiguousarray(amp.real),
                np.ascontiguousarray(amp.imag),
                mc.dedicated_amplitude(p),
                np.array([0.0]),
                s.T1,
                p.eta,
                out,
            )
            assert out[0] == pytest.approx(want, rel=1e-12)


class TestEnergyEstimators:
    def test_zero_threshold_never_fails(self):
        p, s = defaults()
        res = mc.estimate_energy_outage(p, s, 0.0, trials=200, seed=1)
        assert res.estimate == 0.0

    def test_deterministic_energy_above_threshold(self):
        p, s = NetworkParams(lam=0.0), SlotConfig()
        res = mc.estimate_energy_outage(p, s, 12.0, trials=200, seed=1)
        assert res.estimate == 1.0

    def test_sample_moments_near_closed_forms(self):
        p, s = defaults()
        mean_r, var_r = mc.estimate_energy_moments(p, s, trials=4_000, seed=2)
        assert mean_r.estimate == pytest.approx(mean_harvested_energy(p, s), rel=0.05)
        assert var_r.estimate == pytest.approx(variance_harvested_energy(p, s), rel=0.25)

    def test_outage_falls_as_harvest_phase_grows(self):
        p = NetworkParams()
        lo = mc.estimate_energy_outage(p, SlotConfig(T1=0.2, T2=0.5), 6.0, trials=3_000, seed=4)
        hi = mc.estimate_energy_outage(p, SlotConfig(T1=0.5, T2=0.5), 6.0, trials=3_000, seed=4)
        assert lo.estimate >= hi.estimate - (lo.half_width_99 + hi.half_width_99)

    def test_rerun_bit_identical(self):
        p, s = defaults()
        a = mc.sample_harvested_energies(p, s, trials=300, seed=9)
        b = mc.sample_harvested_energies(p, s, trials=300, seed=9)
        assert np.array_equal(a, b)

    def test_worker_count_does_not_change_results(self):
        p, s = defaults()
        a = mc.sample_harvested_energies(p, s, trials=240, seed=9, n_workers=1)
        b = mc.sample_harvested_energies(p, s, trials=240, seed=9, n_workers=2)
        assert np.array_equal(a, b)


class TestStatisticalConsistency:
    def test_fading_draws_have_unit_power(self):
        p = NetworkParams(lam=0.2)
        s = SlotConfig()
        r = mc.sample_network(p, s, mc.SimWindow.for_slot(s), 41, 0)
        power = np.abs(r.xi) ** 2
        assert np.mean(power) == pytest.approx(1.0, abs=4.0 / math.sqrt(power.size))
        gpower = np.abs(r.g) ** 2
        assert np.mean(gpower) == pytest.approx(1.0, abs=4.0 / math.sqrt(gpower.size))

    def test_gamma_approximation_within_ci_plus_margin(self):
        # the closed-form outage at E_C=8 uJ must land inside the Monte
        # Carlo 99% CI widened by 0.03 absolute (the approximation itself
        # consumes most of that budget here)
        p, s = defaults()
        sim = mc.estimate_energy_outage(p, s, 8.0, trials=10_000, seed=14)
        approx = energy_outage(p, s, 8.0)
        assert abs(sim.estimate - approx) <= sim.half_width_99 + 0.03

    def test_joint_typical_energy_agrees_with_energy_estimator(self):
        # the joint pipeline's by-product energy outage and the dedicated
        # energy estimator measure the same quantity on different windows
        p = NetworkParams(lam=0.01)
        s = SlotConfig()
        sweep = mc.info_outage_sweep(p, s, [8.0], [1.0], trials=500, seed=15, mode="joint")
        direct = mc.estimate_energy_outage(p, s, 8.0, trials=500, seed=16)
        joint_eo = sweep.p_eo[0]
        assert abs(joint_eo.estimate - direct.estimate) <= (
            joint_eo.half_width_99 + direct.half_width_99
        )

    def test_simulated_throughput_peaks_at_interior_backscatter_phase(self):
        # for a fixed harvest phase the simulated spatial throughput rises
        # then falls along T2
        p = NetworkParams()
        t = LinkTargets(E_C=6.0)
        vals = []
        for T2 in (0.3, 1.2, 2.2):
            est = mc.estimate_throughput(
                p, SlotConfig(T1=0.5, T2=T2), t, trials=600, seed=17, mode="thinned"
            )
            vals.append(est.estimate)
        assert vals[1] > vals[0] and vals[1] > vals[2]


class TestSimulateSinr:
    def test_isolated_link_closed_form(self):
        p = NetworkParams(lam=0.0, M=1)
        s = SlotConfig()
        t = LinkTargets()
        dc = derive(p, s, t, P_eo=0.0)
        r = mc.sample_network(p, s, mc.SimWindow.for_slot(s), 21, 0)
        got = mc.simulate_sinr(r, p, s, dc, mode="thinned", P_eo=0.0)
        incident = p.P_T * p.G * p.d0**-p.alpha
        want = p.beta * incident * p.d0**-p.alpha * abs(r.g0[0]) ** 2 / p.N0
        assert got == pytest.approx(want, rel=1e-10)

    def test_zero_weight_interferer_leaves_sinr_bit_identical(self):
        p, s = defaults()
        t = LinkTargets()
        dc = derive(p, s, t, P_eo=0.2)
        r = mc.sample_network(p, s, mc.SimWindow.for_slot(s), 33, 2)
        base = mc.simulate_sinr(r, p, s, dc, mode="thinned", P_eo=0.2)
        # a point outside the backscatter overlap support never interferes
        extra = replace(
            r,
            positions=np.vstack((r.positions, [3.0, 4.0])),
            times=np.append(r.times, s.T2 + 0.25),
            xi=np.append(r.xi, 0.7 + 0.1j),
            tag_dirs=np.append(r.tag_dirs, 0.4),
            g=np.vstack((r.g, np.full((1, p.M), 0.3 + 0.3j))),
        )
        assert mc.simulate_sinr(extra, p, s, dc, mode="thinned", P_eo=0.2) == base

    def test_noise_free_isolated_link_is_infinite(self):
        p = NetworkParams(lam=0.0, N0=0.0)
        s = SlotConfig()
        dc = derive(p, s, LinkTargets(), P_eo=0.0)
        r = mc.sample_network(p, s, mc.SimWindow.for_slot(s), 3, 0)
        assert mc.simulate_sinr(r, p, s, dc, mode="thinned", P_eo=0.0) == math.inf

    def test_modes_require_their_inputs(self):
        p, s = defaults()
        dc = derive(p, s, LinkTargets(), P_eo=0.0)
        r = mc.sample_network(p, s, mc.SimWindow.for_slot(s), 3, 0)
        with pytest.raises(ValueError):
            mc.simulate_sinr(r, p, s, dc, mode="joint")
        with pytest.raises(ValueError):
            mc.simulate_sinr(r, p, s, dc, mode="thinned")


class TestInfoEstimators:
    def test_vanishing_target_never_fails(self):
        p, s = defaults()
        t = LinkTargets(gamma_R=1e-12)
        res = mc.estimate_info_outage(p, s, t, trials=60, seed=5, mode="thinned")
        assert res.estimate == 0.0

    def test_joint_mode_conditions_on_energized_typical_tag(self):
        p, s = defaults()
        res = mc.estimate_info_outage(p, s, LinkTargets(E_C=6.0), trials=40, seed=6, mode="joint")
        assert res.n_used < res.trials  # some trials dropped by conditioning

    def test_degenerate_conditioning_raises(self):
        p, s = defaults()
        with pytest.raises(mc.DegenerateEstimateError, match="never energized"):
            mc.estimate_info_outage(p, s, LinkTargets(E_C=500.0), trials=10, seed=7, mode="joint")

    def test_thinned_rerun_and_workers_bit_identical(self):
        p, s = defaults()
        t = LinkTargets()
        a = mc.estimate_info_outage(p, s, t, trials=80, seed=8, mode="thinned", n_workers=1)
        b = mc.estimate_info_outage(p, s, t, trials=80, seed=8, mode="thinned", n_workers=2)
        assert a == b

    def test_sweep_points_match_standalone_runs(self):
        # thresholds never enter the sampled realizations, so a grid run
        # must reproduce each single-point run bit for bit
        p, s = defaults()
        grid = mc.info_outage_sweep(
            p, s, [4.0, 6.0], [1.0, 3.0], trials=60, seed=13, mode="thinned"
        )
        single = mc.estimate_info_outage(
            p, s, LinkTargets(E_C=6.0, gamma_R=3.0), trials=60, seed=13, mode="thinned"
        )
        assert grid.p_io[1][1] == single

    def test_throughput_composition(self):
        p, s = defaults()
        t = LinkTargets()
        est = mc.estimate_throughput(p, s, t, trials=60, seed=10, mode="thinned")
        assert est.estimate >= 0.0
        assert est.half_width_99 >= 0.0


class TestTruncationSensitivity:
    def test_doubling_either_radius_barely_moves_the_estimates(self):
        # paired doubling isolates the truncation effect; the default
        # radii must be within 0.005 absolute of the doubled window
        p, s = defaults()
        t = LinkTargets()
        res = mc.truncation_sensitivity(p, s, t, trials=6_000, seed=12, n_workers=2)
        names = {r.quantity for r in res}
        assert names == {"P_eo_vs_R_harvest", "P_io_vs_R_interf"}
        for r in res:
            assert abs(r.delta) <= 0.005 + r.delta_half_width_99
