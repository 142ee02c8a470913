"""Time-space Poisson network simulator and outage/throughput estimators.

Each trial draws one network realization on a finite sampling disc and
time window, integrates the harvested-energy field exactly (the incident
amplitude is piecewise constant between slot edges), and evaluates the
post-MMSE SINR at the typical reader against the averaged interference
covariance.

Reproducibility contract: every estimator is a pure function of its
parameters, `seed` and `trials`.  Per-trial randomness comes from a
counter-based Philox stream keyed by (seed, trial_index, stage), so
results are bit-identical for any worker count and re-run.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numpy.random import Generator, Philox

from . import _kernels
from .analytic import energy_outage
from .model import DerivedConstants, LinkTargets, NetworkParams, SlotConfig, derive, rate_bits

Z99 = 2.5758293035489004  # two-sided 99% normal quantile

DEFAULT_R_HARVEST = 100.0  # m; tail of the harvest field beyond this is negligible for alpha=3
DEFAULT_R_INTERF = 100.0   # m


class DegenerateEstimateError(RuntimeError):
    """The conditioning event never occurred; no conditional estimate exists."""


def stream(seed: int, trial_index: int, stage: int = 0) -> Generator:
    """Philox generator for one (seed, trial, stage) triple.

    Stages separate the draw sequences of one trial (0 = network sampling
    and per-point fading, 1 = interferer-harvest fading, 2 = thinned-mode
    activity) so adding draws to one stage never shifts another.  Seeds
    are taken modulo 2^64 (the key word size).
    """
    key = np.array([int(seed) % 2**64, int(trial_index) % 2**64], dtype=np.uint64)
    return Generator(Philox(counter=[0, 0, 0, stage], key=key))


@dataclass(frozen=True)
class SimWindow:
    """Finite sampling window: disc(R_sample) x [t_lo, t_hi].

    R_harvest bounds the energy contributors around a tag, R_interf the
    interfering tags around the typical reader; sampling on their sum
    guarantees every tag inside R_interf sees its full harvest
    neighbourhood (no edge bias).
    """

    R_harvest: float = DEFAULT_R_HARVEST
    R_interf: float = DEFAULT_R_INTERF
    t_lo: float = -1.0  # ms
    t_hi: float = 1.0   # ms

    @property
    def R_sample(self) -> float:
        return self.R_harvest + self.R_interf

    @property
    def area(self) -> float:
        return math.pi * self.R_sample**2

    @property
    def duration(self) -> float:
        return self.t_hi - self.t_lo

    @classmethod
    def for_slot(
        cls,
        slot: SlotConfig,
        R_harvest: float = DEFAULT_R_HARVEST,
        R_interf: float = DEFAULT_R_INTERF,
    ) -> "SimWindow":
        """Window covering every contributor to both phases: t_x in [-T, T]."""
        return cls(R_harvest=R_harvest, R_interf=R_interf, t_lo=-slot.T, t_hi=slot.T)

    def energy_only(self) -> "SimWindow":
        """Shrink to the harvest disc (no interferers needed)."""
        return replace(self, R_interf=0.0)

    def check(self, params: NetworkParams, slot: SlotConfig) -> None:
        if self.R_harvest < params.r_o:
            raise ValueError("R_harvest must be >= r_o")
        if self.t_lo > -slot.T or self.t_hi < slot.T:
            raise ValueError("time window must cover [-T, T]")


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled spacetime point pattern with its fading draws.

    Every point is a reader (at `positions`, transmitting on
    [times, times+T]) paired with a tag displaced by d0 along `tag_dirs`.
    `xi` is the collapsed beamformed-fading draw from each reader towards
    the focal tag, `g` the reverse channel from each point's tag to the
    typical reader, `g0` the typical pair's own reverse channel and
    `typ_dir` the typical tag's displacement direction.  `energized` is
    filled by joint-mode estimation.
    """

    seed: int
    trial_index: int
    window: SimWindow
    positions: np.ndarray            # (n, 2) m
    times: np.ndarray                # (n,) ms
    xi: np.ndarray                   # (n,) complex, CN(0,1)
    tag_dirs: np.ndarray | None      # (n,) rad
    g: np.ndarray | None             # (n, M) complex, CN(0, I)
    g0: np.ndarray | None            # (M,) complex
    typ_dir: float | None
    energized: np.ndarray | None = None

    @property
    def n_points(self) -> int:
        return self.times.size

    def tag_positions(self, d0: float) -> np.ndarray:
        return self.positions + d0 * np.stack(
            (np.cos(self.tag_dirs), np.sin(self.tag_dirs)), axis=1
        )


def sample_network(
    params: NetworkParams,
    slot: SlotConfig,
    window: SimWindow,
    seed: int,
    trial_index: int,
    attach_reverse: bool = True,
) -> NetworkRealization:
    """Draw one homogeneous time-space Poisson realization.

    The point count is Poisson(lam * area * duration); positions are
    uniform on the sampling disc and start times uniform on the window.
    Deterministic given (seed, trial_index), independent of worker count.

    Energy-only estimation never touches the reverse channels or tag
    displacements; `attach_reverse=False` skips those draws (the shared
    prefix of the stream is unchanged, so positions, times and xi agree
    with the fully attached realization).
    """
    window.check(params, slot)
    rng = stream(seed, trial_index, stage=0)
    n = int(rng.poisson(params.lam * window.area * window.duration))
    radii = window.R_sample * np.sqrt(rng.random(n))
    angles = 2.0 * math.pi * rng.random(n)
    positions = np.stack((radii * np.cos(angles), radii * np.sin(angles)), axis=1)
    times = window.t_lo + window.duration * rng.random(n)
    xi = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    if not attach_reverse:
        return NetworkRealization(
            seed=seed,
            trial_index=trial_index,
            window=window,
            positions=positions,
            times=times,
            xi=xi,
            tag_dirs=None,
            g=None,
            g0=None,
            typ_dir=None,
        )
    tag_dirs = 2.0 * math.pi * rng.random(n)
    g = (rng.standard_normal((n, params.M)) + 1j * rng.standard_normal((n, params.M))) / math.sqrt(2.0)
    g0 = (rng.standard_normal(params.M) + 1j * rng.standard_normal(params.M)) / math.sqrt(2.0)
    typ_dir = 2.0 * math.pi * rng.random()
    return NetworkRealization(
        seed=seed,
        trial_index=trial_index,
        window=window,
        positions=positions,
        times=times,
        xi=xi,
        tag_dirs=tag_dirs,
        g=g,
        g0=g0,
        typ_dir=typ_dir,
    )


def dedicated_amplitude(params: NetworkParams) -> float:
    """Incident carrier amplitude from a tag's own beamforming reader."""
    return math.sqrt(params.P_T * params.G * params.d0**-params.alpha)


def harvested_energy(
    realization: NetworkRealization,
    params: NetworkParams,
    slot: SlotConfig,
    tag_position=(0.0, 0.0),
    tag_slot_start: float = 0.0,
) -> float:
    """Exact harvested energy over the tag's first phase, uJ.

    The incident sum is piecewise constant between the slot edges
    {t_x, t_x + T} clipped to [start, start + T1]; the integral of its
    squared magnitude is accumulated piece by piece, with the dedicated
    reader contributing a constant amplitude throughout.
    """
    t0 = tag_slot_start
    t1 = t0 + slot.T1
    c = dedicated_amplitude(params)
    t = realization.times
    s = np.maximum(t, t0)
    e = np.minimum(t + slot.T, t1)
    keep = s < e
    if not np.any(keep):
        return params.eta * c * c * slot.T1
    dx = realization.positions[keep, 0] - tag_position[0]
    dy = realization.positions[keep, 1] - tag_position[1]
    dist = np.maximum(np.hypot(dx, dy), params.r_o)
    amp = math.sqrt(params.P_T) * realization.xi[keep] * dist ** (-params.alpha / 2.0)
    times = np.concatenate((s[keep], e[keep]))
    deltas = np.concatenate((amp, -amp))
    order = np.argsort(times, kind="stable")
    ts = times[order]
    u = np.cumsum(deltas[order])
    y = c + u[:-1]
    acc = c * c * (ts[0] - t0)
    acc += float(np.real(np.vdot(y * np.diff(ts), y)))
    last = c + u[-1]
    acc += (last.real**2 + last.imag**2) * (t1 - ts[-1])
    return params.eta * float(acc)


# Estimator results -----------------------------------------------------------


@dataclass(frozen=True)
class EstimatorResult:
    estimate: float
    half_width_99: float
    trials: int
    seed: int
    n_used: int  # trials entering the estimate (after conditioning)


def _binomial_result(hits: int, n: int, trials: int, seed: int) -> EstimatorResult:
    p = hits / n
    hw = Z99 * math.sqrt(p * (1.0 - p) / n)
    return EstimatorResult(estimate=p, half_width_99=hw, trials=trials, seed=seed, n_used=n)


def _chunks(trials: int, n_workers: int) -> list[tuple[int, int]]:
    n_chunks = max(1, min(trials, n_workers * 4))
    edges = np.linspace(0, trials, n_chunks + 1, dtype=int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _run_chunked(fn, args, trials: int, n_workers: int):
    """Evaluate fn(args, lo, hi) over trial chunks, concatenated in order."""
    spans = _chunks(trials, n_workers)
    if n_workers <= 1 or len(spans) == 1:
        parts = [fn((args, lo, hi)) for lo, hi in spans]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(fn, [(args, lo, hi) for lo, hi in spans]))
    return parts


# Energy estimators -----------------------------------------------------------


def _energy_chunk(packed) -> np.ndarray:
    (params, slot, window, seed), lo, hi = packed
    out = np.empty(hi - lo)
    for i, trial in enumerate(range(lo, hi)):
        realization = sample_network(params, slot, window, seed, trial, attach_reverse=False)
        out[i] = harvested_energy(realization, params, slot)
    return out


def sample_harvested_energies(
    params: NetworkParams,
    slot: SlotConfig,
    window: SimWindow | None = None,
    trials: int = 10_000,
    seed: int = 0,
    n_workers: int = 1,
) -> np.ndarray:
    """Per-trial harvested energy of the typical tag at the origin, slot start 0."""
    window = (window or SimWindow.for_slot(slot)).energy_only()
    parts = _run_chunked(_energy_chunk, (params, slot, window, seed), trials, n_workers)
    return np.concatenate(parts)


def estimate_energy_moments(
    params: NetworkParams,
    slot: SlotConfig,
    window: SimWindow | None = None,
    trials: int = 100_000,
    seed: int = 0,
    n_workers: int = 1,
) -> tuple[EstimatorResult, EstimatorResult]:
    """Sample mean and variance of the harvested energy, with 99% CIs."""
    e = sample_harvested_energies(params, slot, window, trials, seed, n_workers)
    n = e.size
    mean = float(np.mean(e))
    var = float(np.var(e, ddof=1))
    hw_mean = Z99 * math.sqrt(var / n)
    m4 = float(np.mean((e - mean) ** 4))
    hw_var = Z99 * math.sqrt(max(m4 - var**2, 0.0) / n)
    return (
        EstimatorResult(mean, hw_mean, trials, seed, n),
        EstimatorResult(var, hw_var, trials, seed, n),
    )


def energy_outage_sweep(
    params: NetworkParams,
    slot: SlotConfig,
    E_C_values,
    window: SimWindow | None = None,
    trials: int = 10_000,
    seed: int = 0,
    n_workers: int = 1,
) -> list[EstimatorResult]:
    """P{E_H < E_C} for several thresholds from one set of trials."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    e = sample_harvested_energies(params, slot, window, trials, seed, n_workers)
    return [_binomial_result(int(np.sum(e < ec)), e.size, trials, seed) for ec in E_C_values]


def estimate_energy_outage(
    params: NetworkParams,
    slot: SlotConfig,
    E_C: float,
    window: SimWindow | None = None,
    trials: int = 10_000,
    seed: int = 0,
    n_workers: int = 1,
) -> EstimatorResult:
    """Fraction of trials in which the typical tag misses the energy threshold."""
    return energy_outage_sweep(params, slot, [E_C], window, trials, seed, n_workers)[0]


# SINR simulation -------------------------------------------------------------


def overlap_weight(t_x, T2: float):
    """Fraction of the typical backscatter phase overlapped by an interferer."""
    return np.clip((T2 - np.abs(t_x)) / T2, 0.0, 1.0)


def _candidates(realization: NetworkRealization, params: NetworkParams, slot: SlotConfig):
    """Indices of points whose tags can interfere at the typical reader."""
    tagpos = realization.tag_positions(params.d0)
    radius = np.hypot(tagpos[:, 0], tagpos[:, 1])
    mask = (np.abs(realization.times) < slot.T2) & (radius <= realization.window.R_interf)
    idx = np.flatnonzero(mask)
    return idx, tagpos[idx], radius[idx]


_WORKSPACE: dict[str, np.ndarray] = {}


def _pair_workspace(cap: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reusable per-process pair buffers (trials run one at a time)."""
    buf = _WORKSPACE.get("s")
    if buf is None or buf.size < cap:
        _WORKSPACE["s"] = np.empty(cap)
        _WORKSPACE["e"] = np.empty(cap)
        _WORKSPACE["d"] = np.empty(cap)
    return _WORKSPACE["s"], _WORKSPACE["e"], _WORKSPACE["d"]


def _interferer_energies(
    realization: NetworkRealization,
    params: NetworkParams,
    slot: SlotConfig,
    cand_idx: np.ndarray,
    cand_tagpos: np.ndarray,
) -> tuple[float, np.ndarray]:
    """Joint-mode harvested energy of the typical tag and every candidate.

    Tag 0 is the typical tag (dedicated reader not part of the sampled
    pattern); tags 1.. are the candidates, each excluding its own reader.
    Fading draws for (tag, reader) pairs come from stage 1 in pair order.
    """
    typ_pos = params.d0 * np.array([math.cos(realization.typ_dir), math.sin(realization.typ_dir)])
    tagx = np.concatenate(([typ_pos[0]], cand_tagpos[:, 0]))
    tagy = np.concatenate(([typ_pos[1]], cand_tagpos[:, 1]))
    tagt = np.concatenate(([0.0], realization.times[cand_idx]))
    K = tagx.size
    N = realization.n_points
    # kernels require readers in time order (per-tag overlap edges sort for free)
    order = np.argsort(realization.times, kind="stable")
    inv = np.empty(N, dtype=np.int64)
    inv[order] = np.arange(N)
    post = realization.times[order]
    posx = np.ascontiguousarray(realization.positions[order, 0])
    posy = np.ascontiguousarray(realization.positions[order, 1])
    own = np.concatenate(([-1], inv[cand_idx])).astype(np.int64)
    R_h = realization.window.R_harvest
    frac_area = min(1.0, math.pi * R_h**2 / realization.window.area)
    frac_time = min(1.0, (slot.T + slot.T1) / realization.window.duration)
    cap = int(1.3 * K * N * frac_area * frac_time + 8.0 * math.sqrt(K * N + 1.0) + 1024)
    while True:
        tag_off = np.empty(K + 1, dtype=np.int64)
        s_arr, e_arr, dist = _pair_workspace(cap)
        npair = _kernels.fill_harvest_pairs(
            tagx, tagy, tagt, own,
            posx, posy, post,
            slot.T, slot.T1, R_h * R_h, params.r_o,
            cap, tag_off, s_arr, e_arr, dist,
        )
        if npair >= 0:
            break
        cap *= 2
    rng = stream(realization.seed, realization.trial_index, stage=1)
    draws = rng.standard_normal(2 * npair) / math.sqrt(2.0)
    scale = math.sqrt(params.P_T) * dist[:npair] ** (-params.alpha / 2.0)
    amp_re = draws[:npair] * scale
    amp_im = draws[npair:] * scale
    energies = np.empty(K)
    _kernels.batch_tag_energies(
        tag_off, s_arr, e_arr, amp_re, amp_im,
        dedicated_amplitude(params), tagt, slot.T1, params.eta, energies,
    )
    return float(energies[0]), energies[1:]


def _mmse_sinr(
    g_active: np.ndarray,
    coeff_active: np.ndarray,
    g0: np.ndarray,
    noise_ratio: float,
    d0: float,
    alpha: float,
) -> float:
    """d0^-alpha * g0^H (sum coeff_i g_i g_i^H + noise_ratio I)^-1 g0."""
    M = g0.size
    if g_active.shape[0] == 0 and noise_ratio == 0.0:
        return math.inf
    A = noise_ratio * np.eye(M, dtype=complex)
    if g_active.shape[0]:
        A = A + (g_active * coeff_active[:, None]).conj().T @ g_active
    try:
        x = np.linalg.solve(A, g0)
    except np.linalg.LinAlgError:
        return math.inf
    return d0**-alpha * float(np.real(np.vdot(g0, x)))


def simulate_sinr(
    realization: NetworkRealization,
    params: NetworkParams,
    slot: SlotConfig,
    dc: DerivedConstants,
    mode: str = "thinned",
    P_eo: float | None = None,
    E_C: float | None = None,
) -> float:
    """Post-MMSE SINR at the typical reader for one realization.

    Interference is the phase-two average: each active candidate tag
    contributes overlap_weight(t_x) * r^-alpha * g g^H, with incident
    backscatter power normalized by beta * incident_power so the noise
    enters as noise_ratio * I.  Activity per mode: 'joint' computes every
    candidate's own harvested energy against E_C; 'thinned' draws
    independent Bernoulli(1 - P_eo) marks.
    """
    cand_idx, cand_tagpos, cand_radius = _candidates(realization, params, slot)
    if mode == "joint":
        if E_C is None:
            raise ValueError("joint mode requires E_C")
        _, energies = _interferer_energies(realization, params, slot, cand_idx, cand_tagpos)
        active = energies >= E_C
    elif mode == "thinned":
        if P_eo is None:
            raise ValueError("thinned mode requires P_eo")
        u = stream(realization.seed, realization.trial_index, stage=2).random(cand_idx.size)
        active = u >= P_eo
    else:
        raise ValueError(f"unknown mode {mode!r}")
    w = overlap_weight(realization.times[cand_idx], slot.T2)
    coeff = w * cand_radius**-params.alpha
    return _mmse_sinr(
        realization.g[cand_idx][active],
        coeff[active],
        realization.g0,
        dc.noise_ratio,
        params.d0,
        params.alpha,
    )


# Information outage / throughput estimators ----------------------------------


def _info_chunk(packed):
    (params, slot, window, seed, mode, E_C_values, P_eo_values, noise_ratio), lo, hi = packed
    n = hi - lo
    n_ec = len(E_C_values)
    sinr = np.empty((n, n_ec))
    e_typ = np.full(n, np.nan)
    for i, trial in enumerate(range(lo, hi)):
        realization = sample_network(params, slot, window, seed, trial)
        cand_idx, cand_tagpos, cand_radius = _candidates(realization, params, slot)
        w = overlap_weight(realization.times[cand_idx], slot.T2)
        coeff = w * cand_radius**-params.alpha
        g_cand = realization.g[cand_idx]
        if mode == "joint":
            e_typ[i], energies = _interferer_energies(
                realization, params, slot, cand_idx, cand_tagpos
            )
            marks = [energies >= ec for ec in E_C_values]
        else:
            u = stream(seed, trial, stage=2).random(cand_idx.size)
            marks = [u >= p for p in P_eo_values]
        for j, active in enumerate(marks):
            sinr[i, j] = _mmse_sinr(
                g_cand[active], coeff[active], realization.g0,
                noise_ratio, params.d0, params.alpha,
            )
    return sinr, e_typ


@dataclass(frozen=True)
class InfoSweepResult:
    """Outage estimates on an (E_C, gamma_R) grid from shared trials."""

    E_C_values: tuple
    gamma_R_values: tuple
    p_io: list            # [i_ec][i_gamma] -> EstimatorResult
    p_eo: list | None     # [i_ec] -> EstimatorResult (joint mode only)
    mode: str
    trials: int
    seed: int


def info_outage_sweep(
    params: NetworkParams,
    slot: SlotConfig,
    E_C_values,
    gamma_R_values,
    window: SimWindow | None = None,
    trials: int = 4_000,
    seed: int = 0,
    mode: str = "joint",
    n_workers: int = 1,
) -> InfoSweepResult:
    """Estimate P_io over a grid of thresholds from one set of realizations.

    The realization and every fading draw are threshold-independent, so a
    single simulation pass serves the whole grid; per-point results are
    identical to running each point alone with the same seed.

    In joint mode the estimate is conditioned on the typical tag having
    harvested enough energy (its own outage probability falls out as a
    by-product); in thinned mode interferers are active independently
    with probability 1 - P_eo from the closed-form energy outage.
    """
    if mode not in ("joint", "thinned"):
        raise ValueError(f"unknown mode {mode!r}")
    window = window or SimWindow.for_slot(slot)
    window.check(params, slot)
    if mode == "thinned":
        # Interference needs tags inside R_interf only; their readers sit
        # at most max(d0, r_o) beyond, so the harvest disc shrinks to that.
        window = replace(window, R_harvest=max(params.r_o, params.d0))
        p_eo_values = [energy_outage(params, slot, ec) for ec in E_C_values]
    else:
        p_eo_values = []
    noise_ratio = derive(params, slot, LinkTargets(), P_eo=0.0).noise_ratio
    args = (params, slot, window, seed, mode, tuple(E_C_values), tuple(p_eo_values), noise_ratio)
    parts = _run_chunked(_info_chunk, args, trials, n_workers)
    sinr = np.concatenate([p[0] for p in parts], axis=0)
    e_typ = np.concatenate([p[1] for p in parts])
    gammas = [float(g) for g in gamma_R_values]
    p_io: list[list[EstimatorResult]] = []
    p_eo: list[EstimatorResult] | None = [] if mode == "joint" else None
    for j, ec in enumerate(E_C_values):
        if mode == "joint":
            energized = e_typ >= ec
            n_cond = int(np.sum(energized))
            p_eo.append(_binomial_result(trials - n_cond, trials, trials, seed))
            if n_cond == 0:
                raise DegenerateEstimateError(
                    f"typical tag never energized at E_C={ec} in {trials} trials"
                )
            s = sinr[energized, j]
        else:
            s = sinr[:, j]
        p_io.append(
            [_binomial_result(int(np.sum(s < g)), s.size, trials, seed) for g in gammas]
        )
    return InfoSweepResult(
        E_C_values=tuple(E_C_values),
        gamma_R_values=tuple(gammas),
        p_io=p_io,
        p_eo=p_eo,
        mode=mode,
        trials=trials,
        seed=seed,
    )


def estimate_info_outage(
    params: NetworkParams,
    slot: SlotConfig,
    targets: LinkTargets,
    window: SimWindow | None = None,
    trials: int = 4_000,
    seed: int = 0,
    mode: str = "joint",
    n_workers: int = 1,
) -> EstimatorResult:
    """P{SINR < gamma_R} at the typical reader (conditional in joint mode)."""
    sweep = info_outage_sweep(
        params, slot, [targets.E_C], [targets.gamma_R], window, trials, seed, mode, n_workers
    )
    return sweep.p_io[0][0]


def estimate_throughput(
    params: NetworkParams,
    slot: SlotConfig,
    targets: LinkTargets,
    window: SimWindow | None = None,
    trials: int = 4_000,
    seed: int = 0,
    mode: str = "joint",
    n_workers: int = 1,
) -> EstimatorResult:
    """Spatial throughput lam*(1-P_eo)*T2*(1-P_io)*B with a propagated CI.

    P_eo and P_io come from the same trials in joint mode; in thinned mode
    P_eo is estimated by a separate energy run with the same seed.  The
    half width combines the two relative widths in quadrature (delta
    method, independence approximation).
    """
    sweep = info_outage_sweep(
        params, slot, [targets.E_C], [targets.gamma_R], window, trials, seed, mode, n_workers
    )
    io = sweep.p_io[0][0]
    if mode == "joint":
        eo = sweep.p_eo[0]
    else:
        eo = estimate_energy_outage(params, slot, targets.E_C, window, trials, seed, n_workers)
    b = rate_bits(targets.gamma_R)
    r = params.lam * (1.0 - eo.estimate) * slot.T2 * (1.0 - io.estimate) * b
    rel = 0.0
    if eo.estimate < 1.0:
        rel += (eo.half_width_99 / (1.0 - eo.estimate)) ** 2
    if io.estimate < 1.0:
        rel += (io.half_width_99 / (1.0 - io.estimate)) ** 2
    return EstimatorResult(
        estimate=r,
        half_width_99=r * math.sqrt(rel),
        trials=trials,
        seed=seed,
        n_used=io.n_used,
    )


# Truncation sensitivity -------------------------------------------------------


@dataclass(frozen=True)
class SensitivityResult:
    """Paired truncation check: estimates at the default radius vs doubled.

    Deltas are estimated trial-by-trial on a common superset realization
    (restriction of a PPP to a subdisc is the subdisc realization), so the
    difference carries far less noise than two independent runs.
    """

    quantity: str
    radius: float
    estimate_default: float
    estimate_doubled: float
    delta: float
    delta_half_width_99: float
    trials: int
    seed: int


def _energy_pair_chunk(packed):
    (params, slot, window2, R_inner, seed), lo, hi = packed
    out = np.empty((hi - lo, 2))
    for i, trial in enumerate(range(lo, hi)):
        realization = sample_network(params, slot, window2, seed, trial, attach_reverse=False)
        radius = np.hypot(realization.positions[:, 0], realization.positions[:, 1])
        inner = radius <= R_inner
        sub = replace(
            realization,
            positions=realization.positions[inner],
            times=realization.times[inner],
            xi=realization.xi[inner],
        )
        out[i, 0] = harvested_energy(sub, params, slot)
        out[i, 1] = harvested_energy(realization, params, slot)
    return out


def _info_pair_chunk(packed):
    (params, slot, window2, R_inner, seed, p_eo, gamma_R, noise_ratio), lo, hi = packed
    out = np.empty((hi - lo, 2))
    for i, trial in enumerate(range(lo, hi)):
        realization = sample_network(params, slot, window2, seed, trial)
        cand_idx, cand_tagpos, cand_radius = _candidates(realization, params, slot)
        u = stream(seed, trial, stage=2).random(cand_idx.size)
        active = u >= p_eo
        w = overlap_weight(realization.times[cand_idx], slot.T2)
        coeff = w * cand_radius**-params.alpha
        g_cand = realization.g[cand_idx]
        for j, rmax in enumerate((R_inner, realization.window.R_interf)):
            sel = active & (cand_radius <= rmax)
            s = _mmse_sinr(
                g_cand[sel], coeff[sel], realization.g0,
                noise_ratio, params.d0, params.alpha,
            )
            out[i, j] = 1.0 if s < gamma_R else 0.0
    return out


def truncation_sensitivity(
    params: NetworkParams,
    slot: SlotConfig,
    targets: LinkTargets,
    window: SimWindow | None = None,
    trials: int = 4_000,
    seed: int = 0,
    n_workers: int = 1,
) -> list[SensitivityResult]:
    """Effect of doubling R_harvest on P_eo and R_interf on P_io (thinned)."""
    window = window or SimWindow.for_slot(slot)
    window.check(params, slot)

    w2 = replace(window.energy_only(), R_harvest=2.0 * window.R_harvest)
    parts = _run_chunked(
        _energy_pair_chunk, (params, slot, w2, window.R_harvest, seed), trials, n_workers
    )
    e = np.concatenate(parts, axis=0)
    out_def = (e[:, 0] < targets.E_C).astype(float)
    out_dbl = (e[:, 1] < targets.E_C).astype(float)
    d = out_dbl - out_def
    res_e = SensitivityResult(
        quantity="P_eo_vs_R_harvest",
        radius=window.R_harvest,
        estimate_default=float(np.mean(out_def)),
        estimate_doubled=float(np.mean(out_dbl)),
        delta=float(np.mean(d)),
        delta_half_width_99=Z99 * float(np.std(d, ddof=1)) / math.sqrt(trials),
        trials=trials,
        seed=seed,
    )

    p_eo = energy_outage(params, slot, targets.E_C)
    noise_ratio = derive(params, slot, targets, P_eo=p_eo).noise_ratio
    w2i = SimWindow(
        R_harvest=max(params.r_o, params.d0),
        R_interf=2.0 * window.R_interf,
        t_lo=window.t_lo,
        t_hi=window.t_hi,
    )
    parts = _run_chunked(
        _info_pair_chunk,
        (params, slot, w2i, window.R_interf, seed, p_eo, targets.gamma_R, noise_ratio),
        trials,
        n_workers,
    )
    o = np.concatenate(parts, axis=0)
    d = o[:, 1] - o[:, 0]
    res_i = SensitivityResult(
        quantity="P_io_vs_R_interf",
        radius=window.R_interf,
        estimate_default=float(np.mean(o[:, 0])),
        estimate_doubled=float(np.mean(o[:, 1])),
        delta=float(np.mean(d)),
        delta_half_width_99=Z99 * float(np.std(d, ddof=1)) / math.sqrt(trials),
        trials=trials,
        seed=seed,
    )
    return [res_e, res_i]
