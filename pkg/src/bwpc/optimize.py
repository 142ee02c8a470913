"""Spatial-throughput maximization: slot split tradeoff and density sweep.

The objective x * poisson_cdf(x, M) is quasi-concave with a unique peak
strictly between M/2 and M; all root finding is plain bisection for
unconditional convergence, absolute tolerance 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .analytic import energy_outage, poisson_cdf, poisson_cdf_deriv
from .model import LinkTargets, NetworkParams, SlotConfig, derive, rate_bits
from . import analytic

_TOL = 1e-9
_T1_CAP = 100.0  # ms; no equality solution below this means infeasible


class InfeasibleError(RuntimeError):
    """No slot split satisfies the outage-constrained equality."""


@dataclass(frozen=True)
class ThroughputOptimum:
    peak_load: float   # maximizer of x * poisson_cdf(x, M)
    load_cap: float    # largest load allowed by the info outage cap
    load_star: float   # min(peak_load, load_cap)
    R_opt: float       # optimal spatial throughput, bits/(m^2*ms)
    T2_lo: float       # ms, open lower end of the optimal T2 range
    T2_hi: float       # ms, inclusive upper end


@dataclass(frozen=True)
class TradeoffPoint:
    T1: float           # ms
    T2: float           # ms
    feasible: bool
    achieved_p: float   # T2 * (1 - P_eo(T1, T2)), ms
    monotone_warning: bool = False


@dataclass(frozen=True)
class DensityPoint:
    lam: float
    R: float
    P_eo: float
    P_io: float
    feasible: bool


def load_score(x: float, m: int) -> float:
    """Scaled stationarity score of x * poisson_cdf(x, m).

    Equals e^-x times the raw polynomial score and also the derivative of
    the objective itself; every term is bounded so no overflow occurs.
    Positive below the peak, negative above it.
    """
    return poisson_cdf(x, m) + x * poisson_cdf_deriv(x, m)


def load_score_raw(x: float, m: int) -> float:
    """Unscaled polynomial score: sum_{n<m} x^n/n! - x^m/(m-1)!."""
    total = -(x**m) / math.factorial(m - 1)
    term = 1.0
    for n in range(m):
        if n > 0:
            term *= x / n
        total += term
    return total


def optimal_load(m: int) -> float:
    """Peak of x * poisson_cdf(x, m); the unique score root in [m/2, m].

    m == 1 returns exactly 1 (maximizer of x*e^-x, attained at the
    interval endpoint).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return 1.0
    lo, hi = m / 2.0, float(m)
    while hi - lo > _TOL:
        mid = 0.5 * (lo + hi)
        if load_score(mid, m) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def poisson_cdf_inverse(y: float, m: int) -> float:
    """x >= 0 with poisson_cdf(x, m) == y, by monotone bisection."""
    if not 0.0 < y < 1.0:
        raise ValueError("y must lie strictly in (0, 1)")
    hi = 1.0
    while poisson_cdf(hi, m) > y:
        hi *= 2.0
    lo = 0.0
    while hi - lo > _TOL:
        mid = 0.5 * (lo + hi)
        if poisson_cdf(mid, m) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def interference_scale(params: NetworkParams, targets: LinkTargets) -> float:
    """(gamma_R * d0^alpha)^(2/alpha) * geometry constant."""
    delta = 2.0 / params.alpha
    geom = 4.0 * math.pi**2 / ((2.0 + params.alpha) * math.sin(delta * math.pi))
    return (targets.gamma_R * params.d0**params.alpha) ** delta * geom


def _solve_T1(
    params: NetworkParams,
    targets: LinkTargets,
    T2: float,
    p_target: float,
) -> tuple[float, bool, float, bool]:
    """Find T1 with T2*(1 - P_eo(T1, T2)) == p_target.

    Returns (T1, feasible, achieved_p, monotone_warning).  The gap
    function is assumed increasing in T1 (energy outage falls as the
    harvest phase grows); the doubling phase flags any observed
    non-monotonicity.
    """

    def gap(T1: float) -> float:
        slot = SlotConfig(T1=T1, T2=T2)
        return T2 * (1.0 - energy_outage(params, slot, targets.E_C)) - p_target

    lo, hi = 1e-6, 1.0
    g_lo = gap(lo)
    warning = False
    if g_lo > 0.0:
        # already above the target at a vanishing harvest phase: the
        # equality has no root in (0, T1_CAP] (E_C too small)
        return lo, False, g_lo + p_target, warning
    g_hi = gap(hi)
    prev = g_lo
    while g_hi < 0.0 and hi < _T1_CAP:
        if g_hi < prev:
            warning = True
        prev = g_hi
        hi *= 2.0
        g_hi = gap(hi)
    if g_hi < 0.0:
        return hi, False, g_hi + p_target, warning
    while hi - lo > _TOL:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    T1 = 0.5 * (lo + hi)
    return T1, True, gap(T1) + p_target, warning


def optimize_slot(
    params: NetworkParams,
    targets: LinkTargets,
    grid_size: int = 64,
) -> tuple[ThroughputOptimum, list[TradeoffPoint]]:
    """Solve the outage-constrained slot-split problem.

    Returns the throughput optimum plus the tradeoff curve: for each T2 on
    a geometric grid over (T2_lo, T2_hi], the T1 that pins the active
    spatial load at its optimal value.  Every feasible point attains the
    same spatial throughput by construction.
    """
    if params.lam <= 0.0:
        raise InfeasibleError("density must be positive to optimize the slot split")
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    tau = interference_scale(params, targets)
    peak = optimal_load(params.M)
    cap = poisson_cdf_inverse(1.0 - targets.eps_i, params.M)
    star = min(peak, cap)
    T2_lo = star / (tau * params.lam)
    T2_hi = T2_lo / (1.0 - targets.eps_e)
    R_opt = (star / tau) * poisson_cdf(star, params.M) * rate_bits(targets.gamma_R)
    opt = ThroughputOptimum(
        peak_load=peak, load_cap=cap, load_star=star, R_opt=R_opt, T2_lo=T2_lo, T2_hi=T2_hi
    )
    ratio = T2_hi / T2_lo
    points: list[TradeoffPoint] = []
    for j in range(1, grid_size + 1):
        T2 = T2_lo * ratio ** (j / grid_size)
        T1, ok, achieved, warn = _solve_T1(params, targets, T2, T2_lo)
        points.append(
            TradeoffPoint(T1=T1, T2=T2, feasible=ok, achieved_p=achieved, monotone_warning=warn)
        )
    return opt, points


def density_sweep(
    params: NetworkParams,
    slot: SlotConfig,
    targets: LinkTargets,
    lambda_grid,
    interference_limited: bool = False,
) -> list[DensityPoint]:
    """Analytic throughput and outage constraints across a density grid."""
    grid = [float(x) for x in lambda_grid]
    if any(x <= 0.0 for x in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be positive and strictly ascending")
    out: list[DensityPoint] = []
    for lam in grid:
        p = replace(params, lam=lam)
        p_eo = energy_outage(p, slot, targets.E_C)
        dc = derive(p, slot, targets, p_eo)
        p_io = analytic.info_outage(dc, slot, p.M, interference_limited=interference_limited)
        r = dc.active_density * slot.T2 * (1.0 - p_io) * rate_bits(targets.gamma_R)
        out.append(
            DensityPoint(
                lam=lam,
                R=r,
                P_eo=p_eo,
                P_io=p_io,
                feasible=(p_eo <= targets.eps_e and p_io <= targets.eps_i),
            )
        )
    return out
