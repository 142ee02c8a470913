"""Closed-form performance expressions for the asynchronous backscatter network.

Energy outage is approximated by second-order moment matching to a Gamma
distribution; information outage and spatial throughput reduce to the CDF
of a Poisson count at the antenna order.  Everything here is a pure
function of the parameter objects in `model`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .model import DerivedConstants, LinkTargets, NetworkParams, SlotConfig, rate_bits


class DegenerateDistributionError(ValueError):
    """Harvested energy is deterministic (zero variance); no Gamma fit exists."""


@dataclass(frozen=True)
class EnergyMoments:
    mean: float      # uJ
    variance: float  # uJ^2


@dataclass(frozen=True)
class GammaFit:
    k: float      # shape
    theta: float  # scale, uJ


@dataclass(frozen=True)
class CantelliBounds:
    """One-sided Chebyshev bounds on the energy outage probability.

    `upper` is valid for E_C <= mean, `lower` for E_C >= mean; the field
    outside its validity domain is None.  At E_C == mean both are defined.
    """

    upper: float | None
    lower: float | None


def mean_harvested_energy(params: NetworkParams, slot: SlotConfig) -> float:
    """Mean energy harvested during the first phase, uJ.

    eta*P_T*T1 * (G*d0^-alpha + pi*lam*T*(alpha/(alpha-2))*r_o^(2-alpha));
    the first term is the dedicated reader, the second the network average.
    """
    a = params.alpha
    dedicated = params.G * params.d0**-a
    network = math.pi * params.lam * slot.T * (a / (a - 2.0)) * params.r_o ** (2.0 - a)
    return params.eta * params.P_T * slot.T1 * (dedicated + network)


def variance_harvested_energy(params: NetworkParams, slot: SlotConfig) -> float:
    """Variance of the harvested energy, uJ^2.  Zero when lam == 0."""
    a = params.alpha
    pref = (params.eta * params.P_T * slot.T1) ** 2
    cross = (
        (2.0 / 3.0)
        * (2.0 * slot.T1 + 3.0 * slot.T2)
        * math.pi
        * params.lam
        * a
        * params.r_o ** (2.0 - a)
        * (params.G * params.d0**-a / (a - 2.0) + params.r_o**-a / (a - 1.0))
    )
    quad = (math.pi * params.lam * (a / (a - 2.0)) * params.r_o ** (2.0 - a)) ** 2 * (
        (3.0 * slot.T1**2 + 8.0 * slot.T1 * slot.T2 + 6.0 * slot.T2**2) / 6.0
    )
    return pref * (cross + quad)


def energy_moments(params: NetworkParams, slot: SlotConfig) -> EnergyMoments:
    return EnergyMoments(
        mean=mean_harvested_energy(params, slot),
        variance=variance_harvested_energy(params, slot),
    )


def gamma_fit(moments: EnergyMoments) -> GammaFit:
    """Match a Gamma(k, theta) to the first two moments."""
    if moments.variance <= 0.0:
        raise DegenerateDistributionError(
            "variance is zero (no interfering readers); harvested energy is deterministic"
        )
    if moments.mean <= 0.0:
        raise ValueError("mean harvested energy must be positive for a Gamma fit")
    return GammaFit(k=moments.mean**2 / moments.variance, theta=moments.variance / moments.mean)


def energy_outage_approx(fit: GammaFit, E_C: float) -> float:
    """Gamma-approximate P{E_H < E_C}: the regularized lower incomplete gamma."""
    if E_C < 0.0:
        raise ValueError("E_C must be >= 0")
    return float(special.gammainc(fit.k, E_C / fit.theta))


def energy_outage(params: NetworkParams, slot: SlotConfig, E_C: float) -> float:
    """P{E_H < E_C} via the Gamma approximation.

    The lam == 0 case is degenerate (E_H deterministic); it bypasses the
    fit and returns the indicator {E_C > mean}.
    """
    m = energy_moments(params, slot)
    if m.variance == 0.0:
        return 1.0 if E_C > m.mean else 0.0
    return energy_outage_approx(gamma_fit(m), E_C)


def energy_outage_cantelli(moments: EnergyMoments, E_C: float) -> CantelliBounds:
    """Distribution-free outage bounds from the first two moments."""
    if moments.variance <= 0.0:
        raise DegenerateDistributionError("Cantelli bounds require positive variance")
    gap2 = (E_C - moments.mean) ** 2
    upper = moments.variance / (moments.variance + gap2) if E_C <= moments.mean else None
    lower = gap2 / (moments.variance + gap2) if E_C >= moments.mean else None
    return CantelliBounds(upper=upper, lower=lower)


def poisson_cdf(x, m: int):
    """P[N <= m-1] for N ~ Poisson(x): sum of the first m Poisson weights.

    This is the no-outage kernel of the post-MMSE SINR distribution at an
    m-antenna reader.  Evaluated as the regularized upper incomplete gamma
    Q(m, x), which is exact for integer m and stable for large x.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    return special.gammaincc(m, x) if np.ndim(x) else float(special.gammaincc(m, x))


def poisson_cdf_deriv(x, m: int):
    """d/dx of poisson_cdf: -x^(m-1) e^(-x) / (m-1)!, always <= 0."""
    if m < 1:
        raise ValueError("m must be >= 1")
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logterm = np.where(
            x_arr > 0.0,
            (m - 1) * np.log(np.where(x_arr > 0.0, x_arr, 1.0)) - x_arr - special.gammaln(m),
            0.0,
        )
    out = np.where(x_arr > 0.0, -np.exp(logterm), -1.0 if m == 1 else 0.0)
    return out if np.ndim(x) else float(out)


def info_outage(
    dc: DerivedConstants,
    slot: SlotConfig,
    M: int,
    interference_limited: bool = False,
) -> float:
    """Information outage probability at the typical reader.

    Full mode: 1 - poisson_cdf(active_density*scaled_target^delta*geom*T2
    + noise_ratio*scaled_target, M); interference-limited mode drops the
    noise term.
    """
    load = dc.active_density * dc.interference_scale * slot.T2
    if not interference_limited:
        load = load + dc.noise_ratio * dc.scaled_target
    return 1.0 - poisson_cdf(load, M)


def spatial_throughput(
    params: NetworkParams,
    slot: SlotConfig,
    targets: LinkTargets,
    P_eo: float,
    interference_limited: bool = False,
) -> float:
    """Network spatial throughput, bits per (m^2*ms).

    active_density * T2 * (1 - P_io) * B(gamma_R), with P_io from
    `info_outage` in the requested mode.
    """
    from .model import derive  # deferred: model.derive calls back into this module

    dc = derive(params, slot, targets, P_eo)
    p_io = info_outage(dc, slot, params.M, interference_limited=interference_limited)
    return dc.active_density * slot.T2 * (1.0 - p_io) * rate_bits(targets.gamma_R)
