"""Asynchronous backscatter wireless-powered network: analysis + simulation."""

from .analytic import (
    CantelliBounds,
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
from .model import (
    ConfigError,
    DerivedConstants,
    LinkTargets,
    NetworkParams,
    SlotConfig,
    Violation,
    db_to_linear,
    dbm_to_mw,
    derive,
    load_config,
    rate_bits,
    validate,
)
from .montecarlo import (
    DegenerateEstimateError,
    EstimatorResult,
    NetworkRealization,
    SimWindow,
    estimate_energy_moments,
    estimate_energy_outage,
    estimate_info_outage,
    estimate_throughput,
    harvested_energy,
    info_outage_sweep,
    energy_outage_sweep,
    sample_network,
    simulate_sinr,
    truncation_sensitivity,
)
from .optimize import (
    DensityPoint,
    InfeasibleError,
    ThroughputOptimum,
    TradeoffPoint,
    density_sweep,
    optimal_load,
    optimize_slot,
    poisson_cdf_inverse,
)

__version__ = "0.1.0"
