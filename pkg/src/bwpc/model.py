"""Network parameters, unit system and derived constants.

Internal unit system is fixed to {m, ms, mW, uJ} so that mW * ms = uJ and
every energy/power expression is coefficient free.  Powers may be given in
dBm and SINR targets in dB at the configuration boundary only; explicit
linear keys take precedence over their dB/dBm alternates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """Raised when a configuration file is malformed or violates invariants."""


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_mw(x_dbm: float) -> float:
    return 10.0 ** (x_dbm / 10.0)


def mw_to_dbm(x_mw: float) -> float:
    return 10.0 * math.log10(x_mw)


def rate_bits(gamma_R: float) -> float:
    """Per-link data rate B = log2(1 + gamma_R), bits per ms.

    The log base is a documented convention; it scales spatial throughput
    by a constant factor only.
    """
    return math.log2(1.0 + gamma_R)


@dataclass(frozen=True)
class NetworkParams:
    """Static physical constants of the reader-tag network."""

    lam: float = 0.03     # spacetime density of reader-tag pairs, 1/(m^2*ms)
    M: int = 3            # antennas per reader
    rho: float = 2.0 / 3  # multi-antenna energy-transfer gain factor, G = rho*M
    P_T: float = 100.0    # reader transmit power, mW (20 dBm)
    eta: float = 0.8      # energy-harvest efficiency
    d0: float = 2.0       # reader-tag pair distance, m
    r_o: float = 2.0      # short-range path-loss cutoff, m; L(d) = max(d, r_o)
    alpha: float = 3.0    # path-loss exponent
    beta: float = 0.8     # backscatter coefficient
    N0: float = 1e-9      # receiver noise power, mW (-90 dBm)

    @property
    def G(self) -> float:
        """Forward beamforming gain of the dedicated reader."""
        return self.rho * self.M


@dataclass(frozen=True)
class SlotConfig:
    """Transmission slot split: harvest phase T1 then backscatter phase T2."""

    T1: float = 0.5  # energy harvest phase, ms
    T2: float = 0.5  # backscatter modulation phase, ms

    @property
    def T(self) -> float:
        """Total slot duration, ms."""
        return self.T1 + self.T2


@dataclass(frozen=True)
class LinkTargets:
    """Per-link quality targets and network outage caps."""

    gamma_R: float = db_to_linear(5.0)  # target SINR, linear
    E_C: float = 6.0                    # activation energy threshold, uJ
    eps_e: float = 0.35                 # energy outage cap
    eps_i: float = 0.35                 # information outage cap


@dataclass(frozen=True)
class DerivedConstants:
    """Constants shared by the outage formulas and the simulator.

    All fields follow from (params, slot, targets) plus the energy outage
    probability; `derive` is the only constructor used in practice.
    """

    delta: float               # 2/alpha
    geom_const: float          # 4*pi^2 / ((2+alpha) * sin(pi*delta))
    scaled_target: float       # gamma_R * d0^alpha
    interference_scale: float  # scaled_target**delta * geom_const
    incident_power_mw: float   # mean incident power at a tag, mW
    noise_ratio: float         # N0 / (beta * incident_power_mw), dimensionless
    active_density: float      # (1 - P_eo) * lam, 1/(m^2*ms)


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


def validate(
    params: NetworkParams,
    slot: SlotConfig,
    targets: LinkTargets | None = None,
) -> list[Violation]:
    """Check every domain invariant; returns an empty list on success."""
    v: list[Violation] = []
    if not params.alpha > 2.0:
        v.append(Violation("alpha", "alpha must exceed 2 (harvested-energy moments diverge otherwise)"))
    if not params.d0 >= 1.0:
        v.append(Violation("d0", "d0 must be >= 1 m"))
    if not params.r_o >= 1.0:
        v.append(Violation("r_o", "r_o must be >= 1 m"))
    if not 0.0 < params.eta <= 1.0:
        v.append(Violation("eta", "eta must lie in (0, 1]"))
    if not 0.0 < params.beta <= 1.0:
        v.append(Violation("beta", "beta must lie in (0, 1]"))
    if not params.lam >= 0.0:
        v.append(Violation("lambda", "lambda must be >= 0"))
    if not params.P_T > 0.0:
        v.append(Violation("P_T", "P_T must be positive"))
    if not params.N0 >= 0.0:
        v.append(Violation("N0", "N0 must be >= 0"))
    if not (isinstance(params.M, int) and params.M >= 1):
        v.append(Violation("M", "M must be an integer >= 1"))
    if not slot.T1 > 0.0:
        v.append(Violation("T1", "T1 must be positive"))
    if not slot.T2 > 0.0:
        v.append(Violation("T2", "T2 must be positive"))
    if targets is not None:
        if not targets.gamma_R > 0.0:
            v.append(Violation("gamma_R", "gamma_R must be positive"))
        if not targets.E_C >= 0.0:
            v.append(Violation("E_C", "E_C must be >= 0"))
        if not 0.0 < targets.eps_e < 1.0:
            v.append(Violation("eps_e", "eps_e must lie in (0, 1)"))
        if not 0.0 < targets.eps_i < 1.0:
            v.append(Violation("eps_i", "eps_i must lie in (0, 1)"))
    return v


def derive(
    params: NetworkParams,
    slot: SlotConfig,
    targets: LinkTargets,
    P_eo: float,
) -> DerivedConstants:
    """Populate the derived constants for a given energy outage probability.

    Pure function: identical inputs give bit-identical outputs.  The
    incident power is the analytic mean harvested energy divided by
    eta*T1 and therefore carries no Monte Carlo noise.
    """
    if not 0.0 <= P_eo <= 1.0:
        raise ValueError(f"P_eo must lie in [0, 1], got {P_eo}")
    from . import analytic  # deferred: analytic imports this module

    delta = 2.0 / params.alpha
    geom_const = 4.0 * math.pi**2 / ((2.0 + params.alpha) * math.sin(delta * math.pi))
    scaled_target = targets.gamma_R * params.d0**params.alpha
    incident_power = analytic.mean_harvested_energy(params, slot) / (params.eta * slot.T1)
    return DerivedConstants(
        delta=delta,
        geom_const=geom_const,
        scaled_target=scaled_target,
        interference_scale=scaled_target**delta * geom_const,
        incident_power_mw=incident_power,
        noise_ratio=params.N0 / (params.beta * incident_power),
        active_density=(1.0 - P_eo) * params.lam,
    )


# Configuration file interface ------------------------------------------------

_PARAM_KEYS = {"lambda", "lam", "M", "rho", "P_T", "eta", "d0", "r_o", "alpha", "beta", "N0"}
_SLOT_KEYS = {"T1", "T2"}
_TARGET_KEYS = {"gamma_R", "E_C", "eps_e", "eps_i"}
_ALT_KEYS = {"gamma_R_dB", "P_T_dBm", "N0_dBm"}
_WINDOW_KEYS = {"R_harvest", "R_interf"}  # simulation truncation radii, m
_ALL_KEYS = _PARAM_KEYS | _SLOT_KEYS | _TARGET_KEYS | _ALT_KEYS | _WINDOW_KEYS


def parse_config_text(text: str) -> dict[str, float]:
    """Parse flat `key = value` lines; '#' starts a comment."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = float(val.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad number for {key!r}: {val.strip()!r}") from exc
    return out


def load_config_full(path: str | Path | None = None, overrides: dict | None = None):
    """Build ((params, slot, targets), window_kwargs) from a config file.

    Accepts either the flat key=value text format or a JSON sidecar whose
    "config" object holds the same flat mapping.  Unspecified keys fall
    back to the built-in defaults.  Explicit linear/mW keys win over their
    dB/dBm alternates.  The simulation truncation radii R_harvest and
    R_interf are returned separately for the simulation window.  Raises
    ConfigError naming every violated bound.
    """
    raw: dict[str, float] = {}
    if path is not None:
        text = Path(path).read_text()
        if str(path).endswith(".json") or text.lstrip().startswith("{"):
            doc = json.loads(text)
            cfg = doc.get("config", doc)
            for k, val in cfg.items():
                if k not in _ALL_KEYS:
                    raise ConfigError(f"unknown key {k!r} in {path}")
                raw[k] = float(val)
        else:
            raw = parse_config_text(text)
    if overrides:
        raw.update(overrides)
    window = {k: float(raw.pop(k)) for k in list(raw) if k in _WINDOW_KEYS}
    for k, v in window.items():
        if not v > 0.0:
            raise ConfigError(f"{k} must be positive")
    return resolve_config(raw), window


def load_config(path: str | Path | None = None, overrides: dict | None = None):
    """Build (params, slot, targets); see `load_config_full`."""
    cfg, _ = load_config_full(path, overrides)
    return cfg


def resolve_config(raw: dict[str, float]):
    """Apply precedence and defaults, validate, return (params, slot, targets)."""
    p = NetworkParams()
    s = SlotConfig()
    t = LinkTargets()

    def pick(key: str, alt: str | None, conv, default: float) -> float:
        if key in raw:
            return raw[key]
        if alt is not None and alt in raw:
            return conv(raw[alt])
        return default

    lam = raw.get("lambda", raw.get("lam", p.lam))
    m_val = raw.get("M", p.M)
    if float(m_val) != int(m_val):
        raise ConfigError(f"M must be an integer, got {m_val}")
    params = NetworkParams(
        lam=lam,
        M=int(m_val),
        rho=raw.get("rho", p.rho),
        P_T=pick("P_T", "P_T_dBm", dbm_to_mw, p.P_T),
        eta=raw.get("eta", p.eta),
        d0=raw.get("d0", p.d0),
        r_o=raw.get("r_o", p.r_o),
        alpha=raw.get("alpha", p.alpha),
        beta=raw.get("beta", p.beta),
        N0=pick("N0", "N0_dBm", dbm_to_mw, p.N0),
    )
    slot = SlotConfig(T1=raw.get("T1", s.T1), T2=raw.get("T2", s.T2))
    targets = LinkTargets(
        gamma_R=pick("gamma_R", "gamma_R_dB", db_to_linear, t.gamma_R),
        E_C=raw.get("E_C", t.E_C),
        eps_e=raw.get("eps_e", t.eps_e),
        eps_i=raw.get("eps_i", t.eps_i),
    )
    violations = validate(params, slot, targets)
    if violations:
        raise ConfigError("; ".join(str(x) for x in violations))
    return params, slot, targets


def config_dict(params: NetworkParams, slot: SlotConfig, targets: LinkTargets) -> dict:
    """Flat mapping of the fully resolved configuration (for sidecars)."""
    return {
        "lambda": params.lam,
        "M": params.M,
        "rho": params.rho,
        "P_T": params.P_T,
        "eta": params.eta,
        "d0": params.d0,
        "r_o": params.r_o,
        "alpha": params.alpha,
        "beta": params.beta,
        "N0": params.N0,
        "T1": slot.T1,
        "T2": slot.T2,
        "gamma_R": targets.gamma_R,
        "E_C": targets.E_C,
        "eps_e": targets.eps_e,
        "eps_i": targets.eps_i,
    }
