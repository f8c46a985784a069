"""Core parameter set and record types for the wireless-powered relay network.

Units are fixed once at the boundary: transmit powers enter in dBW and are
converted to watts internally, energies are joules, the slot length T is
seconds, and channel power gains are dimensionless exponential variates.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """Base class for configuration problems."""


class ConfigParseError(ConfigError):
    """Malformed config text (bad syntax, unknown key, bad literal)."""


class ConfigValidationError(ConfigError):
    """Structurally valid config violating a model invariant."""


class Policy(str, enum.Enum):
    """Relay selection schemes.

    The ``ncsi`` schemes transmit at the fixed relay power without knowing
    the forward channel; the ``acsi`` schemes observe the forward channel at
    transmission time and allocate exactly the power needed to close the link.
    """

    SRS_NCSI = "srs-ncsi"
    SRS_NCSI_BEST_ENERGY = "srs-ncsi-best-energy"
    SRS_NCSI_BEST_DECODING = "srs-ncsi-best-decoding"
    MRS_ACSI = "mrs-acsi"
    MRS_ACSI_BEST_ENERGY = "mrs-acsi-best-energy"
    SRS_ACSI_BEST_ENERGY = "srs-acsi-best-energy"
    SRS_ACSI_BEST_DECODING = "srs-acsi-best-decoding"

    def __str__(self) -> str:  # CSV cells carry the bare value
        return self.value


#: schemes whose forwarding stage allocates power from the observed channel
CSIT_POLICIES = frozenset({
    Policy.MRS_ACSI,
    Policy.MRS_ACSI_BEST_ENERGY,
    Policy.SRS_ACSI_BEST_ENERGY,
    Policy.SRS_ACSI_BEST_DECODING,
})

#: schemes that select a multi-relay decode set in a first phase
MULTI_RELAY_POLICIES = frozenset({Policy.MRS_ACSI, Policy.MRS_ACSI_BEST_ENERGY})


class OutageCause(str, enum.Enum):
    NO_DECODER = "no-decoder"
    NO_ENERGY = "no-energy"
    FORWARD_FAIL = "forward-channel-fail"

    def __str__(self) -> str:
        return self.value


def dbw_to_watt(p_dbw: float) -> float:
    """P[W] = 10^(P[dBW]/10)."""
    return 10.0 ** (p_dbw / 10.0)


def watt_to_dbw(p_w: float) -> float:
    """Inverse of dbw_to_watt; requires a positive power."""
    if p_w <= 0.0:
        raise ValueError("power in watts must be positive")
    return 10.0 * math.log10(p_w)


def snr_threshold(rate_target: float) -> float:
    """Minimum SNR v = 2^(2R) - 1 closing a rate-R link in a half slot.

    The factor 2 in the exponent pays for the two-hop time split: each hop
    only gets half the degrees of freedom, so the per-hop spectral efficiency
    must be doubled.
    """
    if rate_target < 0.0:
        raise ValueError("rate_target must be >= 0")
    return 2.0 ** (2.0 * rate_target) - 1.0


@dataclass(frozen=True)
class PathLoss:
    """Deterministic distance attenuation applied on top of fading.

    A link at distance d with exponent alpha scales the fading power gain by
    1/d^alpha.  Disabled by default (unit distances).
    """

    d_source_relay: float = 1.0
    d_relay_dest: float = 1.0
    alpha: float = 2.0

    def __post_init__(self) -> None:
        if self.d_source_relay <= 0.0 or self.d_relay_dest <= 0.0:
            raise ConfigValidationError("path-loss distances must be positive")
        if self.alpha < 0.0:
            raise ConfigValidationError("path-loss exponent must be >= 0")

    @property
    def gain_scale_sr(self) -> float:
        return self.d_source_relay ** -self.alpha

    @property
    def gain_scale_rd(self) -> float:
        return self.d_relay_dest ** -self.alpha


_MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class SystemConfig:
    """Full parameter set for one simulation run.

    Derived quantities used in the per-slot hot path (linear powers, decode
    thresholds, the harvest factor) are computed once here and cached as
    plain attributes.
    """

    policy: Policy = Policy.SRS_NCSI
    n_relays: int = 10
    m_decode: int = 3
    eta: float = 1.0
    p_source_dbw: float = 10.0
    p_relay_dbw: float = 10.0
    rate_target: float = 1.0
    noise_var: float = 1.0
    lambda_rate: float = 1.0
    slot_duration: float = 1.0
    horizon_slots: int = 1_000_000
    warmup_slots: int = 0
    rng_seed: int = 1
    path_loss: PathLoss | None = None

    # cached derived values (not part of identity/comparison)
    p_source_w: float = field(init=False, repr=False, compare=False)
    p_relay_w: float = field(init=False, repr=False, compare=False)
    snr_min: float = field(init=False, repr=False, compare=False)
    decode_gain_min: float = field(init=False, repr=False, compare=False)
    forward_gain_min: float = field(init=False, repr=False, compare=False)
    harvest_factor: float = field(init=False, repr=False, compare=False)
    forward_energy_fixed: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.policy, Policy):
            object.__setattr__(self, "policy", Policy(self.policy))
        self._validate()
        pl = self.path_loss
        sr_scale = pl.gain_scale_sr if pl is not None else 1.0
        rd_scale = pl.gain_scale_rd if pl is not None else 1.0
        ps = dbw_to_watt(self.p_source_dbw)
        pr = dbw_to_watt(self.p_relay_dbw)
        v = snr_threshold(self.rate_target)
        object.__setattr__(self, "p_source_w", ps)
        object.__setattr__(self, "p_relay_w", pr)
        object.__setattr__(self, "snr_min", v)
        # decode iff raw gain * sr_scale >= v*sigma2/Ps, folded into one bound
        object.__setattr__(self, "decode_gain_min", v * self.noise_var / (ps * sr_scale))
        object.__setattr__(self, "forward_gain_min", v * self.noise_var / (pr * rd_scale))
        object.__setattr__(self, "harvest_factor",
                           self.eta * ps * sr_scale * self.slot_duration)
        object.__setattr__(self, "forward_energy_fixed", pr * self.slot_duration)

    def _validate(self) -> None:
        if self.n_relays < 1:
            raise ConfigValidationError("n_relays must be >= 1")
        if self.m_decode < 1:
            raise ConfigValidationError("m_decode must be >= 1")
        if self.m_decode > self.n_relays:
            raise ConfigValidationError("M exceeds N")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigValidationError("eta out of [0,1]")
        if self.rate_target < 0.0:
            raise ConfigValidationError("rate_target must be >= 0")
        if self.noise_var <= 0.0:
            raise ConfigValidationError("noise_var must be positive")
        if self.lambda_rate <= 0.0:
            raise ConfigValidationError("lambda_rate must be positive")
        if self.slot_duration <= 0.0:
            raise ConfigValidationError("slot_duration must be positive")
        if self.horizon_slots < 1:
            raise ConfigValidationError("horizon_slots must be >= 1")
        if self.warmup_slots < 0:
            raise ConfigValidationError("warmup_slots must be >= 0")
        if self.warmup_slots >= self.horizon_slots:
            raise ConfigValidationError("warmup_slots must be < horizon_slots")
        if not 0 <= self.rng_seed <= _MAX_SEED:
            raise ConfigValidationError("rng_seed must fit in 64 bits")

    @property
    def rd_gain_scale(self) -> float:
        return self.path_loss.gain_scale_rd if self.path_loss is not None else 1.0

    @property
    def sr_gain_scale(self) -> float:
        return self.path_loss.gain_scale_sr if self.path_loss is not None else 1.0


# ---------------------------------------------------------------------------
# config text format: one "key = value" per line, '#' starts a comment

_INT_KEYS = {"n_relays", "m_decode", "horizon_slots", "warmup_slots", "rng_seed"}
_FLOAT_KEYS = {"eta", "p_source_dbw", "p_relay_dbw", "rate_target", "noise_var",
               "lambda_rate", "slot_duration"}
_PATH_KEYS = {"path_loss_d_si", "path_loss_d_id", "path_loss_alpha"}
CONFIG_KEYS = _INT_KEYS | _FLOAT_KEYS | _PATH_KEYS | {"policy"}


def parse_config_text(text: str) -> dict:
    """Parse the plain-text config format into a raw key->value dict.

    Unknown keys and duplicate keys are rejected rather than ignored, so a
    typo cannot silently fall back to a default.
    """
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigParseError(f"line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigParseError(f"line {lineno}: unknown key '{key}'")
        if key in raw:
            raise ConfigParseError(f"line {lineno}: duplicate key '{key}'")
        if not value:
            raise ConfigParseError(f"line {lineno}: empty value for '{key}'")
        raw[key] = value
    return raw


def config_from_mapping(raw: dict) -> SystemConfig:
    """Build a validated SystemConfig from string or native values."""
    kwargs: dict = {}
    path: dict = {}
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise ConfigParseError(f"unknown key '{key}'")
        try:
            if key == "policy":
                kwargs["policy"] = Policy(str(value))
            elif key in _INT_KEYS:
                kwargs[key] = int(str(value), 10)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            else:
                path[key] = float(value)
        except (ValueError, KeyError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigParseError(f"bad value for '{key}': {value!r}") from exc
    if path:
        missing = _PATH_KEYS - path.keys()
        if missing:
            raise ConfigValidationError(
                "path-loss keys must be given together; missing " + ", ".join(sorted(missing)))
        kwargs["path_loss"] = PathLoss(d_source_relay=path["path_loss_d_si"],
                                       d_relay_dest=path["path_loss_d_id"],
                                       alpha=path["path_loss_alpha"])
    return SystemConfig(**kwargs)


def load_config(text: str) -> SystemConfig:
    return config_from_mapping(parse_config_text(text))


def dump_config(config: SystemConfig) -> str:
    """Serialize to the same text format load_config accepts (round-trips)."""
    lines = [f"policy = {config.policy.value}"]
    for f_ in fields(SystemConfig):
        if not f_.init or f_.name in ("policy", "path_loss"):
            continue
        value = getattr(config, f_.name)
        lines.append(f"{f_.name} = {value!r}")
    if config.path_loss is not None:
        lines.append(f"path_loss_d_si = {config.path_loss.d_source_relay!r}")
        lines.append(f"path_loss_d_id = {config.path_loss.d_relay_dest!r}")
        lines.append(f"path_loss_alpha = {config.path_loss.alpha!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# per-slot record types


@dataclass(slots=True)
class RelayState:
    """Mutable per-relay record owned by a single simulation run."""

    index: int
    stored_energy_j: float = 0.0
    forwarding: bool = False


@dataclass(slots=True)
class SlotRealization:
    """Channel power gains drawn for one slot.

    gains_sr[i] and gains_rd[i] are the source->relay-i and relay-i->dest
    fading power gains; any path-loss scaling is applied by the consumer.
    """

    slot: int
    gains_sr: list
    gains_rd: list


DECISION_FORWARD = "forward"
DECISION_DECODE_SET = "decode-set"
DECISION_NONE = "none"


@dataclass(slots=True)
class PolicyDecision:
    """Outcome of a selection stage.

    kind 'forward': single relay committed; power_w is the transmit power, or
    None when the scheme allocates power at forwarding time.
    kind 'decode-set': members holds the phase-1 decode set.
    kind 'none': no feasible relay; cause says why.
    """

    kind: str
    relay: int = -1
    power_w: float | None = None
    members: object = None
    cause: OutageCause | None = None

    @classmethod
    def forward(cls, relay: int, power_w: float | None) -> "PolicyDecision":
        if relay < 0:
            raise ValueError("relay index must be >= 0")
        # zero is allowed: a zero rate target demands no transmit power
        if power_w is not None and power_w < 0.0:
            raise ValueError("transmit power must be non-negative")
        return cls(DECISION_FORWARD, relay=relay, power_w=power_w)

    @classmethod
    def decode_set(cls, members: object) -> "PolicyDecision":
        return cls(DECISION_DECODE_SET, members=members)

    @classmethod
    def no_feasible(cls, cause: OutageCause, reserved: int = -1) -> "PolicyDecision":
        """No forward will happen; reserved >= 0 names a relay that still
        spent the slot decoding (so it must not harvest)."""
        return cls(DECISION_NONE, cause=cause, relay=reserved)


@dataclass(frozen=True)
class OutageStats:
    """Outage counts over the measured slots of one run."""

    attempts: int
    outages: int
    no_decoder: int
    no_energy: int
    forward_fail: int

    def __post_init__(self) -> None:
        if self.attempts < 0 or self.outages < 0:
            raise ValueError("counts must be non-negative")
        if self.outages > self.attempts:
            raise ValueError("outages cannot exceed attempts")
        if self.no_decoder + self.no_energy + self.forward_fail != self.outages:
            raise ValueError("cause counts must sum to outages")

    @property
    def outage_prob(self) -> float:
        if self.attempts == 0:
            return math.nan
        return self.outages / self.attempts

    @property
    def ci95_halfwidth(self) -> float:
        """Normal-approximation 95% half width, 1.96*sqrt(p(1-p)/attempts)."""
        if self.attempts == 0:
            return math.nan
        p = self.outage_prob
        return 1.96 * math.sqrt(p * (1.0 - p) / self.attempts)

    @property
    def cause_counts(self) -> dict:
        return {OutageCause.NO_DECODER: self.no_decoder,
                OutageCause.NO_ENERGY: self.no_energy,
                OutageCause.FORWARD_FAIL: self.forward_fail}

    def merged(self, other: "OutageStats") -> "OutageStats":
        return OutageStats(self.attempts + other.attempts,
                           self.outages + other.outages,
                           self.no_decoder + other.no_decoder,
                           self.no_energy + other.no_energy,
                           self.forward_fail + other.forward_fail)
