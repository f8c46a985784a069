"""Slot-level simulator and closed-form outage analytics for relay selection
in wireless-powered cooperative networks.

The simulator plays a two-slot decode-and-forward pipeline: every slot the
source issues a new message, the previous message is forwarded on this slot's
relay-to-destination channels, and idle relays harvest energy from the source
transmission.  The analytics module evaluates the matching closed-form outage
expressions for a snapshot network, and the oracles module re-derives both by
direct Monte Carlo so each route checks the other.
"""

__version__ = "0.1.0"

from .analytics import (StaticScenario, forward_feasibility_factor,
                        forward_feasibility_factor_bessel,
                        outage_allocated_power, outage_fixed_power,
                        outage_grid_powered, selection_probability)
from .channel import RNG_ALGORITHM, FadingSource, rate_relay_dest, rate_source_relay
from .core import (ConfigError, ConfigParseError, ConfigValidationError,
                   OutageCause, OutageStats, PathLoss, Policy, PolicyDecision,
                   RelayState, SlotRealization, SystemConfig, dbw_to_watt,
                   dump_config, load_config, snr_threshold, watt_to_dbw)
from .simulator import (NetworkState, OutageShares, SimulationInvariantError,
                        decompose_outage, new_state, run, step)

__all__ = [
    "ConfigError", "ConfigParseError", "ConfigValidationError",
    "FadingSource", "NetworkState", "OutageCause", "OutageShares",
    "OutageStats", "PathLoss", "Policy", "PolicyDecision", "RNG_ALGORITHM",
    "RelayState", "SimulationInvariantError", "SlotRealization",
    "StaticScenario", "SystemConfig", "__version__", "dbw_to_watt",
    "decompose_outage", "dump_config", "forward_feasibility_factor",
    "forward_feasibility_factor_bessel", "load_config", "new_state",
    "outage_allocated_power", "outage_fixed_power", "outage_grid_powered",
    "rate_relay_dest", "rate_source_relay", "run", "selection_probability",
    "snr_threshold", "step", "watt_to_dbw",
]
