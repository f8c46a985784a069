"""Monte Carlo oracles for the closed-form expressions.

Each oracle re-derives its probability from raw exponential draws and event
counting, sharing no code with the closed forms: the harvest-gain sum is an
explicit sum of k-1 exponential variates, never a Gamma shortcut, so the
Erlang reasoning inside the formulas is independently exercised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import StaticScenario

_CHUNK = 1_000_000


@dataclass(frozen=True)
class OracleEstimate:
    mean: float
    std_err: float
    n_samples: int

    def distance_in_se(self, value: float) -> float:
        """|value - mean| in units of the standard error (inf when se=0
        and the values disagree)."""
        diff = abs(value - self.mean)
        if self.std_err == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.std_err


def _scenario_events(scenario: StaticScenario, n_samples: int, seed: int):
    """Yield per-chunk boolean event arrays (decode, afford_fixed,
    forward_fixed, forward_alloc)."""
    lam = scenario.lambda_rate
    v = scenario.snr_min
    s2 = scenario.noise_var
    k, n = scenario.k, scenario.n
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(7,)))
    remaining = n_samples
    while remaining > 0:
        m = min(_CHUNK, remaining)
        remaining -= m
        s = np.zeros(m)
        for _ in range(k - 1):
            s += rng.standard_exponential(m) / lam
        h_si = rng.standard_exponential(m) / lam
        h_id = rng.standard_exponential(m) / lam
        decode = h_si * scenario.p_source_w >= v * s2
        afford = scenario.eta * scenario.p_source_w * s >= (n + 1) * scenario.p_relay_w
        fwd_fixed = h_id * scenario.p_relay_w >= v * s2
        fwd_alloc = h_id * scenario.eta * scenario.p_source_w * s >= (n + 1) * v * s2
        yield decode, afford, fwd_fixed, fwd_alloc


def _binom_estimate(successes: int, n_samples: int) -> OracleEstimate:
    p = successes / n_samples
    se = math.sqrt(p * (1.0 - p) / n_samples)
    return OracleEstimate(mean=p, std_err=se, n_samples=n_samples)


def oracle_selection_probability(scenario: StaticScenario, n_samples: int = 10 ** 6,
                                 seed: int = 20_240) -> OracleEstimate:
    """P(decode and afford fixed-power forward) by event counting."""
    if scenario.k == 1:
        return OracleEstimate(0.0, 0.0, n_samples)
    hits = 0
    for decode, afford, _, _ in _scenario_events(scenario, n_samples, seed):
        hits += int(np.count_nonzero(decode & afford))
    return _binom_estimate(hits, n_samples)


def oracle_outage_fixed_power(scenario: StaticScenario, n_samples: int = 10 ** 6,
                              seed: int = 20_240) -> OracleEstimate:
    """1 - P(decode, afford, forward channel closes at fixed power)."""
    if scenario.k == 1:
        return OracleEstimate(1.0, 0.0, n_samples)
    hits = 0
    for decode, afford, fwd_fixed, _ in _scenario_events(scenario, n_samples, seed):
        hits += int(np.count_nonzero(decode & afford & fwd_fixed))
    est = _binom_estimate(hits, n_samples)
    return OracleEstimate(1.0 - est.mean, est.std_err, n_samples)


def oracle_outage_allocated_power(scenario: StaticScenario, n_samples: int = 10 ** 6,
                                  seed: int = 20_240) -> OracleEstimate:
    """1 - P(decode and the observed forward channel is affordable)."""
    if scenario.k == 1:
        return OracleEstimate(1.0, 0.0, n_samples)
    hits = 0
    for decode, _, _, fwd_alloc in _scenario_events(scenario, n_samples, seed):
        hits += int(np.count_nonzero(decode & fwd_alloc))
    est = _binom_estimate(hits, n_samples)
    return OracleEstimate(1.0 - est.mean, est.std_err, n_samples)


def oracle_forward_feasibility(scenario: StaticScenario, n_samples: int = 10 ** 6,
                               seed: int = 20_240) -> OracleEstimate:
    """P(h_id * S_{k-1} >= Q) for B(k), by direct event counting."""
    if scenario.k == 1:
        return OracleEstimate(0.0, 0.0, n_samples)
    lam = scenario.lambda_rate
    q = scenario.alloc_demand
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(11,)))
    hits = 0
    remaining = n_samples
    while remaining > 0:
        m = min(_CHUNK, remaining)
        remaining -= m
        s = np.zeros(m)
        for _ in range(scenario.k - 1):
            s += rng.standard_exponential(m) / lam
        h_id = rng.standard_exponential(m) / lam
        hits += int(np.count_nonzero(h_id * s >= q))
    return _binom_estimate(hits, n_samples)
