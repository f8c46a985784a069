"""Closed-form outage expressions for a single relay under recurrence time k.

The static scenario looks at one relay that was last active k-1 slots ago
(so it accumulated k-1 harvest slots) and has forwarded n times in that
window.  Two forwarding modes are covered:

* fixed power: the relay transmits at the configured relay power without
  forward channel knowledge;
* allocated power: the relay observes the forward channel and spends exactly
  the power that closes the link.

All expressions work in linear watts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .numerics import bessel_k, erlang_cdf, integrate_half_line


@dataclass(frozen=True)
class StaticScenario:
    """Parameters of the single-relay recurrence analysis.

    k is the recurrence time in slots (k-1 harvest opportunities); n is the
    number of forwards already paid for inside that window, bounded by k//2
    because a forward occupies two slots of the window.
    """

    k: int
    n: int = 0
    lambda_rate: float = 1.0
    eta: float = 1.0
    p_source_w: float = 10.0
    p_relay_w: float = 10.0
    noise_var: float = 1.0
    rate_target: float = 1.0

    snr_min: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 <= self.n <= self.k // 2:
            raise ValueError("n must satisfy 0 <= n <= k//2")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0,1]")
        if self.lambda_rate <= 0.0:
            raise ValueError("lambda_rate must be positive")
        if self.p_source_w <= 0.0 or self.p_relay_w <= 0.0:
            raise ValueError("powers must be positive")
        if self.noise_var <= 0.0:
            raise ValueError("noise_var must be positive")
        if self.rate_target < 0.0:
            raise ValueError("rate_target must be >= 0")
        object.__setattr__(self, "snr_min", 2.0 ** (2.0 * self.rate_target) - 1.0)

    @property
    def harvest_demand(self) -> float:
        """U: total harvested-gain sum needed to afford the (n+1)-th
        fixed-power forward, (n+1)*Pr/(eta*Ps)."""
        return (self.n + 1) * self.p_relay_w / (self.eta * self.p_source_w)

    @property
    def alloc_demand(self) -> float:
        """Q: gain-sum scale of the allocated-power mode,
        (n+1)*v*sigma2/(eta*Ps)."""
        return (self.n + 1) * self.snr_min * self.noise_var / (self.eta * self.p_source_w)


def selection_probability(scenario: StaticScenario) -> float:
    """Probability that the relay decodes and can afford the fixed-power
    forward: exp(-lam*v*s2/Ps) * Pr(S_{k-1} > U).

    S_{k-1} is the sum of k-1 iid Exponential(lam) harvest gains, so the
    survival factor is one minus the Erlang(k-1) CDF at U.  k=1 leaves no
    harvest slot and the probability is zero.
    """
    if scenario.k == 1:
        return 0.0
    lam = scenario.lambda_rate
    decode = math.exp(-lam * scenario.snr_min * scenario.noise_var / scenario.p_source_w)
    survive = 1.0 - erlang_cdf(scenario.k - 1, lam, scenario.harvest_demand)
    return decode * survive


def outage_fixed_power(scenario: StaticScenario) -> float:
    """Outage of the fixed-power relay under recurrence time k:
    1 - exp(-lam*v*s2/Pr) * selection_probability; 1 when k=1."""
    if scenario.k == 1:
        return 1.0
    lam = scenario.lambda_rate
    forward = math.exp(-lam * scenario.snr_min * scenario.noise_var / scenario.p_relay_w)
    return 1.0 - forward * selection_probability(scenario)


def forward_feasibility_factor(scenario: StaticScenario, *,
                               abs_tol: float = 1e-10,
                               max_evals: int = 1_000_000) -> float:
    """B(k) = E[exp(-lam*Q/S_{k-1})]: probability that the observed forward
    channel is good enough for the energy the relay can spend.

    Reference evaluation: adaptive quadrature of the Erlang(k-1, lam)
    density times exp(-lam*Q/z) over (0, inf).  Zero when k=1 (no stored
    energy), one when Q=0 (zero rate demands no power).
    """
    if scenario.k == 1:
        return 0.0
    q = scenario.alloc_demand
    if q == 0.0:
        return 1.0
    lam = scenario.lambda_rate
    l = scenario.k - 1
    log_norm = math.log(lam) - math.lgamma(l)

    def integrand(z: float) -> float:
        w = log_norm + (l - 1) * math.log(lam * z) - lam * z - lam * q / z
        if w < -745.0:
            return 0.0
        return math.exp(w)

    return integrate_half_line(integrand, abs_tol=abs_tol, max_evals=max_evals)


def forward_feasibility_factor_bessel(scenario: StaticScenario) -> float:
    """Closed Bessel form of B(k):  2/Gamma(k-1) * y^((k-1)/2) * K_{k-1}(2*sqrt(y))
    with y = lam^2 * Q.  Cross-check route for the quadrature."""
    if scenario.k == 1:
        return 0.0
    q = scenario.alloc_demand
    if q == 0.0:
        return 1.0
    l = scenario.k - 1
    y = scenario.lambda_rate ** 2 * q
    return 2.0 / math.gamma(l) * y ** (0.5 * l) * bessel_k(l, 2.0 * math.sqrt(y))


def outage_allocated_power(scenario: StaticScenario, *,
                           use_bessel: bool = False) -> float:
    """Outage of the allocated-power relay under recurrence time k:
    1 - exp(-lam*v*s2/Ps) * B(k); 1 when k=1, 0 when the rate target is 0."""
    if scenario.k == 1:
        return 1.0
    lam = scenario.lambda_rate
    decode = math.exp(-lam * scenario.snr_min * scenario.noise_var / scenario.p_source_w)
    if use_bessel:
        b = forward_feasibility_factor_bessel(scenario)
    else:
        b = forward_feasibility_factor(scenario)
    return 1.0 - decode * b


def outage_grid_powered(p_source_w: float, p_relay_w: float, noise_var: float,
                        rate_target: float, lambda_rate: float = 1.0) -> float:
    """Two-hop outage with mains-powered nodes (no harvesting constraint):
    1 - exp(-lam*v*s2/Ps - lam*v*s2/Pr)."""
    if p_source_w <= 0.0 or p_relay_w <= 0.0:
        raise ValueError("powers must be positive")
    if noise_var <= 0.0:
        raise ValueError("noise_var must be positive")
    if lambda_rate <= 0.0:
        raise ValueError("lambda_rate must be positive")
    v = 2.0 ** (2.0 * rate_target) - 1.0
    lam = lambda_rate
    return 1.0 - math.exp(-lam * v * noise_var / p_source_w
                          - lam * v * noise_var / p_relay_w)
