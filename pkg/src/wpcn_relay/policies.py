"""Relay selection rules, as pure functions of one slot's channel snapshot.

Every selector sees the source-relay gains of the current slot plus the
per-relay states, and returns a PolicyDecision.  Relays currently flagged
forwarding are never candidates (the half-duplex constraint).  All ties
break toward the lowest relay index.

Decode feasibility is a gain threshold: relay i decodes iff its source-hop
gain meets config.decode_gain_min = v*sigma2/(Ps*path_scale).
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import OutageCause, PolicyDecision, SystemConfig


class InfeasiblePowerError(ValueError):
    """A zero forward gain would demand infinite transmit power."""


def required_forward_power(gain_rd: float, config: SystemConfig) -> float:
    """Minimum transmit power closing the forward hop on the observed gain:
    v*sigma2/(g*path_scale).  Callers treat a zero gain as an infeasible
    relay; this function raises on it."""
    effective = gain_rd * config.rd_gain_scale
    if effective <= 0.0:
        raise InfeasiblePowerError("zero forward gain: no finite power closes the hop")
    return config.snr_min * config.noise_var / effective


@dataclass(frozen=True)
class DecodeSet:
    """Ordered phase-1 selection; members are relay indices, capacity is the
    configured maximum set size M."""

    members: tuple
    capacity: int

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if len(self.members) > self.capacity:
            raise ValueError("decode set exceeds its capacity")
        if len(set(self.members)) != len(self.members):
            raise ValueError("decode set members must be distinct")
        if any(m < 0 for m in self.members):
            raise ValueError("relay indices must be >= 0")


def select_srs_ncsi(gains_sr, relays, config: SystemConfig) -> PolicyDecision:
    """Single relay, no forward channel knowledge.

    Among relays that decode AND hold the energy for one fixed-power slot,
    pick the one with the smallest source-hop gain.  Leaving the strong
    gains unreserved keeps the big harvests coming, which is what makes
    this selection rule outperform the greedy baselines.
    """
    dmin = config.decode_gain_min
    cost = config.forward_energy_fixed
    best = -1
    best_gain = 0.0
    saw_decoder = False
    for i, g in enumerate(gains_sr):
        r = relays[i]
        if r.forwarding or g < dmin:
            continue
        saw_decoder = True
        if r.stored_energy_j < cost:
            continue
        if best < 0 or g < best_gain:
            best = i
            best_gain = g
    if best < 0:
        cause = OutageCause.NO_ENERGY if saw_decoder else OutageCause.NO_DECODER
        return PolicyDecision.no_feasible(cause)
    return PolicyDecision.forward(best, config.p_relay_w)


def select_srs_best_energy(gains_sr, relays, config: SystemConfig) -> PolicyDecision:
    """Greedy baseline: among decodable relays that can afford the fixed
    power slot, maximize the post-forward residual energy (equivalently the
    stored energy).  Energy-short decoders are passed over while a feasible
    one exists; with decoders but no feasible one the slot is an energy
    outage."""
    dmin = config.decode_gain_min
    cost = config.forward_energy_fixed
    best = -1
    best_energy = 0.0
    saw_decoder = False
    for i, g in enumerate(gains_sr):
        r = relays[i]
        if r.forwarding or g < dmin:
            continue
        saw_decoder = True
        e = r.stored_energy_j
        if e < cost:
            continue
        if best < 0 or e > best_energy:
            best = i
            best_energy = e
    if best < 0:
        cause = OutageCause.NO_ENERGY if saw_decoder else OutageCause.NO_DECODER
        return PolicyDecision.no_feasible(cause)
    return PolicyDecision.forward(best, config.p_relay_w)


def select_srs_best_decoding(gains_sr, relays, config: SystemConfig) -> PolicyDecision:
    """Greedy baseline: pick the strongest decodable source-hop gain, then
    gate on energy.  The gate comes after the pick: an energy-short winner
    is an outage, not a re-selection, and it still occupied the slot by
    decoding (carried on the returned decision's relay field)."""
    dmin = config.decode_gain_min
    best = -1
    best_gain = -1.0
    for i, g in enumerate(gains_sr):
        if relays[i].forwarding or g < dmin:
            continue
        if g > best_gain:
            best = i
            best_gain = g
    if best < 0:
        return PolicyDecision.no_feasible(OutageCause.NO_DECODER)
    if relays[best].stored_energy_j < config.forward_energy_fixed:
        return PolicyDecision.no_feasible(OutageCause.NO_ENERGY, reserved=best)
    return PolicyDecision.forward(best, config.p_relay_w)


def select_srs_acsi_best_energy(gains_sr, relays, config: SystemConfig) -> PolicyDecision:
    """CSIT baseline: richest decodable relay, transmit power decided next
    slot from the observed forward gain (power_w None until then).  No
    energy screening now; feasibility is settled at forwarding time."""
    dmin = config.decode_gain_min
    best = -1
    best_energy = 0.0
    for i, g in enumerate(gains_sr):
        r = relays[i]
        if r.forwarding or g < dmin:
            continue
        e = r.stored_energy_j
        if best < 0 or e > best_energy:
            best = i
            best_energy = e
    if best < 0:
        return PolicyDecision.no_feasible(OutageCause.NO_DECODER)
    return PolicyDecision.forward(best, None)


def select_srs_acsi_best_decoding(gains_sr, relays, config: SystemConfig) -> PolicyDecision:
    """CSIT baseline: strongest decodable source-hop gain, power allocated
    at forwarding time."""
    dmin = config.decode_gain_min
    best = -1
    best_gain = -1.0
    for i, g in enumerate(gains_sr):
        if relays[i].forwarding or g < dmin:
            continue
        if g > best_gain:
            best = i
            best_gain = g
    if best < 0:
        return PolicyDecision.no_feasible(OutageCause.NO_DECODER)
    return PolicyDecision.forward(best, None)


def select_mrs_phase1(gains_sr, relays, config: SystemConfig) -> PolicyDecision:
    """Multi-relay phase 1: reserve the min(M, #decodable) decodable relays
    with the SMALLEST source-hop gains.  Decoding only needs the threshold,
    while harvest scales with the gain, so the weak decoders are the cheap
    ones to take out of the harvest pool."""
    dmin = config.decode_gain_min
    decodable = [i for i, g in enumerate(gains_sr)
                 if g >= dmin and not relays[i].forwarding]
    if not decodable:
        return PolicyDecision.no_feasible(OutageCause.NO_DECODER)
    # stable sort on gain alone: equal gains keep ascending index order
    decodable.sort(key=gains_sr.__getitem__)
    members = tuple(decodable[:config.m_decode])
    return PolicyDecision.decode_set(DecodeSet(members, config.m_decode))


def select_mrs_phase2(decode_set: DecodeSet, gains_rd, relays,
                      config: SystemConfig) -> PolicyDecision:
    """Multi-relay phase 2, one slot later: among members whose stored
    energy covers the power demanded by their observed forward gain, pick
    the cheapest demand (first feasible entry in ascending power order)."""
    v_s2 = config.snr_min * config.noise_var
    scale = config.rd_gain_scale
    t = config.slot_duration
    best = -1
    best_power = 0.0
    for i in decode_set.members:
        g = gains_rd[i] * scale
        if g <= 0.0:
            continue
        p = v_s2 / g
        if relays[i].stored_energy_j < p * t:
            continue
        if best < 0 or p < best_power:
            best = i
            best_power = p
    if best < 0:
        return PolicyDecision.no_feasible(OutageCause.NO_ENERGY)
    return PolicyDecision.forward(best, best_power)


def select_mrs_best_energy_phase1(gains_sr, relays,
                                  config: SystemConfig) -> PolicyDecision:
    """Greedy multi-relay phase 1: reserve up to M decodable relays in
    descending stored-energy order."""
    dmin = config.decode_gain_min
    decodable = [i for i, g in enumerate(gains_sr)
                 if g >= dmin and not relays[i].forwarding]
    if not decodable:
        return PolicyDecision.no_feasible(OutageCause.NO_DECODER)
    # stable: equal energies keep ascending index order
    decodable.sort(key=lambda i: -relays[i].stored_energy_j)
    members = tuple(decodable[:config.m_decode])
    return PolicyDecision.decode_set(DecodeSet(members, config.m_decode))


def select_mrs_best_energy_phase2(decode_set: DecodeSet, gains_rd, relays,
                                  config: SystemConfig) -> PolicyDecision:
    """Greedy multi-relay phase 2: among feasible members maximize the
    residual energy after paying the allocated power."""
    v_s2 = config.snr_min * config.noise_var
    scale = config.rd_gain_scale
    t = config.slot_duration
    best = -1
    best_power = 0.0
    best_residual = 0.0
    for i in decode_set.members:
        g = gains_rd[i] * scale
        if g <= 0.0:
            continue
        p = v_s2 / g
        e = relays[i].stored_energy_j
        if e < p * t:
            continue
        residual = e - p * t
        if best < 0 or residual > best_residual:
            best = i
            best_power = p
            best_residual = residual
    if best < 0:
        return PolicyDecision.no_feasible(OutageCause.NO_ENERGY)
    return PolicyDecision.forward(best, best_power)
