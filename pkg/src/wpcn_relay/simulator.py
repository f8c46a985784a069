"""Slot-level simulation of the wireless-powered relay network.

Pipeline per slot t: the forward committed at t-1 resolves on this slot's
relay-destination gains, then a fresh source message runs its selection
stage on this slot's source-relay gains, then every relay that is neither
decoding nor transmitting banks this slot's harvest.  A new message enters
every slot, so the two-slot relaying overlaps like a full-duplex pipe.

Bookkeeping rules enforced here:
* the relay transmitting in slot t is flagged forwarding for exactly that
  slot: never a selection candidate, never a harvester;
* relays reserved for decoding in slot t (single pick or decode set) do not
  harvest in slot t;
* fixed-power transmissions debit Pr*T unconditionally (the sender cannot
  see the forward channel), allocated-power transmissions debit exactly the
  power they spend and only happen when affordable;
* stored energy never goes negative; a violation aborts the run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import FadingSource
from .core import (DECISION_DECODE_SET, DECISION_FORWARD, OutageCause,
                   OutageStats, Policy, RelayState, SlotRealization,
                   SystemConfig)
from .policies import (DecodeSet, select_mrs_best_energy_phase1,
                       select_mrs_best_energy_phase2, select_mrs_phase1,
                       select_mrs_phase2, select_srs_acsi_best_decoding,
                       select_srs_acsi_best_energy, select_srs_best_decoding,
                       select_srs_best_energy, select_srs_ncsi)


class SimulationInvariantError(RuntimeError):
    """An internal bookkeeping invariant broke; the run is not trustworthy."""


_SELECTORS = {
    Policy.SRS_NCSI: select_srs_ncsi,
    Policy.SRS_NCSI_BEST_ENERGY: select_srs_best_energy,
    Policy.SRS_NCSI_BEST_DECODING: select_srs_best_decoding,
    Policy.SRS_ACSI_BEST_ENERGY: select_srs_acsi_best_energy,
    Policy.SRS_ACSI_BEST_DECODING: select_srs_acsi_best_decoding,
    Policy.MRS_ACSI: select_mrs_phase1,
    Policy.MRS_ACSI_BEST_ENERGY: select_mrs_best_energy_phase1,
}

_FIXED_POWER_POLICIES = frozenset({
    Policy.SRS_NCSI, Policy.SRS_NCSI_BEST_ENERGY, Policy.SRS_NCSI_BEST_DECODING,
})

_PHASE2 = {
    Policy.MRS_ACSI: select_mrs_phase2,
    Policy.MRS_ACSI_BEST_ENERGY: select_mrs_best_energy_phase2,
}

#: how often the full energy ledger is reconciled against its running total
_LEDGER_PERIOD = 4096


@dataclass(slots=True)
class InFlight:
    """Forward work pending from the previous slot: either one committed
    relay or a decode set awaiting phase 2."""

    relay: int
    members: DecodeSet | None
    counted: bool


@dataclass(slots=True)
class TraceEvent:
    slot: int
    stage: str            # 'resolve' or 'select'
    relay: int
    members: tuple
    power_w: float
    outcome: str          # 'success' | 'outage' | 'pending' | 'idle'
    cause: str


@dataclass(slots=True)
class NetworkState:
    slot_index: int
    relays: list
    in_flight: InFlight | None
    attempts: int = 0
    outages: int = 0
    no_decoder: int = 0
    no_energy: int = 0
    forward_fail: int = 0
    energy_banked: float = 0.0
    energy_spent: float = 0.0
    trace: list | None = None


def new_state(config: SystemConfig) -> NetworkState:
    relays = [RelayState(i) for i in range(config.n_relays)]
    return NetworkState(slot_index=0, relays=relays, in_flight=None)


def harvest_energy(gain_sr: float, config: SystemConfig) -> float:
    """Energy banked from one slot of source signal: eta*Ps*g*T (with any
    source-hop path scaling folded in)."""
    return config.harvest_factor * gain_sr


def _record_outage(state: NetworkState, cause: OutageCause) -> None:
    state.outages += 1
    if cause is OutageCause.NO_DECODER:
        state.no_decoder += 1
    elif cause is OutageCause.NO_ENERGY:
        state.no_energy += 1
    else:
        state.forward_fail += 1


def step(state: NetworkState, realization: SlotRealization, config: SystemConfig,
         issue_message: bool = True) -> None:
    """Advance one slot: resolve the pending forward, run the new message's
    selection, credit harvests.  Set issue_message=False for a final
    resolution-only slot past the horizon."""
    gains_sr = realization.gains_sr
    gains_rd = realization.gains_rd
    relays = state.relays
    trace = state.trace
    busy = -1

    fl = state.in_flight
    if fl is not None:
        policy = config.policy
        if fl.members is None:
            i = fl.relay
            r = relays[i]
            if policy in _FIXED_POWER_POLICIES:
                cost = config.forward_energy_fixed
                if r.stored_energy_j < cost - 1e-9:
                    raise SimulationInvariantError(
                        f"relay {i} committed to forward with energy "
                        f"{r.stored_energy_j} < {cost}")
                r.stored_energy_j -= cost
                state.energy_spent += cost
                busy = i
                ok = gains_rd[i] >= config.forward_gain_min
                if not ok and fl.counted:
                    _record_outage(state, OutageCause.FORWARD_FAIL)
                if trace is not None:
                    trace.append(TraceEvent(state.slot_index, "resolve", i, (),
                                            config.p_relay_w,
                                            "success" if ok else "outage",
                                            "" if ok else str(OutageCause.FORWARD_FAIL)))
            else:
                g = gains_rd[i] * config.rd_gain_scale
                power = config.snr_min * config.noise_var / g if g > 0.0 else math.inf
                cost = power * config.slot_duration
                if r.stored_energy_j >= cost:
                    r.stored_energy_j -= cost
                    state.energy_spent += cost
                    busy = i
                    if trace is not None:
                        trace.append(TraceEvent(state.slot_index, "resolve", i, (),
                                                power, "success", ""))
                else:
                    if fl.counted:
                        _record_outage(state, OutageCause.NO_ENERGY)
                    if trace is not None:
                        trace.append(TraceEvent(state.slot_index, "resolve", i, (),
                                                0.0, "outage",
                                                str(OutageCause.NO_ENERGY)))
        else:
            decision = _PHASE2[policy](fl.members, gains_rd, relays, config)
            if decision.kind == DECISION_FORWARD:
                i = decision.relay
                cost = decision.power_w * config.slot_duration
                r = relays[i]
                if r.stored_energy_j < cost:
                    raise SimulationInvariantError(
                        f"phase-2 pick {i} cannot afford {cost} J")
                r.stored_energy_j -= cost
                state.energy_spent += cost
                busy = i
                if trace is not None:
                    trace.append(TraceEvent(state.slot_index, "resolve", i,
                                            fl.members.members, decision.power_w,
                                            "success", ""))
            else:
                if fl.counted:
                    _record_outage(state, decision.cause)
                if trace is not None:
                    trace.append(TraceEvent(state.slot_index, "resolve", -1,
                                            fl.members.members, 0.0, "outage",
                                            str(decision.cause)))
        state.in_flight = None
        if busy >= 0:
            relays[busy].forwarding = True

    reserved: tuple = ()
    if issue_message:
        counted = state.slot_index >= config.warmup_slots
        if counted:
            state.attempts += 1
        decision = _SELECTORS[config.policy](gains_sr, relays, config)
        kind = decision.kind
        if kind == DECISION_FORWARD:
            state.in_flight = InFlight(decision.relay, None, counted)
            reserved = (decision.relay,)
            if trace is not None:
                trace.append(TraceEvent(state.slot_index, "select", decision.relay,
                                        (), decision.power_w or 0.0, "pending", ""))
        elif kind == DECISION_DECODE_SET:
            ds = decision.members
            state.in_flight = InFlight(-1, ds, counted)
            reserved = ds.members
            if trace is not None:
                trace.append(TraceEvent(state.slot_index, "select", -1, ds.members,
                                        0.0, "pending", ""))
        else:
            if counted:
                _record_outage(state, decision.cause)
            if decision.relay >= 0:
                reserved = (decision.relay,)
            if trace is not None:
                trace.append(TraceEvent(state.slot_index, "select", decision.relay,
                                        (), 0.0, "outage", str(decision.cause)))

    hfac = config.harvest_factor
    banked = state.energy_banked
    for i, g in enumerate(gains_sr):
        r = relays[i]
        if r.forwarding or i in reserved:
            continue
        amount = hfac * g
        r.stored_energy_j += amount
        banked += amount
    state.energy_banked = banked

    if busy >= 0:
        relays[busy].forwarding = False
    state.slot_index += 1

    if state.slot_index % _LEDGER_PERIOD == 0:
        _reconcile_ledger(state)


def _reconcile_ledger(state: NetworkState) -> None:
    total = 0.0
    for r in state.relays:
        if r.stored_energy_j < 0.0:
            raise SimulationInvariantError(
                f"relay {r.index} stored energy is negative: {r.stored_energy_j}")
        total += r.stored_energy_j
    expected = state.energy_banked - state.energy_spent
    tol = 1e-6 * max(1.0, state.energy_banked)
    if abs(total - expected) > tol:
        raise SimulationInvariantError(
            f"energy ledger off by {total - expected} J at slot {state.slot_index}")


_CHUNK_SLOTS = 16384


def run(config: SystemConfig, trace_sink: list | None = None) -> OutageStats:
    """Simulate horizon_slots messages and return the outage statistics of
    the post-warmup ones.  One extra resolution-only slot settles the last
    message, so every issued message has a definite outcome.

    Pass a list as trace_sink to collect per-slot TraceEvents into it.
    Deterministic: equal config (seed included) gives identical stats.
    """
    state = new_state(config)
    state.trace = trace_sink
    source = FadingSource(config.rng_seed, config.lambda_rate)
    n = config.n_relays
    horizon = config.horizon_slots
    remaining = horizon
    slot = 0
    while remaining > 0:
        m = min(_CHUNK_SLOTS, remaining)
        remaining -= m
        rows = source.draw_block(m, n).tolist()
        for row in rows:
            step(state, SlotRealization(slot, row[:n], row[n:]), config)
            slot += 1
    final = source.draw_slot(slot, n)
    step(state, final, config, issue_message=False)
    _reconcile_ledger(state)

    expected_attempts = horizon - config.warmup_slots
    if state.attempts != expected_attempts:
        raise SimulationInvariantError(
            f"attempt count {state.attempts} != measured horizon {expected_attempts}")
    return OutageStats(attempts=state.attempts, outages=state.outages,
                       no_decoder=state.no_decoder, no_energy=state.no_energy,
                       forward_fail=state.forward_fail)


@dataclass(frozen=True)
class OutageShares:
    """Outage decomposition by cause, as fractions of all outages."""

    stats: OutageStats
    share_decode: float
    share_energy: float
    share_forward: float


def decompose_outage(stats: OutageStats) -> OutageShares:
    """Split outages into decode / energy / forward-channel shares; the
    shares are NaN for a run without outages."""
    if stats.outages == 0:
        return OutageShares(stats, math.nan, math.nan, math.nan)
    o = stats.outages
    return OutageShares(stats,
                        share_decode=stats.no_decoder / o,
                        share_energy=stats.no_energy / o,
                        share_forward=stats.forward_fail / o)
