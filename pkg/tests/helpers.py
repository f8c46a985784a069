"""Shared test utilities: acceptance-criterion recording and brute-force
policy oracles restated independently of the package implementation."""
from __future__ import annotations

import numpy as np

from wpcn_relay.core import (DECISION_DECODE_SET, DECISION_FORWARD,
                             DECISION_NONE, OutageCause, PathLoss, Policy,
                             RelayState, SystemConfig)
from wpcn_relay.policies import (DecodeSet, select_mrs_best_energy_phase1,
                                 select_mrs_best_energy_phase2,
                                 select_mrs_phase1, select_mrs_phase2,
                                 select_srs_acsi_best_decoding,
                                 select_srs_acsi_best_energy,
                                 select_srs_best_decoding,
                                 select_srs_best_energy, select_srs_ncsi)

# ---------------------------------------------------------------------------
# acceptance-criterion result recording (printed by conftest at session end)

CRITERIA_TITLES = {
    1: "fixed-power outage formula vs Monte Carlo oracle",
    2: "allocated-power outage formula vs oracle and Bessel route",
    3: "allocated-power outage never exceeds fixed-power outage",
    4: "simulated saturation matches the grid-powered limit",
    5: "decode-set size optimum located with CI separation",
    6: "scheme orderings",
    7: "property suites (ledger, policy oracles, fixtures, determinism)",
}

CRITERIA_RESULTS: dict = {}


def record_criterion(number: int, ok: bool, detail: str, part: str = "") -> None:
    CRITERIA_RESULTS.setdefault(number, []).append((part, bool(ok), detail))


# ---------------------------------------------------------------------------
# brute-force selection oracles

def brute_srs(gains_sr, relays, config: SystemConfig, rule: str):
    """Single-relay selection restated as filter + min over an explicit key.

    Returns ('forward', relay, power) or ('none', cause, reserved)."""
    dmin = config.decode_gain_min
    cand = [i for i in range(len(gains_sr))
            if not relays[i].forwarding and gains_sr[i] >= dmin]
    cost = config.forward_energy_fixed
    if rule == "ncsi-min-gain" or rule == "ncsi-max-energy":
        feas = [i for i in cand if relays[i].stored_energy_j >= cost]
        if not feas:
            cause = OutageCause.NO_ENERGY if cand else OutageCause.NO_DECODER
            return ("none", cause, -1)
        if rule == "ncsi-min-gain":
            pick = min(feas, key=lambda i: (gains_sr[i], i))
        else:
            pick = min(feas, key=lambda i: (-relays[i].stored_energy_j, i))
        return ("forward", pick, config.p_relay_w)
    if not cand:
        return ("none", OutageCause.NO_DECODER, -1)
    if rule == "ncsi-max-gain":
        pick = min(cand, key=lambda i: (-gains_sr[i], i))
        if relays[pick].stored_energy_j < cost:
            return ("none", OutageCause.NO_ENERGY, pick)
        return ("forward", pick, config.p_relay_w)
    if rule == "acsi-max-energy":
        pick = min(cand, key=lambda i: (-relays[i].stored_energy_j, i))
        return ("forward", pick, None)
    if rule == "acsi-max-gain":
        pick = min(cand, key=lambda i: (-gains_sr[i], i))
        return ("forward", pick, None)
    raise ValueError(rule)


def brute_phase1(gains_sr, relays, config: SystemConfig, rule: str):
    """Decode-set selection: all decodable candidates sorted by the rule's
    key, truncated to M.  Returns ('decode-set', members) or ('none',)."""
    dmin = config.decode_gain_min
    cand = [i for i in range(len(gains_sr))
            if not relays[i].forwarding and gains_sr[i] >= dmin]
    if not cand:
        return ("none",)
    if rule == "weakest-gain":
        cand.sort(key=lambda i: (gains_sr[i], i))
    elif rule == "richest-energy":
        cand.sort(key=lambda i: (-relays[i].stored_energy_j, i))
    else:
        raise ValueError(rule)
    return ("decode-set", tuple(cand[:config.m_decode]))


def brute_phase2(members, gains_rd, relays, config: SystemConfig, rule: str):
    """Forward-slot pick among decode-set members.  Returns
    ('forward', relay, power) or ('none',)."""
    need = config.snr_min * config.noise_var
    scale = config.rd_gain_scale
    t = config.slot_duration
    feas = []
    for pos, i in enumerate(members):
        g = gains_rd[i] * scale
        if g <= 0.0:
            continue
        power = need / g
        if relays[i].stored_energy_j >= power * t:
            feas.append((pos, i, power))
    if not feas:
        return ("none",)
    if rule == "min-power":
        pos, i, power = min(feas, key=lambda z: (z[2], z[0]))
    elif rule == "max-residual":
        pos, i, power = min(
            feas, key=lambda z: (-(relays[z[1]].stored_energy_j - z[2] * t), z[0]))
    else:
        raise ValueError(rule)
    return ("forward", i, power)


_SRS_PAIRS = (
    (select_srs_ncsi, "ncsi-min-gain"),
    (select_srs_best_energy, "ncsi-max-energy"),
    (select_srs_best_decoding, "ncsi-max-gain"),
    (select_srs_acsi_best_energy, "acsi-max-energy"),
    (select_srs_acsi_best_decoding, "acsi-max-gain"),
)

_PHASE1_PAIRS = (
    (select_mrs_phase1, "weakest-gain"),
    (select_mrs_best_energy_phase1, "richest-energy"),
)

_PHASE2_PAIRS = (
    (select_mrs_phase2, "min-power"),
    (select_mrs_best_energy_phase2, "max-residual"),
)

_GAIN_ATOMS = np.array([0.05, 0.3, 0.31, 0.6, 1.2, 2.5])
_ENERGY_ATOMS = np.array([0.0, 2.0, 5.0, 10.0, 20.0])


def random_instance(rng: np.random.Generator):
    """One random selection instance with deliberate ties and boundary hits."""
    n = int(rng.integers(1, 13))
    m = int(rng.integers(1, n + 1))
    path = PathLoss(1.5, 2.0, 2.7) if rng.random() < 0.25 else None
    config = SystemConfig(
        policy=Policy.SRS_NCSI, n_relays=n, m_decode=m,
        eta=float(rng.choice([0.1, 0.7, 1.0])),
        p_source_dbw=float(rng.choice([0.0, 10.0])),
        p_relay_dbw=float(rng.choice([0.0, 10.0])),
        rate_target=float(rng.choice([0.5, 1.0, 2.0])),
        slot_duration=float(rng.choice([0.5, 1.0])),
        path_loss=path)
    atom = rng.random(n) < 0.4
    gains_sr = np.where(atom, rng.choice(_GAIN_ATOMS, n), rng.exponential(1.0, n))
    gains_sr = gains_sr.tolist()
    boundary = rng.random(n) < 0.1
    for i in range(n):
        if boundary[i]:
            gains_sr[i] = config.decode_gain_min
    atom = rng.random(n) < 0.5
    energies = np.where(atom, rng.choice(_ENERGY_ATOMS, n), rng.exponential(8.0, n))
    relays = [RelayState(i, stored_energy_j=float(energies[i])) for i in range(n)]
    if n > 1 and rng.random() < 0.3:
        relays[int(rng.integers(0, n))].forwarding = True
    exact = rng.random(n) < 0.1
    for i in range(n):
        if exact[i] and not relays[i].forwarding:
            relays[i].stored_energy_j = config.forward_energy_fixed
    gains_rd = rng.exponential(1.0, n)
    gains_rd[rng.random(n) < 0.05] = 0.0
    return config, gains_sr, relays, gains_rd.tolist()


def _match_srs(decision, expected) -> bool:
    if expected[0] == "forward":
        return (decision.kind == DECISION_FORWARD
                and decision.relay == expected[1]
                and decision.power_w == expected[2])
    return (decision.kind == DECISION_NONE
            and decision.cause is expected[1]
            and decision.relay == expected[2])


def run_policy_equivalence(n_instances: int, seed: int = 909) -> int:
    """Compare every selector against its brute-force restatement on
    n_instances random instances each; returns the mismatch count."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n_instances):
        config, gains_sr, relays, gains_rd = random_instance(rng)
        for select, rule in _SRS_PAIRS:
            if not _match_srs(select(gains_sr, relays, config),
                              brute_srs(gains_sr, relays, config, rule)):
                mismatches += 1
        for select, rule in _PHASE1_PAIRS:
            got = select(gains_sr, relays, config)
            want = brute_phase1(gains_sr, relays, config, rule)
            if want[0] == "none":
                ok = (got.kind == DECISION_NONE
                      and got.cause is OutageCause.NO_DECODER)
            else:
                ok = (got.kind == DECISION_DECODE_SET
                      and got.members.members == want[1])
            if not ok:
                mismatches += 1
        candidates = [i for i in range(config.n_relays) if not relays[i].forwarding]
        if candidates:
            size = int(rng.integers(1, min(len(candidates), config.m_decode) + 1))
            members = tuple(int(i) for i in
                            rng.choice(candidates, size=size, replace=False))
            ds = DecodeSet(members, config.m_decode)
            for select, rule in _PHASE2_PAIRS:
                got = select(ds, gains_rd, relays, config)
                want = brute_phase2(members, gains_rd, relays, config, rule)
                if want[0] == "none":
                    ok = (got.kind == DECISION_NONE
                          and got.cause is OutageCause.NO_ENERGY)
                else:
                    ok = (got.kind == DECISION_FORWARD
                          and got.relay == want[1]
                          and got.power_w == want[2])
                if not ok:
                    mismatches += 1
    return mismatches
