"""Acceptance suite: the headline claims of the package, checked end to end.

Seven criteria, each reported as one line in the terminal summary:

1. fixed-power outage closed form vs an independent Monte Carlo oracle
   (10^7 samples, 4 standard errors) over a (k, n, R) grid;
2. allocated-power outage closed form vs its oracle, plus agreement of the
   quadrature and Bessel evaluation routes to 1e-8;
3. allocated power never loses to fixed power at any grid point;
4. the simulator at generous harvest (eta=0.7) against the saturated
   always-energized limit, and N-invariance past the saturation point;
5. the decode-set size sweep locates the expected optimum with CI-separated
   neighbours;
6. outage orderings across the selection schemes, failing only on
   confidently inverted pairs (overlapping CIs are reported as ties);
7. the fast property gate: energy ledger closure, brute-force policy
   oracles, pinned special-function fixtures, and byte-exact determinism.

Criteria 4 and 5 are known to fail in part; the terminal summary and the
recorded details give the measured numbers.  Criterion 4 fails at R=2
because the pipelined simulator excludes the forwarding relay from the next
selection, which the always-energized limit ignores; the bias scales with
the per-relay decode failure rate and only becomes visible at high rate
targets.  Criterion 5 fails because the outage surface is nearly flat
around the optimum at both rate targets, so the argmin is not CI-separable
from its neighbours at this sample size.
"""
import math
import random
import time

import helpers
import wpcn_relay.harness as harness
from wpcn_relay.analytics import (StaticScenario, outage_allocated_power,
                                  outage_fixed_power)
from wpcn_relay.channel import FadingSource
from wpcn_relay.core import PathLoss, Policy, SystemConfig
from wpcn_relay.harness import SweepSpec, run_sweep, simulate_point
from wpcn_relay.oracles import (oracle_outage_allocated_power,
                                oracle_outage_fixed_power)
from wpcn_relay.simulator import new_state, run, step

GRID_K = (1, 2, 3, 5, 8)
GRID_N = (0, 1)
GRID_R = (0.5, 1.0, 2.0)
ORACLE_SAMPLES = 10_000_000


def static_grid():
    for k in GRID_K:
        for n in GRID_N:
            if n > k // 2:
                continue
            for r in GRID_R:
                yield StaticScenario(k=k, n=n, rate_target=r)


def _point_label(sc):
    return f"k={sc.k} n={sc.n} R={sc.rate_target}"


def test_criterion_1_fixed_power_formula_vs_oracle():
    t0 = time.perf_counter()
    worst, where, count = 0.0, "", 0
    for i, sc in enumerate(static_grid()):
        est = oracle_outage_fixed_power(sc, n_samples=ORACLE_SAMPLES,
                                        seed=100 + i)
        d = est.distance_in_se(outage_fixed_power(sc))
        count += 1
        if d > worst:
            worst, where = d, _point_label(sc)
    ok = worst <= 4.0
    detail = (f"{count} points x {ORACLE_SAMPLES:.0e} samples, worst "
              f"{worst:.2f}/4.0 SE at {where}, "
              f"{time.perf_counter() - t0:.0f}s")
    helpers.record_criterion(1, ok, detail)
    assert ok, detail


def test_criterion_2_allocated_power_formula_vs_oracle():
    t0 = time.perf_counter()
    worst, where, count = 0.0, "", 0
    for i, sc in enumerate(static_grid()):
        est = oracle_outage_allocated_power(sc, n_samples=ORACLE_SAMPLES,
                                            seed=200 + i)
        d = est.distance_in_se(outage_allocated_power(sc))
        count += 1
        if d > worst:
            worst, where = d, _point_label(sc)
    ok = worst <= 4.0
    detail = (f"{count} points x {ORACLE_SAMPLES:.0e} samples, worst "
              f"{worst:.2f}/4.0 SE at {where}, "
              f"{time.perf_counter() - t0:.0f}s")
    helpers.record_criterion(2, ok, detail, part="oracle")
    assert ok, detail


def test_criterion_2_quadrature_route_matches_bessel_route():
    worst, where = 0.0, ""
    for k in range(2, 9):
        for n in GRID_N:
            if n > k // 2:
                continue
            for r in GRID_R:
                sc = StaticScenario(k=k, n=n, rate_target=r)
                gap = abs(outage_allocated_power(sc)
                          - outage_allocated_power(sc, use_bessel=True))
                if gap > worst:
                    worst, where = gap, _point_label(sc)
    ok = worst <= 1e-8
    detail = f"k=2..8 grid, worst route gap {worst:.2e}/1e-8 at {where}"
    helpers.record_criterion(2, ok, detail, part="routes")
    assert ok, detail


def test_criterion_3_allocated_power_never_loses_to_fixed():
    violations = []
    margin = math.inf
    for sc in static_grid():
        fixed = outage_fixed_power(sc)
        alloc = outage_allocated_power(sc)
        if sc.k > 1:  # k=1 pins both outages to 1 exactly
            margin = min(margin, fixed - alloc)
        if not alloc <= fixed:
            violations.append(f"{_point_label(sc)}: {alloc} > {fixed}")
    ok = not violations
    detail = (f"27 points (equality at k=1), smallest margin elsewhere "
              f"{margin:.3e}"
              + ("" if ok else "; " + "; ".join(violations)))
    helpers.record_criterion(3, ok, detail)
    assert ok, detail


# --- criterion 4: saturation at generous harvest ---------------------------

def saturated_limit(n_relays: int, rate_target: float) -> float:
    """Outage floor with every relay permanently energized: the source hop
    fails only when no relay decodes, and the fixed-power forward hop is an
    independent exponential link at the same 10 W: per-relay success
    q = exp(-v/10), floor = 1 - (1-(1-q)^N) * q."""
    v = 2.0 ** (2.0 * rate_target) - 1.0
    q = math.exp(-v / 10.0)
    return 1.0 - (1.0 - (1.0 - q) ** n_relays) * q


def _saturation_run(n_relays: int, rate: float, seed: int):
    cfg = SystemConfig(policy=Policy.SRS_NCSI, n_relays=n_relays, m_decode=1,
                       eta=0.7, rate_target=rate, horizon_slots=1_020_000,
                       warmup_slots=20_000, rng_seed=seed)
    return run(cfg)


def _std_err(stats) -> float:
    p = stats.outage_prob
    return math.sqrt(p * (1.0 - p) / stats.attempts)


class TestCriterion4Saturation:
    def check_rate(self, rate, seed_base):
        t0 = time.perf_counter()
        s7 = _saturation_run(7, rate, seed_base)
        s10 = _saturation_run(10, rate, seed_base + 3)
        p7, p10 = s7.outage_prob, s10.outage_prob
        se7, se10 = _std_err(s7), _std_err(s10)
        gap_se = abs(p7 - p10) / math.sqrt(se7 ** 2 + se10 ** 2)
        d7 = abs(p7 - saturated_limit(7, rate)) / se7
        d10 = abs(p10 - saturated_limit(10, rate)) / se10
        ok = gap_se <= 2.0 and d7 <= 3.0 and d10 <= 3.0
        detail = (f"N7 {p7:.5f} N10 {p10:.5f} differ {gap_se:.1f}/2.0 SE; "
                  f"vs limit {saturated_limit(7, rate):.5f}/"
                  f"{saturated_limit(10, rate):.5f} off {d7:.1f},{d10:.1f}"
                  f"/3.0 SE; {time.perf_counter() - t0:.0f}s")
        helpers.record_criterion(4, ok, detail, part=f"R={rate}")
        assert ok, detail

    def test_rate_half(self):
        self.check_rate(0.5, 400)

    def test_rate_one(self):
        self.check_rate(1.0, 410)

    def test_rate_two(self):
        # the forwarding relay sits out the next selection, so the selection
        # pool is one short whenever the previous message went out; at v=15
        # the per-relay decode rate is low enough for that deficit to show
        self.check_rate(2.0, 420)


# --- criterion 5: decode-set size optimum ----------------------------------

class TestCriterion5DecodeSetOptimum:
    def check_rate(self, rate, expected_m, seed_base):
        t0 = time.perf_counter()
        base = SystemConfig(policy=Policy.MRS_ACSI, n_relays=10, m_decode=1,
                            eta=0.1, rate_target=rate,
                            horizon_slots=1_010_000, warmup_slots=10_000,
                            rng_seed=seed_base)
        spec = SweepSpec(axis="M", values=tuple(range(1, 11)), base=base,
                         repetitions=3)
        rows, summary = run_sweep(spec)
        pooled = {row.m_decode: row for row in rows if row.seed == "pooled"}
        m_star = summary["m_star"]
        separated = summary["m_star_separated_from_adjacent"]
        ok = m_star == expected_m and separated
        near = " ".join(
            f"M{m}:{pooled[m].outage:.6f}"
            for m in sorted({expected_m - 1, expected_m, expected_m + 1,
                             m_star} & set(pooled)))
        detail = (f"m_star={m_star} (want {expected_m}), CI-separated="
                  f"{separated}, pooled {near}, ci95~"
                  f"{pooled[expected_m].ci95:.1e}, "
                  f"{time.perf_counter() - t0:.0f}s")
        helpers.record_criterion(5, ok, detail, part=f"R={rate}")
        assert ok, detail

    def test_rate_half(self):
        self.check_rate(0.5, 3, 550)

    def test_rate_two_and_half(self):
        self.check_rate(2.5, 2, 2550)


# --- criterion 6: scheme orderings -----------------------------------------

_ORDERED_PAIRS = (
    ("srs-ncsi", "srs-ncsi-best-energy"),
    ("srs-ncsi-best-energy", "srs-ncsi-best-decoding"),
    ("mrs-acsi", "srs-acsi-best-energy"),
    ("mrs-acsi", "srs-acsi-best-decoding"),
    ("mrs-acsi", "mrs-acsi-best-energy"),
)


def _relation(sa, sb) -> int:
    """-1 when sa's 95% CI sits fully left of sb's, +1 fully right, else 0."""
    if sa.outage_prob + sa.ci95_halfwidth < sb.outage_prob - sb.ci95_halfwidth:
        return -1
    if sa.outage_prob - sa.ci95_halfwidth > sb.outage_prob + sb.ci95_halfwidth:
        return 1
    return 0


class TestCriterion6SchemeOrderings:
    def check_rate(self, rate, seed):
        t0 = time.perf_counter()

        def point(policy, m):
            cfg = SystemConfig(policy=policy, n_relays=10, m_decode=m,
                               eta=0.1, rate_target=rate,
                               horizon_slots=1_010_000, warmup_slots=10_000,
                               rng_seed=seed)
            return run(cfg)

        res = {
            "srs-ncsi": point(Policy.SRS_NCSI, 1),
            "srs-ncsi-best-energy": point(Policy.SRS_NCSI_BEST_ENERGY, 1),
            "srs-ncsi-best-decoding": point(Policy.SRS_NCSI_BEST_DECODING, 1),
            "srs-acsi-best-energy": point(Policy.SRS_ACSI_BEST_ENERGY, 1),
            "srs-acsi-best-decoding": point(Policy.SRS_ACSI_BEST_DECODING, 1),
            # decode set size: 3 is optimal at low rates, but harvest
            # scarcity shrinks the optimum to 2 at the highest rate here
            # (measured M=2: 0.477 vs M=3: 0.503 at R=2); the best-energy
            # variant runs at the larger set that suits its metric
            "mrs-acsi": point(Policy.MRS_ACSI, 2 if rate >= 2.0 else 3),
            "mrs-acsi-best-energy": point(Policy.MRS_ACSI_BEST_ENERGY, 5),
        }
        inverted, parts = [], []
        for la, lb in _ORDERED_PAIRS:
            rel = _relation(res[la], res[lb])
            sym = {-1: "<", 0: "~", 1: ">!"}[rel]
            parts.append(f"{la} {res[la].outage_prob:.5f} {sym} "
                         f"{lb} {res[lb].outage_prob:.5f}")
            if rel == 1:
                inverted.append(f"{la} vs {lb}")
        ok = not inverted
        detail = "; ".join(parts) + f"; {time.perf_counter() - t0:.0f}s"
        helpers.record_criterion(6, ok, detail, part=f"R={rate}")
        assert ok, f"confidently inverted: {inverted}; {detail}"

    def test_rate_half(self):
        self.check_rate(0.5, 600)

    def test_rate_one(self):
        self.check_rate(1.0, 601)

    def test_rate_three_halves(self):
        self.check_rate(1.5, 602)

    def test_rate_two(self):
        self.check_rate(2.0, 603)


# --- criterion 7: fast property gate ---------------------------------------

class TestCriterion7PropertyGate:
    def test_energy_ledger_over_randomized_slots(self):
        t0 = time.perf_counter()
        rng = random.Random(71)
        target, done, bad = 100_000, 0, []
        while done < target:
            n = rng.randint(2, 12)
            cfg = SystemConfig(
                policy=rng.choice(list(Policy)),
                n_relays=n,
                m_decode=rng.randint(1, min(n, 6)),
                eta=rng.choice([0.05, 0.1, 0.3, 0.7, 1.0]),
                rate_target=rng.choice([0.25, 0.5, 1.0, 2.0, 3.0]),
                path_loss=(PathLoss(1.5, 2.0, 2.7)
                           if rng.random() < 0.25 else None),
                horizon_slots=4000,
                rng_seed=rng.randrange(10 ** 6))
            state = new_state(cfg)
            source = FadingSource(cfg.rng_seed, cfg.lambda_rate)
            for t in range(4000):
                step(state, source.draw_slot(t, n), cfg)
                if (t + 1) % 512 == 0 or t == 3999:
                    total = sum(r.stored_energy_j for r in state.relays)
                    drift = abs(total - (state.energy_banked
                                         - state.energy_spent))
                    if drift > 1e-6:
                        bad.append(f"ledger drift {drift:.2e} "
                                   f"({cfg.policy.value} seed {cfg.rng_seed})")
                    if any(r.stored_energy_j < 0.0 for r in state.relays):
                        bad.append(f"negative bank ({cfg.policy.value} "
                                   f"seed {cfg.rng_seed})")
            done += 4000
        ok = not bad
        detail = (f"{done} slots over randomized configs, "
                  f"{len(bad)} violations, {time.perf_counter() - t0:.0f}s"
                  + ("" if ok else "; " + "; ".join(bad[:3])))
        helpers.record_criterion(7, ok, detail, part="ledger")
        assert ok, detail

    def test_policies_match_brute_force_oracles(self):
        t0 = time.perf_counter()
        mismatches = helpers.run_policy_equivalence(10_000, seed=909)
        ok = mismatches == 0
        detail = (f"10000 random instances x 9 selector rules, "
                  f"{mismatches} mismatches, {time.perf_counter() - t0:.0f}s")
        helpers.record_criterion(7, ok, detail, part="policy-oracles")
        assert ok, detail

    def test_special_functions_match_pinned_fixtures(self):
        worst, where = 0.0, ""
        fixtures = harness.load_fixtures()
        for name, entry in fixtures.items():
            got = harness._recompute_fixture(name, entry)
            rel = abs(got - entry["value"]) / max(abs(entry["value"]), 1e-300)
            if rel > worst:
                worst, where = rel, name
        ok = worst <= 1e-8
        detail = (f"{len(fixtures)} fixtures, worst rel dev {worst:.2e}"
                  f"/1e-8 at {where}")
        helpers.record_criterion(7, ok, detail, part="fixtures")
        assert ok, detail

    def test_seed_determinism_is_byte_exact(self):
        t0 = time.perf_counter()
        cfg = SystemConfig(policy=Policy.MRS_ACSI, n_relays=8, m_decode=3,
                           eta=0.4, rate_target=1.5, horizon_slots=30_000,
                           warmup_slots=1_000, rng_seed=321)
        row_a, stats_a = simulate_point(cfg)
        row_b, stats_b = simulate_point(cfg)
        ok = stats_a == stats_b and row_a.to_csv() == row_b.to_csv()
        detail = (f"repeat run equal: stats {stats_a == stats_b}, csv bytes "
                  f"{row_a.to_csv() == row_b.to_csv()}, "
                  f"{time.perf_counter() - t0:.0f}s")
        helpers.record_criterion(7, ok, detail, part="determinism")
        assert ok, detail
