"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines
as they happen; they are also repeated in the terminal summary.
"""

import os
import random
import subprocess
import sys
import time

from fairrank.core import Group, Ranking, append, swap
from fairrank.errors import NormalizerZeroError
from fairrank.experiments import SweepConfig, run_length_sweep, run_proportion_sweep
from fairrank.generators import (
    PopulationSpec,
    make_dn_pair,
    make_first,
    make_last,
    make_population,
    make_population_counts,
    population_from_pattern,
    subset_instance,
)
from fairrank.metrics import (
    DEFAULT_CONFIG,
    PREFIX_METRICS,
    Cutoffs,
    LogBase,
    MetricConfig,
    NormalizerMode,
    evaluate_metric,
    position_bias,
    prefix_normalizer,
)
from fairrank.oracle import brute_force_normalizer, exact_expectation
from fairrank.properties import (
    DEFAULT_BUDGET,
    PropertyId,
    Status,
    check_property,
    golden_mismatches,
    satisfaction_table,
)

BASE2 = DEFAULT_CONFIG
assert BASE2.log_base_divergence is LogBase.BASE2


def test_golden_table(criterion):
    start = time.perf_counter()
    table = satisfaction_table(DEFAULT_BUDGET)
    elapsed = time.perf_counter() - start
    cells = [v for row in table.values() for v in row.values()]
    bad = golden_mismatches(table)
    unreproduced = [v for v in cells if v.status is Status.VIOLATED and not v.counterexample.reproduces()]
    ok = len(cells) == 143 and not bad and not unreproduced and elapsed < 300
    criterion(1, ok, f"{len(cells) - len(bad)}/143 cells match, {len(unreproduced)} counterexamples fail to "
                     f"replay, {elapsed:.1f}s (< 300s)")


def test_psp_extremes(criterion):
    rng = random.Random(2)
    failures = []
    for _ in range(50):
        n = rng.randint(2, 200)
        p = rng.uniform(0.05, 0.95)
        pop = make_population(PopulationSpec(n, p))
        ds = pop.candidate_set()
        first = evaluate_metric("PSP", pop, make_first(ds))
        last = evaluate_metric("PSP", pop, make_last(ds))
        if first != 1.0 or last != -1.0:
            failures.append((n, p, first, last))
    criterion(2, not failures, f"PSP(first)=1 and PSP(last)=-1 exactly on 50 populations; failures={failures}")


def test_er_expectation(criterion):
    pop = make_population_counts(1, 1)
    value = exact_expectation("ER", pop)
    derived = (position_bias(2) / position_bias(1) + position_bias(1) / position_bias(2)) / 2
    ok = abs(value - derived) < 1e-12 and abs(value - 1.11) <= 0.005 and value > 1
    criterion(3, ok, f"E[ER]={value:.6f}, closed form {derived:.6f}, reported 1.11 (tol 0.005)")


def test_zero_mean_oracles(criterion):
    worst = 0.0
    count = 0
    for n in range(2, 8):
        for n1 in range(1, n):
            pop = make_population_counts(n - n1, n1)
            for metric in ("ED", "PSP"):
                worst = max(worst, abs(exact_expectation(metric, pop)))
                count += 1
    criterion(4, worst <= 1e-12, f"max |E[m]| = {worst:.3g} over {count} (metric, population) pairs, n <= 7")


def test_awrf_regression_pair(criterion):
    # sensitivity: p_groups = (0.75, 0.25); r' = <g0, g1>, r'' appends a second g0
    pop = make_population_counts(3, 1)
    g0 = pop.members(Group.NON_PROTECTED)
    g1 = pop.members(Group.PROTECTED)
    r1 = Ranking.from_ids(pop, [g0[0].id, g1[0].id])
    r2 = append(r1, g0[1])
    v1 = evaluate_metric("AWRF", pop, r1, BASE2)
    v2 = evaluate_metric("AWRF", pop, r2, BASE2)
    sens_ok = round(v2, 3) == 0.998 and round(v1, 3) == 0.984

    # deepness: 14 + 11 candidates, ranking pattern 010101, swaps at i=3 and j=5
    pop = make_population_counts(14, 11)
    g0 = pop.members(Group.NON_PROTECTED)
    g1 = pop.members(Group.PROTECTED)
    assert pop.p_groups == (0.56, 0.44)
    r = Ranking.from_ids(pop, [g0[0].id, g1[0].id, g0[1].id, g1[1].id, g0[2].id, g1[2].id])
    base = evaluate_metric("AWRF", pop, r, BASE2)
    di = abs(base - evaluate_metric("AWRF", pop, swap(r, 3, 4), BASE2))
    dj = abs(base - evaluate_metric("AWRF", pop, swap(r, 5, 6), BASE2))
    deep_ok = (di < dj and abs(di - 1.51e-5) <= 0.05 * 1.51e-5 and abs(dj - 8.62e-5) <= 0.05 * 8.62e-5)
    criterion(5, sens_ok and deep_ok,
              f"AWRF(r'')={v2:.5f} (0.998), AWRF(r')={v1:.5f} (0.984); "
              f"|d_i|={di:.4g} (1.51e-5) < |d_j|={dj:.4g} (8.62e-5)")


def test_rescaling_law(criterion):
    rng = random.Random(6)
    worst = 0.0
    for _ in range(100):
        n = rng.randint(2, 30)
        n1 = rng.randint(1, n - 1)
        pattern = [1] * n1 + [0] * (n - n1)
        rng.shuffle(pattern)
        ys = [1.0 - rng.random() for _ in range(n)]  # (0, 1]
        pop, r = _random_instance(rng, pattern, ys)
        for a in (0.5, 2.0, 10.0):
            scaled = pop.with_relevance(lambda y: a * y)
            rs = Ranking.from_ids(scaled, r.ids)
            for m in ("DTR", "DID", "DIR"):
                before, after = evaluate_metric(m, pop, r), evaluate_metric(m, scaled, rs)
                worst = max(worst, _rel(after, before))
            worst = max(worst, _rel(evaluate_metric("DTD", scaled, rs) * a, evaluate_metric("DTD", pop, r)))
    criterion(6, worst <= 1e-9, f"max relative deviation {worst:.3g} over 100 instances x a in (0.5, 2, 10)")


def _random_instance(rng, pattern, ys):
    pop, r = population_from_pattern(pattern, ys)
    order = list(r.ids)
    rng.shuffle(order)
    return pop, Ranking.from_ids(pop, order)


def _rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def test_exposure_thresholds(criterion):
    parts = []
    ok = True
    for m in ("ED", "ER"):
        p11 = check_property(PropertyId.P11, m, DEFAULT_BUDGET)
        p12 = check_property(PropertyId.P12, m, DEFAULT_BUDGET)
        ok &= p11.status is Status.SATISFIED and p11.threshold == 1
        ok &= p12.status is Status.SATISFIED and p12.threshold is not None and p12.threshold <= 3
        # direct recomputation of m(first(D_N)) < m(last(D_N')) from the reported crossover to 64
        holds = True
        for p in DEFAULT_BUDGET.threshold_ps:
            pop = make_population(PopulationSpec(DEFAULT_BUDGET.threshold_population, p))
            for N in range(p12.threshold or 1, 65):
                d_n, d_n_prime = make_dn_pair(pop, N)
                holds &= evaluate_metric(m, pop, make_first(d_n)) < evaluate_metric(m, pop, make_last(d_n_prime))
        ok &= holds
        parts.append(f"{m}: P11 N'={p11.threshold}, P12 crossover N={p12.threshold}, holds to 64: {holds}")
    criterion(7, ok, "; ".join(parts))


def test_prefix_counterexamples(criterion):
    pop = make_population(PopulationSpec(1000, 0.8))
    failures = []
    for m in PREFIX_METRICS:
        for N in range(1, 11):
            cfg = DEFAULT_CONFIG.with_cutoffs(Cutoffs.of(N))
            d_n, d_n_prime = make_dn_pair(pop, N)
            last = make_last(d_n_prime)
            v_last = evaluate_metric(m, pop, last, cfg)
            v_first = evaluate_metric(m, pop, make_first(d_n), cfg)
            extra = next(c for c in pop.members(Group.NON_PROTECTED) if c.id not in d_n_prime)
            v_app = evaluate_metric(m, pop, append(last, extra), cfg)
            if v_last != 0.0:
                failures.append(f"{m} N={N} last={v_last!r}")
            if not v_first > 0.0:
                failures.append(f"{m} N={N} first={v_first!r}")
            if v_app != v_last:
                failures.append(f"{m} N={N} appended={v_app!r}")
    criterion(8, not failures, f"30 (metric, N) cases; failures: {failures or 'none'}")


def test_synthetic_sweeps(criterion):
    cfg = SweepConfig()
    rows = list(run_length_sweep(cfg))
    rnd = {(r.n, r.ranking_kind): r.value for r in rows if r.metric == "rND"}
    wins = sum(rnd[(n, "last")] > rnd[(n, "first")] for n in cfg.length_grid)
    share = wins / len(cfg.length_grid)

    ed = {(r.n, r.ranking_kind): abs(r.value) for r in rows if r.metric == "ED"}
    shrink = all(ed[(cfg.length_grid[i], k)] > ed[(cfg.length_grid[i + 1], k)]
                 for k in ("first", "last") for i in range(len(cfg.length_grid) - 1))

    prop = list(run_proportion_sweep(cfg))
    awrf = {(r.p, r.ranking_kind): r.value for r in prop if r.metric == "AWRF"}
    grid = cfg.proportion_grid
    diff = [awrf[(p, "first")] - awrf[(p, "last")] for p in grid]
    crossings = [p for p, d in zip(grid, diff) if d == 0.0]
    crossings += [(a + b) / 2 for a, b, da, db in zip(grid, grid[1:], diff, diff[1:]) if da * db < 0]
    step = grid[1] - grid[0]
    cross_ok = bool(crossings) and all(abs(c - 0.5) <= step + 1e-12 for c in crossings)
    criterion(9, share >= 0.95 and shrink and cross_ok,
              f"rND last > first at {wins}/{len(cfg.length_grid)} lengths; ED magnitudes strictly shrink: {shrink}; "
              f"AWRF extremes cross at p={crossings}")


def test_normalizer_oracle_equivalence(criterion):
    rng = random.Random(10)
    extreme = NormalizerMode.EXTREME_RANKING
    mismatches = []
    compared = 0
    for _ in range(30):
        n = rng.randint(2, 8)
        pattern = [rng.randint(0, 1) for _ in range(n)]
        extra = (rng.randint(0, 3), rng.randint(0, 3))
        if 0 not in pattern and extra[0] == 0:
            extra = (1, extra[1])
        if 1 not in pattern and extra[1] == 0:
            extra = (extra[0], 1)
        cutoffs = sorted(rng.sample(range(1, n + 1), rng.randint(1, n)))
        cfg = MetricConfig(cutoffs=Cutoffs.of(*cutoffs), normalizer_mode=extreme)
        pop, r = subset_instance(pattern, extra=extra)
        ds = r.candidate_set
        for m in PREFIX_METRICS:
            oracle = brute_force_normalizer(m, pop, ds, cfg)
            try:
                z = prefix_normalizer(m, pop, ds, cfg)
            except NormalizerZeroError:
                z = 0.0
            compared += 1
            if z != oracle:
                mismatches.append(f"{m} pattern={''.join(map(str, pattern))} extra={extra} I={cutoffs}: "
                                  f"{z!r} vs {oracle!r}")
    criterion(10, not mismatches,
              f"{compared - len(mismatches)}/{compared} extreme-ranking normalizers equal the brute-force "
              f"maximum; mismatches: {mismatches[:5]}{' ...' if len(mismatches) > 5 else ''}")


RUN = "query_id,candidate_id,group,relevance\nq1,a,1,0.9\nq1,b,0,0.4\nq1,c,0,0.7\nq2,x,0,0.3\nq2,y,1,0.8\n"


def _cli(args, hash_seed):
    env = dict(os.environ, PYTHONHASHSEED=str(hash_seed))
    out = subprocess.run([sys.executable, "-m", "fairrank", "--seed", "7", *args], env=env,
                         capture_output=True, check=True)
    return out.stdout


def test_determinism(criterion, tmp_path):
    run = tmp_path / "run.csv"
    run.write_text(RUN)
    jobs = {
        "length": ["experiments", "run", "length", "-o", "-"],
        "proportion": ["experiments", "run", "proportion", "-o", "-"],
        "closeness": ["experiments", "run", "closeness", "-o", "-"],
        "translation": ["experiments", "run", "translation", "--run", str(run), "-o", "-"],
        "rescaling": ["experiments", "run", "rescaling", "--run", str(run), "-o", "-"],
        "golden table": ["properties", "check", "--json", "-"],
    }
    differ = [name for name, args in jobs.items() if _cli(args, 1) != _cli(args, 2)]
    criterion(11, not differ, f"{len(jobs) - len(differ)}/{len(jobs)} outputs byte-identical across two "
                              f"processes with seed 7; differing: {differ or 'none'}")
