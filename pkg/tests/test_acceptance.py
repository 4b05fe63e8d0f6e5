"""Acceptance criteria, one test per criterion.

Each test records a one-line verdict in RESULTS; conftest prints the lines
at the end of the session.
"""
import filecmp
import itertools
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from soficlab import counting as ct
from soficlab import partitions as pt
from soficlab.bernoulli import (
    BaseMeasure,
    WindowConfig,
    joint_frequency_check,
    ow_equivariance_check,
    ow_factor,
    ow_pushforward_check,
)
from soficlab.groups import GroupSpec, ball, multiply, sorted_elements
from soficlab.sofic import build_folner_approx, build_quotient_approx, good_set
from soficlab.verify import (
    members_labels,
    random_bernoulli_partition,
    random_instance,
    random_weights,
    splitting_instance,
)

SEED = 20240601
RESULTS: dict[int, str] = {}
Z = GroupSpec.integers()
E = Z.identity()


def record(n: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title}: {detail}"
    assert ok, RESULTS[n]


def uniform_canonical():
    return pt.canonical_bernoulli_partition(pt.BernoulliSpace(Z, (0.5, 0.5)))


def test_1_bernoulli_rate():
    t0 = time.perf_counter()
    sigmas = build_quotient_approx(Z, [8, 12, 16])
    alpha = uniform_canonical()
    counts = [ct.ap_enumerate(s, alpha, [E], 0.1).count for s in sigmas]
    want = [oracles.binomial_ap_count(s.m, 0.1) for s in sigmas]
    rate16 = math.log(counts[-1]) / 16
    elapsed = time.perf_counter() - t0
    ok = counts == want and abs(rate16 - math.log(2)) <= 0.2 and elapsed <= 60
    record(1, "Bernoulli rate", ok,
           f"counts {counts} vs oracle {want}, m=16 rate {rate16:.4f} (log 2 = {math.log(2):.4f}), {elapsed:.2f}s")


def test_2_nesting():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    v_eps = v_F = 0
    for _ in range(100):
        inst = random_instance(rng, max_m=10, max_u=3, max_F=2)
        eps2 = float(rng.uniform(0.0, inst.eps))
        big = ct.ap_mask(inst.sigma, inst.alpha, inst.F, inst.eps)
        small = ct.ap_mask(inst.sigma, inst.alpha, inst.F, eps2)
        v_eps += int(np.count_nonzero(small & ~big))
        F1 = [inst.F[int(rng.integers(0, len(inst.F)))]]
        wide = ct.ap_mask(inst.sigma, inst.alpha, F1, inst.eps)
        v_F += int(np.count_nonzero(big & ~wide))
    elapsed = time.perf_counter() - t0
    ok = v_eps == 0 and v_F == 0 and elapsed <= 120
    record(2, "AP nesting", ok, f"100 instances, eps violations {v_eps}, F violations {v_F}, {elapsed:.2f}s")


def _compositions(m, k):
    for cut in itertools.combinations(range(m + k - 1), k - 1):
        bounds = (-1,) + cut + (m + k - 1,)
        yield tuple(bounds[i + 1] - bounds[i] - 1 for i in range(k))


def _stirling_rhs(alpha, beta, grouping, m, eps, count_b):
    """log of poly * exp((H(alpha) - H(beta) + delta) m) * |AP(beta)|."""
    mu = pt.atom_measures(alpha)
    u = alpha.u
    admissible, worst = 0, -math.inf
    for n in _compositions(m, u):
        if sum(abs(n[i] / m - mu[i]) for i in range(u)) > eps + ct.DF_TOL:
            continue
        admissible += 1
        fiber = 1
        for j in set(grouping.tolist()):
            parts = [n[i] for i in range(u) if grouping[i] == j]
            fiber *= math.factorial(sum(parts)) // math.prod(math.factorial(p) for p in parts)
        worst = max(worst, math.log(fiber))
    if admissible == 0 or count_b == 0:
        return -math.inf
    gap = pt.entropy(alpha) - pt.entropy(beta)
    delta = worst / m - gap
    poly = max((3 * m * eps) ** u, admissible)
    return math.log(poly) + (gap + delta) * m + math.log(count_b)


def test_3_coarsening():
    rng = np.random.default_rng(SEED + 3)
    violations = bound_fail = checked = members = 0
    for _ in range(100):
        inst = random_instance(rng, max_m=10)
        sigma, alpha, F, eps = inst.sigma, inst.alpha, inst.F, inst.eps
        u, m = alpha.u, sigma.m
        v = int(rng.integers(1, u + 1))
        grouping = np.concatenate([np.arange(v), rng.integers(0, v, size=u - v)]).astype(np.int64)
        rng.shuffle(grouping)
        beta = pt.coarsen(alpha, grouping)
        src = members_labels(ct.ap_mask(sigma, alpha, F, eps), m, u)
        members += len(src)
        if len(src):
            images = grouping[src]
            d = ct.dF_many(sigma, beta, images, F, u=beta.u)
            violations += int(np.count_nonzero(d > eps + ct.DF_TOL))
        if m <= 12:
            checked += 1
            count_b = ct.ap_enumerate(sigma, beta, F, eps).count
            lhs = math.log(len(src)) if len(src) else -math.inf
            if len(src) and lhs > _stirling_rhs(alpha, beta, grouping, m, eps, count_b) + 1e-9:
                bound_fail += 1
    ok = violations == 0 and bound_fail == 0 and checked > 0
    record(3, "coarsening map", ok,
           f"{members} members mapped, {violations} containment violations; "
           f"counting bound failed on {bound_fail}/{checked}")


def test_4_splitting():
    rng = np.random.default_rng(SEED + 4)
    collisions = bad_count = enumerated = 0
    for _ in range(50):
        sigma, beta, F, t, eps = splitting_instance(rng)
        m, v = sigma.m, beta.u
        Ft = sorted_elements(set(F) | {multiply(f, t) for f in F})
        eps_sigma = good_set(sigma, F).epsilon
        src = members_labels(ct.ap_mask(sigma, beta, Ft, eps), m, v)
        x_map, y_map = [i // v for i in range(v * v)], [i % v for i in range(v * v)]
        images = {tuple(ct.split_finite(sigma, ct.FinPartition(m, v, row), t, x_map, y_map).labels)
                  for row in src}
        collisions += len(src) - len(images)
        joined = pt.join(beta, pt.translate(t, beta), drop_null=False)
        if joined.u ** m <= ct.DEFAULT_ENUM_BUDGET // 8:
            enumerated += 1
            target = ct.ap_enumerate(sigma, joined, F, eps + 5 * len(F) * eps_sigma).count
            bad_count += len(src) > target
    ok = collisions == 0 and bad_count == 0 and enumerated > 0
    record(4, "splitting map", ok,
           f"50 instances, {collisions} collisions; cardinality comparison failed on "
           f"{bad_count}/{enumerated} enumerated")


def _partition_triples(rng, n):
    for _ in range(n):
        spec = GroupSpec.integers() if rng.random() < 0.5 else GroupSpec.lattice(2)
        space = pt.BernoulliSpace(spec, random_weights(rng, int(rng.integers(2, 4))))
        parts = [random_bernoulli_partition(rng, space, max_u=3) for _ in range(4)]
        pool = sorted_elements(ball(spec, 2))
        yield parts, pool[int(rng.integers(0, len(pool)))]


def test_5_partition_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 5)
    worst = dict(chain=0.0, tri=0.0, cont=0.0)
    sym_bad = iso_bad = 0
    for (a, b, c, d), g in _partition_triples(rng, 200):
        worst["chain"] = max(worst["chain"], abs(pt.entropy(pt.join(a, b)) - pt.entropy(a)
                                                 - pt.conditional_entropy(b, a)))
        sym_bad += pt.rohlin_distance(a, b) != pt.rohlin_distance(b, a)
        worst["tri"] = max(worst["tri"], pt.rohlin_distance(a, c)
                           - pt.rohlin_distance(a, b) - pt.rohlin_distance(b, c))
        iso_bad += pt.rohlin_distance(pt.translate(g, a), pt.translate(g, b)) != pt.rohlin_distance(a, b)
        worst["cont"] = max(worst["cont"], pt.rohlin_distance(pt.join(a, b), pt.join(c, d))
                            - pt.rohlin_distance(a, c) - pt.rohlin_distance(b, d))
    elapsed = time.perf_counter() - t0
    ok = (worst["chain"] <= 1e-12 and sym_bad == 0 and worst["tri"] <= 1e-9 and iso_bad == 0
          and worst["cont"] <= 1e-9 and elapsed <= 60)
    record(5, "partition algebra", ok,
           f"200 instances, chain-rule err {worst['chain']:.1e}, symmetry misses {sym_bad}, "
           f"triangle excess {worst['tri']:.1e}, isometry misses {iso_bad}, "
           f"continuity excess {worst['cont']:.1e}, {elapsed:.2f}s")


def test_6_ow_factor():
    t0 = time.perf_counter()
    F2 = GroupSpec.free(2)
    reports = [ow_pushforward_check(F2, r) for r in (0, 1)]
    # second route at radius 1: each of the 4^5 output cells must receive exactly 2^17 / 4^5 configurations
    window = sorted_elements(ball(F2, 2))
    points = sorted_elements(ball(F2, 1))
    cells: dict = {}
    for bits in range(2 ** len(window)):
        x = WindowConfig(F2, {g: (bits >> j) & 1 for j, g in enumerate(window)})
        key = tuple(ow_factor(x, points).assignment[p] for p in points)
        cells[key] = cells.get(key, 0) + 1
    uniform = len(cells) == 4 ** len(points) and set(cells.values()) == {2 ** len(window) // 4 ** len(points)}
    equi = ow_equivariance_check(F2, 1)
    control = ow_pushforward_check(F2, 1, (0.25, 0.75))
    elapsed = time.perf_counter() - t0
    ok = all(r.details["tv_exact"] == "0" for r in reports) and uniform and equi.passed \
        and control.statistic > 0 and elapsed <= 120
    record(6, "OW factor map", ok,
           f"TV radius 0/1 = {[r.details['tv_exact'] for r in reports]}, direct cell count uniform {uniform}, "
           f"equivariance {equi.details['comparisons']} comparisons with {int(equi.statistic)} misses, "
           f"biased TV {control.statistic:.4f}, {elapsed:.2f}s")


def test_7_estimator():
    rng = np.random.default_rng(SEED + 7)
    within = n = 0
    while n < 20:
        inst = random_instance(rng, max_m=8, max_u=2)
        if inst.alpha.u < 2 or np.any(pt.atom_measures(inst.alpha) <= 0):
            continue
        eps = float(rng.uniform(0.3, 1.0))
        exact = ct.ap_enumerate(inst.sigma, inst.alpha, inst.F, eps)
        if exact.count == 0:
            continue
        est = ct.ap_importance_estimate(inst.sigma, inst.alpha, inst.F, eps, 20000, SEED + n)
        within += abs(est.log_count - exact.log_count) <= 3 * est.stderr
        n += 1
    sigma = build_quotient_approx(Z, [4])[0]
    allin = ct.ap_importance_estimate(sigma, uniform_canonical(), [E], 2.0, 1000, SEED)
    ok = within >= 19 and allin.count == 2**4 and allin.stderr == 0.0
    record(7, "estimator consistency", ok, f"{within}/20 within 3 stderr, all-accept count {allin.count:g}")


def test_8_concentration():
    t0 = time.perf_counter()
    sigma = build_quotient_approx(Z, [64])[0]
    abar = ct.FinPartition(64, 2, np.arange(64) // 32)
    rep = joint_frequency_check(sigma, abar, BaseMeasure.uniform(2), [E], 0.2, 10_000, SEED)
    elapsed = time.perf_counter() - t0
    ok = rep.passed and rep.details["max_var_Z"] <= rep.details["var_Z_bound"] and elapsed <= 60
    record(8, "concentration", ok,
           f"P(some deviation > 0.2) = {rep.statistic:.4g} vs bound {rep.bound:.4g}, "
           f"max Var(Z) {rep.details['max_var_Z']:.3f} <= {rep.details['var_Z_bound']}, {elapsed:.2f}s")


def test_9_quality():
    zero_bad = []
    for spec, sizes in ((Z, range(1, 12)), (GroupSpec.lattice(2), range(1, 7))):
        for r in (1, 2, 3):
            F = ball(spec, r)
            for n in sizes:
                if n > 2 * r:
                    eps = good_set(build_quotient_approx(spec, [n])[0], F).epsilon
                    if eps != 0:
                        zero_bad.append((spec.kind, r, n, eps))
    folner = [good_set(s, ball(Z, 2)).epsilon for s in build_folner_approx(Z, [8, 16, 32])]
    decreasing = all(b < a for a, b in zip(folner, folner[1:]))
    ok = not zero_bad and decreasing
    record(9, "quality certification", ok,
           f"quotient eps nonzero cases {zero_bad}, Folner eps on ball(2) at 8/16/32 = {folner}")


def _cli(args, out):
    subprocess.run([sys.executable, "-m", "soficlab.cli", *args, "--out", str(out)],
                   check=True, capture_output=True)


def _same_dirs(a: Path, b: Path) -> bool:
    names = sorted(p.name for p in a.iterdir())
    if names != sorted(p.name for p in b.iterdir()):
        return False
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    return not mismatch and not errors


def test_10_reproducibility(tmp_path):
    runs = {}
    for cmd, cfg in (("verify", "fixture:verify_default"), ("h-report", "fixture:z_sampled_hreport")):
        for tag, workers in (("a", "1"), ("b", "1"), ("c", "4")):
            out = tmp_path / f"{cmd}-{tag}"
            _cli([cmd, cfg, "--workers", workers], out)
            runs[cmd, tag] = out
    same = {cmd: _same_dirs(runs[cmd, "a"], runs[cmd, "b"]) and _same_dirs(runs[cmd, "a"], runs[cmd, "c"])
            for cmd in ("verify", "h-report")}
    record(10, "reproducibility", all(same.values()),
           f"byte-identical across reruns and workers 1 vs 4: {same}")
