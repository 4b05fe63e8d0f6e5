"""Named invariant suites with fixed seeds, run by ``soficlab verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable

import numpy as np

from . import counting as ct
from . import partitions as pt
from .bernoulli import (
    BaseMeasure,
    base_entropy,
    joint_frequency_check,
    ow_equivariance_check,
    ow_pushforward_check,
    product_measure,
    product_rate_lower_check,
    typical_set,
)
from .groups import GroupSpec, ball, inverse, multiply, sorted_elements
from .sofic import (
    Automorphism,
    SymMap,
    build_folner_approx,
    build_quotient_approx,
    build_random_free_approx,
    compose_with_automorphism,
    good_set,
)

DEFAULT_SEED = 20240601


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


# ---------------------------------------------------------------------------
# random instances


def random_weights(rng: np.random.Generator, q: int) -> tuple[float, ...]:
    raw = rng.integers(1, 9, size=q).astype(float)
    w = [x / raw.sum() for x in raw]
    w[-1] = 1.0 - math.fsum(w[:-1])
    return tuple(w)


def random_bernoulli_partition(rng, space: pt.BernoulliSpace, max_u: int = 3, radius: int = 1,
                               max_window: int = 2, min_u: int = 1) -> pt.ModelPartition:
    pool = sorted_elements(ball(space.owner, radius))
    k = int(rng.integers(1, max_window + 1))
    idx = rng.choice(len(pool), size=min(k, len(pool)), replace=False)
    window = tuple(sorted_elements(pool[i] for i in idx))
    u = int(rng.integers(min_u, max_u + 1))
    labels = rng.integers(0, u, size=space.q ** len(window))
    return pt.ModelPartition(space, window, labels, u)


@dataclass
class Instance:
    sigma: SymMap
    alpha: pt.ModelPartition
    F: list
    eps: float

    def describe(self) -> dict:
        return {
            "group": self.sigma.owner.to_json(),
            "m": self.sigma.m,
            "u": self.alpha.u,
            "F": [g.encode() for g in self.F],
            "epsilon": self.eps,
        }


def random_sigma(rng, max_m: int = 10) -> SymMap:
    choice = int(rng.integers(0, 5))
    if choice == 0:
        Z = GroupSpec.integers()
        return build_quotient_approx(Z, [int(rng.integers(3, max_m + 1))])[0]
    if choice == 1:
        Z = GroupSpec.integers()
        return build_folner_approx(Z, [int(rng.integers(3, max_m + 1))])[0]
    if choice == 2 and max_m >= 9:
        return build_quotient_approx(GroupSpec.lattice(2), [3])[0]
    if choice == 3:
        n = int(rng.integers(3, max_m + 1))
        return build_quotient_approx(GroupSpec.cyclic(n), [n])[0]
    F2 = GroupSpec.free(2)
    return build_random_free_approx(F2, int(rng.integers(3, max_m + 1)), int(rng.integers(0, 2**31)))


def random_model(rng, spec: GroupSpec, max_u: int = 3, min_u: int = 1) -> pt.ModelPartition:
    if spec.is_finite and rng.random() < 0.5:
        space = pt.FiniteGSet.regular(spec)
        u = int(rng.integers(min_u, max_u + 1))
        return pt.ModelPartition(space, (), rng.integers(0, u, size=space.n_points), u)
    space = pt.BernoulliSpace(spec, random_weights(rng, int(rng.integers(2, 4))))
    return random_bernoulli_partition(rng, space, max_u=max_u, min_u=min_u)


def random_F(rng, spec: GroupSpec, max_size: int = 2, radius: int = 1) -> list:
    pool = sorted_elements(ball(spec, radius))
    k = int(rng.integers(1, max_size + 1))
    idx = rng.choice(len(pool), size=min(k, len(pool)), replace=False)
    return sorted_elements(pool[i] for i in idx)


def random_instance(rng, max_m: int = 10, max_u: int = 3, max_F: int = 2) -> Instance:
    sigma = random_sigma(rng, max_m)
    alpha = random_model(rng, sigma.owner, max_u)
    F = random_F(rng, sigma.owner, max_F)
    return Instance(sigma, alpha, F, float(rng.uniform(0.0, 1.2)))


def members_labels(mask: np.ndarray, m: int, u: int) -> np.ndarray:
    """Label rows for the set bits of an enumeration mask."""
    idx = np.flatnonzero(mask).astype(np.int64)
    powers = np.int64(u) ** np.arange(m, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % u


def labels_index(labels: np.ndarray, u: int) -> np.ndarray:
    powers = np.int64(u) ** np.arange(labels.shape[1], dtype=np.int64)
    return (labels * powers[None, :]).sum(axis=1)


# ---------------------------------------------------------------------------
# suites


def suite_group_core(seed: int = DEFAULT_SEED) -> SuiteResult:
    rng = np.random.default_rng(seed)
    checks = []
    specs = [
        GroupSpec.integers(),
        GroupSpec.lattice(2),
        GroupSpec.free(2),
        GroupSpec.cyclic(6),
        GroupSpec.symmetric(3),
        GroupSpec.product(GroupSpec.integers(), GroupSpec.cyclic(3)),
    ]
    for spec in specs:
        pool = sorted_elements(ball(spec, 3))
        bad = 0
        for _ in range(200):
            a, b, c = (pool[int(i)] for i in rng.integers(0, len(pool), size=3))
            if multiply(multiply(a, b), c) != multiply(a, multiply(b, c)):
                bad += 1
            if multiply(a, inverse(a)) != spec.identity() or multiply(spec.identity(), a) != a:
                bad += 1
        checks.append(Check(f"axioms {spec.kind}", bad == 0, {"violations": bad}))
    sizes = {
        "Z ball(3) = 7": len(ball(GroupSpec.integers(), 3)) == 7,
        "Z^2 ball(2) = 13": len(ball(GroupSpec.lattice(2), 2)) == 13,
        "F2 ball(2) = 17": len(ball(GroupSpec.free(2), 2)) == 17,
        "S3 ball(3) = 6": len(ball(GroupSpec.symmetric(3), 3)) == 6,
    }
    for name, ok in sizes.items():
        checks.append(Check(name, ok))
    return SuiteResult("group-core", checks)


def suite_sofic_approx(seed: int = DEFAULT_SEED) -> SuiteResult:
    checks = []
    for spec, sizes in [(GroupSpec.integers(), [5, 8, 11]), (GroupSpec.lattice(2), [5, 7])]:
        for r in (1, 2):
            for s in build_quotient_approx(spec, [n for n in sizes if n > 2 * r]):
                rep = good_set(s, ball(spec, r))
                checks.append(Check(f"quotient {spec.kind} m={s.m} r={r} exact", rep.epsilon == 0.0,
                                    {"epsilon": rep.epsilon}))
    Z = GroupSpec.integers()
    eps = [good_set(s, ball(Z, 2)).epsilon for s in build_folner_approx(Z, [8, 16, 32])]
    checks.append(Check("folner Z eps decreasing on (8,16,32)",
                        all(b < a for a, b in zip(eps, eps[1:])), {"epsilons": eps}))
    F2 = GroupSpec.free(2)
    s = build_random_free_approx(F2, 200, seed)
    rep = good_set(s, ball(F2, 1))
    checks.append(Check("random free sigma is a permutation family", 0.0 <= rep.epsilon < 1.0,
                        {"epsilon": rep.epsilon}))
    return SuiteResult("sofic-approx", checks)


def _rohlin_instances(rng, n: int):
    for _ in range(n):
        spec = GroupSpec.integers() if rng.random() < 0.5 else GroupSpec.lattice(2)
        space = pt.BernoulliSpace(spec, random_weights(rng, int(rng.integers(2, 4))))
        parts = [random_bernoulli_partition(rng, space, max_u=3) for _ in range(4)]
        g = sorted_elements(ball(spec, 2))[int(rng.integers(0, len(ball(spec, 2))))]
        yield parts, g


def suite_rohlin_metric(seed: int = DEFAULT_SEED, n: int = 200) -> SuiteResult:
    rng = np.random.default_rng(seed)
    chain = sym = tri = iso = cont = 0
    worst = {"chain": 0.0, "triangle": 0.0, "continuity": 0.0}
    for (a, b, a2, b2), g in _rohlin_instances(rng, n):
        j = pt.join(a, b)
        err = abs(pt.entropy(j) - pt.entropy(a) - pt.conditional_entropy(b, a))
        worst["chain"] = max(worst["chain"], err)
        chain += err > 1e-12
        sym += pt.rohlin_distance(a, b) != pt.rohlin_distance(b, a)
        over = pt.rohlin_distance(a, b2) - pt.rohlin_distance(a, b) - pt.rohlin_distance(b, b2)
        worst["triangle"] = max(worst["triangle"], over)
        tri += over > 1e-9
        iso += pt.rohlin_distance(pt.translate(g, a), pt.translate(g, b)) != pt.rohlin_distance(a, b)
        over = (pt.rohlin_distance(pt.join(a, b), pt.join(a2, b2))
                - pt.rohlin_distance(a, a2) - pt.rohlin_distance(b, b2))
        worst["continuity"] = max(worst["continuity"], over)
        cont += over > 1e-9
    return SuiteResult("rohlin-metric", [
        Check("chain rule within 1e-12", chain == 0, {"violations": int(chain), "worst": worst["chain"]}),
        Check("symmetry exact", sym == 0, {"violations": int(sym)}),
        Check("triangle within 1e-9", tri == 0, {"violations": int(tri), "worst": worst["triangle"]}),
        Check("translate isometry exact", iso == 0, {"violations": int(iso)}),
        Check("join continuity within 1e-9", cont == 0, {"violations": int(cont), "worst": worst["continuity"]}),
    ])


def nesting_violations(inst: Instance, rng) -> tuple[int, int]:
    """(eps-nesting violations, F-nesting violations) on one instance."""
    sigma, alpha, F, eps = inst.sigma, inst.alpha, inst.F, inst.eps
    eps2 = float(rng.uniform(0.0, eps)) if eps > 0 else 0.0
    big = ct.ap_mask(sigma, alpha, F, eps)
    small = ct.ap_mask(sigma, alpha, F, eps2)
    v_eps = int(np.count_nonzero(small & ~big))
    F_small = [F[int(rng.integers(0, len(F)))]]
    wide = ct.ap_mask(sigma, alpha, F_small, eps)
    v_F = int(np.count_nonzero(big & ~wide))
    return v_eps, v_F


def suite_ap_nesting(seed: int = DEFAULT_SEED, n: int = 100) -> SuiteResult:
    rng = np.random.default_rng(seed)
    ve = vf = 0
    for _ in range(n):
        a, b = nesting_violations(random_instance(rng), rng)
        ve += a
        vf += b
    return SuiteResult("ap-nesting", [
        Check("epsilon nesting", ve == 0, {"violations": ve, "instances": n}),
        Check("F nesting", vf == 0, {"violations": vf, "instances": n}),
    ])


def fiber_bound(alpha: pt.ModelPartition, grouping: np.ndarray, m: int, eps: float) -> tuple[int, float]:
    """(number of admissible atom-size vectors, log of the largest fiber multinomial).

    A member of AP(alpha) has atom sizes n with sum |n_i/m - mu_i| <= eps; its
    image under the coarsening fixes the merged sizes, and the fiber over that
    image has at most prod_j multinomial(s_j; n_i, i -> j) elements per n.
    """
    mu = pt.atom_measures(alpha)
    u = alpha.u
    count, best = 0, -math.inf
    for n in _compositions(m, u):
        if math.fsum(abs(n[i] / m - mu[i]) for i in range(u)) > eps + ct.DF_TOL:
            continue
        count += 1
        logmult = 0.0
        for j in range(int(grouping.max()) + 1):
            parts = [n[i] for i in range(u) if grouping[i] == j]
            logmult += math.lgamma(sum(parts) + 1) - sum(math.lgamma(p + 1) for p in parts)
        best = max(best, logmult)
    return count, best


def _compositions(m: int, k: int):
    if k == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _compositions(m - first, k - 1):
            yield (first,) + rest


def coarsening_check(inst: Instance, rng) -> dict:
    sigma, alpha, F, eps = inst.sigma, inst.alpha, inst.F, inst.eps
    u, m = alpha.u, sigma.m
    v = int(rng.integers(1, u + 1))
    grouping = np.concatenate([np.arange(v), rng.integers(0, v, size=u - v)]).astype(np.int64)
    rng.shuffle(grouping)
    beta = pt.coarsen(alpha, grouping)
    mask_a = ct.ap_mask(sigma, alpha, F, eps)
    mask_b = ct.ap_mask(sigma, beta, F, eps)
    images = grouping[members_labels(mask_a, m, u)]
    hit = mask_b[labels_index(images, v)] if images.size else np.zeros(0, dtype=bool)
    violations = int(np.count_nonzero(~hit))
    count_a, count_b = int(mask_a.sum()), int(mask_b.sum())
    # counting inequality with delta(eps) instantiated from the worst admissible fiber
    n_vec, log_fiber = fiber_bound(alpha, grouping, m, eps)
    H_gap = pt.entropy(alpha) - pt.entropy(beta)
    delta = (log_fiber / m - H_gap) if n_vec else 0.0
    poly = max((3 * m * eps) ** u, float(n_vec))
    rhs_log = (math.log(poly) if poly > 0 else -math.inf) + (H_gap + delta) * m + (
        math.log(count_b) if count_b else -math.inf)
    lhs_log = math.log(count_a) if count_a else -math.inf
    return {
        "containment_violations": violations,
        "count_alpha": count_a,
        "count_beta": count_b,
        "delta": delta,
        "polynomial": poly,
        "bound_holds": lhs_log <= rhs_log + 1e-9 or count_a == 0,
    }


def suite_coarsening(seed: int = DEFAULT_SEED, n: int = 100) -> SuiteResult:
    rng = np.random.default_rng(seed)
    viol = bad_bound = bound_checked = 0
    for _ in range(n):
        inst = random_instance(rng, max_m=10)
        r = coarsening_check(inst, rng)
        viol += r["containment_violations"]
        if inst.sigma.m <= 12:
            bound_checked += 1
            bad_bound += not r["bound_holds"]
    return SuiteResult("coarsening", [
        Check("coarsening containment", viol == 0, {"violations": viol, "instances": n}),
        Check("Stirling counting bound (m <= 12)", bad_bound == 0,
              {"violations": bad_bound, "checked": bound_checked}),
    ])


def splitting_instance(rng, max_m: int = 8) -> tuple[SymMap, pt.ModelPartition, list, object, float]:
    """sigma, a 2-atom beta, F containing e and t, t, eps."""
    while True:
        sigma = random_sigma(rng, max_m)
        spec = sigma.owner
        beta = random_model(rng, spec, max_u=2, min_u=2)
        pool = [g for g in sorted_elements(ball(spec, 1)) if g != spec.identity()]
        t = pool[int(rng.integers(0, len(pool)))] if pool else spec.identity()
        F = sorted_elements({spec.identity(), t})
        return sigma, beta, F, t, float(rng.uniform(0.05, 1.0))


def splitting_check(sigma, beta, F, t, eps) -> dict:
    """Psi on every member of AP(beta: F u Ft, eps): injectivity, membership and the count comparison."""
    m, v = sigma.m, beta.u
    spec = sigma.owner
    Ft = sorted_elements(set(F) | {multiply(f, t) for f in F})
    delta = good_set(sigma, F).epsilon
    alpha = pt.join(beta, pt.translate(t, beta), drop_null=False)  # atom x*v + y is B_x & t B_y
    u = alpha.u
    x_map = [i // v for i in range(u)]
    y_map = [i % v for i in range(u)]
    src_mask = ct.ap_mask(sigma, beta, Ft, eps)
    src = members_labels(src_mask, m, v)
    images = np.array(
        [ct.split_finite(sigma, ct.FinPartition(m, v, row), t, x_map, y_map).labels for row in src],
        dtype=np.int64,
    ).reshape(len(src), m)
    idx = labels_index(images, u) if len(src) else np.zeros(0, dtype=np.int64)
    collisions = len(src) - len(np.unique(idx))
    target_eps = eps + 5 * len(F) * delta
    d = ct.dF_many(sigma, alpha, images, F) if len(src) else np.zeros(0)
    outside = int(np.count_nonzero(d > target_eps + ct.DF_TOL))
    target_count = None
    if u**m <= ct.DEFAULT_ENUM_BUDGET // 8:
        target_count = ct.ap_enumerate(sigma, alpha, F, target_eps).count
    return {
        "group": spec.kind,
        "m": m,
        "delta": delta,
        "source_count": len(src),
        "target_count": target_count,
        "collisions": collisions,
        "outside_target": outside,
        "count_ok": target_count is None or len(src) <= target_count,
    }


def suite_splitting(seed: int = DEFAULT_SEED, n: int = 50) -> SuiteResult:
    rng = np.random.default_rng(seed)
    coll = outside = bad = counted = 0
    for _ in range(n):
        r = splitting_check(*splitting_instance(rng))
        coll += r["collisions"]
        outside += r["outside_target"]
        bad += not r["count_ok"]
        counted += r["target_count"] is not None
    return SuiteResult("splitting", [
        Check("Psi injective", coll == 0, {"collisions": coll, "instances": n}),
        Check("Psi lands in the enlarged AP", outside == 0, {"violations": outside}),
        Check("cardinality comparison", bad == 0 and counted > 0, {"violations": bad, "enumerated": counted}),
    ])


def automorphism_check(m: int, F, eps: float, alpha: pt.ModelPartition, descriptor: dict) -> dict:
    sigma = build_quotient_approx(alpha.space.owner, [m])[0]
    a = Automorphism(alpha.space.owner, descriptor)
    twisted = pt.TwistedSpace(alpha.space, a, descriptor["type"])
    alpha_a = pt.ModelPartition(twisted, alpha.support, alpha.labels, alpha.u)
    sig_a = compose_with_automorphism(sigma, a)
    F_a = [a.preimage(f) for f in F]
    lhs = ct.ap_mask(sigma, alpha, F, eps)
    rhs = ct.ap_mask(sig_a, alpha_a, F_a, eps)
    return {"count": int(lhs.sum()), "mismatches": int(np.count_nonzero(lhs != rhs))}


def suite_automorphism(seed: int = DEFAULT_SEED, n: int = 20) -> SuiteResult:
    rng = np.random.default_rng(seed)
    Z = GroupSpec.integers()
    mism = 0
    for _ in range(n):
        space = pt.BernoulliSpace(Z, random_weights(rng, 2))
        alpha = random_bernoulli_partition(rng, space, max_u=2)
        F = random_F(rng, Z, 2)
        r = automorphism_check(int(rng.integers(3, 11)), F, float(rng.uniform(0, 1)), alpha,
                               {"type": "negation"})
        mism += r["mismatches"]
    return SuiteResult("automorphism", [Check("AP invariant under recomposition with negation", mism == 0,
                                              {"mismatches": mism, "instances": n})])


def estimator_instances(rng, n: int):
    """Instances with positive atom measures and a nonempty AP."""
    out = []
    while len(out) < n:
        inst = random_instance(rng, max_m=8, max_u=2)
        if inst.alpha.u < 2 or np.any(pt.atom_measures(inst.alpha) <= 0):
            continue
        inst.eps = float(rng.uniform(0.3, 1.0))
        exact = ct.ap_enumerate(inst.sigma, inst.alpha, inst.F, inst.eps)
        if exact.count == 0:
            continue
        out.append((inst, exact))
    return out


def suite_estimator(seed: int = DEFAULT_SEED, n: int = 20, n_samples: int = 20000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    within = 0
    rows = []
    for k, (inst, exact) in enumerate(estimator_instances(rng, n)):
        est = ct.ap_importance_estimate(inst.sigma, inst.alpha, inst.F, inst.eps, n_samples, seed + k)
        ok = abs(est.log_count - exact.log_count) <= 3 * est.stderr
        within += ok
        rows.append([exact.log_count, est.log_count, est.stderr])
    Z = GroupSpec.integers()
    sigma = build_quotient_approx(Z, [4])[0]
    alpha = pt.canonical_bernoulli_partition(pt.BernoulliSpace(Z, (0.5, 0.5)))
    allin = ct.ap_importance_estimate(sigma, alpha, [Z.identity()], 2.0, 100, seed)
    return SuiteResult("estimator", [
        Check("log-count within 3 stderr in >= 19/20", within >= math.ceil(0.95 * n),
              {"within": within, "instances": n}),
        Check("all-accept returns u^m", allin.count == 16.0 and allin.stderr == 0.0, {"count": allin.count}),
    ])


def suite_ow_factor(seed: int = DEFAULT_SEED) -> SuiteResult:
    F2 = GroupSpec.free(2)
    checks = []
    for r in (0, 1):
        rep = ow_pushforward_check(F2, r)
        checks.append(Check(f"pushforward TV = 0 at radius {r}", rep.passed, {"tv": rep.details["tv_exact"]}))
    neg = ow_pushforward_check(F2, 1, (0.25, 0.75))
    checks.append(Check("biased base gives TV > 0", neg.statistic > 0, {"tv": neg.statistic}))
    eq = ow_equivariance_check(F2, 1)
    checks.append(Check("equivariance at radius 1", eq.passed, {"comparisons": eq.details["comparisons"]}))
    return SuiteResult("ow-factor", checks)


def suite_concentration(seed: int = DEFAULT_SEED) -> SuiteResult:
    Z = GroupSpec.integers()
    sigma = build_quotient_approx(Z, [64])[0]
    abar = ct.FinPartition(64, 2, np.arange(64) // 32)
    rep = joint_frequency_check(sigma, abar, BaseMeasure.uniform(2), [Z.identity()], 0.2, 10_000, seed)
    return SuiteResult("concentration", [
        Check("Chebyshev bound", rep.details["union_ok"] and rep.details["pairs_ok"],
              {"statistic": rep.statistic, "bound": rep.bound}),
        Check("Var(Z) <= m |F|^2", rep.details["variance_ok"],
              {"max_var": rep.details["max_var_Z"], "bound": rep.details["var_Z_bound"]}),
    ])


def binomial_oracle(m: int, eps: float) -> int:
    """|AP| for the uniform 2-atom canonical partition with F = {e}: labelings with 2|k/m - 1/2| <= eps."""
    return sum(math.comb(m, k) for k in range(m + 1) if 2 * abs(k / m - 0.5) <= eps + 1e-12)


def suite_bernoulli_rate(seed: int = DEFAULT_SEED) -> SuiteResult:
    Z = GroupSpec.integers()
    sigmas = build_quotient_approx(Z, [8, 12, 16])
    alpha = pt.canonical_bernoulli_partition(pt.BernoulliSpace(Z, (0.5, 0.5)))
    curve = ct.rate_curve(sigmas, alpha, [Z.identity()], 0.1, mode="exact")
    checks = []
    for e, s in zip(curve.entries, sigmas):
        want = binomial_oracle(s.m, 0.1)
        checks.append(Check(f"count at m={s.m} matches binomial sum", round(math.exp(e.log_count)) == want,
                            {"count": round(math.exp(e.log_count)), "oracle": want}))
    last = curve.entries[-1].rate
    checks.append(Check("m=16 rate within 0.2 of log 2", abs(last - math.log(2)) <= 0.2, {"rate": last}))
    k = BaseMeasure((0.25, 0.75))
    lam = BaseMeasure.uniform(3)
    checks.append(Check("base entropy additive", abs(base_entropy(product_measure(k, lam))
                                                     - base_entropy(k) - base_entropy(lam)) <= 1e-12))
    masses = [typical_set(k, m, 0.1).mass for m in (16, 32, 64, 128)]
    checks.append(Check("typical-set mass grows with m", all(b >= a for a, b in zip(masses, masses[1:])),
                        {"masses": masses}))
    sigma64 = build_quotient_approx(Z, [64])[0]
    rep = product_rate_lower_check(sigma64, alpha, BaseMeasure.uniform(2), [Z.identity()], 0.2, 2000, seed)
    checks.append(Check("product lower bound at m=64", rep.passed, {"statistic": rep.statistic}))
    return SuiteResult("bernoulli-rate", checks)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "group-core": suite_group_core,
    "sofic-approx": suite_sofic_approx,
    "rohlin-metric": suite_rohlin_metric,
    "ap-nesting": suite_ap_nesting,
    "coarsening": suite_coarsening,
    "splitting": suite_splitting,
    "automorphism": suite_automorphism,
    "estimator": suite_estimator,
    "ow-factor": suite_ow_factor,
    "concentration": suite_concentration,
    "bernoulli-rate": suite_bernoulli_rate,
}


def run_suites(names, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](seed) for n in names]
