"""Bernoulli shift computations: base entropy, typical sets, concentration, the OW factor map."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Sequence

import numpy as np

from .counting import (
    SAMPLE_BLOCK,
    FinPartition,
    _block_rng,
    _canon_F,
    ap_enumerate,
    dF,
    dF_many,
)
from .groups import GroupElement, GroupSpec, ball, inverse, multiply, sorted_elements
from .partitions import (
    BernoulliSpace,
    BudgetError,
    ModelPartition,
    atom_measures,
    canonical_bernoulli_partition,
    product_partition,
)
from .sofic import SymMap, good_set

WEIGHT_TOL = 1e-12
OW_BUDGET = 2**22


class BernoulliError(ValueError):
    pass


@dataclass(frozen=True)
class BaseMeasure:
    """A probability vector on a finite alphabet; zero weights are dropped."""

    weights: tuple[float, ...]
    alphabet: tuple = ()

    def __post_init__(self):
        w = [float(x) for x in self.weights]
        alphabet = tuple(self.alphabet) or tuple(range(len(w)))
        if len(alphabet) != len(w):
            raise BernoulliError("alphabet and weights differ in length")
        if any(x < 0 for x in w):
            raise BernoulliError("weights must be nonnegative")
        kept = [(a, x) for a, x in zip(alphabet, w) if x > 0]
        if not kept or abs(math.fsum(x for _, x in kept) - 1.0) > WEIGHT_TOL:
            raise BernoulliError("weights must sum to 1")
        object.__setattr__(self, "alphabet", tuple(a for a, _ in kept))
        object.__setattr__(self, "weights", tuple(x for _, x in kept))

    @classmethod
    def uniform(cls, k: int) -> BaseMeasure:
        return cls(tuple([1.0 / k] * k))

    @property
    def size(self) -> int:
        return len(self.weights)

    def space(self, spec: GroupSpec) -> BernoulliSpace:
        return BernoulliSpace(spec, self.weights, self.alphabet)

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet), "weights": list(self.weights)}


def base_entropy(kappa: BaseMeasure) -> float:
    """Shannon entropy in nats."""
    return -math.fsum(p * math.log(p) for p in kappa.weights)


def product_measure(kappa: BaseMeasure, lam: BaseMeasure) -> BaseMeasure:
    weights = [a * b for a in kappa.weights for b in lam.weights]
    alphabet = [(x, y) for x in kappa.alphabet for y in lam.alphabet]
    # renormalise away the last-bit drift of the products
    total = math.fsum(weights)
    return BaseMeasure(tuple(w / total for w in weights), tuple(alphabet))


@dataclass
class Report:
    name: str
    parameters: dict
    statistic: float
    bound: float
    stderr: float
    verdict: str  # pass, fail or inconclusive
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "parameters": self.parameters,
            "statistic": self.statistic,
            "bound": self.bound,
            "stderr": self.stderr,
            "verdict": self.verdict,
            "details": self.details,
        }


# ---------------------------------------------------------------------------
# typical sets


@dataclass
class TypicalSet:
    m: int
    epsilon: float
    entropy: float
    types: list[tuple[int, ...]]  # symbol-count vectors whose configurations form Q
    size: int  # |Q|
    mass: float  # kappa^m(Q)
    lower_bound: float  # mass * exp(H m - eps m), never above |Q|
    upper_bound: float  # exp(H m + eps m), never below |Q|

    @property
    def bounds_hold(self) -> bool:
        return self.lower_bound <= self.size * (1 + 1e-12) and self.size <= self.upper_bound * (1 + 1e-12)


def _compositions(m: int, k: int):
    if k == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _compositions(m - first, k - 1):
            yield (first,) + rest


def typical_set(kappa: BaseMeasure, m: int, eps: float, max_types: int = 10**6) -> TypicalSet:
    """Configurations of K^m whose per-point log-probability is within eps of -H(kappa).

    The set is a union of type classes, so it is described by count vectors;
    its size and mass are summed exactly over those classes.
    """
    if m < 1:
        raise BernoulliError("m must be >= 1")
    k = kappa.size
    if math.comb(m + k - 1, k - 1) > max_types:
        raise BudgetError("too many type classes to enumerate")
    H = base_entropy(kappa)
    logs = [math.log(p) for p in kappa.weights]
    types, size, mass_terms = [], 0, []
    for counts in _compositions(m, k):
        logp = math.fsum(c * lp for c, lp in zip(counts, logs))
        if abs(-logp / m - H) <= eps + 1e-12:
            mult = math.factorial(m)
            for c in counts:
                mult //= math.factorial(c)
            types.append(counts)
            size += mult
            mass_terms.append(math.exp(math.log(mult) + logp))
    mass = min(1.0, math.fsum(mass_terms))
    return TypicalSet(
        m=m,
        epsilon=float(eps),
        entropy=H,
        types=types,
        size=size,
        mass=mass,
        lower_bound=mass * math.exp(H * m - eps * m),
        upper_bound=math.exp(H * m + eps * m),
    )


# ---------------------------------------------------------------------------
# the Ornstein-Weiss factor map over the free group on a, b


@dataclass
class WindowConfig:
    """An assignment of symbols to a finite set of group elements."""

    owner: GroupSpec
    assignment: dict

    @property
    def window(self) -> list[GroupElement]:
        return sorted_elements(self.assignment)

    def translate(self, h: GroupElement) -> WindowConfig:
        """(h x)(g) = x(h^-1 g), defined on h * window."""
        return WindowConfig(self.owner, {multiply(h, g): v for g, v in self.assignment.items()})


def _free_ab(spec: GroupSpec) -> tuple[GroupElement, GroupElement]:
    gens = spec.generator_elements()
    if spec.kind != "free" or len(gens) < 2:
        raise BernoulliError("the OW map needs a free group with at least two generators")
    return gens[0], gens[1]


def ow_domain(spec: GroupSpec, window: Iterable[GroupElement]) -> list[GroupElement]:
    """Coordinates g with g, ga, gb all inside the window."""
    a, b = _free_ab(spec)
    W = set(window)
    return sorted_elements(g for g in W if multiply(g, a) in W and multiply(g, b) in W)


def ow_factor(x: WindowConfig, points: Iterable[GroupElement] | None = None) -> WindowConfig:
    """phi(x)(g) = (x(g) + x(ga), x(g) + x(gb)) mod 2."""
    a, b = _free_ab(x.owner)
    X = x.assignment
    if points is None:
        points = ow_domain(x.owner, X)
    else:
        points = sorted_elements(set(points))
        missing = sorted_elements(
            {h for g in points for h in (g, multiply(g, a), multiply(g, b)) if h not in X}
        )
        if missing:
            raise BernoulliError(
                "window too small, missing coordinates: " + ", ".join(str(h.encode()) for h in missing)
            )
    out = {}
    for g in points:
        v = int(X[g]) % 2
        out[g] = ((v + int(X[multiply(g, a)])) % 2, (v + int(X[multiply(g, b)])) % 2)
    return WindowConfig(x.owner, out)


def _ow_codes(window: list[GroupElement], points: list[GroupElement], configs: np.ndarray, a, b) -> np.ndarray:
    """Vectorised OW map. Bit j of a config is x(window[j]); output is base-4 over points."""
    pos = {g: j for j, g in enumerate(window)}
    out = np.zeros(configs.shape, dtype=np.int64)
    for k, g in enumerate(points):
        xg = (configs >> pos[g]) & 1
        first = xg ^ ((configs >> pos[multiply(g, a)]) & 1)
        second = xg ^ ((configs >> pos[multiply(g, b)]) & 1)
        out |= (first * 2 + second) << (2 * k)
    return out


def ow_pushforward_check(spec: GroupSpec, radius: int, weights: Sequence[float] = (0.5, 0.5),
                         budget: int = OW_BUDGET) -> Report:
    """Exact total-variation distance between the image of kappa_2 on ball(radius+1) and uniform K_4 on ball(radius).

    All probabilities are exact rationals built from the binary values of the weights.
    """
    a, b = _free_ab(spec)
    window = sorted_elements(ball(spec, radius + 1))
    points = sorted_elements(ball(spec, radius))
    n = len(window)
    if 2**n > budget:
        raise BudgetError(f"2^{n} configurations exceed the budget {budget}")
    if len(weights) != 2 or abs(math.fsum(weights) - 1.0) > WEIGHT_TOL or min(weights) < 0:
        raise BernoulliError("weights must be a probability vector on two symbols")
    w0, w1 = Fraction(float(weights[0])), Fraction(float(weights[1]))
    configs = np.arange(2**n, dtype=np.int64)
    images = _ow_codes(window, points, configs, a, b)
    ones = np.zeros(2**n, dtype=np.int64)
    for j in range(n):
        ones += (configs >> j) & 1
    # configs with the same image and the same number of ones carry the same mass
    table = np.bincount(images * (n + 1) + ones, minlength=(4 ** len(points)) * (n + 1))
    table = table.reshape(4 ** len(points), n + 1)
    mass_by_ones = [w1**k * w0 ** (n - k) for k in range(n + 1)]
    target = Fraction(1, 4 ** len(points))
    tv = Fraction(0)
    for cell in range(table.shape[0]):
        row = table[cell]
        p = sum((int(c) * mass_by_ones[k] for k, c in enumerate(row) if c), Fraction(0))
        tv += abs(p - target)
    tv /= 2
    return Report(
        name="ow-pushforward",
        parameters={"radius": radius, "weights": [float(x) for x in weights], "configurations": 2**n},
        statistic=float(tv),
        bound=0.0,
        stderr=0.0,
        verdict="pass" if tv == 0 else "fail",
        details={"tv_exact": str(tv), "output_cells": 4 ** len(points)},
    )


def ow_equivariance_check(spec: GroupSpec, radius: int = 1, budget: int = OW_BUDGET) -> Report:
    """phi(h x)(g) = phi(x)(h^-1 g) for every h in ball(radius) and every config on ball(radius+1).

    phi(h x) is computed on the translated window with its own index layout,
    so the comparison is between two separately assembled evaluations.
    """
    a, b = _free_ab(spec)
    window = sorted_elements(ball(spec, radius + 1))
    n = len(window)
    if 2**n > budget:
        raise BudgetError(f"2^{n} configurations exceed the budget {budget}")
    configs = np.arange(2**n, dtype=np.int64)
    base_points = ow_domain(spec, window)
    base = _ow_codes(window, base_points, configs, a, b)
    base_pos = {g: k for k, g in enumerate(base_points)}
    violations, compared = 0, 0
    for h in sorted_elements(ball(spec, radius)):
        moved = [multiply(h, g) for g in window]
        order = sorted(range(n), key=lambda j: moved[j].sort_key())
        new_window = [moved[j] for j in order]
        # re-pack bits so that bit i of the new config is (h x)(new_window[i])
        shifted = np.zeros_like(configs)
        for i, j in enumerate(order):
            shifted |= ((configs >> j) & 1) << i
        pts = ow_domain(spec, new_window)
        img = _ow_codes(new_window, pts, shifted, a, b)
        hinv = inverse(h)
        for k, g in enumerate(pts):
            src = base_pos.get(multiply(hinv, g))
            if src is None:
                continue
            lhs = (img >> (2 * k)) & 3
            rhs = (base >> (2 * src)) & 3
            violations += int(np.count_nonzero(lhs != rhs))
            compared += configs.size
    return Report(
        name="ow-equivariance",
        parameters={"radius": radius, "configurations": 2**n},
        statistic=float(violations),
        bound=0.0,
        stderr=0.0,
        verdict="pass" if violations == 0 and compared > 0 else "fail",
        details={"comparisons": compared},
    )


# ---------------------------------------------------------------------------
# concentration of joint frequencies


def _sample_symbols(kappa: BaseMeasure, m: int, n: int, seed: int) -> np.ndarray:
    cdf = np.cumsum(kappa.weights)
    cdf[-1] = 1.0
    out = np.empty((n, m), dtype=np.int64)
    for blk, lo in enumerate(range(0, n, SAMPLE_BLOCK)):
        hi = min(n, lo + SAMPLE_BLOCK)
        r = _block_rng(seed, blk).random((hi - lo, m))
        out[lo:hi] = np.minimum(np.searchsorted(cdf, r, side="right"), kappa.size - 1)
    return out


def _pattern_code(labels: np.ndarray, inv: np.ndarray, base: int) -> np.ndarray:
    """Code at point w: sum_k labels[inv[k, w]] base^k, for 1-d or 2-d label arrays."""
    code = np.zeros(labels.shape, dtype=np.int64)
    scale = 1
    for row in inv:
        code += labels[..., row] * scale
        scale *= base
    return code


def joint_frequency_check(
    sigma: SymMap,
    abar: FinPartition,
    kappa: BaseMeasure,
    F: Iterable[GroupElement],
    t_threshold: float,
    n_samples: int,
    seed: int,
) -> Report:
    """Monte Carlo test of the Chebyshev step for random symbol labelings.

    For every pattern pair (phi, psi) the deviation is
    |zeta(A_phi & B_psi) - zeta(A_phi) * kappa(B_psi)|. The per-pair bound is
    |F|^2 / (m (t - 2 delta)^2); the event "some pair deviates" is bounded by
    the union over all (p q)^|F| pairs.
    """
    F = _canon_F(F)
    m, nf = sigma.m, len(F)
    report = good_set(sigma, F)
    delta = report.epsilon
    if t_threshold <= 2 * delta:
        raise BernoulliError(f"t = {t_threshold} must exceed 2 * delta = {2 * delta}")
    p, q = abar.u, kappa.size
    PA, PB = p**nf, q**nf
    inv = sigma.inverse_images(F)
    code_a = _pattern_code(abar.labels, inv, p)
    zeta_a = np.bincount(code_a, minlength=PA) / m
    logk = np.log(np.asarray(kappa.weights))
    psi_digits = np.array(list(cartesian(range(q), repeat=nf)), dtype=np.int64)[:, ::-1]
    kappa_b = np.exp(logk[psi_digits].sum(axis=1))  # kappa^G(B_psi), digit k belongs to F[k]
    in_good = np.zeros(m, dtype=bool)
    in_good[list(report.good_set)] = True

    per_pair = 1.0 * nf**2 / (m * (t_threshold - 2 * delta) ** 2)
    union = PA * PB * per_pair
    exceed_any = 0
    exceed_pair = np.zeros(PA * PB, dtype=np.int64)
    z_sum = np.zeros(PA * PB)
    z_sq = np.zeros(PA * PB)
    max_dev = 0.0
    all_labels = _sample_symbols(kappa, m, n_samples, seed)
    for lo in range(0, n_samples, SAMPLE_BLOCK):
        hi = min(n_samples, lo + SAMPLE_BLOCK)
        labels = all_labels[lo:hi]
        code_b = _pattern_code(labels, inv, q)
        joint = code_a[None, :] * PB + code_b
        rows = np.arange(hi - lo, dtype=np.int64)[:, None] * (PA * PB)
        hist = np.bincount((rows + joint).ravel(), minlength=(hi - lo) * PA * PB).reshape(hi - lo, PA * PB)
        good_hist = np.bincount(
            (rows + joint)[:, in_good].ravel(), minlength=(hi - lo) * PA * PB
        ).reshape(hi - lo, PA * PB)
        expected = np.outer(zeta_a, kappa_b).ravel()
        dev = np.abs(hist / m - expected[None, :])
        over = dev > t_threshold
        exceed_any += int(np.count_nonzero(over.any(axis=1)))
        exceed_pair += over.sum(axis=0)
        max_dev = max(max_dev, float(dev.max()))
        z_sum += good_hist.sum(axis=0)
        z_sq += (good_hist.astype(np.float64) ** 2).sum(axis=0)
    n = n_samples
    prob = exceed_any / n
    se = math.sqrt(max(prob * (1 - prob), 1.0 / n) / n)
    pair_prob = exceed_pair / n
    pair_se = np.sqrt(np.maximum(pair_prob * (1 - pair_prob), 1.0 / n) / n)
    var_z = (z_sq / n - (z_sum / n) ** 2) * n / max(n - 1, 1)
    var_bound = m * nf**2
    ok_union = prob <= union + 3 * se
    ok_pairs = bool(np.all(pair_prob <= per_pair + 3 * pair_se))
    ok_var = bool(np.all(var_z <= var_bound))
    return Report(
        name="joint-frequency",
        parameters={
            "m": m,
            "F": [g.encode() for g in F],
            "t": t_threshold,
            "delta": delta,
            "n_samples": n_samples,
            "seed": seed,
            "atoms": p,
            "alphabet": q,
        },
        statistic=prob,
        bound=union,
        stderr=se,
        verdict="pass" if ok_union and ok_pairs and ok_var else "fail",
        details={
            "per_pair_bound": per_pair,
            "per_pair_max_probability": float(pair_prob.max()),
            "max_deviation": max_dev,
            "max_var_Z": float(var_z.max()),
            "var_Z_bound": var_bound,
            "union_ok": ok_union,
            "pairs_ok": ok_pairs,
            "variance_ok": ok_var,
        },
    )


# ---------------------------------------------------------------------------
# product lower bound


def find_approximating_partition(
    sigma: SymMap,
    alpha: ModelPartition,
    F: Iterable[GroupElement],
    eps: float,
    seed: int,
    tries: int = 20000,
    enum_budget: int = 2**20,
) -> FinPartition | None:
    """Some member of AP(sigma, alpha: F, eps), by enumeration when small, else random search."""
    F = _canon_F(F)
    m, u = sigma.m, alpha.u
    if u**m <= enum_budget:
        res = ap_enumerate(sigma, alpha, F, eps, budget=enum_budget, list_cap=u**m)
        return res.members[0] if res.members else None
    probs = atom_measures(alpha)
    if np.any(probs <= 0):
        probs = np.where(probs > 0, probs, 0.0)
        probs = probs / probs.sum()
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    for blk, lo in enumerate(range(0, tries, SAMPLE_BLOCK)):
        hi = min(tries, lo + SAMPLE_BLOCK)
        r = _block_rng(seed, blk).random((hi - lo, m))
        labels = np.minimum(np.searchsorted(cdf, r, side="right"), u - 1).astype(np.int64)
        d = dF_many(sigma, alpha, labels, F)
        hit = np.flatnonzero(d <= eps + 1e-9)
        if hit.size:
            return FinPartition(m, u, labels[hit[0]])
    return None


def product_rate_lower_check(
    sigma: SymMap,
    alpha: ModelPartition,
    kappa: BaseMeasure,
    F: Iterable[GroupElement],
    eps: float,
    n_samples: int,
    seed: int,
    abar: FinPartition | None = None,
) -> Report:
    """Estimate Pr[d_F(alpha x beta, abar v bbar) <= 2 eps] over bbar ~ kappa^m."""
    F = _canon_F(F)
    m = sigma.m
    params = {
        "m": m,
        "F": [g.encode() for g in F],
        "epsilon": eps,
        "n_samples": n_samples,
        "seed": seed,
        "atoms": alpha.u,
        "alphabet": kappa.size,
    }
    if abar is None:
        abar = find_approximating_partition(sigma, alpha, F, eps, seed)
    if abar is None:
        return Report("product-rate", params, math.nan, 1 - eps, math.nan, "inconclusive",
                      {"reason": "no member of AP found at this epsilon"})
    if eps >= 1.0:
        # d_F never exceeds 2 <= 2 eps
        return Report("product-rate", params, 1.0, 1 - eps, 0.0, "pass", {"exact": True})
    beta = canonical_bernoulli_partition(kappa.space(alpha.space.owner))
    # atom i * q + j is A_i x B_j, matching the labels abar * q + bbar
    prod = product_partition(alpha, beta)
    q = kappa.size
    hits = 0
    all_symbols = _sample_symbols(kappa, m, n_samples, seed)
    for lo in range(0, n_samples, SAMPLE_BLOCK):
        hi = min(n_samples, lo + SAMPLE_BLOCK)
        symbols = all_symbols[lo:hi]
        joined = abar.labels[None, :] * q + symbols
        d = dF_many(sigma, prod, joined, F, u=prod.u)
        hits += int(np.count_nonzero(d <= 2 * eps + 1e-9))
    prob = hits / n_samples
    se = math.sqrt(prob * (1 - prob) / n_samples)
    verdict = "pass" if prob >= 1 - eps - 3 * se else "fail"
    return Report(
        "product-rate",
        params,
        prob,
        1 - eps,
        se,
        verdict,
        {"dF_abar": dF(sigma, alpha, abar, F)},
    )
