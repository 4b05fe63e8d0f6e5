"""Approximating partitions of {0..m-1}: d_F, exact counts, importance sampling, rate curves."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .groups import GroupElement, sorted_elements, word_length_hint
from .partitions import BudgetError, ModelPartition, atom_measures, pattern_measures
from .sofic import SymMap

DEFAULT_ENUM_BUDGET = 2**27
DEFAULT_PATTERN_BUDGET = 2**20
DF_TOL = 1e-9  # slack on the d_F <= eps comparison, absorbs float rounding of exact ties
DF_MAX = 2.0
SAMPLE_BLOCK = 4096


class CountingError(ValueError):
    pass


@dataclass(frozen=True)
class FinPartition:
    """An ordered partition of {0..m-1} into u atoms given by a label array."""

    m: int
    u: int
    labels: np.ndarray = field(compare=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (self.m,):
            raise CountingError(f"expected {self.m} labels")
        if labels.size and (labels.min() < 0 or labels.max() >= self.u):
            raise CountingError("labels must lie in 0..u-1")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __eq__(self, other):
        return (
            isinstance(other, FinPartition)
            and self.m == other.m
            and self.u == other.u
            and np.array_equal(self.labels, other.labels)
        )

    def __hash__(self):
        return hash((self.m, self.u, self.labels.tobytes()))

    @classmethod
    def from_index(cls, idx: int, m: int, u: int) -> FinPartition:
        """The labeling with enumeration index ``idx`` (point v gets digit v in base u)."""
        labels = np.empty(m, dtype=np.int64)
        for v in range(m):
            labels[v] = idx % u
            idx //= u
        return cls(m, u, labels)

    def index(self) -> int:
        idx = 0
        for v in reversed(range(self.m)):
            idx = idx * self.u + int(self.labels[v])
        return idx

    def atom_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.u)

    def atoms(self) -> list[frozenset[int]]:
        return [frozenset(np.flatnonzero(self.labels == i).tolist()) for i in range(self.u)]

    def to_json(self) -> dict:
        return {"m": self.m, "u": self.u, "labels": (self.labels + 1).tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> FinPartition:
        return cls(int(obj["m"]), int(obj["u"]), np.asarray(obj["labels"], dtype=np.int64) - 1)

    @classmethod
    def load(cls, path) -> FinPartition:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class APCount:
    mode: str  # "exact" or "importance-sampled"
    count: float
    log_count: float
    stderr: float  # standard error of log_count (0 in exact mode)
    m: int
    u: int
    epsilon: float
    F: tuple[GroupElement, ...]
    n_samples: int = 0
    accepted: int = 0
    members: list[FinPartition] | None = None

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "count": self.count,
            "log_count": self.log_count,
            "stderr": self.stderr,
            "m": self.m,
            "u": self.u,
            "epsilon": self.epsilon,
            "F": [g.encode() for g in self.F],
            "n_samples": self.n_samples,
        }


def _canon_F(F: Iterable[GroupElement]) -> list[GroupElement]:
    F = sorted_elements(set(F))
    if not F:
        raise CountingError("F must be nonempty")
    return F


def _model_side(alpha: ModelPartition, F: Sequence[GroupElement], u: int, budget: int) -> np.ndarray:
    if u ** len(F) > budget:
        raise BudgetError(f"{u}^{len(F)} patterns exceed the pattern budget {budget}")
    return pattern_measures(alpha, F, u)


def dF(
    sigma: SymMap,
    alpha: ModelPartition,
    beta: FinPartition,
    F: Iterable[GroupElement],
    pattern_budget: int = DEFAULT_PATTERN_BUDGET,
) -> float:
    """Sum over phi: F -> atoms of |mu(A_phi) - zeta(B_phi)|, B_phi taken through sigma."""
    F = _canon_F(F)
    if beta.m != sigma.m:
        raise CountingError("partition degree differs from sigma")
    u = max(alpha.u, beta.u)
    mu = _model_side(alpha, F, u, pattern_budget)
    inv = sigma.inverse_images(F)
    return float(kernels.df_batch(beta.labels[None, :].copy(), inv, mu, u)[0])


def dF_many(sigma: SymMap, alpha: ModelPartition, labels: np.ndarray, F, u: int | None = None) -> np.ndarray:
    """d_F for each row of a (n, m) label array."""
    F = _canon_F(F)
    u = alpha.u if u is None else u
    mu = _model_side(alpha, F, u, DEFAULT_PATTERN_BUDGET)
    inv = sigma.inverse_images(F)
    return kernels.df_batch(np.ascontiguousarray(labels, dtype=np.int64), inv, mu, u)


# ---------------------------------------------------------------------------
# exact enumeration


def _count_shard(args):
    backend, inv, mu, u, lo, hi, eps, want_mask = args
    impl = kernels.backends()[backend]
    mask = np.zeros(hi - lo, dtype=np.uint8) if want_mask else None
    n = impl.count_range(inv, mu, u, lo, hi, eps, DF_TOL, mask)
    return n, mask


def _shards(total: int, workers: int) -> list[tuple[int, int]]:
    pieces = max(1, workers) * 4 if workers > 1 else 1
    bounds = np.linspace(0, total, pieces + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def ap_mask(
    sigma: SymMap,
    alpha: ModelPartition,
    F: Iterable[GroupElement],
    eps: float,
    budget: int = DEFAULT_ENUM_BUDGET,
    workers: int = 1,
) -> np.ndarray:
    """Membership of every labeling (by enumeration index) in AP(sigma, alpha: F, eps)."""
    count, mask = _enumerate(sigma, alpha, F, eps, budget, workers, want_mask=True)
    return mask.astype(bool)


def _enumerate(sigma, alpha, F, eps, budget, workers, want_mask):
    F = _canon_F(F)
    u, m = alpha.u, sigma.m
    total = u**m
    if total > budget:
        raise BudgetError(
            f"{u}^{m} labelings exceed the enumeration budget {budget}; use importance sampling"
        )
    if eps < 0:
        return 0, np.zeros(total, dtype=np.uint8) if want_mask else None
    mu = _model_side(alpha, F, u, DEFAULT_PATTERN_BUDGET)
    inv = np.ascontiguousarray(sigma.inverse_images(F))
    jobs = [(kernels.BACKEND, inv, mu, u, lo, hi, float(eps), want_mask) for lo, hi in _shards(total, workers)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_shard, jobs))
    else:
        results = [_count_shard(j) for j in jobs]
    count = sum(r[0] for r in results)
    mask = np.concatenate([r[1] for r in results]) if want_mask else None
    return count, mask


def ap_enumerate(
    sigma: SymMap,
    alpha: ModelPartition,
    F: Iterable[GroupElement],
    eps: float,
    budget: int = DEFAULT_ENUM_BUDGET,
    list_cap: int = 0,
    workers: int = 1,
) -> APCount:
    """Exact |AP(sigma, alpha: F, eps)| by scanning all u^m labelings.

    Members are listed (in enumeration order) when ``list_cap`` > 0 and the
    count does not exceed it.
    """
    F = _canon_F(F)
    want = list_cap > 0
    count, mask = _enumerate(sigma, alpha, F, eps, budget, workers, want_mask=want)
    members = None
    if want and count <= list_cap:
        members = [FinPartition.from_index(int(i), sigma.m, alpha.u) for i in np.flatnonzero(mask)]
    return APCount(
        mode="exact",
        count=count,
        log_count=math.log(count) if count > 0 else -math.inf,
        stderr=0.0,
        m=sigma.m,
        u=alpha.u,
        epsilon=float(eps),
        F=tuple(F),
        members=members,
    )


# ---------------------------------------------------------------------------
# importance sampling


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(block)))


def sample_labelings(probs: np.ndarray, m: int, n: int, seed: int, block_size: int = SAMPLE_BLOCK) -> np.ndarray:
    """n i.i.d. labelings of m points with label law ``probs``; block b draws from Philox key (seed, b)."""
    out = np.empty((n, m), dtype=np.int64)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    for b, lo in enumerate(range(0, n, block_size)):
        hi = min(n, lo + block_size)
        r = _block_rng(seed, b).random((hi - lo, m))
        out[lo:hi] = np.searchsorted(cdf, r, side="right")
    np.minimum(out, len(probs) - 1, out=out)
    return out


def _sample_block(args):
    backend, inv, mu, probs, m, u, seed, b, lo, hi, eps = args
    impl = kernels.backends()[backend]
    r = _block_rng(seed, b).random((hi - lo, m))
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    labels = np.minimum(np.searchsorted(cdf, r, side="right"), u - 1).astype(np.int64)
    logw = np.log(probs)[labels].sum(axis=1)
    ok = impl.df_batch(labels, inv, mu, u) <= eps + DF_TOL
    return ok, logw


def jackknife_log_mean(log_values: np.ndarray, n: int) -> tuple[float, float]:
    """log of the mean of n values (those not listed are zero) and its jackknife stderr.

    ``log_values`` holds log x_j for the nonzero terms only.
    """
    k = log_values.size
    if k == 0:
        return -math.inf, math.inf
    top = float(log_values.max())
    scaled = np.exp(log_values - top)
    total = math.fsum(scaled.tolist())
    est = top + math.log(total) - math.log(n)
    if n < 2:
        return est, math.inf
    rest = total - scaled
    with np.errstate(divide="ignore"):
        loo_nonzero = top + np.log(np.maximum(rest, 0.0)) - math.log(n - 1)
    loo_zero = top + math.log(total) - math.log(n - 1)
    if not np.all(np.isfinite(loo_nonzero)):
        return est, math.inf
    theta = np.concatenate([loo_nonzero, np.full(n - k, loo_zero)])
    mean = math.fsum(theta.tolist()) / n
    var = (n - 1) / n * math.fsum(((theta - mean) ** 2).tolist())
    return est, math.sqrt(var)


def ap_importance_estimate(
    sigma: SymMap,
    alpha: ModelPartition,
    F: Iterable[GroupElement],
    eps: float,
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> APCount:
    """Unbiased estimate of |AP| from labelings drawn point-wise from the atom measures.

    Each sample is weighted by 1 / prod_v mu(A_label(v)); the estimate is the
    mean weighted acceptance. ``stderr`` is the jackknife error of the log.
    """
    F = _canon_F(F)
    m, u = sigma.m, alpha.u
    base = dict(m=m, u=u, epsilon=float(eps), F=tuple(F), n_samples=n_samples)
    if n_samples < 1:
        raise CountingError("n_samples must be >= 1")
    if eps < 0:
        return APCount("importance-sampled", 0.0, -math.inf, 0.0, accepted=0, **base)
    if eps >= DF_MAX:
        # d_F never exceeds 2, every labeling qualifies
        return APCount("importance-sampled", float(u**m), m * math.log(u), 0.0, accepted=n_samples, **base)
    probs = atom_measures(alpha)
    if np.any(probs <= 0):
        raise CountingError("degenerate proposal: an atom of alpha has zero measure")
    mu = _model_side(alpha, F, u, DEFAULT_PATTERN_BUDGET)
    inv = np.ascontiguousarray(sigma.inverse_images(F))
    jobs = [
        (kernels.BACKEND, inv, mu, probs, m, u, seed, b, lo, min(n_samples, lo + SAMPLE_BLOCK), float(eps))
        for b, lo in enumerate(range(0, n_samples, SAMPLE_BLOCK))
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sample_block, jobs))
    else:
        results = [_sample_block(j) for j in jobs]
    ok = np.concatenate([r[0] for r in results])
    logw = np.concatenate([r[1] for r in results])
    log_est, se = jackknife_log_mean(-logw[ok], n_samples)
    count = math.exp(log_est) if np.isfinite(log_est) else 0.0
    return APCount("importance-sampled", count, log_est, se, accepted=int(ok.sum()), **base)


# ---------------------------------------------------------------------------
# coarsening and splitting maps on finite partitions


def coarsen_finite(beta: FinPartition, grouping: Sequence[int] | Mapping[int, int]) -> FinPartition:
    """Merge atom i into atom grouping[i]."""
    if isinstance(grouping, Mapping):
        table = np.array([grouping[i] for i in range(beta.u)], dtype=np.int64)
    else:
        table = np.asarray(grouping, dtype=np.int64)
    if table.shape != (beta.u,):
        raise CountingError(f"grouping must assign each of {beta.u} atoms")
    v = int(table.max()) + 1
    if table.min() < 0 or set(table.tolist()) != set(range(v)):
        raise CountingError("grouping is not surjective onto 0..v-1")
    return FinPartition(beta.m, v, table[beta.labels])


def split_finite(
    sigma: SymMap,
    beta: FinPartition,
    t: GroupElement,
    x_map: Sequence[int],
    y_map: Sequence[int],
) -> FinPartition:
    """Atom i of the result is B_{x(i)} intersected with sigma(t) B_{y(i)}.

    (x, y) must cover every pair of atoms of beta; when a pair repeats, the
    smallest index carries it and the others stay empty.
    """
    x_map = [int(x) for x in x_map]
    y_map = [int(y) for y in y_map]
    if len(x_map) != len(y_map):
        raise CountingError("x_map and y_map differ in length")
    v = beta.u
    lookup = np.full((v, v), -1, dtype=np.int64)
    for i in reversed(range(len(x_map))):
        lookup[x_map[i], y_map[i]] = i
    if np.any(lookup < 0):
        raise CountingError("maps do not cover all pairs of atoms")
    p = sigma(t)
    inv = np.empty_like(p)
    inv[p] = np.arange(sigma.m)
    labels = lookup[beta.labels, beta.labels[inv]]
    return FinPartition(beta.m, len(x_map), labels)


def join_finite(a: FinPartition, b: FinPartition) -> FinPartition:
    """Pairwise intersections, atom (i, j) at index i * u_b + j."""
    if a.m != b.m:
        raise CountingError("degree mismatch")
    return FinPartition(a.m, a.u * b.u, a.labels * b.u + b.labels)


# ---------------------------------------------------------------------------
# rate curves


def F_radius(F: Iterable[GroupElement]) -> int:
    return max(word_length_hint(g) for g in F)


@dataclass
class RateEntry:
    i: int
    m: int
    epsilon: float
    F_radius: int
    log_count: float
    rate: float
    mode: str
    stderr: float
    error: str = ""


@dataclass
class RateCurve:
    entries: list[RateEntry]

    @property
    def rates(self) -> list[float]:
        return [e.rate for e in self.entries]


def count_ap(sigma, alpha, F, eps, mode="auto", budget=DEFAULT_ENUM_BUDGET, n_samples=20000,
             seed=0, workers=1) -> APCount:
    if mode == "auto":
        mode = "exact" if alpha.u ** sigma.m <= budget else "sampled"
    if mode == "exact":
        return ap_enumerate(sigma, alpha, F, eps, budget=budget, workers=workers)
    if mode == "sampled":
        return ap_importance_estimate(sigma, alpha, F, eps, n_samples, seed, workers=workers)
    raise CountingError(f"unknown mode {mode!r}")


def rate_curve(
    sigmas: Sequence[SymMap],
    alpha: ModelPartition,
    F: Iterable[GroupElement],
    eps: float,
    mode: str = "auto",
    budget: int = DEFAULT_ENUM_BUDGET,
    n_samples: int = 20000,
    seed: int = 0,
    workers: int = 1,
) -> RateCurve:
    """(1/m_i) log |AP(sigma_i, alpha: F, eps)| along the sequence; log 0 = -inf."""
    F = _canon_F(F)
    radius = F_radius(F)
    entries = []
    for i, sigma in enumerate(sigmas):
        try:
            c = count_ap(sigma, alpha, F, eps, mode, budget, n_samples, seed + i, workers)
        except (BudgetError, CountingError, ValueError) as exc:
            entries.append(RateEntry(i, sigma.m, float(eps), radius, math.nan, math.nan, mode, math.nan, str(exc)))
            continue
        entries.append(
            RateEntry(i, sigma.m, float(eps), radius, c.log_count, c.log_count / sigma.m,
                      "exact" if c.mode == "exact" else "sampled", c.stderr)
        )
    return RateCurve(entries)


@dataclass
class HReport:
    F_radii: list[int]
    epsilons: list[float]
    tail: int
    tail_max: list[list[float]]  # [F index][eps index]
    tail_min: list[list[float]]
    curves: list[list[RateCurve]]
    headline: float
    note: str = (
        "finite-scale proxy: maximum of (1/m) log|AP| over the last entries of the "
        "sequence, at the largest F and smallest epsilon; not a limit"
    )


def _tail(values: list[float], T: int, fn) -> float:
    vals = [v for v in values[-T:] if not math.isnan(v)]
    return fn(vals) if vals else math.nan


def h_report(
    sigmas: Sequence[SymMap],
    alpha: ModelPartition,
    F_schedule: Sequence[Iterable[GroupElement]],
    eps_schedule: Sequence[float],
    mode: str = "auto",
    tail: int = 3,
    budget: int = DEFAULT_ENUM_BUDGET,
    n_samples: int = 20000,
    seed: int = 0,
    workers: int = 1,
) -> HReport:
    """Tail-max (and tail-min) rates over a nested F schedule and a decreasing eps schedule."""
    Fs = [frozenset(F) for F in F_schedule]
    if not Fs or not eps_schedule or not sigmas:
        raise CountingError("schedules must be nonempty")
    for a, b in zip(Fs, Fs[1:]):
        if not a <= b:
            raise CountingError("F schedule must be nested increasing")
    for a, b in zip(eps_schedule, eps_schedule[1:]):
        if not b < a:
            raise CountingError("epsilon schedule must be strictly decreasing")
    if any(e <= 0 for e in eps_schedule):
        raise CountingError("epsilons must be positive")
    if tail < 1:
        raise CountingError("tail must be >= 1")
    degrees = [s.m for s in sigmas]
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise CountingError("degrees of the sequence must strictly increase")
    curves, tmax, tmin = [], [], []
    for F in Fs:
        row, rmax, rmin = [], [], []
        for eps in eps_schedule:
            c = rate_curve(sigmas, alpha, F, eps, mode, budget, n_samples, seed, workers)
            row.append(c)
            rmax.append(_tail(c.rates, tail, max))
            rmin.append(_tail(c.rates, tail, min))
        curves.append(row)
        tmax.append(rmax)
        tmin.append(rmin)
    return HReport(
        F_radii=[F_radius(F) for F in Fs],
        epsilons=[float(e) for e in eps_schedule],
        tail=tail,
        tail_max=tmax,
        tail_min=tmin,
        curves=curves,
        headline=tmax[-1][-1],
    )


CSV_COLUMNS = ("i", "m", "epsilon", "F_radius", "log_count", "rate", "mode", "stderr")


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def curve_rows(curve: RateCurve) -> list[list[str]]:
    return [[fmt(getattr(e, c)) for c in CSV_COLUMNS] for e in curve.entries]
