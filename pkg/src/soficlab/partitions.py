"""Exact partition algebra on finite-window model systems.

A model space enumerates finitely many *cells* for each *support*: for a
Bernoulli shift the support is a window of coordinates and the cells are the
configurations K^window; for a finite G-set the cells are its points. A
partition is a labeling of the cells of its support. Operations between
partitions lift both to a common support first.

Atom measures are sums of cell weights grouped by label. The grouping sorts
by (label, weight) before summing, so the result depends only on the
multiset of weights in each atom; this makes translation an exact isometry.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .groups import (
    GroupElement,
    GroupError,
    GroupSpec,
    cayley_spanning_tree,
    inverse,
    multiply,
    sorted_elements,
)

DEFAULT_CELL_BUDGET = 2**24
WEIGHT_TOL = 1e-12


class PartitionError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# spaces


class ModelSpace:
    owner: GroupSpec

    def empty_support(self):
        raise NotImplementedError

    def union_support(self, a, b):
        raise NotImplementedError

    def n_cells(self, support) -> int:
        raise NotImplementedError

    def cell_weights(self, support) -> np.ndarray:
        raise NotImplementedError

    def cell_map(self, src, dst) -> np.ndarray:
        """For each cell of ``dst`` (a superset support), the cell of ``src`` it projects to."""
        raise NotImplementedError

    def translate_map(self, g: GroupElement, support):
        """Support of the translate and, per new cell, the source cell whose label it takes."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class BernoulliSpace(ModelSpace):
    """The shift of ``owner`` on K^G with product measure kappa^G.

    Zero weights are pruned from the alphabet on construction.
    """

    owner: GroupSpec
    weights: tuple[float, ...]
    alphabet: tuple = ()
    budget: int = field(default=DEFAULT_CELL_BUDGET, compare=False)

    def __post_init__(self):
        w = [float(x) for x in self.weights]
        alphabet = tuple(self.alphabet) or tuple(range(len(w)))
        if len(alphabet) != len(w):
            raise PartitionError("alphabet and weights differ in length")
        if any(x < 0 for x in w):
            raise PartitionError("weights must be nonnegative")
        kept = [(a, x) for a, x in zip(alphabet, w) if x > 0]
        if not kept:
            raise PartitionError("base measure has no positive weight")
        if abs(math.fsum(x for _, x in kept) - 1.0) > WEIGHT_TOL:
            raise PartitionError("base weights must sum to 1")
        object.__setattr__(self, "alphabet", tuple(a for a, _ in kept))
        object.__setattr__(self, "weights", tuple(x for _, x in kept))

    @property
    def q(self) -> int:
        return len(self.weights)

    def empty_support(self):
        return ()

    def union_support(self, a, b):
        return tuple(sorted_elements(set(a) | set(b)))

    def n_cells(self, support) -> int:
        n = self.q ** len(support)
        if n > self.budget:
            raise BudgetError(
                f"window of {len(support)} coordinates needs {n} cells (budget {self.budget})"
            )
        return n

    def cell_weights(self, support) -> np.ndarray:
        return _bernoulli_weights(self.weights, len(support), self.n_cells(support))

    def cell_map(self, src, dst) -> np.ndarray:
        pos = {g: i for i, g in enumerate(dst)}
        try:
            axes = [pos[g] for g in src]
        except KeyError as exc:
            raise PartitionError("cell_map needs src to be contained in dst") from exc
        n = len(dst)
        self.n_cells(dst)
        src_idx = np.arange(self.q ** len(src), dtype=np.int64).reshape((self.q,) * len(src))
        shape = [1] * n
        for a in axes:
            shape[a] = self.q
        return np.broadcast_to(src_idx.reshape(shape), (self.q,) * n).ravel()

    def translate_map(self, g, support):
        moved = [multiply(g, w) for w in support]
        new_support = tuple(sorted_elements(moved))
        pos = {h: i for i, h in enumerate(new_support)}
        perm = [pos[h] for h in moved]  # old axis j lands at new axis perm[j]
        n = len(support)
        cells = np.arange(self.n_cells(support), dtype=np.int64).reshape((self.q,) * n)
        axes = [0] * n
        for j, i in enumerate(perm):
            axes[i] = j
        return new_support, np.transpose(cells, axes).ravel()

    def to_json(self) -> dict:
        return {
            "backend": "bernoulli",
            "group": self.owner.to_json(),
            "alphabet": list(self.alphabet),
            "weights": list(self.weights),
        }


_WEIGHT_CACHE: dict = {}


def _bernoulli_weights(kappa: tuple, n: int, size: int) -> np.ndarray:
    key = (kappa, n)
    w = _WEIGHT_CACHE.get(key)
    if w is None:
        q = len(kappa)
        digits = np.arange(size, dtype=np.int64)
        counts = np.zeros((q, size), dtype=np.int64)
        for _ in range(n):
            d = digits % q
            digits //= q
            for k in range(q):
                counts[k] += d == k
        # product over symbols in fixed order: weight depends only on symbol counts
        w = np.ones(size)
        for k in range(q):
            w = w * np.power(kappa[k], counts[k])
        w.setflags(write=False)
        if size <= 2**20:
            _WEIGHT_CACHE[key] = w
    return w


@dataclass(frozen=True, eq=True)
class FiniteGSet(ModelSpace):
    """A finite set of points with a measure-preserving action.

    ``act(g)`` returns the permutation array of g (``p[x] = g.x``). ``name``
    identifies the action for equality and serialization.
    """

    owner: GroupSpec
    n_points: int
    weights: tuple[float, ...]
    act: Callable[[GroupElement], np.ndarray] = field(compare=False, repr=False)
    name: str = "custom"

    def __post_init__(self):
        if len(self.weights) != self.n_points:
            raise PartitionError("one weight per point required")
        if abs(math.fsum(self.weights) - 1.0) > WEIGHT_TOL:
            raise PartitionError("point weights must sum to 1")
        w = np.asarray(self.weights)
        for g in self.owner.generator_elements():
            p = np.asarray(self.act(g))
            if not np.allclose(w[p], w, atol=WEIGHT_TOL):
                raise PartitionError("action does not preserve the point weights")

    @classmethod
    def regular(cls, spec: GroupSpec) -> FiniteGSet:
        """Left-regular action of a finite group on itself, uniform measure."""
        elems = spec.elements()
        index = {g: i for i, g in enumerate(elems)}
        cache: dict = {}

        def act(g):
            p = cache.get(g)
            if p is None:
                p = np.array([index[multiply(g, h)] for h in elems], dtype=np.int64)
                cache[g] = p
            return p

        n = len(elems)
        return cls(spec, n, (1.0 / n,) * n, act, "regular")

    @classmethod
    def natural(cls, spec: GroupSpec) -> FiniteGSet:
        """S_n acting on {0..n-1}, uniform measure."""
        if spec.kind != "symmetric":
            raise PartitionError("natural action needs a symmetric group")
        n = spec.params[0]
        return cls(spec, n, (1.0 / n,) * n, lambda g: np.asarray(g.nf, dtype=np.int64), "natural")

    def empty_support(self):
        return ()

    def union_support(self, a, b):
        return ()

    def n_cells(self, support) -> int:
        return self.n_points

    def cell_weights(self, support) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def cell_map(self, src, dst) -> np.ndarray:
        return np.arange(self.n_points, dtype=np.int64)

    def translate_map(self, g, support):
        # label'(x) = label(g^{-1} x)
        return (), np.asarray(self.act(inverse(g)), dtype=np.int64)

    def to_json(self) -> dict:
        if self.name not in ("regular", "natural"):
            raise PartitionError("only regular and natural G-sets serialize")
        return {"backend": "finite-gset", "group": self.owner.to_json(), "action": self.name}


@dataclass(frozen=True, eq=True)
class ProductSpace(ModelSpace):
    """X x Y with the diagonal action g(x, y) = (gx, gy)."""

    left: ModelSpace
    right: ModelSpace

    def __post_init__(self):
        if self.left.owner != self.right.owner:
            raise GroupError("group mismatch")

    @property
    def owner(self) -> GroupSpec:
        return self.left.owner

    def empty_support(self):
        return (self.left.empty_support(), self.right.empty_support())

    def union_support(self, a, b):
        return (self.left.union_support(a[0], b[0]), self.right.union_support(a[1], b[1]))

    def n_cells(self, support) -> int:
        return self.left.n_cells(support[0]) * self.right.n_cells(support[1])

    def cell_weights(self, support) -> np.ndarray:
        wl = self.left.cell_weights(support[0])
        wr = self.right.cell_weights(support[1])
        return np.multiply.outer(wl, wr).ravel()

    def cell_map(self, src, dst) -> np.ndarray:
        ml = self.left.cell_map(src[0], dst[0])
        mr = self.right.cell_map(src[1], dst[1])
        nr = self.right.n_cells(src[1])
        return (ml[:, None] * nr + mr[None, :]).ravel()

    def translate_map(self, g, support):
        sl, ml = self.left.translate_map(g, support[0])
        sr, mr = self.right.translate_map(g, support[1])
        nr = self.right.n_cells(support[1])
        return (sl, sr), (ml[:, None] * nr + mr[None, :]).ravel()

    def to_json(self) -> dict:
        return {"backend": "product", "left": self.left.to_json(), "right": self.right.to_json()}


@dataclass(frozen=True, eq=True)
class TwistedSpace(ModelSpace):
    """A copy of ``base`` on which g acts as a(g) does on the original."""

    base: ModelSpace
    automorphism: object = field(compare=False)
    tag: str = ""

    @property
    def owner(self) -> GroupSpec:
        return self.base.owner

    def empty_support(self):
        return self.base.empty_support()

    def union_support(self, a, b):
        return self.base.union_support(a, b)

    def n_cells(self, support) -> int:
        return self.base.n_cells(support)

    def cell_weights(self, support) -> np.ndarray:
        return self.base.cell_weights(support)

    def cell_map(self, src, dst) -> np.ndarray:
        return self.base.cell_map(src, dst)

    def translate_map(self, g, support):
        return self.base.translate_map(self.automorphism(g), support)


def space_from_json(obj: dict) -> ModelSpace:
    backend = obj.get("backend")
    if backend == "bernoulli":
        spec = GroupSpec.from_json(obj["group"])
        return BernoulliSpace(spec, tuple(obj["weights"]), tuple(obj.get("alphabet", ())))
    if backend == "finite-gset":
        spec = GroupSpec.from_json(obj["group"])
        action = obj.get("action", "regular")
        if action == "regular":
            return FiniteGSet.regular(spec)
        if action == "natural":
            return FiniteGSet.natural(spec)
        raise PartitionError(f"unknown action {action!r}")
    if backend == "product":
        return ProductSpace(space_from_json(obj["left"]), space_from_json(obj["right"]))
    raise PartitionError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# partitions


class ModelPartition:
    """An ordered finite partition of a model space.

    ``labels[c]`` is the atom index (0-based) of cell ``c`` of ``support``.
    Atoms may be empty.
    """

    __slots__ = ("space", "support", "labels", "u")

    def __init__(self, space: ModelSpace, support, labels, u: int | None = None):
        labels = np.asarray(labels, dtype=np.int64)
        n = space.n_cells(support)
        if labels.shape != (n,):
            raise PartitionError(f"expected {n} labels, got shape {labels.shape}")
        if u is None:
            u = int(labels.max()) + 1 if labels.size else 1
        if labels.size and (labels.min() < 0 or labels.max() >= u):
            raise PartitionError("labels must lie in 0..u-1")
        labels.setflags(write=False)
        self.space = space
        self.support = support
        self.labels = labels
        self.u = int(u)

    @property
    def window(self):
        return self.support

    def lifted(self, support) -> np.ndarray:
        if support == self.support:
            return self.labels
        return self.labels[self.space.cell_map(self.support, support)]

    def measures(self) -> np.ndarray:
        return atom_measures(self)

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "window": _support_json(self.space, self.support),
            "labels": self.labels.tolist(),
            "u": self.u,
        }

    @classmethod
    def from_json(cls, obj: dict, space: ModelSpace | None = None) -> ModelPartition:
        space = space or space_from_json(obj["space"])
        raw = np.asarray(obj["labels"], dtype=np.int64)
        support, order = _support_from_json(space, obj.get("window", []))
        labels = raw if order is None else raw[order]
        return cls(space, support, labels, int(obj["u"]))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> ModelPartition:
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self):
        return f"ModelPartition(u={self.u}, support={_support_json(self.space, self.support)!r})"


def _support_json(space, support):
    if isinstance(space, ProductSpace):
        return {"left": _support_json(space.left, support[0]),
                "right": _support_json(space.right, support[1])}
    if isinstance(space, TwistedSpace):
        return _support_json(space.base, support)
    return [g.encode() for g in support]


def _support_from_json(space, obj):
    """Canonical support plus an index array reordering the file's labels, if needed."""
    if isinstance(space, BernoulliSpace):
        listed = [space.owner.element(e) for e in obj]
        if len(set(listed)) != len(listed):
            raise PartitionError("window lists an element twice")
        support = tuple(sorted_elements(listed))
        if list(support) == listed:
            return support, None
        return support, _reorder(space, listed, support)
    if isinstance(space, FiniteGSet):
        return (), None
    if isinstance(space, ProductSpace):
        sl, ol = _support_from_json(space.left, obj["left"])
        sr, orr = _support_from_json(space.right, obj["right"])
        nl, nr = space.left.n_cells(sl), space.right.n_cells(sr)
        ol = np.arange(nl) if ol is None else ol
        orr = np.arange(nr) if orr is None else orr
        return (sl, sr), (ol[:, None] * nr + orr[None, :]).ravel()
    raise PartitionError("unsupported space for deserialization")


def _reorder(space: BernoulliSpace, listed, support):
    n = len(listed)
    pos = {g: i for i, g in enumerate(listed)}
    axes = [pos[g] for g in support]
    cells = np.arange(space.n_cells(support), dtype=np.int64).reshape((space.q,) * n)
    return np.transpose(cells, axes).ravel()


def _same_space(a: ModelPartition, b: ModelPartition) -> ModelSpace:
    if a.space != b.space:
        raise PartitionError("partitions live on different spaces")
    return a.space


def _group_sums(codes: np.ndarray, weights: np.ndarray, size: int) -> np.ndarray:
    """Per-code weight totals, summed in (code, weight) order for reproducibility."""
    out = np.zeros(size)
    if codes.size == 0:
        return out
    order = np.lexsort((weights, codes))
    c = codes[order]
    w = weights[order]
    starts = np.flatnonzero(np.r_[True, c[1:] != c[:-1]])
    out[c[starts]] = np.add.reduceat(w, starts)
    return out


def atom_measures(alpha: ModelPartition) -> np.ndarray:
    w = alpha.space.cell_weights(alpha.support)
    return _group_sums(alpha.labels, w, alpha.u)


def _joint(alpha: ModelPartition, beta: ModelPartition):
    space = _same_space(alpha, beta)
    support = space.union_support(alpha.support, beta.support)
    la, lb = alpha.lifted(support), beta.lifted(support)
    w = space.cell_weights(support)
    P = _group_sums(la * beta.u + lb, w, alpha.u * beta.u).reshape(alpha.u, beta.u)
    return support, la, lb, w, P


# -- constructors -------------------------------------------------------------


def trivial_partition(space: ModelSpace) -> ModelPartition:
    s = space.empty_support()
    return ModelPartition(space, s, np.zeros(space.n_cells(s), dtype=np.int64), 1)


def canonical_bernoulli_partition(space: ModelSpace) -> ModelPartition:
    """Partition by the symbol at the identity coordinate."""
    if not isinstance(space, BernoulliSpace):
        raise PartitionError("canonical partition needs a Bernoulli space")
    e = space.owner.identity()
    return ModelPartition(space, (e,), np.arange(space.q, dtype=np.int64), space.q)


def partition_from_function(space: BernoulliSpace, window: Iterable[GroupElement], fn, u: int | None = None) -> ModelPartition:
    """Label each configuration on ``window`` by ``fn(config_dict)``."""
    support = tuple(sorted_elements(set(window)))
    n = space.n_cells(support)
    labels = np.empty(n, dtype=np.int64)
    q = space.q
    for c in range(n):
        digits = []
        x = c
        for _ in support:
            digits.append(x % q)
            x //= q
        config = {g: space.alphabet[d] for g, d in zip(support, reversed(digits))}
        labels[c] = fn(config)
    return ModelPartition(space, support, labels, u)


# -- algebra -------------------------------------------------------------------


def translate(g: GroupElement, alpha: ModelPartition) -> ModelPartition:
    """The partition g.alpha whose i-th atom is g applied to the i-th atom of alpha."""
    if g.owner != alpha.space.owner:
        raise GroupError("group mismatch")
    support, idx = alpha.space.translate_map(g, alpha.support)
    return ModelPartition(alpha.space, support, alpha.labels[idx], alpha.u)


def join(alpha: ModelPartition, beta: ModelPartition, drop_null: bool = True) -> ModelPartition:
    """alpha v beta, atoms ordered lexicographically by (i, j).

    With ``drop_null`` only pairs of positive measure are kept; otherwise all
    u_alpha * u_beta pairs are retained, many possibly empty.
    """
    support, la, lb, w, P = _joint(alpha, beta)
    codes = la * beta.u + lb
    if not drop_null:
        return ModelPartition(alpha.space, support, codes, alpha.u * beta.u)
    keep = np.flatnonzero(P.ravel() > 0)
    relabel = np.full(alpha.u * beta.u, -1, dtype=np.int64)
    relabel[keep] = np.arange(keep.size)
    labels = relabel[codes]
    # cells of zero weight may carry a dropped code; park them in atom 0
    labels[labels < 0] = 0
    return ModelPartition(alpha.space, support, labels, max(int(keep.size), 1))


def windowed_join(alpha: ModelPartition, F: Iterable[GroupElement], drop_null: bool = True) -> ModelPartition:
    F = sorted_elements(set(F))
    if not F:
        raise PartitionError("F must be nonempty")
    out = translate(F[0], alpha)
    for f in F[1:]:
        out = join(out, translate(f, alpha), drop_null=drop_null)
    return out


def coarsen(alpha: ModelPartition, grouping: Sequence[int] | Mapping[int, int]) -> ModelPartition:
    table = _grouping_table(grouping, alpha.u)
    v = int(table.max()) + 1
    return ModelPartition(alpha.space, alpha.support, table[alpha.labels], v)


def _grouping_table(grouping, u: int) -> np.ndarray:
    if isinstance(grouping, Mapping):
        try:
            table = np.array([grouping[i] for i in range(u)], dtype=np.int64)
        except KeyError as exc:
            raise PartitionError(f"grouping misses atom {exc.args[0]}") from None
    else:
        table = np.asarray(grouping, dtype=np.int64)
    if table.shape != (u,):
        raise PartitionError(f"grouping must assign each of {u} atoms")
    v = int(table.max()) + 1
    if table.min() < 0 or set(table.tolist()) != set(range(v)):
        raise PartitionError("grouping is not surjective onto 0..v-1")
    return table


def refines(alpha: ModelPartition, beta: ModelPartition) -> bool:
    """alpha >= beta: each atom of alpha sits in one atom of beta up to null cells."""
    space = _same_space(alpha, beta)
    support = space.union_support(alpha.support, beta.support)
    la, lb = alpha.lifted(support), beta.lifted(support)
    pos = space.cell_weights(support) > 0
    target = np.full(alpha.u, -1, dtype=np.int64)
    la, lb = la[pos], lb[pos]
    target[la] = lb
    return bool(np.all(target[la] == lb))


def same_partition(alpha: ModelPartition, beta: ModelPartition) -> bool:
    """Ordered equality: identical labels on every cell of positive weight."""
    space = _same_space(alpha, beta)
    support = space.union_support(alpha.support, beta.support)
    pos = space.cell_weights(support) > 0
    return bool(np.array_equal(alpha.lifted(support)[pos], beta.lifted(support)[pos]))


def _xlogx_terms(p: np.ndarray) -> list[float]:
    return [-x * math.log(x) for x in p.tolist() if x > 0]


def entropy(alpha: ModelPartition) -> float:
    """Shannon entropy in nats."""
    return math.fsum(_xlogx_terms(atom_measures(alpha)))


def conditional_entropy(alpha: ModelPartition, beta: ModelPartition) -> float:
    """H(alpha | beta) = sum_B mu(B) H(alpha restricted to B)."""
    _, _, _, _, P = _joint(alpha, beta)
    pb = atom_measures(beta)
    terms = []
    for (i, j), p in np.ndenumerate(P):
        if p > 0:
            terms.append(-p * math.log(p / pb[j]))
    return max(math.fsum(terms), 0.0)


def information_function(alpha: ModelPartition, beta: ModelPartition) -> dict[tuple[int, int], float]:
    """-log mu(A_i | B_j) on each cell (i, j) of alpha v beta with positive measure."""
    _, _, _, _, P = _joint(alpha, beta)
    pb = atom_measures(beta)
    return {(i, j): -math.log(p / pb[j]) for (i, j), p in np.ndenumerate(P) if p > 0}


def rohlin_distance(alpha: ModelPartition, beta: ModelPartition) -> float:
    """H(alpha|beta) + H(beta|alpha)."""
    _, _, _, _, P = _joint(alpha, beta)
    pa, pb = atom_measures(alpha), atom_measures(beta)
    terms = []
    for (i, j), p in np.ndenumerate(P):
        if p > 0:
            terms.append(-p * (math.log(p / pa[i]) + math.log(p / pb[j])))
    return max(math.fsum(terms), 0.0)


def equivalent(alpha: ModelPartition, beta: ModelPartition) -> bool:
    return refines(alpha, beta) and refines(beta, alpha)


# -- patterns over F -------------------------------------------------------------


def pattern_codes(alpha: ModelPartition, F: Sequence[GroupElement], u: int | None = None):
    """Support, per-cell pattern codes sum_k label(f_k^{-1} x) u^k, and cell weights."""
    u = alpha.u if u is None else u
    moved = [translate(f, alpha) for f in F]
    support = alpha.space.empty_support()
    for p in moved:
        support = alpha.space.union_support(support, p.support)
    codes = np.zeros(alpha.space.n_cells(support), dtype=np.int64)
    scale = 1
    for p in moved:
        codes += p.lifted(support) * scale
        scale *= u
    return support, codes, alpha.space.cell_weights(support)


def pattern_measures(alpha: ModelPartition, F: Sequence[GroupElement], u: int | None = None) -> np.ndarray:
    """mu(A_phi) for every phi: F -> {0..u-1}, indexed by sum_k phi(f_k) u^k."""
    u = alpha.u if u is None else u
    if u < alpha.u:
        raise PartitionError("u smaller than the number of atoms")
    _, codes, w = pattern_codes(alpha, F, u)
    return _group_sums(codes, w, u ** len(F))


def dF_model(alpha: ModelPartition, beta: ModelPartition, F: Iterable[GroupElement]) -> float:
    """Sum over phi of |mu(A_phi) - mu(B_phi)|, padding the shorter partition with empty atoms."""
    _same_space(alpha, beta)
    F = sorted_elements(set(F))
    u = max(alpha.u, beta.u)
    ma = pattern_measures(alpha, F, u)
    mb = pattern_measures(beta, F, u)
    return math.fsum(np.abs(ma - mb).tolist())


# -- splittings -----------------------------------------------------------------


def simple_splitting(alpha: ModelPartition, xi: ModelPartition, s: GroupElement) -> ModelPartition:
    """alpha v s.xi for a coarsening xi of alpha."""
    if not refines(alpha, xi):
        raise PartitionError("ξ not a coarsening")
    return join(alpha, translate(s, xi))


@dataclass
class SplittingStep:
    element: GroupElement  # the new f0 added to the window
    via: GroupElement  # s with f0 = s f1 (s or s^{-1} for an edge traversed backwards)
    parent: GroupElement  # f1, already in the window
    partition: ModelPartition


def splitting_chain(
    alpha: ModelPartition,
    beta: ModelPartition,
    F: Iterable[GroupElement],
    S: Sequence[GroupElement],
) -> list[ModelPartition]:
    return [alpha] + [step.partition for step in splitting_steps(alpha, beta, F, S)]


def splitting_steps(alpha, beta, F, S) -> list[SplittingStep]:
    """Grow alpha v beta^F one element at a time along a spanning tree of F.

    Each step joins the current partition with s.(f1 beta), where f1 beta is
    already a coarsening of it, so every step is a simple splitting.
    """
    F = set(F)
    e = alpha.space.owner.identity()
    if e not in F:
        raise PartitionError("F must contain the identity")
    if not refines(alpha, beta):
        raise PartitionError("ξ not a coarsening")
    try:
        tree = cayley_spanning_tree(F, list(S), e)
    except GroupError as exc:
        raise PartitionError(str(exc)) from None
    order = sorted((g for g in tree if tree[g] is not None), key=lambda g: _depth(tree, g))
    steps = []
    current = alpha
    for f0 in order:
        f1, s, direction = tree[f0]
        via = s if direction > 0 else inverse(s)
        xi = translate(f1, beta)
        current = simple_splitting(current, xi, via)
        steps.append(SplittingStep(f0, via, f1, current))
    return steps


def _depth(tree, g) -> tuple:
    d = 0
    node = g
    while tree[node] is not None:
        node = tree[node][0]
        d += 1
    return (d, g.sort_key())


# -- products -------------------------------------------------------------------


def product_partition(alpha: ModelPartition, beta: ModelPartition) -> ModelPartition:
    """alpha x beta on X x Y, atom (i, j) at index i * u_beta + j."""
    space = ProductSpace(alpha.space, beta.space)
    support = (alpha.support, beta.support)
    labels = (alpha.labels[:, None] * beta.u + beta.labels[None, :]).ravel()
    return ModelPartition(space, support, labels, alpha.u * beta.u)


def lift_to_product(alpha: ModelPartition, space: ProductSpace, side: str = "left") -> ModelPartition:
    """The pullback of a partition of one factor along the projection."""
    if side == "left":
        if alpha.space != space.left:
            raise PartitionError("partition is not on the left factor")
        other = trivial_partition(space.right)
        return product_partition(alpha, other)
    if alpha.space != space.right:
        raise PartitionError("partition is not on the right factor")
    return product_partition(trivial_partition(space.left), alpha)
