"""Maps from a group into finite symmetric groups, and their good sets.

Permutations are dense integer arrays ``p`` with ``p[v]`` the image of point
``v`` (0-based); composition ``(p o q)[v] = p[q[v]]`` is an array gather.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .groups import (
    GroupElement,
    GroupError,
    GroupSpec,
    ball,
    inverse,
    multiply,
    sorted_elements,
)

Evaluator = Callable[[GroupElement], np.ndarray]


class SoficError(ValueError):
    pass


class UndefinedElement(SoficError):
    def __init__(self, g: GroupElement):
        super().__init__(f"σ undefined at {g.encode()!r}")
        self.element = g


class SymMap:
    """A map sigma: G -> Sym(m), not assumed to be a homomorphism.

    Images are cached in ``table``; ``evaluator`` (optional) produces images
    for elements not yet cached. ``kind`` records which construction built
    the map ("homomorphism", "folner", "word", "table").
    """

    def __init__(
        self,
        m: int,
        owner: GroupSpec,
        table: dict[GroupElement, np.ndarray] | None = None,
        evaluator: Evaluator | None = None,
        kind: str = "table",
        name: str = "",
    ):
        if m < 1:
            raise SoficError("degree must be >= 1")
        self.m = m
        self.owner = owner
        self.evaluator = evaluator
        self.kind = kind
        self.name = name
        self.table: dict[GroupElement, np.ndarray] = {}
        self._frozen = False
        for g, p in (table or {}).items():
            self._store(g, np.asarray(p, dtype=np.int64))

    def _store(self, g: GroupElement, p: np.ndarray) -> np.ndarray:
        if g.owner != self.owner:
            raise GroupError("group mismatch")
        if p.shape != (self.m,) or not _is_bijection(p):
            raise SoficError(f"image of {g.encode()!r} is not a permutation of {self.m} points")
        p = p.copy()
        p.setflags(write=False)
        self.table[g] = p
        return p

    def __call__(self, g: GroupElement) -> np.ndarray:
        p = self.table.get(g)
        if p is not None:
            return p
        if self.evaluator is None or self._frozen:
            raise UndefinedElement(g)
        return self._store(g, np.asarray(self.evaluator(g), dtype=np.int64))

    def defined_at(self, g: GroupElement) -> bool:
        if g in self.table:
            return True
        return self.evaluator is not None and not self._frozen

    def extend(self, support: Iterable[GroupElement]) -> SymMap:
        for g in support:
            self(g)
        return self

    def freeze(self, support: Iterable[GroupElement] = ()) -> SymMap:
        """Cache images on ``support`` and drop the evaluator."""
        self.extend(support)
        self._frozen = True
        return self

    def inverse_images(self, F: Sequence[GroupElement]) -> np.ndarray:
        """Stacked inverse permutations of sigma(f), one row per f in F."""
        out = np.empty((len(F), self.m), dtype=np.int64)
        for k, f in enumerate(F):
            out[k, self(f)] = np.arange(self.m)
        return out

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        entries = [
            {"element": g.encode(), "image": (self.table[g] + 1).tolist()}
            for g in sorted_elements(self.table)
        ]
        return {"m": self.m, "group": self.owner.to_json(), "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> SymMap:
        spec = GroupSpec.from_json(obj["group"])
        m = int(obj["m"])
        table = {}
        for entry in obj["entries"]:
            img = np.asarray(entry["image"], dtype=np.int64) - 1
            table[spec.element(entry["element"])] = img
        return cls(m, spec, table, kind="table")

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path) -> SymMap:
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def __repr__(self):
        return f"SymMap(m={self.m}, group={self.owner}, kind={self.kind}, cached={len(self.table)})"


def _is_bijection(p: np.ndarray) -> bool:
    if p.size == 0:
        return True
    if p.min() < 0 or p.max() >= p.size:
        return False
    seen = np.zeros(p.size, dtype=bool)
    seen[p] = True
    return bool(seen.all())


@dataclass(frozen=True)
class ApproxReport:
    F: tuple[GroupElement, ...]
    m: int
    good_set: tuple[int, ...]
    epsilon: float

    def to_json(self) -> dict:
        return {
            "F": [g.encode() for g in self.F],
            "m": self.m,
            "good_set": [v + 1 for v in self.good_set],
            "epsilon": self.epsilon,
        }


def good_set(sigma: SymMap, F: Iterable[GroupElement]) -> ApproxReport:
    """Points v where sigma respects products over F and separates F."""
    F = sorted_elements(set(F))
    m = sigma.m
    images = {f: sigma(f) for f in F}
    ok = np.ones(m, dtype=bool)
    for f1, f2 in itertools.product(F, F):
        prod = sigma(multiply(f1, f2))
        ok &= images[f1][images[f2]] == prod
    for i, f1 in enumerate(F):
        for f2 in F[i + 1 :]:
            ok &= images[f1] != images[f2]
    good = tuple(int(v) for v in np.flatnonzero(ok))
    return ApproxReport(tuple(F), m, good, 1.0 - len(good) / m)


# ---------------------------------------------------------------------------
# builders


def _regular_tables(spec: GroupSpec):
    elems = spec.elements()
    index = {g: i for i, g in enumerate(elems)}

    def act(g: GroupElement) -> np.ndarray:
        return np.array([index[multiply(g, h)] for h in elems], dtype=np.int64)

    return len(elems), act


def _quotient_action(spec: GroupSpec, n: int):
    """Degree and evaluator for the action of ``spec`` on a finite quotient."""
    kind = spec.kind
    if kind == "integers":
        base = np.arange(n, dtype=np.int64)
        return n, lambda g: (base + g.nf[0]) % n
    if kind == "lattice":
        d = spec.params[0]
        coords = np.indices((n,) * d).reshape(d, -1)
        strides = n ** np.arange(d - 1, -1, -1, dtype=np.int64)

        def act(g):
            shifted = (coords + np.asarray(g.nf, dtype=np.int64)[:, None]) % n
            return strides @ shifted

        return n**d, act
    if spec.is_finite and kind != "product":
        return _regular_tables(spec)
    if kind == "product":
        parts = [_quotient_action(c, n) for c in spec.params]
        sizes = [p[0] for p in parts]
        total = int(np.prod(sizes))
        grid = np.indices(sizes).reshape(len(sizes), -1)
        strides = np.array([int(np.prod(sizes[i + 1 :])) for i in range(len(sizes))], dtype=np.int64)

        def act(g):
            cols = [parts[i][1](GroupElement(c, x))[grid[i]] for i, (c, x) in enumerate(zip(spec.params, g.nf))]
            return strides @ np.stack(cols)

        return total, act
    raise SoficError(f"no finite quotient construction for {spec}")


def build_quotient_approx(spec: GroupSpec, quotient_schedule: Sequence[int]) -> list[SymMap]:
    """Homomorphisms onto the action on finite quotients.

    Z -> Z/n, Z^d -> (Z/n)^d; finite kinds act regularly on themselves (the
    schedule entry is then ignored); products combine their factors.
    """
    if spec.kind == "free":
        raise SoficError(f"no finite quotient construction for {spec}")
    out: list[SymMap] = []
    for n in quotient_schedule:
        if n < 1:
            raise SoficError("quotient sizes must be >= 1")
        m, act = _quotient_action(spec, int(n))
        if out and m <= out[-1].m:
            raise SoficError("quotient degrees must be strictly increasing")
        out.append(SymMap(m, spec, evaluator=act, kind="homomorphism", name=f"quotient-{n}"))
    return out


def folner_window(spec: GroupSpec, n: int) -> list[GroupElement]:
    """The box window of side n, listed in lexicographic coordinate order."""
    kind = spec.kind
    if kind == "integers":
        return [GroupElement(spec, (k,)) for k in range(n)]
    if kind == "lattice":
        d = spec.params[0]
        return [GroupElement(spec, t) for t in itertools.product(range(n), repeat=d)]
    if kind in ("cyclic", "symmetric"):
        return spec.elements()
    if kind == "product":
        comps = [folner_window(c, n) for c in spec.params]
        return [GroupElement(spec, tuple(x.nf for x in t)) for t in itertools.product(*comps)]
    raise SoficError("no Følner schedule")


def build_folner_approx(spec: GroupSpec, window_schedule: Sequence[int]) -> list[SymMap]:
    """sigma(g) f = g f inside the window, completed to a bijection in reversed order."""
    if not spec.is_amenable:
        raise SoficError("no Følner schedule")
    out = []
    for n in window_schedule:
        window = folner_window(spec, int(n))
        index = {g: i for i, g in enumerate(window)}
        m = len(window)
        if out and m <= out[-1].m:
            raise SoficError("window sizes must be strictly increasing")

        def act(g, window=window, index=index, m=m):
            img = np.full(m, -1, dtype=np.int64)
            hit = np.zeros(m, dtype=bool)
            for i, f in enumerate(window):
                j = index.get(multiply(g, f))
                if j is not None:
                    img[i] = j
                    hit[j] = True
            # leftover sources ascending meet leftover targets descending; the
            # sorted pairing would rebuild the cyclic shift on Z and hide the boundary
            sources = np.flatnonzero(img < 0)
            targets = np.flatnonzero(~hit)[::-1]
            img[sources] = targets
            return img

        out.append(SymMap(m, spec, evaluator=act, kind="folner", name=f"folner-{n}"))
    return out


def word_evaluator(spec: GroupSpec, generator_images: Sequence[np.ndarray], m: int) -> Evaluator:
    """Extend generator images to reduced words by composition."""
    gens = [np.asarray(p, dtype=np.int64) for p in generator_images]
    invs = []
    for p in gens:
        q = np.empty_like(p)
        q[p] = np.arange(m)
        invs.append(q)

    def act(g: GroupElement) -> np.ndarray:
        r = np.arange(m, dtype=np.int64)
        for letter in reversed(g.nf):
            r = (gens[letter - 1] if letter > 0 else invs[-letter - 1])[r]
        return r

    return act


def build_random_free_approx(spec: GroupSpec, m: int, seed: int) -> SymMap:
    """Independent uniform random permutations on the free generators."""
    if spec.kind != "free":
        raise SoficError("random permutation model needs a free group")
    if m < 1:
        raise SoficError("degree must be >= 1")
    rng = np.random.default_rng(seed)
    gens = [rng.permutation(m) for _ in range(spec.params[0])]
    sigma = SymMap(m, spec, evaluator=word_evaluator(spec, gens, m), kind="word",
                   name=f"random-free-m{m}-s{seed}")
    for g, p in zip(spec.generator_elements(), gens):
        sigma._store(g, p)
    return sigma


# ---------------------------------------------------------------------------
# automorphisms


class Automorphism:
    """An automorphism of a built-in group, given by a small JSON descriptor.

    Supported: ``identity``; ``negation`` (abelian kinds); ``permute_generators``
    (free groups and lattices, ``perm[i]`` is the image index of generator i);
    ``invert_generator`` (free groups and lattices); ``conjugate`` (symmetric
    groups, ``by`` a permutation).
    """

    def __init__(self, spec: GroupSpec, descriptor: dict):
        self.spec = spec
        self.descriptor = dict(descriptor)
        kind = descriptor.get("type")
        if kind == "identity":
            self._fn = lambda nf: nf
        elif kind == "negation":
            if not spec.is_abelian:
                raise SoficError("descriptor is not an automorphism: negation of a nonabelian group")
            self._fn = lambda nf: inverse(GroupElement(spec, nf)).nf
        elif kind in ("permute_generators", "invert_generator"):
            self._fn = self._generator_map(kind, descriptor)
        elif kind == "conjugate":
            if spec.kind != "symmetric":
                raise SoficError("descriptor is not an automorphism: conjugation needs S_n")
            c = GroupElement(spec, tuple(descriptor["by"]))
            ci = inverse(c)
            self._fn = lambda nf: multiply(multiply(c, GroupElement(spec, nf)), ci).nf
        else:
            raise SoficError(f"descriptor is not an automorphism: {descriptor!r}")

    def _generator_map(self, kind: str, d: dict):
        spec = self.spec
        if spec.kind not in ("free", "lattice", "integers"):
            raise SoficError(f"descriptor is not an automorphism of {spec}")
        rank = 1 if spec.kind == "integers" else spec.params[0]
        if kind == "permute_generators":
            perm = [int(x) for x in d["perm"]]
            if sorted(perm) != list(range(rank)):
                raise SoficError("descriptor is not an automorphism: perm is not a bijection")
            signs = [1] * rank
        else:
            idx = int(d["index"])
            if not 0 <= idx < rank:
                raise SoficError("descriptor is not an automorphism: bad generator index")
            perm = list(range(rank))
            signs = [-1 if i == idx else 1 for i in range(rank)]
        if spec.kind == "free":
            def fn(nf):
                letters = tuple(
                    (1 if x > 0 else -1) * signs[abs(x) - 1] * (perm[abs(x) - 1] + 1) for x in nf
                )
                return multiply(spec.identity(), GroupElement(spec, letters)).nf
        else:
            def fn(nf):
                out = [0] * rank
                for i, x in enumerate(nf):
                    out[perm[i]] = signs[i] * x
                return tuple(out)
        return fn

    def __call__(self, g: GroupElement) -> GroupElement:
        if g.owner != self.spec:
            raise GroupError("group mismatch")
        return GroupElement(self.spec, self._fn(g.nf))

    def preimage(self, g: GroupElement) -> GroupElement:
        """a^{-1}(g)."""
        kind = self.descriptor["type"]
        if kind in ("identity", "negation"):
            return self(g)
        if kind == "invert_generator":
            return self(g)
        if kind == "conjugate":
            c = GroupElement(self.spec, tuple(self.descriptor["by"]))
            return multiply(multiply(inverse(c), g), c)
        perm = [int(x) for x in self.descriptor["perm"]]
        inv = [0] * len(perm)
        for i, j in enumerate(perm):
            inv[j] = i
        return Automorphism(self.spec, {"type": "permute_generators", "perm": inv})(g)


def compose_with_automorphism(sigma: SymMap, a: Automorphism | dict) -> SymMap:
    """sigma o a, i.e. g -> sigma(a(g))."""
    if isinstance(a, dict):
        a = Automorphism(sigma.owner, a)
    if a.spec != sigma.owner:
        raise GroupError("group mismatch")
    return SymMap(sigma.m, sigma.owner, evaluator=lambda g: sigma(a(g)), kind=sigma.kind,
                  name=f"{sigma.name}∘{a.descriptor['type']}")


def certify(sigma: SymMap, radius: int) -> ApproxReport:
    return good_set(sigma, ball(sigma.owner, radius))
