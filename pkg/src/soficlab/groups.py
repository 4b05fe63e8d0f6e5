"""Concrete countable groups with exact normal forms.

Elements are immutable values keyed by a canonical encoding, so they can be
used directly as dictionary keys in permutation tables and window indices.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

KINDS = ("integers", "lattice", "free", "cyclic", "symmetric", "product")


class GroupError(ValueError):
    """Raised for malformed group specs and mismatched owners."""


@dataclass(frozen=True)
class GroupSpec:
    """One of the built-in group kinds.

    ``params`` is ``()`` for the integers, ``(d,)`` for the lattice Z^d,
    ``(k,)`` for the free group of rank k, ``(n,)`` for Z/n and S_n, and a
    tuple of component specs for direct products.
    """

    kind: str
    params: tuple = ()
    generators: tuple[str, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GroupError(f"unknown group kind {self.kind!r}")
        if self.kind == "product":
            if not self.params or not all(isinstance(p, GroupSpec) for p in self.params):
                raise GroupError("product needs a nonempty list of GroupSpec")
            gens = tuple(
                f"{i}:{g}" for i, comp in enumerate(self.params) for g in comp.generators
            )
        elif self.kind == "integers":
            if self.params != ():
                raise GroupError("integers take no parameters")
            gens = ("t",)
        else:
            if len(self.params) != 1 or not isinstance(self.params[0], int):
                raise GroupError(f"{self.kind} takes a single integer parameter")
            n = self.params[0]
            if n < 1:
                raise GroupError(f"{self.kind} parameter must be >= 1, got {n}")
            if self.kind == "lattice":
                gens = tuple(f"e{i + 1}" for i in range(n))
            elif self.kind == "free":
                if n > 26:
                    raise GroupError("free groups of rank > 26 are not supported")
                gens = tuple(string.ascii_lowercase[:n])
            elif self.kind == "cyclic":
                gens = ("r",)
            else:
                gens = tuple(f"s{i}" for i in range(1, n)) or ("id",)
        object.__setattr__(self, "generators", gens)

    # -- constructors -----------------------------------------------------
    @classmethod
    def integers(cls) -> GroupSpec:
        return cls("integers")

    @classmethod
    def lattice(cls, d: int) -> GroupSpec:
        return cls("lattice", (d,))

    @classmethod
    def free(cls, rank: int) -> GroupSpec:
        return cls("free", (rank,))

    @classmethod
    def cyclic(cls, n: int) -> GroupSpec:
        return cls("cyclic", (n,))

    @classmethod
    def symmetric(cls, n: int) -> GroupSpec:
        return cls("symmetric", (n,))

    @classmethod
    def product(cls, *components: GroupSpec) -> GroupSpec:
        return cls("product", tuple(components))

    # -- structure --------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        if self.kind == "product":
            return all(c.is_finite for c in self.params)
        return self.kind in ("cyclic", "symmetric")

    @property
    def is_abelian(self) -> bool:
        if self.kind == "product":
            return all(c.is_abelian for c in self.params)
        if self.kind == "free":
            return self.params[0] == 1
        if self.kind == "symmetric":
            return self.params[0] <= 2
        return True

    @property
    def is_amenable(self) -> bool:
        if self.kind == "product":
            return all(c.is_amenable for c in self.params)
        return not (self.kind == "free" and self.params[0] >= 2)

    def order(self) -> int:
        if self.kind == "cyclic":
            return self.params[0]
        if self.kind == "symmetric":
            n = 1
            for i in range(2, self.params[0] + 1):
                n *= i
            return n
        if self.kind == "product":
            n = 1
            for c in self.params:
                n *= c.order()
            return n
        raise GroupError(f"{self.kind} is infinite")

    def identity(self) -> GroupElement:
        return GroupElement(self, _identity_nf(self))

    def generator(self, index: int) -> GroupElement:
        return self.generator_elements()[index]

    def generator_elements(self) -> tuple[GroupElement, ...]:
        return tuple(GroupElement(self, nf) for nf in _generator_nfs(self))

    def element(self, encoding) -> GroupElement:
        """Build an element from its JSON encoding (see :meth:`GroupElement.encode`)."""
        return GroupElement(self, _decode(self, encoding))

    def elements(self) -> list[GroupElement]:
        """All elements of a finite group, in canonical order."""
        if not self.is_finite:
            raise GroupError(f"{self.kind} is infinite")
        return [GroupElement(self, nf) for nf in _all_nfs(self)]

    def to_json(self) -> dict:
        if self.kind == "product":
            return {"kind": "product", "params": [c.to_json() for c in self.params]}
        if self.kind == "integers":
            return {"kind": "integers", "params": {}}
        key = {"lattice": "d", "free": "rank", "cyclic": "n", "symmetric": "n"}[self.kind]
        return {"kind": self.kind, "params": {key: self.params[0]}}

    @classmethod
    def from_json(cls, obj: dict) -> GroupSpec:
        kind = obj.get("kind")
        params = obj.get("params", {})
        if kind == "product":
            return cls.product(*(cls.from_json(p) for p in params))
        if kind == "integers":
            return cls.integers()
        if kind in ("lattice", "free", "cyclic", "symmetric"):
            if isinstance(params, dict):
                (value,) = params.values()
            elif isinstance(params, (list, tuple)):
                (value,) = params
            else:
                value = params
            return cls(kind, (int(value),))
        raise GroupError(f"unknown group kind {kind!r}")

    def __str__(self):
        if self.kind == "product":
            return " x ".join(str(c) for c in self.params)
        names = {
            "integers": "Z",
            "lattice": "Z^{}",
            "free": "F{}",
            "cyclic": "Z/{}",
            "symmetric": "S{}",
        }
        return names[self.kind].format(*self.params)


@dataclass(frozen=True, eq=True)
class GroupElement:
    owner: GroupSpec
    nf: tuple

    def __mul__(self, other: GroupElement) -> GroupElement:
        return multiply(self, other)

    def __invert__(self) -> GroupElement:
        return inverse(self)

    def __lt__(self, other: GroupElement) -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple:
        return (word_length_hint(self), self.nf)

    @property
    def is_identity(self) -> bool:
        return self.nf == _identity_nf(self.owner)

    def encode(self):
        """JSON-friendly encoding: a string word for free groups, else integer arrays."""
        return _encode(self.owner, self.nf)

    def __repr__(self):
        return f"<{self.owner} {self.encode()!r}>"


# ---------------------------------------------------------------------------
# normal forms per kind


def _identity_nf(spec: GroupSpec) -> tuple:
    k = spec.kind
    if k == "integers":
        return (0,)
    if k == "lattice":
        return (0,) * spec.params[0]
    if k == "free":
        return ()
    if k == "cyclic":
        return (0,)
    if k == "symmetric":
        return tuple(range(spec.params[0]))
    return tuple(_identity_nf(c) for c in spec.params)


def _generator_nfs(spec: GroupSpec) -> list[tuple]:
    k = spec.kind
    if k == "integers":
        return [(1,)]
    if k == "lattice":
        d = spec.params[0]
        return [tuple(int(i == j) for j in range(d)) for i in range(d)]
    if k == "free":
        return [(i + 1,) for i in range(spec.params[0])]
    if k == "cyclic":
        n = spec.params[0]
        return [(1 % n,)]
    if k == "symmetric":
        n = spec.params[0]
        if n == 1:
            return [(0,)]
        out = []
        for i in range(n - 1):
            p = list(range(n))
            p[i], p[i + 1] = p[i + 1], p[i]
            out.append(tuple(p))
        return out
    out = []
    ident = [_identity_nf(c) for c in spec.params]
    for i, comp in enumerate(spec.params):
        for g in _generator_nfs(comp):
            nf = list(ident)
            nf[i] = g
            out.append(tuple(nf))
    return out


def _mul_nf(spec: GroupSpec, a: tuple, b: tuple) -> tuple:
    k = spec.kind
    if k in ("integers", "lattice"):
        return tuple(x + y for x, y in zip(a, b))
    if k == "cyclic":
        return ((a[0] + b[0]) % spec.params[0],)
    if k == "symmetric":
        # (gh)(i) = g(h(i))
        return tuple(a[j] for j in b)
    if k == "free":
        word = list(a)
        for letter in b:
            if word and word[-1] == -letter:
                word.pop()
            else:
                word.append(letter)
        return tuple(word)
    return tuple(_mul_nf(c, x, y) for c, x, y in zip(spec.params, a, b))


def _inv_nf(spec: GroupSpec, a: tuple) -> tuple:
    k = spec.kind
    if k in ("integers", "lattice"):
        return tuple(-x for x in a)
    if k == "cyclic":
        return ((-a[0]) % spec.params[0],)
    if k == "symmetric":
        inv = [0] * len(a)
        for i, j in enumerate(a):
            inv[j] = i
        return tuple(inv)
    if k == "free":
        return tuple(-x for x in reversed(a))
    return tuple(_inv_nf(c, x) for c, x in zip(spec.params, a))


def _all_nfs(spec: GroupSpec) -> list[tuple]:
    k = spec.kind
    if k == "cyclic":
        return [(r,) for r in range(spec.params[0])]
    if k == "symmetric":
        return [tuple(p) for p in itertools.permutations(range(spec.params[0]))]
    if k == "product":
        return [tuple(t) for t in itertools.product(*(_all_nfs(c) for c in spec.params))]
    raise GroupError(f"{k} is infinite")


def _encode(spec: GroupSpec, nf: tuple):
    k = spec.kind
    if k == "free":
        return "".join(
            string.ascii_lowercase[x - 1] if x > 0 else string.ascii_uppercase[-x - 1]
            for x in nf
        )
    if k == "product":
        return [_encode(c, x) for c, x in zip(spec.params, nf)]
    return list(nf)


def _decode(spec: GroupSpec, enc) -> tuple:
    k = spec.kind
    if k == "free":
        if not isinstance(enc, str):
            raise GroupError(f"free group elements encode as strings, got {enc!r}")
        rank = spec.params[0]
        letters = []
        for ch in enc:
            if ch in string.ascii_lowercase[:rank]:
                letters.append(string.ascii_lowercase.index(ch) + 1)
            elif ch in string.ascii_uppercase[:rank]:
                letters.append(-(string.ascii_uppercase.index(ch) + 1))
            else:
                raise GroupError(f"letter {ch!r} not in free group of rank {rank}")
        return _mul_nf(spec, (), tuple(letters))
    if k == "product":
        if len(enc) != len(spec.params):
            raise GroupError("product encoding has wrong arity")
        return tuple(_decode(c, e) for c, e in zip(spec.params, enc))
    if isinstance(enc, int):
        enc = [enc]
    nf = tuple(int(x) for x in enc)
    if k == "integers" and len(nf) != 1:
        raise GroupError("integers encode as a single integer")
    if k == "lattice" and len(nf) != spec.params[0]:
        raise GroupError(f"lattice element needs {spec.params[0]} coordinates")
    if k == "cyclic":
        if len(nf) != 1:
            raise GroupError("cyclic elements encode as a single residue")
        nf = (nf[0] % spec.params[0],)
    if k == "symmetric" and sorted(nf) != list(range(spec.params[0])):
        raise GroupError(f"{list(nf)} is not a permutation of 0..{spec.params[0] - 1}")
    return nf


def word_length_hint(g: GroupElement) -> int:
    """Cheap size measure used only for ordering (exact word length for Z, Z^d, F_k)."""
    spec, nf = g.owner, g.nf
    if spec.kind in ("integers", "lattice"):
        return sum(abs(x) for x in nf)
    if spec.kind == "free":
        return len(nf)
    if spec.kind == "cyclic":
        n = spec.params[0]
        return min(nf[0], n - nf[0])
    if spec.kind == "symmetric":
        return sum(1 for i, j in enumerate(nf) if i != j)
    return sum(word_length_hint(GroupElement(c, x)) for c, x in zip(spec.params, nf))


# ---------------------------------------------------------------------------
# public operations


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.owner != h.owner:
        raise GroupError("group mismatch")
    return GroupElement(g.owner, _mul_nf(g.owner, g.nf, h.nf))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.owner, _inv_nf(g.owner, g.nf))


def ball(spec: GroupSpec, radius: int) -> frozenset[GroupElement]:
    """Elements of word length <= radius in the generators and their inverses."""
    if radius < 0:
        raise GroupError("radius must be nonnegative")
    steps = []
    for g in spec.generator_elements():
        steps.append(g)
        steps.append(inverse(g))
    seen = {spec.identity()}
    frontier = [spec.identity()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for s in steps:
                x = multiply(w, s)
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
        if not frontier:
            break
    return frozenset(seen)


def product_set(A: Iterable[GroupElement], B: Iterable[GroupElement]) -> frozenset[GroupElement]:
    B = list(B)
    return frozenset(multiply(a, b) for a in A for b in B)


def sorted_elements(elements: Iterable[GroupElement]) -> list[GroupElement]:
    return sorted(elements, key=GroupElement.sort_key)


def is_connected(F: Iterable[GroupElement], S: Sequence[GroupElement]) -> bool:
    """Whether F induces a connected subgraph of the left-Cayley graph g -> s g."""
    F = set(F)
    if not F:
        return False
    start = next(iter(F))
    return len(_cayley_tree(F, S, start)) == len(F)


def _cayley_tree(F: set, S: Sequence[GroupElement], root: GroupElement) -> dict:
    """BFS tree of the undirected induced left-Cayley graph: child -> (parent, s, direction)."""
    tree = {root: None}
    queue = [root]
    while queue:
        nxt = []
        for g in queue:
            for s in S:
                fwd = multiply(s, g)
                if fwd in F and fwd not in tree:
                    tree[fwd] = (g, s, +1)
                    nxt.append(fwd)
                back = multiply(inverse(s), g)
                if back in F and back not in tree:
                    tree[back] = (g, s, -1)
                    nxt.append(back)
        queue = nxt
    return tree


def cayley_spanning_tree(F: Iterable[GroupElement], S: Sequence[GroupElement], root: GroupElement) -> dict:
    F = set(F)
    if root not in F:
        raise GroupError("root not in F")
    tree = _cayley_tree(F, S, root)
    if len(tree) != len(F):
        raise GroupError("F is not S-connected")
    return tree
