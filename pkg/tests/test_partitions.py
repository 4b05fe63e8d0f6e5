import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from soficlab import partitions as pt
from soficlab.groups import GroupSpec, ball, inverse, sorted_elements
from soficlab.verify import random_bernoulli_partition, random_weights

Z = GroupSpec.integers()
UNI2 = pt.BernoulliSpace(Z, (0.5, 0.5))
LOG2 = math.log(2)


def canon(space=UNI2):
    return pt.canonical_bernoulli_partition(space)


def at(g, alpha=None):
    return pt.translate(Z.element([g]), alpha or canon())


def test_canonical_measures():
    assert list(pt.atom_measures(canon())) == [0.5, 0.5]
    four = pt.BernoulliSpace(Z, (0.25,) * 4)
    assert list(pt.atom_measures(canon(four))) == [0.25] * 4
    assert list(pt.atom_measures(canon(pt.BernoulliSpace(Z, (0.25, 0.75))))) == [0.25, 0.75]
    with pytest.raises(pt.PartitionError):
        pt.canonical_bernoulli_partition(pt.FiniteGSet.regular(GroupSpec.cyclic(3)))


def test_zero_weights_pruned():
    space = pt.BernoulliSpace(Z, (0.5, 0.0, 0.5))
    assert space.q == 2
    with pytest.raises(pt.PartitionError):
        pt.BernoulliSpace(Z, (0.5, 0.4))


def test_translate_examples():
    a = canon()
    assert pt.same_partition(pt.translate(Z.identity(), a), a)
    moved = at(1)
    assert moved.support == (Z.element([1]),)
    assert list(pt.atom_measures(moved)) == [0.5, 0.5]
    g = Z.element([3])
    assert pt.same_partition(pt.translate(g, pt.translate(inverse(g), a)), a)


def test_translate_follows_shift_law():
    # atom i of g.alpha is g applied to atom i: y in g A iff y(g w) reads like x(w)
    F2 = GroupSpec.free(2)
    space = pt.BernoulliSpace(F2, (0.5, 0.5))
    window = [F2.identity(), F2.element("a")]
    alpha = pt.partition_from_function(space, window, lambda c: c[F2.identity()] ^ c[F2.element("a")], 2)
    g = F2.element("b")
    moved = pt.translate(g, alpha)
    assert set(moved.support) == {F2.element("b"), F2.element("ba")}


def test_join_examples():
    a = canon()
    assert pt.same_partition(pt.join(a, a), a)
    assert pt.equivalent(pt.join(a, pt.trivial_partition(UNI2)), a)
    j = pt.join(a, at(1))
    assert j.u == 4 and list(pt.atom_measures(j)) == [0.25] * 4
    assert pt.refines(j, a) and pt.refines(j, at(1))


def test_windowed_join():
    a = canon()
    assert pt.same_partition(pt.windowed_join(a, [Z.identity()]), a)
    j = pt.windowed_join(a, [Z.element([0]), Z.element([1])])
    assert list(pt.atom_measures(j)) == [0.25] * 4
    big = pt.windowed_join(a, ball(Z, 1))
    assert big.u <= 2**3
    assert pt.refines(big, j)
    with pytest.raises(pt.PartitionError):
        pt.windowed_join(a, [])


def test_coarsen_examples():
    four = canon(pt.BernoulliSpace(Z, (0.25,) * 4))
    assert pt.same_partition(pt.coarsen(four, [0, 1, 2, 3]), four)
    one = pt.coarsen(four, [0, 0, 0, 0])
    assert pt.entropy(one) == 0.0
    halves = pt.coarsen(four, [0, 0, 1, 1])
    assert list(pt.atom_measures(halves)) == [0.5, 0.5]
    assert pt.refines(four, halves)
    with pytest.raises(pt.PartitionError):
        pt.coarsen(four, [0, 0, 2, 2])


def test_refines_direction():
    a, b = canon(), at(1)
    assert pt.refines(a, pt.trivial_partition(UNI2))
    assert not pt.refines(a, pt.join(a, b))
    assert pt.refines(pt.join(a, b), a)


def test_entropy_examples():
    assert pt.entropy(canon()) == pytest.approx(LOG2, abs=1e-15)
    assert pt.entropy(canon(pt.BernoulliSpace(Z, (0.25,) * 4))) == pytest.approx(math.log(4), abs=1e-15)
    assert pt.entropy(pt.trivial_partition(UNI2)) == 0.0


def test_conditional_entropy_examples():
    a, b = canon(), at(1)
    assert pt.conditional_entropy(a, a) == 0.0
    assert pt.conditional_entropy(a, pt.trivial_partition(UNI2)) == pytest.approx(pt.entropy(a), abs=1e-15)
    assert pt.conditional_entropy(a, b) == pytest.approx(LOG2, abs=1e-15)


def test_information_function_examples():
    a, b = canon(pt.BernoulliSpace(Z, (0.25, 0.75))), None
    info = pt.information_function(a, pt.trivial_partition(a.space))
    assert info[(0, 0)] == pytest.approx(-math.log(0.25))
    assert info[(1, 0)] == pytest.approx(-math.log(0.75))
    c = canon()
    assert all(v == 0 for v in pt.information_function(c, pt.join(c, at(1))).values())
    vals = pt.information_function(c, at(1)).values()
    assert len(vals) == 4 and all(v == pytest.approx(LOG2) for v in vals)


def test_rohlin_examples():
    a, b = canon(), at(1)
    assert pt.rohlin_distance(a, a) == 0.0
    assert pt.rohlin_distance(a, b) == pytest.approx(2 * LOG2, abs=1e-15)
    assert pt.rohlin_distance(a, pt.trivial_partition(UNI2)) == pytest.approx(pt.entropy(a), abs=1e-15)


def test_dF_model_examples():
    a = canon(pt.BernoulliSpace(Z, (0.25, 0.75)))
    b = pt.coarsen(a, [1, 0])  # atoms swapped
    assert pt.dF_model(a, a, ball(Z, 1)) == 0.0
    assert pt.dF_model(a, b, [Z.identity()]) == pytest.approx(abs(0.25 - 0.75) * 2)
    u = canon()
    assert pt.dF_model(u, pt.coarsen(u, [1, 0]), [Z.identity()]) == 0.0


def test_simple_splitting_examples():
    a = canon()
    s = Z.element([1])
    assert pt.same_partition(pt.simple_splitting(a, pt.trivial_partition(UNI2), s), a)
    assert pt.equivalent(pt.simple_splitting(a, a, Z.identity()), a)
    split = pt.simple_splitting(a, a, s)
    assert list(pt.atom_measures(split)) == [0.25] * 4
    with pytest.raises(pt.PartitionError, match="not a coarsening"):
        pt.simple_splitting(a, at(1), s)


def test_splitting_chain_examples():
    a = canon()
    S = [Z.element([1])]
    assert len(pt.splitting_chain(a, a, [Z.identity()], S)) == 1
    two = pt.splitting_chain(a, a, [Z.element([0]), Z.element([1])], S)
    assert len(two) == 2 and pt.equivalent(two[1], pt.join(a, at(1)))
    F = [Z.element([k]) for k in range(3)]
    three = pt.splitting_chain(a, a, F, S)
    assert len(three) == 3
    assert pt.equivalent(three[-1], pt.join(a, pt.windowed_join(a, F)))
    for prev, nxt in zip(three, three[1:]):
        assert pt.refines(nxt, prev)
    with pytest.raises(pt.PartitionError):
        pt.splitting_chain(a, a, [Z.element([0]), Z.element([2])], S)
    with pytest.raises(pt.PartitionError):
        pt.splitting_chain(a, a, [Z.element([1])], S)


def test_splitting_chain_backward_edges():
    a = canon()
    S = [Z.element([1])]
    F = [Z.element([k]) for k in (-2, -1, 0, 1)]
    chain = pt.splitting_chain(a, a, F, S)
    assert pt.equivalent(chain[-1], pt.windowed_join(a, F))


def test_product_partition_examples():
    a = canon()
    p = pt.product_partition(a, pt.trivial_partition(UNI2))
    assert list(pt.atom_measures(p)) == [0.5, 0.5]
    q = pt.product_partition(a, canon())
    assert list(pt.atom_measures(q)) == [0.25] * 4
    assert pt.entropy(q) == pytest.approx(2 * LOG2, abs=1e-15)
    with pytest.raises(Exception, match="group mismatch"):
        pt.product_partition(a, canon(pt.BernoulliSpace(GroupSpec.lattice(2), (0.5, 0.5))))


def test_finite_gset_partitions():
    C6 = GroupSpec.cyclic(6)
    space = pt.FiniteGSet.regular(C6)
    alpha = pt.ModelPartition(space, (), np.array([0, 1, 0, 1, 0, 1]), 2)
    assert list(pt.atom_measures(alpha)) == pytest.approx([0.5, 0.5])
    g = C6.generator(0)
    moved = pt.translate(g, alpha)
    assert list(moved.labels) == [1, 0, 1, 0, 1, 0]
    assert pt.same_partition(pt.translate(g, moved), alpha)


def test_json_roundtrip(tmp_path):
    a = pt.join(canon(), at(1))
    path = tmp_path / "p.json"
    a.dump(path)
    b = pt.ModelPartition.load(path)
    assert pt.same_partition(a, b) and b.u == a.u
    obj = a.to_json()
    obj["window"] = obj["window"][::-1]
    # listed out of order: labels are reinterpreted with swapped axes
    c = pt.ModelPartition.from_json(obj)
    assert c.support == a.support


def test_budget():
    space = pt.BernoulliSpace(Z, (0.5, 0.5), budget=2**4)
    with pytest.raises(pt.BudgetError):
        pt.windowed_join(pt.canonical_bernoulli_partition(space), ball(Z, 3))


# ---------------------------------------------------------------------------
# properties on random instances


@st.composite
def bernoulli_family(draw, n=3):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    spec = GroupSpec.integers() if rng.random() < 0.5 else GroupSpec.lattice(2)
    space = pt.BernoulliSpace(spec, random_weights(rng, int(rng.integers(2, 4))))
    parts = [random_bernoulli_partition(rng, space, max_u=3) for _ in range(n)]
    g = sorted_elements(ball(spec, 2))[int(rng.integers(0, len(ball(spec, 2))))]
    return parts, g


@given(bernoulli_family())
def test_measures_match_oracle(fam):
    (a, b, _), _ = fam
    assert np.allclose(pt.atom_measures(a), oracles.atom_measures(a), atol=1e-12)
    assert math.fsum(pt.atom_measures(a)) == pytest.approx(1.0, abs=1e-12)


@given(bernoulli_family())
def test_chain_rule_and_bounds(fam):
    (a, b, _), _ = fam
    assert abs(pt.entropy(pt.join(a, b)) - pt.entropy(a) - pt.conditional_entropy(b, a)) <= 1e-12
    assert -1e-12 <= pt.entropy(a) <= math.log(a.u) + 1e-12
    ps = pt.atom_measures(a)
    assert pt.entropy(a) == pytest.approx(oracles.shannon(ps), abs=1e-12)


@given(bernoulli_family())
def test_monotone_conditioning(fam):
    (a, b, c), _ = fam
    coarse, fine = b, pt.join(b, c)
    assert pt.conditional_entropy(a, fine) <= pt.conditional_entropy(a, coarse) + 1e-12


@given(bernoulli_family())
def test_rohlin_axioms(fam):
    (a, b, c), g = fam
    assert pt.rohlin_distance(a, b) == pt.rohlin_distance(b, a)
    assert pt.rohlin_distance(a, c) <= pt.rohlin_distance(a, b) + pt.rohlin_distance(b, c) + 1e-9
    assert pt.rohlin_distance(pt.translate(g, a), pt.translate(g, b)) == pt.rohlin_distance(a, b)
    assert pt.rohlin_distance(a, a) == 0.0
    info = pt.information_function(a, b)
    P = {k: v for k, v in info.items()}
    assert pt.conditional_entropy(a, b) >= 0 and len(P) > 0


@given(bernoulli_family(n=4))
def test_join_continuity(fam):
    (a, b, a2, b2), _ = fam
    lhs = pt.rohlin_distance(pt.join(a, b), pt.join(a2, b2))
    assert lhs <= pt.rohlin_distance(a, a2) + pt.rohlin_distance(b, b2) + 1e-9


@given(bernoulli_family())
def test_distance_zero_iff_equivalent(fam):
    (a, b, _), _ = fam
    assert (pt.rohlin_distance(a, b) < 1e-12) == pt.equivalent(a, b)
    assert pt.equivalent(a, pt.join(a, a))


@given(bernoulli_family(n=1))
def test_windowed_join_nesting_and_splitting_sandwich(fam):
    (a,), s = fam
    spec = a.space.owner
    F1 = [spec.identity()]
    F2 = sorted_elements(ball(spec, 1))
    assert pt.refines(pt.windowed_join(a, F2), pt.windowed_join(a, F1))
    xi = pt.coarsen(a, [0] * a.u)
    split = pt.simple_splitting(a, a, s)
    assert pt.refines(split, a)
    assert pt.refines(pt.windowed_join(a, [spec.identity(), s]), split)
    assert pt.same_partition(pt.simple_splitting(a, xi, s), pt.join(a, pt.translate(s, xi)))


@given(bernoulli_family(n=1))
def test_pattern_measures_match_oracle(fam):
    (a,), g = fam
    spec = a.space.owner
    F = sorted_elements({spec.identity(), g})
    mu = pt.pattern_measures(a, F)
    ref = oracles.model_pattern_measures(a, F, a.u)
    for phi, p in ref.items():
        code = sum(x * a.u**k for k, x in enumerate(phi))
        assert mu[code] == pytest.approx(p, abs=1e-12)
    assert math.fsum(mu) == pytest.approx(1.0, abs=1e-12)


@given(bernoulli_family(n=2))
def test_product_entropy_additive(fam):
    (a, b), _ = fam
    p = pt.product_partition(a, b)
    assert abs(pt.entropy(p) - pt.entropy(a) - pt.entropy(b)) <= 1e-12
