import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from soficlab.groups import GroupSpec, ball, multiply, sorted_elements
from soficlab.sofic import (
    Automorphism,
    SoficError,
    SymMap,
    UndefinedElement,
    build_folner_approx,
    build_quotient_approx,
    build_random_free_approx,
    certify,
    compose_with_automorphism,
    good_set,
)

Z = GroupSpec.integers()
F2 = GroupSpec.free(2)


def brute_good_set(sigma, F):
    """Good-set membership point by point with explicit composition."""
    good = []
    for v in range(sigma.m):
        ok = True
        for f1 in F:
            for f2 in F:
                if sigma(f1)[sigma(f2)[v]] != sigma(multiply(f1, f2))[v]:
                    ok = False
                if f1 != f2 and sigma(f1)[v] == sigma(f2)[v]:
                    ok = False
        if ok:
            good.append(v)
    return good


def test_rotations_are_exact():
    sigma = build_quotient_approx(Z, [8])[0]
    rep = good_set(sigma, [Z.element([k]) for k in (-1, 0, 1)])
    assert rep.good_set == tuple(range(8)) and rep.epsilon == 0.0
    assert list(sigma(Z.element([1]))) == [1, 2, 3, 4, 5, 6, 7, 0]


def test_identity_only_set():
    s = build_random_free_approx(F2, 30, 3)
    assert good_set(s, [F2.identity()]).epsilon == 0.0


def test_random_free_bounds_and_determinism():
    a = build_random_free_approx(F2, 50, 11)
    b = build_random_free_approx(F2, 50, 11)
    rep = good_set(a, ball(F2, 1))
    assert 0.0 <= rep.epsilon <= 1.0
    b.extend(a.table)
    assert a.to_json() == b.to_json()


def test_degree_one_free():
    s = build_random_free_approx(F2, 1, 0)
    assert good_set(s, ball(F2, 1)).epsilon == 1.0


def test_random_free_mean_quality():
    eps = [good_set(build_random_free_approx(F2, 100, seed), ball(F2, 1)).epsilon for seed in range(50)]
    assert np.mean(eps) < 0.2


def test_quotient_degrees():
    assert [s.m for s in build_quotient_approx(Z, [4, 8, 16])] == [4, 8, 16]
    assert [s.m for s in build_quotient_approx(GroupSpec.lattice(2), [3, 5])] == [9, 25]
    with pytest.raises(SoficError):
        build_quotient_approx(Z, [8, 8])
    with pytest.raises(SoficError):
        build_quotient_approx(F2, [4])


@pytest.mark.parametrize("r", [1, 2, 3])
def test_quotient_exact_on_balls(r):
    for s in build_quotient_approx(Z, [2 * r + 1, 2 * r + 5]):
        assert certify(s, r).epsilon == 0.0
    s = build_quotient_approx(GroupSpec.lattice(2), [2 * r + 1])[0]
    assert certify(s, r).epsilon == 0.0


def test_folner_examples():
    s8 = build_folner_approx(Z, [8])[0]
    assert list(s8(Z.element([1]))) == [1, 2, 3, 4, 5, 6, 7, 0]
    assert len(good_set(s8, [Z.element([1])]).good_set) >= 8 - 2
    assert build_folner_approx(GroupSpec.lattice(2), [4])[0].m == 16
    with pytest.raises(SoficError, match="no Følner schedule"):
        build_folner_approx(F2, [4])


def test_folner_quality_decreases():
    eps = [certify(s, 2).epsilon for s in build_folner_approx(Z, [8, 16, 32, 64])]
    assert all(b < a for a, b in zip(eps, eps[1:]))
    # a fixed number of boundary points fails: eps * m stays constant
    sizes = [8, 16, 32, 64]
    assert len({round(e * m) for e, m in zip(eps[1:], sizes[1:])}) == 1


def test_folner_respects_window_translation():
    s = build_folner_approx(Z, [10])[0]
    for k in range(-3, 4):
        p = s(Z.element([k]))
        for f in range(10):
            if 0 <= f + k < 10:
                assert p[f] == f + k


def test_undefined_and_roundtrip(tmp_path):
    s = build_quotient_approx(Z, [6])[0]
    s.freeze(ball(Z, 1))
    with pytest.raises(UndefinedElement, match="undefined"):
        s(Z.element([2]))
    path = tmp_path / "s.json"
    s.dump(path)
    t = SymMap.load(path)
    assert t.to_json() == s.to_json()
    assert min(min(e["image"]) for e in s.to_json()["entries"]) == 1


def test_report_is_one_based_and_reproducible():
    s = build_folner_approx(Z, [8])[0]
    a = certify(s, 1).to_json()
    b = certify(s, 1).to_json()
    assert a == b and all(v >= 1 for v in a["good_set"])


def test_automorphisms():
    s = build_quotient_approx(Z, [8])[0]
    assert list(compose_with_automorphism(s, {"type": "identity"})(Z.element([3]))) == list(s(Z.element([3])))
    neg = compose_with_automorphism(s, {"type": "negation"})
    assert list(neg(Z.element([1]))) == list(s(Z.element([-1])))
    r = build_random_free_approx(F2, 12, 0)
    sw = compose_with_automorphism(r, {"type": "permute_generators", "perm": [1, 0]})
    assert list(sw(F2.element("a"))) == list(r(F2.element("b")))
    with pytest.raises(SoficError, match="not an automorphism"):
        Automorphism(GroupSpec.symmetric(3), {"type": "negation"})
    a = Automorphism(F2, {"type": "permute_generators", "perm": [1, 0]})
    for g in ball(F2, 2):
        assert a.preimage(a(g)) == g


@given(st.integers(0, 10**6), st.integers(2, 40))
def test_good_set_matches_definition(seed, m):
    s = build_random_free_approx(F2, m, seed)
    F = sorted_elements(ball(F2, 1))[: 1 + seed % 5]
    assert list(good_set(s, F).good_set) == brute_good_set(s, F)


@given(st.integers(0, 10**6), st.integers(2, 30))
def test_good_set_antitone(seed, m):
    s = build_random_free_approx(F2, m, seed)
    small = set(good_set(s, ball(F2, 1)).good_set)
    big = set(good_set(s, ball(F2, 2)).good_set)
    assert big <= small
