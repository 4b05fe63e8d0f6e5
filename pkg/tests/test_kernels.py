import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from soficlab import counting as ct
from soficlab import kernels
from soficlab.verify import random_instance

BACKENDS = kernels.backends()
needs_both = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS


@st.composite
def kernel_case(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    k = int(rng.integers(1, 3))
    m = int(rng.integers(1, 9))
    u = int(rng.integers(1, 4))
    inv = np.array([rng.permutation(m) for _ in range(k)], dtype=np.int64)
    mu = rng.random(u**k)
    mu /= mu.sum()
    total = u**m
    lo = int(rng.integers(0, total))
    hi = int(rng.integers(lo, total + 1))
    eps = float(rng.uniform(0, 2))
    return inv, mu, u, lo, hi, eps


@needs_both
@given(kernel_case())
def test_count_range_parity(case):
    inv, mu, u, lo, hi, eps = case
    masks, counts = [], []
    for name in ("python", "cython"):
        mask = np.zeros(hi - lo, dtype=np.uint8)
        counts.append(BACKENDS[name].count_range(inv, mu, u, lo, hi, eps, ct.DF_TOL, mask))
        masks.append(mask)
    assert counts[0] == counts[1]
    assert np.array_equal(masks[0], masks[1])
    assert counts[0] == int(masks[0].sum())


@needs_both
@given(kernel_case())
def test_df_batch_parity(case):
    inv, mu, u, _, _, _ = case
    m = inv.shape[1]
    labels = np.random.default_rng(m).integers(0, u, size=(7, m))
    a = BACKENDS["python"].df_batch(labels, inv, mu, u)
    b = BACKENDS["cython"].df_batch(labels, inv, mu, u)
    assert np.allclose(a, b, atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_df_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, max_m=6, max_u=3)
    labels = rng.integers(0, inst.alpha.u, size=inst.sigma.m)
    got = ct.dF(inst.sigma, inst.alpha, ct.FinPartition(inst.sigma.m, inst.alpha.u, labels), inst.F)
    want = oracles.brute_dF(inst.sigma, inst.alpha, labels, inst.F)
    assert got == pytest.approx(want, abs=1e-12)


def test_count_range_splits_additively():
    rng = np.random.default_rng(5)
    inv = np.array([rng.permutation(8)], dtype=np.int64)
    mu = np.array([0.3, 0.7])
    whole = kernels.count_range(inv, mu, 2, 0, 256, 0.5, ct.DF_TOL)
    parts = sum(kernels.count_range(inv, mu, 2, a, a + 64, 0.5, ct.DF_TOL) for a in range(0, 256, 64))
    assert whole == parts
