"""Pure numpy versions of the d_F kernels (used when the extension is not built)."""
from __future__ import annotations

import numpy as np

_BATCH_CELLS = 1 << 22


def _codes(labels: np.ndarray, inv: np.ndarray, u: int) -> np.ndarray:
    codes = np.zeros(labels.shape, dtype=np.int64)
    scale = 1
    for row in inv:
        codes += labels[:, row] * scale
        scale *= u
    return codes


def _df_rows(codes: np.ndarray, mu: np.ndarray, m: int) -> np.ndarray:
    n, U = codes.shape[0], mu.shape[0]
    flat = codes + (np.arange(n, dtype=np.int64) * U)[:, None]
    hist = np.bincount(flat.ravel(), minlength=n * U).reshape(n, U)
    return np.abs(mu[None, :] - hist / m).sum(axis=1)


def df_batch(labels, inv, mu, u: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    inv = np.asarray(inv, dtype=np.int64)
    mu = np.asarray(mu, dtype=np.float64)
    n, m = labels.shape
    step = max(1, _BATCH_CELLS // max(mu.shape[0], m))
    out = np.empty(n)
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        out[lo:hi] = _df_rows(_codes(labels[lo:hi], inv, u), mu, m)
    return out


def count_range(inv, mu, u: int, start: int, stop: int, eps: float, tol: float, mask=None) -> int:
    inv = np.asarray(inv, dtype=np.int64)
    mu = np.asarray(mu, dtype=np.float64)
    m = inv.shape[1]
    powers = np.int64(u) ** np.arange(m, dtype=np.int64)
    step = max(1, _BATCH_CELLS // max(mu.shape[0], m))
    count = 0
    for lo in range(start, stop, step):
        hi = min(stop, lo + step)
        idx = np.arange(lo, hi, dtype=np.int64)
        labels = (idx[:, None] // powers[None, :]) % u
        ok = df_batch(labels, inv, mu, u) <= eps + tol
        count += int(ok.sum())
        if mask is not None:
            mask[lo - start : hi - start] = ok
    return count
