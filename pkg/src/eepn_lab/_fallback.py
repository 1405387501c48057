"""Pure numpy versions of the hot kernels in ``_kernels.pyx``.

Both modules expose the same two functions and must agree to round-off.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

# Windows up to this length are evaluated two-pass per window.
SMALL_WINDOW = 64
_ROWS_PER_PASS = 1 << 16


def moving_moments(x, w):
    """Mean and population variance of every length-``w`` window of ``x``.

    Returns two float64 arrays of length ``len(x) - w + 1``; entry ``i``
    describes ``x[i:i + w]``.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.size
    w = int(w)
    if w < 1 or w > n:
        raise ValueError(f"window {w} invalid for length {n}")
    n_out = n - w + 1
    if w == 1:
        return x.copy(), np.zeros(n)

    mean = np.empty(n_out)
    var = np.empty(n_out)
    if w <= SMALL_WINDOW:
        windows = sliding_window_view(x, w)
        for a in range(0, n_out, _ROWS_PER_PASS):
            block = windows[a:a + _ROWS_PER_PASS]
            m = block.mean(axis=1)
            mean[a:a + block.shape[0]] = m
            var[a:a + block.shape[0]] = ((block - m[:, None]) ** 2).mean(axis=1)
        return mean, var

    # Prefix sums over chunks of window starts, each re-anchored on a local
    # reference and accumulated in extended precision. Without the anchor the
    # E[x^2] - E[x]^2 form cancels catastrophically on drifting phase walks.
    chunk = max(4 * w, 4096)
    for s0 in range(0, n_out, chunk):
        s1 = min(s0 + chunk, n_out)
        ref = x[s0:s0 + w].mean()
        seg = (x[s0:s1 + w - 1] - ref).astype(np.longdouble)
        c1 = np.zeros(seg.size + 1, dtype=np.longdouble)
        c2 = np.zeros(seg.size + 1, dtype=np.longdouble)
        np.cumsum(seg, out=c1[1:])
        np.cumsum(seg * seg, out=c2[1:])
        m1 = (c1[w:] - c1[:-w]) / w
        m2 = (c2[w:] - c2[:-w]) / w
        mean[s0:s1] = (m1 + ref).astype(np.float64)
        var[s0:s1] = np.maximum(m2 - m1 * m1, 0).astype(np.float64)
    return mean, var


def gather_sq_dev(x, centers, delays, ref):
    """``out[b] = mean_k (x[centers[b] + delays[k]] - ref[b])**2``.

    Indices are not bounds-checked here; callers validate them.
    """
    x = np.asarray(x, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.int64)
    delays = np.asarray(delays, dtype=np.int64)
    ref = np.asarray(ref, dtype=np.float64)
    out = np.empty(centers.size)
    rows = max(1, _ROWS_PER_PASS * 16 // max(delays.size, 1))
    for a in range(0, centers.size, rows):
        idx = centers[a:a + rows, None] + delays[None, :]
        dev = x[idx] - ref[a:a + rows, None]
        out[a:a + rows] = np.mean(dev * dev, axis=1)
    return out
