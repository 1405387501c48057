import numpy as np
import pytest
from numpy.lib.stride_tricks import sliding_window_view

from eepn_lab import _fallback, kernels

try:
    from eepn_lab import _kernels
except ImportError:  # extension not built
    _kernels = None

BACKENDS = [pytest.param(_fallback, id="python")]
BACKENDS.append(
    pytest.param(_kernels, id="cython", marks=pytest.mark.skipif(_kernels is None, reason="not built"))
)


def naive_moments(x, w):
    """Two-pass mean and population variance, one window at a time."""
    out_m = np.empty(x.size - w + 1)
    out_v = np.empty(x.size - w + 1)
    for i in range(out_m.size):
        win = x[i:i + w]
        m = win.sum() / w
        out_m[i] = m
        out_v[i] = np.sum((win - m) ** 2) / w
    return out_m, out_v


def test_selected_backend_is_known():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("w", [1, 2, 3, 64, 65, 200, 2000])
def test_moving_moments_vs_naive(impl, w):
    rng = np.random.default_rng(w)
    x = np.cumsum(rng.normal(0, 0.01, 9000)) + 7.0
    m, v = impl.moving_moments(x, w)
    nm, nv = naive_moments(x, w)
    np.testing.assert_allclose(v, nv, rtol=1e-12, atol=0 if w > 1 else 1e-300)
    np.testing.assert_allclose(m, nm, rtol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_moving_moments_large_offset(impl):
    rng = np.random.default_rng(0)
    x = rng.normal(size=20000) + 1e6
    _, v = impl.moving_moments(x, 501)
    ref = sliding_window_view(x, 501).var(axis=1)
    np.testing.assert_allclose(v, ref, rtol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_moving_moments_edges(impl):
    x = np.arange(10.0)
    m, v = impl.moving_moments(x, 10)
    assert m.shape == (1,) and m[0] == 4.5
    assert v[0] == pytest.approx(np.var(x), rel=1e-15)
    with pytest.raises(ValueError):
        impl.moving_moments(x, 11)
    with pytest.raises(ValueError):
        impl.moving_moments(x, 0)


@pytest.mark.parametrize("impl", BACKENDS)
def test_gather_sq_dev(impl):
    rng = np.random.default_rng(2)
    x = rng.normal(size=1000)
    centers = np.array([100, 300, 700])
    delays = np.array([-50, -3, 0, 9, 80])
    ref = np.array([0.1, -0.2, 0.0])
    out = impl.gather_sq_dev(x, centers, delays, ref)
    expected = [np.mean((x[c + delays] - r) ** 2) for c, r in zip(centers, ref)]
    np.testing.assert_allclose(out, expected, rtol=1e-14)


@pytest.mark.skipif(_kernels is None, reason="not built")
def test_backends_agree():
    rng = np.random.default_rng(9)
    x = np.cumsum(rng.normal(0, 3e-3, 300000))
    for w in (5, 2438):
        a = _fallback.moving_moments(x, w)
        b = _kernels.moving_moments(x, w)
        np.testing.assert_allclose(a[1], b[1], rtol=1e-12)
