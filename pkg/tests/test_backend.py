import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pwsample import _backend, _pykernels

BACKENDS = _backend.available_backends()
needs_c = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")

finite = st.floats(-60, 60, allow_nan=False, allow_infinity=False)


def test_selected_backend_is_importable():
    assert _backend.BACKEND in BACKENDS
    assert "python" in BACKENDS


def test_sinc_pi_integers_are_exact_zeros(backend):
    n = np.arange(-50, 51, dtype=float)
    out = backend.sinc_pi(n)
    assert out[50] == 1.0
    assert np.all(out[np.arange(101) != 50] == 0.0)


def test_sinc_pi_shape_is_preserved(backend):
    x = np.linspace(-2, 2, 12).reshape(3, 4)
    assert backend.sinc_pi(x).shape == (3, 4)


def test_readonly_inputs_accepted(backend):
    a = np.linspace(-3, 3, 7)
    a.flags.writeable = False
    backend.sinc_pi(a)
    backend.gram_matrix(a[:, None])
    backend.cosine_sum(a, a, a)
    backend.log_abs_product(a, a, a)
    backend.sinc_synthesis(a[:, None], a[:, None], a)


@needs_c
@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 40), elements=finite))
def test_sinc_pi_matches(x):
    c, p = BACKENDS["cython"], _pykernels
    np.testing.assert_allclose(c.sinc_pi(x), p.sinc_pi(x), rtol=1e-14, atol=1e-16)


@needs_c
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 25), st.integers(0, 2**31 - 1))
def test_gram_matrix_matches(d, l, seed):
    nodes = np.random.default_rng(seed).uniform(-10, 10, size=(l, d))
    c = BACKENDS["cython"].gram_matrix(nodes)
    p = _pykernels.gram_matrix(nodes)
    np.testing.assert_allclose(c, p, rtol=1e-13, atol=1e-15)
    assert np.array_equal(c, c.T)


@needs_c
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 30), st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_sinc_synthesis_matches(d, m, k, seed):
    r = np.random.default_rng(seed)
    pts = r.uniform(-8, 8, size=(m, d))
    cen = r.uniform(-5, 5, size=(k, d))
    coef = r.uniform(-1, 1, size=k)
    c = BACKENDS["cython"].sinc_synthesis(pts, cen, coef)
    p = _pykernels.sinc_synthesis(pts, cen, coef)
    np.testing.assert_allclose(c, p, rtol=1e-12, atol=1e-14)


@needs_c
@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(1, 50), elements=finite), st.integers(1, 20), st.integers(0, 2**31 - 1))
def test_cosine_sum_matches(t, q, seed):
    r = np.random.default_rng(seed)
    xi = r.uniform(3, 5, size=q)
    w = r.uniform(0, 1, size=q)
    np.testing.assert_allclose(
        BACKENDS["cython"].cosine_sum(t, xi, w), _pykernels.cosine_sum(t, xi, w), rtol=1e-12, atol=1e-13
    )


@needs_c
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(-1, 39), st.integers(0, 2**31 - 1))
def test_log_abs_product_matches(n, skip, seed):
    r = np.random.default_rng(seed)
    zeros = r.uniform(-20, 20, size=n)
    scales = r.uniform(0.1, 2, size=n) * r.choice([-1, 1], size=n)
    t = np.concatenate([r.uniform(-25, 25, size=10), zeros[:2]])
    skip = skip if skip < n else -1
    lc, sc = BACKENDS["cython"].log_abs_product(t, zeros, scales, skip)
    lp, sp = _pykernels.log_abs_product(t, zeros, scales, skip)
    assert np.array_equal(sc, sp)
    fin = np.isfinite(lp)
    assert np.array_equal(fin, np.isfinite(lc))
    np.testing.assert_allclose(lc[fin], lp[fin], rtol=0, atol=1e-12)


def test_log_abs_product_zero_factor(backend):
    la, s = backend.log_abs_product(np.array([1.0, 2.5]), np.array([1.0, 3.0]), np.array([1.0, 1.0]))
    assert la[0] == -np.inf and s[0] == 0.0
    assert np.isclose(np.exp(la[1]) * s[1], (2.5 - 1.0) * (2.5 - 3.0))
