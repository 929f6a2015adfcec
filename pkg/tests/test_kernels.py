import threading

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from pwsample.errors import DomainError
from pwsample.kernels import (
    BumpProfile,
    SmoothKernel,
    bump,
    g_tail_sum,
    kernel_g,
    sinc,
    sinc_nd,
    sinc_pi,
)
from pwsample.nodes import gen_lattice

mpmath.mp.dps = 40


def test_sinc_examples():
    assert sinc(0.0) == 1.0
    assert abs(sinc(np.pi)) < 1e-16
    assert sinc(np.pi / 2) == pytest.approx(2 / np.pi, rel=1e-15)


def test_sinc_relative_error_against_mpmath():
    xs = np.concatenate([np.geomspace(1e-12, 1e-2, 40), np.linspace(0.01, 80, 400)])
    xs = np.concatenate([xs, -xs])
    ours = sinc(xs)
    for x, v in zip(xs, ours):
        ref = mpmath.sin(mpmath.mpf(x)) / mpmath.mpf(x)
        assert abs((v - ref) / ref) <= 1e-15


def test_sinc_nd_examples():
    assert sinc_nd(np.zeros(2)) == 1.0
    assert sinc_nd(np.pi * np.array([2.0, -1.0])) == pytest.approx(0.0, abs=1e-16)
    assert sinc_nd(np.array([np.pi / 2, np.pi / 2])) == pytest.approx(4 / np.pi ** 2, rel=1e-15)
    with pytest.raises(DomainError):
        sinc_nd(np.array([]))


def test_sinc_pi_integer_zeros():
    assert sinc_pi(0.0) == 1.0
    assert np.all(sinc_pi(np.arange(1.0, 100.0)) == 0.0)


def test_bump_examples():
    prof = BumpProfile(1.5)
    assert bump(0.0, prof) == 1.0
    assert bump(1.5 * np.pi, prof) == 0.0
    assert bump((1 + 1.5) * np.pi / 2, prof) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("lam0", [1.0, 0.5, -2.0])
def test_bump_rejects_small_lambda0(lam0):
    with pytest.raises(DomainError):
        BumpProfile(lam0)


@pytest.mark.parametrize("lam0", [1.2, 1.5, 2.0, 3.0])
def test_bump_shape(lam0):
    prof = BumpProfile(lam0)
    xi = np.linspace(-1.2 * lam0 * np.pi, 1.2 * lam0 * np.pi, 4001)
    v = bump(xi, prof)
    assert np.all((v >= 0) & (v <= 1))
    assert np.array_equal(v, bump(-xi, prof))
    assert np.all(v[np.abs(xi) <= np.pi] == 1.0)
    assert np.all(v[np.abs(xi) >= lam0 * np.pi] == 0.0)
    trans = np.linspace(np.pi, lam0 * np.pi, 2001)
    assert np.all(np.diff(bump(trans, prof)) <= 0)


def _quad_g1(t, lam0):
    prof = BumpProfile(lam0)
    val, _ = quad(lambda x: prof(x) * np.cos(t * x), np.pi, lam0 * np.pi, epsabs=1e-14, epsrel=1e-12, limit=400)
    return float(np.sinc(t)) + val / np.pi


@pytest.mark.parametrize("t", [0.0, 0.37, 1.0, 2.5, 7.0, 13.3, 31.0])
def test_g1_matches_adaptive_quadrature(t):
    k = SmoothKernel(1, 1.5, 64)
    assert k.g1(t) == pytest.approx(_quad_g1(t, 1.5), abs=1e-12)


def test_g1_at_zero():
    k = SmoothKernel(1, 1.5)
    assert 1.0 < k.g1(0.0) < 1.5
    # the transition integral of a profile symmetric about its midpoint is half its width
    assert k.g1(0.0) == pytest.approx(1.25, abs=1e-13)


def test_g1_integer_arguments_are_transition_integral():
    k = SmoothKernel(1, 1.5, 128)
    for m in (1, 2, 5, 9):
        trans = _quad_g1(m, 1.5) - float(np.sinc(m))
        assert k.g1(float(m)) == pytest.approx(trans, abs=1e-12)


def test_g1_even():
    k = SmoothKernel(1, 1.7)
    t = np.linspace(0, 50, 1001)
    np.testing.assert_array_equal(k.g1(t), k.g1(-t))


def test_quadrature_doubling():
    t = np.linspace(-50, 50, 5001)
    a = SmoothKernel(1, 1.5, 64).g1(t)
    b = SmoothKernel(1, 1.5, 128).g1(t)
    assert np.max(np.abs(a - b)) <= 1e-10


def test_cached_matches_uncached():
    k = SmoothKernel(1, 1.5)
    t = np.random.default_rng(1).uniform(-30, 30, 500)
    first = k.g1(t)
    second = k.g1(t)
    raw = k._raw_g1(t)
    np.testing.assert_array_equal(first, second)
    assert np.max(np.abs(first - raw)) <= 1e-8


def test_concurrent_evaluation_is_deterministic():
    k = SmoothKernel(1, 1.5)
    t = np.random.default_rng(2).uniform(-20, 20, (8, 300))
    ref = SmoothKernel(1, 1.5).g1(t)
    out = [None] * len(t)

    def work(i):
        out[i] = k.g1(t[i])

    threads = [threading.Thread(target=work, args=(i,)) for i in range(len(t))]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    np.testing.assert_array_equal(np.array(out), ref)


def test_decay_envelope_bounded():
    k = SmoothKernel(1, 1.5)
    env = []
    for T in (5.0, 10.0, 20.0):
        tt = np.linspace(T, 2 * T, 4001)
        env.append(np.max(np.abs(k.g1(tt)) * tt ** 4))
    assert max(env) <= 1.5 * env[0]


def test_reproducing_partial_sums():
    lam = 1.5
    k = SmoothKernel(1, lam, 64)
    t = np.linspace(-3, 3, 61)
    errs = []
    for K in (25, 50, 100, 200, 400):
        n = np.arange(-K, K + 1)
        s = (np.sinc(n / lam)[None, :] * k.g1(t[:, None] - n[None, :] / lam)).sum(axis=1) / lam
        errs.append(np.max(np.abs(s - np.sinc(t))))
    # converges until the 1e-9 argument rounding of the cache dominates
    assert all(b <= max(a, 1e-9) for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-9


def test_quadrature_doubling_far_from_origin():
    t = np.linspace(50, 500, 4001)
    a = SmoothKernel(1, 1.5, 64).g1(t)
    b = SmoothKernel(1, 1.5, 128).g1(t)
    assert np.max(np.abs(a - b)) <= 1e-12


def test_tensor_product():
    k1 = SmoothKernel(1, 1.5)
    k3 = SmoothKernel(3, 1.5)
    pt = np.array([0.3, -1.2, 2.5])
    assert kernel_g(pt, k3) == pytest.approx(np.prod(k1.g1(pt)), rel=1e-15)
    with pytest.raises(DomainError):
        k3(np.zeros(2))


def test_tail_sum_empty_window():
    k = SmoothKernel(1, 1.5)
    res = g_tail_sum(np.array([0.0]), gen_lattice(1, 5), 1.5, k, l=0)
    assert res.value == 0.0


def test_tail_sum_window_doubling():
    k = SmoothKernel(1, 1.5)
    a = g_tail_sum(np.array([0.0]), gen_lattice(1, 40), 1.5, k)
    b = g_tail_sum(np.array([0.0]), gen_lattice(1, 80), 1.5, k)
    assert np.isfinite(a.value) and abs(b.value - a.value) / a.value < 0.01
    # the remainder estimate should cover the difference
    assert b.value - a.value <= a.remainder


def test_tail_sum_requires_oversampling():
    k = SmoothKernel(1, 1.5)
    with pytest.raises(DomainError):
        g_tail_sum(np.array([0.0]), gen_lattice(1, 5), 1.2, k)


def test_tail_sum_batch_matches_pointwise():
    k = SmoothKernel(2, 1.5)
    ns = gen_lattice(2, 4)
    pts = np.array([[0.0, 0.0], [0.3, -0.7]])
    batch = g_tail_sum(pts, ns, 2.0, k).value
    single = [g_tail_sum(p, ns, 2.0, k).value for p in pts]
    np.testing.assert_allclose(batch, single, rtol=1e-14)
