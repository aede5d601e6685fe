"""Validation of the double-double summation engine against mpmath.

These tests pin the arithmetic claims everything else rests on: the
scaled reciprocal-gamma tables are accurate to ~1e-28, and every engine
result satisfies |sum - truth| <= tail + absum * DD_TERM_EPS + |value| ulp.
"""

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from hilferpde.ddcore import (
    DD_TERM_EPS,
    FLAG_OK,
    dd_exp_scaled,
    dd_log,
    gw_series_sum,
    rgamma_dd,
    series_table,
)

import oracles


def _scaled_to_mpf(h, l, e2):
    return (mpmath.mpf(float(h)) + mpmath.mpf(float(l))) * mpmath.mpf(2) ** int(e2)


# spans both Stirling-zone branches: shifted (negative axis) and direct
# (large positive, where 1/Gamma underflows float64 past x ~ 171)
RGAMMA_GRID = [
    -111.5, -100.25, -88.5, -60.75, -37.2, -15.5, -8.3, -2.7, -0.4,
    0.2, 0.5, 1.0, 3.7, 12.25, 29.9, 30.1, 100.0, 150.5, 171.0,
    179.0, 250.0, 400.5,
]


@pytest.mark.parametrize("x", RGAMMA_GRID)
def test_rgamma_dd_accuracy(x):
    h, l, e2 = rgamma_dd(np.array([x]), np.array([0.0]))
    with mpmath.workdps(60):
        val = _scaled_to_mpf(h[0], l[0], e2[0])
        ref = mpmath.rgamma(mpmath.mpf(x))
        rel = abs(val - ref) / abs(ref)
        assert rel < 2e-28, f"rgamma_dd({x}) rel err {rel}"


@pytest.mark.parametrize("x", [0.0, -1.0, -5.0, -37.0, -110.0])
def test_rgamma_dd_exact_zero_at_poles(x):
    h, l, e2 = rgamma_dd(np.array([x]), np.array([0.0]))
    assert h[0] == 0.0 and l[0] == 0.0


@pytest.mark.parametrize("a", [-699.5, -30.7, -3.2, 0.3, 41.5, 700.1, 1500.0])
def test_dd_exp_scaled(a):
    h, l, m = dd_exp_scaled(np.array([a]), np.array([0.0]))
    with mpmath.workdps(60):
        val = _scaled_to_mpf(h[0], l[0], m[0])
        ref = mpmath.exp(mpmath.mpf(a))
        assert abs(val - ref) / ref < 1e-29


@pytest.mark.parametrize("a", [1e-8, 0.5, 3.7, 1e12])
def test_dd_log(a):
    h, l = dd_log(np.array([a]), np.array([0.0]))
    with mpmath.workdps(60):
        val = mpmath.mpf(float(h[0])) + mpmath.mpf(float(l[0]))
        ref = mpmath.log(mpmath.mpf(a))
        assert abs(val - ref) / abs(ref) < 1e-30


def test_series_table_row():
    # row of phi(-1/2, 1/2, .): poles of Gamma(1/2 - k/2) at every odd k
    g_hi, g_lo, g_e2 = series_table(1.0, 1.0, -0.5, 0.5, 800)
    with mpmath.workdps(60):
        for k in (0, 1, 2, 3, 40, 176, 178, 401, 600):
            ref = mpmath.gamma(k + 1) * mpmath.rgamma(1 + k) * mpmath.rgamma(
                mpmath.mpf("0.5") - mpmath.mpf("0.5") * k
            )
            val = _scaled_to_mpf(g_hi[k], g_lo[k], g_e2[k])
            if k % 2 == 1:
                assert ref == 0 and val == 0
            else:
                assert abs(val - ref) / abs(ref) < 2e-28


def _engine_err_and_bound(z, mu, a, nu, b, ref):
    res = gw_series_sum(np.array([complex(z)]), mu, a, nu, b, tol=1e-16)
    assert res["flag"][0] == FLAG_OK
    v = complex(res["value"][0])
    err = abs(v - complex(ref))
    bound = (
        float(res["tail"][0])
        + float(res["absum"][0]) * DD_TERM_EPS
        + abs(v) * 2.0 ** -52
    )
    return err, bound


@pytest.mark.parametrize("z", [-0.5, -2.0, -6.0, -9.5, -11.0])
def test_engine_gaussian_row_within_bound(z):
    # phi(-1/2,1/2,z) = exp(-z^2/4)/sqrt(pi): cancellation grows to ~1e13
    # in absum by z=-11, far beyond plain double precision
    ref = oracles.wright_phi_ref(0.5, 0.5, z)
    err, bound = _engine_err_and_bound(z, 1.0, 1.0, -0.5, 0.5, complex(ref))
    assert err <= bound


@pytest.mark.parametrize("r", [3.0, 12.0])
def test_engine_complex_ray_within_bound(r):
    z = r * np.exp(1j * 2.59)
    ref = oracles.wright_phi_ref(0.2, 0.8, mpmath.mpc(z.real, z.imag))
    err, bound = _engine_err_and_bound(z, 1.0, 1.0, -0.2, 0.8, complex(ref))
    assert err <= bound


def test_engine_mittag_leffler_cancellation():
    # E_0.8(-19): absum/|value| ~ 1e19, a known double-precision killer
    ref = oracles.mittag_leffler_ref(0.8, -19.0)
    err, bound = _engine_err_and_bound(-19.0, 0.8, 1.0, 0.0, 1.0, complex(ref))
    assert err <= bound
    assert err < 1e-10 * abs(complex(ref))


def test_engine_z_zero():
    res = gw_series_sum(np.array([0.0 + 0.0j]), 1.0, 1.0, -0.5, 0.5, tol=1e-16)
    assert_allclose(res["value"][0].real, 1.0 / np.sqrt(np.pi), rtol=1e-15)
    assert res["tail"][0] == 0.0


def test_engine_rejects_nonpositive_order():
    with pytest.raises(ValueError):
        gw_series_sum(np.array([1.0 + 0j]), 0.5, 1.0, -0.5, 1.0, tol=1e-14)
