"""Tests for the similarity-form fundamental-solution kernel."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import gamma as G

from hilferpde.fracops import EquationSpec, pde_residual
from hilferpde.kernel import (
    KernelSpec,
    _cert_radius,
    gamma_b,
    gamma_b_dx,
    gamma_b_grid,
    kernel_spec,
    lemma1_jump,
    truncation_radius,
)
from hilferpde.specfun import decay_bound, equation_roots, recip_gamma


def _spec(n, alpha, b, beta=1.0):
    return kernel_spec(EquationSpec(n=n, alpha=alpha, beta=beta), b)


# --- construction and validation --------------------------------------------


@pytest.mark.parametrize("n,alpha", [(1, 1.0), (2, 0.8), (2, 1.5), (3, 0.7)])
def test_calibrated_sign_is_minus_one(n, alpha):
    # the raw root-sum series integrates to a negative mass (for n=1,
    # alpha=1 it is minus the heat kernel), so the calibrated global
    # sign must come out -1 for every family
    ks = _spec(n, alpha, -0.3)
    assert ks.sign == -1


def test_kernelspec_rejects_wrong_root_count():
    eq = EquationSpec(n=2, alpha=0.8, beta=1.0)
    with pytest.raises(ValueError):
        KernelSpec(eq=eq, b=-0.2, roots=(1.0 + 0.0j,), sign=-1,
                   bound=_spec(2, 0.8, -0.2).bound)


def test_kernelspec_rejects_off_circle_roots():
    eq = EquationSpec(n=2, alpha=0.8, beta=1.0)
    bad = tuple(1.1 * r for r in equation_roots(2))
    with pytest.raises(ValueError):
        KernelSpec(eq=eq, b=-0.2, roots=bad, sign=-1,
                   bound=_spec(2, 0.8, -0.2).bound)


def test_kernelspec_rejects_wrong_characteristic_power():
    # (1, -1) sit on the unit circle but solve lam^4 = +1, not -1
    eq = EquationSpec(n=2, alpha=0.8, beta=1.0)
    with pytest.raises(ValueError):
        KernelSpec(eq=eq, b=-0.2, roots=(1.0 + 0.0j, -1.0 + 0.0j), sign=-1,
                   bound=_spec(2, 0.8, -0.2).bound)


def test_kernelspec_rejects_conjugation_gap():
    # e^(i pi/4), e^(3 i pi/4) solve lam^4 = -1 but the set is not
    # closed under conjugation, so the sum could not be real
    eq = EquationSpec(n=2, alpha=0.8, beta=1.0)
    bad = (np.exp(1j * np.pi / 4.0), np.exp(3j * np.pi / 4.0))
    with pytest.raises(ValueError):
        KernelSpec(eq=eq, b=-0.2, roots=bad, sign=-1,
                   bound=_spec(2, 0.8, -0.2).bound)


def test_kernelspec_rejects_bad_sign():
    eq = EquationSpec(n=2, alpha=0.8, beta=1.0)
    with pytest.raises(ValueError):
        KernelSpec(eq=eq, b=-0.2, roots=equation_roots(2), sign=0,
                   bound=_spec(2, 0.8, -0.2).bound)


# --- closed-form anchors -----------------------------------------------------


def test_reduces_to_heat_kernel():
    # n=1, alpha=1, b=-1/2 must reproduce exp(-x^2/4y)/sqrt(4 pi y)
    ks = _spec(1, 1.0, -0.5)
    for dx, dy in [(0.0, 1.0), (0.7, 1.0), (1.3, 0.5), (2.0, 2.0),
                   (-0.7, 1.0), (3.5, 1.7)]:
        got, err = gamma_b(ks, dx, dy)
        ref = math.exp(-dx * dx / (4.0 * dy)) / math.sqrt(4.0 * math.pi * dy)
        assert_allclose(got, ref, rtol=1e-10)
        assert err < 1e-10 * ref


@pytest.mark.parametrize("b,dy", [(-0.2, 1.0), (0.375, 0.7)])
def test_value_on_axis(b, dy):
    # at dx=0 every Wright factor is 1/Gamma(b+1), leaving the root sum
    ks = _spec(2, 0.8, b)
    got, _ = gamma_b(ks, 0.0, dy)
    lam = np.asarray(ks.roots)
    want = (ks.sign * dy ** b / 4.0 * float(np.sum(-lam).real)
            * float(recip_gamma(b + 1.0)))
    assert_allclose(got, want, rtol=1e-13)


# --- symmetry and scaling ----------------------------------------------------


def test_evenness_is_exact():
    ks = _spec(2, 0.9, -0.225)
    for dx, dy in [(0.4, 1.0), (1.7, 0.6), (0.05, 2.0)]:
        vp, ep = gamma_b(ks, dx, dy)
        vm, em = gamma_b(ks, -dx, dy)
        assert vp == vm and ep == em  # bitwise, both sides share the series


def test_derivative_parity_is_exact():
    ks = _spec(2, 0.9, -0.225)
    for order in (1, 2, 3):
        vp, _ = gamma_b_dx(ks, order, 0.6, 1.1)
        vm, _ = gamma_b_dx(ks, order, -0.6, 1.1)
        assert vm == (-1.0) ** order * vp


@pytest.mark.parametrize("c", [0.5, 2.0, 5.0])
def test_self_similar_scaling(c):
    # Gamma_b(c^(a/2n) dx, c dy) = c^b Gamma_b(dx, dy)
    ks = _spec(2, 1.5, 0.375, beta=0.5)
    delta = 1.5 / 4.0
    for dx, dy in [(0.3, 1.0), (1.1, 0.8)]:
        base, _ = gamma_b(ks, dx, dy)
        scaled, _ = gamma_b(ks, c ** delta * dx, c * dy)
        assert_allclose(scaled, c ** ks.b * base, rtol=1e-10)


def test_grid_matches_scalar_bitwise():
    # the batch path shares the per-point series, so equality is exact
    ks = _spec(2, 0.8, -0.2)
    dxs = np.array([[-1.3, 0.0, 0.4], [2.0, -0.05, 5.5]])
    vals, errs = gamma_b_grid(ks, dxs, 0.9)
    assert vals.shape == dxs.shape and errs.shape == dxs.shape
    for i in range(2):
        for j in range(3):
            v, e = gamma_b(ks, float(dxs[i, j]), 0.9)
            assert vals[i, j] == v and errs[i, j] == e


# --- x-derivatives -----------------------------------------------------------


@pytest.mark.parametrize("order", [1, 2])
def test_series_derivative_matches_finite_differences(order):
    ks = _spec(2, 0.9, -0.225)
    x, y, h = 0.8, 1.1, 1e-2

    def fd(hh):
        if order == 1:
            return (gamma_b(ks, x + hh, y)[0]
                    - gamma_b(ks, x - hh, y)[0]) / (2.0 * hh)
        return (gamma_b(ks, x + hh, y)[0] - 2.0 * gamma_b(ks, x, y)[0]
                + gamma_b(ks, x - hh, y)[0]) / hh ** 2

    got, _ = gamma_b_dx(ks, order, x, y)
    assert_allclose(got, (4.0 * fd(h / 2.0) - fd(h)) / 3.0, rtol=1e-6)


def test_gamma_b_dx_rejects_seam_and_bad_order():
    ks = _spec(2, 0.8, -0.2)
    with pytest.raises(ValueError):
        gamma_b_dx(ks, 1, 0.0, 1.0)
    with pytest.raises(ValueError):
        gamma_b_dx(ks, 0, 0.5, 1.0)
    with pytest.raises(ValueError):
        gamma_b(ks, 0.5, -1.0)
    with pytest.raises(ValueError):
        gamma_b(ks, 0.5, 1.0, tol=0.0)


# --- derivative jumps across dx = 0 ------------------------------------------


def _numeric_jump(ks, s, eps, dy=1.0):
    dp, _ = gamma_b_dx(ks, s, +eps, dy)
    dm, _ = gamma_b_dx(ks, s, -eps, dy)
    return dp - dm


def test_jump_selector():
    # only s = 2n-1 (mod 2n) jumps; everything else is continuous
    ks = _spec(2, 0.8, -0.2)
    for s in (0, 1, 2, 4, 5, 6):
        assert lemma1_jump(ks, s, 1.0) == 0.0
    assert lemma1_jump(ks, 3, 1.0) != 0.0
    assert lemma1_jump(ks, 7, 1.0) != 0.0
    with pytest.raises(ValueError):
        lemma1_jump(ks, -1, 1.0)


def test_jump_closed_values():
    # n=2, alpha=0.8, b=-0.2, dy=1: the s=3 jump is
    #   sign * (-1)^(n-1) / Gamma(b+1 - 3 alpha/4) = +1/Gamma(0.2)
    # and s=7 picks up another (-1)^(n-1) from the wrap count m=2:
    #   -1/Gamma(-0.6).  References from mpmath at 50 digits.
    ks = _spec(2, 0.8, -0.2)
    assert_allclose(lemma1_jump(ks, 3, 1.0), 0.21782488421166726, rtol=1e-12)
    assert_allclose(lemma1_jump(ks, 7, 1.0), 0.27049451951664664, rtol=1e-12)


def test_jump_dy_scaling():
    ks = _spec(2, 0.8, -0.2)
    shift = 0.8 * 3.0 / 4.0
    for dy in (0.5, 2.0):
        assert_allclose(lemma1_jump(ks, 3, dy),
                        lemma1_jump(ks, 3, 1.0) * dy ** (ks.b - shift),
                        rtol=1e-13)


@pytest.mark.parametrize("s", [3, 7])
def test_numeric_jump_matches_closed_form(s):
    # one-sided limits via eps -> 0 Richardson; the eps expansion of the
    # two-sided difference is jump + O(eps^4) here, so this is generous
    ks = _spec(2, 0.8, -0.2)
    extrap = 2.0 * _numeric_jump(ks, s, 2e-4) - _numeric_jump(ks, s, 4e-4)
    assert_allclose(extrap, lemma1_jump(ks, s, 1.0), rtol=1e-6)


@pytest.mark.parametrize("s", [1, 2, 5])
def test_numeric_jump_vanishes_off_selector(s):
    # continuous orders leave an O(eps^2) Richardson residue only
    ks = _spec(2, 0.8, -0.2)
    extrap = 2.0 * _numeric_jump(ks, s, 2e-4) - _numeric_jump(ks, s, 4e-4)
    assert abs(extrap) < 1e-7


# --- decay envelope and truncation -------------------------------------------


def test_deep_tail_returns_envelope_bound():
    # beyond the certified summation radius the value is an exact 0 and
    # the error bound is the (tiny) decay envelope
    ks = _spec(2, 0.8, -0.2)
    val, err = gamma_b(ks, 60.0, 1.0)
    assert val == 0.0
    assert 0.0 < err < 1e-20


def test_envelope_dominates_certified_values():
    ks = _spec(2, 0.8, -0.2)
    tmax = 0.9 * _cert_radius(0.2)
    for t in np.geomspace(1.0, tmax, 9):
        val, _ = gamma_b(ks, float(t), 1.0)
        env = decay_bound(2, 0.8, -0.2, float(t))
        assert abs(val) <= 0.5 * env * 1.01


def test_band_values_beyond_float64_certification():
    # for alpha = 1.5 the float64 series loses certification near t ~ 16
    # while the kernel still carries mass out to t ~ 40; the high-precision
    # band table must cover that stretch with an honest error bar.
    # References from a 120-digit direct series evaluation.
    refs = {
        20.0: 3.4126102774165747223e-07,
        24.0: -6.0052494354967958637e-09,
        30.0: 7.1807420504349230918e-12,
    }
    ks = _spec(2, 1.5, -0.625, beta=0.5)
    for t, ref in refs.items():
        val, err = gamma_b(ks, t, 1.0)
        assert 0.0 < err < 1e-7  # envelope fallback would report ~1e-5
        assert abs(val - ref) <= err
    assert_allclose(gamma_b(ks, 20.0, 1.0)[0], refs[20.0], rtol=1e-4)


def test_truncation_radius_tightens_with_tol():
    ks = _spec(2, 0.8, -0.4)
    radii = [truncation_radius(ks, 1.0, tol) for tol in (1e-4, 1e-8, 1e-12)]
    assert radii[0] < radii[1] < radii[2]
    with pytest.raises(ValueError):
        truncation_radius(ks, -1.0, 1e-8)
    with pytest.raises(ValueError):
        truncation_radius(ks, 1.0, 0.0)


def test_truncation_radius_scales_with_dy():
    # R is a t-space radius times dy^(alpha/2n); the residual dy^(b+d)
    # factor inside the tail bound only shifts it logarithmically
    ks = _spec(2, 0.8, -0.4)
    r1 = truncation_radius(ks, 1.0, 1e-10)
    r2 = truncation_radius(ks, 2.0, 1e-10)
    assert_allclose(r2 / r1, 2.0 ** 0.2, rtol=0.02)


def test_truncation_radius_bounds_true_tail():
    # the retained-mass guarantee: integral of C t^pw exp(-sigma t^q)
    # beyond R is below tail_tol, and not absurdly below (the closed
    # bound is tight to within about a factor of two)
    mp = pytest.importorskip("mpmath")
    ks = _spec(2, 0.8, -0.2)
    par = ks.bound
    q = 4.0 / (4.0 - 0.8)
    pw = -q * (par.exponent_b + 0.5)
    for tol in (1e-4, 1e-8):
        T = truncation_radius(ks, 1.0, tol)
        tail = par.C * float(
            mp.quad(lambda t: t ** pw * mp.e ** (-par.sigma * t ** q),
                    [T, mp.inf])
        )
        assert 1e-2 * tol < tail <= tol


# --- realness over the admissible family --------------------------------------


def test_realness_sweep():
    # conjugate pairing keeps the root sum real; sweep the family and
    # let the evaluator's own realness assertion do the checking
    rng = np.random.default_rng(20240815)
    count = 0
    for n in (1, 2, 3, 4):
        for alpha in (0.6, 1.3):
            b = float(rng.uniform(-1.2, 0.8))
            ks = kernel_spec(EquationSpec(n=n, alpha=alpha, beta=0.5), b)
            delta = alpha / (2.0 * n)
            tmax = 1.15 * _cert_radius(delta)
            for _ in range(63):
                dy = float(rng.uniform(0.3, 3.0))
                dx = float(rng.uniform(-1.0, 1.0)) * tmax * dy ** delta
                val, err = gamma_b(ks, dx, dy)
                assert np.isfinite(val)
                assert np.isfinite(err) and err >= 0.0
                count += 1
    assert count == 504


# --- the kernel satisfies the equation ----------------------------------------


@pytest.mark.parametrize(
    "alpha,beta,b,x,y,levels",
    [
        (0.9, 1.0, -0.225, 0.8, 1.1, 28),
        (0.8, 0.0, -0.4, 0.35, 0.9, 37),
    ],
)
def test_kernel_solves_equation(alpha, beta, b, x, y, levels):
    # D^(alpha,beta)_y Gamma = -d^4/dx^4 Gamma pointwise; the y-trace has
    # a boundary layer near tau ~ (x / t_flat)^(2n/alpha), so the panel
    # grading must reach below it (hence the deep levels)
    eq = EquationSpec(n=2, alpha=alpha, beta=beta)
    ks = kernel_spec(eq, b)

    def u(xx, yy):
        return np.vectorize(lambda a, c: gamma_b(ks, a, c)[0])(xx, yy)

    res = pde_residual(u, eq, x, y, x_step=abs(x) / 4.2,
                       inner_levels=levels, outer_levels=levels)
    assert abs(res) < 1e-6
