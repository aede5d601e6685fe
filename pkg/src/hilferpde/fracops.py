"""Numerical fractional operators, used as independent oracles.

Everything here verifies analytic constructions rather than producing
them: the Riemann-Liouville integral by product quadrature, the Hilfer
derivative as the composition

    D^(a,b) f = I^(b(s-a)) d^s/dy^s I^((1-b)(s-a)) f,

and plain high-order spatial derivatives by central differencing. All
function arguments are evaluator contracts (array of points -> array of
values); sampling density is owned by this module, and evaluators must
be reentrant.

Quadrature design: each integral is split into panels graded
geometrically toward both endpoints, with Gauss-Jacobi rules absorbing
the power weights exactly on the two endpoint panels and Gauss-Legendre
in between. The grading makes boundary-layer integrands (kernel traces
vanish to all orders at y = 0) cheap to resolve.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

# relative accuracy the panel scheme is designed to deliver on
# smooth-times-power integrands; finite-difference steps derive from it
QUAD_TOL = 1e-10


@dataclass(frozen=True)
class EquationSpec:
    """Parameters of D^(alpha,beta)_y u = (-1)^(n-1) d^2n u / dx^2n.

    s_count is the integer with s-1 < alpha <= s; alpha = 1 gives s = 1
    (the operator definition wins over the ceiling-plus-one convention,
    which disagrees at integer alpha).
    """

    n: int
    alpha: float
    beta: float
    s_count: int = None

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not (0.0 < self.alpha < 2.0):
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        s = self.s_count
        if s is None:
            s = 1 if self.alpha <= 1.0 else 2
            object.__setattr__(self, "s_count", s)
        if not (s - 1 < self.alpha <= s):
            raise ValueError(
                f"s_count={s} inconsistent with alpha={self.alpha}"
            )


@dataclass(frozen=True)
class GeneralEquationSpec:
    """Parameters of x^m D^(a1,b1)_y u - d y^k D^(a2,b2)_x u = 0."""

    m: float
    k: float
    alpha1: float
    beta1: float
    alpha2: float
    beta2: float
    d: float
    q: int
    p: int

    def __post_init__(self):
        if not (self.m > -self.alpha2):
            raise ValueError(f"need m > -alpha2, got m={self.m}")
        if not (self.k > -self.alpha1):
            raise ValueError(f"need k > -alpha1, got k={self.k}")
        if not (self.q - 1 < self.alpha1 <= self.q):
            raise ValueError(f"q={self.q} inconsistent with alpha1={self.alpha1}")
        if not (self.p - 1 < self.alpha2 <= self.p):
            raise ValueError(f"p={self.p} inconsistent with alpha2={self.alpha2}")
        if not (self.q < self.p):
            raise ValueError(f"need q < p, got q={self.q}, p={self.p}")
        if self.d not in (1.0, -1.0, 1, -1):
            raise ValueError(f"d must be +1 or -1, got {self.d}")


@lru_cache(maxsize=64)
def _jacobi_rule(nn: int, a: float, b: float):
    x, w = roots_jacobi(nn, a, b)
    return x, w


def rl_integral(f, mu: float, y: float, *, sing_exp: float = 0.0,
                nodes: int = 12, levels: int = 14) -> float:
    """(1/Gamma(mu)) * integral_0^y (y-z)^(mu-1) f(z) dz.

    f may carry an integrable power singularity z^sing_exp at the origin
    (sing_exp > -1, declared by the caller); the weight singularity at
    z = y comes from mu < 1. Both are absorbed exactly by Gauss-Jacobi
    endpoint panels, so the remaining factors only need to be smooth.
    """
    mu = float(mu)
    y = float(y)
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    if y <= 0.0:
        raise ValueError(f"y must be positive, got {y}")
    if sing_exp <= -1.0:
        raise ValueError(f"sing_exp must exceed -1, got {sing_exp}")

    # breakpoints y*2^-levels, ..., y/2, ..., y*(1 - 2^-levels)
    fr = 2.0 ** -np.arange(levels, 0, -1)
    cuts = np.concatenate([fr, 1.0 - fr[-2::-1]]) * y

    total = 0.0
    # left endpoint panel, weight z^sing_exp
    a0 = cuts[0]
    xj, wj = _jacobi_rule(nodes, 0.0, float(sing_exp))
    z = 0.5 * a0 * (xj + 1.0)
    smooth = np.asarray(f(z)) * z ** (-sing_exp)
    total += (0.5 * a0) ** (sing_exp + 1.0) * np.sum(
        wj * smooth * (y - z) ** (mu - 1.0)
    )
    # interior panels, plain Gauss-Legendre
    xg, wg = _jacobi_rule(nodes, 0.0, 0.0)
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        half = 0.5 * (hi - lo)
        z = lo + half * (xg + 1.0)
        total += half * np.sum(wg * np.asarray(f(z)) * (y - z) ** (mu - 1.0))
    # right endpoint panel, weight (y-z)^(mu-1)
    b0 = cuts[-1]
    xj, wj = _jacobi_rule(nodes, mu - 1.0, 0.0)
    half = 0.5 * (y - b0)
    z = b0 + half * (xj + 1.0)
    total += half ** mu * np.sum(wj * np.asarray(f(z)))
    return float(total) / math.gamma(mu)


@lru_cache(maxsize=64)
def _central_coeffs(order: int, half: int):
    """Coefficients c_j on offsets -half..half with sum c_j g(x+jh) ~ h^order g^(order)."""
    offs = np.arange(-half, half + 1, dtype=float)
    npts = offs.size
    A = np.vander(offs, npts, increasing=True).T
    rhs = np.zeros(npts)
    rhs[order] = math.factorial(order)
    c = np.linalg.solve(A, rhs)
    return offs, c


def _unpack_hilfer_spec(spec):
    if isinstance(spec, EquationSpec):
        return float(spec.alpha), float(spec.beta), int(spec.s_count)
    alpha, beta, s = spec
    alpha, beta, s = float(alpha), float(beta), int(s)
    if not (s - 1 < alpha <= s):
        raise ValueError(f"need s-1 < alpha <= s, got alpha={alpha}, s={s}")
    if not (0.0 <= beta <= 1.0):
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    return alpha, beta, s


def hilfer_derivative(f, spec, y: float, *, sing_exp: float = 0.0,
                      inner_levels: int = 14, outer_levels: int = 11) -> float:
    """D^(alpha,beta) f at y by quadrature and central differencing.

    spec is an EquationSpec or an (alpha, beta, s_count) triple; f is a
    vectorized evaluator on (0, y] behaving like z^sing_exp times a
    smooth function near 0. Expected relative accuracy ~1e-5 on power
    functions (the composed inner-integral noise limits the step size).

    inner_levels/outer_levels grade the two integrals toward y = 0;
    raise them when f has structure below y 2^-levels (kernel traces at
    fixed x != 0 develop a boundary layer near tau ~ (x / t_flat)^(2n/a)
    that the default grading cannot see).
    """
    alpha, beta, s = _unpack_hilfer_spec(spec)
    y = float(y)
    if y <= 0.0:
        raise ValueError(f"y must be positive, got {y}")
    e_in = (1.0 - beta) * (s - alpha)
    e_out = beta * (s - alpha)

    if e_in == 0.0:
        g = f
        g_exp = sing_exp
    else:
        def g(tau):
            tau = np.atleast_1d(np.asarray(tau, dtype=float))
            return np.array(
                [rl_integral(f, e_in, t, sing_exp=sing_exp,
                             levels=inner_levels)
                 for t in tau]
            )
        g_exp = sing_exp + e_in

    half = s // 2 + 2  # 4th-order central stencil
    offs, coeffs = _central_coeffs(s, half)
    rel_h = QUAD_TOL ** (1.0 / (s + 4))

    def ds_g(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.empty(tau.shape)
        for i, t in enumerate(tau):
            h = t * rel_h
            vals = np.asarray(g(t + offs * h), dtype=float)
            out[i] = np.dot(coeffs, vals) / h ** s
        return out

    if e_out == 0.0:
        return float(ds_g(np.array([y]))[0])
    w_exp = g_exp - s
    if abs(g_exp - round(g_exp)) < 1e-12 and round(g_exp) >= 0:
        # integer leading exponent: d^s annihilates the monomials below
        # degree s, so the derivative stays bounded at 0 (Caputo on
        # smooth data lands here)
        w_exp = max(w_exp, 0.0)
    if w_exp <= -1.0:
        raise ValueError(
            f"inner derivative behaves like y^{w_exp:.3g} at 0: the outer "
            f"integral of order {e_out:.3g} diverges for this (beta, s)"
        )
    return rl_integral(ds_g, e_out, y, sing_exp=w_exp, nodes=10,
                       levels=outer_levels)


def x_derivative(u, order: int, x: float, h: float):
    """order-th derivative of u at x: central stencil + one Richardson level.

    Returns (value, err_estimate); the estimate is the Richardson
    correction term, so it degrades gracefully instead of failing.
    """
    order = int(order)
    if not (1 <= order <= 8):
        raise ValueError(f"order must lie in 1..8, got {order}")
    half = (order + 1) // 2 + 1  # minimal central stencil plus one point
    offs, coeffs = _central_coeffs(order, half)

    def apply(step):
        vals = np.asarray(u(x + offs * step), dtype=float)
        return np.dot(coeffs, vals) / step ** order

    # the widened symmetric stencil is 4th-order accurate, so the h -> h/2
    # pair extrapolates with weight 16/15
    d1 = apply(h)
    d2 = apply(0.5 * h)
    corr = (d2 - d1) / 15.0
    return d2 + corr, abs(corr)


def _default_x_step(order: int, x: float):
    # balances stencil roundoff (~1e-12 evaluator noise / h^order) against
    # truncation; scales are those of the kernel columns the oracles see
    return (0.04 + 0.012 * order) * (1.0 + 0.25 * abs(x))


def pde_residual(u, spec: EquationSpec, x: float, y: float, *,
                 sing_exp: float = 0.0, x_step: float = None,
                 inner_levels: int = 14, outer_levels: int = 11) -> float:
    """D^(alpha,beta)_y u - (-1)^(n-1) d^2n u/dx^2n at (x, y), normalized.

    u is an evaluator u(x, y) vectorized in each argument separately.
    The result is divided by max(1, |time-derivative term|). The levels
    pass through to hilfer_derivative; the x stencil must not straddle
    x = 0 when u has a derivative seam there (pick x_step < |x|/4).
    """
    dterm = hilfer_derivative(
        lambda yy: u(x, yy), (spec.alpha, spec.beta, spec.s_count), y,
        sing_exp=sing_exp, inner_levels=inner_levels,
        outer_levels=outer_levels,
    )
    order = 2 * spec.n
    h = x_step if x_step is not None else _default_x_step(order, x)
    sterm, _ = x_derivative(lambda xx: u(xx, y), order, x, h)
    res = dterm - (-1.0) ** (spec.n - 1) * sterm
    return res / max(1.0, abs(dterm))


def general_residual(u, g: GeneralEquationSpec, x: float, y: float, *,
                     sing_exp_y: float = 0.0, sing_exp_x: float = 0.0) -> float:
    """Residual of x^m D^(a1,b1)_y u - d y^k D^(a2,b2)_x u, normalized.

    The second Hilfer derivative acts in x (lower terminal 0), so u must
    be evaluable on (0, x] x (0, y].
    """
    dy = hilfer_derivative(
        lambda yy: u(x, yy), (g.alpha1, g.beta1, g.q), y, sing_exp=sing_exp_y
    )
    dx = hilfer_derivative(
        lambda xx: u(xx, y), (g.alpha2, g.beta2, g.p), x, sing_exp=sing_exp_x
    )
    lead = x ** g.m * dy
    res = lead - g.d * y ** g.k * dx
    return res / max(1.0, abs(lead))
