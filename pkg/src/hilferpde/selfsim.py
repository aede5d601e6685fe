"""Self-similar series solutions of the degenerate two-variable equation.

The equation x^m D^(a1,b1)_y u = d y^k D^(a2,b2)_x u admits separated
power-series solutions

    u_j(x, y) = y^b t^(gamma_j) sum_n c_n^j t^n,
    t = x^(m+a2) y^(-(a1+k)),   gamma_j = (a2 - j) / (a2 + m),

one branch per j = 1..p. The branch exponents kill the falling factorial
of the x-side power rule at n = 0, and the coefficients telescope the
two power rules against each other; b is free. The coefficient ratio
shrinks like l^(a1-a2), so the t-series is entire, but a truncated table
is only trustworthy while its terms still decrease; the evaluator
enforces that empirically (see _validated_radius).

Coefficient products overflow double range once the gamma arguments pass
a few tens, so the recurrence runs in log space with explicit sign
bookkeeping. A pole in a denominator gamma zeroes the factor through the
reciprocal gamma (the series degenerates to a polynomial); a pole in a
numerator gamma leaves the coefficient undefined and is reported.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn

from .fracops import GeneralEquationSpec, hilfer_derivative
from .specfun import WrightParams, recip_gamma, wright_phi


@dataclass(frozen=True)
class SimilarityExponents:
    """Exponent bundle of the ansatz: u = y^b (x^a y^y_exp)^(n + gamma_j)."""

    a: float
    y_exp: float
    gamma: tuple
    b: float

    def __post_init__(self):
        if not (self.a > 0.0):
            raise ValueError(f"x-exponent must be positive, got {self.a}")
        if not (self.y_exp < 0.0):
            raise ValueError(f"y-exponent must be negative, got {self.y_exp}")
        if len(self.gamma) == 0:
            raise ValueError("need at least one branch exponent")


@dataclass(frozen=True)
class CoefficientTable:
    """Series coefficients c_n^j for one branch, c[0] = c0."""

    j: int
    c: np.ndarray
    c0: float

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float))
        if self.j < 1:
            raise ValueError(f"branch index must be >= 1, got {self.j}")
        if self.c.ndim != 1 or self.c.size < 1:
            raise ValueError("coefficient table must be a nonempty 1-D array")
        if not np.all(np.isfinite(self.c)):
            raise ValueError("coefficients must be finite")
        if self.c[0] != self.c0:
            raise ValueError("c[0] must equal the seed c0")


def similarity_exponents(g: GeneralEquationSpec, b: float
                         ) -> SimilarityExponents:
    """Exponents (a, y_exp, gamma_1..gamma_p) of the similarity ansatz."""
    a = g.m + g.alpha2
    gamma = tuple((g.alpha2 - j) / (g.alpha2 + g.m) for j in range(1, g.p + 1))
    return SimilarityExponents(
        a=a, y_exp=-(g.alpha1 + g.k), gamma=gamma, b=float(b)
    )


def _is_gamma_pole(x: float) -> bool:
    xr = round(x)
    return xr <= 0 and abs(x - xr) < 1e-12


def coefficients(g: GeneralEquationSpec, e: SimilarityExponents, j: int,
                 N: int, c0: float = 1.0) -> CoefficientTable:
    """Iterate the coefficient recurrence for branch j up to order N.

    Each step multiplies by d * G(y-num) G(x-num) / (G(y-den) G(x-den))
    where the y-arguments advance by the y-exponent of the ansatz and the
    x-arguments by its x-exponent; accumulation is in log space.
    """
    j = int(j)
    N = int(N)
    if not (1 <= j <= g.p):
        raise ValueError(f"branch index must lie in 1..{g.p}, got {j}")
    if N < 0:
        raise ValueError(f"truncation order must be >= 0, got {N}")
    gj = e.gamma[j - 1]
    c = np.zeros(N + 1)
    c[0] = c0
    lg = 0.0
    dsgn = 1.0 if g.d > 0 else -1.0
    sgn = 1.0
    for l in range(1, N + 1):
        num_y = e.y_exp * (l - 1 + gj) + e.b + 1.0
        den_y = num_y - g.alpha1
        num_x = e.a * l - j + 1.0
        den_x = e.a * l + g.alpha2 - j + 1.0
        num_pole = _is_gamma_pole(num_y) or _is_gamma_pole(num_x)
        if _is_gamma_pole(den_y) or _is_gamma_pole(den_x):
            if num_pole:
                # pole/pole has a finite nonzero limit (integer orders);
                # refusing beats silently truncating a live series
                raise ValueError(
                    f"simultaneous gamma poles at step l={l} (branch "
                    f"j={j}): limiting factor not supported"
                )
            # reciprocal gamma kills the factor: the series degenerates
            # to a polynomial, every later matching reads 0 = 0
            break
        if num_pole:
            raise ValueError(
                f"numerator gamma pole at step l={l} (branch j={j}): "
                f"coefficient undefined for these parameters"
            )
        lg += (gammaln(num_y) + gammaln(num_x)
               - gammaln(den_y) - gammaln(den_x))
        sgn *= (gammasgn(num_y) * gammasgn(num_x)
                * gammasgn(den_y) * gammasgn(den_x) * dsgn)
        c[l] = sgn * math.exp(lg) * c0
    return CoefficientTable(j=j, c=c, c0=float(c0))


def _validated_radius(c: np.ndarray) -> float:
    """Largest t at which the tail of the stored table still decreases.

    Ratio-test monitor: beyond 1/max(tail ratios) the last terms grow and
    the truncated sum stops being a meaningful approximation. Trailing
    zeros mean the series degenerated to a polynomial (radius infinite).
    """
    mag = np.abs(np.asarray(c, dtype=float))
    if mag.size < 2:
        return math.inf
    if mag[-1] == 0.0:
        return math.inf
    lo = max(1, mag.size // 2)
    ratios = mag[lo:] / mag[lo - 1:-1]
    top = float(np.max(ratios))
    return math.inf if top == 0.0 else 1.0 / top


def _ansatz_value(e: SimilarityExponents, table: CoefficientTable,
                  x: float, y: float):
    """Raw truncated-ansatz value and its last-term magnitude at (x, y)."""
    gj = e.gamma[table.j - 1]
    t = x ** e.a * y ** e.y_exp
    pre = y ** e.b * t ** gj
    powers = t ** np.arange(table.c.size)
    terms = table.c * powers
    return pre * float(np.sum(terms)), abs(pre) * abs(float(terms[-1])), t


def eval_selfsimilar(g: GeneralEquationSpec, e: SimilarityExponents,
                     table: CoefficientTable, x: float, y: float):
    """Branch solution u_j(x, y) from a truncated coefficient table.

    Returns (value, tail_estimate); the tail heuristic is the magnitude
    of the last retained term. Arguments with t beyond the table's
    validated radius are refused rather than summed meaninglessly.
    """
    x = float(x)
    y = float(y)
    if not (x > 0.0):
        raise ValueError(f"x must be positive, got {x}")
    if not (y > 0.0):
        raise ValueError(f"y must be positive, got {y}")
    value, tail, t = _ansatz_value(e, table, x, y)
    radius = _validated_radius(table.c)
    if t > radius:
        raise ValueError(
            f"t={t:.6g} lies beyond the table's validated radius "
            f"{radius:.6g}; extend the table before evaluating here"
        )
    return value, tail


def branch_residual(g: GeneralEquationSpec, e: SimilarityExponents,
                    table: CoefficientTable, x: float, y: float) -> float:
    """Quadrature residual of the truncated branch at (x, y), normalized.

    Both Hilfer derivatives run through the fracops quadrature on the
    truncated ansatz. One regularization is needed on the x-side: the
    branch condition makes the leading term's x-derivative an identical
    zero (a reciprocal-gamma zero), yet the literal composed integral of
    that single power diverges whenever the outer order is positive; the
    term is subtracted before quadrature and its zero added back. The
    y-side runs unmodified, so b must be large enough that every
    retained power clears the composition (worst exponent is checked,
    fracops raises otherwise).
    """
    x = float(x)
    y = float(y)
    gj = e.gamma[table.j - 1]
    N = table.c.size - 1
    rho_last = e.y_exp * (N + gj) + e.b

    def u_of_y(taus):
        taus = np.asarray(taus, dtype=float)
        t = x ** e.a * taus ** e.y_exp
        return (taus ** e.b * t ** gj
                * np.polynomial.polynomial.polyval(t, table.c))

    def u_of_x_rest(xs):
        xs = np.asarray(xs, dtype=float)
        t = xs ** e.a * y ** e.y_exp
        return (y ** e.b * t ** gj
                * np.polynomial.polynomial.polyval(t, table.c)
                - y ** e.b * table.c[0] * t ** gj)

    dyv = hilfer_derivative(u_of_y, (g.alpha1, g.beta1, g.q), y,
                            sing_exp=rho_last)
    dxv = hilfer_derivative(u_of_x_rest, (g.alpha2, g.beta2, g.p), x,
                            sing_exp=e.a * (1.0 + gj))
    lead = x ** g.m * dyv
    return (lead - g.d * y ** g.k * dxv) / max(1.0, abs(lead))


def eval_wright_case(p_order: int, alpha: float, beta_unused, b: float,
                     c_root: complex, x: float, y: float, *,
                     tol: float = 1e-12) -> complex:
    """Closed Wright-function branch for the constant-coefficient case.

    For m = k = 0, alpha2 = p integer, the branch combination with root
    weights collapses to u = y^b phi(-alpha/p, b+1, c x y^(-alpha/p)),
    c^p = d. The composed power rule is type-free, so the same expression
    solves the equation for every type parameter; beta_unused records
    that in the signature.
    """
    p_order = int(p_order)
    if p_order < 2:
        raise ValueError(f"spatial order must be >= 2, got {p_order}")
    if not (y > 0.0):
        raise ValueError(f"y must be positive, got {y}")
    cp = complex(c_root) ** p_order
    if min(abs(cp - 1.0), abs(cp + 1.0)) > 1e-12:
        raise ValueError(
            f"c_root^{p_order} = {cp:.6g} is not a unit root of d = +/-1"
        )
    z = complex(c_root) * x * y ** (-alpha / p_order)
    sv = wright_phi(WrightParams(alpha / p_order, b + 1.0), z, tol)
    return y ** b * sv.value


def wright_branch_seed(g: GeneralEquationSpec, e: SimilarityExponents,
                       j: int) -> float:
    """Seed c0 that aligns branch j with the generalized-Wright form.

    For m = k = 0 the closed product telescopes, and with this seed the
    series equals W((-a1, -a1 + a1 j/a2 + b + 1), (a2, a2 - j + 1); d t)
    term by term.
    """
    if not (g.m == 0.0 and g.k == 0.0):
        raise ValueError("the Wright-form seed exists only for m = k = 0")
    arg1 = -g.alpha1 * (1.0 - j / g.alpha2) + e.b + 1.0
    arg2 = g.alpha2 - j + 1.0
    return float(recip_gamma(arg1) * recip_gamma(arg2))
