"""Profile of the fundamental kernel and its two structural identities.

Prints a short table of Gamma_b across x at two heights, then checks the
self-similar collapse (values at different y fall onto one curve in the
scaled variable) and the mass identity (the line integral of the kernel
is an exact power of y).
"""

import numpy as np

from hilferpde import (
    EquationSpec,
    eq18_identity,
    gamma_b_grid,
    kernel_exponent,
    kernel_spec,
)


def main():
    eq = EquationSpec(n=2, alpha=0.8, beta=1.0)
    b = kernel_exponent(eq, 0)
    ks = kernel_spec(eq, b)
    print(f"equation: n={eq.n}, alpha={eq.alpha}, beta={eq.beta}")
    print(f"kernel exponent b = {b:+.4f}, calibrated sign = {ks.sign:+d}\n")

    xs = np.linspace(0.0, 4.0, 9)
    print("x        Gamma_b(x, y=0.5)   Gamma_b(x, y=1.0)")
    v05, _ = gamma_b_grid(ks, xs, 0.5)
    v10, _ = gamma_b_grid(ks, xs, 1.0)
    for x, a, c in zip(xs, v05, v10):
        print(f"{x:4.1f}   {a:+.10e}   {c:+.10e}")

    # scaling collapse: y^-b Gamma_b(t y^(alpha/2n), y) depends on t only
    delta = eq.alpha / (2.0 * eq.n)
    t = np.linspace(0.2, 2.6, 5)
    print("\nt        y^-b Gamma at y=0.5    same at y=1.5")
    for ti in t:
        lo, _ = gamma_b_grid(ks, np.array([ti * 0.5 ** delta]), 0.5)
        hi, _ = gamma_b_grid(ks, np.array([ti * 1.5 ** delta]), 1.5)
        print(f"{ti:4.1f}   {0.5 ** -b * lo[0]:+.12e}   "
              f"{1.5 ** -b * hi[0]:+.12e}")

    print("\nmass identity, quadrature vs closed power of y:")
    for y in (0.5, 1.0, 2.0):
        lhs, rhs = eq18_identity(eq, b, 0, y)
        print(f"  y={y:3.1f}:  lhs={lhs:.12f}  rhs={rhs:.12f}  "
              f"rel dev {abs(lhs - rhs) / abs(rhs):.2e}")


if __name__ == "__main__":
    main()
