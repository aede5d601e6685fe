"""High-precision reference summers, independent of the package internals.

Everything here is brute-force mpmath at >= 50 digits and is used to
freeze fixture values and to spot-check properties. Rows whose gamma
argument steps through poles (delta = j/2) produce exact zero terms at
every other index, so a single small term means nothing: the stop rule
requires a run of consecutive negligible terms past k > |z|.
"""

import mpmath

DPS = 60


def _sum_terms(term, z_mag, dps, need=6, hard_cap=200000):
    s = mpmath.mpf(0)
    small = 0
    cut = mpmath.mpf(10) ** (-dps + 5)
    k = 0
    while k < hard_cap:
        t = term(k)
        s += t
        if abs(t) < cut * max(1, abs(s)):
            small += 1
            if small >= need and k > z_mag + 10:
                return s
        else:
            small = 0
        k += 1
    raise RuntimeError("oracle failed to converge")


def wright_phi_ref(delta, eps, z, dps=DPS):
    """phi(-delta, eps; z) = sum z^k / (k! Gamma(-delta k + eps))."""
    with mpmath.workdps(dps):
        d = mpmath.mpf(delta)
        e = mpmath.mpf(eps)
        zz = mpmath.mpmathify(z)

        def term(k):
            return zz ** k / mpmath.factorial(k) * mpmath.rgamma(-d * k + e)

        return _sum_terms(term, abs(zz), dps)


def gen_wright_ref(mu, a, nu, b, z, dps=DPS):
    """W(z) = sum z^k / (Gamma(mu k + a) Gamma(nu k + b)), mu + nu > 0."""
    with mpmath.workdps(dps):
        m = mpmath.mpf(mu)
        aa = mpmath.mpf(a)
        n = mpmath.mpf(nu)
        bb = mpmath.mpf(b)
        zz = mpmath.mpmathify(z)

        def term(k):
            return zz ** k * mpmath.rgamma(m * k + aa) * mpmath.rgamma(n * k + bb)

        return _sum_terms(term, abs(zz), dps)


def mittag_leffler_ref(alpha, z, dps=DPS):
    """E_alpha(z) = sum z^k / Gamma(alpha k + 1)."""
    with mpmath.workdps(dps):
        al = mpmath.mpf(alpha)
        zz = mpmath.mpmathify(z)

        def term(k):
            return zz ** k * mpmath.rgamma(al * k + 1)

        return _sum_terms(term, abs(zz), dps)


def recip_gamma_ref(x, dps=DPS):
    with mpmath.workdps(dps):
        return mpmath.rgamma(mpmath.mpf(x))
