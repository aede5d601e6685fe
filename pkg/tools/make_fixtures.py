"""Freeze regression fixtures for the series evaluators.

Run from the repository root:

    python3 tools/make_fixtures.py

Values come from the brute-force 60-digit summers in tests/oracles.py and
are written to tests/fixtures/*.txt at 34 significant digits, one fixture
per line, '#' comments. Parameters are written with full double precision
(repr), so reading them back reproduces the exact binary values the
oracle saw. Regenerating should be a no-op unless fixtures are added.
"""

import importlib.util
import pathlib

import mpmath

ROOT = pathlib.Path(__file__).resolve().parents[1]

_spec = importlib.util.spec_from_file_location(
    "oracles", ROOT / "tests" / "oracles.py"
)
oracles = importlib.util.module_from_spec(_spec)
_spec.loader.exec_module(oracles)


def _fmt(x):
    return mpmath.nstr(x, 34, strip_zeros=False)


WRIGHT_PHI = [
    # (delta, eps, z) -- first three pin classical identities and the
    # complex-ray case, the rest spread over the kernel-relevant range
    (0.3, 1.2, 0.0 + 0.0j),
    (0.5, 0.5, -2.0 + 0.0j),
    (0.25, 0.75, complex(-1.0 / 2 ** 0.5, -1.0 / 2 ** 0.5)),
    (0.25, 0.75, -3.0 + 0.0j),
    (0.4, 1.0, -5.0 + 0.0j),
    (0.2, 0.8, -4.0 + 3.0j),
    (0.75, 1.5, -2.5 + 0.0j),
    (0.5, 1.0, 1.5 + 0.0j),
    (1.0 / 3.0, 0.9, -4.0 + 2.0j),
    (0.125, 2.0, -8.0 + 0.0j),
]

GEN_WRIGHT = [
    # (mu, a, nu, b, z); mu may be negative as long as mu + nu > 0
    (-0.5, 1.0, 1.5, 1.0, 1.0 + 0.0j),
    (1.0, 1.0, 1.0, 1.0, 0.7 + 0.0j),
    (1.0, 1.0, 1.0, 1.0, 2.3 + 0.0j),
    (-0.3, 0.7, 1.2, 1.1, -2.0 + 0.0j),
    (0.5, 0.5, 0.5, 1.3, -3.0 + 1.0j),
    (2.0, 0.3, -0.9, 1.7, 4.0 + 0.0j),
    (1.0, 2.0, -0.5, 0.5, -1.5 + 0.0j),
]

MITTAG_LEFFLER = [
    # (alpha, z), all inside the documented certification radius
    (1.0, 0.3 + 0.0j),
    (2.0, -1.0 + 0.0j),
    (0.8, -1.5 + 0.0j),
    (0.6, -2.5 + 0.0j),
    (1.5, -7.0 + 0.0j),
    (0.9, -12.0 + 3.0j),
    (1.2, 5.0 + 0.0j),
]


def write_wright_phi(path):
    lines = [
        "# wright_phi fixtures: delta eps re(z) im(z) re(val) im(val)",
        "# 60-digit brute-force series oracle, 34 digits kept; regenerate",
        "# with tools/make_fixtures.py",
    ]
    for delta, eps, z in WRIGHT_PHI:
        v = oracles.wright_phi_ref(delta, eps, mpmath.mpc(z.real, z.imag))
        v = mpmath.mpc(v)
        lines.append(
            f"{delta!r} {eps!r} {z.real!r} {z.imag!r} "
            f"{_fmt(v.real)} {_fmt(v.imag)}"
        )
    path.write_text("\n".join(lines) + "\n")


def write_gen_wright(path):
    lines = [
        "# gen_wright fixtures: mu a nu b re(z) im(z) re(val) im(val)",
        "# 60-digit brute-force series oracle, 34 digits kept; regenerate",
        "# with tools/make_fixtures.py",
    ]
    for mu, a, nu, b, z in GEN_WRIGHT:
        v = oracles.gen_wright_ref(mu, a, nu, b, mpmath.mpc(z.real, z.imag))
        v = mpmath.mpc(v)
        lines.append(
            f"{mu!r} {a!r} {nu!r} {b!r} {z.real!r} {z.imag!r} "
            f"{_fmt(v.real)} {_fmt(v.imag)}"
        )
    path.write_text("\n".join(lines) + "\n")


def write_mittag_leffler(path):
    lines = [
        "# mittag_leffler fixtures: alpha re(z) im(z) re(val) im(val)",
        "# 60-digit brute-force series oracle, 34 digits kept; regenerate",
        "# with tools/make_fixtures.py",
    ]
    for alpha, z in MITTAG_LEFFLER:
        v = oracles.mittag_leffler_ref(alpha, mpmath.mpc(z.real, z.imag))
        v = mpmath.mpc(v)
        lines.append(
            f"{alpha!r} {z.real!r} {z.imag!r} {_fmt(v.real)} {_fmt(v.imag)}"
        )
    path.write_text("\n".join(lines) + "\n")


def main():
    fixdir = ROOT / "tests" / "fixtures"
    fixdir.mkdir(parents=True, exist_ok=True)
    write_wright_phi(fixdir / "wright_phi.txt")
    write_gen_wright(fixdir / "gen_wright.txt")
    write_mittag_leffler(fixdir / "mittag_leffler.txt")
    n = len(WRIGHT_PHI) + len(GEN_WRIGHT) + len(MITTAG_LEFFLER)
    print(f"wrote {n} fixtures to {fixdir}")


if __name__ == "__main__":
    main()
