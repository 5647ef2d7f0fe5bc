"""Regenerate the frozen reference values in ``oracles.py`` with mpmath.

Run ``python tests/generate_oracles.py`` and paste the output. Every value is
computed without the package: Gamma ratios at 40 digits, and the constant of
``(-Delta)^s |x|^beta`` from the second-difference integral at ``x = 1``
(series near ``h = 0`` and for ``h > 4``, tanh-sinh quadrature in between).
"""

import mpmath as mp

mp.mp.dps = 40


def c_ns(n, s):
    return 4**s * mp.gamma(mp.mpf(n) / 2 + s) / (mp.pi ** (mp.mpf(n) / 2) * abs(mp.gamma(-s)))


def torsion(n, s):
    return mp.gamma(mp.mpf(n) / 2) / (4**s * mp.gamma(1 + s) * mp.gamma(mp.mpf(n) / 2 + s))


def kappa(n, s):
    return mp.gamma(mp.mpf(n) / 2) / (4**s * mp.pi ** (mp.mpf(n) / 2) * mp.gamma(s) ** 2)


def power_constant(s, b):
    s, b = mp.mpf(s), mp.mpf(b)
    a, H = mp.mpf(1) / 2, mp.mpf(4)
    f = lambda h: (2 - (1 + h) ** b - abs(1 - h) ** b) / h ** (1 + 2 * s)
    mid = mp.quad(f, [a, 1, 2, H])
    head = -2 * mp.nsum(lambda k: mp.binomial(b, 2 * k) * a ** (2 * k - 2 * s) / (2 * k - 2 * s), [1, mp.inf])
    tail = 2 * H ** (-2 * s) / (2 * s) - 2 * mp.nsum(
        lambda k: mp.binomial(b, 2 * k) * H ** (b - 2 * k - 2 * s) / (2 * k + 2 * s - b), [0, mp.inf])
    return c_ns(1, s) * (head + mid + tail)


if __name__ == "__main__":
    F = lambda v: mp.nstr(v, 20)
    print("C_NS = {")
    for n, s in [(1, 0.25), (1, 0.5), (1, 0.75), (3, 0.3), (2, 0.6)]:
        print(f"    ({n}, {s}): {F(c_ns(n, mp.mpf(s)))},")
    print("}\nTORSION = {")
    for n, s in [(1, 0.25), (1, 0.5), (1, 0.75), (3, 0.3), (2, 0.6)]:
        print(f"    ({n}, {s}): {F(torsion(n, mp.mpf(s)))},")
    print("}\nKAPPA = {")
    for n, s in [(1, 0.25), (1, 0.5), (3, 0.3)]:
        print(f"    ({n}, {s}): {F(kappa(n, mp.mpf(s)))},")
    print("}\nGAMMA_BETA = {")
    for s, b in [(0.5, 0.6), (0.5, 0.75), (0.25, 0.3), (0.75, 1.2), (0.25, 0.1)]:
        print(f"    ({s}, {b}): {F(power_constant(s, b))},")
    print("}")
