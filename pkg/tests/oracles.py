"""Independent oracles, kept separate from the engine's code paths.

`bernoulli_at` re-derives Bernoulli numbers with the Akiyama-Tanigawa
triangle (a different algorithm from the engine's binomial recurrence).
`one_point_oracle` expands ((t/2)/sin(t/2))^(k+1) by brute force: a
hand-coded power-series reciprocal (long division), integer powers by
convolution, and Vandermonde interpolation in k -- no exp/log anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial


def bernoulli_at(n: int) -> Fraction:
    """Akiyama-Tanigawa value, adjusted to the B_1 = -1/2 convention."""
    a = [Fraction(0)] * (n + 1)
    b = Fraction(0)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        b = a[0]
    return -b if n == 1 else b


def sinc_half_coeffs(n: int) -> list[Fraction]:
    """Coefficients of t^0..t^n for sin(t/2)/(t/2)."""
    out = [Fraction(0)] * (n + 1)
    m = 0
    while 2 * m <= n:
        out[2 * m] = Fraction((-1) ** m, 4**m * factorial(2 * m + 1))
        m += 1
    return out


def series_reciprocal(s: list[Fraction]) -> list[Fraction]:
    """Long-division reciprocal of a series with s[0] = 1."""
    assert s[0] == 1
    n = len(s) - 1
    c = [Fraction(0)] * (n + 1)
    c[0] = Fraction(1)
    for k in range(1, n + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += s[i] * c[k - i]
        c[k] = -acc
    return c


def series_multiply(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: n + 1 - i]):
            out[i + j] += x * y
    return out


def _solve_vandermonde(points: list[int], values: list[Fraction]) -> list[Fraction]:
    """Solve sum_i a_i x^i = v(x) on the given sample points."""
    n = len(points)
    m = [[Fraction(p) ** i for i in range(n)] + [values[r]] for r, p in enumerate(points)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[pivot] = m[pivot], m[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def one_point_oracle(g_max: int) -> dict[tuple[int, int], Fraction]:
    """Brute-force values of [t^{2g} k^i] ((t/2)/sin(t/2))^{k+1}.

    The t^{2g} coefficient of the (m+1)-st power is a degree-g polynomial in
    m; sampling m = 0..g and interpolating recovers the k-monomial
    coefficients.
    """
    n = 2 * g_max
    recip = series_reciprocal(sinc_half_coeffs(n))
    powers = [[Fraction(1)] + [Fraction(0)] * n]  # recip^0
    for _ in range(g_max + 1):
        powers.append(series_multiply(powers[-1], recip, n))
    out: dict[tuple[int, int], Fraction] = {}
    for g in range(1, g_max + 1):
        samples = [powers[m + 1][2 * g] for m in range(g + 1)]
        coeffs = _solve_vandermonde(list(range(g + 1)), samples)
        for i, c in enumerate(coeffs):
            out[(g, i)] = c
    return out
