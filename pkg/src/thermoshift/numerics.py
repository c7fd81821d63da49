"""Small numeric helpers shared across modules: stable log-space sums,
field-generic Gaussian elimination, least squares on a line, Aitken
extrapolation, and exact power-of-base exponent extraction.
"""

from __future__ import annotations

import math
from fractions import Fraction


def logsumexp(values) -> float:
    vals = list(values)
    if not vals:
        return float("-inf")
    m = max(vals)
    if m == float("-inf"):
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in vals))


def log_fraction(x) -> float:
    """log of an int or Fraction, safe for values far outside float range."""
    if isinstance(x, Fraction):
        return _log_int(x.numerator) - _log_int(x.denominator)
    return _log_int(x)


def _log_int(n: int) -> float:
    if n <= 0:
        raise ValueError("log of nonpositive integer")
    try:
        return math.log(n)
    except OverflowError:
        return math.log(float(n >> (n.bit_length() - 53)) ) + (n.bit_length() - 53) * math.log(2)


def power_exponent(value, base: int):
    """If value == base**k for an integer k (value an int or Fraction),
    return k, else None.  base >= 2."""
    if base < 2:
        return None
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return power_exponent(value.numerator, base)
        if value.numerator == 1:
            k = power_exponent(value.denominator, base)
            return None if k is None else -k
        return None
    n = int(value)
    if n <= 0:
        return None
    k = 0
    while n % base == 0:
        n //= base
        k += 1
    return k if n == 1 else None


def common_power_base(values) -> int | None:
    """Smallest integer base b >= 2 with every value an exact power of b;
    None if no such base.  Values of 1 are compatible with every base."""
    nontrivial = sorted({v for v in values if v != 1})
    if not nontrivial:
        return 2
    first = nontrivial[0]
    if isinstance(first, Fraction):
        first = first.numerator if first.numerator > 1 else first.denominator
    # candidate bases are roots of the smallest nontrivial value
    candidates = []
    for k in range(int(first).bit_length(), 0, -1):
        root = round(int(first) ** (1.0 / k))
        for r in (root - 1, root, root + 1):
            if r >= 2 and r ** k == first:
                candidates.append(r)
    for b in candidates:
        if all(power_exponent(v, b) is not None for v in nontrivial):
            return b
    return None


def gaussian_solve(matrix, rhs):
    """Solve A x = b by Gaussian elimination with partial pivoting.

    Works over floats and Fractions alike (entries must support +,-,*,/).
    Raises ValueError on a singular system.
    """
    n = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            raise ValueError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        for r in range(col + 1, n):
            if a[r][col] == 0:
                continue
            factor = a[r][col] / inv
            for c in range(col, n + 1):
                a[r][c] = a[r][c] - factor * a[col][c]
    xs = [None] * n
    for row in range(n - 1, -1, -1):
        s = a[row][n]
        for c in range(row + 1, n):
            s = s - a[row][c] * xs[c]
        xs[row] = s / a[row][row]
    return xs


def fit_line(xs, ys) -> tuple[float, float, float]:
    """Least-squares line fit; returns (slope, intercept, r_squared)."""
    n = len(xs)
    if n < 2:
        return 0.0, (ys[0] if ys else 0.0), 1.0
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0:
        return 0.0, my, 1.0
    slope = sxy / sxx
    intercept = my - slope * mx
    syy = math.fsum((y - my) ** 2 for y in ys)
    if syy == 0:
        return slope, intercept, 1.0
    ss_res = math.fsum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return slope, intercept, max(0.0, 1.0 - ss_res / syy)


def aitken_last(seq) -> float:
    """Aitken delta-squared acceleration from the last three terms; falls
    back to the last term when the second difference is negligible."""
    s = list(seq)
    if len(s) < 3:
        return s[-1]
    x0, x1, x2 = s[-3], s[-2], s[-1]
    d2 = x2 - 2 * x1 + x0
    if abs(d2) < 1e-13 * max(1.0, abs(x2)):
        return x2
    return x2 - (x2 - x1) ** 2 / d2
