"""Growth of the quantization error: dimension estimates and n^2 V_n.

Inside one level ``3**l <= n < 3**(l+1)`` write ``n = x * 3**l``; then
``n^2 V_n = x^2 (13 - 4x) / 54`` exactly, so the scaled error depends on
``x`` alone and the limit ``n^2 V_n`` cannot exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .optimal import ell, quantization_error

SCALED_LOWER = Fraction(1, 54)
SCALED_UPPER = Fraction(3, 2)


@dataclass(frozen=True)
class DimensionRecord:
    n: int
    vn: Fraction
    dim_est: float
    scaled: Fraction


def dimension_record(n: int) -> DimensionRecord:
    vn = quantization_error(n)
    return DimensionRecord(n, vn, dim_estimate(n, vn), n * n * vn)


def dim_estimate(n: int, vn: Fraction | None = None) -> float:
    """``2 ln n / (-ln V_n)``; logs of the exact rational are taken piecewise."""
    if vn is None:
        vn = quantization_error(n)
    log_v = math.log(vn.numerator) - math.log(vn.denominator)
    return 2 * math.log(n) / -log_v


def dimension_scan(n_max: int, n_min: int = 2) -> list[DimensionRecord]:
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    return [dimension_record(n) for n in range(max(n_min, 1), n_max + 1)]


def f(x: Fraction | int) -> Fraction:
    """``x^2 (13 - 4x) / 54`` on ``[1, 2]``."""
    x = Fraction(x)
    if not 1 <= x <= 2:
        raise ValueError(f"x={x} outside [1, 2]")
    return scaled_profile(x)


def scaled_profile(x: Fraction) -> Fraction:
    """``n^2 V_n`` as a function of ``x = n / 3**ell(n)``, valid on all of ``[1, 3]``."""
    x = Fraction(x)
    return x * x * (13 - 4 * x) / 54


def accumulation_scan(x: Fraction | int, levels: int) -> list[tuple[int, int, Fraction]]:
    """Rows ``(l, n_l, n_l^2 V_{n_l})`` with ``n_l = floor(x 3^l)`` for ``l = 1..levels``."""
    x = Fraction(x)
    if not 1 <= x <= 2:
        raise ValueError(f"x={x} outside [1, 2]")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    rows = []
    for l in range(1, levels + 1):
        n = math.floor(x * 3**l)
        rows.append((l, n, n * n * quantization_error(n)))
    return rows


def level_range(level: int) -> tuple[tuple[int, Fraction], tuple[int, Fraction]]:
    """Exact ``(argmin, min)`` and ``(argmax, max)`` of ``n^2 V_n`` over one full level."""
    lo = hi = None
    for n in range(3**level, 3 ** (level + 1)):
        s = n * n * quantization_error(n)
        if lo is None or s < lo[1]:
            lo = (n, s)
        if hi is None or s > hi[1]:
            hi = (n, s)
    return lo, hi


def f_image() -> tuple[Fraction, Fraction]:
    """``f([1, 2]) = [f(1), f(2)] = [1/6, 10/27]``; f is increasing there."""
    return f(1), f(2)


def coefficient_range() -> tuple[Fraction, Fraction]:
    """Set of accumulation points of ``n^2 V_n``.

    ``x = n / 3**ell(n)`` ranges densely over ``[1, 3)``, not only ``[1, 2]``:
    the profile ``x^2 (13 - 4x) / 54`` rises to its maximum at ``x = 13/6``
    and falls back to ``1/6`` at ``x = 3``.  Hence the interval is
    ``[1/6, scaled_profile(13/6)] = [1/6, 2197/5832]``, which strictly
    contains ``f([1, 2])``; n = 19 already gives ``n^2 V_n > 10/27``.
    """
    return Fraction(1, 6), scaled_profile(Fraction(13, 6))


def sandwich_holds(n: int, slack: float = 1e-9) -> bool:
    """``1 + ln(3/2)/(-2 ln n) <= ln V_n / (-2 ln n) <= 1 + ln(1/54)/(-2 ln n)``."""
    vn = quantization_error(n)
    log_v = math.log(vn.numerator) - math.log(vn.denominator)
    den = -2 * math.log(n)
    mid = log_v / den
    return math.log(1.5) / den + 1 - slack <= mid <= math.log(1 / 54) / den + 1 + slack


def scaled_bounds_hold(n: int) -> bool:
    s = n * n * quantization_error(n)
    return SCALED_LOWER <= s <= SCALED_UPPER


__all__ = [
    "DimensionRecord",
    "accumulation_scan",
    "coefficient_range",
    "dim_estimate",
    "dimension_record",
    "dimension_scan",
    "ell",
    "f",
    "f_image",
    "level_range",
    "sandwich_holds",
    "scaled_bounds_hold",
    "scaled_profile",
]
