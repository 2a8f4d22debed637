"""Exact arithmetic in Q and Q(sqrt 3).

Rationals are plain :class:`fractions.Fraction` values.  Elements of the
quadratic field are :class:`QuadNum` instances stored as ``(p + q*sqrt3)/d``
with integer ``p, q`` and ``d > 0``, reduced so that ``gcd(p, q, d) == 1``.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import NamedTuple, Union

Rat = Fraction
RationalLike = Union[int, Fraction]

SQRT3_SYMBOL = "√3"


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


class QuadNum:
    """An element ``a + b*sqrt(3)`` of Q(sqrt 3) with rational ``a`` and ``b``."""

    __slots__ = ("_p", "_q", "_d")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0) -> None:
        a = Fraction(a)
        b = Fraction(b)
        d = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(a.numerator * (d // a.denominator), b.numerator * (d // b.denominator), d)

    @classmethod
    def _raw(cls, p: int, q: int, d: int) -> QuadNum:
        obj = object.__new__(cls)
        obj._set(p, q, d)
        return obj

    def _set(self, p: int, q: int, d: int) -> None:
        if d < 0:
            p, q, d = -p, -q, -d
        g = math.gcd(p, q, d)
        if g > 1:
            p //= g
            q //= g
            d //= g
        self._p, self._q, self._d = p, q, d

    # field access -----------------------------------------------------

    @property
    def a(self) -> Fraction:
        """Rational part."""
        return Fraction(self._p, self._d)

    @property
    def b(self) -> Fraction:
        """Coefficient of sqrt(3)."""
        return Fraction(self._q, self._d)

    @property
    def is_rational(self) -> bool:
        return self._q == 0

    def as_fraction(self) -> Fraction:
        if self._q:
            raise ValueError(f"{self} is not rational")
        return Fraction(self._p, self._d)

    # arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other: object) -> QuadNum | None:
        if isinstance(other, QuadNum):
            return other
        if isinstance(other, int):
            return QuadNum._raw(other, 0, 1)
        if isinstance(other, Fraction):
            return QuadNum._raw(other.numerator, 0, other.denominator)
        return None

    def __add__(self, other: object) -> QuadNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._d == o._d:
            return QuadNum._raw(self._p + o._p, self._q + o._q, self._d)
        return QuadNum._raw(
            self._p * o._d + o._p * self._d, self._q * o._d + o._q * self._d, self._d * o._d
        )

    __radd__ = __add__

    def __neg__(self) -> QuadNum:
        return QuadNum._raw(-self._p, -self._q, self._d)

    def __pos__(self) -> QuadNum:
        return self

    def __sub__(self, other: object) -> QuadNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> QuadNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> QuadNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNum._raw(
            self._p * o._p + 3 * self._q * o._q,
            self._p * o._q + self._q * o._p,
            self._d * o._d,
        )

    __rmul__ = __mul__

    def conjugate(self) -> QuadNum:
        return QuadNum._raw(self._p, -self._q, self._d)

    def norm(self) -> Fraction:
        """Field norm ``a**2 - 3*b**2``."""
        return Fraction(self._p * self._p - 3 * self._q * self._q, self._d * self._d)

    def inverse(self) -> QuadNum:
        nrm = self._p * self._p - 3 * self._q * self._q
        if nrm == 0:
            raise ZeroDivisionError("QuadNum division by zero")
        # 1/((p + q r)/d) = d (p - q r) / (p^2 - 3 q^2)
        return QuadNum._raw(self._d * self._p, -self._d * self._q, nrm)

    def __truediv__(self, other: object) -> QuadNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> QuadNum:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> QuadNum:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadNum._raw(1, 0, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # ordering ---------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the real value ``(p + q*sqrt3)/d``."""
        sp, sq = _sign(self._p), _sign(self._q)
        if sp == sq or sq == 0:
            return sp
        if sp == 0:
            return sq
        # opposite signs: compare p^2 with 3 q^2
        return sp * _sign(self._p * self._p - 3 * self._q * self._q)

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) == other
            return NotImplemented
        return self._p == o._p and self._q == o._q and self._d == o._d

    def __hash__(self) -> int:
        if self._q == 0:
            return hash(Fraction(self._p, self._d))
        return hash((self._p, self._q, self._d))

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __bool__(self) -> bool:
        return self._p != 0 or self._q != 0

    # conversion -------------------------------------------------------

    def __float__(self) -> float:
        if self._q == 0:
            return self._p / self._d
        # q*sqrt3 to ~64 bits beyond the worst cancellation p ~ -q*sqrt3
        k = 2 * max(self._p.bit_length(), self._q.bit_length()) + 64
        root = math.isqrt(3 * self._q * self._q << (2 * k))
        scaled = (self._p << k) + (root if self._q > 0 else -root)
        return float(Fraction(scaled, self._d << k))

    def __repr__(self) -> str:
        return f"QuadNum({self.a!s}, {self.b!s})"

    def __str__(self) -> str:
        return format_quad(self)


ZERO = QuadNum()
ONE = QuadNum(1)
SQRT3 = QuadNum(0, 1)


def as_quad(x: RationalLike | QuadNum | str) -> QuadNum:
    if isinstance(x, QuadNum):
        return x
    if isinstance(x, str):
        return parse_quad(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or string")
    return QuadNum(x)


class PointQ(NamedTuple):
    """A point of the plane with coordinates in Q(sqrt 3)."""

    x1: QuadNum
    x2: QuadNum

    def __add__(self, other):  # type: ignore[override]
        return PointQ(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other):
        return PointQ(self.x1 - other.x1, self.x2 - other.x2)

    def scale(self, c: RationalLike | QuadNum) -> PointQ:
        return PointQ(self.x1 * c, self.x2 * c)

    def dot(self, other: PointQ) -> QuadNum:
        return self.x1 * other.x1 + self.x2 * other.x2

    def sqnorm(self) -> QuadNum:
        return self.x1 * self.x1 + self.x2 * self.x2

    def to_floats(self) -> tuple[float, float]:
        return (float(self.x1), float(self.x2))

    def __str__(self) -> str:
        return f"({self.x1}, {self.x2})"


def point(x1: RationalLike | QuadNum | str, x2: RationalLike | QuadNum | str) -> PointQ:
    return PointQ(as_quad(x1), as_quad(x2))


def sqdist(u: PointQ, v: PointQ) -> QuadNum:
    dx = u.x1 - v.x1
    dy = u.x2 - v.x2
    return dx * dx + dy * dy


# operations named in the public contract -----------------------------------


def quad_arith(op: str, u: QuadNum, v: QuadNum | None = None) -> QuadNum:
    """Apply ``op`` in {add, sub, mul, neg}; ``v`` is ignored for ``neg``."""
    if op == "neg":
        return -u
    if v is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if op == "add":
        return u + v
    if op == "sub":
        return u - v
    if op == "mul":
        return u * v
    raise ValueError(f"unknown operation {op!r}")


def quad_cmp(u: QuadNum | RationalLike, v: QuadNum | RationalLike) -> int:
    """Return -1, 0 or 1 as ``u`` is less than, equal to, or greater than ``v``."""
    return (as_quad(u) - as_quad(v)).sign()


def _nearest_integer(u: QuadNum) -> int:
    """Round ``u`` to the nearest integer, ties away from zero, exactly."""
    with localcontext() as ctx:
        ctx.prec = 60 + len(str(u._d)) + max(len(str(u._p)), len(str(u._q)))
        est = (Decimal(u._p) + Decimal(u._q) * Decimal(3).sqrt()) / Decimal(u._d)
        k = int(est.to_integral_value())
    # settle floor(u) exactly
    while u < k:
        k -= 1
    while u >= k + 1:
        k += 1
    frac = u - k
    half = Fraction(1, 2)
    c = quad_cmp(frac, half)
    if c > 0 or (c == 0 and u.sign() >= 0):
        return k + 1
    return k


def to_float(u: QuadNum | RationalLike, precision: int = 15) -> float:
    """Round ``u`` to ``precision`` decimal places (exact decision) and return a float."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    u = as_quad(u)
    scale = 10**precision
    k = _nearest_integer(u * scale)
    return float(Fraction(k, scale))


def to_sig_float(u: QuadNum | RationalLike | float, digits: int = 15) -> float:
    """Float carrying ``digits`` significant digits, used for display."""
    return float(f"{float(u):.{digits}g}")


# string round-trip ----------------------------------------------------------


def format_rat(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def format_quad(u: QuadNum) -> str:
    """``"p/q"`` for rationals, ``"p/q + r/s√3"`` otherwise."""
    if u.is_rational:
        return format_rat(u.a)
    b = u.b
    op = "+" if b >= 0 else "-"
    return f"{format_rat(u.a)} {op} {format_rat(abs(b))}{SQRT3_SYMBOL}"


_ROOT_TOKENS = (SQRT3_SYMBOL, "*sqrt(3)", "sqrt(3)", "sqrt3")


def parse_quad(text: str) -> QuadNum:
    """Inverse of :func:`format_quad`; ``sqrt(3)`` is accepted for the radical."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty string")
    try:
        for tok in _ROOT_TOKENS:
            if s.endswith(tok):
                s = s[: -len(tok)]
                break
        else:
            return QuadNum(Fraction(s))
        cut = max(s.rfind("+"), s.rfind("-"))
        if cut > 0:
            a, b = s[:cut], s[cut:]
        else:
            a, b = "0", s
        if b in ("", "+", "-"):
            b += "1"
        return QuadNum(Fraction(a), Fraction(b))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse {text!r} as an element of Q(sqrt 3)") from exc
