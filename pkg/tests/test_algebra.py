from decimal import Decimal, localcontext
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rquant.algebra import (
    PointQ,
    QuadNum,
    format_quad,
    parse_quad,
    point,
    quad_arith,
    quad_cmp,
    sqdist,
    to_float,
)

rats = st.fractions(max_denominator=10**6).filter(lambda x: abs(x) < 10**6)
quads = st.builds(QuadNum, rats, rats)


def test_mul_examples():
    assert quad_arith("mul", QuadNum(1, 1), QuadNum(1, 1)) == QuadNum(4, 2)
    assert quad_arith("mul", QuadNum(0, F(1, 6)), QuadNum(0, F(1, 6))) == QuadNum(F(1, 12))


def test_neg_and_add():
    u = QuadNum(F(3, 7), F(-2, 5))
    assert quad_arith("add", u, quad_arith("neg", u)) == QuadNum(0, 0)
    with pytest.raises(ValueError):
        quad_arith("pow", u, u)


def test_cmp_examples():
    assert quad_cmp(QuadNum(0, 1), QuadNum(F(7, 4))) == -1
    u = QuadNum(F(1, 3), F(5, 9))
    assert quad_cmp(u, u) == 0
    assert quad_cmp(QuadNum(2, -1), 0) == 1


def test_to_float_examples():
    assert to_float(F(5, 54), 7) == 0.0925926
    assert to_float(F(1, 54), 7) == 0.0185185
    assert to_float(QuadNum(), 7) == 0.0


def test_to_float_near_cancellation():
    # 97 - 56 sqrt3 = 0.00515477614287...
    assert to_float(QuadNum(97, -56), 12) == 0.005154776143
    assert float(QuadNum(97, -56)) == pytest.approx(0.00515477614287157, rel=1e-12)


def test_canonical_form():
    u = QuadNum(F(2, 4), F(3, 6))
    assert (u.a, u.b) == (F(1, 2), F(1, 2))
    assert QuadNum(F(1, 2), F(1, 3)) == QuadNum(F(2, 4), F(2, 6))
    assert hash(QuadNum(F(1, 2))) == hash(F(1, 2))


@pytest.mark.parametrize(
    "text, value",
    [
        ("5/54", QuadNum(F(5, 54))),
        ("1/2 + 7/18√3", QuadNum(F(1, 2), F(7, 18))),
        ("0/1 - 1/54√3", QuadNum(0, F(-1, 54))),
        ("√3", QuadNum(0, 1)),
        ("-2sqrt3", QuadNum(0, -2)),
        ("3 - sqrt(3)", QuadNum(3, -1)),
    ],
)
def test_parse(text, value):
    assert parse_quad(text) == value


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_quad("1/2 + x√3")
    with pytest.raises(ValueError):
        parse_quad("")


@given(quads)
def test_format_round_trip(u):
    assert parse_quad(format_quad(u)) == u


@given(quads, quads, quads)
def test_field_axioms(u, v, w):
    assert u + v == v + u
    assert u * v == v * u
    assert (u + v) + w == u + (v + w)
    assert (u * v) * w == u * (v * w)
    assert u * (v + w) == u * v + u * w
    assert u - u == QuadNum()
    if u:
        assert u * u.inverse() == QuadNum(1)
        assert (v / u) * u == v


@given(quads, quads)
def test_cmp_matches_high_precision(u, v):
    with localcontext() as ctx:
        ctx.prec = 60
        dec = lambda r: Decimal(r.numerator) / Decimal(r.denominator)  # noqa: E731
        gap = dec(u.a - v.a) + dec(u.b - v.b) * Decimal(3).sqrt()
        if abs(gap) > Decimal("1e-12"):
            assert quad_cmp(u, v) == (1 if gap > 0 else -1)


@given(quads, quads, quads)
def test_total_order(u, v, w):
    assert quad_cmp(u, v) == -quad_cmp(v, u)
    if quad_cmp(u, v) <= 0 and quad_cmp(v, w) <= 0:
        assert quad_cmp(u, w) <= 0
    assert quad_cmp(u + w, v + w) == quad_cmp(u, v)


def test_point_helpers():
    p = point(F(1, 2), "1/6√3")
    assert p.sqnorm() == QuadNum(F(1, 3))
    assert sqdist(p, PointQ(QuadNum(), QuadNum())) == QuadNum(F(1, 3))
    assert p.to_floats() == pytest.approx((0.5, 0.28867513459))
