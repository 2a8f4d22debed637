"""The R-triangle iterated function system and its self-similar measure.

Standard mode is the three maps ``S_i(x) = x/3 + (2/3) v_i`` with equal
weights, where ``v_1, v_2, v_3`` are the vertices of the unit equilateral
triangle.  Every centroid and every per-cell moment is exact in Q(sqrt 3).

:class:`GeneralIfs` covers unequal ratios ``0 < r_i < 1/2`` and arbitrary
probability vectors.  It stays exact when ratios and weights are rationals
and falls back to floats otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .algebra import ZERO, PointQ, QuadNum, point, sqdist

Word = tuple[int, ...]
Number = Union[Fraction, float]

SYMBOLS = (1, 2, 3)
TRIANGLE = (point(0, 0), point(1, 0), point(Fraction(1, 2), QuadNum(0, Fraction(1, 2))))
RIGHT_TRIANGLE = (point(0, 0), point(1, 0), point(0, 1))

#: mean of the R-measure, the barycenter of the base triangle
MEAN = point(Fraction(1, 2), QuadNum(0, Fraction(1, 6)))
#: E||X - MEAN||^2
VARIANCE = Fraction(1, 6)

RNG_ALGORITHM = "Philox-4x64-10"


def parse_word(text: str | Iterable[int]) -> Word:
    """``"132"`` -> ``(1, 3, 2)``; ``""`` and ``"∅"`` give the empty word."""
    if not isinstance(text, str):
        w = tuple(int(s) for s in text)
    else:
        text = text.strip()
        w = () if text in ("", "∅", "-") else tuple(int(c) for c in text)
    if any(s not in SYMBOLS for s in w):
        raise ValueError(f"word {text!r} uses symbols outside {{1, 2, 3}}")
    return w


def format_word(w: Word) -> str:
    return "".join(map(str, w)) or "∅"


def words(depth: int) -> Iterator[Word]:
    """All words of the given length in lexicographic order."""
    return itertools.product(SYMBOLS, repeat=depth)


def is_prefix(u: Word, v: Word) -> bool:
    return len(u) <= len(v) and v[: len(u)] == u


# ---------------------------------------------------------------------------
# IFS description


@dataclass(frozen=True)
class GeneralIfs:
    """Three homotheties ``x -> r_i x + (1 - r_i) v_i`` weighted by ``probs``.

    ``family="S"`` uses the equilateral vertices, ``family="T"`` the right
    triangle (0,0), (1,0), (0,1).
    """

    ratios: tuple[Number, Number, Number]
    probs: tuple[Number, Number, Number]
    family: str = "S"

    def __post_init__(self) -> None:
        if len(self.ratios) != 3 or len(self.probs) != 3:
            raise ValueError("exactly three ratios and three probabilities are required")
        if self.family not in ("S", "T"):
            raise ValueError(f"family must be 'S' or 'T', got {self.family!r}")
        for r in self.ratios:
            if not 0 < r < Fraction(1, 2):
                raise ValueError(f"ratio {r} outside (0, 1/2)")
        if any(p < 0 for p in self.probs) or not any(p > 0 for p in self.probs):
            raise ValueError("probabilities must be nonnegative and not all zero")
        total = sum(self.probs)
        if self.exact:
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {float(total)}, not 1")

    @property
    def exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for x in (*self.ratios, *self.probs))

    @property
    def vertices(self) -> tuple[PointQ, PointQ, PointQ]:
        return TRIANGLE if self.family == "S" else RIGHT_TRIANGLE

    @property
    def is_standard(self) -> bool:
        third = Fraction(1, 3)
        return (
            self.exact
            and self.family == "S"
            and all(r == third for r in self.ratios)
            and all(p == third for p in self.probs)
        )

    def translations(self):
        """Per-map translation vectors, exact PointQ or float pairs."""
        return self._translations

    @cached_property
    def _translations(self):
        out = []
        for r, v in zip(self.ratios, self.vertices):
            if self.exact:
                out.append(v.scale(1 - Fraction(r)))
            else:
                x, y = v.to_floats()
                out.append((float(1 - r) * x, float(1 - r) * y))
        return tuple(out)


STANDARD = GeneralIfs((Fraction(1, 3),) * 3, (Fraction(1, 3),) * 3, "S")


# ---------------------------------------------------------------------------
# maps


def apply_map(i: int, p: PointQ, ifs: GeneralIfs = STANDARD):
    """``S_i(p)``; exact for exact IFS and exact points."""
    if i not in SYMBOLS:
        raise ValueError(f"symbol {i} not in {{1, 2, 3}}")
    r = ifs.ratios[i - 1]
    t = ifs.translations()[i - 1]
    if ifs.exact and isinstance(p, PointQ):
        return PointQ(p.x1 * r + t.x1, p.x2 * r + t.x2)
    x, y = (float(c) for c in p)
    return (float(r) * x + float(t[0]), float(r) * y + float(t[1]))


def apply_word(w: Sequence[int], p: PointQ, ifs: GeneralIfs = STANDARD):
    """``S_w = S_{w1} o ... o S_{wk}`` applied to ``p``; identity for the empty word."""
    for i in reversed(w):
        p = apply_map(i, p, ifs)
    return p


def word_ratio(w: Word, ifs: GeneralIfs = STANDARD):
    r = Fraction(1) if ifs.exact else 1.0
    for i in w:
        r *= ifs.ratios[i - 1]
    return r


def word_prob(w: Word, ifs: GeneralIfs = STANDARD):
    p = Fraction(1) if ifs.exact else 1.0
    for i in w:
        p *= ifs.probs[i - 1]
    return p


# ---------------------------------------------------------------------------
# cells


@dataclass(frozen=True)
class Cell:
    word: Word
    vertices: tuple[PointQ, PointQ, PointQ]
    measure: Fraction

    @property
    def depth(self) -> int:
        return len(self.word)


def cell(w: Sequence[int] | str) -> Cell:
    w = parse_word(w) if isinstance(w, str) else tuple(w)
    verts = tuple(apply_word(w, v) for v in TRIANGLE)
    return Cell(w, verts, Fraction(1, 3 ** len(w)))


def cells(depth: int) -> Iterator[Cell]:
    for w in words(depth):
        yield cell(w)


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class Moments:
    mean: tuple
    second: tuple  # (E X1^2, E X2^2)
    marginal_variance: tuple
    variance: object


def _collapse(x):
    if isinstance(x, QuadNum) and x.is_rational:
        return x.as_fraction()
    return x


def moments(ifs: GeneralIfs = STANDARD) -> Moments:
    """Mean and variance of the invariant measure.

    Each coordinate satisfies the self-similar linear relations
    ``E X = sum p_i (r_i E X + t_i)`` and
    ``E X^2 = sum p_i (r_i^2 E X^2 + 2 r_i t_i E X + t_i^2)``, which have a
    unique solution because every ``r_i < 1``.
    """
    ts = ifs.translations()
    ps, rs = ifs.probs, ifs.ratios
    if not ifs.exact:
        ps = tuple(float(p) for p in ps)
        rs = tuple(float(r) for r in rs)
    mean, second, mvar = [], [], []
    for c in range(2):
        tc = [t[c] for t in ts]
        denom1 = 1 - sum(p * r for p, r in zip(ps, rs))
        m = sum((p * t for p, t in zip(ps, tc)), ZERO if ifs.exact else 0.0) / denom1
        denom2 = 1 - sum(p * r * r for p, r in zip(ps, rs))
        s = sum(
            (p * (2 * r * t * m + t * t) for p, r, t in zip(ps, rs, tc)),
            ZERO if ifs.exact else 0.0,
        ) / denom2
        mean.append(m)
        second.append(s)
        mvar.append(s - m * m)
    variance = mvar[0] + mvar[1]
    if ifs.exact:
        return Moments(
            PointQ(*mean),
            tuple(_collapse(s) for s in second),
            tuple(_collapse(v) for v in mvar),
            _collapse(variance),
        )
    return Moments(tuple(mean), tuple(second), tuple(mvar), variance)


# ---------------------------------------------------------------------------
# centroids and distortion


def centroid(w: Sequence[int] | str) -> PointQ:
    """``a(w)``, the conditional mean of the R-measure on the cell of ``w``."""
    w = parse_word(w) if isinstance(w, str) else tuple(w)
    return apply_word(w, MEAN)


def conditional_centroid(ws: Iterable[Sequence[int] | str]) -> PointQ:
    """Conditional mean over a union of pairwise disjoint cells."""
    ws = [parse_word(w) if isinstance(w, str) else tuple(w) for w in ws]
    if not ws:
        raise ValueError("need at least one word")
    for u, v in itertools.permutations(ws, 2):
        if is_prefix(u, v):
            raise ValueError(
                f"cells {format_word(u)} and {format_word(v)} overlap (prefix relation)"
            )
    total = Fraction(0)
    acc = PointQ(ZERO, ZERO)
    for w in ws:
        m = Fraction(1, 3 ** len(w))
        total += m
        acc = acc + centroid(w).scale(m)
    return acc.scale(1 / total)


def cell_distortion(w: Sequence[int] | str, p: PointQ) -> QuadNum:
    """Exact integral of ``||x - p||^2`` over the cell of ``w`` against P."""
    w = parse_word(w) if isinstance(w, str) else tuple(w)
    k = len(w)
    return (sqdist(centroid(w), p) + Fraction(1, 9**k) * VARIANCE) * Fraction(1, 3**k)


# ---------------------------------------------------------------------------
# sampling


def rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``."""
    seq = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, stream])
    return np.random.Generator(np.random.Philox(seq))


def chaos_sample(
    ifs: GeneralIfs = STANDARD, count: int = 1000, depth: int = 20, seed: int = 0, stream: int = 0
) -> np.ndarray:
    """Sample ``S_w(mean)`` for random words ``w`` of length ``depth``.

    Words are drawn with independent symbols distributed per ``ifs.probs``,
    so the points follow the depth-``depth`` discretisation of the measure.
    Returns an array of shape ``(count, 2)``.
    """
    if count < 1 or depth < 1:
        raise ValueError("count and depth must be positive")
    gen = rng(seed, stream)
    rs = np.array([float(r) for r in ifs.ratios])
    ts = np.array([[float(c) for c in t] for t in ifs.translations()])
    ps = np.array([float(p) for p in ifs.probs])
    m = moments(ifs).mean
    pts = np.tile(np.array([float(m[0]), float(m[1])]), (count, 1))
    uniform = ifs.is_standard
    for _ in range(depth):
        if uniform:
            sym = gen.integers(0, 3, size=count)
        else:
            sym = gen.choice(3, size=count, p=ps / ps.sum())
        pts = pts * rs[sym, None] + ts[sym]
    return pts


def atoms(depth: int, ifs: GeneralIfs = STANDARD) -> tuple[np.ndarray, np.ndarray]:
    """Float centroids and weights of all depth-``depth`` cells, in word order."""
    rs = np.array([float(r) for r in ifs.ratios])
    ts = np.array([[float(c) for c in t] for t in ifs.translations()])
    ps = np.array([float(p) for p in ifs.probs])
    m = moments(ifs).mean
    pts = np.array([[float(m[0]), float(m[1])]])
    wts = np.ones(1)
    # prepend symbols: S_{i w}(c) = r_i S_w(c) + t_i
    for _ in range(depth):
        pts = np.concatenate([rs[i] * pts + ts[i] for i in range(3)])
        wts = np.concatenate([ps[i] * wts for i in range(3)])
    return pts, wts


def exact_atoms(depth: int) -> list[tuple[Word, PointQ]]:
    """Exact centroids of all depth-``depth`` cells in standard mode."""
    return [(w, centroid(w)) for w in words(depth)]


__all__ = [
    "Cell",
    "GeneralIfs",
    "MEAN",
    "Moments",
    "RNG_ALGORITHM",
    "STANDARD",
    "TRIANGLE",
    "VARIANCE",
    "Word",
    "apply_map",
    "apply_word",
    "atoms",
    "cell",
    "cell_distortion",
    "cells",
    "centroid",
    "chaos_sample",
    "conditional_centroid",
    "format_word",
    "moments",
    "parse_word",
    "words",
]
