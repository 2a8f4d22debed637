"""Closed-form optimal sets of n-means for the R-measure.

With ``l = ell(n)`` (so ``3**l <= n < 3**(l+1)``) every optimal set is built
from the depth-``l`` cells: each cell receives one, two or three points, and
the points inside a cell are the image of an optimal 1-, 2- or 3-point set
for the whole measure.  There are three optimal two-point sets, one for each
median of the triangle, and the choice is made per cell.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator

from .algebra import PointQ
from .measure import Word, apply_word, centroid, conditional_centroid, format_word, words


class Alpha2Variant(str, Enum):
    """The three optimal two-point sets, named by the median they straddle."""

    TOP = "topMedian"
    LEFT = "leftMedian"
    RIGHT = "rightMedian"

    @property
    def groups(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return {
            Alpha2Variant.TOP: (("1", "2"), ("3",)),
            Alpha2Variant.LEFT: (("2", "3"), ("1",)),
            Alpha2Variant.RIGHT: (("1", "3"), ("2",)),
        }[self]

    def points(self) -> tuple[PointQ, PointQ]:
        pair, single = self.groups
        return (conditional_centroid(pair), centroid(single[0]))


ALPHA3_WORDS = ((1,), (2,), (3,))


def ell(n: int) -> int:
    """Largest ``l`` with ``3**l <= n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    l, p = 0, 3
    while p <= n:
        l += 1
        p *= 3
    return l


def regime(n: int) -> str:
    """``"A"`` for n = 3**l, ``"B"`` up to 2*3**l, ``"C"`` beyond."""
    p = 3 ** ell(n)
    if n == p:
        return "A"
    return "B" if n <= 2 * p else "C"


@dataclass(frozen=True)
class OptimalSetSpec:
    """One member of the family of optimal n-point sets.

    ``J`` lists the depth-``ell`` cells that get an extra point (regime B)
    or a full three-point set (regime C).  ``variants`` picks the two-point
    set used in every cell holding exactly two points.
    """

    n: int
    ell: int
    J: tuple[Word, ...] = ()
    variants: tuple[tuple[Word, Alpha2Variant], ...] = ()

    def __post_init__(self) -> None:
        self.validate()

    @property
    def regime(self) -> str:
        return regime(self.n)

    def validate(self) -> None:
        n, l = self.n, self.ell
        if n < 1 or l != ell(n):
            raise ValueError(f"ell={l} does not match n={n}")
        J = set(self.J)
        if len(J) != len(self.J) or any(len(w) != l for w in J):
            raise ValueError("J must contain distinct words of length ell")
        if any(s not in (1, 2, 3) for w in J for s in w):
            raise ValueError("J contains symbols outside {1, 2, 3}")
        keys = [w for w, _ in self.variants]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate variant keys")
        p = 3**l
        if self.regime == "A":
            expected_J, expected_keys = 0, set()
        elif self.regime == "B":
            expected_J, expected_keys = n - p, J
        else:
            expected_J = n - 2 * p
            expected_keys = set(words(l)) - J
        if len(J) != expected_J:
            raise ValueError(f"|J| must be {expected_J} for n={n}, got {len(J)}")
        if set(keys) != expected_keys:
            raise ValueError("variants must be keyed exactly by the two-point cells")

    def variant_map(self) -> dict[Word, Alpha2Variant]:
        return dict(self.variants)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ell": self.ell,
            "regime": self.regime,
            "J": [format_word(w) for w in self.J],
            "variants": {format_word(w): v.value for w, v in self.variants},
        }


def _make_spec(n: int, J, variant_for) -> OptimalSetSpec:
    l = ell(n)
    J = tuple(sorted(J))
    r = regime(n)
    if r == "A":
        keys: list[Word] = []
    elif r == "B":
        keys = list(J)
    else:
        keys = [w for w in words(l) if w not in set(J)]
    return OptimalSetSpec(n, l, J, tuple((w, variant_for(i)) for i, w in enumerate(keys)))


def optimal_set(spec: OptimalSetSpec) -> tuple[PointQ, ...]:
    """Exact points of the optimal set described by ``spec``, in cell order."""
    spec.validate()
    J = set(spec.J)
    variants = spec.variant_map()
    two_point = {v: v.points() for v in set(variants.values())}
    three_point = tuple(centroid(w) for w in ALPHA3_WORDS)
    pts: list[PointQ] = []
    for w in words(spec.ell):
        if w in variants:
            local = two_point[variants[w]]
        elif spec.regime == "C" and w in J:
            local = three_point
        else:
            pts.append(centroid(w))
            continue
        pts.extend(apply_word(w, a) for a in local)
    if len(pts) != spec.n or len(set(pts)) != spec.n:
        raise AssertionError(f"construction produced {len(set(pts))} distinct points, not {spec.n}")
    return tuple(pts)


def quantization_error(n: int) -> Fraction:
    """``V_n = (13 * 3**l - 4 n) / (2 * 27**(l+1))`` with ``l = ell(n)``."""
    l = ell(n)
    return Fraction(13 * 3**l - 4 * n, 2 * 27 ** (l + 1))


def count_optimal_sets(n: int) -> int:
    l = ell(n)
    p = 3**l
    r = regime(n)
    if r == "A":
        return 1
    if r == "B":
        return math.comb(p, n - p) * 3 ** (n - p)
    return math.comb(p, n - 2 * p) * 3 ** (3 * p - n)


def canonical_spec(n: int) -> OptimalSetSpec:
    """Lexicographically first ``J`` with every two-point cell on the top median."""
    l = ell(n)
    p = 3**l
    size = {"A": 0, "B": n - p, "C": n - 2 * p}[regime(n)]
    J = list(itertools.islice(words(l), size))
    return _make_spec(n, J, lambda _: Alpha2Variant.TOP)


def enumerate_optimal_sets(n: int, cap: int | None = None) -> Iterator[OptimalSetSpec]:
    """All optimal specs for ``n`` in lexicographic order, at most ``cap`` of them."""
    l = ell(n)
    p = 3**l
    size = {"A": 0, "B": n - p, "C": n - 2 * p}[regime(n)]
    n_keys = {"A": 0, "B": size, "C": p - size}[regime(n)]
    variants = list(Alpha2Variant)

    def gen() -> Iterator[OptimalSetSpec]:
        for J in itertools.combinations(list(words(l)), size):
            for choice in itertools.product(variants, repeat=n_keys):
                yield _make_spec(n, J, choice.__getitem__)

    return itertools.islice(gen(), cap)
