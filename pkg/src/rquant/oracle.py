"""Verification of quantization errors without the closed-form formula.

Three independent routes:

* :func:`distortion_enclosure`: certified bounds by adaptive subdivision
  of the cells of the R-triangle, exact in Q(sqrt 3);
* :func:`mc_distortion`: Monte Carlo over chaos-game samples;
* :func:`lloyd` / :func:`kmeans_best_of`: Lloyd iteration on the atomic
  measure carried by the depth-k cell centroids.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .algebra import ZERO, PointQ, QuadNum, as_quad, sqdist
from .measure import (
    MEAN,
    STANDARD,
    TRIANGLE,
    VARIANCE,
    GeneralIfs,
    Word,
    apply_word,
    atoms,
    chaos_sample,
    moments,
    rng,
    words,
)

#: rational upper bound of 1/sqrt(3), the circumradius of the unit triangle
CIRCUMRADIUS_BOUND = Fraction(577, 999)

_MAP_SHIFTS = tuple(apply_word((i,), PointQ(ZERO, ZERO)) for i in (1, 2, 3))


class EnclosureError(RuntimeError):
    """Raised when an exact value was demanded but some cell stayed ambiguous."""


def threads() -> int:
    """Worker cap from ``RQUANT_THREADS`` (default: CPU count)."""
    raw = os.environ.get("RQUANT_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"RQUANT_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"RQUANT_THREADS must be a positive integer, got {raw!r}")
    return value


# ---------------------------------------------------------------------------
# certified enclosure


@dataclass(frozen=True)
class DistortionEnclosure:
    lo: QuadNum
    hi: QuadNum
    exact: bool
    depth_used: int
    resolved_cells: int = 0
    ambiguous_cells: int = 0

    def __post_init__(self) -> None:
        if self.lo > self.hi or (self.exact and self.lo != self.hi):
            raise ValueError("inconsistent enclosure")

    @property
    def value(self) -> QuadNum:
        if not self.exact:
            raise EnclosureError("enclosure is not exact")
        return self.lo

    @property
    def width(self) -> QuadNum:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return (float(self.lo) + float(self.hi)) / 2

    def contains(self, x) -> bool:
        x = as_quad(x)
        return self.lo <= x <= self.hi


def _rational_floor(u: QuadNum, bits: int = 80) -> Fraction:
    """A rational lower bound of ``u`` within ``2**-bits`` relative to its scale."""
    p, q, d = u._p, u._q, u._d  # noqa: SLF001 - exact internals of the same package
    scale = 1 << bits
    root = math.isqrt(3 * q * q * scale * scale)  # floor(|q| sqrt3 * scale)
    if q >= 0:
        num = p * scale + root
    else:
        num = p * scale - root - 1
    return Fraction(num, d * scale)


def _sqrt_floor(x: Fraction, bits: int = 80) -> Fraction:
    if x <= 0:
        return Fraction(0)
    scale = 1 << bits
    return Fraction(math.isqrt(x.numerator * scale * scale // x.denominator), scale)


class _Resolver:
    """Ownership tests for one point set, with pairwise data cached."""

    def __init__(self, pts: Sequence[PointQ]) -> None:
        self.pts = list(pts)
        self.norms = [p.sqnorm() for p in self.pts]
        # per ordered pair (i, j): diff = a_j - a_i, rhs = |a_j|^2 - |a_i|^2,
        # and the offsets 2 * V_m . diff for the unit triangle vertices
        self.pairs = {}
        for i, a in enumerate(self.pts):
            for j, b in enumerate(self.pts):
                if i == j:
                    continue
                diff = b - a
                self.pairs[i, j] = (
                    diff,
                    self.norms[j] - self.norms[i],
                    [v.dot(diff) * 2 for v in TRIANGLE],
                )

    def nearest(self, c: PointQ) -> tuple[int, list[QuadNum]]:
        d = [sqdist(c, a) for a in self.pts]
        best = 0
        for i in range(1, len(d)):
            if d[i] < d[best]:
                best = i
        return best, d

    def owns(self, i: int, t: PointQ, h: Fraction) -> bool:
        """True iff ``a_i`` is a nearest point on the whole triangle ``t + h*T``.

        ``|x - a_i|^2 <= |x - a_j|^2`` is the half-plane
        ``2 x.(a_j - a_i) <= |a_j|^2 - |a_i|^2``; a linear condition holds on
        a triangle iff it holds at the three vertices.
        """
        for j in range(len(self.pts)):
            if j == i:
                continue
            diff, rhs, offsets = self.pairs[i, j]
            base = t.dot(diff) * 2
            for off in offsets:
                if base + off * h > rhs:
                    return False
        return True


def distortion_enclosure(
    alpha: Sequence[PointQ],
    epsilon: Fraction | int | float = 0,
    max_depth: int = 12,
    require_exact: bool = False,
) -> DistortionEnclosure:
    """Certified bounds on ``int min_a |x - a|^2 dP`` for the R-measure.

    Cells are refined level by level.  A cell whose whole triangle lies in the
    closed Voronoi region of one point contributes its exact value
    ``3^-k (9^-k V + |a(w) - a|^2)``; the others are subdivided.  Refinement
    stops when every cell is resolved, when the bound width drops to
    ``epsilon`` (checked only for ``epsilon > 0``), or at ``max_depth``.
    """
    alpha = [p if isinstance(p, PointQ) else PointQ(as_quad(p[0]), as_quad(p[1])) for p in alpha]
    if not alpha:
        raise ValueError("alpha must contain at least one point")
    if len(set(alpha)) != len(alpha):
        raise ValueError("alpha contains repeated points")
    if not 0 <= max_depth <= 30:
        raise ValueError("max_depth must lie in [0, 30]")
    eps = Fraction(epsilon)
    res = _Resolver(alpha)

    exact_sum = ZERO
    resolved = 0
    frontier: list[PointQ] = [PointQ(ZERO, ZERO)]  # translations t_w of S_w(x) = h x + t_w
    for k in range(max_depth + 1):
        h = Fraction(1, 3**k)
        hv = h * h * VARIANCE
        pending: list[tuple[PointQ, list[QuadNum]]] = []
        for t in frontier:
            c = PointQ(t.x1 + MEAN.x1 * h, t.x2 + MEAN.x2 * h)
            best, d = res.nearest(c)
            if res.owns(best, t, h):
                exact_sum = exact_sum + (d[best] + hv) * h
                resolved += 1
            else:
                pending.append((t, d))
        if not pending:
            return DistortionEnclosure(exact_sum, exact_sum, True, k, resolved, 0)
        last = k == max_depth
        if last or eps > 0:
            lo, hi = _bounds(pending, h)
            if last or (hi - lo) <= eps:
                if require_exact:
                    raise EnclosureError(
                        f"{len(pending)} cells still ambiguous at depth {k}"
                    )
                return DistortionEnclosure(
                    exact_sum + lo, exact_sum + hi, False, k, resolved, len(pending)
                )
        frontier = [
            PointQ(t.x1 + s.x1 * h, t.x2 + s.x2 * h) for t, _ in pending for s in _MAP_SHIFTS
        ]
    raise AssertionError("unreachable")


def _bounds(pending, h: Fraction) -> tuple[QuadNum, QuadNum]:
    hv = h * h * VARIANCE
    r = CIRCUMRADIUS_BOUND * h
    lo = Fraction(0)
    hi = ZERO
    for _, d in pending:
        dmin = min(d)
        hi = hi + (dmin + hv) * h
        gap = _sqrt_floor(max(_rational_floor(dmin), Fraction(0))) - r
        if gap > 0:
            lo += gap * gap * h
    return QuadNum(lo), hi


# ---------------------------------------------------------------------------
# exact atomic surrogate


def surrogate_distortion(alpha: Sequence[PointQ], depth: int, word: Word = ()) -> QuadNum:
    """Exact ``sum_w 3^-|w| min_a |a(w) - a|^2`` over depth-``depth`` cells inside ``word``.

    The atoms are the cell centroids ``a(word + v)`` with ``|v| = depth``,
    each weighted by the cell measure.
    """
    total = ZERO
    weight = Fraction(1, 3 ** (len(word) + depth))
    for v in words(depth):
        c = apply_word(tuple(word) + v, MEAN)
        total = total + min(sqdist(c, a) for a in alpha)
    return total * weight


# ---------------------------------------------------------------------------
# Monte Carlo


def _as_array(alpha) -> np.ndarray:
    return np.array([[float(c) for c in p] for p in alpha], dtype=float)


def mc_distortion(
    alpha,
    samples: int = 10**6,
    depth: int = 20,
    seed: int = 0,
    ifs: GeneralIfs = STANDARD,
) -> tuple[float, float]:
    """Mean of ``min_a |x - a|^2`` over chaos-game samples, with its standard error."""
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    centers = _as_array(alpha)
    chunk = 250_000
    vals = []
    for stream, start in enumerate(range(0, samples, chunk)):
        m = min(chunk, samples - start)
        x = chaos_sample(ifs, m, depth, seed, stream=stream)
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1).min(axis=1)
        vals.append(d2)
    v = np.concatenate(vals)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(len(v)))


# ---------------------------------------------------------------------------
# Lloyd iteration


@dataclass
class LloydState:
    points: np.ndarray
    distortion: float
    iterations: int
    converged: bool
    surrogate: float = 0.0
    correction: float = 0.0
    single_owner: bool = False
    history: list[float] = field(default_factory=list)


@lru_cache(maxsize=16)
def _atoms_cached(depth: int, ifs: GeneralIfs):
    pts, wts = atoms(depth, ifs)
    verts = []
    for v in ifs.vertices:
        vp, _ = _images(depth, ifs, v.to_floats())
        verts.append(vp)
    for arr in (pts, wts, *verts):
        arr.setflags(write=False)
    return pts, wts, tuple(verts)


def _images(depth: int, ifs: GeneralIfs, start) -> tuple[np.ndarray, None]:
    rs = np.array([float(r) for r in ifs.ratios])
    ts = np.array([[float(c) for c in t] for t in ifs.translations()])
    pts = np.array([start], dtype=float)
    for _ in range(depth):
        pts = np.concatenate([rs[i] * pts + ts[i] for i in range(3)])
    return pts, None


def _correction(depth: int, ifs: GeneralIfs) -> float:
    """``sum_w p_w r_w^2 V``, the within-cell variance dropped by the atoms."""
    if ifs.is_standard:
        return float(VARIANCE / 9**depth)
    var = float(moments(ifs).variance)
    s = sum(float(p) * float(r) ** 2 for p, r in zip(ifs.probs, ifs.ratios))
    return var * s**depth


def _assign(x: np.ndarray, c: np.ndarray):
    d2 = ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=-1)
    labels = d2.argmin(axis=1)
    return labels, d2[np.arange(len(x)), labels]


def lloyd(
    ifs: GeneralIfs,
    init,
    depth: int = 7,
    max_iters: int = 1000,
    tol: float = 1e-15,
) -> LloydState:
    """Lloyd iteration on the depth-``depth`` atomic surrogate of the measure.

    Stops when the assignment is stable or the relative drop of the surrogate
    distortion is below ``tol``.  Empty clusters move to the atom with the
    largest contribution to the distortion.
    """
    c = np.array(init, dtype=float).reshape(-1, 2).copy()
    if len(c) == 0:
        raise ValueError("init must contain at least one point")
    if not 0 <= depth <= 12:
        raise ValueError("depth must lie in [0, 12]")
    x, w, verts = _atoms_cached(depth, ifs)
    n = len(c)
    history: list[float] = []
    prev = None
    converged = False
    it = 0
    while True:
        labels, dmin = _assign(x, c)
        dist = float(np.dot(w, dmin))
        history.append(dist)
        if prev is not None and np.array_equal(labels, prev):
            converged = True
            break
        if len(history) > 1 and history[-2] - dist <= tol * history[-2]:
            converged = True
            break
        if it >= max_iters:
            break
        it += 1
        mass = np.bincount(labels, weights=w, minlength=n)
        sx = np.bincount(labels, weights=w * x[:, 0], minlength=n)
        sy = np.bincount(labels, weights=w * x[:, 1], minlength=n)
        contrib = w * dmin
        for j in range(n):
            if mass[j] > 0:
                c[j] = (sx[j] / mass[j], sy[j] / mass[j])
            else:
                k = int(np.argmax(contrib))
                c[j] = x[k]
                contrib[k] = -1.0
        prev = labels
    single = all(
        np.array_equal(_assign(v, c)[0], labels) for v in verts
    )
    corr = _correction(depth, ifs)
    return LloydState(c, dist + corr, it, converged, dist, corr, single, history)


def _seed_uniform(x: np.ndarray, w: np.ndarray, n: int, gen: np.random.Generator) -> np.ndarray:
    """``n`` distinct atoms drawn with probability proportional to their weight."""
    return x[gen.choice(len(x), size=n, replace=False, p=w / w.sum())].copy()


def _seed_plusplus(x: np.ndarray, w: np.ndarray, n: int, gen: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: atoms drawn without replacement, weight times squared distance."""
    idx = [int(gen.choice(len(x), p=w / w.sum()))]
    d2 = ((x - x[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, n):
        p = w * d2
        p[idx] = 0.0
        total = p.sum()
        if total <= 0:
            rest = np.setdiff1d(np.arange(len(x)), idx)
            k = int(gen.choice(rest))
        else:
            k = int(gen.choice(len(x), p=p / total))
        idx.append(k)
        d2 = np.minimum(d2, ((x - x[k]) ** 2).sum(axis=1))
    return x[idx].copy()


def kmeans_best_of(
    ifs: GeneralIfs,
    n: int,
    restarts: int = 64,
    depth: int = 7,
    seed: int = 0,
    max_iters: int = 1000,
    tol: float = 1e-15,
    init: str = "uniform",
) -> LloydState:
    """Best Lloyd run over ``restarts`` seeded initialisations.

    Restart ``i`` draws its seeds from the stream ``(seed, i)``, so the result
    does not depend on how restarts are scheduled across threads.
    """
    if n < 1 or restarts < 1:
        raise ValueError("n and restarts must be positive")
    seeders = {"uniform": _seed_uniform, "kmeans++": _seed_plusplus}
    if init not in seeders:
        raise ValueError(f"init must be one of {sorted(seeders)}")
    seeder = seeders[init]
    x, w, _ = _atoms_cached(depth, ifs)
    if n > len(x):
        raise ValueError(f"n={n} exceeds the {len(x)} atoms at depth {depth}")

    def run(i: int) -> LloydState:
        start = seeder(x, w, n, rng(seed, i))
        return lloyd(ifs, start, depth, max_iters, tol)

    workers = min(threads(), restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(i) for i in range(restarts)]
    best = results[0]
    for r in results[1:]:
        if r.distortion < best.distortion:
            best = r
    return best
