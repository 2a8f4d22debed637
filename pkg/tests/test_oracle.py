import random
from fractions import Fraction as F

import numpy as np
import pytest

from rquant.algebra import QuadNum, point
from rquant.measure import MEAN, STANDARD, VARIANCE, GeneralIfs, apply_word, centroid
from rquant.optimal import Alpha2Variant, canonical_spec, optimal_set, quantization_error
from rquant.oracle import (
    EnclosureError,
    distortion_enclosure,
    kmeans_best_of,
    lloyd,
    mc_distortion,
    surrogate_distortion,
    threads,
)

ALPHA3 = [centroid("1"), centroid("2"), centroid("3")]
NON_OPTIMAL = ALPHA3 + [point(F(1, 2), 0)]


def brute_upper(alpha, depth):
    """sum over depth-k cells of min_a cell distortion; equals the truth once every cell has one owner."""
    return surrogate_distortion(alpha, depth) + VARIANCE / 9**depth


def test_enclosure_alpha3():
    e = distortion_enclosure(optimal_set(canonical_spec(3)))
    assert e.exact and e.value == F(1, 54) and e.depth_used == 1


def test_enclosure_single_mean():
    e = distortion_enclosure([MEAN])
    assert e.exact and e.value == F(1, 6) and e.depth_used == 0


def test_enclosure_n11():
    e = distortion_enclosure(optimal_set(canonical_spec(11)), epsilon=F(1, 10**12))
    assert e.contains(F(73, 39366))


def test_enclosure_non_optimal():
    e = distortion_enclosure(NON_OPTIMAL, max_depth=12)
    assert e.hi < QuadNum(F(1, 54))
    assert e.lo >= QuadNum(quantization_error(4))
    # independent brute force: the upper sums stabilise at the same exact value
    assert brute_upper(NON_OPTIMAL, 6) == brute_upper(NON_OPTIMAL, 8) == F(1087, 59049)
    assert e.exact and e.value == F(1087, 59049)


def test_enclosure_off_lattice_points():
    # off the cell lattice: some cells never resolve, the bounds must still bracket
    alpha = [point(F(1, 5), F(1, 7)), point(F(4, 5), F(1, 7))]
    e = distortion_enclosure(alpha, max_depth=6)
    assert not e.exact
    # hi refines the depth-6 upper sums only where needed
    assert e.lo <= brute_upper(alpha, 8)
    assert e.hi <= brute_upper(alpha, 6)
    mc, se = mc_distortion(alpha, samples=400_000, seed=1)
    assert float(e.lo) - 4 * se <= mc <= float(e.hi) + 4 * se


def test_require_exact_raises():
    alpha = [point(F(1, 5), F(1, 7)), point(F(4, 5), F(1, 7))]
    with pytest.raises(EnclosureError):
        distortion_enclosure(alpha, max_depth=3, require_exact=True)
    e = distortion_enclosure(alpha, max_depth=3)
    assert not e.exact and e.ambiguous_cells > 0
    with pytest.raises(EnclosureError):
        e.value


def test_enclosure_epsilon_stops_early():
    alpha = [point(F(1, 5), F(1, 7)), point(F(4, 5), F(1, 7))]
    coarse = distortion_enclosure(alpha, epsilon=F(1, 100), max_depth=12)
    fine = distortion_enclosure(alpha, max_depth=8)
    assert coarse.width <= F(1, 100)
    assert coarse.lo <= fine.lo and fine.hi <= coarse.hi


def test_enclosure_rejects_bad_input():
    with pytest.raises(ValueError):
        distortion_enclosure([])
    with pytest.raises(ValueError):
        distortion_enclosure([MEAN, MEAN])
    with pytest.raises(ValueError):
        distortion_enclosure([MEAN], max_depth=31)


def test_enclosure_every_variant_n2():
    for v in Alpha2Variant:
        e = distortion_enclosure(list(v.points()))
        assert e.exact and e.value == F(5, 54)


def _random_set(rnd, n):
    pts = set()
    while len(pts) < n:
        # random points on a fine rational grid over the bounding box
        pts.add(point(F(rnd.randrange(0, 1001), 1000), QuadNum(0, F(rnd.randrange(0, 501), 1000))))
    return list(pts)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_random_sets_lower_bound(n):
    rnd = random.Random(100 + n)
    vn = QuadNum(quantization_error(n))
    for _ in range(40):
        e = distortion_enclosure(_random_set(rnd, n), max_depth=5)
        assert e.lo >= vn


def test_surrogate_image_scaling():
    rnd = random.Random(4)
    for _ in range(10):
        beta = _random_set(rnd, rnd.randrange(1, 5))
        base = surrogate_distortion(beta, 3)
        for w in [(), (2,), (3, 1), (1, 3, 2)]:
            img = [apply_word(w, b) for b in beta]
            assert surrogate_distortion(img, 3, w) * 27 ** len(w) == base


def test_mc_examples():
    est, se = mc_distortion(list(Alpha2Variant.TOP.points()), samples=10**6, depth=20, seed=0)
    assert abs(est - 5 / 54) <= 3 * se
    est, se = mc_distortion([MEAN], samples=10**6, seed=0)
    assert abs(est - 1 / 6) <= 3 * se
    assert mc_distortion([MEAN], samples=5000, seed=9) == mc_distortion([MEAN], samples=5000, seed=9)
    with pytest.raises(ValueError):
        mc_distortion([MEAN], samples=999)


def test_mc_consistency_trials():
    sets = [list(Alpha2Variant.TOP.points()), ALPHA3, list(optimal_set(canonical_spec(4)))]
    for alpha in sets:
        mid = distortion_enclosure(alpha).midpoint
        hits = 0
        for seed in range(100):
            est, se = mc_distortion(alpha, samples=20_000, seed=seed)
            hits += abs(est - mid) <= 4 * se
        assert hits >= 99


def test_lloyd_perturbed_alpha3():
    gen = np.random.default_rng(0)
    init = np.array([p.to_floats() for p in ALPHA3]) + gen.uniform(-1e-2, 1e-2, (3, 2))
    st = lloyd(STANDARD, init, depth=7)
    assert st.converged and st.single_owner
    assert np.abs(st.points - [p.to_floats() for p in ALPHA3]).max() < 1e-6
    assert abs(st.distortion - 1 / 54) < 1e-8
    assert st.correction == pytest.approx(1 / 6 / 9**7)


def test_lloyd_single_point():
    st = lloyd(STANDARD, [(0.1, 0.9)], depth=6)
    assert st.points[0] == pytest.approx([0.5, 3**0.5 / 6], abs=1e-12)
    assert st.iterations == 1
    assert st.distortion == pytest.approx(1 / 6, abs=1e-12)


def test_lloyd_history_nonincreasing():
    gen = np.random.default_rng(3)
    for _ in range(20):
        n = int(gen.integers(1, 8))
        st = lloyd(STANDARD, gen.uniform(0, 0.8, (n, 2)), depth=5)
        h = np.array(st.history)
        assert (np.diff(h) <= 1e-15).all()


def test_lloyd_empty_cluster_reseeded():
    # two coincident far-away seeds: one cluster empties and must be reseeded
    st = lloyd(STANDARD, [(5.0, 5.0), (5.0, 5.0), (0.5, 0.3)], depth=5)
    assert len({tuple(p) for p in st.points}) == 3
    with pytest.raises(ValueError):
        lloyd(STANDARD, np.empty((0, 2)))


def test_kmeans_n2_matches_a_remark_set():
    st = kmeans_best_of(STANDARD, 2, restarts=32, depth=7, seed=0)
    got = sorted(map(tuple, st.points))
    options = [sorted(p.to_floats() for p in v.points()) for v in Alpha2Variant]
    assert any(np.abs(np.array(got) - np.array(o)).max() < 1e-6 for o in options)


def test_kmeans_n3_recovers_alpha3():
    st = kmeans_best_of(STANDARD, 3, restarts=16, depth=7, seed=7)
    assert abs(st.distortion - 1 / 54) < 1e-6
    assert np.abs(np.array(sorted(map(tuple, st.points))) - sorted(p.to_floats() for p in ALPHA3)).max() < 1e-6


def test_kmeans_deterministic_across_threads(monkeypatch):
    monkeypatch.setenv("RQUANT_THREADS", "1")
    a = kmeans_best_of(STANDARD, 4, restarts=8, depth=5, seed=3)
    monkeypatch.setenv("RQUANT_THREADS", "4")
    b = kmeans_best_of(STANDARD, 4, restarts=8, depth=5, seed=3)
    assert np.array_equal(a.points, b.points) and a.distortion == b.distortion


def test_kmeans_general_mode():
    g = GeneralIfs((F(1, 4),) * 3, (F(1, 3),) * 3, "S")
    st = kmeans_best_of(g, 4, restarts=8, depth=5, seed=0, init="kmeans++")
    assert st.distortion > 0 and len(st.points) == 4
    with pytest.raises(ValueError):
        kmeans_best_of(g, 4, init="bogus")


def test_threads_env(monkeypatch):
    monkeypatch.setenv("RQUANT_THREADS", "3")
    assert threads() == 3
    for bad in ("0", "-2", "x"):
        monkeypatch.setenv("RQUANT_THREADS", bad)
        with pytest.raises(ValueError):
            threads()
    monkeypatch.delenv("RQUANT_THREADS")
    assert threads() >= 1
