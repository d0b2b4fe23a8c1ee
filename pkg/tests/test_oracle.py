import random
from fractions import Fraction as F

import numpy as np
import pytest

from cantor_quant.oracle import (
    DiscreteMeasure,
    compare,
    discretize,
    exact_cluster_distortion,
    kmeans_exact_dp,
    kmeans_exact_dp_all,
    lloyd,
    match_optimal_set,
    report_record,
)
from cantor_quant.quantizer import quantization_error

from oracles import brute_kmeans


@pytest.fixture(scope="module")
def fine():
    return discretize(F(1, 2 ** 10))


def random_measure(rng, m):
    xs = sorted(rng.sample(range(1, 10 ** 6), m))
    ws = [rng.randint(1, 1000) for _ in range(m)]
    total = sum(ws)
    return DiscreteMeasure(tuple(F(x, 10 ** 6) for x in xs),
                           tuple(F(w, total) for w in ws), F(0))


def test_discretize_examples():
    half = discretize(F(1, 2))
    assert half.atoms == [(F(1, 6), F(1, 2)), (F(5, 6), F(1, 2))]
    assert half.collapse_bound == F(1, 72)
    whole = discretize(1)
    assert whole.atoms == [(F(1, 2), F(1))]
    assert whole.collapse_bound == F(1, 8)


def test_discretize_fine():
    d = discretize(F(1, 2 ** 12))
    assert sum(d.weights) == 1
    assert d.collapse_bound < F(1, 10 ** 6)
    assert all(w > 0 for w in d.weights)
    assert list(d.positions) == sorted(set(d.positions))
    # lumping at centroids keeps the mean
    assert sum(x * w for x, w in d.atoms) == F(1, 2)


def test_discretize_rejections():
    with pytest.raises(ValueError):
        discretize(0)
    with pytest.raises(ValueError):
        discretize(F(3, 2))
    with pytest.raises(ValueError, match="atom cap"):
        discretize(F(1, 2 ** 30))


def test_collapse_bound_monotone():
    bounds = [discretize(F(1, 2 ** k)).collapse_bound for k in range(0, 12)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))


def test_dp_two_atoms():
    res = kmeans_exact_dp(discretize(F(1, 2)), 2)
    assert res.exact_distortion == 0
    assert res.points == [pytest.approx(1 / 6), pytest.approx(5 / 6)]
    with pytest.raises(ValueError):
        kmeans_exact_dp(discretize(F(1, 2)), 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dp_sandwich(fine, n):
    res = kmeans_exact_dp(fine, n)
    assert abs(res.exact_distortion - quantization_error(n)) <= fine.collapse_bound
    assert match_optimal_set(res.points, n)


def test_dp_float_and_exact_agree(fine):
    for n, res in kmeans_exact_dp_all(fine, range(1, 9)).items():
        assert res.distortion == pytest.approx(float(res.exact_distortion), rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("trial", range(40))
def test_dp_matches_brute_force(trial):
    rng = random.Random(1000 + trial)
    d = random_measure(rng, rng.randint(1, 12))
    xs = [float(x) for x in d.positions]
    ws = [float(w) for w in d.weights]
    for n in range(1, min(5, len(d)) + 1):
        best = brute_kmeans(xs, ws, n)
        got = kmeans_exact_dp(d, n, exact=False).distortion
        assert got == pytest.approx(best, rel=1e-12, abs=1e-15)


def test_exact_cluster_distortion():
    d = discretize(F(1, 2))
    centers, total = exact_cluster_distortion(d, [(0, 2)])
    assert centers == [F(1, 2)]
    assert total == F(1, 9)


def test_lloyd_single_cluster(fine):
    res = lloyd(fine, 1, seed=3)
    assert res.points[0] == pytest.approx(0.5, abs=1e-15)


def test_lloyd_every_atom_its_own_cluster():
    d = discretize(F(1, 8))
    res = lloyd(d, len(d), seed=0)
    assert res.distortion == 0
    assert np.allclose(sorted(res.points), [float(x) for x in d.positions])


@pytest.mark.parametrize("seed", range(6))
def test_lloyd_dominated_by_dp(fine, seed):
    dp = kmeans_exact_dp(fine, 2)
    res = lloyd(fine, 2, seed=seed)
    assert res.distortion >= dp.distortion - 1e-15
    assert np.allclose(res.points, [1 / 6, 5 / 6], atol=1e-3)
    hist = res.history
    assert all(b <= a + 1e-15 for a, b in zip(hist, hist[1:]))


@pytest.mark.parametrize("seed", range(4))
def test_lloyd_monotone_many_clusters(fine, seed):
    res = lloyd(fine, 7, seed=seed, max_iter=200)
    hist = res.history
    assert all(b <= a * (1 + 1e-12) + 1e-18 for a, b in zip(hist, hist[1:]))
    assert res.distortion >= kmeans_exact_dp(fine, 7).distortion - 1e-15


def test_lloyd_reseeds_empty_cluster():
    # two far-apart heavy atoms and a centre stranded between them
    d = DiscreteMeasure((F(0), F(1, 100), F(99, 100), F(1)),
                        (F(1, 4),) * 4, F(0))
    res = lloyd(d, 3, seed=1)
    assert res.distortion <= 1e-4


def test_compare_pass(fine):
    report = compare(4, F(1, 2 ** 10), measure=fine)
    assert report.passed
    assert report.exact_error == F(1, 648)
    assert report.matches_optimal_set
    rec = report_record(report)
    assert rec["exact_error"]["exact"] == "1/648"
    assert rec["passed"] is True


def test_compare_degenerate():
    report = compare(2, 1)
    assert not report.passed
    assert report.collapse_bound == F(1, 8)


def test_compare_loose_bound_fails():
    report = compare(2, F(1, 2))
    assert not report.separates_neighbours
    assert not report.passed
