"""Independent check of optimality on a finite approximation of P.

:func:`discretize` collapses small pieces of P onto their centroids and keeps
an exact bound on the distortion this can cost.  :func:`kmeans_exact_dp`
then solves weighted 1-D k-means on the atoms exactly (contiguous clusters,
interval-cost dynamic programming), and :func:`lloyd` is the usual
fixed-point iteration for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .measure import cell_centroid, cell_error, tail_centroid
from .quantizer import (
    DEFAULT_ENUMERATION_CAP,
    count_optimal_sets,
    iter_optimal_sets,
    quantization_error,
)
from .words import EMPTY, Word, prob_weight, tail_mass

DEFAULT_EPSILON = Fraction(1, 2 ** 14)
DEFAULT_ATOM_CAP = 10 ** 6
MATCH_TOLERANCE = 1e-3

EXACT_DP = "exact_dp"
LLOYD = "lloyd"


@dataclass(frozen=True)
class DiscreteMeasure:
    positions: Tuple[Fraction, ...]
    weights: Tuple[Fraction, ...]
    collapse_bound: Fraction

    def __post_init__(self):
        if len(self.positions) != len(self.weights):
            raise ValueError("positions and weights differ in length")

    def __len__(self):
        return len(self.positions)

    @property
    def atoms(self) -> List[Tuple[Fraction, Fraction]]:
        return list(zip(self.positions, self.weights))

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return (np.array([float(x) for x in self.positions]),
                np.array([float(w) for w in self.weights]))

    def csv_rows(self) -> List[List[str]]:
        from .formatting import decimal_str, rational_str

        rows = [["position_decimal", "position_rational", "weight_rational"]]
        for x, w in self.atoms:
            rows.append([decimal_str(x), rational_str(x), rational_str(w)])
        return rows


def _estimate_atoms(epsilon: Fraction) -> int:
    # words with p_w > eps are the compositions of sums < log2(1/eps); each
    # expanded word contributes at most two atoms
    depth = math.floor(math.log2(1 / epsilon))
    return 2 ** (depth + 1)


def discretize(epsilon=DEFAULT_EPSILON, atom_cap: int = DEFAULT_ATOM_CAP) -> DiscreteMeasure:
    """Atomic approximation of P with a certified collapse bound.

    A word is expanded while its weight exceeds ``epsilon``.  Its children
    ``w1, ..., wJ`` are kept explicitly, where J is the last child heavier
    than ``epsilon`` (at least 1); the rest of ``w`` is lumped at the tail
    centroid of ``wJ``.  Each collapsed piece adds its own error
    ``p s**2 / 8`` to the bound.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    estimate = _estimate_atoms(epsilon)
    if estimate > atom_cap:
        raise ValueError(f"epsilon={epsilon} needs about {estimate} atoms, "
                         f"above the atom cap {atom_cap}")

    atoms: List[Tuple[Fraction, Fraction]] = []
    bound = Fraction(0)

    def expand(w: Word) -> None:
        nonlocal bound
        p = prob_weight(w)
        last = 1
        while p / 2 ** (last + 1) > epsilon:
            last += 1
        for j in range(1, last + 1):
            child = w + (j,)
            if prob_weight(child) > epsilon:
                expand(child)
            else:
                atoms.append((cell_centroid(child), prob_weight(child)))
                bound += cell_error(child)
        lump = w + (last,)
        atoms.append((tail_centroid(lump), tail_mass(lump)))
        bound += cell_error(lump)

    if prob_weight(EMPTY) > epsilon:
        expand(EMPTY)
    else:
        atoms.append((cell_centroid(EMPTY), Fraction(1)))
        bound += cell_error(EMPTY)

    atoms.sort()
    positions = tuple(x for x, _ in atoms)
    weights = tuple(w for _, w in atoms)
    for a, b in zip(positions, positions[1:]):
        if not a < b:
            raise AssertionError("atom positions collide")
    return DiscreteMeasure(positions, weights, bound)


@dataclass
class OracleResult:
    n: int
    points: List[float]
    distortion: float
    method: str
    iterations: int = 0
    clusters: List[Tuple[int, int]] = field(default_factory=list)
    exact_distortion: Optional[Fraction] = None
    history: List[float] = field(default_factory=list)
    reseeds: int = 0


class _PrefixCost:
    """Weighted SSE of atoms ``i..j-1`` from compensated prefix sums."""

    def __init__(self, x: np.ndarray, w: np.ndarray):
        self.x = x - x.mean()  # centering keeps the cancellation small
        self.w = w
        self.W = _prefix(w)
        self.S = _prefix(w * self.x)
        self.Q = _prefix(w * self.x * self.x)

    def cost(self, i, j):
        W = self.W[j] - self.W[i]
        S = self.S[j] - self.S[i]
        Q = self.Q[j] - self.Q[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = Q - S * S / W
        return np.maximum(c, 0.0)


def _prefix(v: np.ndarray) -> np.ndarray:
    """Cumulative sums with Neumaier compensation; ``out[0] == 0``."""
    out = np.zeros(len(v) + 1)
    total = 0.0
    comp = 0.0
    for k, val in enumerate(v.tolist()):
        t = total + val
        if abs(total) >= abs(val):
            comp += (total - t) + val
        else:
            comp += (val - t) + total
        total = t
        out[k + 1] = total + comp
    return out


def dp_tables(measure: DiscreteMeasure, max_n: int, block: int = 512):
    """Cost and split tables of the interval DP for 1..max_n clusters.

    ``cost[k][j]`` is the optimal distortion of the first ``j`` atoms with
    ``k + 1`` clusters; ``arg[k][j]`` the start of the last cluster.
    """
    x, w = measure.arrays()
    m = len(x)
    if max_n > m:
        raise ValueError(f"n={max_n} exceeds the number of atoms ({m})")
    pc = _PrefixCost(x, w)
    idx = np.arange(m + 1)
    cost = np.empty((max_n, m + 1))
    arg = np.zeros((max_n, m + 1), dtype=np.int64)
    cost[0] = pc.cost(np.zeros(m + 1, dtype=np.int64), idx)
    cost[0][0] = 0.0
    for k in range(1, max_n):
        prev = cost[k - 1]
        row = np.full(m + 1, np.inf)
        for start in range(k + 1, m + 1, block):
            js = idx[start:start + block]
            # last cluster is atoms i..j-1 with k <= i <= j-1
            i = np.arange(k, js[-1])
            total = prev[i][None, :] + pc.cost(i[None, :], js[:, None])
            total[i[None, :] >= js[:, None]] = np.inf
            best = np.argmin(total, axis=1)
            row[js] = total[np.arange(len(js)), best]
            arg[k][js] = i[best]
        cost[k] = row
    return cost, arg


def _backtrack(arg: np.ndarray, n: int, m: int) -> List[Tuple[int, int]]:
    clusters = []
    j = m
    for k in range(n - 1, -1, -1):
        i = int(arg[k][j]) if k > 0 else 0
        clusters.append((i, j))
        j = i
    return clusters[::-1]


def exact_cluster_distortion(measure: DiscreteMeasure,
                             clusters: Sequence[Tuple[int, int]]) -> Tuple[List[Fraction], Fraction]:
    """Rational centroids and distortion of a contiguous clustering."""
    centers = []
    total = Fraction(0)
    for i, j in clusters:
        ws = measure.weights[i:j]
        xs = measure.positions[i:j]
        W = sum(ws, Fraction(0))
        c = sum((a * b for a, b in zip(ws, xs)), Fraction(0)) / W
        centers.append(c)
        total += sum((b * (a - c) ** 2 for a, b in zip(xs, ws)), Fraction(0))
    return centers, total


def _cluster_distortion_float(x: np.ndarray, w: np.ndarray,
                              clusters: Sequence[Tuple[int, int]]) -> Tuple[List[float], float]:
    # two-pass per cluster: prefix-sum differences lose the small costs
    centers = []
    total = []
    for i, j in clusters:
        xs, ws = x[i:j], w[i:j]
        c = math.fsum(ws * xs) / math.fsum(ws)
        centers.append(c)
        total.append(math.fsum(ws * (xs - c) ** 2))
    return centers, math.fsum(total)


def kmeans_exact_dp(measure: DiscreteMeasure, n: int, exact: bool = True) -> OracleResult:
    """Globally optimal weighted n-means of the atoms.

    The search runs in floating point; with ``exact`` the winning clustering
    is re-evaluated in rational arithmetic as well.
    """
    results = kmeans_exact_dp_all(measure, [n], exact=exact)
    return results[n]


def kmeans_exact_dp_all(measure: DiscreteMeasure, ns: Sequence[int],
                        exact: bool = True) -> dict:
    """Run one DP up to ``max(ns)`` clusters and read off every requested n."""
    ns = sorted(set(ns))
    if not ns or ns[0] < 1:
        raise ValueError("n must be >= 1")
    m = len(measure)
    _, arg = dp_tables(measure, ns[-1])
    out = {}
    for n in ns:
        clusters = _backtrack(arg, n, m)
        centers, exact_d = (exact_cluster_distortion(measure, clusters)
                            if exact else (None, None))
        pts, dist = _cluster_distortion_float(*measure.arrays(), clusters)
        if centers is not None:
            pts = [float(c) for c in centers]
        out[n] = OracleResult(n=n, points=pts, distortion=dist,
                              method=EXACT_DP, clusters=clusters,
                              exact_distortion=exact_d)
    return out


def _distortion(x, w, centers):
    d = (x[:, None] - centers[None, :]) ** 2
    return float(np.sum(w * d.min(axis=1)))


def lloyd(measure: DiscreteMeasure, n: int, seed: int = 0, max_iter: int = 500,
          tol: float = 1e-14) -> OracleResult:
    """Weighted Lloyd iteration from ``n`` distinct atoms chosen by ``seed``.

    Initial centres are ``numpy.random.default_rng(seed).choice(m, n,
    replace=False)`` atoms, sorted.  Ties in assignment go to the lower
    centre.  A centre left with no atoms is moved onto the atom with the
    largest contribution to the distortion.
    """
    x, w = measure.arrays()
    m = len(x)
    if n > m:
        raise ValueError(f"n={n} exceeds the number of atoms ({m})")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    centers = np.sort(x[rng.choice(m, size=n, replace=False)])
    history = []
    reseeds = 0
    it = 0
    for it in range(1, max_iter + 1):
        if n > 1:
            mids = (centers[1:] + centers[:-1]) / 2
            assign = np.searchsorted(mids, x, side="left")
        else:
            assign = np.zeros(m, dtype=np.int64)
        history.append(float(np.sum(w * (x - centers[assign]) ** 2)))
        mass = np.bincount(assign, weights=w, minlength=n)
        moment = np.bincount(assign, weights=w * x, minlength=n)
        new = centers.copy()
        filled = mass > 0
        new[filled] = moment[filled] / mass[filled]
        for k in np.flatnonzero(~filled):
            contrib = w * (x - new[assign]) ** 2
            far = int(np.argmax(contrib))
            new[k] = x[far]
            assign[far] = k
            reseeds += 1
        new = np.sort(new)
        shift = float(np.max(np.abs(new - centers)))
        centers = new
        if shift < tol:
            break
    final = _distortion(x, w, centers)
    history.append(final)
    return OracleResult(n=n, points=centers.tolist(), distortion=final, method=LLOYD,
                        iterations=it, history=history, reseeds=reseeds)


@dataclass
class VerificationReport:
    n: int
    exact_error: Fraction
    construction_error: Optional[Fraction]
    centroid_condition_ok: bool
    set_count: int
    epsilon: Fraction
    collapse_bound: Fraction
    atoms: int
    dp_distortion: Optional[float] = None
    dp_exact_distortion: Optional[Fraction] = None
    dp_points: List[float] = field(default_factory=list)
    within_bound: bool = False
    separates_neighbours: bool = False
    matches_optimal_set: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.within_bound and self.separates_neighbours
                and self.matches_optimal_set is not False
                and self.construction_error == self.exact_error
                and self.centroid_condition_ok)


def _separation_gap(n: int) -> Fraction:
    gaps = [quantization_error(n - 1) - quantization_error(n)] if n > 1 else []
    gaps.append(quantization_error(n) - quantization_error(n + 1))
    return min(gaps)


def match_optimal_set(points: Sequence[float], n: int, tol: float = MATCH_TOLERANCE,
                      cap: int = DEFAULT_ENUMERATION_CAP) -> Optional[bool]:
    """Whether ``points`` are within ``tol`` of some ``alpha_n(I)``.

    ``None`` when the family is too large to enumerate.
    """
    if count_optimal_sets(n) > cap:
        return None
    pts = np.asarray(points, dtype=float)
    for qs in iter_optimal_sets(n):
        ref = np.array([float(p) for p in qs.positions])
        if len(ref) == len(pts) and np.all(np.abs(ref - pts) <= tol):
            return True
    return False


def compare(n: int, epsilon=DEFAULT_EPSILON, atom_cap: int = DEFAULT_ATOM_CAP,
            tol: float = MATCH_TOLERANCE, measure: Optional[DiscreteMeasure] = None,
            dp: Optional[OracleResult] = None) -> VerificationReport:
    """Check the closed-form ``V_n`` against the DP optimum on ``discretize(epsilon)``.

    Passes when the DP distortion is within the collapse bound of ``V_n``,
    the bound is below half the gap to ``V_{n-1}`` and ``V_{n+1}`` (so the
    check actually distinguishes n), and the DP centres sit within ``tol`` of
    one of the constructed optimal sets.
    """
    from .quantizer import build_optimal_set, centroid_condition_check, set_distortion

    epsilon = Fraction(epsilon)
    exact = quantization_error(n)
    if n >= 2:
        level = n.bit_length() - 1
        qs = build_optimal_set(n, range(n - 2 ** level))
    else:
        qs = build_optimal_set(1)
    if measure is None:
        measure = discretize(epsilon, atom_cap)
    report = VerificationReport(
        n=n, exact_error=exact, construction_error=set_distortion(qs),
        centroid_condition_ok=centroid_condition_check(qs),
        set_count=count_optimal_sets(n), epsilon=epsilon,
        collapse_bound=measure.collapse_bound, atoms=len(measure))
    if n > len(measure):
        report.notes.append(f"only {len(measure)} atoms for n={n}")
        return report
    if dp is None:
        dp = kmeans_exact_dp(measure, n)
    report.dp_distortion = dp.distortion
    report.dp_exact_distortion = dp.exact_distortion
    report.dp_points = list(dp.points)
    observed = dp.exact_distortion if dp.exact_distortion is not None else Fraction(dp.distortion)
    report.within_bound = abs(observed - exact) <= measure.collapse_bound
    report.separates_neighbours = 2 * measure.collapse_bound < _separation_gap(n)
    if not report.within_bound:
        report.notes.append("DP distortion outside the collapse bound")
    if not report.separates_neighbours:
        report.notes.append("collapse bound too loose to separate V_n from its neighbours")
    report.matches_optimal_set = match_optimal_set(dp.points, n, tol)
    if report.matches_optimal_set is None:
        report.notes.append("optimal-set family too large to match against")
    return report


def report_record(report: VerificationReport) -> dict:
    from .formatting import exact_pair

    return {
        "n": report.n,
        "passed": report.passed,
        "exact_error": exact_pair(report.exact_error),
        "construction_error": (exact_pair(report.construction_error)
                               if report.construction_error is not None else None),
        "centroid_condition_ok": report.centroid_condition_ok,
        "set_count": report.set_count,
        "epsilon": exact_pair(report.epsilon),
        "atoms": report.atoms,
        "collapse_bound": exact_pair(report.collapse_bound),
        "dp_distortion": report.dp_distortion,
        "dp_exact_distortion": (exact_pair(report.dp_exact_distortion)
                                if report.dp_exact_distortion is not None else None),
        "dp_points": report.dp_points,
        "within_bound": report.within_bound,
        "separates_neighbours": report.separates_neighbours,
        "matches_optimal_set": report.matches_optimal_set,
        "notes": report.notes,
    }
