"""Optimal sets of n-means for P and their exact quantization errors.

Every point of a constructed set is labelled either ``Cell(w)`` (the centroid
of the piece ``J_w``) or ``Tail(w)`` (the centroid of the union of the pieces
``J_{w^-(w_last+j)}``, j >= 1).  The labels carry the whole construction: the
Voronoi region of a labelled point covers exactly its own piece, so the
distortion of a set is the sum of the per-piece errors.

Level sets ``alpha(l)`` hold ``Cell(w)`` and ``Tail(w)`` for every word ``w``
with letter sum ``l``; an optimal set of n-means with ``2**l <= n < 2**(l+1)``
is obtained from ``alpha(l)`` by splitting ``n - 2**l`` of its points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .formatting import decimal_str, rational_str
from .measure import (
    Interval,
    VARIANCE,
    apply_similitude,
    cell_centroid,
    cell_error,
    cell_interval,
    tail_centroid,
    tail_interval,
)
from .words import (
    Word,
    compositions,
    format_word,
    prob_weight,
    tail_mass,
    tail_representative,
)

CELL = "cell"
TAIL = "tail"

DEFAULT_DEPTH_CAP = 20
DEFAULT_ENUMERATION_CAP = 10 ** 5

ONE_THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)


@dataclass(frozen=True)
class LabeledPoint:
    """A quantizer point tagged with the piece it is the centroid of.

    Use :func:`cell_point` / :func:`tail_point` to build consistent points.
    The constructor itself does not recompute the position, so a moved point
    can be expressed; :attr:`consistent` tells the two apart.
    """

    kind: str
    word: Word
    position: Fraction

    def __post_init__(self):
        if self.kind not in (CELL, TAIL):
            raise ValueError(f"kind must be {CELL!r} or {TAIL!r}, got {self.kind!r}")
        if self.kind == TAIL and not self.word:
            raise ValueError("a tail point needs a non-empty word")

    @property
    def label(self) -> str:
        return ("Cell" if self.kind == CELL else "Tail") + format_word(self.word)

    @cached_property
    def level(self) -> int:
        """Letter sum of the word; the piece error is ``18**-level / 8``."""
        return sum(self.word)

    @cached_property
    def consistent(self) -> bool:
        return self.position == _centroid(self.kind, self.word)

    @cached_property
    def piece(self) -> Interval:
        if self.kind == CELL:
            return cell_interval(self.word)
        return tail_interval(self.word)

    @cached_property
    def mass(self) -> Fraction:
        if self.kind == CELL:
            return prob_weight(self.word)
        return tail_mass(self.word)

    @cached_property
    def error(self) -> Fraction:
        return cell_error(self.word)

    def __repr__(self):
        return f"{self.label}={self.position}"


def _centroid(kind: str, w: Word) -> Fraction:
    return cell_centroid(w) if kind == CELL else tail_centroid(w)


@lru_cache(maxsize=None)
def labeled_point(kind: str, w: Word) -> LabeledPoint:
    return LabeledPoint(kind, tuple(w), _centroid(kind, tuple(w)))


def cell_point(w: Word) -> LabeledPoint:
    return labeled_point(CELL, tuple(w))


def tail_point(w: Word) -> LabeledPoint:
    return labeled_point(TAIL, tuple(w))


def split_point(pt: LabeledPoint) -> Tuple[LabeledPoint, LabeledPoint]:
    """The two points that replace ``pt`` when it is split.

    ``Cell(w)`` becomes ``Cell(w1), Tail(w1)``; ``Tail(w)`` becomes
    ``Cell(u), Tail(u)`` with ``u = w^-(w_last+1)``.  Both lie inside the
    piece of ``pt``, left to right.
    """
    if pt.kind == CELL:
        child = pt.word + (1,)
    else:
        child = tail_representative(pt.word, 1)
    return cell_point(child), tail_point(child)


@dataclass(frozen=True)
class QuantizerSet:
    points: Tuple[LabeledPoint, ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self) -> Iterator[LabeledPoint]:
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def positions(self) -> List[Fraction]:
        return [p.position for p in self.points]

    @property
    def labels(self) -> List[str]:
        return [p.label for p in self.points]

    def check(self) -> "QuantizerSet":
        """Validate ordering and range; returns ``self``."""
        pos = self.positions
        for a, b in zip(pos, pos[1:]):
            if not a < b:
                raise ValueError(f"positions must be strictly increasing ({a} !< {b})")
        if pos and not (0 <= pos[0] and pos[-1] <= 1):
            raise ValueError("positions must lie in [0, 1]")
        return self

    @classmethod
    def from_points(cls, points: Iterable[LabeledPoint]) -> "QuantizerSet":
        return cls(tuple(sorted(points, key=lambda p: p.position))).check()


def level_index(n: int) -> int:
    """``l(n)`` with ``2**l <= n < 2**(l+1)``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return n.bit_length() - 1


@lru_cache(maxsize=32)
def _level_points(level: int) -> Tuple[LabeledPoint, ...]:
    if level == 0:
        return (cell_point(()),)
    pts = []
    for w in compositions(level):
        pts.append(cell_point(w))
        pts.append(tail_point(w))
    pts.sort(key=lambda p: p.position)
    return tuple(pts)


def build_level_set(level: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> QuantizerSet:
    """``alpha(level)``: 2**level points sorted by position."""
    if level < 0:
        raise ValueError("level must be non-negative")
    if level > depth_cap:
        raise ValueError(f"level {level} exceeds the depth cap {depth_cap}")
    return QuantizerSet(_level_points(level))


def _apply_splits(base: Sequence[LabeledPoint], indices: Iterable[int]) -> QuantizerSet:
    # children stay inside their parent's piece, so order is preserved slot-wise
    chosen = set(indices)
    out: List[LabeledPoint] = []
    for i, pt in enumerate(base):
        if i in chosen:
            out.extend(split_point(pt))
        else:
            out.append(pt)
    return QuantizerSet(tuple(out))


def build_optimal_set(n: int, subset: Iterable[int] = (),
                      depth_cap: int = DEFAULT_DEPTH_CAP) -> QuantizerSet:
    """``alpha_n(I)`` where ``I`` is given by indices into the sorted ``alpha(l(n))``."""
    if n == 1:
        if tuple(subset):
            raise ValueError("n = 1 takes no subset")
        return build_level_set(0)
    level = level_index(n)
    base = build_level_set(level, depth_cap).points
    idx = list(subset)
    need = n - 2 ** level
    if len(idx) != need:
        raise ValueError(f"subset for n={n} must have {need} indices, got {len(idx)}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate indices in subset {idx}")
    for i in idx:
        if not 0 <= i < len(base):
            raise ValueError(f"index {i} out of range 0..{len(base) - 1}")
    return _apply_splits(base, idx)


def count_optimal_sets(n: int) -> int:
    if n == 1:
        return 1
    level = level_index(n)
    return math.comb(2 ** level, n - 2 ** level)


def iter_optimal_sets(n: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> Iterator[QuantizerSet]:
    """Lazily yield every ``alpha_n(I)``, subsets in lexicographic order."""
    if n == 1:
        yield build_level_set(0)
        return
    level = level_index(n)
    base = build_level_set(level, depth_cap).points
    for subset in combinations(range(len(base)), n - 2 ** level):
        yield _apply_splits(base, subset)


def enumerate_optimal_sets(n: int, cap: int = DEFAULT_ENUMERATION_CAP,
                           depth_cap: int = DEFAULT_DEPTH_CAP) -> List[QuantizerSet]:
    count = count_optimal_sets(n)
    if count > cap:
        raise ValueError(f"n={n} has {count} optimal sets, above the enumeration cap {cap}")
    return list(iter_optimal_sets(n, depth_cap))


def quantization_error(n: int) -> Fraction:
    """Exact n-th quantization error ``V_n`` of P."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return VARIANCE
    level = level_index(n)
    return (Fraction(1, 18 ** level) * VARIANCE
            * (2 ** (level + 1) - n + Fraction(n - 2 ** level, 9)))


def _require_labels(qs: QuantizerSet) -> None:
    for pt in qs:
        if not isinstance(pt, LabeledPoint):
            raise ValueError(f"unlabelled point {pt!r}")
        if not pt.consistent:
            raise ValueError(f"{pt.label} sits at {pt.position}, not at its centroid")


def set_distortion(qs: QuantizerSet) -> Fraction:
    """Exact distortion of a constructed set: the sum of its piece errors."""
    _require_labels(qs)
    by_level = {}
    for pt in qs:
        by_level[pt.level] = by_level.get(pt.level, 0) + 1
    return sum((c * cell_error((lv,)) for lv, c in by_level.items()), Fraction(0))


def split_step(qs: QuantizerSet) -> List[QuantizerSet]:
    """All successors of an optimal set of n-means obtained by one split.

    The split targets are the points whose word maximises ``p_w s_w**2``,
    i.e. has the smallest letter sum; one successor per such point.
    """
    _require_labels(qs)
    if not len(qs):
        raise ValueError("empty set")
    low = min(pt.level for pt in qs)
    out = []
    for i, pt in enumerate(qs.points):
        if pt.level == low:
            out.append(_apply_splits(qs.points, (i,)))
    return out


def voronoi_boundaries(qs: QuantizerSet) -> List[Fraction]:
    if len(qs) < 2:
        raise ValueError("need at least two points")
    pos = qs.positions
    return [(a + b) / 2 for a, b in zip(pos, pos[1:])]


def centroid_condition_check(qs: QuantizerSet) -> bool:
    """True iff each point is the conditional mean of its Voronoi region.

    Requires every point to sit at the centroid of its labelled piece, the
    pieces to carry total mass one, and every piece to lie inside its point's
    Voronoi region ``[m_{i-1}, m_i]``.  P has no atoms, so shared boundary
    points do not matter.
    """
    for pt in qs:
        if not isinstance(pt, LabeledPoint):
            raise ValueError(f"unlabelled point {pt!r}")
    if not all(pt.consistent for pt in qs):
        return False
    if sum((pt.mass for pt in qs), Fraction(0)) != 1:
        return False
    pieces = [pt.piece for pt in qs]
    for a, b in zip(pieces, pieces[1:]):
        if a.hi > b.lo:
            return False
    if len(qs) == 1:
        return True
    mids = voronoi_boundaries(qs)
    for i, piece in enumerate(pieces):
        if i > 0 and piece.lo < mids[i - 1]:
            return False
        if i < len(mids) and piece.hi > mids[i]:
            return False
    return True


def structure_check(qs: QuantizerSet, max_k: int = 64) -> bool:
    """Shape facts shared by all optimal sets of n >= 2 means.

    No point in the gap (1/3, 2/3); at least one point in each of [0, 1/3]
    and [2/3, 1]; and some k >= 1 such that every ``J_j``, j <= k, holds a
    point while exactly one point lies at or beyond ``S_{k+1}(0)``.
    """
    pos = qs.positions
    if any(ONE_THIRD < x < TWO_THIRDS for x in pos):
        return False
    if not any(x <= ONE_THIRD for x in pos) or not any(x >= TWO_THIRDS for x in pos):
        return False
    if len(pos) < 2:
        return False
    # exactly one point at or beyond S_{k+1}(0) <=> pos[-2] < S_{k+1}(0) <= pos[-1]
    for k in range(1, max_k + 1):
        start = _first_level_start(k + 1)
        if start > pos[-1]:
            break
        if pos[-2] >= start:
            continue
        if all(any(_first_level_piece(j).contains(x) for x in pos)
               for j in range(1, k + 1)):
            return True
    return False


@lru_cache(maxsize=None)
def _first_level_start(j: int) -> Fraction:
    return apply_similitude(j, 0)


@lru_cache(maxsize=None)
def _first_level_piece(j: int) -> Interval:
    return cell_interval((j,))


@dataclass(frozen=True)
class SubsetCertificate:
    """Result of checking every ``alpha_n(I)`` at once for a given level.

    Which slots of ``alpha(level)`` are split is the only freedom, and the
    centroid condition at a boundary depends only on the two slots it
    separates, so checking each slot and each neighbouring pair of slots in
    all split/unsplit combinations covers every subset I.
    """

    level: int
    voronoi_ok: bool
    gap_ok: bool
    split_gain: Optional[Fraction]

    @property
    def ok(self) -> bool:
        return self.voronoi_ok and self.gap_ok and self.split_gain is not None


def certify_all_subsets(level: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> SubsetCertificate:
    base = build_level_set(level, depth_cap).points
    options = [((pt,), split_point(pt)) for pt in base]

    def separated(left: LabeledPoint, right: LabeledPoint) -> bool:
        mid = (left.position + right.position) / 2
        return left.piece.hi <= mid <= right.piece.lo

    voronoi_ok = sum((pt.mass for pt in base), Fraction(0)) == 1
    gains = set()
    for (pt,), (c1, c2) in options:
        voronoi_ok &= c1.consistent and c2.consistent and pt.consistent
        voronoi_ok &= c1.mass + c2.mass == pt.mass
        voronoi_ok &= separated(c1, c2)
        gains.add(pt.error - c1.error - c2.error)
    for left_opts, right_opts in zip(options, options[1:]):
        for lo in left_opts:
            for ro in right_opts:
                voronoi_ok &= separated(lo[-1], ro[0])
    gap_ok = all(not (ONE_THIRD < p.position < TWO_THIRDS)
                 for opts in options for group in opts for p in group)
    gap_ok &= base[0].position <= ONE_THIRD and base[-1].position >= TWO_THIRDS
    gain = gains.pop() if len(gains) == 1 else None
    return SubsetCertificate(level, bool(voronoi_ok), bool(gap_ok), gain)


def set_record(qs: QuantizerSet) -> dict:
    """Structured form: n, l(n), labelled points, exact and decimal distortion."""
    n = len(qs)
    distortion = set_distortion(qs)
    return {
        "n": n,
        "level": level_index(n) if n >= 2 else 0,
        "points": [
            {
                "kind": pt.kind,
                "word": format_word(pt.word),
                "label": pt.label,
                "position": rational_str(pt.position),
                "decimal": float(decimal_str(pt.position)),
            }
            for pt in qs
        ],
        "distortion": rational_str(distortion),
        "distortion_decimal": float(decimal_str(distortion)),
    }


def set_csv_rows(qs: QuantizerSet) -> List[List[str]]:
    rows = [["position", "position_decimal", "kind", "word"]]
    for pt in qs:
        rows.append([rational_str(pt.position), decimal_str(pt.position),
                     pt.kind, format_word(pt.word)])
    return rows
