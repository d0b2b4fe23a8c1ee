"""Exact evaluation of the self-similar measure P on [0, 1].

P is the unique probability measure with ``P = sum_j 2**-j P o S_j^-1`` for
``S_j(x) = x/3**j + 1 - 1/3**(j-1)``.  Everything here is a
``fractions.Fraction``; no floating point is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Tuple

from .words import Word, contraction_ratio, prob_weight, tail_mass, tail_representative

MEAN = Fraction(1, 2)
VARIANCE = Fraction(1, 8)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class Moments:
    mean: Fraction
    variance: Fraction

    @property
    def second_raw_moment(self) -> Fraction:
        return self.variance + self.mean ** 2


def moments() -> Moments:
    """Mean and variance of P (1/2 and 1/8)."""
    return Moments(MEAN, VARIANCE)


def apply_similitude(j: int, x) -> Fraction:
    if j < 1:
        raise ValueError(f"similitude index must be >= 1, got {j}")
    return Fraction(x) / 3 ** j + 1 - Fraction(1, 3 ** (j - 1))


def apply_word_map(w: Word, x) -> Fraction:
    """Evaluate ``S_w(x) = S_w1(S_w2(... S_wk(x)))``."""
    y = Fraction(x)
    for j in reversed(w):
        y = apply_similitude(j, y)
    return y


def affine_coefficients(w: Word) -> Tuple[Fraction, Fraction]:
    """Return ``(s, t)`` with ``S_w(x) = s*x + t``."""
    s = contraction_ratio(w)
    return s, apply_word_map(w, 0)


def cell_interval(w: Word) -> Interval:
    """The piece ``J_w = S_w([0, 1])``."""
    return Interval(apply_word_map(w, 0), apply_word_map(w, 1))


def tail_interval(w: Word) -> Interval:
    """Smallest closed interval holding every ``J_{w^-(w_last+j)}``, j >= 1."""
    if not w:
        raise ValueError("tail pieces are undefined for the empty word")
    head = w[:-1]
    return Interval(apply_word_map(head, apply_similitude(w[-1] + 1, 0)),
                    apply_word_map(head, 1))


def tail_centroid_level(k: int) -> Fraction:
    """Conditional mean of P on ``J_k u J_{k+1} u ...``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 1 - Fraction(1, 2 * 3 ** (k - 1))


@lru_cache(maxsize=None)
def cell_centroid(w: Word) -> Fraction:
    return apply_word_map(w, HALF)


@lru_cache(maxsize=None)
def tail_centroid(w: Word) -> Fraction:
    """Conditional mean of P on the tail pieces of ``w``."""
    first = tail_representative(w, 1)
    return cell_centroid(first) + contraction_ratio(first)


def cell_error(w: Word) -> Fraction:
    """``p_w s_w**2 V``: error of a cell (or of its tail) about its own centroid."""
    return Fraction(1, 8 * 18 ** sum(w))


def cell_distortion(w: Word, x0) -> Fraction:
    """``int_{J_w} (x - x0)**2 dP``."""
    d = cell_centroid(w) - Fraction(x0)
    return prob_weight(w) * (contraction_ratio(w) ** 2 * VARIANCE + d * d)


def tail_distortion(w: Word, x0) -> Fraction:
    """``int`` of ``(x - x0)**2`` over the tail pieces of ``w``."""
    d = Fraction(x0) - tail_centroid(w)
    return cell_error(w) + d * d * tail_mass(w)


def _poly_integral(coeffs: Sequence[Fraction], s: Fraction, t: Fraction) -> Fraction:
    # int f(s*x + t) dP(x) using E[X] = 1/2, E[X^2] = 3/8
    c = list(coeffs) + [Fraction(0)] * (3 - len(coeffs))
    m1, m2 = MEAN, VARIANCE + MEAN ** 2
    return (c[0]
            + c[1] * (s * m1 + t)
            + c[2] * (s * s * m2 + 2 * s * t * m1 + t * t))


def _sup_abs_on_unit(coeffs: Sequence[Fraction]) -> Fraction:
    c = list(coeffs) + [Fraction(0)] * (3 - len(coeffs))

    def f(x):
        return c[0] + c[1] * x + c[2] * x * x

    candidates = [Fraction(0), Fraction(1)]
    if c[2] != 0:
        vertex = -c[1] / (2 * c[2])
        if 0 <= vertex <= 1:
            candidates.append(vertex)
    return max(abs(f(x)) for x in candidates)


@dataclass(frozen=True)
class IntegralCheck:
    lhs: Fraction
    rhs_truncated: Fraction
    truncation_bound: Fraction

    @property
    def ok(self) -> bool:
        return abs(self.lhs - self.rhs_truncated) <= self.truncation_bound


def self_similar_integral_check(k: int, max_letter: int, poly_coeffs,
                                max_terms: int = 10 ** 6) -> IntegralCheck:
    """Compare ``int f dP`` with ``sum_{|w|=k} p_w int f o S_w dP`` for quadratic f.

    The right side runs over letters ``1..max_letter`` only.  The omitted
    words carry mass ``1 - (1 - 2**-max_letter)**k``, all of it on [0, 1],
    so the gap is at most that mass times ``sup |f|`` on [0, 1].
    ``poly_coeffs`` lists coefficients from the constant term upward.
    """
    coeffs = [Fraction(c) for c in poly_coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) > 3:
        raise ValueError("only integrands of degree <= 2 are supported")
    if k < 1 or max_letter < 1:
        raise ValueError("k and max_letter must be positive")
    if max_letter ** k > max_terms:
        raise ValueError(f"{max_letter}**{k} terms exceeds the cap of {max_terms}")

    lhs = _poly_integral(coeffs, Fraction(1), Fraction(0))
    # S_w = S_{w1} o S_{w'}: s_w = s_w1 s_w', t_w = s_w1 t_w' + t_w1
    layer = {(): (Fraction(1), Fraction(1), Fraction(0))}
    for _ in range(k):
        nxt = {}
        for w, (p, s, t) in layer.items():
            for j in range(1, max_letter + 1):
                sj = Fraction(1, 3 ** j)
                nxt[(j,) + w] = (p / 2 ** j, sj * s, sj * t + 1 - 3 * sj)
        layer = nxt
    rhs = sum((p * _poly_integral(coeffs, s, t) for p, s, t in layer.values()),
              Fraction(0))
    omitted = 1 - (1 - Fraction(1, 2 ** max_letter)) ** k
    return IntegralCheck(lhs, rhs, omitted * _sup_abs_on_unit(coeffs))
