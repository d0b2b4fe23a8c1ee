"""Finite words over the positive integers.

A word is a plain tuple of letters ``(w1, ..., wk)``; the empty tuple is the
empty word.  Word ``w`` indexes the composition ``S_w1 o ... o S_wk`` of the
similitudes ``S_j(x) = x/3**j + 1 - 1/3**(j-1)``, which carry the weights
``p_j = 1/2**j`` and ratios ``s_j = 1/3**j``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Tuple

Word = Tuple[int, ...]

EMPTY: Word = ()


def word(letters: Iterable[int] = ()) -> Word:
    """Build a validated word from an iterable of positive integers."""
    w = tuple(letters)
    for letter in w:
        if isinstance(letter, bool) or not isinstance(letter, int) or letter < 1:
            raise ValueError(f"letters must be positive integers, got {letter!r}")
    return w


def concat(w: Word, t: Word) -> Word:
    return tuple(w) + tuple(t)


def drop_last(w: Word) -> Word:
    """Return ``w`` without its last letter (``w^-``)."""
    if not w:
        raise ValueError("drop_last is undefined for the empty word")
    return w[:-1]


def tail_representative(w: Word, j: int) -> Word:
    """Return ``w^-(w_last + j)``: the last letter of ``w`` raised by ``j``."""
    if not w:
        raise ValueError("tail_representative is undefined for the empty word")
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    return w[:-1] + (w[-1] + j,)


def letter_sum(w: Word) -> int:
    return sum(w)


def prob_weight(w: Word) -> Fraction:
    return Fraction(1, 2 ** sum(w))


def contraction_ratio(w: Word) -> Fraction:
    return Fraction(1, 3 ** sum(w))


def tail_mass(w: Word) -> Fraction:
    """Mass of the tail pieces ``J_{w^-(w_last+j)}``, j >= 1.

    ``sum_j p_{w^-} 2**-(w_last+j) = p_w``.  This agrees with
    ``p_{w^-} - p_w`` only when the last letter is 1.
    """
    if not w:
        raise ValueError("tail_mass is undefined for the empty word")
    return prob_weight(w)


def compositions(total: int) -> Iterator[Word]:
    """Yield every word whose letters sum to ``total``, lexicographically.

    These are exactly the words with ``prob_weight == 2**-total``.
    ``compositions(0)`` yields only the empty word.
    """
    if total < 0:
        raise ValueError("total must be non-negative")
    if total == 0:
        yield EMPTY
        return
    for first in range(1, total + 1):
        for rest in compositions(total - first):
            yield (first,) + rest


def format_word(w: Word) -> str:
    return "[" + ",".join(str(x) for x in w) + "]"


def parse_word(text: str) -> Word:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"malformed word {text!r}; expected e.g. [1,2,1]")
    body = s[1:-1].strip()
    if not body:
        return EMPTY
    try:
        return word(int(part) for part in body.split(","))
    except ValueError as exc:
        raise ValueError(f"malformed word {text!r}: {exc}") from None
