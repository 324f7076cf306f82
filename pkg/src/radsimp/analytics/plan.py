"""Counterbalanced variant assignment via a cyclic Latin square."""
from __future__ import annotations

from typing import Sequence, TypeVar

from ..errors import InsufficientData

V = TypeVar("V")


def latin_square_plan(
    n_raters: int, sentences: Sequence[str], variants: Sequence[V]
) -> dict[tuple[int, str], V]:
    """Assign ``variants[(r + s) mod k]`` to rater index ``r`` and sentence index ``s``.

    When ``len(variants)`` divides both the rater count and the sentence
    count, every rater sees every variant equally often and every
    (sentence, variant) pair is assigned to the same number of raters.
    """
    if n_raters <= 0:
        raise InsufficientData("need at least one rater")
    if not sentences:
        raise InsufficientData("need at least one sentence")
    if not variants:
        raise InsufficientData("need at least one variant")
    k = len(variants)
    return {
        (r, sentence_id): variants[(r + s) % k]
        for r in range(n_raters)
        for s, sentence_id in enumerate(sentences)
    }
