"""Inter-annotator agreement: MASI set distance and Krippendorff's alpha.

Alpha uses the coincidence formulation with a pluggable distance. The
distance is applied exactly as supplied: pass a squared-difference function
for interval data; MASI is already a dissimilarity in [0, 1] and is used
unsquared.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Callable, Hashable, Iterable, TypeVar

from ..errors import InsufficientData, PerfectHomogeneity

L = TypeVar("L")

Rating = tuple[Hashable, Hashable, L]  # (item_id, rater_id, label)


def masi_distance(a: frozenset, b: frozenset) -> float:
    """Set dissimilarity 1 - Jaccard x monotonicity, in [0, 1].

    The monotonicity factor is 1 for equal sets, 2/3 when one set strictly
    contains the other, 1/3 when the sets cross (intersect but neither
    contains the other), and 0 when they are disjoint.
    """
    if not a or not b:
        raise ValueError("masi_distance requires non-empty sets")
    a, b = frozenset(a), frozenset(b)
    intersection = a & b
    if a == b:
        m = 1.0
    elif a < b or b < a:
        m = 2.0 / 3.0
    elif intersection:
        m = 1.0 / 3.0
    else:
        m = 0.0
    jaccard = len(intersection) / len(a | b)
    return 1.0 - jaccard * m


def interval_distance(a: float, b: float) -> float:
    """Squared difference, suitable for interval-scaled labels."""
    return float(a - b) ** 2


def nominal_distance(a: Hashable, b: Hashable) -> float:
    return 0.0 if a == b else 1.0


def krippendorff_alpha(
    ratings: Iterable[Rating],
    distance: Callable[[L, L], float],
) -> float:
    """Chance-corrected agreement ``1 - D_o / D_e`` over (item, rater, label) triples.

    ``D_o`` averages within-item pairwise distances, weighting each item's
    pairs by ``1 / (m - 1)`` for an item with ``m`` ratings; ``D_e`` averages
    pairwise distances over all ratings pooled across items. Items with a
    single rating are dropped (they contribute no pairs).

    Raises :class:`InsufficientData` when fewer than two items have two or
    more ratings, and :class:`PerfectHomogeneity` when every pooled pair has
    zero distance (alpha is undefined, not 1.0).
    """
    by_item: dict[Hashable, list[L]] = defaultdict(list)
    for item_id, _rater_id, label in ratings:
        by_item[item_id].append(label)

    units = {item: labels for item, labels in by_item.items() if len(labels) > 1}
    if len(units) < 2:
        raise InsufficientData(
            "alpha needs at least two items with two or more ratings each"
        )

    n = sum(len(labels) for labels in units.values())

    observed = 0.0
    for labels in units.values():
        m = len(labels)
        within = sum(
            distance(labels[i], labels[j])
            for i in range(m)
            for j in range(m)
            if i != j
        )
        observed += within / (m - 1)
    observed /= n

    pooled = [label for labels in units.values() for label in labels]
    expected = sum(
        distance(pooled[i], pooled[j])
        for i in range(n)
        for j in range(n)
        if i != j
    ) / (n * (n - 1))

    if expected == 0.0:
        raise PerfectHomogeneity("all labels identical; expected disagreement is zero")
    return 1.0 - observed / expected
