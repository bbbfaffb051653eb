"""K-nearest-neighbor gender classification over a feature database.

Exhaustive scan with Euclidean distance; database sizes here (thousands)
make the exact scan both fast and trivially testable against a sort-and-
vote oracle. Neighbor selection is made deterministic by breaking equal
distances with the lexicographic source id, and vote ties are resolved by
the single nearest neighbor's class (the k=1 semantics).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import KTooLargeError, LengthMismatchError
from .features import FeatureDatabase, FusedFeature
from .image_io import Gender

# vote ties always go to the class of the single nearest neighbor
TIE_BREAK = "nearest-neighbor-class"


@dataclass
class KnnConfig:
    k_neighbors: int = 1
    tie_break: str = TIE_BREAK

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")
        if self.tie_break != TIE_BREAK:
            raise ValueError(f"only {TIE_BREAK!r} tie-breaking is supported")


@dataclass
class Classification:
    label: Gender
    votes: dict[Gender, int]
    neighbor_ids: list[str] = field(default_factory=list)
    neighbor_distances: list[float] = field(default_factory=list)


def euclidean_distance(a: np.ndarray, b: np.ndarray) -> float:
    """sqrt of the summed squared differences; lengths must match."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatchError(
            f"cannot compare vectors of shapes {a.shape} and {b.shape}"
        )
    return float(np.sqrt(np.sum((a - b) ** 2)))


def knn_classify(query: FusedFeature, db: FeatureDatabase, cfg: KnnConfig) -> Classification:
    """Classify `query` by majority vote of its k nearest database entries."""
    if cfg.k_neighbors > len(db.entries):
        raise KTooLargeError(
            f"k={cfg.k_neighbors} exceeds database size {len(db.entries)}"
        )
    expected = db.config.layout.total
    if len(query.values) != expected:
        raise LengthMismatchError(
            f"query length {len(query.values)} does not match database "
            f"feature length {expected}"
        )
    ranked = sorted(
        (
            (euclidean_distance(query.values, e.feature.values), e.source_id, e.gender)
            for e in db.entries
        ),
        key=lambda item: (item[0], item[1]),
    )
    neighbors = ranked[: cfg.k_neighbors]
    votes: dict[Gender, int] = {}
    for _, _, gender in neighbors:
        votes[gender] = votes.get(gender, 0) + 1
    top = max(votes.values())
    leaders = [g for g, v in votes.items() if v == top]
    label = leaders[0] if len(leaders) == 1 else neighbors[0][2]
    return Classification(
        label=label,
        votes=votes,
        neighbor_ids=[sid for _, sid, _ in neighbors],
        neighbor_distances=[dist for dist, _, _ in neighbors],
    )
