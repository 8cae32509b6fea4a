"""Random node failure and connected-component census of the survivors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .graphgen import Multigraph, make_rng


@dataclass(frozen=True, eq=False)
class FailureMask:
    failed: np.ndarray
    p: float
    seed: object = None

    @property
    def failed_count(self) -> int:
        return int(np.count_nonzero(self.failed))

    def __len__(self):
        return len(self.failed)


@dataclass(frozen=True)
class ComponentCensus:
    num_vertices: int
    failed_count: int
    giant_size: int
    second_size: int
    orphan_count: int
    survivors_outside_giant: int
    total_survivors: int
    surviving_degree_histogram: dict

    @property
    def unorphaned_survivors(self) -> int:
        """Survivors that kept at least one edge (degree >= 1)."""
        return self.total_survivors - self.orphan_count

    @property
    def giant_fraction_of_survivors(self) -> float:
        return self.giant_size / self.total_survivors if self.total_survivors else 0.0


def draw_failure_mask(num_vertices: int, p: float, seed) -> FailureMask:
    """Fail each vertex independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise ValueError(f"failure probability must lie in [0, 1], got {p}")
    failed = make_rng(seed).random(num_vertices) < p
    failed.setflags(write=False)
    return FailureMask(failed, float(p), seed)


def census_components(graph: Multigraph, mask: FailureMask | None = None) -> ComponentCensus:
    """Census the subgraph induced by surviving vertices.

    An edge survives when both endpoints do.  A survivor with no surviving
    edge is an orphan; a self-loop keeps its vertex from being orphaned.
    """
    n = graph.num_vertices
    if mask is None:
        alive = np.ones(n, dtype=bool)
    else:
        if len(mask) != n:
            raise ValueError(f"mask covers {len(mask)} vertices, graph has {n}")
        alive = ~np.asarray(mask.failed, dtype=bool)

    e = graph.edges
    kept = e[alive[e[:, 0]] & alive[e[:, 1]]]
    degree = np.bincount(kept.ravel(), minlength=n)
    total = int(alive.sum())
    orphans = int(np.count_nonzero(alive & (degree == 0)))

    links = sparse.coo_matrix(
        (np.ones(len(kept), dtype=np.int8), (kept[:, 0], kept[:, 1])), shape=(n, n)
    )
    _, labels = connected_components(links, directed=False)
    sizes = np.sort(np.bincount(labels[alive]))[::-1]
    giant = int(sizes[0]) if len(sizes) else 0
    second = int(sizes[1]) if len(sizes) > 1 else 0

    ks, cs = np.unique(degree[alive], return_counts=True)
    return ComponentCensus(
        num_vertices=n,
        failed_count=n - total,
        giant_size=giant,
        second_size=second,
        orphan_count=orphans,
        survivors_outside_giant=total - giant,
        total_survivors=total,
        surviving_degree_histogram={int(k): int(c) for k, c in zip(ks, cs)},
    )


def giant_decay_ratio(before: ComponentCensus, after: ComponentCensus) -> float:
    """``m' / m``: surviving giant size over the intact giant size."""
    if before.giant_size <= 0:
        raise ValueError("intact census has an empty giant component")
    return after.giant_size / before.giant_size
