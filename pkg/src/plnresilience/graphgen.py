"""Power-law degree histograms and configuration-model multigraphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse

from .analytic import PlnParams

#: Recorded in run metadata so outputs can be tied to a generator.
RNG_ALGORITHM = "numpy.random.PCG64"

FORMAT_TAG = "plngraph"
FORMAT_VERSION = "v1"


class GraphFormatError(ValueError):
    """A graph file is malformed or inconsistent with its header."""


def make_rng(seed, *spawn_key: int) -> np.random.Generator:
    """PCG64 generator for ``seed``, optionally split by an integer counter path."""
    if isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in spawn_key))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class DegreeHistogram:
    counts: dict[int, int]

    def __post_init__(self):
        clean = {}
        for k, c in sorted(self.counts.items()):
            k, c = int(k), int(c)
            if k < 1:
                raise ValueError(f"histogram degrees must be >= 1, got {k}")
            if c < 0:
                raise ValueError(f"negative count {c} for degree {k}")
            if c:
                clean[k] = c
        object.__setattr__(self, "counts", clean)

    @property
    def total_nodes(self) -> int:
        return sum(self.counts.values())

    @property
    def total_stubs(self) -> int:
        return sum(k * c for k, c in self.counts.items())

    @property
    def max_degree(self) -> int:
        return max(self.counts, default=0)

    def degree_sequence(self) -> np.ndarray:
        """Per-vertex degrees in descending order (vertex 0 has the max degree)."""
        ks = np.array(sorted(self.counts, reverse=True), dtype=np.int64)
        cs = np.array([self.counts[k] for k in ks], dtype=np.int64)
        return np.repeat(ks, cs)


def synthesize_histogram(params: PlnParams, mode: str = "deterministic", seed=None) -> DegreeHistogram:
    """Node counts ``exp(alpha) * k**-beta`` for ``k = 1 .. max_degree``.

    ``deterministic`` rounds each expectation to the nearest integer (half to
    even); ``stochastic`` draws each count from a Poisson law with that mean
    and needs ``seed``.  An odd stub total is fixed by one extra degree-1 node.
    """
    k = params.degrees()
    mean = np.exp(params.alpha - params.beta * np.log(k))
    if mode == "deterministic":
        counts = np.rint(mean).astype(np.int64)
    elif mode == "stochastic":
        if seed is None:
            raise ValueError("stochastic histograms need a seed")
        counts = make_rng(seed).poisson(mean).astype(np.int64)
    else:
        raise ValueError(f"unknown histogram mode {mode!r}")
    hist = {int(d): int(c) for d, c in zip(k, counts) if c}
    if sum(d * c for d, c in hist.items()) % 2:
        hist[1] = hist.get(1, 0) + 1
    return DegreeHistogram(hist)


@dataclass(frozen=True, eq=False)
class Multigraph:
    """Undirected multigraph on ``0 .. num_vertices-1`` stored as an edge list.

    Self-loops and parallel edges are allowed; a self-loop adds 2 to the
    degree of its vertex.
    """

    num_vertices: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= self.num_vertices):
            raise ValueError("edge endpoint out of range")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degree(self) -> np.ndarray:
        d = np.bincount(self.edges.ravel(), minlength=self.num_vertices)
        d.setflags(write=False)
        return d

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric CSR multiplicity matrix; a self-loop sits on the diagonal once."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        loops = u == v
        rows = np.concatenate([u, v[~loops]])
        cols = np.concatenate([v, u[~loops]])
        data = np.ones(len(rows), dtype=np.int64)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.num_vertices,) * 2)

    def edge_multiset(self) -> list[tuple[int, int]]:
        return sorted((min(a, b), max(a, b)) for a, b in self.edges.tolist())

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.num_vertices == other.num_vertices and np.array_equal(self.edges, other.edges)

    __hash__ = None


def build_configuration_multigraph(hist: DegreeHistogram, seed) -> Multigraph:
    """Shuffle the stub array and pair consecutive stubs into edges."""
    if hist.total_stubs % 2:
        raise ValueError(f"odd stub total {hist.total_stubs} cannot be paired")
    degrees = hist.degree_sequence()
    stubs = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    # Generator.shuffle is an in-place Fisher-Yates pass
    make_rng(seed).shuffle(stubs)
    return Multigraph(len(degrees), stubs.reshape(-1, 2))


def generate_graph(params: PlnParams, seed, mode: str = "deterministic") -> Multigraph:
    """Histogram plus wiring, with independent streams split off ``seed``."""
    seq = np.random.SeedSequence(int(seed)) if not isinstance(seed, np.random.SeedSequence) else seed
    hist_seq, wire_seq = seq.spawn(2)
    hist = synthesize_histogram(params, mode, hist_seq)
    return build_configuration_multigraph(hist, wire_seq)


def count_self_and_parallel(graph: Multigraph) -> tuple[int, int]:
    """Return ``(self_loops, parallel_edges)``.

    ``parallel_edges`` counts each extra copy of a non-loop edge between the
    same two distinct vertices; repeated loops only show up in ``self_loops``.
    """
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    loops = u == v
    a, b = np.minimum(u[~loops], v[~loops]), np.maximum(u[~loops], v[~loops])
    if len(a) == 0:
        return int(loops.sum()), 0
    keys = a * graph.num_vertices + b
    _, mult = np.unique(keys, return_counts=True)
    return int(loops.sum()), int((mult - 1).sum())


def self_loops_at(graph: Multigraph, vertex: int) -> int:
    e = graph.edges
    return int(np.sum((e[:, 0] == vertex) & (e[:, 1] == vertex)))


def save_graph(graph: Multigraph, path) -> None:
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"{FORMAT_TAG} {FORMAT_VERSION} {graph.num_vertices} {graph.num_edges}\n")
        if graph.num_edges:
            np.savetxt(fh, graph.edges, fmt="%d")


def load_graph(path) -> Multigraph:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != FORMAT_TAG or header[1] != FORMAT_VERSION:
            raise GraphFormatError(f"{path}: not a {FORMAT_TAG} {FORMAT_VERSION} file")
        try:
            n, m = int(header[2]), int(header[3])
        except ValueError:
            raise GraphFormatError(f"{path}: non-integer sizes in header") from None
        if n < 0 or m < 0:
            raise GraphFormatError(f"{path}: negative sizes in header")
        edges = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'u v'")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer vertex id") from None
            if not (0 <= a < n and 0 <= b < n):
                raise GraphFormatError(f"{path}:{lineno}: vertex id out of range")
            edges.append((a, b))
    if len(edges) != m:
        raise GraphFormatError(f"{path}: header says {m} edges, found {len(edges)}")
    return Multigraph(n, np.array(edges, dtype=np.int64).reshape(-1, 2))

