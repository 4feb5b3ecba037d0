"""Small pattern graphs H and copy counting in batches of graphs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_PATTERN_VERTICES = 5


class PatternTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class PatternGraph:
    """Simple connected graph on vertices 0..l-1 with no isolated vertex."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""

    def __post_init__(self):
        l = self.vertex_count
        if l > MAX_PATTERN_VERTICES:
            raise PatternTooLargeError(f"patterns are limited to {MAX_PATTERN_VERTICES} vertices, got {l}")
        canon = set()
        for a, b in self.edges:
            if a == b or not (0 <= a < l and 0 <= b < l):
                raise ValueError(f"bad edge {(a, b)} for {l} vertices")
            canon.add((min(a, b), max(a, b)))
        if len(canon) != len(self.edges):
            raise ValueError("duplicate edges")
        edges = tuple(sorted(canon))
        object.__setattr__(self, "edges", edges)
        touched = {v for e in edges for v in e}
        if touched != set(range(l)):
            raise ValueError("pattern has isolated vertices")
        if not _connected(l, edges):
            raise ValueError("pattern must be connected")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def automorphism_count(self) -> int:
        es = set(self.edges)
        count = 0
        for perm in itertools.permutations(range(self.vertex_count)):
            if all((min(perm[a], perm[b]), max(perm[a], perm[b])) in es for a, b in self.edges):
                count += 1
        return count

    @classmethod
    def named(cls, name: str) -> "PatternGraph":
        try:
            l, edges = NAMED_PATTERNS[name]
        except KeyError:
            raise ValueError(f"unknown pattern {name!r}; known: {sorted(NAMED_PATTERNS)}") from None
        return cls(l, tuple(edges), name)


def _connected(l: int, edges) -> bool:
    adj = {v: set() for v in range(l)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == l


NAMED_PATTERNS = {
    "edge": (2, [(0, 1)]),
    "path2": (3, [(0, 1), (1, 2)]),
    "triangle": (3, [(0, 1), (1, 2), (0, 2)]),
    "path3": (4, [(0, 1), (1, 2), (2, 3)]),
    "star3": (4, [(0, 1), (0, 2), (0, 3)]),
    "cycle4": (4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    "k4": (4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
    "cycle5": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
}


def as_pattern(h) -> PatternGraph:
    return h if isinstance(h, PatternGraph) else PatternGraph.named(h)


def edge_index(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column indices of the C(n,2) vertex pairs i < j, in row-major order."""
    return np.triu_indices(n, k=1)


def adjacency_from_edges(n: int, present: np.ndarray) -> np.ndarray:
    """Symmetric boolean adjacency (B, n, n) from edge indicators (B, C(n,2))."""
    iu, ju = edge_index(n)
    B = present.shape[0]
    adj = np.zeros((B, n, n), dtype=bool)
    adj[:, iu, ju] = present
    adj[:, ju, iu] = present
    return adj


def count_injections(adj: np.ndarray, h: PatternGraph, chunk: int = 20000) -> np.ndarray:
    """Number of injective maps V(H) -> V(G) sending edges to edges, per graph."""
    B, n, _ = adj.shape
    l = h.vertex_count
    total = np.zeros(B, dtype=np.int64)
    if n < l:
        return total
    tuples = itertools.permutations(range(n), l)
    while True:
        block = np.array(list(itertools.islice(tuples, chunk)), dtype=np.intp)
        if block.size == 0:
            break
        hit = np.ones((B, block.shape[0]), dtype=bool)
        for a, b in h.edges:
            hit &= adj[:, block[:, a], block[:, b]]
        total += hit.sum(axis=1)
    return total


def _shape_name(h: PatternGraph) -> str | None:
    # fast paths key on the vertex-labelled structure, not the display name
    for name in ("edge", "path2", "triangle"):
        l, edges = NAMED_PATTERNS[name]
        if h.vertex_count == l and h.edges == tuple(sorted(edges)):
            return name
    return None


def count_copies(adj: np.ndarray, h) -> np.ndarray:
    """Unlabeled copies of H in each graph of a (B, n, n) boolean batch."""
    h = as_pattern(h)
    adj = np.asarray(adj, dtype=bool)
    if adj.ndim == 2:
        return count_copies(adj[None], h)
    shape = _shape_name(h)
    if shape == "edge":
        return adj.sum(axis=(1, 2)) // 2
    if shape == "path2":
        deg = adj.sum(axis=2).astype(np.int64)
        return (deg * (deg - 1) // 2).sum(axis=1)
    if shape == "triangle":
        # float32 products stay exact while 6 C(n,3) < 2^24
        a = adj.astype(np.float32 if adj.shape[1] <= 200 else np.float64)
        return np.rint(((a @ a) * a).sum(axis=(1, 2)) / 6.0).astype(np.int64)
    return count_injections(adj, h) // h.automorphism_count
