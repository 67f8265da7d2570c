"""Immutable undirected graphs in compressed adjacency form.

Nodes are dense integer ids in [0, node_count). Distances are unweighted
hop counts; nodes in other components carry the UNREACHABLE sentinel,
which is never mixed into arithmetic.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

log = logging.getLogger(__name__)

# All-ones u32 bit pattern; strictly greater than any finite hop count.
UNREACHABLE = int(np.iinfo(np.uint32).max)

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a over a byte string."""
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


class GraphParseError(ValueError):
    """Raised on malformed edge-list input; message carries the line number."""


@dataclass(frozen=True)
class Graph:
    """Undirected graph, CSR adjacency with both arc directions stored.

    Invariants: neighbor lists sorted ascending and duplicate-free, every
    arc has its reverse, no self-loops, all ids in [0, node_count).
    """

    node_count: int
    indptr: np.ndarray          # int64, len node_count + 1
    indices: np.ndarray         # int32 neighbor ids
    edge_count: int             # undirected edges counted once
    original_ids: np.ndarray    # dense id -> id in the source edge list
    self_loops_dropped: int = 0
    duplicates_collapsed: int = 0

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def adjacency_lists(self) -> tuple:
        # plain-int lists; BFS over these is much faster than per-node
        # numpy slicing at oracle scale
        idx = self.indices.tolist()
        ptr = self.indptr.tolist()
        return tuple(idx[ptr[v]:ptr[v + 1]] for v in range(self.node_count))

    def edges(self) -> np.ndarray:
        """(E, 2) array of undirected edges with u < v, sorted."""
        out = np.empty((self.edge_count, 2), dtype=np.int64)
        k = 0
        for u in range(self.node_count):
            nbrs = self.neighbors(u)
            for v in nbrs[nbrs > u]:
                out[k, 0] = u
                out[k, 1] = v
                k += 1
        return out

    def to_edge_list_text(self) -> str:
        """Canonical edge-list serialization (dense ids, u < v, sorted)."""
        lines = [f"{u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + ("\n" if lines else "")

    @cached_property
    def graph_hash(self) -> str:
        """64-bit FNV-1a over the canonical sorted edge list, as hex."""
        return format(fnv1a64(self.to_edge_list_text().encode()), "016x")


def from_edge_array(edges: np.ndarray, node_count: int | None = None,
                    original_ids: np.ndarray | None = None) -> Graph:
    """Build a Graph from an (E, 2) array of dense-id endpoint pairs.

    Self-loops are dropped (they never change hop distances) and duplicate
    edges collapsed, both counted on the result.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if node_count is None:
        node_count = int(edges.max()) + 1 if edges.size else 0
    if edges.size and (edges.min() < 0 or edges.max() >= node_count):
        raise ValueError("edge endpoint outside [0, node_count)")

    loops = edges[:, 0] == edges[:, 1]
    n_loops = int(loops.sum())
    edges = edges[~loops]
    # canonical (min, max) then dedup
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    if lo.size:
        keys = np.unique(lo * np.int64(node_count) + hi)
        lo = keys // node_count
        hi = keys % node_count
    n_dups = int(edges.shape[0] - lo.size)

    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)

    if original_ids is None:
        original_ids = np.arange(node_count, dtype=np.int64)
    if n_loops:
        log.warning("dropped %d self-loop(s) during graph construction", n_loops)
    return Graph(node_count=node_count, indptr=indptr,
                 indices=dst.astype(np.int32), edge_count=int(lo.size),
                 original_ids=np.asarray(original_ids, dtype=np.int64),
                 self_loops_dropped=n_loops, duplicates_collapsed=n_dups)


def load_edge_list(text: str, format: str = "edgelist") -> Graph:
    """Parse edge-list content into a Graph.

    One edge per line, two whitespace-separated (``edgelist``) or
    comma-separated (``csv``) integers; lines starting with ``#`` are
    ignored. Ids need not be contiguous; a dense remap is produced and
    recorded on ``Graph.original_ids``.
    """
    if format not in ("edgelist", "csv"):
        raise ValueError(f"unknown format {format!r}")
    raw_pairs = []
    seen_ids = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(",") if format == "csv" else stripped.split()
        if len(parts) != 2:
            raise GraphParseError(
                f"line {lineno}: expected two node ids, got {stripped!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(
                f"line {lineno}: non-integer node id in {stripped!r}") from None
        raw_pairs.append((a, b))
        seen_ids.add(a)
        seen_ids.add(b)
    if not raw_pairs:
        raise GraphParseError("empty input: no edges found")

    ids = np.array(sorted(seen_ids), dtype=np.int64)
    remap = {int(orig): i for i, orig in enumerate(ids)}
    dense = np.array([(remap[a], remap[b]) for a, b in raw_pairs], dtype=np.int64)
    return from_edge_array(dense, node_count=len(ids), original_ids=ids)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Exact hop counts from ``source`` to every node, uint32.

    Unreachable nodes carry UNREACHABLE.
    """
    n = g.node_count
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range [0, {n})")
    adj = g.adjacency_lists
    dist = [UNREACHABLE] * n
    dist[source] = 0
    queue = [source]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] == UNREACHABLE:
                dist[w] = du
                queue.append(w)
    return np.array(dist, dtype=np.uint32)


def k_hop_neighborhood(g: Graph, v: int, c: int) -> np.ndarray:
    """Sorted ids of nodes within c hops of v, v included."""
    n = g.node_count
    if not 0 <= v < n:
        raise IndexError(f"node {v} out of range [0, {n})")
    if c < 1:
        raise ValueError("radius c must be >= 1")
    adj = g.adjacency_lists
    depth = {v: 0}
    queue = [v]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        du = depth[u]
        if du == c:
            continue
        for w in adj[u]:
            if w not in depth:
                depth[w] = du + 1
                queue.append(w)
    return np.array(sorted(depth), dtype=np.int64)


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Dense (N, N) hop-count matrix via one BFS per node.

    Test-oracle scale: memory is N^2, intended for N up to a few thousand.
    """
    n = g.node_count
    out = np.empty((n, n), dtype=np.uint32)
    for v in range(n):
        out[v] = bfs_distances(g, v)
    return out
