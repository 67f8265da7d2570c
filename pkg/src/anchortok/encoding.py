"""Anchor-distance encodings and the pairwise distance estimator.

Each node carries the vector of hop distances to the K anchors; the
distance between two nodes is estimated as the smallest anchor-relayed
sum. The estimate is an upper bound on the true distance, and whenever
one endpoint lies within c hops of some anchor the overshoot is at most
2c. ``verify_lemma_bound`` checks that bound exactly against a BFS
oracle and reports the combinatorial mass of pairs it cannot cover.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, bfs_distances, UNREACHABLE
from .anchors import AnchorSet


def worker_count() -> int:
    """Parallelism cap from NTPE_THREADS; defaults to serial."""
    raw = os.environ.get("NTPE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class AnchorEncoding:
    """Per-node hop distances to the ordered anchors, uint32 with the
    all-ones UNREACHABLE sentinel."""

    matrix: np.ndarray            # (N, K) uint32
    anchor_ids: np.ndarray        # (K,) int64, column order
    graph_hash: str

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.uint32)
        self.anchor_ids = np.asarray(self.anchor_ids, dtype=np.int64)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(self.anchor_ids):
            raise ValueError("encoding column count must match anchor count")
        for col, a in enumerate(self.anchor_ids):
            if self.matrix[a, col] != 0:
                raise ValueError(f"anchor {a} has nonzero self-distance")

    @property
    def node_count(self) -> int:
        return self.matrix.shape[0]

    @property
    def anchor_count(self) -> int:
        return self.matrix.shape[1]

    def as_float(self) -> np.ndarray:
        """float64 view of the distances with UNREACHABLE mapped to +inf."""
        out = self.matrix.astype(np.float64)
        out[self.matrix == np.uint32(UNREACHABLE)] = np.inf
        return out


def encode_all(g: Graph, anchors, workers: int | None = None) -> AnchorEncoding:
    """One BFS per anchor; columns follow anchor order."""
    anchor_ids = anchors.anchors if isinstance(anchors, AnchorSet) else list(anchors)
    if len(anchor_ids) == 0:
        raise ValueError("anchor list is empty")
    for a in anchor_ids:
        if not 0 <= int(a) < g.node_count:
            raise IndexError(f"anchor id {a} out of range [0, {g.node_count})")
    workers = worker_count() if workers is None else max(1, workers)

    matrix = np.empty((g.node_count, len(anchor_ids)), dtype=np.uint32)
    if workers == 1:
        for col, a in enumerate(anchor_ids):
            matrix[:, col] = bfs_distances(g, int(a))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for col, dist in enumerate(
                    pool.map(lambda a: bfs_distances(g, int(a)), anchor_ids)):
                matrix[:, col] = dist
    ghash = anchors.graph_hash if isinstance(anchors, AnchorSet) else g.graph_hash
    return AnchorEncoding(matrix=matrix, anchor_ids=np.asarray(anchor_ids),
                          graph_hash=ghash)


def _check_node(enc: AnchorEncoding, u: int) -> None:
    if not 0 <= u < enc.node_count:
        raise IndexError(f"node {u} out of range [0, {enc.node_count})")


def estimate_raw(enc: AnchorEncoding, u: int, v: int) -> int:
    """Literal minimal combined anchor distance, identity case included.

    Columns where either endpoint is unreachable are skipped rather than
    treated as huge numbers; UNREACHABLE is returned when no anchor sees
    both endpoints.
    """
    _check_node(enc, u)
    _check_node(enc, v)
    du = enc.matrix[u].astype(np.int64)
    dv = enc.matrix[v].astype(np.int64)
    ok = (enc.matrix[u] != np.uint32(UNREACHABLE)) & \
         (enc.matrix[v] != np.uint32(UNREACHABLE))
    if not ok.any():
        return UNREACHABLE
    return int(np.min(du[ok] + dv[ok]))


def estimate_distance(enc: AnchorEncoding, u: int, v: int) -> int:
    """Estimated hop distance; 0 on u == v (the raw formula gives
    2 * min_k d_u[k] there, exposed via estimate_raw)."""
    _check_node(enc, u)
    _check_node(enc, v)
    if u == v:
        return 0
    return estimate_raw(enc, u, v)


def pairwise_estimates(enc: AnchorEncoding, us: np.ndarray,
                       vs: np.ndarray) -> np.ndarray:
    """Vectorized raw estimates for index arrays; +inf marks no shared
    finite anchor. Identity pairs get the raw (non-zeroed) value."""
    m = enc.as_float()
    return np.min(m[us][:, :] + m[vs][:, :], axis=1)


def estimate_matrix(enc: AnchorEncoding, block: int = 256) -> np.ndarray:
    """(N, N) float64 raw estimate matrix, +inf where unreachable."""
    m = enc.as_float()
    n = enc.node_count
    out = np.empty((n, n), dtype=np.float64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        out[start:stop] = np.min(m[start:stop, None, :] + m[None, :, :], axis=2)
    return out


@dataclass
class BoundReport:
    """Outcome of the covered-pair error-bound check."""

    pairs_checked: int
    max_error_covered_pairs: int
    fraction_both_uncovered: float
    bound_2c: int
    violations: list = field(default_factory=list)
    n_nodes: int = 0
    covered_count: int = 0
    both_uncovered_pairs: int = 0      # ordered pairs, repetition allowed
    total_ordered_pairs: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "max_error_covered_pairs": self.max_error_covered_pairs,
            "fraction_both_uncovered": self.fraction_both_uncovered,
            "bound_2c": self.bound_2c,
            "violations": self.violations,
            "n_nodes": self.n_nodes,
            "covered_count": self.covered_count,
            "both_uncovered_pairs": self.both_uncovered_pairs,
            "total_ordered_pairs": self.total_ordered_pairs,
        }


def verify_lemma_bound(g: Graph, enc: AnchorEncoding, anchors: AnchorSet,
                       sample: int | None = None, seed: int = 0) -> BoundReport:
    """Check estimate - truth <= 2c on every pair with a covered endpoint.

    ``sample=None`` checks all unordered pairs; an integer checks that many
    seeded pairs. The both-uncovered mass is always the exact combinatorial
    count over ordered pairs (repetition allowed), which equals
    (1 - achieved_ratio)^2.
    """
    if enc.graph_hash != g.graph_hash:
        raise ValueError(
            f"encoding was built for graph {enc.graph_hash}, got {g.graph_hash}")
    if anchors.graph_hash != g.graph_hash:
        raise ValueError(
            f"anchor set was built for graph {anchors.graph_hash}, "
            f"got {g.graph_hash}")
    n = g.node_count
    c = anchors.config.c

    # coverage recomputed from the encoding itself: covered <=> some anchor
    # within c hops <=> min_k d_v[k] <= c
    col_min = enc.as_float().min(axis=1)
    covered_mask = col_min <= c
    covered_count = int(covered_mask.sum())
    if covered_count != len(anchors.covered):
        raise ValueError("anchor set coverage disagrees with the encoding")

    uncovered = n - covered_count
    both_uncovered = uncovered * uncovered
    fraction = (1.0 - anchors.achieved_ratio) ** 2

    if sample is None:
        iu, iv = np.triu_indices(n, k=1)
    else:
        rng = np.random.default_rng(seed)
        iu = rng.integers(0, n, size=sample)
        iv = rng.integers(0, n, size=sample)
        keep = iu != iv
        iu, iv = iu[keep], iv[keep]

    est = pairwise_estimates(enc, iu, iv)
    truth = np.empty(len(iu), dtype=np.float64)
    dist_cache: dict[int, np.ndarray] = {}
    for k, (u, v) in enumerate(zip(iu, iv)):
        u = int(u)
        if u not in dist_cache:
            d = bfs_distances(g, u).astype(np.float64)
            d[d == float(UNREACHABLE)] = np.inf
            dist_cache[u] = d
        truth[k] = dist_cache[u][int(v)]

    eligible = (covered_mask[iu] | covered_mask[iv]) & np.isfinite(truth)
    errors = est[eligible] - truth[eligible]
    violations = []
    max_err = 0
    if len(errors):
        max_err = int(errors.max())
        bad = np.flatnonzero(errors > 2 * c)
        eu, ev = iu[eligible], iv[eligible]
        for b in bad:
            violations.append({"u": int(eu[b]), "v": int(ev[b]),
                               "estimate": int(est[eligible][b]),
                               "truth": int(truth[eligible][b])})

    return BoundReport(pairs_checked=int(eligible.sum()),
                       max_error_covered_pairs=max_err,
                       fraction_both_uncovered=fraction,
                       bound_2c=2 * c, violations=violations, n_nodes=n,
                       covered_count=covered_count,
                       both_uncovered_pairs=both_uncovered,
                       total_ordered_pairs=n * n)
