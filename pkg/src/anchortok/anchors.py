"""Anchor selection: coverage-greedy plus centrality/random baselines.

The greedy loop repeatedly adds the node whose c-hop neighborhood covers
the most still-uncovered nodes, until the covered fraction reaches the
target ratio. Ties at the argmax break to the lowest node id so runs are
reproducible. Baselines rank nodes by a centrality (or a seeded shuffle)
and take them in order under the same stopping rule.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .graph import Graph, bfs_distances, k_hop_neighborhood, UNREACHABLE

STRATEGIES = ("greedy", "degree", "random", "closeness", "eigenvector",
              "pagerank", "betweenness")


class ConvergenceError(RuntimeError):
    """Power iteration failed to converge; message names the strategy."""


@dataclass
class AnchorConfig:
    c: int = 1
    cr: float = 0.7
    strategy: str = "greedy"
    seed: int = 0
    k_override: int | None = None
    power_iter_max: int = 1000
    power_iter_tol: float = 1e-10

    def validate(self) -> None:
        if self.c < 1:
            raise ValueError("coverage radius c must be >= 1")
        if not 0 < self.cr <= 1:
            raise ValueError("coverage ratio must be in (0, 1]")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.k_override is not None and self.k_override < 1:
            raise ValueError("k_override must be >= 1 when set")


@dataclass
class AnchorSet:
    """Ordered anchors plus the covered-node set they achieve."""

    anchors: list
    covered: np.ndarray          # sorted covered node ids
    achieved_ratio: float
    config: AnchorConfig
    graph_hash: str
    no_progress: bool = False    # defensive break fired / ranking exhausted

    def covered_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        mask[self.covered] = True
        return mask

    def to_json(self) -> str:
        doc = {
            "anchors": [int(a) for a in self.anchors],
            "c": self.config.c,
            "cr_target": self.config.cr,
            "cr_achieved": self.achieved_ratio,
            "strategy": self.config.strategy,
            "seed": self.config.seed,
            "graph_hash": self.graph_hash,
            "no_progress": self.no_progress,
        }
        return json.dumps(doc, indent=2) + "\n"


def anchor_set_from_json(text: str, g: Graph) -> AnchorSet:
    """Rebuild an AnchorSet against ``g``; coverage is recomputed."""
    doc = json.loads(text)
    if doc["graph_hash"] != g.graph_hash:
        raise ValueError(
            f"anchor file was built for graph {doc['graph_hash']}, "
            f"got {g.graph_hash}")
    cfg = AnchorConfig(c=int(doc["c"]), cr=float(doc["cr_target"]),
                       strategy=doc["strategy"], seed=int(doc["seed"]))
    covered, ratio = coverage(g, doc["anchors"], cfg.c)
    return AnchorSet(anchors=[int(a) for a in doc["anchors"]], covered=covered,
                     achieved_ratio=ratio, config=cfg, graph_hash=g.graph_hash,
                     no_progress=bool(doc.get("no_progress", False)))


def neighborhoods(g: Graph, c: int) -> list:
    """c-hop neighborhood of every node (the selection-time cache)."""
    return [k_hop_neighborhood(g, v, c) for v in range(g.node_count)]


def coverage(g: Graph, anchors, c: int):
    """Union of c-hop neighborhoods over ``anchors`` and its ratio."""
    mask = np.zeros(g.node_count, dtype=bool)
    for a in anchors:
        mask[k_hop_neighborhood(g, int(a), c)] = True
    covered = np.flatnonzero(mask)
    return covered, len(covered) / g.node_count


def select(g: Graph, cfg: AnchorConfig) -> AnchorSet:
    """Strategy dispatch: greedy coverage or a ranked baseline."""
    if cfg.strategy == "greedy":
        return select_greedy(g, cfg)
    return select_baseline(g, cfg)


def select_greedy(g: Graph, cfg: AnchorConfig) -> AnchorSet:
    """Coverage-greedy anchor selection.

    Per-candidate gains are cached and updated incrementally: when node u
    becomes covered, every node whose c-hop neighborhood contains u (by
    symmetry, exactly the members of u's own neighborhood) loses one unit
    of potential gain.
    """
    cfg.validate()
    if cfg.strategy != "greedy":
        raise ValueError("select_greedy requires strategy='greedy'")
    n = g.node_count
    if n == 0:
        raise ValueError("cannot select anchors on an empty graph")

    nbhd = neighborhoods(g, cfg.c)
    gain = np.array([len(nb) for nb in nbhd], dtype=np.int64)
    covered = np.zeros(n, dtype=bool)
    is_anchor = np.zeros(n, dtype=bool)
    anchors: list[int] = []
    covered_count = 0
    threshold = cfg.cr * n
    no_progress = False

    while covered_count < threshold:
        cand = np.where(is_anchor, np.int64(-1), gain)
        best = int(np.argmax(cand))   # first max -> lowest id
        if cand[best] <= 0:
            no_progress = True
            break
        anchors.append(best)
        is_anchor[best] = True
        newly = nbhd[best][~covered[nbhd[best]]]
        covered[newly] = True
        covered_count += len(newly)
        if len(newly):
            touched = np.concatenate([nbhd[int(u)] for u in newly])
            np.subtract.at(gain, touched, 1)

    return AnchorSet(anchors=anchors, covered=np.flatnonzero(covered),
                     achieved_ratio=covered_count / n, config=cfg,
                     graph_hash=g.graph_hash, no_progress=no_progress)


def select_baseline(g: Graph, cfg: AnchorConfig) -> AnchorSet:
    """Rank nodes by the configured strategy and take them in order.

    With ``k_override`` the first k ranked nodes are returned; otherwise
    nodes are added until coverage reaches the target ratio, mirroring the
    greedy stopping rule.
    """
    cfg.validate()
    if cfg.strategy == "greedy":
        raise ValueError("select_baseline requires a non-greedy strategy")
    n = g.node_count
    if n == 0:
        raise ValueError("cannot select anchors on an empty graph")

    order = _ranking(g, cfg)
    nbhd = None
    covered = np.zeros(n, dtype=bool)
    anchors: list[int] = []
    no_progress = False

    if cfg.k_override is not None:
        anchors = [int(v) for v in order[:cfg.k_override]]
        for a in anchors:
            covered[k_hop_neighborhood(g, a, cfg.c)] = True
    else:
        threshold = cfg.cr * n
        count = 0
        for v in order:
            if count >= threshold:
                break
            v = int(v)
            anchors.append(v)
            nb = k_hop_neighborhood(g, v, cfg.c)
            newly = nb[~covered[nb]]
            covered[newly] = True
            count += len(newly)
        if count < threshold:
            no_progress = True

    covered_ids = np.flatnonzero(covered)
    return AnchorSet(anchors=anchors, covered=covered_ids,
                     achieved_ratio=len(covered_ids) / n, config=cfg,
                     graph_hash=g.graph_hash, no_progress=no_progress)


def _ranking(g: Graph, cfg: AnchorConfig) -> np.ndarray:
    if cfg.strategy == "random":
        return np.random.default_rng(cfg.seed).permutation(g.node_count)
    scores = {
        "degree": degree_centrality,
        "closeness": closeness_centrality,
        "eigenvector": lambda gg: eigenvector_centrality(
            gg, max_iter=cfg.power_iter_max, tol=cfg.power_iter_tol),
        "pagerank": lambda gg: pagerank_centrality(
            gg, max_iter=cfg.power_iter_max, tol=cfg.power_iter_tol),
        "betweenness": betweenness_centrality,
    }[cfg.strategy](g)
    # descending score, ties by lowest id
    return np.lexsort((np.arange(g.node_count), -scores))


# ---------- centralities (CSR, no external graph library) ----------

def degree_centrality(g: Graph) -> np.ndarray:
    return g.degrees().astype(np.float64)


def closeness_centrality(g: Graph) -> np.ndarray:
    """Closeness with the reachable-part correction for disconnected graphs."""
    n = g.node_count
    scores = np.zeros(n, dtype=np.float64)
    if n <= 1:
        return scores
    for v in range(n):
        dist = bfs_distances(g, v)
        finite = dist != np.uint32(UNREACHABLE)
        r = int(finite.sum())          # includes v itself
        total = int(dist[finite].sum())
        if total > 0:
            scores[v] = (r - 1) ** 2 / (total * (n - 1))
    return scores


def _arc_sources(g: Graph) -> np.ndarray:
    return np.repeat(np.arange(g.node_count), g.degrees())


def eigenvector_centrality(g: Graph, max_iter: int = 1000,
                           tol: float = 1e-10) -> np.ndarray:
    """Power iteration on A + I (the shift keeps bipartite graphs from
    oscillating; the dominant eigenvector is unchanged)."""
    n = g.node_count
    src = _arc_sources(g)
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        y = x + np.bincount(src, weights=x[g.indices], minlength=n)
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < tol:
            return y
        x = y
    raise ConvergenceError(
        f"eigenvector centrality: power iteration did not converge "
        f"in {max_iter} iterations")


def pagerank_centrality(g: Graph, damping: float = 0.85,
                        max_iter: int = 1000, tol: float = 1e-12) -> np.ndarray:
    n = g.node_count
    deg = g.degrees().astype(np.float64)
    src = _arc_sources(g)
    dangling = deg == 0
    p = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        contrib = np.divide(p, deg, out=np.zeros(n), where=~dangling)
        spread = np.bincount(g.indices, weights=contrib[src], minlength=n)
        new = (1 - damping) / n + damping * (spread + p[dangling].sum() / n)
        if np.abs(new - p).sum() < tol:
            return new
        p = new
    raise ConvergenceError(
        f"pagerank centrality: power iteration did not converge "
        f"in {max_iter} iterations")


def betweenness_centrality(g: Graph) -> np.ndarray:
    """Brandes' accumulation over BFS shortest-path DAGs."""
    n = g.node_count
    adj = g.adjacency_lists
    bc = np.zeros(n, dtype=np.float64)
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0.0] * n
        dist = [-1] * n
        sigma[s] = 1.0
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            stack.append(v)
            dv = dist[v]
            sv = sigma[v]
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sv
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(stack):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    return bc / 2.0   # undirected: each pair counted from both endpoints
