"""Evaluation of encodings and embeddings at desk scale.

Order agreement is the direct success metric of the ranking objective:
the fraction of sampled quadruples whose embedding-distance ordering
matches the estimated-distance ordering. The community probe and the
strategy/sweep tables stand in for downstream task accuracy, which is
out of reach here; report headers say so.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, bfs_distances
from .anchors import AnchorConfig, AnchorSet, STRATEGIES, select
from .encoding import AnchorEncoding, encode_all, pairwise_estimates
from .pretrain import (TrainConfig, EmbeddingMatrix, sample_quadruples,
                       normalize_encoding, train, _Adam)

PROXY_NOTE = ("order_agreement and community_probe are desk-scale proxies "
              "for downstream task accuracy")

STRATEGY_CSV_HEADER = ["strategy", "seed", "anchors", "ratio", "agreement",
                       "mean_err"]
SWEEP_CSV_HEADER = ["c", "cr", "anchors", "agreement", "mean_err"]


def _embedding_values(emb) -> np.ndarray:
    if isinstance(emb, EmbeddingMatrix):
        return emb.values
    return np.asarray(emb, dtype=np.float64)


def order_agreement(emb, enc: AnchorEncoding, sample: int = 4096,
                    seed: int = 0) -> float:
    """Sign-match rate between embedding and estimated distance orderings.

    Quadruples are sampled with tied estimates excluded; an exact tie in
    embedding distance therefore counts against agreement.
    """
    values = _embedding_values(emb)
    if isinstance(emb, EmbeddingMatrix):
        prov_hash = emb.provenance.get("graph_hash")
        if prov_hash is not None and prov_hash != enc.graph_hash:
            raise ValueError(
                f"embedding graph_hash {prov_hash} does not match "
                f"encoding graph_hash {enc.graph_hash}")
    if values.shape[0] != enc.node_count:
        raise ValueError(
            f"embedding rows {values.shape[0]} != encoding rows "
            f"{enc.node_count}")
    batch = sample_quadruples(enc, sample, seed, skip_ties=True)
    duv = np.linalg.norm(values[batch.u] - values[batch.v], axis=1)
    dij = np.linalg.norm(values[batch.i] - values[batch.j], axis=1)
    agree = np.sign(duv - dij) == np.sign(
        batch.d_uv.astype(np.float64) - batch.d_ij)
    return float(agree.mean())


def distance_error_stats(g: Graph, enc: AnchorEncoding, sample: int = 4096,
                         seed: int = 0) -> dict:
    """Estimate minus BFS truth over sampled reachable pairs.

    The histogram maps each integer error to its count; errors are
    nonnegative because the estimate is an upper bound.
    """
    if g.graph_hash != enc.graph_hash:
        raise ValueError("graph does not match encoding provenance")
    rng = np.random.default_rng(seed)
    n = g.node_count
    us = rng.integers(0, n, size=sample)
    vs = rng.integers(0, n, size=sample)
    keep = us != vs
    us, vs = us[keep], vs[keep]
    est = pairwise_estimates(enc, us, vs)

    errors = []
    truth_cache: dict[int, np.ndarray] = {}
    for u, v, e in zip(us, vs, est):
        if not np.isfinite(e):
            continue
        u = int(u)
        if u not in truth_cache:
            truth_cache[u] = bfs_distances(g, u)
        t = int(truth_cache[u][int(v)])
        errors.append(int(e) - t)
    if not errors:
        return {"pairs": 0, "mean": None, "max": None, "histogram": {}}
    arr = np.array(errors)
    hist = {str(k): int(c) for k, c in
            zip(*np.unique(arr, return_counts=True))}
    return {"pairs": len(arr), "mean": float(arr.mean()),
            "max": int(arr.max()), "histogram": hist}


@dataclass
class EvalReport:
    order_agreement: float
    anchor_count: int
    config: dict = field(default_factory=dict)
    distance_error: dict | None = None      # needs the graph
    coverage: dict | None = None            # needs the anchor set
    notes: str = PROXY_NOTE

    def to_dict(self) -> dict:
        return {"notes": self.notes,
                "order_agreement": self.order_agreement,
                "anchor_count": self.anchor_count,
                "distance_error": self.distance_error,
                "coverage": self.coverage,
                "config": self.config}


def evaluate(emb, enc: AnchorEncoding, g: Graph | None = None,
             anchors: AnchorSet | None = None, sample: int = 4096,
             seed: int = 0, config: dict | None = None) -> EvalReport:
    report = EvalReport(
        order_agreement=order_agreement(emb, enc, sample, seed),
        anchor_count=enc.anchor_count,
        config=dict(config or {}))
    if g is not None:
        report.distance_error = distance_error_stats(g, enc, sample, seed)
    if anchors is not None:
        report.coverage = {"achieved_ratio": anchors.achieved_ratio,
                           "covered": len(anchors.covered),
                           "no_progress": anchors.no_progress}
    return report


def _strategy_cell(g: Graph, strategy: str, c: int, cr: float, seed: int,
                   cfg: TrainConfig, sample: int) -> dict:
    aset = select(g, AnchorConfig(c=c, cr=cr, strategy=strategy, seed=seed))
    enc = encode_all(g, aset.anchors)
    run_cfg = TrainConfig(**{**cfg.__dict__, "seed": seed})
    _, emb, _ = train(enc, run_cfg)
    return {"strategy": strategy, "seed": seed,
            "anchors": len(aset.anchors),
            "ratio": aset.achieved_ratio,
            "no_progress": aset.no_progress,
            "agreement": order_agreement(emb, enc, sample, seed),
            "mean_err": distance_error_stats(g, enc, sample, seed)["mean"]}


def strategy_report(g: Graph, strategies=STRATEGIES, c: int = 1,
                    cr: float = 0.7, seeds=(0,), cfg: TrainConfig | None = None,
                    sample: int = 1024, csv_path=None) -> list:
    """One summary row per strategy, averaged over seeds.

    Per-seed rows go to ``csv_path`` when given; the summary is returned.
    """
    cfg = cfg or TrainConfig()
    rows = [_strategy_cell(g, s, c, cr, int(seed), cfg, sample)
            for s in strategies for seed in seeds]
    if csv_path is not None:
        write_rows_csv(csv_path, STRATEGY_CSV_HEADER, rows)
    summary = []
    for s in strategies:
        mine = [r for r in rows if r["strategy"] == s]
        summary.append({
            "strategy": s,
            "seeds": len(mine),
            "anchors": float(np.mean([r["anchors"] for r in mine])),
            "ratio": float(np.mean([r["ratio"] for r in mine])),
            "no_progress": any(r["no_progress"] for r in mine),
            "agreement": float(np.mean([r["agreement"] for r in mine])),
            "mean_err": float(np.mean([r["mean_err"] for r in mine]))})
    return summary


def hyperparameter_sweep(g: Graph, c_values, cr_values,
                         cfg: TrainConfig | None = None, sample: int = 1024,
                         strategy: str = "greedy", csv_path=None) -> list:
    """Anchor count, agreement, and mean error over the (c, CR) grid."""
    if not list(c_values) or not list(cr_values):
        raise ValueError("c and CR grids must be nonempty")
    cfg = cfg or TrainConfig()
    rows = []
    for c in c_values:
        for cr in cr_values:
            aset = select(g, AnchorConfig(c=int(c), cr=float(cr),
                                          strategy=strategy, seed=cfg.seed))
            enc = encode_all(g, aset.anchors)
            _, emb, _ = train(enc, cfg)
            rows.append({
                "c": int(c), "cr": float(cr), "anchors": len(aset.anchors),
                "agreement": order_agreement(emb, enc, sample, cfg.seed),
                "mean_err": distance_error_stats(g, enc, sample,
                                                 cfg.seed)["mean"]})
    if csv_path is not None:
        write_rows_csv(csv_path, SWEEP_CSV_HEADER, rows)
    return rows


def write_rows_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in rows:
            writer.writerow([r[k] for k in header])


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=1, keepdims=True)


def community_probe(emb, labels, seed: int = 0, l2: float = 1e-3,
                    epochs: int = 500, lr: float = 0.1) -> float:
    """Test accuracy of a softmax linear probe on an 80/20 split.

    Shares the optimizer with the embedding trainer; the only randomness
    is the seeded split. A single distinct label short-circuits to 1.0.
    """
    x = _embedding_values(emb)
    labels = np.asarray(labels)
    if len(labels) != x.shape[0]:
        raise ValueError("one label per node required")
    classes, y = np.unique(labels, return_inverse=True)
    if len(classes) == 1:
        return 1.0

    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(y))
    cut = max(1, int(round(0.8 * len(y))))
    tr, te = perm[:cut], perm[cut:]
    if len(te) == 0:
        raise ValueError("graph too small for an 80/20 split")
    missing = set(range(len(classes))) - set(y[tr].tolist())
    if missing:
        raise ValueError(
            f"class {classes[sorted(missing)[0]]} absent from the train "
            f"split with seed {seed}; try a different seed")

    w = np.zeros((x.shape[1], len(classes)))
    b = np.zeros(len(classes))
    onehot = np.eye(len(classes))[y[tr]]
    opt = _Adam([w, b], lr)
    for _ in range(epochs):
        p = _softmax(x[tr] @ w + b)
        diff = (p - onehot) / len(tr)
        gw = x[tr].T @ diff + l2 * w
        gb = diff.sum(axis=0)
        opt.step([w, b], [gw, gb])
    pred = np.argmax(x[te] @ w + b, axis=1)
    return float((pred == y[te]).mean())


def pca_project(emb, dims: int = 2, return_model: bool = False):
    """Project onto the top principal directions of the row covariance.

    Eigenvector signs are fixed so each component's largest-magnitude
    entry is positive; component variances come out non-increasing.
    """
    x = _embedding_values(emb)
    if dims > x.shape[1]:
        raise ValueError(f"dims {dims} exceeds embedding width {x.shape[1]}")
    if dims < 1:
        raise ValueError("dims must be >= 1")
    mean = x.mean(axis=0)
    xc = x - mean
    denom = max(x.shape[0] - 1, 1)
    cov = (xc.T @ xc) / denom
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:dims]
    comps = evecs[:, order]
    flip = np.sign(comps[np.abs(comps).argmax(axis=0), np.arange(dims)])
    flip[flip == 0] = 1.0
    comps = comps * flip
    proj = xc @ comps
    if return_model:
        return proj, comps, evals[order], mean
    return proj
