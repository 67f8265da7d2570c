"""Rank-preserving Euclidean embedding of anchor-distance encodings.

A small MLP maps each node's (normalized) anchor-distance vector to an
embedding. Training draws quadruples of nodes (u, v, i, j), labels each
by whether the estimated distance of the first pair exceeds that of the
second, and minimizes binary cross-entropy on the logistic of the
embedding-distance difference. Forward, backward, and the optimizer are
implemented here in numpy; no autograd framework is involved.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .graph import fnv1a64
from .encoding import AnchorEncoding, pairwise_estimates

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class TrainConfig:
    dim: int = 64                      # embedding dimension
    hidden: int = 256
    lr: float = 1e-3
    epochs: int = 100
    quadruples_per_epoch: int = 4096
    batch_size: int = 256
    seed: int = 0
    skip_ties: bool = False
    eps_norm: float = 1e-12
    layers: int = 3                    # affine maps; hidden count is layers-1

    def validate(self) -> None:
        if self.dim < 2:
            raise ValueError("embedding dim must be >= 2")
        for name in ("hidden", "lr", "epochs", "quadruples_per_epoch",
                     "batch_size", "eps_norm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")


@dataclass
class MlpParams:
    """Affine layer stack; rectifier between layers, identity on output."""

    weights: list
    biases: list

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights],
                         [b.copy() for b in self.biases])

    def arrays(self) -> list:
        return list(self.weights) + list(self.biases)


def init_params(in_dim: int, cfg: TrainConfig, rng: np.random.Generator) -> MlpParams:
    """Uniform init scaled by 1/sqrt(fan_in), layer by layer."""
    dims = [in_dim] + [cfg.hidden] * (cfg.layers - 1) + [cfg.dim]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpParams(weights, biases)


def normalize_encoding(enc: AnchorEncoding) -> np.ndarray:
    """Map hop count d to 1/(1+d); UNREACHABLE goes to the limit 0."""
    feats = 1.0 / (1.0 + enc.matrix.astype(np.float64))
    feats[~np.isfinite(enc.as_float())] = 0.0
    return feats


def forward(params: MlpParams, features: np.ndarray) -> np.ndarray:
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if features.shape[1] != params.in_dim:
        raise ValueError(
            f"feature width {features.shape[1]} does not match "
            f"input width {params.in_dim}")
    out, _ = _forward_cached(params, features)
    return out


def _forward_cached(params: MlpParams, x: np.ndarray):
    cache = []
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = x @ w + b
        cache.append((x, z))
        x = np.maximum(z, 0.0) if i < last else z
    return x, cache


def _backward(params: MlpParams, cache, d_out):
    """Gradients of the cached forward pass w.r.t. every weight and bias."""
    gw = [None] * len(params.weights)
    gb = [None] * len(params.biases)
    last = len(params.weights) - 1
    grad = d_out
    for i in range(last, -1, -1):
        x_in, z = cache[i]
        if i < last:
            grad = grad * (z > 0.0)
        gw[i] = x_in.T @ grad
        gb[i] = grad.sum(axis=0)
        grad = grad @ params.weights[i].T
    return gw, gb


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _bce_logits(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # -[y ln sigma(x) + (1-y) ln(1-sigma(x))], evaluated stably
    return np.maximum(x, 0.0) - x * y + np.log1p(np.exp(-np.abs(x)))


def quadruple_loss(e_u, e_v, e_i, e_j, y: float, eps_norm: float = 1e-12):
    """Loss and gradients for a single quadruple of embedding vectors.

    The logit is the difference of the two epsilon-stabilized pair norms;
    gradients are returned for each of the four vectors.
    """
    vecs = [np.asarray(e, dtype=np.float64) for e in (e_u, e_v, e_i, e_j)]
    for e in vecs:
        if not np.all(np.isfinite(e)):
            raise ValueError("non-finite embedding input")
    e_u, e_v, e_i, e_j = vecs
    duv_vec = e_u - e_v
    dij_vec = e_i - e_j
    duv = np.sqrt(duv_vec @ duv_vec + eps_norm)
    dij = np.sqrt(dij_vec @ dij_vec + eps_norm)
    x = duv - dij
    loss = float(_bce_logits(np.array([x]), np.array([float(y)]))[0])
    dx = float(_sigmoid(np.array([x]))[0]) - float(y)
    g_u = dx * duv_vec / duv
    g_i = -dx * dij_vec / dij
    return loss, (g_u, -g_u, g_i, -g_i)


@dataclass
class QuadrupleBatch:
    """Node index quadruples with their ranking labels and target estimates."""

    u: np.ndarray
    v: np.ndarray
    i: np.ndarray
    j: np.ndarray
    y: np.ndarray        # float64 0/1, 1 iff d(u,v) > d(i,j)
    d_uv: np.ndarray     # int64 estimated distances
    d_ij: np.ndarray

    def __len__(self) -> int:
        return len(self.u)

    def slice(self, lo: int, hi: int) -> "QuadrupleBatch":
        return QuadrupleBatch(self.u[lo:hi], self.v[lo:hi], self.i[lo:hi],
                              self.j[lo:hi], self.y[lo:hi], self.d_uv[lo:hi],
                              self.d_ij[lo:hi])

    def permuted(self, perm: np.ndarray) -> "QuadrupleBatch":
        """Relabel node indices through ``perm`` (labels untouched)."""
        perm = np.asarray(perm)
        return QuadrupleBatch(perm[self.u], perm[self.v], perm[self.i],
                              perm[self.j], self.y, self.d_uv, self.d_ij)


def sample_quadruples(enc: AnchorEncoding, count: int, seed,
                      skip_ties: bool = False) -> QuadrupleBatch:
    """Uniform quadruples with u != v and i != j.

    Draws touching an unreachable pair are rejected and redrawn, as are
    tied-estimate draws when ``skip_ties``. A sustained rejection rate
    above 99% aborts (the graph is too fragmented to rank).
    """
    if enc.node_count < 2:
        raise ValueError("need at least 2 nodes to sample pairs")
    rng = np.random.default_rng(seed)
    cols = [np.empty(0, dtype=np.int64) for _ in range(4)]
    d_uv = np.empty(0, dtype=np.int64)
    d_ij = np.empty(0, dtype=np.int64)
    attempts = accepted = 0
    while len(cols[0]) < count:
        need = count - len(cols[0])
        draw = max(256, 2 * need)
        idx = rng.integers(0, enc.node_count, size=(draw, 4))
        est1 = pairwise_estimates(enc, idx[:, 0], idx[:, 1])
        est2 = pairwise_estimates(enc, idx[:, 2], idx[:, 3])
        ok = (idx[:, 0] != idx[:, 1]) & (idx[:, 2] != idx[:, 3]) \
            & np.isfinite(est1) & np.isfinite(est2)
        if skip_ties:
            ok &= est1 != est2
        attempts += draw
        accepted += int(ok.sum())
        keep = np.flatnonzero(ok)[:need]
        for k in range(4):
            cols[k] = np.concatenate([cols[k], idx[keep, k]])
        d_uv = np.concatenate([d_uv, est1[keep].astype(np.int64)])
        d_ij = np.concatenate([d_ij, est2[keep].astype(np.int64)])
        if attempts >= 1024 and accepted < 0.01 * attempts:
            raise RuntimeError(
                f"quadruple sampling rejected {attempts - accepted} of "
                f"{attempts} draws; graph is too fragmented or degenerate")
    y = (d_uv > d_ij).astype(np.float64)
    return QuadrupleBatch(cols[0], cols[1], cols[2], cols[3], y, d_uv, d_ij)


def _batch_loss_and_grads(params: MlpParams, features: np.ndarray,
                          batch: QuadrupleBatch, eps_norm: float):
    """Mean quadruple loss over a batch plus gradients for all params."""
    b = len(batch)
    idx = np.concatenate([batch.u, batch.v, batch.i, batch.j])
    out, cache = _forward_cached(params, features[idx])
    e_u, e_v, e_i, e_j = (out[k * b:(k + 1) * b] for k in range(4))

    duv_vec = e_u - e_v
    dij_vec = e_i - e_j
    duv = np.sqrt((duv_vec ** 2).sum(axis=1) + eps_norm)
    dij = np.sqrt((dij_vec ** 2).sum(axis=1) + eps_norm)
    x = duv - dij
    loss = float(_bce_logits(x, batch.y).mean())

    dx = (_sigmoid(x) - batch.y) / b
    g_u = dx[:, None] * duv_vec / duv[:, None]
    g_i = -dx[:, None] * dij_vec / dij[:, None]
    d_out = np.concatenate([g_u, -g_u, g_i, -g_i])
    gw, gb = _backward(params, cache, d_out)
    return loss, gw, gb


@dataclass
class EmbeddingMatrix:
    """Per-node Euclidean embedding; float64 internally, float32 on export."""

    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def export32(self) -> np.ndarray:
        return self.values.astype(np.float32)


def anchors_hash(anchor_ids) -> str:
    text = ",".join(str(int(a)) for a in anchor_ids)
    return format(fnv1a64(text.encode()), "016x")


class _Adam:
    def __init__(self, arrays, lr):
        self.lr = lr
        self.t = 0
        self.m = [np.zeros_like(a) for a in arrays]
        self.v = [np.zeros_like(a) for a in arrays]

    def step(self, arrays, grads):
        self.t += 1
        bc1 = 1.0 - ADAM_BETA1 ** self.t
        bc2 = 1.0 - ADAM_BETA2 ** self.t
        for a, g, m, v in zip(arrays, grads, self.m, self.v):
            m *= ADAM_BETA1
            m += (1 - ADAM_BETA1) * g
            v *= ADAM_BETA2
            v += (1 - ADAM_BETA2) * g * g
            a -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)


def train(enc: AnchorEncoding, cfg: TrainConfig, batches=None):
    """Minibatch training of the embedding map.

    Returns (params, EmbeddingMatrix, per-epoch mean loss). ``batches``
    may inject one pre-sampled QuadrupleBatch per epoch; by default each
    epoch draws fresh quadruples from a seed stream derived from cfg.seed.
    Fully deterministic for fixed inputs under serial execution.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    features = normalize_encoding(enc)
    params = init_params(enc.anchor_count, cfg, rng)
    opt = _Adam(params.arrays(), cfg.lr)
    history = []

    for epoch in range(cfg.epochs):
        if batches is not None:
            batch = batches[epoch]
        else:
            batch = sample_quadruples(enc, cfg.quadruples_per_epoch,
                                      seed=int(rng.integers(2 ** 62)),
                                      skip_ties=cfg.skip_ties)
        total = 0.0
        for lo in range(0, len(batch), cfg.batch_size):
            sub = batch.slice(lo, lo + cfg.batch_size)
            loss, gw, gb = _batch_loss_and_grads(params, features, sub,
                                                 cfg.eps_norm)
            if not np.isfinite(loss):
                raise FloatingPointError(
                    f"non-finite loss at epoch {epoch}, offset {lo}")
            opt.step(params.arrays(), gw + gb)
            total += loss * len(sub)
        history.append(total / len(batch))

    emb = EmbeddingMatrix(
        values=forward(params, features),
        provenance={"graph_hash": enc.graph_hash,
                    "anchors_hash": anchors_hash(enc.anchor_ids),
                    "anchor_count": enc.anchor_count,
                    "train_config": asdict(cfg)})
    return params, emb, history


def grad_check(params: MlpParams, features: np.ndarray,
               batch: QuadrupleBatch, h: float = 1e-5,
               eps_norm: float = 1e-12) -> float:
    """Backprop vs central finite differences on the mean batch loss.

    Returns the worst per-array scaled infinity-norm discrepancy:
    max |g_bp - g_fd| / max(|g_bp|_inf, |g_fd|_inf, 1e-6).
    The 1e-6 floor keeps near-zero-gradient arrays from being judged
    against finite-difference roundoff (ulp(loss)/2h is about 5e-12).
    """
    _, gw, gb = _batch_loss_and_grads(params, features, batch, eps_norm)
    analytic = gw + gb
    worst = 0.0
    work = params.copy()
    for arr, ga in zip(work.arrays(), analytic):
        gn = np.empty_like(arr)
        flat = arr.reshape(-1)
        gn_flat = gn.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            lp, _, _ = _batch_loss_and_grads(work, features, batch, eps_norm)
            flat[k] = orig - h
            lm, _, _ = _batch_loss_and_grads(work, features, batch, eps_norm)
            flat[k] = orig
            gn_flat[k] = (lp - lm) / (2 * h)
        scale = max(np.abs(ga).max(), np.abs(gn).max(), 1e-6)
        worst = max(worst, float(np.abs(ga - gn).max() / scale))
    return worst
