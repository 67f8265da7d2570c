"""Deterministic fixture graphs: paths, cycles, stars, ER, planted blocks."""
from __future__ import annotations

import numpy as np

from .graph import Graph, from_edge_array


def path_graph(n: int) -> Graph:
    edges = np.column_stack([np.arange(n - 1), np.arange(1, n)])
    return from_edge_array(edges, node_count=n)


def cycle_graph(n: int) -> Graph:
    edges = np.column_stack([np.arange(n), (np.arange(n) + 1) % n])
    return from_edge_array(edges, node_count=n)


def star_graph(leaves: int) -> Graph:
    """Center node 0 joined to ``leaves`` leaf nodes 1..leaves."""
    edges = np.column_stack([np.zeros(leaves, dtype=np.int64),
                             np.arange(1, leaves + 1)])
    return from_edge_array(edges, node_count=leaves + 1)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with a seeded generator; isolated nodes are kept."""
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    mask = rng.random(len(iu[0])) < p
    edges = np.column_stack([iu[0][mask], iu[1][mask]])
    return from_edge_array(edges, node_count=n)


def sbm_two_block(n: int, p_in: float, p_out: float, seed: int):
    """Planted 2-block graph; returns (Graph, labels) with labels 0/1.

    First half of the nodes is block 0, second half block 1.
    """
    rng = np.random.default_rng(seed)
    half = n // 2
    labels = np.zeros(n, dtype=np.int64)
    labels[half:] = 1
    iu = np.triu_indices(n, k=1)
    same = labels[iu[0]] == labels[iu[1]]
    prob = np.where(same, p_in, p_out)
    mask = rng.random(len(iu[0])) < prob
    edges = np.column_stack([iu[0][mask], iu[1][mask]])
    return from_edge_array(edges, node_count=n), labels
