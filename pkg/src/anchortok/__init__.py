"""Anchor-based node position toolkit.

Pick anchor nodes by greedy coverage, encode every node as its vector
of hop distances to the anchors, train a small MLP into a Euclidean
embedding that preserves distance orderings, and ship matrices through
the NTPE container.
"""

__version__ = "0.1.0"

from .graph import (Graph, GraphParseError, UNREACHABLE, load_edge_list,
                    from_edge_array, bfs_distances, k_hop_neighborhood,
                    all_pairs_distances)
from .anchors import (AnchorConfig, AnchorSet, ConvergenceError, STRATEGIES,
                      select, select_greedy, select_baseline, coverage,
                      anchor_set_from_json)
from .encoding import (AnchorEncoding, BoundReport, encode_all,
                       estimate_distance, estimate_raw, estimate_matrix,
                       verify_lemma_bound)
from .pretrain import (TrainConfig, MlpParams, QuadrupleBatch,
                       EmbeddingMatrix, normalize_encoding, forward,
                       quadruple_loss, sample_quadruples, train, grad_check)
from .harness import (EvalReport, order_agreement, distance_error_stats,
                      evaluate, strategy_report, hyperparameter_sweep,
                      community_probe, pca_project)
from .ntpe import NtpeError, read_ntpe, write_ntpe
from .cli import cli_dispatch
