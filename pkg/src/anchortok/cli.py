"""Command-line front end.

Subcommands: ingest, anchors, encode, pretrain, eval, sweep, verify.
Each overridable option can come from a --config JSON file; explicit
flags win. Exit codes: 0 success, 1 validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import graph as graphlib
from . import anchors as anchorlib
from . import encoding as enclib
from . import harness, ntpe
from .pretrain import TrainConfig, EmbeddingMatrix, normalize_encoding, train


class CliError(Exception):
    """Validation failure; message goes to stderr, exit code is 1."""


TRAIN_DEFAULTS = {"dim": 64, "hidden": 256, "epochs": 100, "lr": 1e-3,
                  "quads": 4096, "batch": 256, "skip_ties": False}

DEFAULTS = {
    "ingest": {"format": "edgelist"},
    "anchors": {"format": "edgelist", "c": 1, "cr": 0.7,
                "strategy": "greedy", "seed": 0},
    "encode": {"format": "edgelist"},
    "pretrain": dict(TRAIN_DEFAULTS, seed=0),
    "eval": {"format": "edgelist", "sample": 4096, "seed": 0},
    "sweep": dict(TRAIN_DEFAULTS, format="edgelist", c="1,2,3",
                  cr="0.5,0.7,0.9", strategy="greedy", seed=0, sample=1024),
    "verify": {"format": "edgelist", "sample": None, "seed": 0},
}


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--quads", type=int, help="quadruples per epoch")
    p.add_argument("--batch", type=int)
    p.add_argument("--skip-ties", dest="skip_ties", action="store_const",
                   const=True)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="anchortok")
    sub = top.add_subparsers(dest="command", required=True)

    def cmd(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--config", help="JSON file of option defaults")
        return p

    p = cmd("ingest", help="validate and canonicalize an edge list")
    p.add_argument("--edges", required=True)
    p.add_argument("--format", choices=["edgelist", "csv"])
    p.add_argument("-o", "--out", help="write the canonical edge list here")

    p = cmd("anchors", help="select an anchor set")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["edgelist", "csv"])
    p.add_argument("--c", type=int)
    p.add_argument("--cr", type=float)
    p.add_argument("--strategy", choices=list(anchorlib.STRATEGIES))
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int, dest="k_override",
                   help="fixed anchor count for baseline strategies")
    p.add_argument("-o", "--out", required=True)

    p = cmd("encode", help="anchor-distance encoding to NTPE")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["edgelist", "csv"])
    p.add_argument("--anchors", required=True)
    p.add_argument("-o", "--out", required=True)

    p = cmd("pretrain", help="train the embedding map")
    p.add_argument("--enc", required=True)
    p.add_argument("--seed", type=int)
    _add_train_flags(p)
    p.add_argument("-o", "--out", required=True)

    p = cmd("eval", help="score an embedding against its encoding")
    p.add_argument("--emb", required=True)
    p.add_argument("--enc", required=True)
    p.add_argument("--graph", help="edge list; enables distance-error stats")
    p.add_argument("--format", choices=["edgelist", "csv"])
    p.add_argument("--anchors", help="anchor JSON; enables coverage stats")
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--figures", help="directory for rendered figures")
    p.add_argument("-o", "--out", required=True)

    p = cmd("sweep", help="grid over coverage radius and ratio")
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["edgelist", "csv"])
    p.add_argument("--c", help="comma-separated radii")
    p.add_argument("--cr", help="comma-separated ratios")
    p.add_argument("--strategy", choices=list(anchorlib.STRATEGIES))
    p.add_argument("--seed", type=int)
    p.add_argument("--sample", type=int)
    _add_train_flags(p)
    p.add_argument("--figures", help="directory for rendered figures")
    p.add_argument("-o", "--out", required=True)

    p = cmd("verify", help="check the coverage error bound")
    p.add_argument("--enc", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--format", choices=["edgelist", "csv"])
    p.add_argument("--anchors", required=True)
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-o", "--out")

    return top


def _merge_options(args: argparse.Namespace) -> dict:
    """Defaults <- config file <- explicit flags."""
    merged = dict(DEFAULTS[args.command])
    if args.config:
        try:
            loaded = json.loads(_read_text(args.config))
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.config}: not valid JSON ({exc})")
        if not isinstance(loaded, dict):
            raise CliError(f"{args.config}: config must be a JSON object")
        for key, value in loaded.items():
            if key not in merged:
                raise CliError(f"{args.config}: unknown option {key!r} "
                               f"for {args.command}")
            merged[key] = value
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None or key not in merged:
            merged[key] = value
    return merged


def _read_text(path) -> str:
    p = Path(path)
    if not p.exists():
        raise CliError(f"input file not found: {path}")
    return p.read_text()


def _load_graph(path, fmt) -> graphlib.Graph:
    return graphlib.load_edge_list(_read_text(path), format=fmt)


def _load_encoding(path) -> enclib.AnchorEncoding:
    matrix, meta = ntpe.read_ntpe(path)
    if meta["anchors"] is None or meta["graph_hash"] is None:
        raise CliError(f"{path}: sidecar lacks anchors/graph_hash provenance")
    if meta["kind"] != ntpe.KIND_ENCODING:
        raise CliError(f"{path}: kind {meta['kind']} is not a distance "
                       f"encoding")
    return enclib.AnchorEncoding(matrix=matrix,
                                 anchor_ids=np.array(meta["anchors"],
                                                     dtype=np.int64),
                                 graph_hash=meta["graph_hash"])


def _train_config(opt: dict) -> TrainConfig:
    return TrainConfig(dim=opt["dim"], hidden=opt["hidden"],
                       epochs=opt["epochs"], lr=opt["lr"],
                       quadruples_per_epoch=opt["quads"],
                       batch_size=opt["batch"], seed=opt["seed"],
                       skip_ties=opt["skip_ties"])


def _int_list(text) -> list:
    return [int(x) for x in str(text).split(",") if x != ""]


def _float_list(text) -> list:
    return [float(x) for x in str(text).split(",") if x != ""]


def _figdir(opt: dict) -> Path | None:
    if not opt.get("figures"):
        return None
    d = Path(opt["figures"])
    d.mkdir(parents=True, exist_ok=True)
    return d


def _run_ingest(opt) -> int:
    g = _load_graph(opt["edges"], opt["format"])
    if opt.get("out"):
        Path(opt["out"]).write_text(g.to_edge_list_text())
    print(json.dumps({"nodes": g.node_count, "edges": g.edge_count,
                      "graph_hash": g.graph_hash,
                      "self_loops_dropped": g.self_loops_dropped,
                      "duplicates_collapsed": g.duplicates_collapsed}))
    return 0


def _run_anchors(opt) -> int:
    g = _load_graph(opt["graph"], opt["format"])
    cfg = anchorlib.AnchorConfig(c=opt["c"], cr=opt["cr"],
                                 strategy=opt["strategy"], seed=opt["seed"],
                                 k_override=opt.get("k_override"))
    aset = anchorlib.select(g, cfg)
    Path(opt["out"]).write_text(aset.to_json())
    print(json.dumps({"anchors": len(aset.anchors),
                      "achieved_ratio": aset.achieved_ratio,
                      "no_progress": aset.no_progress}))
    return 0


def _anchor_meta(aset: anchorlib.AnchorSet) -> dict:
    return {"graph_hash": aset.graph_hash, "anchors": list(aset.anchors),
            "c": aset.config.c, "cr": aset.config.cr,
            "strategy": aset.config.strategy, "seed": aset.config.seed}


def _run_encode(opt) -> int:
    g = _load_graph(opt["graph"], opt["format"])
    aset = anchorlib.anchor_set_from_json(_read_text(opt["anchors"]), g)
    enc = enclib.encode_all(g, aset.anchors)
    ntpe.write_ntpe(opt["out"], enc.matrix, _anchor_meta(aset))
    print(json.dumps({"rows": enc.node_count, "cols": enc.anchor_count,
                      "out": str(opt["out"])}))
    return 0


def _run_pretrain(opt) -> int:
    enc = _load_encoding(opt["enc"])
    cfg = _train_config(opt)
    _, emb, history = train(enc, cfg)
    _, enc_meta = ntpe.read_ntpe(opt["enc"])
    meta = {k: enc_meta.get(k) for k in ("graph_hash", "anchors", "c", "cr",
                                         "strategy")}
    meta.update(seed=cfg.seed, train_config=asdict(cfg))
    ntpe.write_ntpe(opt["out"], emb.export32(), meta)
    print(json.dumps({"epochs": len(history), "first_loss": history[0],
                      "final_loss": history[-1], "out": str(opt["out"])}))
    return 0


def _run_eval(opt) -> int:
    enc = _load_encoding(opt["enc"])
    matrix, meta = ntpe.read_ntpe(opt["emb"])
    if meta["kind"] != ntpe.KIND_EMBEDDING:
        raise CliError(f"{opt['emb']}: kind {meta['kind']} is not an "
                       f"embedding")
    emb = EmbeddingMatrix(values=matrix.astype(np.float64),
                          provenance={"graph_hash": meta["graph_hash"]})
    g = aset = None
    if opt.get("graph"):
        g = _load_graph(opt["graph"], opt["format"])
    if opt.get("anchors"):
        if g is None:
            raise CliError("--anchors requires --graph")
        aset = anchorlib.anchor_set_from_json(_read_text(opt["anchors"]), g)
    report = harness.evaluate(emb, enc, g=g, anchors=aset,
                              sample=opt["sample"], seed=opt["seed"],
                              config={k: v for k, v in opt.items()
                                      if k != "figures"})
    Path(opt["out"]).write_text(json.dumps(report.to_dict(), indent=2) + "\n")

    figdir = _figdir(opt)
    if figdir is not None:
        from . import figures
        made = [figures.embedding_scatter(normalize_encoding(enc), emb.values,
                                          enc.anchor_ids,
                                          figdir / "embedding.png")]
        if report.distance_error and report.distance_error["histogram"]:
            made.append(figures.error_histogram(
                report.distance_error["histogram"], figdir / "error_hist.png"))
        print(json.dumps({"figures": [str(m) for m in made]}))
    print(json.dumps({"order_agreement": report.order_agreement,
                      "out": str(opt["out"])}))
    return 0


def _run_sweep(opt) -> int:
    g = _load_graph(opt["graph"], opt["format"])
    cfg = _train_config(opt)
    rows = harness.hyperparameter_sweep(g, _int_list(opt["c"]),
                                        _float_list(opt["cr"]), cfg,
                                        sample=opt["sample"],
                                        strategy=opt["strategy"],
                                        csv_path=opt["out"])
    figdir = _figdir(opt)
    if figdir is not None:
        from . import figures
        path = figures.sweep_curves(rows, figdir / "sweep.png")
        print(json.dumps({"figures": [str(path)]}))
    print(json.dumps({"cells": len(rows), "out": str(opt["out"])}))
    return 0


def _run_verify(opt) -> int:
    g = _load_graph(opt["graph"], opt["format"])
    enc = _load_encoding(opt["enc"])
    aset = anchorlib.anchor_set_from_json(_read_text(opt["anchors"]), g)
    report = enclib.verify_lemma_bound(g, enc, aset, sample=opt["sample"],
                                       seed=opt["seed"])
    text = json.dumps(report.to_dict(), indent=2)
    if opt.get("out"):
        Path(opt["out"]).write_text(text + "\n")
    print(text)
    if not report.ok:
        print(f"bound violated on {len(report.violations)} pairs",
              file=sys.stderr)
        return 1
    return 0


_RUNNERS = {"ingest": _run_ingest, "anchors": _run_anchors,
            "encode": _run_encode, "pretrain": _run_pretrain,
            "eval": _run_eval, "sweep": _run_sweep, "verify": _run_verify}


def cli_dispatch(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        opt = _merge_options(args)
        return _RUNNERS[args.command](opt)
    except (CliError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))
