"""Regenerate the golden NTPE corpus under golden/.

Everything here is frozen: a fixed created timestamp, handcrafted
matrices, and deliberately corrupted variants. Downstream loaders in
other languages test against these exact bytes, so regenerate only when
the container format itself changes.
"""
import json
import shutil
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from anchortok.synthetic import path_graph
from anchortok.graph import from_edge_array
from anchortok.encoding import encode_all, UNREACHABLE
from anchortok.ntpe import write_ntpe, read_ntpe, sidecar_path

CREATED = "2026-08-22T00:00:00+00:00"
ROOT = Path(__file__).resolve().parents[1] / "golden"


def _expected(path, matrix, meta):
    body = {"matrix": matrix.tolist(), "meta": meta}
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")


def main() -> None:
    if ROOT.exists():
        shutil.rmtree(ROOT)
    (ROOT / "malformed").mkdir(parents=True)
    (ROOT / "expected").mkdir()

    # path-graph encoding, anchors from the greedy trace
    g = path_graph(5)
    enc = encode_all(g, [1, 3])
    p = ROOT / "p5_encoding.ntpe"
    write_ntpe(p, enc.matrix, {"graph_hash": g.graph_hash, "anchors": [1, 3],
                               "c": 1, "cr": 0.9, "strategy": "greedy",
                               "seed": 0, "created": CREATED})
    _expected(ROOT / "expected" / "p5_encoding.json", enc.matrix,
              read_ntpe(p)[1])

    # two components, single anchor: rows off the anchor component hold the
    # unreachable sentinel
    g2 = from_edge_array(np.array([[0, 1], [2, 3]]))
    enc2 = encode_all(g2, [0])
    p2 = ROOT / "disconnected_encoding.ntpe"
    write_ntpe(p2, enc2.matrix, {"graph_hash": g2.graph_hash, "anchors": [0],
                                 "c": 1, "cr": 0.5, "strategy": "greedy",
                                 "seed": 0, "created": CREATED})
    _expected(ROOT / "expected" / "disconnected_encoding.json", enc2.matrix,
              read_ntpe(p2)[1])
    assert enc2.matrix[2, 0] == np.uint32(UNREACHABLE)

    # handcrafted embedding with exactly representable float32 entries
    emb = np.array([[1.5, -0.25, 3.0], [0.125, 2.5, -7.75]], dtype=np.float32)
    p3 = ROOT / "tiny_embedding.ntpe"
    write_ntpe(p3, emb, {"graph_hash": "0123456789abcdef", "anchors": [0, 1],
                         "c": 1, "cr": 0.7, "strategy": "greedy", "seed": 0,
                         "created": CREATED})
    _expected(ROOT / "expected" / "tiny_embedding.json", emb.astype(float),
              read_ntpe(p3)[1])

    # corrupted variants, each tripping one distinct error code
    base = p.read_bytes()
    meta_text = sidecar_path(p).read_text()

    def corrupt(name, data, with_sidecar=True):
        target = ROOT / "malformed" / name
        target.write_bytes(data)
        if with_sidecar:
            sidecar_path(target).write_text(meta_text)

    bad_magic = bytearray(base)
    bad_magic[0:4] = b"XTPE"
    corrupt("bad_magic.ntpe", bytes(bad_magic))

    bad_version = bytearray(base)
    bad_version[4] = 9
    corrupt("bad_version.ntpe", bytes(bad_version))

    bad_kind = bytearray(base)
    bad_kind[5] = 7
    corrupt("bad_kind.ntpe", bytes(bad_kind))

    corrupt("truncated.ntpe", base[:-3])
    corrupt("missing_sidecar.ntpe", base, with_sidecar=False)

    mism = ROOT / "malformed" / "sidecar_mismatch.ntpe"
    mism.write_bytes(base)
    twisted = json.loads(meta_text)
    twisted["cols"] = 9
    sidecar_path(mism).write_text(json.dumps(twisted, indent=2) + "\n")

    print(f"golden corpus written to {ROOT}")


if __name__ == "__main__":
    main()
