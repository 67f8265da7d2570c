"""Pins the checked-in golden corpus to what the library produces today.

Downstream loaders in other languages consume the same files, so a
failure here means the container format drifted.
"""
import json
from pathlib import Path

import numpy as np
import pytest

from anchortok.synthetic import path_graph
from anchortok.encoding import encode_all
from anchortok.ntpe import NtpeError, read_ntpe, write_ntpe

GOLDEN = Path(__file__).resolve().parents[1] / "golden"

_CASES = ["p5_encoding", "disconnected_encoding", "tiny_embedding"]


@pytest.mark.parametrize("name", _CASES)
def test_golden_matches_expected(name):
    matrix, meta = read_ntpe(GOLDEN / f"{name}.ntpe")
    expect = json.loads((GOLDEN / "expected" / f"{name}.json").read_text())
    assert matrix.tolist() == expect["matrix"]
    assert meta == expect["meta"]


def test_golden_bytes_reproducible(tmp_path):
    g = path_graph(5)
    enc = encode_all(g, [1, 3])
    _, meta = read_ntpe(GOLDEN / "p5_encoding.ntpe")
    fresh = tmp_path / "fresh.ntpe"
    write_ntpe(fresh, enc.matrix, meta)
    assert fresh.read_bytes() == (GOLDEN / "p5_encoding.ntpe").read_bytes()


def test_golden_disconnected_sentinel():
    matrix, _ = read_ntpe(GOLDEN / "disconnected_encoding.ntpe")
    assert matrix[2, 0] == np.uint32(0xFFFFFFFF)
    assert matrix[0, 0] == 0


@pytest.mark.parametrize("name,code", [
    ("bad_magic", "bad-magic"),
    ("bad_version", "bad-version"),
    ("bad_kind", "bad-kind"),
    ("truncated", "truncated"),
    ("missing_sidecar", "sidecar-missing"),
    ("sidecar_mismatch", "sidecar-mismatch"),
])
def test_golden_malformed_rejected(name, code):
    with pytest.raises(NtpeError) as exc:
        read_ntpe(GOLDEN / "malformed" / f"{name}.ntpe")
    assert exc.value.code == code
