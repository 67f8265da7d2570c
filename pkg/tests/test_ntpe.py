import json
import struct

import numpy as np
import pytest

from anchortok.encoding import UNREACHABLE
from anchortok.ntpe import (MAGIC, VERSION, KIND_ENCODING, KIND_EMBEDDING,
                            META_FIELDS, NtpeError, sidecar_path, kind_of,
                            write_ntpe, read_ntpe)


def _read_err(path, **kw):
    with pytest.raises(NtpeError) as exc:
        read_ntpe(path, **kw)
    return exc.value


def test_float32_roundtrip_bit_exact(tmp_path):
    p = tmp_path / "emb.ntpe"
    m = np.array([[0.1, -2.5, 3.0], [1e-30, 7.25, np.pi]], dtype=np.float32)
    write_ntpe(p, m)
    back, meta = read_ntpe(p)
    assert back.dtype == np.float32
    assert np.array_equal(back.view(np.uint32), m.view(np.uint32))
    assert meta["kind"] == KIND_EMBEDDING
    assert meta["rows"] == 2 and meta["cols"] == 3


def test_uint32_roundtrip_with_sentinel(tmp_path):
    p = tmp_path / "enc.ntpe"
    m = np.array([[0, 3, UNREACHABLE], [1, UNREACHABLE, 2]], dtype=np.uint32)
    write_ntpe(p, m, {"graph_hash": "abc", "anchors": [0, 4], "c": 1})
    back, meta = read_ntpe(p)
    assert np.array_equal(back, m)
    assert meta["kind"] == KIND_ENCODING
    assert meta["graph_hash"] == "abc"
    assert meta["anchors"] == [0, 4]


def test_sidecar_has_stable_schema(tmp_path):
    p = tmp_path / "enc.ntpe"
    write_ntpe(p, np.zeros((1, 1), dtype=np.uint32))
    meta = json.loads(sidecar_path(p).read_text())
    assert set(meta) == set(META_FIELDS)
    assert meta["created"] is not None
    assert meta["graph_hash"] is None      # unknown provenance stays null


def test_repeated_cycles_byte_stable(tmp_path):
    a = tmp_path / "a.ntpe"
    b = tmp_path / "b.ntpe"
    m = np.arange(12, dtype=np.float32).reshape(3, 4) / 7
    write_ntpe(a, m, {"created": "2026-01-01T00:00:00+00:00"})
    back, meta = read_ntpe(a)
    write_ntpe(b, back, meta)
    assert a.read_bytes() == b.read_bytes()
    assert sidecar_path(a).read_text() == sidecar_path(b).read_text()


def test_golden_bytes_layout(tmp_path):
    p = tmp_path / "tiny.ntpe"
    write_ntpe(p, np.array([[7, 9]], dtype=np.uint32))
    expect = struct.pack("<4sBB2sQQ", MAGIC, VERSION, KIND_ENCODING,
                         b"\x00\x00", 1, 2)
    expect += struct.pack("<II", 7, 9)
    assert p.read_bytes() == expect


def test_one_dim_input_promoted(tmp_path):
    p = tmp_path / "row.ntpe"
    write_ntpe(p, np.array([1.5, 2.5], dtype=np.float32))
    back, meta = read_ntpe(p)
    assert back.shape == (1, 2)


def test_write_rejects_unknown_dtype(tmp_path):
    with pytest.raises(ValueError):
        write_ntpe(tmp_path / "x.ntpe", np.zeros((2, 2), dtype=np.float64))
    assert kind_of(np.zeros(1, dtype=np.uint32)) == KIND_ENCODING
    assert kind_of(np.zeros(1, dtype=np.float32)) == KIND_EMBEDDING


def test_write_rejects_kind_mismatch(tmp_path):
    with pytest.raises(ValueError, match="kind"):
        write_ntpe(tmp_path / "x.ntpe", np.zeros((1, 1), dtype=np.uint32),
                   {"kind": KIND_EMBEDDING})


def test_bad_magic(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((1, 1), dtype=np.uint32))
    raw = bytearray(p.read_bytes())
    raw[0:4] = b"XTPE"
    p.write_bytes(bytes(raw))
    assert _read_err(p).code == "bad-magic"


def test_bad_version(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((1, 1), dtype=np.uint32))
    raw = bytearray(p.read_bytes())
    raw[4] = 9
    p.write_bytes(bytes(raw))
    err = _read_err(p)
    assert err.code == "bad-version"
    assert "9" in str(err)


def test_bad_kind_byte(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((1, 1), dtype=np.uint32))
    raw = bytearray(p.read_bytes())
    raw[5] = 7
    p.write_bytes(bytes(raw))
    assert _read_err(p).code == "bad-kind"


def test_truncated_header(tmp_path):
    p = tmp_path / "x.ntpe"
    p.write_bytes(b"NTPE\x01")
    assert _read_err(p, require_sidecar=False).code == "truncated"


def test_truncated_payload_names_sizes(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((2, 3), dtype=np.uint32))
    raw = p.read_bytes()
    p.write_bytes(raw[:-1])
    err = _read_err(p)
    assert err.code == "truncated"
    assert "24" in str(err) and "23" in str(err)


def test_sidecar_mismatch_names_both_values(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((2, 3), dtype=np.uint32))
    meta = json.loads(sidecar_path(p).read_text())
    meta["rows"] = 5
    sidecar_path(p).write_text(json.dumps(meta))
    err = _read_err(p)
    assert err.code == "sidecar-mismatch"
    assert "5" in str(err) and "2" in str(err)


def test_sidecar_missing(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((1, 2), dtype=np.float32))
    sidecar_path(p).unlink()
    assert _read_err(p).code == "sidecar-missing"
    back, meta = read_ntpe(p, require_sidecar=False)
    assert meta is None
    assert back.shape == (1, 2)


def test_optional_sidecar_still_validated_when_present(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((1, 2), dtype=np.float32))
    meta = json.loads(sidecar_path(p).read_text())
    meta["kind"] = KIND_ENCODING
    sidecar_path(p).write_text(json.dumps(meta))
    assert _read_err(p, require_sidecar=False).code == "sidecar-mismatch"


def test_returned_matrix_is_a_copy(tmp_path):
    p = tmp_path / "x.ntpe"
    write_ntpe(p, np.zeros((2, 2), dtype=np.uint32))
    back, _ = read_ntpe(p)
    back[0, 0] = 99          # must not blow up on a read-only buffer view
    again, _ = read_ntpe(p)
    assert again[0, 0] == 0
