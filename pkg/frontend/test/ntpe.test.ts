import { describe, it } from "node:test";
import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import {
  HEADER_SIZE,
  KIND_EMBEDDING,
  KIND_ENCODING,
  NtpeError,
  load,
  row,
} from "../src/ntpe.js";

// tests run from the package root; the golden corpus lives beside it
const GOLDEN = path.resolve(process.cwd(), "../golden");

function expected(name: string): { matrix: number[][]; meta: unknown } {
  const p = path.join(GOLDEN, "expected", `${name}.json`);
  return JSON.parse(fs.readFileSync(p, "utf8"));
}

function errorCode(fn: () => unknown): string {
  try {
    fn();
  } catch (err) {
    if (err instanceof NtpeError) return err.code;
    throw err;
  }
  throw new Error("expected an NtpeError");
}

describe("golden parity with the writer", () => {
  for (const name of [
    "p5_encoding",
    "disconnected_encoding",
    "tiny_embedding",
  ]) {
    it(`reads ${name} with zero numeric difference`, () => {
      const m = load(path.join(GOLDEN, `${name}.ntpe`));
      const want = expected(name);
      assert.equal(m.rows, want.matrix.length);
      assert.equal(m.cols, want.matrix[0].length);
      const flat = want.matrix.flat();
      assert.equal(m.values.length, flat.length);
      for (let i = 0; i < flat.length; i++) {
        assert.equal(m.values[i], flat[i]);
      }
      assert.deepEqual(m.meta, want.meta);
    });
  }

  it("maps kinds to the right typed arrays", () => {
    const enc = load(path.join(GOLDEN, "p5_encoding.ntpe"));
    const emb = load(path.join(GOLDEN, "tiny_embedding.ntpe"));
    assert.equal(enc.kind, KIND_ENCODING);
    assert.ok(enc.values instanceof Uint32Array);
    assert.equal(emb.kind, KIND_EMBEDDING);
    assert.ok(emb.values instanceof Float32Array);
  });

  it("keeps the unreachable sentinel intact", () => {
    const m = load(path.join(GOLDEN, "disconnected_encoding.ntpe"));
    assert.deepEqual(row(m, 0), [0]);
    assert.deepEqual(row(m, 2), [0xffffffff]);
  });

  it("exposes rows with matrix semantics", () => {
    const m = load(path.join(GOLDEN, "p5_encoding.ntpe"));
    assert.deepEqual(row(m, 0), [1, 3]);
    assert.deepEqual(row(m, 3), [2, 0]);
    assert.throws(() => row(m, 5), RangeError);
  });
});

describe("malformed fixtures are rejected", () => {
  const cases: Array<[string, string]> = [
    ["bad_magic", "bad-magic"],
    ["bad_version", "bad-version"],
    ["bad_kind", "bad-kind"],
    ["truncated", "truncated"],
    ["missing_sidecar", "sidecar-missing"],
    ["sidecar_mismatch", "sidecar-mismatch"],
  ];
  for (const [name, code] of cases) {
    it(`${name} -> ${code}`, () => {
      const p = path.join(GOLDEN, "malformed", `${name}.ntpe`);
      assert.equal(errorCode(() => load(p)), code);
    });
  }

  it("names both values on a sidecar mismatch", () => {
    const p = path.join(GOLDEN, "malformed", "sidecar_mismatch.ntpe");
    assert.throws(() => load(p), /cols 9 .* header 2/);
  });

  it("names expected and actual sizes on truncation", () => {
    const p = path.join(GOLDEN, "malformed", "truncated.ntpe");
    assert.throws(() => load(p), /expected 64 bytes, actual 61/);
  });

  it("tolerates a missing sidecar only when asked to", () => {
    const p = path.join(GOLDEN, "malformed", "missing_sidecar.ntpe");
    const m = load(p, false);
    assert.equal(m.meta, null);
    assert.equal(m.rows, 5);
    assert.deepEqual(row(m, 0), [1, 3]);
  });

  it("rejects a file shorter than the header", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "ntpe-"));
    const tmp = path.join(dir, "short.ntpe");
    fs.writeFileSync(tmp, Buffer.from("NTPE\x01"));
    try {
      assert.equal(
        errorCode(() => load(tmp, false)),
        "truncated",
      );
    } finally {
      fs.rmSync(dir, { recursive: true, force: true });
    }
  });
});

describe("header geometry", () => {
  it("pins the header size the writer uses", () => {
    assert.equal(HEADER_SIZE, 24);
    const raw = fs.readFileSync(path.join(GOLDEN, "p5_encoding.ntpe"));
    assert.equal(raw.length, HEADER_SIZE + 5 * 2 * 4);
  });
});
