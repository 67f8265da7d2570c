import { describe, it, mock } from "node:test";
import assert from "node:assert/strict";
import * as path from "node:path";
import { main, summarize } from "../src/cli.js";
const GOLDEN = path.resolve(process.cwd(), "../golden");
function silenced(stream, body) {
    const spy = mock.method(console, stream, () => { });
    try {
        return { result: body(), calls: spy.mock.calls };
    }
    finally {
        spy.mock.restore();
    }
}
describe("ntpe-load summaries", () => {
    it("summarizes an encoding file", () => {
        const s = summarize(path.join(GOLDEN, "p5_encoding.ntpe"));
        assert.equal(s.rows, 5);
        assert.equal(s.cols, 2);
        assert.equal(s.kind, "encoding");
        assert.deepEqual(s.anchors, [1, 3]);
        assert.equal(s.min, 0);
        assert.equal(s.max, 3);
        assert.equal(s.unreachable_entries, 0);
    });
    it("counts sentinel entries separately from the finite range", () => {
        const s = summarize(path.join(GOLDEN, "disconnected_encoding.ntpe"));
        assert.equal(s.unreachable_entries, 2);
        assert.equal(s.min, 0);
        assert.equal(s.max, 1);
    });
    it("summarizes an embedding file", () => {
        const s = summarize(path.join(GOLDEN, "tiny_embedding.ntpe"));
        assert.equal(s.kind, "embedding");
        assert.equal(s.min, -7.75);
        assert.equal(s.max, 3);
    });
});
describe("ntpe-load exit codes", () => {
    it("prints the summary and returns 0", () => {
        const { result, calls } = silenced("log", () => main([path.join(GOLDEN, "p5_encoding.ntpe"), "--summary"]));
        assert.equal(result, 0);
        const printed = JSON.parse(calls[0].arguments[0]);
        assert.equal(printed.rows, 5);
    });
    it("returns 1 on a malformed file", () => {
        const { result, calls } = silenced("error", () => main([path.join(GOLDEN, "malformed", "bad_magic.ntpe"), "--summary"]));
        assert.equal(result, 1);
        assert.ok(String(calls[0].arguments[0]).includes("bad-magic"));
    });
    it("returns 2 on usage errors", () => {
        assert.equal(silenced("error", () => main([])).result, 2);
        assert.equal(silenced("error", () => main(["a.ntpe", "b.ntpe"])).result, 2);
        assert.equal(silenced("error", () => main(["a.ntpe", "--bogus"])).result, 2);
    });
});
