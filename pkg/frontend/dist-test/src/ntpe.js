/**
 * NTPE matrix container reader.
 *
 * Layout: 24-byte header (magic "NTPE", version u8, kind u8, two
 * reserved zero bytes, rows u64 LE, cols u64 LE) followed by the
 * row-major little-endian payload. Kind 0 is a uint32 distance
 * encoding, kind 1 a float32 embedding. A JSON sidecar sits next to
 * the file at `<file>.meta.json` and must agree with the header.
 */
import * as fs from "node:fs";
export const MAGIC = "NTPE";
export const VERSION = 1;
export const HEADER_SIZE = 24;
export const KIND_ENCODING = 0;
export const KIND_EMBEDDING = 1;
export class NtpeError extends Error {
    code;
    constructor(code, message) {
        super(message);
        this.code = code;
        this.name = "NtpeError";
    }
}
export function sidecarPath(path) {
    return path + ".meta.json";
}
function readU64(view, offset, what) {
    const big = view.getBigUint64(offset, true);
    if (big > BigInt(Number.MAX_SAFE_INTEGER)) {
        throw new NtpeError("truncated", `${what} ${big} is implausibly large`);
    }
    return Number(big);
}
export function load(path, requireSidecar = true) {
    const buf = fs.readFileSync(path);
    if (buf.length < HEADER_SIZE) {
        throw new NtpeError("truncated", `header needs ${HEADER_SIZE} bytes, file has ${buf.length}`);
    }
    const view = new DataView(buf.buffer, buf.byteOffset, buf.length);
    const magic = buf.toString("latin1", 0, 4);
    if (magic !== MAGIC) {
        throw new NtpeError("bad-magic", `expected "${MAGIC}", got "${magic}"`);
    }
    const version = view.getUint8(4);
    if (version !== VERSION) {
        throw new NtpeError("bad-version", `unsupported version ${version} (reader handles ${VERSION})`);
    }
    const kind = view.getUint8(5);
    if (kind !== KIND_ENCODING && kind !== KIND_EMBEDDING) {
        throw new NtpeError("bad-kind", `unknown kind byte ${kind}`);
    }
    const rows = readU64(view, 8, "rows");
    const cols = readU64(view, 16, "cols");
    const expected = HEADER_SIZE + rows * cols * 4;
    if (buf.length !== expected) {
        throw new NtpeError("truncated", `payload for ${rows}x${cols}: expected ${expected} bytes, ` +
            `actual ${buf.length}`);
    }
    // copy the payload into a fresh, aligned buffer before casting
    const payload = Uint8Array.prototype.slice.call(buf, HEADER_SIZE);
    const values = kind === KIND_ENCODING
        ? new Uint32Array(payload.buffer)
        : new Float32Array(payload.buffer);
    const meta = readSidecar(path, requireSidecar);
    if (meta !== null) {
        checkSidecar(meta, kind, rows, cols);
    }
    return { rows, cols, kind, values, meta };
}
function readSidecar(path, required) {
    const side = sidecarPath(path);
    if (!fs.existsSync(side)) {
        if (required) {
            throw new NtpeError("sidecar-missing", `no sidecar at ${side}`);
        }
        return null;
    }
    return JSON.parse(fs.readFileSync(side, "utf8"));
}
function checkSidecar(meta, kind, rows, cols) {
    const pairs = [
        ["kind", meta.kind, kind],
        ["rows", meta.rows, rows],
        ["cols", meta.cols, cols],
    ];
    for (const [field, sidecar, header] of pairs) {
        if (sidecar !== header) {
            throw new NtpeError("sidecar-mismatch", `sidecar ${field} ${sidecar} disagrees with header ${header}`);
        }
    }
}
/** Row i as a plain array, for callers that want matrix semantics. */
export function row(m, i) {
    if (i < 0 || i >= m.rows) {
        throw new RangeError(`row ${i} out of range for ${m.rows} rows`);
    }
    return Array.from(m.values.subarray(i * m.cols, (i + 1) * m.cols));
}
