/**
 * Prompt-sequence assembly demo.
 *
 * A downstream sequence model consumes [graph-positional; textual;
 * question] embeddings as one row-concatenated sequence. This stops at
 * the concatenation: the contract worth pinning here is the assembly
 * order and the shared width, not any model forward pass.
 */
export function matrixOf(rows) {
    const cols = rows.length > 0 ? rows[0].length : 0;
    for (const r of rows) {
        if (r.length !== cols) {
            throw new Error("ragged rows");
        }
    }
    return { rows: rows.length, cols, values: rows.flat() };
}
export function promptPrependDemo(graphEmb, textEmb, questionEmb) {
    const parts = [graphEmb, textEmb, questionEmb];
    const width = graphEmb.cols;
    for (const p of parts) {
        if (p.rows > 0 && p.cols !== width) {
            throw new Error(`embedding width mismatch: expected ${width}, got ${p.cols}`);
        }
    }
    const total = graphEmb.rows + textEmb.rows + questionEmb.rows;
    const out = new Float64Array(total * width);
    let at = 0;
    for (const p of parts) {
        for (let i = 0; i < p.rows * p.cols; i++) {
            out[at++] = p.values[i];
        }
    }
    return { rows: total, cols: width, values: out };
}
