/** Shared test utilities: a seeded PRNG, a random filter-expression
 * generator, and an independent evaluator used as the oracle for the
 * randomized filter checks. */
/** Small deterministic PRNG so randomized tests are reproducible. */
export function mulberry32(seed) {
    let a = seed >>> 0;
    return () => {
        a = (a + 0x6d2b79f5) >>> 0;
        let t = a;
        t = Math.imul(t ^ (t >>> 15), t | 1);
        t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}
export function choice(rng, items) {
    return items[Math.floor(rng() * items.length)];
}
/** Builds a random expression over the given fields, drawing literals from
 * per-field pools (which may include values no row carries). */
export function randomExpr(rng, fields, pools, depth) {
    const kinds = depth <= 0
        ? ["eq", "ne", "in"]
        : ["eq", "ne", "in", "and", "and", "or", "or", "not"];
    const kind = choice(rng, kinds);
    if (kind === "and" || kind === "or") {
        return {
            kind,
            left: randomExpr(rng, fields, pools, depth - 1),
            right: randomExpr(rng, fields, pools, depth - 1),
        };
    }
    if (kind === "not") {
        return { kind, operand: randomExpr(rng, fields, pools, depth - 1) };
    }
    const field = choice(rng, fields);
    const pool = pools[field];
    if (kind === "in") {
        const n = 1 + Math.floor(rng() * 3);
        const values = [];
        for (let i = 0; i < n; i += 1) {
            values.push(choice(rng, pool));
        }
        return { kind, field, values };
    }
    return { kind, field, value: choice(rng, pool) };
}
/** Deliberately separate evaluator: a plain recursive row scan used as the
 * brute-force oracle against applyFilter. */
export function independentEval(expr, row) {
    if (expr.kind === "or") {
        return independentEval(expr.left, row) || independentEval(expr.right, row);
    }
    if (expr.kind === "and") {
        return independentEval(expr.left, row) && independentEval(expr.right, row);
    }
    if (expr.kind === "not") {
        return !independentEval(expr.operand, row);
    }
    if (expr.kind === "eq") {
        return row[expr.field] === expr.value;
    }
    if (expr.kind === "ne") {
        return row[expr.field] !== expr.value;
    }
    return expr.values.indexOf(row[expr.field]) !== -1;
}
export function randomRow(rng, fields, pools) {
    const row = {};
    for (const field of fields) {
        row[field] = choice(rng, pools[field]);
    }
    return row;
}
