import test from "node:test";
import assert from "node:assert/strict";
import { ALLOWED_FIELDS, applyFilter, evalFilter, FilterError, parseFilter, renderFilter, } from "../src/filter.js";
import { independentEval, mulberry32, randomExpr, randomRow } from "./helpers.js";
function eq(field, value) {
    return { kind: "eq", field, value };
}
test("single predicate parses to one eq node", () => {
    assert.deepStrictEqual(parseFilter('location == "AMER"'), eq("location", "AMER"));
});
test("ne and in predicates parse", () => {
    assert.deepStrictEqual(parseFilter('oui != "Cisco"'), {
        kind: "ne",
        field: "oui",
        value: "Cisco",
    });
    assert.deepStrictEqual(parseFilter('location in ["AMER", "EMEA"]'), {
        kind: "in",
        field: "location",
        values: ["AMER", "EMEA"],
    });
    assert.deepStrictEqual(parseFilter('location in ["AMER"]'), {
        kind: "in",
        field: "location",
        values: ["AMER"],
    });
});
test("parenthesized OR under AND keeps its grouping", () => {
    const expr = parseFilter('location == "AMER" && (os_parent == "linux" || agent_installed == "no")');
    assert.deepStrictEqual(expr, {
        kind: "and",
        left: eq("location", "AMER"),
        right: {
            kind: "or",
            left: eq("os_parent", "linux"),
            right: eq("agent_installed", "no"),
        },
    });
});
test("AND binds tighter than OR without parentheses", () => {
    const expr = parseFilter('location == "AMER" || os_parent == "linux" && agent_installed == "no"');
    assert.deepStrictEqual(expr, {
        kind: "or",
        left: eq("location", "AMER"),
        right: {
            kind: "and",
            left: eq("os_parent", "linux"),
            right: eq("agent_installed", "no"),
        },
    });
});
test("binary operators are left-associative", () => {
    const and3 = parseFilter('location == "A" && oui == "B" && cidr8 == "C"');
    assert.deepStrictEqual(and3, {
        kind: "and",
        left: { kind: "and", left: eq("location", "A"), right: eq("oui", "B") },
        right: eq("cidr8", "C"),
    });
    const or3 = parseFilter('location == "A" || oui == "B" || cidr8 == "C"');
    assert.deepStrictEqual(or3, {
        kind: "or",
        left: { kind: "or", left: eq("location", "A"), right: eq("oui", "B") },
        right: eq("cidr8", "C"),
    });
});
test("NOT parses prefix and nests", () => {
    const negated = { kind: "not", operand: eq("location", "AMER") };
    assert.deepStrictEqual(parseFilter('!(location == "AMER")'), negated);
    assert.deepStrictEqual(parseFilter('!location == "AMER"'), negated);
    assert.deepStrictEqual(parseFilter('!!location == "AMER"'), {
        kind: "not",
        operand: negated,
    });
});
test("string escapes decode inside literals", () => {
    assert.deepStrictEqual(parseFilter('fqdn_top == "a\\"b"'), eq("fqdn_top", 'a"b'));
    assert.deepStrictEqual(parseFilter('fqdn_top == "a\\\\b"'), eq("fqdn_top", "a\\b"));
});
function expectError(text, tokenIndex, pattern) {
    try {
        parseFilter(text);
    }
    catch (err) {
        assert.ok(err instanceof FilterError, `expected FilterError for ${text}`);
        assert.equal(err.tokenIndex, tokenIndex, `token index for ${text}`);
        assert.match(err.message, pattern);
        return;
    }
    assert.fail(`expected ${text} to fail to parse`);
}
test("incomplete predicate reports token 3 with an expected-token hint", () => {
    expectError('location ==', 3, /token 3/);
    expectError('location ==', 3, /expected a quoted string/);
    expectError('location ==', 3, /end of input/);
});
test("syntax errors carry position and expected-token hints", () => {
    expectError("location", 2, /expected "==", "!=", or "in"/);
    expectError("", 1, /expected a filter expression/);
    expectError('location == "A" ||', 5, /expected a field name/);
    expectError('location == "A") ', 4, /expected "&&", "\|\|", or end of input/);
    expectError('location in []', 4, /expected a quoted string/);
    expectError('location in ["A" "B"]', 5, /expected "\]" or ","/);
    expectError('(location == "A"', 5, /expected "\)"/);
});
test("lexical errors report column positions", () => {
    expectError('location == "AME', 3, /unterminated string \(column 13\)/);
    expectError('location == "a\\qb"', 3, /unsupported escape/);
    expectError('location == "A" & oui == "B"', 4, /expected "&&"/);
    expectError('location = "A"', 2, /expected "=="/);
    expectError('location == @', 3, /unexpected character "@"/);
});
test("unknown fields are rejected at parse time", () => {
    expectError('bogus == "x"', 1, /unknown field "bogus"/);
    expectError('location == "A" && os == "x"', 5, /unknown field "os"/);
    assert.match((() => {
        try {
            parseFilter('bogus == "x"');
            return "";
        }
        catch (err) {
            return err.message;
        }
    })(), /allowed fields are class_name, agent_installed/);
});
const ROWS = [
    { location: "AMER", os_parent: "linux", agent_installed: "yes" },
    { location: "APAC", os_parent: "windows", agent_installed: "no" },
    { location: "AMER", os_parent: "bsd", agent_installed: "no" },
];
test("filter keeps exactly the matching rows in order", () => {
    const matched = applyFilter(parseFilter('location == "AMER"'), ROWS);
    assert.deepStrictEqual(matched, [ROWS[0], ROWS[2]]);
});
test("tautology keeps every row", () => {
    const expr = parseFilter('location == "AMER" || location != "AMER"');
    assert.deepStrictEqual(applyFilter(expr, ROWS), ROWS);
});
test("negation selects the complement", () => {
    const direct = applyFilter(parseFilter('location == "AMER"'), ROWS);
    const complement = applyFilter(parseFilter('!(location == "AMER")'), ROWS);
    assert.deepStrictEqual(complement, ROWS.filter((r) => !direct.includes(r)));
});
test("in predicate matches membership", () => {
    const expr = parseFilter('location in ["APAC", "EMEA"]');
    assert.deepStrictEqual(applyFilter(expr, ROWS), [ROWS[1]]);
});
test("allowed field absent from the row set raises a view error", () => {
    const expr = parseFilter('adaboost == "yes"');
    assert.throws(() => evalFilter(expr, ROWS[0]), (err) => err instanceof FilterError && /not available in this view/.test(err.message));
});
test("rendered text parses back to the same tree", () => {
    const samples = [
        'location == "AMER"',
        'oui != "Cisco"',
        'location in ["AMER", "EMEA"]',
        'location == "AMER" && (os_parent == "linux" || agent_installed == "no")',
        '!(location == "AMER" || oui == "Dell Inc")',
        'location == "A" && oui == "B" && cidr8 == "C"',
        'fqdn_top == "a\\"b\\\\c"',
    ];
    for (const text of samples) {
        const expr = parseFilter(text);
        assert.deepStrictEqual(parseFilter(renderFilter(expr)), expr, text);
    }
    const mixed = parseFilter('location == "AMER" && (os_parent == "linux" || agent_installed == "no")');
    assert.equal(renderFilter(mixed), 'location == "AMER" && (os_parent == "linux" || agent_installed == "no")');
});
test("every allowed field parses in a predicate", () => {
    for (const field of ALLOWED_FIELDS) {
        assert.deepStrictEqual(parseFilter(`${field} == "x"`), eq(field, "x"));
    }
});
test("randomized expressions match the brute-force oracle", () => {
    const fields = ["location", "os_parent", "agent_installed", "oui"];
    const pools = {
        location: ["AMER", "APAC", "EMEA", "LATAM", "MOON"],
        os_parent: ["linux", "windows", "bsd", "embedded"],
        agent_installed: ["yes", "no"],
        oui: ["Cisco", "Dell Inc", "VMware, Inc.", "absent vendor"],
    };
    for (let trial = 0; trial < 20; trial += 1) {
        const rng = mulberry32(9000 + trial);
        const expr = randomExpr(rng, fields, pools, 3);
        const roundTripped = parseFilter(renderFilter(expr));
        assert.deepStrictEqual(roundTripped, expr, `trial ${trial} round trip`);
        const rows = [];
        for (let i = 0; i < 60; i += 1) {
            rows.push(randomRow(rng, fields, pools));
        }
        const got = applyFilter(expr, rows).map((row) => rows.indexOf(row));
        const want = [];
        rows.forEach((row, i) => {
            if (independentEval(expr, row)) {
                want.push(i);
            }
        });
        assert.deepStrictEqual(got, want, `trial ${trial} selection`);
    }
});
