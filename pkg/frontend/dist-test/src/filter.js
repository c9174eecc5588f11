/**
 * Boolean filter expressions over asset rows.
 *
 * Grammar:
 *   expr := or
 *   or   := and ( "||" and )*
 *   and  := not ( "&&" not )*
 *   not  := "!" not | "(" expr ")" | pred
 *   pred := field ("==" | "!=") string
 *         | field "in" "[" string ("," string)* "]"
 *
 * Strings are double-quoted with backslash escapes for `\"` and `\\`.
 * Precedence NOT > AND > OR, both binary operators left-associative.
 * Field names are restricted to the filterable columns listed in
 * ALLOWED_FIELDS; anything else is rejected at parse time.
 */
/** Columns a filter may reference: the seven EDA features, the owner
 * label, the five per-model prediction columns, and the actual label. */
export const ALLOWED_FIELDS = [
    "class_name",
    "agent_installed",
    "location",
    "fqdn_top",
    "os_parent",
    "oui",
    "cidr8",
    "owner",
    "adaboost",
    "logistic",
    "naive_bayes",
    "cart",
    "random_forest",
    "actual",
];
const ALLOWED = new Set(ALLOWED_FIELDS);
export class FilterError extends Error {
    constructor(message, tokenIndex = 0, pos = -1) {
        super(message);
        this.name = "FilterError";
        this.tokenIndex = tokenIndex;
        this.pos = pos;
    }
}
const IDENT_START = /[A-Za-z_]/;
const IDENT_PART = /[A-Za-z0-9_]/;
function tokenize(text) {
    const tokens = [];
    let i = 0;
    const fail = (message, pos) => {
        throw new FilterError(`${message} (column ${pos + 1})`, tokens.length + 1, pos);
    };
    while (i < text.length) {
        const c = text[i];
        if (c === " " || c === "\t" || c === "\n" || c === "\r") {
            i += 1;
            continue;
        }
        if (c === "(" || c === ")" || c === "[" || c === "]" || c === ",") {
            tokens.push({ type: c, value: c, pos: i });
            i += 1;
            continue;
        }
        if (c === "&" || c === "|") {
            const op = c + c;
            if (text.slice(i, i + 2) !== op) {
                fail(`unexpected character "${c}", expected "${op}"`, i);
            }
            tokens.push({ type: op, value: op, pos: i });
            i += 2;
            continue;
        }
        if (c === "!") {
            if (text[i + 1] === "=") {
                tokens.push({ type: "!=", value: "!=", pos: i });
                i += 2;
            }
            else {
                tokens.push({ type: "!", value: "!", pos: i });
                i += 1;
            }
            continue;
        }
        if (c === "=") {
            if (text[i + 1] !== "=") {
                fail('unexpected character "=", expected "=="', i);
            }
            tokens.push({ type: "==", value: "==", pos: i });
            i += 2;
            continue;
        }
        if (c === '"') {
            const start = i;
            i += 1;
            let value = "";
            for (;;) {
                if (i >= text.length) {
                    fail("unterminated string", start);
                }
                const ch = text[i];
                if (ch === '"') {
                    i += 1;
                    break;
                }
                if (ch === "\\") {
                    const esc = text[i + 1];
                    if (esc === '"' || esc === "\\") {
                        value += esc;
                        i += 2;
                    }
                    else {
                        fail(`unsupported escape "\\${esc ?? ""}"`, i);
                    }
                }
                else {
                    value += ch;
                    i += 1;
                }
            }
            tokens.push({ type: "string", value, pos: start });
            continue;
        }
        if (IDENT_START.test(c)) {
            const start = i;
            while (i < text.length && IDENT_PART.test(text[i])) {
                i += 1;
            }
            const word = text.slice(start, i);
            if (word === "in") {
                tokens.push({ type: "in", value: word, pos: start });
            }
            else {
                tokens.push({ type: "ident", value: word, pos: start });
            }
            continue;
        }
        fail(`unexpected character "${c}"`, i);
    }
    tokens.push({ type: "end", value: "", pos: text.length });
    return tokens;
}
function describe(token) {
    if (token.type === "end") {
        return "end of input";
    }
    if (token.type === "string") {
        return "a quoted string";
    }
    return `"${token.value}"`;
}
class Parser {
    constructor(tokens) {
        this.i = 0;
        this.tokens = tokens;
    }
    peek() {
        return this.tokens[this.i];
    }
    next() {
        const token = this.tokens[this.i];
        this.i += 1;
        return token;
    }
    error(expected) {
        const token = this.peek();
        throw new FilterError(`syntax error at token ${this.i + 1} (column ${token.pos + 1}): ` +
            `expected ${expected}, found ${describe(token)}`, this.i + 1, token.pos);
    }
    expect(type, expected) {
        if (this.peek().type !== type) {
            this.error(expected);
        }
        return this.next();
    }
    parse() {
        if (this.peek().type === "end") {
            this.error("a filter expression");
        }
        const expr = this.parseOr();
        if (this.peek().type !== "end") {
            this.error('"&&", "||", or end of input');
        }
        return expr;
    }
    parseOr() {
        let left = this.parseAnd();
        while (this.peek().type === "||") {
            this.next();
            const right = this.parseAnd();
            left = { kind: "or", left, right };
        }
        return left;
    }
    parseAnd() {
        let left = this.parseNot();
        while (this.peek().type === "&&") {
            this.next();
            const right = this.parseNot();
            left = { kind: "and", left, right };
        }
        return left;
    }
    parseNot() {
        const token = this.peek();
        if (token.type === "!") {
            this.next();
            return { kind: "not", operand: this.parseNot() };
        }
        if (token.type === "(") {
            this.next();
            const expr = this.parseOr();
            this.expect(")", '")"');
            return expr;
        }
        return this.parsePred();
    }
    parsePred() {
        const token = this.peek();
        if (token.type !== "ident") {
            this.error("a field name");
        }
        const field = token.value;
        if (!ALLOWED.has(field)) {
            throw new FilterError(`unknown field "${field}" at token ${this.i + 1} (column ` +
                `${token.pos + 1}): allowed fields are ${ALLOWED_FIELDS.join(", ")}`, this.i + 1, token.pos);
        }
        this.next();
        const op = this.peek();
        if (op.type === "==" || op.type === "!=") {
            this.next();
            const literal = this.expect("string", "a quoted string");
            return {
                kind: op.type === "==" ? "eq" : "ne",
                field,
                value: literal.value,
            };
        }
        if (op.type === "in") {
            this.next();
            this.expect("[", '"["');
            const values = [this.expect("string", "a quoted string").value];
            while (this.peek().type === ",") {
                this.next();
                values.push(this.expect("string", "a quoted string").value);
            }
            this.expect("]", '"]" or ","');
            return { kind: "in", field, values };
        }
        this.error('"==", "!=", or "in"');
    }
}
/** Parses filter text into an expression tree. Throws FilterError with the
 * offending token ordinal, column, and an expected-token hint. */
export function parseFilter(text) {
    return new Parser(tokenize(text)).parse();
}
/** Evaluates an expression against one row of string-valued fields.
 * Throws FilterError when the expression references a field the row set
 * does not carry (for example a model column in the inventory view). */
export function evalFilter(expr, row) {
    switch (expr.kind) {
        case "or":
            return evalFilter(expr.left, row) || evalFilter(expr.right, row);
        case "and":
            return evalFilter(expr.left, row) && evalFilter(expr.right, row);
        case "not":
            return !evalFilter(expr.operand, row);
        case "eq":
            return fieldValue(expr.field, row) === expr.value;
        case "ne":
            return fieldValue(expr.field, row) !== expr.value;
        case "in":
            return expr.values.includes(fieldValue(expr.field, row));
    }
}
function fieldValue(field, row) {
    const value = row[field];
    if (value === undefined) {
        throw new FilterError(`field "${field}" is not available in this view`);
    }
    return value;
}
/** Returns the rows matching the expression, preserving order. */
export function applyFilter(expr, rows) {
    return rows.filter((row) => evalFilter(expr, row));
}
function precedence(expr) {
    switch (expr.kind) {
        case "or":
            return 1;
        case "and":
            return 2;
        case "not":
            return 3;
        default:
            return 4;
    }
}
export function quoteString(value) {
    return '"' + value.replace(/\\/g, "\\\\").replace(/"/g, '\\"') + '"';
}
function renderChild(child, parent, isRight) {
    const childPrec = precedence(child);
    const text = renderFilter(child);
    if (childPrec < parent || (childPrec === parent && isRight)) {
        return "(" + text + ")";
    }
    return text;
}
/** Renders an expression to filter text that parses back to the same tree. */
export function renderFilter(expr) {
    switch (expr.kind) {
        case "or":
            return (renderChild(expr.left, 1, false) + " || " + renderChild(expr.right, 1, true));
        case "and":
            return (renderChild(expr.left, 2, false) + " && " + renderChild(expr.right, 2, true));
        case "not": {
            const inner = expr.operand;
            if (precedence(inner) < 3) {
                return "!(" + renderFilter(inner) + ")";
            }
            return "!" + renderFilter(inner);
        }
        case "eq":
            return `${expr.field} == ${quoteString(expr.value)}`;
        case "ne":
            return `${expr.field} != ${quoteString(expr.value)}`;
        case "in":
            return `${expr.field} in [${expr.values.map(quoteString).join(", ")}]`;
    }
}
