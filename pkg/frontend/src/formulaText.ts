/** Read-only evaluation of the server's canonical formula text.
 *
 * The service prints preference formulas in one fixed shape: DNF with
 * disjuncts joined by " or ", atoms by " and ", each atom
 * `L.attr op R.attr` or `side.attr op constant` with op one of
 * = != < >, rationals as "7" or "3/2", strings double-quoted with
 * backslash escapes, and the degenerate formulas "true" / "false".
 * This module parses exactly that shape so the UI can decide which row
 * pairs currently hold (to enable staging and draw the edge list).
 * It never transforms formulas; all contraction math stays on the
 * server.
 */

import type { SchemaJson } from "./api.js";

export type Rational = { num: bigint; den: bigint };

export function parseRational(text: string): Rational {
  const m = /^(-?\d+)(?:\/(\d+))?$/.exec(text);
  if (!m || !m[1]) throw new Error(`bad rational ${JSON.stringify(text)}`);
  const den = m[2] === undefined ? 1n : BigInt(m[2]);
  if (den === 0n) throw new Error(`zero denominator in ${JSON.stringify(text)}`);
  return { num: BigInt(m[1]), den };
}

export function compareRational(a: Rational, b: Rational): -1 | 0 | 1 {
  const d = a.num * b.den - b.num * a.den;
  return d < 0n ? -1 : d > 0n ? 1 : 0;
}

export type Side = "L" | "R";

type Term =
  | { kind: "var"; side: Side }
  | { kind: "q"; value: Rational }
  | { kind: "c"; value: string };

export interface AtomText {
  attr: string;
  op: "=" | "!=" | "<" | ">";
  lhs: Term;
  rhs: Term;
}

export type FormulaText =
  | { kind: "bool"; value: boolean }
  | { kind: "dnf"; disjuncts: AtomText[][] };

type Token =
  | { kind: "word"; value: string }
  | { kind: "num"; value: string }
  | { kind: "str"; value: string }
  | { kind: "op"; value: string };

function tokenize(text: string): Token[] {
  const out: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const ch = text[i]!;
    if (ch === " " || ch === "\t" || ch === "\n") {
      i += 1;
      continue;
    }
    if (ch === '"') {
      let value = "";
      i += 1;
      for (;;) {
        if (i >= text.length) throw new Error("unterminated string constant");
        const c = text[i]!;
        if (c === "\\") {
          if (i + 1 >= text.length) throw new Error("dangling escape");
          value += text[i + 1]!;
          i += 2;
        } else if (c === '"') {
          i += 1;
          break;
        } else {
          value += c;
          i += 1;
        }
      }
      out.push({ kind: "str", value });
      continue;
    }
    const num = /^-?\d+(?:\/\d+)?/.exec(text.slice(i));
    if (num && (ch !== "-" || /\d/.test(text[i + 1] ?? ""))) {
      out.push({ kind: "num", value: num[0] });
      i += num[0].length;
      continue;
    }
    const word = /^[A-Za-z_][A-Za-z0-9_]*/.exec(text.slice(i));
    if (word) {
      out.push({ kind: "word", value: word[0] });
      i += word[0].length;
      continue;
    }
    const op = ["!=", "<", ">", "=", "."].find((o) => text.startsWith(o, i));
    if (op === undefined) {
      throw new Error(`cannot tokenize at ${JSON.stringify(text.slice(i, i + 10))}`);
    }
    out.push({ kind: "op", value: op });
    i += op.length;
  }
  return out;
}

class Parser {
  private pos = 0;

  constructor(
    private readonly tokens: Token[],
    private readonly attrs: Set<string>,
  ) {}

  private peek(): Token | undefined {
    return this.tokens[this.pos];
  }

  private next(): Token {
    const t = this.tokens[this.pos];
    if (!t) throw new Error("unexpected end of formula");
    this.pos += 1;
    return t;
  }

  private expectOp(value: string): void {
    const t = this.next();
    if (t.kind !== "op" || t.value !== value) {
      throw new Error(`expected ${JSON.stringify(value)}, got ${JSON.stringify(t.value)}`);
    }
  }

  parse(): FormulaText {
    const disjuncts: AtomText[][] = [this.conjunct()];
    while (this.peek()?.kind === "word" && this.peek()?.value === "or") {
      this.next();
      disjuncts.push(this.conjunct());
    }
    if (this.pos !== this.tokens.length) {
      throw new Error(`trailing tokens after formula: ${JSON.stringify(this.tokens[this.pos]?.value)}`);
    }
    return { kind: "dnf", disjuncts };
  }

  private conjunct(): AtomText[] {
    const atoms: AtomText[] = [this.atom()];
    while (this.peek()?.kind === "word" && this.peek()?.value === "and") {
      this.next();
      atoms.push(this.atom());
    }
    return atoms;
  }

  private atom(): AtomText {
    const [lhs, lattr] = this.term();
    const opTok = this.next();
    if (opTok.kind !== "op" || !["=", "!=", "<", ">"].includes(opTok.value)) {
      throw new Error(`expected a comparison, got ${JSON.stringify(opTok.value)}`);
    }
    const [rhs, rattr] = this.term();
    const attr = lattr ?? rattr;
    if (!attr) throw new Error("comparison between two constants");
    if (lattr && rattr && lattr !== rattr) {
      throw new Error(`comparison mixes attributes ${lattr} and ${rattr}`);
    }
    return { attr, op: opTok.value as AtomText["op"], lhs, rhs };
  }

  private term(): [Term, string | null] {
    const t = this.next();
    if (t.kind === "num") return [{ kind: "q", value: parseRational(t.value) }, null];
    if (t.kind === "str") return [{ kind: "c", value: t.value }, null];
    if (t.kind === "word" && (t.value === "L" || t.value === "R")) {
      this.expectOp(".");
      const a = this.next();
      if (a.kind !== "word" || !this.attrs.has(a.value)) {
        throw new Error(`unknown attribute ${JSON.stringify(a.value)}`);
      }
      return [{ kind: "var", side: t.value }, a.value];
    }
    throw new Error(`expected L.attr, R.attr, or a constant, got ${JSON.stringify(t.value)}`);
  }
}

export function parseSource(schema: SchemaJson, text: string): FormulaText {
  const trimmed = text.trim();
  if (trimmed === "true") return { kind: "bool", value: true };
  if (trimmed === "false") return { kind: "bool", value: false };
  const attrs = new Set(schema.attributes.map((a) => a.name));
  return new Parser(tokenize(trimmed), attrs).parse();
}

const domainOf = (schema: SchemaJson, attr: string): "C" | "Q" => {
  const a = schema.attributes.find((x) => x.name === attr);
  if (!a) throw new Error(`unknown attribute ${attr}`);
  return a.domain;
};

function termValue(
  t: Term,
  attr: string,
  domain: "C" | "Q",
  left: Record<string, string>,
  right: Record<string, string>,
): Rational | string {
  if (t.kind === "q") return t.value;
  if (t.kind === "c") return t.value;
  const raw = (t.side === "L" ? left : right)[attr];
  if (raw === undefined) throw new Error(`row is missing attribute ${attr}`);
  return domain === "Q" ? parseRational(raw) : raw;
}

function atomHolds(
  a: AtomText,
  schema: SchemaJson,
  left: Record<string, string>,
  right: Record<string, string>,
): boolean {
  const dom = domainOf(schema, a.attr);
  const x = termValue(a.lhs, a.attr, dom, left, right);
  const y = termValue(a.rhs, a.attr, dom, left, right);
  if (dom === "C") {
    if (a.op === "=") return x === y;
    if (a.op === "!=") return x !== y;
    throw new Error(`order comparison on C attribute ${a.attr}`);
  }
  const c = compareRational(x as Rational, y as Rational);
  switch (a.op) {
    case "=":
      return c === 0;
    case "!=":
      return c !== 0;
    case "<":
      return c < 0;
    case ">":
      return c > 0;
  }
}

/** Does the formula say `left` beats `right`? Values are the exact text
 * forms the server stores in dataset rows. */
export function holdsPair(
  f: FormulaText,
  schema: SchemaJson,
  left: Record<string, string>,
  right: Record<string, string>,
): boolean {
  if (f.kind === "bool") return f.value;
  return f.disjuncts.some((d) => d.every((a) => atomHolds(a, schema, left, right)));
}
