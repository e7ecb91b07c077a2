/**
 * Independent tree-depth computation for inequality text.
 *
 * Parses the engine's plain grammar (integers, rationals, symbols,
 * + - * / ^, sqrt, parens) into n-ary expression nodes mirroring the
 * engine's canonical shaping: flattened sums/products with a folded
 * leading constant, division as negative powers, rational exponents
 * distributed over products. Depth counts a leaf as 1 and an operator
 * node as 1 + max over children.
 */

export type Rat = { n: bigint; d: bigint };

const ratGcd = (a: bigint, b: bigint): bigint => {
  a = a < 0n ? -a : a;
  b = b < 0n ? -b : b;
  while (b) [a, b] = [b, a % b];
  return a || 1n;
};

export const rat = (n: bigint, d: bigint = 1n): Rat => {
  if (d === 0n) throw new Error("zero denominator");
  if (d < 0n) { n = -n; d = -d; }
  const g = ratGcd(n, d);
  return { n: n / g, d: d / g };
};

const ratMul = (a: Rat, b: Rat) => rat(a.n * b.n, a.d * b.d);
const ratAdd = (a: Rat, b: Rat) => rat(a.n * b.d + b.n * a.d, a.d * b.d);
const ratNeg = (a: Rat) => rat(-a.n, a.d);
const ratIsInt = (a: Rat) => a.d === 1n;
const ratEq = (a: Rat, b: Rat) => a.n === b.n && a.d === b.d;
const RONE = rat(1n);
const RZERO = rat(0n);

function ratPowInt(a: Rat, e: bigint): Rat {
  if (e < 0n) return ratPowInt(rat(a.d, a.n), -e);
  let out = RONE;
  let base = a;
  let k = e;
  while (k > 0n) {
    if (k & 1n) out = ratMul(out, base);
    base = ratMul(base, base);
    k >>= 1n;
  }
  return out;
}

export type Node =
  | { kind: "const"; value: Rat }
  | { kind: "sym"; name: string }
  | { kind: "add"; ops: Node[] }
  | { kind: "mul"; coeff: Rat; ops: Node[] }
  | { kind: "pow"; base: Node; exp: Node };

const mkConst = (v: Rat): Node => ({ kind: "const", value: v });

function mkAdd(ops: Node[]): Node {
  const flat: Node[] = [];
  let c = RZERO;
  for (const op of ops) {
    if (op.kind === "add") flat.push(...op.ops);
    else if (op.kind === "const") c = ratAdd(c, op.value);
    else flat.push(op);
  }
  if (!ratEq(c, RZERO)) flat.push(mkConst(c));
  if (flat.length === 0) return mkConst(RZERO);
  if (flat.length === 1) return flat[0];
  return { kind: "add", ops: flat };
}

function mkMul(ops: Node[]): Node {
  const flat: Node[] = [];
  let coeff = RONE;
  const pending = [...ops];
  while (pending.length) {
    const op = pending.shift()!;
    if (op.kind === "mul") {
      coeff = ratMul(coeff, op.coeff);
      pending.unshift(...op.ops);
    } else if (op.kind === "const") {
      coeff = ratMul(coeff, op.value);
    } else if (op.kind === "pow" && op.base.kind === "const" &&
               op.exp.kind === "const" && ratIsInt(op.exp.value)) {
      coeff = ratMul(coeff, ratPowInt(op.base.value, op.exp.value.n));
    } else {
      flat.push(op);
    }
  }
  if (ratEq(coeff, RZERO)) return mkConst(RZERO);
  if (flat.length === 0) return mkConst(coeff);
  if (flat.length === 1 && ratEq(coeff, RONE)) return flat[0];
  return { kind: "mul", coeff, ops: flat };
}

function mkPow(base: Node, exp: Node): Node {
  if (exp.kind === "const") {
    const e = exp.value;
    if (ratEq(e, RZERO)) return mkConst(RONE);
    if (ratEq(e, RONE)) return base;
    if (base.kind === "const" && ratIsInt(e)) {
      return mkConst(ratPowInt(base.value, e.n));
    }
    if (base.kind === "mul") {
      const parts = base.ops.map((f) => mkPow(f, exp));
      if (!ratEq(base.coeff, RONE)) {
        parts.push(mkPow(mkConst(base.coeff), exp));
      }
      return mkMul(parts);
    }
    if (base.kind === "pow" && base.exp.kind === "const") {
      const inner = base.exp.value;
      const blocked = ratIsInt(inner) && inner.n % 2n === 0n && !ratIsInt(e);
      if (!blocked) return mkPow(base.base, mkConst(ratMul(inner, e)));
    }
  }
  return { kind: "pow", base, exp };
}

export function depth(node: Node): number {
  switch (node.kind) {
    case "const":
    case "sym":
      return 1;
    case "add":
      return 1 + Math.max(...node.ops.map(depth));
    case "mul": {
      const d = Math.max(...node.ops.map(depth), ratEq(node.coeff, RONE) ? 0 : 1);
      return 1 + d;
    }
    case "pow":
      return 1 + Math.max(depth(node.base), depth(node.exp));
  }
}

// ---------------------------------------------------------------------------
// parser

type Token =
  | { t: "num"; v: bigint }
  | { t: "name"; v: string }
  | { t: "+" | "-" | "*" | "/" | "^" | "(" | ")" | "end" };

function tokenize(text: string): Token[] {
  const out: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const c = text[i];
    if (c === " " || c === "\t" || c === "\n") { i++; continue; }
    if ("+-*/^()".includes(c)) {
      out.push({ t: c as "+" });
      i++;
      continue;
    }
    if (c >= "0" && c <= "9") {
      let j = i;
      while (j < text.length && text[j] >= "0" && text[j] <= "9") j++;
      out.push({ t: "num", v: BigInt(text.slice(i, j)) });
      i = j;
      continue;
    }
    if (c >= "a" && c <= "z") {
      let j = i;
      while (j < text.length &&
             ((text[j] >= "a" && text[j] <= "z") ||
              (text[j] >= "0" && text[j] <= "9") || text[j] === "_")) j++;
      out.push({ t: "name", v: text.slice(i, j) });
      i = j;
      continue;
    }
    throw new Error(`unexpected character ${JSON.stringify(c)} at ${i}`);
  }
  out.push({ t: "end" });
  return out;
}

class Parser {
  private pos = 0;
  constructor(private tokens: Token[]) {}

  peek(): Token { return this.tokens[this.pos]; }
  next(): Token { return this.tokens[this.pos++]; }

  expr(): Node {
    const terms = [this.term()];
    while (this.peek().t === "+" || this.peek().t === "-") {
      const op = this.next().t;
      const t = this.term();
      terms.push(op === "+" ? t : mkMul([mkConst(rat(-1n)), t]));
    }
    return mkAdd(terms);
  }

  term(): Node {
    const factors = [this.unary()];
    while (this.peek().t === "*" || this.peek().t === "/") {
      const op = this.next().t;
      const f = this.unary();
      factors.push(op === "*" ? f : mkPow(f, mkConst(rat(-1n))));
    }
    return mkMul(factors);
  }

  unary(): Node {
    if (this.peek().t === "-") {
      this.next();
      return mkMul([mkConst(rat(-1n)), this.unary()]);
    }
    return this.power();
  }

  power(): Node {
    const base = this.atom();
    if (this.peek().t === "^") {
      this.next();
      return mkPow(base, this.unary());
    }
    return base;
  }

  atom(): Node {
    const tok = this.next();
    if (tok.t === "num") return mkConst(rat(tok.v));
    if (tok.t === "name") {
      if (this.peek().t === "(") {
        if (tok.v !== "sqrt") throw new Error(`unknown function ${tok.v}`);
        this.next();
        const arg = this.expr();
        if (this.next().t !== ")") throw new Error("expected )");
        return mkPow(arg, mkConst(rat(1n, 2n)));
      }
      return { kind: "sym", name: tok.v };
    }
    if (tok.t === "(") {
      const e = this.expr();
      if (this.next().t !== ")") throw new Error("expected )");
      return e;
    }
    throw new Error(`unexpected token ${tok.t}`);
  }

  finish(): void {
    if (this.next().t !== "end") throw new Error("trailing input");
  }
}

export function parseExpr(text: string): Node {
  const p = new Parser(tokenize(text));
  const e = p.expr();
  p.finish();
  return e;
}

/** Depth of an inequality "lhs <= rhs" (or "<"): max over both sides. */
export function inequalityDepth(text: string): number {
  let parts = text.split("<=");
  if (parts.length === 1) parts = text.split("<");
  if (parts.length !== 2) throw new Error("expected one relation <= or <");
  return Math.max(depth(parseExpr(parts[0])), depth(parseExpr(parts[1])));
}

/** The score: depth/(depth+1), inside [0, 1]. */
export function scoreText(text: string): number {
  const d = inequalityDepth(text);
  return d / (d + 1);
}
