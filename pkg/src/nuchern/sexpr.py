"""S-expression text format for elements, forms, supermatrices and chart labels.

    (+ (* 1/2 (e 1) (e 2)) (* nu0 (z 1)))
    (* (/ 1 (z 1 2)) (d (z 1 2)))
    (supermatrix 0 ((z 1) 0 | (e 1)) | ((e 2) 0 | 1))
    (label 4 ((z 1 4) (z 2 4) (nu-e 1 4) | 1nu))

Symbols are written by kind, index and optional chart: (z k [c]), (e k [c]),
(nu-e k [c]), (nu-z k [c]), nu1 or (nu1 c), (rho k), (c k); anything else as
(sym "name"). ``I`` is the imaginary unit and ``nu0`` the central unit.
Printing is canonical, so parse(print(x)) == x exactly.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .forms import DEFAULT_POLICY, Form, TruncationPolicy, exterior_d
from .grassmann import GrassmannElement, invert
from .supermatrix import SuperMatrix
from .symbols import Kind, Registry, SymbolId

_HEADS = {Kind.Z: "z", Kind.E: "e", Kind.NU_E: "nu-e", Kind.NU_Z: "nu-z", Kind.RHO: "rho",
          Kind.CONST: "c"}
_KINDS = {v: k for k, v in _HEADS.items()}
_TOKEN = re.compile(r'\s*(?:(\()|(\))|(\|)|"((?:[^"\\]|\\.)*)"|([^\s()|"]+))')


# -- printing ---------------------------------------------------------------------------

def format_symbol(sym: SymbolId) -> str:
    if sym.kind is Kind.NU_ONE:
        return "nu1" if sym.chart is None else f"(nu1 {sym.chart})"
    if sym.index is None or sym.name != _default(sym):
        return f'(sym "{sym.name}")'
    tail = "" if sym.chart is None else f" {sym.chart}"
    return f"({_HEADS[sym.kind]} {sym.index}{tail})"


def _default(sym: SymbolId) -> str:
    from .symbols import default_name
    return default_name(sym.kind, sym.index, sym.chart)


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _gauss(re_: Fraction, im: Fraction) -> str:
    if not im:
        return _q(re_)
    i_part = "I" if im == 1 else f"(* {_q(im)} I)"
    return i_part if not re_ else f"(+ {_q(re_)} {i_part})"


def _product(factors: list[str]) -> str:
    if not factors:
        return "1"
    return factors[0] if len(factors) == 1 else "(* " + " ".join(factors) + ")"


def _sum(parts: list[str]) -> str:
    if not parts:
        return "0"
    return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def _poly(reg: Registry, terms: dict) -> str:
    """terms: exponent tuple -> coefficient, where a coefficient is a Fraction or (re, im)."""
    parts = []
    for exps in sorted(terms, reverse=True):
        c = terms[exps]
        re_, im = (c, Fraction(0)) if isinstance(c, Fraction) else c
        if not re_ and not im:
            continue
        factors = []
        for i, e in enumerate(exps):
            if e:
                s = format_symbol(reg.symbol_of_var(i))
                factors.append(s if e == 1 else f"(^ {s} {e})")
        num = _gauss(re_, im)
        if num != "1" or not factors:
            factors.insert(0, num)
        parts.append(_product(factors))
    return _sum(parts)


def format_coefficient(c) -> str:
    reg = c.registry
    num = _poly(reg, {k: tuple(v) for k, v in c.numerator_terms().items()})
    den = c.denominator_terms()
    if len(den) == 1 and all(e == 0 for e in next(iter(den))) and next(iter(den.values())) == 1:
        return num
    return f"(/ {num} {_poly(reg, den)})"


def format_element(x: GrassmannElement) -> str:
    reg = x.registry
    syms = reg.symbols
    parts = []
    for (m, a), c in sorted(x.terms.items(), key=lambda kv: (len(kv[0][0]), kv[0])):
        factors = []
        cs = format_coefficient(c)
        if cs != "1" or not (m or a):
            factors.append(cs)
        if a:
            factors.append("nu0")
        factors.extend(format_symbol(syms[s]) for s in m)
        parts.append(_product(factors))
    return _sum(parts)


def format_form(f: Form) -> str:
    reg = f.registry
    parts = []
    for m in sorted(f.terms, key=lambda m: (len(m), m)):
        ds = [f"(d {format_symbol(reg.symbol(s))})" for s in m]
        coef = format_element(f.terms[m])
        parts.append(_product(([coef] if coef != "1" or not ds else []) + ds))
    return _sum(parts)


def format_value(v) -> str:
    if isinstance(v, Form):
        return format_form(v)
    if isinstance(v, GrassmannElement):
        return format_element(v)
    if isinstance(v, SuperMatrix):
        return format_matrix(v)
    raise TypeError(f"cannot format {type(v).__name__}")


def format_matrix(M: SuperMatrix) -> str:
    k = M.col_dims[0]
    rows = []
    for a, row in enumerate(M.rows):
        cells = [format_value(x) for x in row]
        if M.col_dims[1]:
            cells.insert(k, "|")
        rows.append("(" + " ".join(cells) + ")")
    if M.row_dims[1]:
        rows.insert(M.row_dims[0], "|")
    return f"(supermatrix {M.parity} " + " ".join(rows) + ")"


def format_label(label) -> str:
    from .atlas import ONE_NU
    cells = ["1nu" if x is ONE_NU else format_element(x) for x in label.entries]
    cells.insert(label.divider, "|")
    return f"(label {label.index} (" + " ".join(cells) + "))"


def format_atlas(atlas) -> str:
    return "\n".join(format_label(atlas.label(i)) for i in range(1, atlas.size + 1))


# -- reading -------------------------------------------------------------------------

class _Str(str):
    """A quoted string token."""


def tokenize(text: str) -> list:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        lp, rp, bar, quoted, atom = m.groups()
        if lp:
            out.append("(")
        elif rp:
            out.append(")")
        elif bar:
            out.append("|")
        elif quoted is not None:
            out.append(_Str(quoted.replace('\\"', '"')))
        elif atom is not None:
            out.append(atom)
    return out


def read_tree(text: str):
    toks = tokenize(text)
    if not toks:
        raise ParseError("empty input")
    tree, i = _read(toks, 0)
    if i != len(toks):
        raise ParseError(f"trailing tokens after position {i}")
    return tree


def _read(toks, i):
    t = toks[i]
    if t == "(":
        items, i = [], i + 1
        while True:
            if i >= len(toks):
                raise ParseError("unbalanced parenthesis")
            if toks[i] == ")":
                return items, i + 1
            item, i = _read(toks, i)
            items.append(item)
    if t == ")":
        raise ParseError("unexpected ')'")
    return t, i + 1


def _number(tok: str):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        return None


class Reader:
    def __init__(self, registry: Registry, policy: TruncationPolicy = DEFAULT_POLICY):
        self.reg = registry
        self.policy = policy

    def symbol(self, tree) -> SymbolId:
        reg = self.reg
        if tree == "nu1":
            return reg.nu_one
        if not isinstance(tree, list) or not tree:
            raise ParseError(f"not a symbol: {tree!r}")
        head, args = tree[0], tree[1:]
        if head == "sym":
            if len(args) != 1:
                raise ParseError("(sym NAME) takes one name")
            try:
                return reg.by_name(str(args[0]))
            except KeyError:
                raise ParseError(f"unknown symbol {args[0]!r}") from None
        if head == "nu1":
            if len(args) != 1:
                raise ParseError("(nu1 CHART) takes a chart")
            return reg.get(Kind.NU_ONE, None, self._int(args[0]))
        if head not in _KINDS:
            raise ParseError(f"unknown symbol head {head!r}")
        if len(args) not in (1, 2):
            raise ParseError(f"({head} INDEX [CHART]) expected")
        chart = self._int(args[1]) if len(args) == 2 else None
        return reg.get(_KINDS[head], self._int(args[0]), chart)

    @staticmethod
    def _int(tok) -> int:
        try:
            return int(tok)
        except (TypeError, ValueError):
            raise ParseError(f"expected an integer, got {tok!r}") from None

    def _is_symbol(self, tree) -> bool:
        return tree == "nu1" or (isinstance(tree, list) and tree and (
            tree[0] in _KINDS or tree[0] in ("sym", "nu1")))

    def value(self, tree):
        reg = self.reg
        G = GrassmannElement
        if isinstance(tree, str) and not isinstance(tree, _Str):
            if tree == "I":
                return G.const(reg, (0, 1))
            if tree == "nu0":
                return G.nu0(reg)
            q = _number(tree)
            if q is not None:
                return G.const(reg, q)
            if tree == "nu1":
                return G.symbol(reg, reg.nu_one)
            raise ParseError(f"unknown atom {tree!r}")
        if not isinstance(tree, list) or not tree:
            raise ParseError(f"cannot read {tree!r}")
        if self._is_symbol(tree):
            return G.symbol(reg, self.symbol(tree))
        head, args = tree[0], tree[1:]
        vals = [self.value(a) for a in args] if head not in ("d", "^") else None
        if head == "+":
            return self._fold(vals, lambda a, b: a + b, G.zero(reg))
        if head == "-":
            if len(vals) == 1:
                return -vals[0]
            return self._fold(vals[1:], lambda a, b: a - b, vals[0])
        if head == "*":
            return self._fold(vals, self._mul, G.one(reg))
        if head == "/":
            if len(vals) != 2:
                raise ParseError("(/ A B) takes two arguments")
            return self._mul(vals[0], self._inv(vals[1]))
        if head == "inv":
            if len(vals) != 1:
                raise ParseError("(inv A) takes one argument")
            return self._inv(vals[0])
        if head == "^":
            if len(args) != 2:
                raise ParseError("(^ A N) takes two arguments")
            base, n = self.value(args[0]), self._int(args[1])
            if n < 0:
                base, n = self._inv(base), -n
            out = base.one_like() if isinstance(base, GrassmannElement) else Form.from_element(
                G.one(reg), self.policy)
            for _ in range(n):
                out = self._mul(out, base)
            return out
        if head == "d":
            if len(args) != 1:
                raise ParseError("(d A) takes one argument")
            if self._is_symbol(args[0]):
                return Form.dsym(reg, self.symbol(args[0]), self.policy)
            return exterior_d(self.value(args[0]), self.policy)
        raise ParseError(f"unknown operator {head!r}")

    def _lift(self, v):
        return v if isinstance(v, Form) else Form.from_element(v, self.policy)

    def _mul(self, a, b):
        if isinstance(a, Form) or isinstance(b, Form):
            return self._lift(a) * self._lift(b)
        return a * b

    def _inv(self, v):
        if isinstance(v, Form):
            return v.inverse()
        return invert(v)

    def _fold(self, vals, op, start):
        if not vals:
            return start
        acc = vals[0]
        for v in vals[1:]:
            if isinstance(acc, Form) or isinstance(v, Form):
                acc, v = self._lift(acc), self._lift(v)
            acc = op(acc, v)
        return acc


def parse_element(text: str, registry: Registry) -> GrassmannElement:
    v = Reader(registry).value(read_tree(text))
    if isinstance(v, Form):
        raise ParseError("expression contains differentials; use parse_form")
    return v


def parse_form(text: str, registry: Registry, policy: TruncationPolicy = DEFAULT_POLICY) -> Form:
    v = Reader(registry, policy).value(read_tree(text))
    return v if isinstance(v, Form) else Form.from_element(v, policy)


def _split_bar(items: list) -> tuple[list, list]:
    bars = [i for i, x in enumerate(items) if x == "|"]
    if len(bars) > 1:
        raise ParseError("more than one block divider")
    if not bars:
        return list(items), []
    return items[:bars[0]], items[bars[0] + 1:]


def parse_matrix(text: str, registry: Registry, policy: TruncationPolicy = DEFAULT_POLICY,
                 forms: bool | None = None) -> SuperMatrix:
    tree = read_tree(text)
    if not isinstance(tree, list) or len(tree) < 2 or tree[0] != "supermatrix":
        raise ParseError("expected (supermatrix PARITY ROWS...)")
    parity = Reader._int(tree[1])
    top, bottom = _split_bar(tree[2:])
    reader = Reader(registry, policy)
    rows, col_dims = [], None
    for row in top + bottom:
        if not isinstance(row, list):
            raise ParseError("each row must be a list")
        left, right = _split_bar(row)
        dims = (len(left), len(right))
        if col_dims is None:
            col_dims = dims
        elif dims != col_dims:
            raise ParseError("rows disagree on the column divider")
        rows.append([reader.value(x) for x in left + right])
    if col_dims is None:
        raise ParseError("empty supermatrix")
    use_forms = forms if forms is not None else any(isinstance(x, Form) for r in rows for x in r)
    if use_forms:
        rows = [[reader._lift(x) for x in r] for r in rows]
        proto = Form.zero(registry, policy)
    else:
        proto = GrassmannElement.zero(registry)
    return SuperMatrix((len(top), len(bottom)), col_dims, rows, parity, proto=proto)


def parse_label(text: str, registry: Registry):
    from .atlas import ONE_NU, ChartLabel

    tree = read_tree(text)
    if not isinstance(tree, list) or len(tree) != 3 or tree[0] != "label":
        raise ParseError("expected (label INDEX (ENTRIES))")
    index = Reader._int(tree[1])
    left, right = _split_bar(tree[2])
    reader = Reader(registry)
    entries = [ONE_NU if x == "1nu" else reader.value(x) for x in left + right]
    return ChartLabel(index, tuple(entries), len(left))


def parse_value(text: str, registry: Registry, policy: TruncationPolicy = DEFAULT_POLICY):
    """Element, form, supermatrix or label, chosen by the outermost head."""
    tree = read_tree(text)
    if isinstance(tree, list) and tree and tree[0] == "supermatrix":
        return parse_matrix(text, registry, policy)
    if isinstance(tree, list) and tree and tree[0] == "label":
        return parse_label(text, registry)
    return Reader(registry, policy).value(tree)
