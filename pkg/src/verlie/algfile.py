"""Parser and renderer for the algebra-definition language and for state
expressions.

    algebra vir {
      param k ;
      generator L : even, weight 2 ;
      central c ;
      bracket L L = T L + 2 L l + 1/2 c l^(3) ;
    }

Bracket expressions are Q[params]-linear combinations of terms built from
rational literals, declared parameters, divided T-powers T^(k), one
generator or central symbol, and a divided power l^(t) of the bracket
variable.  Divided powers are the only exponent form accepted (plain l^3
would silently differ by a factorial, so it is rejected).  Only one
orientation of each generator pair may be declared; the other is
synthesized through the opposite bracket.

State expressions for the enveloping algebra read like "2 L(-2) L(-1) vac";
modes apply left to right to the vacuum.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import factorial

from .dpoly import DPoly
from .scalars import Scalar
from .vlie import EVEN, ODD, GeneratorDecl, RElem, VLieError, VLiePresentation
from .envelope import EnvContext, EnvElem


class AlgebraSyntaxError(VLieError):
    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<dpow>\^\(\s*-?\d+\s*\))
  | (?P<number>-?\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[{}();:,=*+-])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise AlgebraSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise AlgebraSyntaxError(message, tok.line, tok.col)

    def expect(self, kind, text=None):
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            self.error(f"expected {want!r}, found {tok.text!r}", tok)
        return tok

    def accept(self, kind, text=None):
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            self.i += 1
            return tok
        return None


VARIABLE_NAME = "l"


def _dpow_value(tok):
    return int(tok.text.strip("^() \t"))


class _ExprParser:
    """Shared expression parser over a symbol table."""

    def __init__(self, parser: _Parser, generators, centrals, params,
                 allow_lambda=True):
        self.p = parser
        self.generators = generators
        self.centrals = centrals
        self.params = params
        self.allow_lambda = allow_lambda

    def parse(self):
        """Returns DPoly in l with RElem coefficients (zero if empty)."""
        poly = DPoly()
        sign = 1
        if self.p.accept("punct", "-"):
            sign = -1
        while True:
            poly = poly + self._term(sign)
            if self.p.accept("punct", "+"):
                sign = 1
            elif self.p.accept("punct", "-"):
                sign = -1
            else:
                return poly

    def _term(self, sign):
        coeff = Scalar.rational(sign)
        symbol = None
        tpow = 0
        lpow = 0
        saw_factor = False
        saw_l = False
        while True:
            tok = self.p.peek()
            if tok.kind == "number":
                self.p.next()
                coeff = coeff * Scalar.rational(Fraction(tok.text))
                saw_factor = True
            elif tok.kind == "ident":
                name = tok.text
                if name == "T":
                    self.p.next()
                    k = 1
                    dp = self.p.accept("dpow")
                    if dp:
                        k = _dpow_value(dp)
                        if k < 0:
                            self.p.error("negative T power", dp)
                    if symbol is not None:
                        self.p.error("T must precede the generator", tok)
                    tpow += k
                    saw_factor = True
                elif name == VARIABLE_NAME and name not in self.params and \
                        name not in self.generators and name not in self.centrals:
                    self.p.next()
                    if not self.allow_lambda:
                        self.p.error("l is not allowed in this expression", tok)
                    t = 1
                    dp = self.p.accept("dpow")
                    if dp:
                        t = _dpow_value(dp)
                        if t < 0:
                            self.p.error("negative l power", dp)
                    if saw_l:
                        self.p.error("repeated l factor in one term", tok)
                    lpow = t
                    saw_l = True
                    saw_factor = True
                elif name in self.params:
                    self.p.next()
                    e = 1
                    dp = self.p.accept("dpow")
                    if dp:
                        e = _dpow_value(dp)
                        if e < 0:
                            self.p.error("negative parameter power", dp)
                    coeff = coeff * Scalar.param(name) ** e
                    saw_factor = True
                elif name in self.generators or name in self.centrals:
                    self.p.next()
                    if symbol is not None:
                        self.p.error(
                            f"second symbol {name!r} in one term "
                            "(separate terms with + or -)", tok)
                    symbol = name
                    saw_factor = True
                else:
                    self.p.error(f"unknown symbol {name!r}", tok)
            elif tok.kind == "punct" and tok.text == "*":
                self.p.next()
                continue
            else:
                break
        if not saw_factor:
            self.p.error("empty term")
        if symbol is None:
            if not coeff.is_zero():
                self.p.error("term lacks a generator or central symbol")
            return DPoly()
        if symbol in self.centrals:
            if tpow:
                self.p.error(f"T cannot act on the central {symbol!r}")
            relem = RElem.central(symbol, coeff)
        else:
            # external T^(k) is the divided power: T^(k) a = T^k a / k!
            relem = RElem.gen(symbol, tpow, coeff * Fraction(1, factorial(tpow)))
        if not relem:
            return DPoly()
        if lpow:
            return DPoly.variable(VARIABLE_NAME, relem, lpow)
        return DPoly.constant(relem)


def parse_algebra(text: str) -> VLiePresentation:
    """Parse an algebra definition into a presentation; weights must have
    denominator dividing 2 and bracket homogeneity is validated."""
    p = _Parser(text)
    p.expect("ident", "algebra")
    name = p.expect("ident").text
    p.expect("punct", "{")
    params, generators, centrals = [], [], []
    gen_names, central_names = set(), set()
    brackets = []
    while not p.accept("punct", "}"):
        tok = p.expect("ident")
        if tok.text == "param":
            pname = p.expect("ident").text
            params.append(pname)
            p.expect("punct", ";")
        elif tok.text == "generator":
            gname_tok = p.expect("ident")
            gname = gname_tok.text
            if gname in gen_names or gname in central_names:
                p.error(f"duplicate symbol {gname!r}", gname_tok)
            p.expect("punct", ":")
            parity_tok = p.expect("ident")
            if parity_tok.text not in ("even", "odd"):
                p.error("parity must be even or odd", parity_tok)
            p.expect("punct", ",")
            p.expect("ident", "weight")
            wtok = p.next()
            if wtok.kind != "number":
                p.error("expected a rational weight", wtok)
            weight = Fraction(wtok.text)
            if weight.denominator not in (1, 2):
                p.error("weights must have denominator 1 or 2", wtok)
            generators.append(GeneratorDecl(gname, parity_tok.text, weight))
            gen_names.add(gname)
            p.expect("punct", ";")
        elif tok.text == "central":
            cname_tok = p.expect("ident")
            cname = cname_tok.text
            if cname in gen_names or cname in central_names:
                p.error(f"duplicate symbol {cname!r}", cname_tok)
            centrals.append(cname)
            central_names.add(cname)
            p.expect("punct", ";")
        elif tok.text == "bracket":
            a_tok = p.expect("ident")
            b_tok = p.peek()
            if b_tok.kind != "ident":
                p.error("bracket needs two generator names", b_tok)
            p.next()
            eq = p.peek()
            if not (eq.kind == "punct" and eq.text == "="):
                p.error("expected '='", eq)
            p.next()
            expr = _ExprParser(p, gen_names, central_names, set(params)).parse()
            brackets.append(((a_tok.text, b_tok.text), expr, a_tok))
            p.expect("punct", ";")
        else:
            p.error(
                "expected param, generator, central, or bracket", tok
            )
    p.expect("eof")

    table = {}
    synthesized_notes = []
    for (a, b), expr, tok in brackets:
        if a not in gen_names:
            raise AlgebraSyntaxError(f"unknown generator {a!r}", tok.line, tok.col)
        if b not in gen_names:
            raise AlgebraSyntaxError(f"unknown generator {b!r}", tok.line, tok.col)
        if (a, b) in table:
            raise AlgebraSyntaxError(
                f"bracket ({a}, {b}) declared twice", tok.line, tok.col
            )
        if (b, a) in table and a != b:
            raise AlgebraSyntaxError(
                f"both orientations of ({a}, {b}) declared; give one only",
                tok.line, tok.col,
            )
        table[(a, b)] = expr
    pres = VLiePresentation(name, generators, centrals, table)
    pres.params = list(params)
    for pair in pres.synthesized_pairs:
        synthesized_notes.append(pair)
    pres.synthesized_notes = synthesized_notes
    return pres


def parse_relem(text: str, pres: VLiePresentation) -> RElem:
    """Parse a T-decorated linear combination of the presentation's symbols
    (no l powers)."""
    p = _Parser(text)
    gen_names = {g.name for g in pres.generators}
    params = set(getattr(pres, "params", []))
    expr = _ExprParser(
        p, gen_names, set(pres.centrals), params, allow_lambda=False
    ).parse()
    p.expect("eof")
    const = expr.coefficient()
    if expr.terms and const is None:
        raise VLieError("expression has l powers; a plain element was expected")
    return const if const is not None else RElem.zero()


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_scalar(s: Scalar) -> str:
    return str(s)


def render_relem_factors(relem: RElem):
    """Terms of an RElem as (coefficient string or None, factor string)."""
    out = []
    gens, cents = relem.sorted_terms()
    for (g, k), s in gens:
        disp = s * Fraction(factorial(k))
        if k == 0:
            factor = g
        elif k == 1:
            factor = f"T {g}"
        else:
            factor = f"T^({k}) {g}"
        out.append((disp, factor))
    for z, s in cents:
        out.append((s, z))
    return out


def _join_terms(pieces):
    parts = []
    for disp, factor in pieces:
        ds = str(disp)
        if ds == "1":
            parts.append(factor)
        elif ds == "-1":
            parts.append(f"- {factor}" if parts else f"-{factor}")
            continue
        else:
            ds = f"({ds})" if " " in ds else ds
            parts.append(f"{ds} {factor}")
    text = " + ".join(p for p in parts if not p.startswith("- "))
    rest = [p[2:] for p in parts if p.startswith("- ")]
    for r in rest:
        text = (text + " - " + r) if text else ("-" + r)
    return text or "0"


def render_relem(relem: RElem) -> str:
    return _join_terms(render_relem_factors(relem))


def render_bracket_value(poly: DPoly) -> str:
    """Canonical text for a bracket table value in l."""
    if poly.is_zero():
        return "0"
    pieces = []
    for exps, relem in poly.sorted_terms():
        t = exps[0]
        lfactor = "" if t == 0 else (" l" if t == 1 else f" l^({t})")
        for disp, factor in render_relem_factors(relem):
            pieces.append((disp, factor + lfactor))
    return _join_terms(pieces)


def render_algebra(pres: VLiePresentation) -> str:
    """Algebra file text for a presentation; one orientation per pair."""
    lines = [f"algebra {pres.name or 'R'} {{"]
    for pname in getattr(pres, "params", []):
        lines.append(f"  param {pname} ;")
    for g in pres.generators:
        parity = "odd" if g.parity == ODD else "even"
        lines.append(f"  generator {g.name} : {parity}, weight {g.weight} ;")
    for z in pres.centrals:
        lines.append(f"  central {z} ;")
    index = {g.name: i for i, g in enumerate(pres.generators)}
    for (a, b), poly in sorted(
        pres.table.items(), key=lambda kv: (index[kv[0][0]], index[kv[0][1]])
    ):
        if index[a] > index[b]:
            continue
        lines.append(f"  bracket {a} {b} = {render_bracket_value(poly)} ;")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# state expressions
# ---------------------------------------------------------------------------

_STATE_TOKEN = re.compile(
    r"\s*(?:(?P<number>-?\d+(?:/\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<punct>[()+*-]))"
)


def parse_state(text: str, ctx: EnvContext) -> EnvElem:
    """Parse a state expression like '2 L(-2) L(-1) vac + J(-1) vac'."""
    pos = 0
    tokens = []
    while pos < len(text):
        m = _STATE_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise VLieError(f"bad state expression near {text[pos:pos+10]!r}")
            break
        if m.lastgroup == "number":
            tokens.append(("num", m.group().strip()))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group().strip()))
        else:
            tokens.append(("punct", m.group().strip()))
        pos = m.end()
    tokens.append(("eof", ""))

    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    params = set()
    for z, s in ctx.specialize.items():
        params |= s.parameters()

    def parse_term(sign):
        coeff = Scalar.rational(sign)
        modes = []
        saw_vac = False
        while True:
            kind, val = peek()
            if kind == "num":
                take()
                coeff = coeff * Scalar.rational(Fraction(val))
            elif kind == "punct" and val == "*":
                take()
            elif kind == "ident" and val == "vac":
                take()
                saw_vac = True
                break
            elif kind == "ident" and val in ctx.weights:
                take()
                k, v = take()
                if not (k == "punct" and v == "("):
                    raise VLieError(f"mode {val} needs an index in parentheses")
                k, num = take()
                if k != "num":
                    raise VLieError(f"bad mode index for {val}")
                k, v = take()
                if not (k == "punct" and v == ")"):
                    raise VLieError("unclosed mode index")
                modes.append((val, int(num)))
            elif kind == "ident" and val in params:
                take()
                coeff = coeff * Scalar.param(val)
            else:
                raise VLieError(
                    f"unexpected token {val!r} in state expression"
                )
        if not saw_vac:
            raise VLieError("state term must end with vac")
        return EnvElem.state(ctx, modes) * ctx.coeff(coeff)

    out = EnvElem()
    sign = 1
    kind, val = peek()
    if kind == "punct" and val == "-":
        take()
        sign = -1
    while True:
        out = out + parse_term(sign)
        kind, val = peek()
        if kind == "punct" and val == "+":
            take()
            sign = 1
        elif kind == "punct" and val == "-":
            take()
            sign = -1
        elif kind == "eof":
            return out
        else:
            raise VLieError(f"unexpected token {val!r} after state term")
