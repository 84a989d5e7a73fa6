"""Recursive-descent parser for foliation files and polynomial expressions.

File grammar (line oriented, ``#`` starts a comment)::

    vars: u v x y
    params: t1 t2
    field D : u*x d/dx + v*y d/dy
    point P : (1, 2, t1/t2, 0)
    candidate f : x^2 - y
    options: max_degree=4 word_cap=12

In a field line the coefficient of ``d/d<var>`` is everything between the
previous ``d/d`` token (or the colon) and this one, so ``x + y d/dx``
means ``(x + y) d/dx``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .foliation import Derivation
from .invariant import EvalPoint
from .polyring import Polynomial, VariableContext

_TOKEN = re.compile(
    r"\s*(?:(?P<deriv>d/d(?P<dvar>[A-Za-z_][A-Za-z0-9_]*))"
    r"|(?P<num>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),:=]))"
)

OPTION_NAMES = ("max_degree", "degree", "word_cap", "span_cap", "depth_cap")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        where = f"line {line}, column {column}: " if line else ""
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{extra}")


@dataclass
class Token:
    kind: str  # num, name, op, deriv, end
    text: str
    column: int


def tokenize(text: str, line: int = 0, offset: int = 0, derivs: bool = False) -> list[Token]:
    toks = []
    pos = 0
    while text[pos:].strip():
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", line, offset + bad + 1)
        if m.group("deriv") is not None and derivs:
            toks.append(Token("deriv", m.group("dvar"), offset + m.start("deriv") + 1))
        elif m.group("deriv") is not None:
            # outside field lines "d/dx" is just d / dx
            s = m.start("deriv")
            toks.append(Token("name", "d", offset + s + 1))
            toks.append(Token("op", "/", offset + s + 2))
            toks.append(Token("name", "d" + m.group("dvar"), offset + s + 3))
        else:
            kind = next(k for k in ("num", "name", "op") if m.group(k) is not None)
            toks.append(Token(kind, m.group(kind), offset + m.start(kind) + 1))
        pos = m.end()
    toks.append(Token("end", "", offset + len(text) + 1))
    return toks


class ExprParser:
    """expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
    unary := ('+'|'-') unary | power; power := atom ('^' INT)?;
    atom := INT | NAME | '(' expr ')'."""

    def __init__(self, tokens: list[Token], ctx: VariableContext, line: int = 0,
                 allow_vars: bool = True):
        self.toks = tokens
        self.i = 0
        self.ctx = ctx
        self.line = line
        self.allow_vars = allow_vars

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, message, expected=()):
        t = self.tok
        found = repr(t.text) if t.kind != "end" else "end of input"
        raise ParseError(f"{message}, found {found}", self.line, t.column, expected)

    def take(self, kind, text=None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            self.error("unexpected token", [text or kind])
        self.i += 1
        return t

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> Polynomial:
        value = self.expr()
        if self.tok.kind != "end":
            self.error("unexpected token", ["+", "-", "*", "/", "^", "end of input"])
        return value

    def expr(self) -> Polynomial:
        value = self.term()
        while self.at_op("+", "-"):
            op = self.take("op").text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Polynomial:
        value = self.unary()
        while self.at_op("*", "/"):
            op = self.take("op").text
            tok = self.tok
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if not rhs.is_constant():
                    raise ParseError("can only divide by a constant or parameter expression",
                                     self.line, tok.column)
                if not rhs:
                    raise ParseError("division by zero", self.line, tok.column)
                value = value.scale(self.ctx.one / rhs.constant_term())
        return value

    def unary(self) -> Polynomial:
        if self.at_op("-"):
            self.take("op")
            return -self.unary()
        if self.at_op("+"):
            self.take("op")
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.at_op("^"):
            self.take("op")
            if self.tok.kind != "num":
                self.error("exponent must be a non-negative integer literal", ["integer"])
            base = base ** int(self.take("num").text)
        return base

    def atom(self) -> Polynomial:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Polynomial.constant(self.ctx, int(t.text))
        if t.kind == "name":
            self.i += 1
            if t.text in self.ctx.variables:
                if not self.allow_vars:
                    raise ParseError(f"variable {t.text!r} not allowed here", self.line, t.column)
                return Polynomial.variable(self.ctx, t.text)
            if t.text in self.ctx.params:
                return Polynomial.constant(self.ctx, self.ctx.param(t.text))
            raise ParseError(f"undeclared identifier {t.text!r}", self.line, t.column)
        if self.at_op("("):
            self.take("op")
            value = self.expr()
            if not self.at_op(")"):
                self.error("unbalanced parenthesis", [")"])
            self.take("op")
            return value
        self.error("expected an expression", ["integer", "name", "(", "-"])


def parse_polynomial(text: str, ctx: VariableContext) -> Polynomial:
    return ExprParser(tokenize(text), ctx).parse()


def parse_scalar(text: str, ctx: VariableContext):
    return ExprParser(tokenize(text), ctx, allow_vars=False).parse().constant_term()


@dataclass
class FoliationFile:
    ctx: VariableContext
    fields: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    candidates: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, FoliationFile):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and list(self.fields.items()) == list(other.fields.items())
            and list(self.points.items()) == list(other.points.items())
            and list(self.candidates.items()) == list(other.candidates.items())
            and self.options == other.options
        )


_HEADER = re.compile(r"^\s*(vars|params|options)\s*:(.*)$")
_DECL = re.compile(r"^\s*(field|point|candidate)\s+([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)$")


def parse_foliation_file(text: str) -> FoliationFile:
    variables = None
    params: tuple = ()
    ctx = None
    ff = None
    seen: set[str] = set()
    options = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _HEADER.match(line)
        if m:
            key, body = m.group(1), m.group(2)
            col = m.start(2)
            if key == "vars":
                if variables is not None:
                    raise ParseError("duplicate vars declaration", lineno, 1)
                variables = _names(body, lineno, col)
                if not variables:
                    raise ParseError("vars declaration lists no variables", lineno, col + 1)
            elif key == "params":
                if ff is not None:
                    raise ParseError("params must be declared before fields, points and candidates",
                                     lineno, 1)
                params = _names(body, lineno, col)
            else:
                options.update(_options(body, lineno, col))
            seen = set(variables or ()) | set(params)
            if len(seen) != len(variables or ()) + len(params):
                dup = sorted(set(variables or ()) & set(params))
                raise ParseError(f"duplicate name {dup[0]!r}", lineno, 1)
            continue
        m = _DECL.match(line)
        if not m:
            raise ParseError("unrecognized line", lineno, len(line) - len(line.lstrip()) + 1,
                             ["vars:", "params:", "field", "point", "candidate", "options:"])
        if variables is None:
            raise ParseError("no vars declaration", lineno, 1)
        if ff is None:
            ctx = VariableContext(variables, params)
            ff = FoliationFile(ctx)
        kind, name, body = m.group(1), m.group(2), m.group(3)
        col = m.start(3)
        if name in seen:
            raise ParseError(f"duplicate name {name!r}", lineno, m.start(2) + 1)
        seen.add(name)
        if kind == "field":
            ff.fields[name] = _parse_field(body, ctx, lineno, col)
        elif kind == "point":
            ff.points[name] = _parse_point(body, ctx, lineno, col, name)
        else:
            ff.candidates[name] = ExprParser(tokenize(body, lineno, col), ctx, lineno).parse()
    if variables is None:
        raise ParseError("no vars declaration")
    if ff is None:
        ff = FoliationFile(VariableContext(variables, params))
    ff.options = options
    return ff


def _names(body: str, lineno: int, col: int) -> tuple:
    names = []
    for t in tokenize(body, lineno, col)[:-1]:
        if t.kind != "name":
            raise ParseError(f"expected a name, found {t.text!r}", lineno, t.column, ["name"])
        if t.text in names:
            raise ParseError(f"duplicate name {t.text!r}", lineno, t.column)
        names.append(t.text)
    return tuple(names)


def _options(body: str, lineno: int, col: int) -> dict:
    toks = tokenize(body, lineno, col)
    out = {}
    i = 0
    while toks[i].kind != "end":
        if toks[i].kind != "name" or toks[i].text not in OPTION_NAMES:
            raise ParseError(f"unknown option {toks[i].text!r}", lineno, toks[i].column, OPTION_NAMES)
        if toks[i + 1].text != "=" or toks[i + 2].kind != "num":
            raise ParseError("expected name=integer", lineno, toks[i + 1].column, ["="])
        out[toks[i].text] = int(toks[i + 2].text)
        i += 3
    return out


def _parse_field(body: str, ctx: VariableContext, lineno: int, col: int) -> Derivation:
    toks = tokenize(body, lineno, col, derivs=True)
    comps = [Polynomial.zero(ctx) for _ in range(ctx.nvars)]
    segment: list[Token] = []
    found = False
    for t in toks:
        if t.kind == "deriv":
            if t.text not in ctx.variables:
                raise ParseError(f"undeclared identifier {t.text!r}", lineno, t.column + 3)
            coeff = _segment_value(segment, ctx, lineno, t.column)
            comps[ctx.var_index(t.text)] = comps[ctx.var_index(t.text)] + coeff
            segment = []
            found = True
        elif t.kind == "end":
            if segment:
                raise ParseError("trailing expression without d/d<var>", lineno,
                                 segment[0].column, ["d/d<var>"])
        else:
            segment.append(t)
    if not found:
        raise ParseError("field has no d/d<var> term", lineno, col + 1, ["d/d<var>"])
    return Derivation(tuple(comps))


def _segment_value(segment: list[Token], ctx, lineno: int, column: int) -> Polynomial:
    if not segment:
        return Polynomial.constant(ctx, 1)
    if len(segment) == 1 and segment[0].kind == "op" and segment[0].text in "+-":
        return Polynomial.constant(ctx, 1 if segment[0].text == "+" else -1)
    return ExprParser(segment + [Token("end", "", column)], ctx, lineno).parse()


def _parse_point(body: str, ctx: VariableContext, lineno: int, col: int, name: str) -> EvalPoint:
    toks = tokenize(body, lineno, col)
    if toks[0].text != "(":
        raise ParseError("expected '('", lineno, toks[0].column, ["("])
    if toks[-2].text != ")":
        raise ParseError("expected ')'", lineno, toks[-2].column, [")"])
    inner = toks[1:-2]
    coords, current = [], []
    depth = 0
    for t in inner + [Token("op", ",", toks[-2].column)]:
        if t.kind == "op" and t.text == "(":
            depth += 1
        elif t.kind == "op" and t.text == ")":
            depth -= 1
        if t.kind == "op" and t.text == "," and depth == 0:
            if not current:
                raise ParseError("empty coordinate", lineno, t.column, ["expression"])
            expr = ExprParser(current + [Token("end", "", t.column)], ctx, lineno, allow_vars=False)
            coords.append(expr.parse().constant_term())
            current = []
        else:
            current.append(t)
    if len(coords) != ctx.nvars:
        raise ParseError(f"point {name} has {len(coords)} coordinates, expected {ctx.nvars}",
                         lineno, toks[0].column)
    return EvalPoint.of(ctx, coords, name)


def format_foliation_file(ff: FoliationFile) -> str:
    ctx = ff.ctx
    lines = ["vars: " + " ".join(ctx.variables)]
    if ctx.params:
        lines.append("params: " + " ".join(ctx.params))
    for name, d in ff.fields.items():
        lines.append(f"field {name} : {d}")
    for name, p in ff.points.items():
        lines.append(f"point {name} : (" + ", ".join(ctx.format_scalar(c) for c in p.coords) + ")")
    for name, c in ff.candidates.items():
        lines.append(f"candidate {name} : {c}")
    if ff.options:
        lines.append("options: " + " ".join(f"{k}={v}" for k, v in sorted(ff.options.items())))
    return "\n".join(lines) + "\n"
