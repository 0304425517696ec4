"""Text grammar for polynomials and exponential expressions.

Variables are x1..xN (or plain letters, assigned indices alphabetically);
coefficients are integers or rationals like 3/2, `i` is the imaginary unit,
`^` raises to a non-negative integer power, `*` multiplies (adjacency works
too), and exp(...) is available in the exponential grammar only.

Example: x1^2 + (3/2)*i*x2*x3 - 1
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .critical import ExpPoly, exp_of
from .errors import ParseError
from .poly import Poly
from .scalars import GR_I, GaussianRational

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            raise ParseError(f"unexpected character {stripped[0]!r}", line, col)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over +, -, *, /, ^, parentheses, exp()."""

    def __init__(self, text: str, allow_exp: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_exp = allow_exp
        self.names: List[str] = []

    def _loc(self, offset: int):
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def error(self, msg: str) -> ParseError:
        _, _, offset = self.tokens[self.i]
        line, col = self._loc(offset)
        return ParseError(msg, line, col)

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                node = ("add" if value == "+" else "sub", node, rhs)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                rhs = self.unary()
                node = ("mul" if value == "*" else "div", node, rhs)
            elif kind in ("num", "name") or (kind == "op" and value == "("):
                rhs = self.unary()
                node = ("mul", node, rhs)
            else:
                return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.advance()
            node = self.unary()
            return node if value == "+" else ("neg", node)
        return self.power()

    def power(self):
        node = self.primary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "^":
                self.advance()
                ekind, evalue, _ = self.peek()
                neg = False
                if ekind == "op" and evalue == "-":
                    raise self.error("negative exponents are not supported")
                if ekind != "num" or "." in evalue or "e" in evalue or "E" in evalue:
                    raise self.error("exponent must be a non-negative integer")
                self.advance()
                node = ("pow", node, int(evalue))
            else:
                return node

    def primary(self):
        kind, value, offset = self.peek()
        if kind == "num":
            self.advance()
            if "." in value or "e" in value or "E" in value:
                return ("float", float(value))
            return ("int", int(value))
        if kind == "name":
            self.advance()
            if value == "i":
                return ("imag",)
            if value == "exp":
                nk, nv, _ = self.peek()
                if nk == "op" and nv == "(":
                    if not self.allow_exp:
                        raise self.error("exp(...) is not allowed in polynomial input")
                    self.advance()
                    inner = self.expr()
                    ck, cv, _ = self.peek()
                    if not (ck == "op" and cv == ")"):
                        raise self.error("expected ')'")
                    self.advance()
                    return ("exp", inner)
            if value not in self.names:
                self.names.append(value)
            return ("var", value)
        if kind == "op" and value == "(":
            self.advance()
            inner = self.expr()
            ck, cv, _ = self.peek()
            if not (ck == "op" and cv == ")"):
                raise self.error("expected ')'")
            self.advance()
            return inner
        raise self.error(f"unexpected token {value!r}" if value else "unexpected end of input")


_CANONICAL = re.compile(r"^x(\d+)$")


def _resolve_variables(names: List[str], nvars: Optional[int], varnames) -> Tuple[dict, int]:
    if varnames is not None:
        mapping = {name: idx for idx, name in enumerate(varnames)}
        for name in names:
            if name not in mapping:
                raise ParseError(f"unknown variable {name!r}")
        return mapping, len(varnames)
    canonical = [m for m in (_CANONICAL.match(n) for n in names) if m]
    if canonical and len(canonical) != len(names):
        raise ParseError("cannot mix x<k> variables with named variables")
    if canonical:
        mapping = {n: int(_CANONICAL.match(n).group(1)) - 1 for n in names}
        if any(v < 0 for v in mapping.values()):
            raise ParseError("variable indices start at x1")
        needed = max(mapping.values()) + 1 if mapping else 0
    else:
        ordered = sorted(names)
        mapping = {n: i for i, n in enumerate(ordered)}
        needed = len(ordered)
    if nvars is None:
        nvars = max(needed, 1)
    if needed > nvars:
        raise ParseError(f"expression uses {needed} variables but nvars = {nvars}")
    return mapping, nvars


def parse_poly(
    text: str, nvars: Optional[int] = None, varnames: Optional[Sequence[str]] = None
) -> Poly:
    """Parse exact polynomial text into a Poly."""
    parser = _Parser(text, allow_exp=False)
    ast = parser.parse()
    mapping, n = _resolve_variables(parser.names, nvars, varnames)

    def fold(node) -> Poly:
        tag = node[0]
        if tag == "int":
            return Poly.constant(node[1], n)
        if tag == "float":
            raise ParseError("floating-point constants are not allowed in exact polynomials")
        if tag == "imag":
            return Poly.constant(GR_I, n)
        if tag == "var":
            return Poly.variable(mapping[node[1]], n)
        if tag == "neg":
            return -fold(node[1])
        if tag == "add":
            return fold(node[1]) + fold(node[2])
        if tag == "sub":
            return fold(node[1]) - fold(node[2])
        if tag == "mul":
            return fold(node[1]) * fold(node[2])
        if tag == "div":
            denom = fold(node[2])
            if denom.degree() > 0 or denom.is_zero:
                raise ParseError("division is only allowed by nonzero constants")
            c = next(iter(denom.terms.values()))
            return fold(node[1]) * (GaussianRational(1) / c)
        if tag == "pow":
            return fold(node[1]) ** node[2]
        raise ParseError(f"unsupported construct {tag}")

    return fold(ast)


def parse_poly_family(
    texts: Sequence[str], nvars: Optional[int] = None
) -> List[Poly]:
    """Parse several polynomials against one shared variable mapping, so
    entries of a matrix or system agree on indices even with named variables."""
    parsers = [_Parser(t, allow_exp=False) for t in texts]
    asts = [p.parse() for p in parsers]
    names: List[str] = []
    for p in parsers:
        for nm in p.names:
            if nm not in names:
                names.append(nm)
    mapping, n = _resolve_variables(names, nvars, None)
    out = []
    for text, ast in zip(texts, asts):
        out.append(_fold_poly(ast, mapping, n))
    return out


def _fold_poly(ast, mapping, n) -> Poly:
    def fold(node) -> Poly:
        tag = node[0]
        if tag == "int":
            return Poly.constant(node[1], n)
        if tag == "float":
            raise ParseError("floating-point constants are not allowed in exact polynomials")
        if tag == "imag":
            return Poly.constant(GR_I, n)
        if tag == "var":
            return Poly.variable(mapping[node[1]], n)
        if tag == "neg":
            return -fold(node[1])
        if tag == "add":
            return fold(node[1]) + fold(node[2])
        if tag == "sub":
            return fold(node[1]) - fold(node[2])
        if tag == "mul":
            return fold(node[1]) * fold(node[2])
        if tag == "div":
            denom = fold(node[2])
            if denom.degree() > 0 or denom.is_zero:
                raise ParseError("division is only allowed by nonzero constants")
            c = next(iter(denom.terms.values()))
            return fold(node[1]) * (GaussianRational(1) / c)
        if tag == "pow":
            return fold(node[1]) ** node[2]
        raise ParseError(f"unsupported construct {tag}")

    return fold(ast)


def parse_exp_poly_family(
    texts: Sequence[str], nvars: Optional[int] = None
) -> List[ExpPoly]:
    """Shared-mapping variant of parse_exp_poly for systems of expressions."""
    parsers = [_Parser(t, allow_exp=True) for t in texts]
    asts = [p.parse() for p in parsers]
    names: List[str] = []
    for p in parsers:
        for nm in p.names:
            if nm not in names:
                names.append(nm)
    mapping, n = _resolve_variables(names, nvars, None)
    return [_fold_exp(ast, mapping, n) for ast in asts]


def _fold_exp(ast, mapping, n) -> ExpPoly:
    def fold(node) -> ExpPoly:
        tag = node[0]
        if tag in ("int", "float"):
            return ExpPoly.constant(node[1], n)
        if tag == "imag":
            return ExpPoly.constant(1j, n)
        if tag == "var":
            return ExpPoly.variable(mapping[node[1]], n)
        if tag == "neg":
            return -fold(node[1])
        if tag == "add":
            return fold(node[1]) + fold(node[2])
        if tag == "sub":
            return fold(node[1]) - fold(node[2])
        if tag == "mul":
            return fold(node[1]) * fold(node[2])
        if tag == "div":
            denom = fold(node[2])
            if denom.is_zero or any(f for _, f in denom.terms) or len(denom.terms) != 1:
                raise ParseError("division is only allowed by nonzero constants")
            return fold(node[1]) * (1.0 / denom.terms[0][0])
        if tag == "pow":
            return fold(node[1]) ** node[2]
        if tag == "exp":
            return exp_of(fold(node[1]))
        raise ParseError(f"unsupported construct {tag}")

    return fold(ast)


def parse_exp_poly(
    text: str, nvars: Optional[int] = None, varnames: Optional[Sequence[str]] = None
) -> ExpPoly:
    """Parse the exponential grammar (polynomials plus exp(...)) into an ExpPoly."""
    parser = _Parser(text, allow_exp=True)
    ast = parser.parse()
    mapping, n = _resolve_variables(parser.names, nvars, varnames)

    def fold(node) -> ExpPoly:
        tag = node[0]
        if tag == "int":
            return ExpPoly.constant(node[1], n)
        if tag == "float":
            return ExpPoly.constant(node[1], n)
        if tag == "imag":
            return ExpPoly.constant(1j, n)
        if tag == "var":
            return ExpPoly.variable(mapping[node[1]], n)
        if tag == "neg":
            return -fold(node[1])
        if tag == "add":
            return fold(node[1]) + fold(node[2])
        if tag == "sub":
            return fold(node[1]) - fold(node[2])
        if tag == "mul":
            return fold(node[1]) * fold(node[2])
        if tag == "div":
            denom = fold(node[2])
            if denom.is_zero or any(f for _, f in denom.terms) or len(denom.terms) != 1:
                raise ParseError("division is only allowed by nonzero constants")
            return fold(node[1]) * (1.0 / denom.terms[0][0])
        if tag == "pow":
            return fold(node[1]) ** node[2]
        if tag == "exp":
            return exp_of(fold(node[1]))
        raise ParseError(f"unsupported construct {tag}")

    return fold(ast)
