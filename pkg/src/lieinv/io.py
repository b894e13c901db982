"""Text formats: algebra documents, expression parsing, LaTeX rendering.

The algebra document is line oriented (semicolons also separate statements):

    # a comment
    name heisenberg
    dim 3
    param a
    [1,2] = e3

Bracket lines list [i,j] with i < j (1-based); right-hand sides are linear
in the basis symbols e1, e2, ... with rational or parameter coefficients.
Expressions use the same syntax the library prints: x1, th2, parameter
names, exp/log/atan/cos/sin calls, ^ for powers, and / for quotients.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .algebra import StructureError, lie_algebra, validate
from .expr import (
    EXPR_ZERO,
    KernelError,
    atan_of,
    coord,
    cos_of,
    differentiate,
    exp_of,
    expr_str,
    log_of,
    param,
    param_atom,
    rational,
    sin_of,
    substitute,
    theta,
)


class ParseError(ValueError):
    """Syntax or structure error in a document, with position information."""


# ---------------------------------------------------------------------------
# expression parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)

_FUNCTIONS = {
    "exp": exp_of,
    "log": log_of,
    "atan": atan_of,
    "cos": cos_of,
    "sin": sin_of,
}

_COORD = re.compile(r"^x(\d+)$")
_THETA = re.compile(r"^th(\d+)$")


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(
                    "unexpected character %r at position %d" % (text[pos], pos)
                )
            break
        if m.group("num") is not None:
            out.append(("num", int(m.group("num")), m.start()))
        elif m.group("name") is not None:
            out.append(("name", m.group("name"), m.start()))
        else:
            out.append(("op", m.group("op"), m.start()))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _ExprParser:
    def __init__(self, text, symbols=None):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0
        self.symbols = symbols or {}

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        t = self.tokens[self.k]
        self.k += 1
        return t

    def expect_op(self, op):
        kind, val, pos = self.advance()
        if kind != "op" or val != op:
            raise ParseError("expected %r at position %d in %r" % (op, pos, self.text))

    def parse(self):
        f = self.sum()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input at position %d in %r" % (pos, self.text))
        return f

    def sum(self):
        kind, val, _ = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.advance()
            negate = val == "-"
        f = self.product()
        if negate:
            f = -f
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                g = self.product()
                f = f - g if val == "-" else f + g
            else:
                return f

    def product(self):
        f = self.power()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                g = self.power()
                f = f * g if val == "*" else f / g
            else:
                return f

    def power(self):
        f = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            kind, ev, pos = self.advance()
            sign = 1
            if kind == "op" and ev == "-":
                sign = -1
                kind, ev, pos = self.advance()
            if kind != "num":
                raise ParseError("expected integer exponent at position %d" % pos)
            return f ** (sign * ev)
        return f

    def atom(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return rational(Fraction(val))
        if kind == "op" and val == "(":
            f = self.sum()
            self.expect_op(")")
            return f
        if kind == "op" and val == "-":
            return -self.atom()
        if kind == "name":
            nxt_kind, nxt_val, _ = self.peek()
            if val in _FUNCTIONS and nxt_kind == "op" and nxt_val == "(":
                self.advance()
                arg = self.sum()
                self.expect_op(")")
                try:
                    return _FUNCTIONS[val](arg)
                except KernelError as err:
                    raise ParseError("%s at position %d" % (err, pos))
            if val in self.symbols:
                return self.symbols[val]
            m = _COORD.match(val)
            if m:
                return coord(int(m.group(1)))
            m = _THETA.match(val)
            if m:
                return theta(int(m.group(1)))
            return param(val)
        raise ParseError("unexpected token at position %d in %r" % (pos, self.text))


def parse_expr(text, symbols=None):
    """Parse an expression in the syntax the library prints."""
    try:
        return _ExprParser(text, symbols).parse()
    except KernelError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# algebra documents

_BRACKET_LINE = re.compile(r"^\[\s*(\d+)\s*,\s*(\d+)\s*\]\s*=\s*(.*)$")


def _statements(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for piece in line.split(";"):
            piece = piece.strip()
            if piece:
                yield lineno, piece


def parse_algebra(text):
    """Parse an algebra document and return a validated LieAlgebra."""
    dim = None
    name = None
    params = []
    entries = {}
    for lineno, stmt in _statements(text):
        low = stmt.split(None, 1)
        head = low[0]
        if head == "dim":
            if dim is not None:
                raise ParseError("line %d: duplicate dim statement" % lineno)
            try:
                dim = int(low[1])
            except (IndexError, ValueError):
                raise ParseError("line %d: malformed dim statement" % lineno)
            if dim < 1:
                raise ParseError("line %d: dimension must be positive" % lineno)
        elif head == "name":
            if len(low) < 2:
                raise ParseError("line %d: malformed name statement" % lineno)
            name = low[1].strip()
        elif head == "param":
            if len(low) < 2:
                raise ParseError("line %d: malformed param statement" % lineno)
            for nm in low[1].replace(",", " ").split():
                if not re.match(r"^[A-Za-z_][A-Za-z_0-9]*$", nm):
                    raise ParseError("line %d: bad parameter name %r" % (lineno, nm))
                if nm in params:
                    raise ParseError("line %d: duplicate parameter %r" % (lineno, nm))
                params.append(nm)
        elif stmt.startswith("["):
            if dim is None:
                raise ParseError("line %d: bracket before dim statement" % lineno)
            m = _BRACKET_LINE.match(stmt)
            if not m:
                raise ParseError("line %d: malformed bracket statement" % lineno)
            i, j = int(m.group(1)), int(m.group(2))
            if not (1 <= i <= dim and 1 <= j <= dim):
                raise ParseError("line %d: index out of range" % lineno)
            if i == j:
                raise ParseError(
                    "line %d: bracket of a basis element with itself must be zero"
                    % lineno
                )
            if i > j:
                raise ParseError("line %d: list brackets with i < j only" % lineno)
            if (i, j) in entries:
                raise ParseError("line %d: duplicate bracket [%d,%d]" % (lineno, i, j))
            try:
                vec = _parse_bracket_rhs(m.group(3), dim)
            except ParseError as err:
                raise ParseError("line %d: %s" % (lineno, err))
            entries[(i, j)] = vec
        else:
            raise ParseError("line %d: unknown statement %r" % (lineno, stmt))
    if dim is None:
        raise ParseError("missing dim statement")
    g = lie_algebra(dim, entries, params=tuple(params), name=name)
    problems = validate(g)
    if problems:
        raise StructureError("; ".join(problems))
    return g


def _parse_bracket_rhs(text, dim):
    """Parse a bracket right-hand side, linear in the basis symbols e1..en."""
    if text.strip() == "0":
        return {}
    symbols = {"e%d" % k: param("_basis%d" % k) for k in range(1, dim + 1)}
    f = parse_expr(text, symbols)
    basis_atoms = {k: param_atom("_basis%d" % k) for k in range(1, dim + 1)}
    if any(a in basis_atoms.values() for a in f.den.atoms()):
        raise ParseError("basis symbols may not appear in a denominator")
    vec = {}
    for k, a in basis_atoms.items():
        c = differentiate(f, a)
        if any(b in basis_atoms.values() for b in c.atoms()):
            raise ParseError("bracket right-hand side must be linear in e1..e%d" % dim)
        if not c.is_zero():
            vec[k] = c
    rebuilt = EXPR_ZERO
    for k, c in vec.items():
        rebuilt = rebuilt + c * param("_basis%d" % k)
    if not (f - rebuilt).is_zero():
        raise ParseError("bracket right-hand side must be linear in e1..e%d" % dim)
    return vec


def _coeff_term(c, k):
    s = expr_str(c)
    if s == "1":
        return "e%d" % k
    if s == "-1":
        return "-e%d" % k
    if " " in s:
        s = "(%s)" % s
    return "%s*e%d" % (s, k)


def render_algebra(g):
    """Render an algebra as a document that parses back to the same algebra."""
    lines = []
    if g.name:
        lines.append("name %s" % g.name)
    lines.append("dim %d" % g.dim)
    if g.params:
        lines.append("param %s" % " ".join(g.params))
    for i in range(1, g.dim + 1):
        for j in range(i + 1, g.dim + 1):
            vec = g.bracket(i, j)
            terms = [
                _coeff_term(vec[k], k) for k in sorted(vec) if not vec[k].is_zero()
            ]
            if terms:
                rhs = terms[0]
                for t in terms[1:]:
                    rhs += " - " + t[1:] if t.startswith("-") else " + " + t
                lines.append("[%d,%d] = %s" % (i, j, rhs))
    return "\n".join(lines) + "\n"


def algebra_to_json(g):
    out = {"dim": g.dim}
    if g.name:
        out["name"] = g.name
    if g.params:
        out["params"] = list(g.params)
    brackets = []
    for i in range(1, g.dim + 1):
        for j in range(i + 1, g.dim + 1):
            vec = g.bracket(i, j)
            terms = [[k, expr_str(vec[k])] for k in sorted(vec) if not vec[k].is_zero()]
            if terms:
                brackets.append([i, j, terms])
    out["brackets"] = brackets
    return out


def algebra_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    dim = data["dim"]
    entries = {}
    for i, j, terms in data.get("brackets", []):
        entries[(i, j)] = {k: parse_expr(s) for k, s in terms}
    g = lie_algebra(
        dim,
        entries,
        params=tuple(data.get("params", ())),
        name=data.get("name"),
    )
    problems = validate(g)
    if problems:
        raise StructureError("; ".join(problems))
    return g


def load_algebra(text):
    """Parse an algebra from document or JSON text (auto-detected)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return algebra_from_json(stripped)
    return parse_algebra(text)


# ---------------------------------------------------------------------------
# LaTeX rendering

_HEAD_LATEX = {"log": r"\ln", "atan": r"\arctan", "cos": r"\cos", "sin": r"\sin"}

_GREEK = {
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "iota", "kappa", "lam", "lambda", "mu", "nu", "xi", "pi", "rho", "sigma",
    "tau", "phi", "chi", "psi", "omega",
}


def _atom_latex(a):
    if a.head == "x":
        return "x_{%d}" % a.data
    if a.head == "th":
        return r"\theta_{%d}" % a.data
    if a.head == "p":
        name = a.data
        m = re.match(r"^([A-Za-z]+)_?(\d+)$", name)
        if m:
            stem, sub = m.group(1), m.group(2)
            stem = "\\" + stem if stem in _GREEK else stem
            return "%s_{%s}" % (stem, sub)
        return "\\" + name if name in _GREEK else name
    return r"%s\!\left(%s\right)" % (_HEAD_LATEX[a.head], expr_latex(a.data))


def _frac_latex(q):
    if q.denominator == 1:
        return str(q.numerator)
    s = r"\tfrac{%d}{%d}" % (abs(q.numerator), q.denominator)
    return "-" + s if q.numerator < 0 else s


def _monomial_latex(m, coeff):
    parts = []
    sign = ""
    if coeff < 0:
        sign = "-"
        coeff = -coeff
    if coeff != 1 or (not m.vars and m.ep is None):
        parts.append(_frac_latex(coeff))
    for a, e in m.vars:
        s = _atom_latex(a)
        parts.append(s if e == 1 else "%s^{%d}" % (s, e))
    if m.ep is not None:
        parts.append(r"e^{%s}" % expr_latex(m.ep.as_expr()))
    return sign + " ".join(parts)


def _poly_latex(p):
    if p.is_zero:
        return "0"
    bits = []
    for m, c in p.items():
        piece = _monomial_latex(m, c)
        if not bits:
            bits.append(piece)
        elif piece.startswith("-"):
            bits.append("- " + piece[1:])
        else:
            bits.append("+ " + piece)
    return " ".join(bits)


def expr_latex(f):
    """Render an expression as LaTeX."""
    if f.den.is_one:
        return _poly_latex(f.num)
    return r"\frac{%s}{%s}" % (_poly_latex(f.num), _poly_latex(f.den))


def bracket_latex(g):
    """Non-zero commutation relations as LaTeX equations."""
    out = []
    for i in range(1, g.dim + 1):
        for j in range(i + 1, g.dim + 1):
            vec = g.bracket(i, j)
            terms = []
            for k in sorted(vec):
                c = vec[k]
                if c.is_zero():
                    continue
                s = expr_str(c)
                if s == "1":
                    terms.append("e_{%d}" % k)
                elif s == "-1":
                    terms.append("-e_{%d}" % k)
                else:
                    terms.append("%s e_{%d}" % (expr_latex(c), k))
            if terms:
                rhs = terms[0]
                for t in terms[1:]:
                    rhs += " - " + t[1:] if t.startswith("-") else " + " + t
                out.append("[e_{%d},e_{%d}] = %s" % (i, j, rhs))
    return out
