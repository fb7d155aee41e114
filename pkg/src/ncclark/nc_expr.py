"""Parser, printer and evaluator for NC rational expressions.

Grammar (whitespace insensitive)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := number | number 'i' | 'i' | 'z'INT | '(' expr ')'
            | 'inv(' expr ')' | factor '^-1'

Variables are ``z1 .. zd``; for d = 2 the aliases ``x`` (= z1) and
``y`` (= z2) are accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArityError, DomainError, ParseError
from .nc_linalg import MatrixTuple, solve_checked, zero_tuple


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Inv:
    arg: object


_NUM_CHARS = "0123456789."


def _tokenize(text: str):
    """Yield (kind, value, position) triples."""
    i, n = 0, len(text)
    tokens = []
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch == "^":
            if text[i : i + 3] == "^-1":
                tokens.append(("inv_post", "^-1", i))
                i += 3
                continue
            raise ParseError("expected '^-1'", i)
        if ch.isdigit() or ch == ".":
            j = i
            while j < n and text[j] in _NUM_CHARS:
                j += 1
            # optional exponent part
            if j < n and text[j] in "eE" and j + 1 < n and (text[j + 1].isdigit() or text[j + 1] in "+-"):
                j += 2
                while j < n and text[j].isdigit():
                    j += 1
            lit = text[i:j]
            try:
                val = float(lit)
            except ValueError:
                raise ParseError(f"bad number literal '{lit}'", i) from None
            if j < n and text[j] == "i":
                tokens.append(("num", complex(0.0, val), i))
                j += 1
            else:
                tokens.append(("num", complex(val, 0.0), i))
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            word = text[i:j]
            if word == "inv":
                tokens.append(("inv", word, i))
            elif word == "i":
                tokens.append(("num", complex(0.0, 1.0), i))
            elif word[0] == "z" and word[1:].isdigit():
                tokens.append(("var", int(word[1:]), i))
            elif word in ("x", "y"):
                tokens.append(("alias", word, i))
            else:
                raise ParseError(f"unknown name '{word}'", i)
            i = j
            continue
        raise ParseError(f"unexpected character '{ch}'", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens, d: int):
        self.tokens = tokens
        self.pos = 0
        self.d = d

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found '{tok[1]}'", tok[2])
        self.pos += 1
        return tok

    def parse_expr(self):
        sign = None
        if self.peek()[0] in ("+", "-"):
            sign = self.take()[0]
        node = self.parse_term()
        if sign == "-":
            node = Neg(node)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.parse_term()
            node = Add(node, Neg(rhs) if op == "-" else rhs)
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek()[0] == "*":
            self.take()
            node = Mul(node, self.parse_factor())
        return node

    def parse_factor(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            node = Const(value)
        elif kind == "var":
            self.take()
            if not 1 <= value <= self.d:
                raise ArityError(f"variable z{value} outside arity d={self.d}")
            node = Var(value)
        elif kind == "alias":
            self.take()
            if self.d != 2:
                raise ParseError(f"alias '{value}' only valid for d=2", pos)
            node = Var(1 if value == "x" else 2)
        elif kind == "(":
            self.take()
            node = self.parse_expr()
            self.take(")")
        elif kind == "inv":
            self.take()
            self.take("(")
            node = Inv(self.parse_expr())
            self.take(")")
        else:
            raise ParseError(f"unexpected token '{value}'", pos)
        while self.peek()[0] == "inv_post":
            self.take()
            node = Inv(node)
        return node


def parse(text: str, d: int) -> object:
    """Parse an expression string over variables z1..zd."""
    p = _Parser(_tokenize(text), d)
    node = p.parse_expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"trailing input '{tok[1]}'", tok[2])
    return node


def _fmt_real(x: float) -> str:
    return repr(float(x))


def _fmt_const(v: complex) -> str:
    if v.imag == 0.0:
        return _fmt_real(v.real)
    if v.real == 0.0:
        return _fmt_real(v.imag) + "i"
    op = "+" if v.imag >= 0 else "-"
    return f"({_fmt_real(v.real)}{op}{_fmt_real(abs(v.imag))}i)"


def to_str(e) -> str:
    """Pretty-print an AST; parse(to_str(e)) reproduces parser output."""

    def go(node, parent_prec):
        if isinstance(node, Const):
            s = _fmt_const(node.value)
            # a leading sign only parses at expression level
            prec = 1 if s.startswith("-") else 3
        elif isinstance(node, Var):
            s, prec = f"z{node.index}", 3
        elif isinstance(node, Inv):
            s, prec = f"inv({go(node.arg, 0)})", 3
        elif isinstance(node, Neg):
            s, prec = f"-{go(node.arg, 2)}", 1
        elif isinstance(node, Add):
            right = node.right
            if isinstance(right, Neg):
                s = f"{go(node.left, 1)} - {go(right.arg, 2)}"
            else:
                s = f"{go(node.left, 1)} + {go(right, 2)}"
            prec = 1
        elif isinstance(node, Mul):
            s, prec = f"{go(node.left, 2)}*{go(node.right, 3)}", 2
        else:
            raise TypeError(f"not an AST node: {node!r}")
        return f"({s})" if prec < parent_prec else s

    return go(e, 0)


def max_var_index(e) -> int:
    if isinstance(e, Var):
        return e.index
    if isinstance(e, (Add, Mul)):
        return max(max_var_index(e.left), max_var_index(e.right))
    if isinstance(e, (Neg, Inv)):
        return max_var_index(e.arg)
    return 0


def eval_expr(e, Z: MatrixTuple) -> np.ndarray:
    """Evaluate the expression at a matrix tuple.

    Raises DomainError naming the offending subexpression when an
    Inv node is singular at Z.
    """
    k = max_var_index(e)
    if k > Z.d:
        raise ArityError(f"expression uses z{k} but Z has arity {Z.d}")
    n = Z.n
    eye = np.eye(n, dtype=complex)

    def go(node):
        if isinstance(node, Const):
            return node.value * eye
        if isinstance(node, Var):
            return Z[node.index - 1]
        if isinstance(node, Add):
            return go(node.left) + go(node.right)
        if isinstance(node, Mul):
            return go(node.left) @ go(node.right)
        if isinstance(node, Neg):
            return -go(node.arg)
        if isinstance(node, Inv):
            return solve_checked(go(node.arg), eye, what=f"inverse of {to_str(node.arg)}")
        raise TypeError(f"not an AST node: {node!r}")

    return go(e)


def regular_at_zero(e) -> bool:
    """True iff every Inv subexpression is nonsingular at the zero tuple."""
    d = max(max_var_index(e), 1)
    try:
        eval_expr(e, zero_tuple(d, 1))
    except DomainError:
        return False
    return True


def ast_to_obj(e):
    """JSON-ready dict encoding of an AST."""
    if isinstance(e, Const):
        return {"node": "const", "value": [e.value.real, e.value.imag]}
    if isinstance(e, Var):
        return {"node": "var", "index": e.index}
    if isinstance(e, Add):
        return {"node": "add", "left": ast_to_obj(e.left), "right": ast_to_obj(e.right)}
    if isinstance(e, Mul):
        return {"node": "mul", "left": ast_to_obj(e.left), "right": ast_to_obj(e.right)}
    if isinstance(e, Neg):
        return {"node": "neg", "arg": ast_to_obj(e.arg)}
    if isinstance(e, Inv):
        return {"node": "inv", "arg": ast_to_obj(e.arg)}
    raise TypeError(f"not an AST node: {e!r}")


def obj_to_ast(obj):
    kind = obj["node"]
    if kind == "const":
        re, im = obj["value"]
        return Const(complex(re, im))
    if kind == "var":
        return Var(int(obj["index"]))
    if kind == "add":
        return Add(obj_to_ast(obj["left"]), obj_to_ast(obj["right"]))
    if kind == "mul":
        return Mul(obj_to_ast(obj["left"]), obj_to_ast(obj["right"]))
    if kind == "neg":
        return Neg(obj_to_ast(obj["arg"]))
    if kind == "inv":
        return Inv(obj_to_ast(obj["arg"]))
    raise ValueError(f"unknown node kind {kind!r}")
