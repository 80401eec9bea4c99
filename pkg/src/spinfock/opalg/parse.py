"""Parser for the operator-expression language.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' ['-'] INT | '^' '(' ['-'] INT ')')?
    atom    := NUMBER | NAME | '(' expr ')' | '[' expr ',' expr ']'

NUMBER is an integer or a rational literal such as ``3/2``.  ``[A, B]`` is
the commutator ``A*B - B*A``.  Columns in error messages are 1-based.
"""
import re
from fractions import Fraction

from .core import OperatorExpr, RadialOp, commutator, PARAMS_3D, PARAMS_RADIAL
from .scalars import I

__all__ = ["ParseError", "parse_expr", "THREE_D", "radial"]

THREE_D = "three_d"

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class ParseError(ValueError):
    def __init__(self, message, column):
        super().__init__(f"{message} at column {column}")
        self.column = column


class radial:
    """Radial parsing context with the quantum number ``j`` fixed to a rational."""

    def __init__(self, j=None):
        self.j = None if j is None else Fraction(j)

    def __repr__(self):
        return f"radial(j={self.j})"


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1) + 1))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2) + 1))
        elif m.group(3) is not None:
            tokens.append(("op", m.group(3), m.start(3) + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text, context, names):
        self.tokens = _tokenize(text)
        self.i = 0
        self.radial = isinstance(context, radial)
        self.ctx = context
        self.cls = RadialOp if self.radial else OperatorExpr
        self.names = names or {}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] not in ("op",):
            found = tok[1] or "end of input"
            raise ParseError(f"expected '{value}', found '{found}'", tok[2])
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected '{tok[1]}'", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            node = node * self.unary()
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.power()

    def _exponent(self):
        tok = self.peek()
        paren = tok[0] == "op" and tok[1] == "("
        if paren:
            self.take()
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            sign = -1
        tok = self.take()
        if tok[0] != "num" or "/" in tok[1]:
            raise ParseError("exponent must be an integer", tok[2])
        if paren:
            self.expect(")")
        return sign * int(tok[1])

    def power(self):
        start = self.peek()
        base, invertible = self.atom()
        tok = self.peek()
        if not (tok[0] == "op" and tok[1] == "^"):
            return base
        self.take()
        e = self._exponent()
        if e >= 0:
            return base ** e
        inverse = invertible if invertible is not None else self._monomial_inverse(base)
        if inverse is None:
            raise ParseError(
                f"negative exponent on non-invertible '{start[1]}'", start[2]
            )
        return inverse ** (-e)

    def _monomial_inverse(self, op):
        """Inverse of a single term built from a scalar, r and parameters only."""
        if len(op.terms) != 1:
            return None
        (key, c), = op.terms.items()
        if self.radial:
            k, pa, pm, mu, d = key
            if mu or d:
                return None
            return self.cls({(-k, -pa, -pm, 0, 0): 1 / c})
        if any(key[:3]) or key[8] or any(key[9:]):
            return None
        inv = tuple(-v for v in key[:8]) + (0, 0, 0, 0)
        return self.cls({inv: 1 / c})

    def atom(self):
        """Returns (operator, inverse-or-None)."""
        tok = self.take()
        kind, value, col = tok
        cls = self.cls
        if kind == "num":
            if value.partition("/")[2].strip("0") == "" and "/" in value:
                raise ParseError(f"zero denominator in '{value}'", col)
            return cls.scalar(Fraction(value)), None
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node, None
        if kind == "op" and value == "[":
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            return commutator(a, b), None
        if kind == "name":
            return self._name(value, col)
        found = value or "end of input"
        raise ParseError(f"unexpected '{found}'", col)

    def _name(self, name, col):
        cls = self.cls
        if name in self.names:
            op = self.names[name]
            if not isinstance(op, cls):
                raise ParseError(f"'{name}' is not defined in this context", col)
            return op, None
        if name == "i":
            return cls.scalar(I), cls.scalar(-I)
        if name in ("s1", "s2", "s3"):
            return cls.sigma(int(name[1])), None
        if name == "r":
            return cls.r(1), cls.r(-1)
        if self.radial:
            if name == "dr":
                return cls.dr(1), None
            if name in PARAMS_RADIAL:
                return cls.param(name), cls.param(name, -1)
            if name == "j":
                if self.ctx.j is None:
                    raise ParseError("'j' used but no value supplied", col)
                return cls.scalar(self.ctx.j), None
        else:
            if name in ("x1", "x2", "x3"):
                return cls.x(int(name[1])), None
            if name in ("p1", "p2", "p3"):
                return cls.p(int(name[1])), None
            if name in PARAMS_3D:
                return cls.param(name), cls.param(name, -1)
        raise ParseError(f"unknown identifier '{name}'", col)


def parse_expr(text, context=THREE_D, names=None):
    """Parse ``text`` into a canonical ``OperatorExpr`` (or ``RadialOp`` for a
    ``radial(j)`` context).  ``names`` binds extra identifiers, e.g. model
    observables such as ``L1`` or ``H``."""
    if context != THREE_D and not isinstance(context, radial):
        raise ValueError(f"unknown context {context!r}")
    return _Parser(text, context, names).parse()
