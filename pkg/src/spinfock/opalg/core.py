"""Canonical noncommutative operator polynomials.

Two algebras share one implementation:

* ``OperatorExpr`` -- operators on spinor fields in three dimensions.  A term
  is ``c * f(x, r, params) * sigma_mu * p1^b1 p2^b2 p3^b3`` with every
  coefficient and Pauli factor to the left of the momenta.  Coefficient
  monomials are ``x1^a1 x2^a2 x3^a3 r^k`` times Laurent monomials in the
  central parameters ``m, alpha, q, E``.  The relation ``r^2 = x1^2+x2^2+x3^2``
  is used to keep ``a3`` in ``{0, 1}`` (``x3^2 -> r^2 - x1^2 - x2^2``), which
  makes the term map a unique normal form.
* ``RadialOp`` -- 2x2-matrix differential operators in one variable ``r``,
  terms ``c * r^k * alpha^pa * m^pm * sigma_mu * dr^d``.

Units: hbar = 1, so ``[x_a, p_b] = i delta_ab`` and ``p_a = -i d/dx_a``.
"""
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from numbers import Rational

from .scalars import GaussianRational, I, as_scalar

__all__ = [
    "AlgebraError",
    "ContextMismatchError",
    "OperatorExpr",
    "RadialOp",
    "multiply",
    "commutator",
    "anticommutator",
    "is_zero",
    "PARAMS_3D",
    "PARAMS_RADIAL",
]

PARAMS_3D = ("m", "alpha", "q", "E")
PARAMS_RADIAL = ("alpha", "m")

ONE = GaussianRational(1)
_ZERO_F = Fraction(0)
_ONE_F = Fraction(1)

# sigma_mu * sigma_nu = phase * sigma_rho, index 0 is the identity
_PAULI = {}
for _mu in range(4):
    _PAULI[0, _mu] = (ONE, _mu)
    _PAULI[_mu, 0] = (ONE, _mu)
for _a in (1, 2, 3):
    _PAULI[_a, _a] = (ONE, 0)
for _a, _b, _c in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
    _PAULI[_a, _b] = (I, _c)
    _PAULI[_b, _a] = (-I, _c)

# (-i)^n
_MINUS_I_POW = (ONE, -I, GaussianRational(-1), I)


class AlgebraError(ValueError):
    pass


class ContextMismatchError(AlgebraError, TypeError):
    pass


# --------------------------------------------------------------------------
# coefficient monomials of the 3D algebra:
# (a1, a2, a3, k, pm, palpha, pq, pE), a3 in {0, 1} after reduction

_UNIT_MONO = (0, 0, 0, 0, 0, 0, 0, 0)


@lru_cache(maxsize=None)
def _reduce_mono(mono):
    a1, a2, a3 = mono[0], mono[1], mono[2]
    if a3 < 2:
        return ((mono, 1),)
    half, odd = divmod(a3, 2)
    rest = mono[3:]
    out = []
    # x3^(2h) = (r^2 - x1^2 - x2^2)^h
    for i in range(half + 1):
        for j in range(half - i + 1):
            l = half - i - j
            c = factorial(half) // (factorial(i) * factorial(j) * factorial(l))
            if (j + l) % 2:
                c = -c
            new = (a1 + 2 * j, a2 + 2 * l, odd, rest[0] + 2 * i) + rest[1:]
            out.append((new, c))
    return tuple(out)


@lru_cache(maxsize=None)
def _mono_mul(m1, m2):
    return _reduce_mono(tuple(u + v for u, v in zip(m1, m2)))


@lru_cache(maxsize=None)
def _partial(mono, axis):
    """d/dx_axis of a reduced monomial as ((mono, coeff), ...)."""
    acc = defaultdict(int)
    a = mono[axis]
    if a:
        lowered = list(mono)
        lowered[axis] -= 1
        acc[tuple(lowered)] += a
    k = mono[3]
    if k:
        # d r^k / dx_a = k x_a r^(k-2)
        raised = list(mono)
        raised[axis] += 1
        raised[3] -= 2
        for red, c in _reduce_mono(tuple(raised)):
            acc[red] += k * c
    return tuple((m, c) for m, c in acc.items() if c)


@lru_cache(maxsize=None)
def _derivative(mono, orders):
    """Mixed partial d^c1/dx1 d^c2/dx2 d^c3/dx3 of a monomial."""
    current = {mono: 1}
    for axis, count in enumerate(orders):
        for _ in range(count):
            nxt = defaultdict(int)
            for m, c in current.items():
                for m2, c2 in _partial(m, axis):
                    nxt[m2] += c * c2
            current = {m: c for m, c in nxt.items() if c}
    return tuple(current.items())


@lru_cache(maxsize=None)
def _key_product_3d(k1, k2):
    f1, mu1, b = k1[:8], k1[8], k1[9:]
    f2, mu2, d = k2[:8], k2[8], k2[9:]
    phase, rho = _PAULI[mu1, mu2]
    acc = {}
    # p^b g = sum_c C(b,c) (-i)^|c| (d^c g) p^(b-c)
    for c in product(range(b[0] + 1), range(b[1] + 1), range(b[2] + 1)):
        binom = comb(b[0], c[0]) * comb(b[1], c[1]) * comb(b[2], c[2])
        w0 = phase * _MINUS_I_POW[sum(c) % 4] * binom
        mom = (b[0] - c[0] + d[0], b[1] - c[1] + d[1], b[2] - c[2] + d[2])
        for g, wg in _derivative(f2, c):
            for h, wh in _mono_mul(f1, g):
                key = h + (rho,) + mom
                w = w0 * (wg * wh)
                prev = acc.get(key)
                acc[key] = w if prev is None else prev + w
    return tuple((k, w) for k, w in acc.items() if w)


@lru_cache(maxsize=None)
def _key_product_radial(k1, k2):
    r1, pa1, pm1, mu1, d1 = k1
    r2, pa2, pm2, mu2, d2 = k2
    phase, rho = _PAULI[mu1, mu2]
    out = []
    # dr^d r^k = sum_c C(d,c) k(k-1)...(k-c+1) r^(k-c) dr^(d-c)
    falling = 1
    for c in range(d1 + 1):
        if c:
            falling *= r2 - c + 1
        if not falling:
            break
        w = phase * (comb(d1, c) * falling)
        out.append(((r1 + r2 - c, pa1 + pa2, pm1 + pm2, rho, d1 - c + d2), w))
    return tuple(out)


# --------------------------------------------------------------------------


def _clean(terms):
    return {k: v for k, v in terms.items() if v}


class _Operator:
    """Shared arithmetic.  Subclasses fix the key layout and product rule."""

    __slots__ = ("terms", "_hash")
    _key_product = None
    _unit_key = None

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self.terms = {k: as_scalar(v) for k, v in terms.items() if v}
        self._hash = None

    @classmethod
    def _from_clean(cls, terms):
        obj = object.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def scalar(cls, value):
        return cls._from_clean(_clean({cls._unit_key: as_scalar(value)}))

    @classmethod
    def zero(cls):
        return cls._from_clean({})

    @classmethod
    def identity(cls):
        return cls.scalar(1)

    def _coerce(self, other):
        if isinstance(other, _Operator):
            if type(other) is not type(self):
                raise ContextMismatchError(
                    f"cannot combine {type(self).__name__} with {type(other).__name__}"
                )
            return other
        if isinstance(other, (Rational, GaussianRational, complex)):
            return self.scalar(other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            if isinstance(other, _Operator):
                raise
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            prev = out.get(k)
            out[k] = v if prev is None else prev + v
        return self._from_clean(_clean(out))

    __radd__ = __add__

    def __neg__(self):
        return self._from_clean({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = as_scalar(c)
        if not c:
            return self.zero()
        return self._from_clean({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (Rational, GaussianRational, complex)):
            return self.scale(other)
        other = self._coerce(other)
        keyprod = type(self)._key_product
        acc = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                c = c1 * c2
                for k, w in keyprod(k1, k2):
                    v = c * w
                    prev = acc.get(k)
                    acc[k] = v if prev is None else prev + v
        return self._from_clean(_clean(acc))

    def __rmul__(self, other):
        if isinstance(other, (Rational, GaussianRational, complex)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (Rational, GaussianRational, complex)):
            return self.scale(ONE / as_scalar(other))
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise AlgebraError("operator powers must be non-negative integers")
        out = self.identity()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, _Operator):
            return type(other) is type(self) and self.terms == other.terms
        if isinstance(other, (Rational, GaussianRational, complex)):
            return self.terms == self.scalar(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self.terms.items())))
        return self._hash

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def conjugate_scalars(self):
        return self._from_clean({k: v.conjugate() for k, v in self.terms.items()})

    def __repr__(self):
        return f"{type(self).__name__}({str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            parts.append(_format_term(c, self._factor_strings(key)))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


def _scalar_str(c):
    if not c.im:
        return str(c.re)
    if not c.re:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{c.im}*i"
    im = abs(c.im)
    im_s = "i" if im == 1 else f"{im}*i"
    return f"({c.re} {'+' if c.im > 0 else '-'} {im_s})"


def _format_term(c, factors):
    body = "*".join(factors)
    if not factors:
        return _scalar_str(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return _scalar_str(c) + "*" + body


def _power(name, e):
    return name if e == 1 else f"{name}^{e}"


class OperatorExpr(_Operator):
    """Operator on two-component wavefunctions over R^3.

    Keys are ``(a1, a2, a3, k, pm, palpha, pq, pE, mu, b1, b2, b3)``.
    """

    __slots__ = ()
    _key_product = staticmethod(_key_product_3d)
    _unit_key = _UNIT_MONO + (0, 0, 0, 0)

    @classmethod
    def _atom(cls, index, power=1):
        key = list(cls._unit_key)
        key[index] = power
        terms = defaultdict(int)
        for mono, c in _reduce_mono(tuple(key[:8])):
            terms[mono + tuple(key[8:])] += c
        return cls(dict(terms))

    @classmethod
    def x(cls, a, power=1):
        return cls._atom(a - 1, power)

    @classmethod
    def r(cls, k=1):
        return cls._atom(3, k)

    @classmethod
    def param(cls, name, k=1):
        return cls._atom(4 + PARAMS_3D.index(name), k)

    @classmethod
    def sigma(cls, a):
        key = list(cls._unit_key)
        key[8] = a
        return cls({tuple(key): 1})

    @classmethod
    def p(cls, a, power=1):
        key = list(cls._unit_key)
        key[8 + a] = power
        return cls({tuple(key): 1})

    def momentum_degree(self):
        return max((sum(k[9:]) for k in self.terms), default=0)

    def adjoint(self):
        """Formal adjoint: reverse products, conjugate scalars, x, p, sigma self-adjoint."""
        out = self.zero()
        for key, c in self.terms.items():
            mom = OperatorExpr._from_clean({_UNIT_MONO + (0,) + key[9:]: ONE})
            coef = OperatorExpr._from_clean({key[:9] + (0, 0, 0): c.conjugate()})
            out = out + mom * coef
        return out

    @staticmethod
    def _factor_strings(key):
        f = []
        for name, e in zip(PARAMS_3D, key[4:8]):
            if e:
                f.append(_power(name, e))
        for a in range(3):
            if key[a]:
                f.append(_power(f"x{a + 1}", key[a]))
        if key[3]:
            f.append(_power("r", key[3]))
        if key[8]:
            f.append(f"s{key[8]}")
        for a in range(3):
            if key[9 + a]:
                f.append(_power(f"p{a + 1}", key[9 + a]))
        return f


class RadialOp(_Operator):
    """2x2-matrix differential operator in r.  Keys ``(k, palpha, pm, mu, d)``."""

    __slots__ = ()
    _key_product = staticmethod(_key_product_radial)
    _unit_key = (0, 0, 0, 0, 0)

    @classmethod
    def r(cls, k=1):
        return cls({(k, 0, 0, 0, 0): 1})

    @classmethod
    def dr(cls, d=1):
        return cls({(0, 0, 0, 0, d): 1})

    @classmethod
    def sigma(cls, a):
        return cls({(0, 0, 0, a, 0): 1})

    @classmethod
    def param(cls, name, k=1):
        key = [0, 0, 0, 0, 0]
        key[1 + PARAMS_RADIAL.index(name)] = k
        return cls({tuple(key): 1})

    def derivative_order(self):
        return max((k[4] for k in self.terms), default=0)

    def adjoint(self):
        # dr^dagger = -dr on L^2(dr)
        out = self.zero()
        for (k, pa, pm, mu, d), c in self.terms.items():
            left = RadialOp._from_clean({(0, 0, 0, mu, d): ONE if d % 2 == 0 else -ONE})
            right = RadialOp._from_clean({(k, pa, pm, 0, 0): c.conjugate()})
            out = out + left * right
        return out

    @staticmethod
    def _factor_strings(key):
        k, pa, pm, mu, d = key
        f = []
        if pa:
            f.append(_power("alpha", pa))
        if pm:
            f.append(_power("m", pm))
        if k:
            f.append(_power("r", k))
        if mu:
            f.append(f"s{mu}")
        if d:
            f.append(_power("dr", d))
        return f


def multiply(a, b):
    return a * b


def commutator(a, b):
    if type(a) is not type(b):
        raise ContextMismatchError(
            f"cannot commute {type(a).__name__} with {type(b).__name__}"
        )
    return a * b - b * a


def anticommutator(a, b):
    return a * b + b * a


def _is_zero_by_clearing(op):
    """Zero test in Q[x1,x2,x3] + r*Q[x1,x2,x3].

    Multiplies by a power of r that clears every negative exponent, rewrites
    r^e as (x1^2+x2^2+x3^2)^(e//2) * r^(e%2) and expands.  The quotient ring is
    an integral domain, so multiplying by r cannot turn a nonzero element into
    zero.
    """
    if not op.terms:
        return True
    shift = max(0, -min(k[3] for k in op.terms))
    acc = defaultdict(lambda: GaussianRational(0))
    for key, c in op.terms.items():
        e = key[3] + shift
        half, parity = divmod(e, 2)
        rest = key[4:]
        for i in range(half + 1):
            for j in range(half - i + 1):
                l = half - i - j
                w = factorial(half) // (factorial(i) * factorial(j) * factorial(l))
                new = (key[0] + 2 * i, key[1] + 2 * j, key[2] + 2 * l, parity) + rest
                acc[new] = acc[new] + c * w
    return not any(acc.values())


def is_zero(op):
    """True iff ``op`` is the zero element of its algebra.

    For 3D operators the test clears negative powers of r and expands in the
    polynomial basis ``{1, r}`` over Q[x1, x2, x3], independently of the stored
    normal form.
    """
    if isinstance(op, OperatorExpr):
        return _is_zero_by_clearing(op)
    if isinstance(op, RadialOp):
        return not op.terms
    raise TypeError(f"is_zero expects an operator, got {type(op).__name__}")
