"""Coefficient rings and their elements.

Four kinds of rings are supported: the rationals, the integers, univariate
polynomials over the rationals and multivariate polynomials over the
rationals.  Rational numbers are ``gmpy2.mpq`` values, integers are Python
ints and polynomials are :class:`Poly` instances.

Monomials are stored as degrevlex sort keys ``(deg, -e_n, ..., -e_1)``.  That
encoding is additive (multiplying monomials is componentwise addition) and the
natural tuple order on keys is exactly the degree reverse lexicographic order,
so ``max(poly.terms)`` is the leading monomial.
"""
from __future__ import annotations

import re
from operator import add, sub

from gmpy2 import mpq

__all__ = [
    "Ring", "RationalField", "IntegerRing", "PolynomialRing", "Poly",
    "ParseError", "QQ", "ZZ", "parse_ring", "mpq",
]

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Syntax error in a ring or matrix description, with 1-based position."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


# --------------------------------------------------------------------------
# monomial helpers

def mon_from_exps(exps):
    return (sum(exps),) + tuple(-e for e in reversed(exps))


def exps_from_mon(mon):
    return tuple(-e for e in reversed(mon[1:]))


def mon_mul(a, b):
    return tuple(map(add, a, b))


def mon_div(a, b):
    return tuple(map(sub, a, b))


def mon_divides(a, b):
    """True if monomial ``a`` divides ``b``."""
    # in key form larger exponents are more negative
    for x, y in zip(a[1:], b[1:]):
        if x < y:
            return False
    return True


def mon_lcm(a, b):
    tail = tuple(map(min, a[1:], b[1:]))
    return (-sum(tail),) + tail


# --------------------------------------------------------------------------
# polynomials

class Poly:
    """Immutable polynomial with rational coefficients.

    ``terms`` maps monomial keys to nonzero ``mpq`` coefficients.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, ring, c):
        c = mpq(c)
        if not c:
            return cls(ring, {})
        return cls(ring, {ring.one_mon: c})

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, type(mpq(0)))):
            return Poly.const(self.ring, other)
        return NotImplemented

    # queries ------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        t = self.terms
        return not t or (len(t) == 1 and self.ring.one_mon in t)

    def constant_value(self):
        return self.terms.get(self.ring.one_mon, mpq(0))

    def lm(self):
        return max(self.terms)

    def lc(self):
        return self.terms[max(self.terms)]

    def degree(self):
        if not self.terms:
            return -1
        return max(m[0] for m in self.terms)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m)
            if v is None:
                t[m] = c
            else:
                v = v + c
                if v:
                    t[m] = v
                else:
                    del t[m]
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, type(mpq(0)))):
                if not other:
                    return Poly(self.ring, {})
                return Poly(self.ring, {m: c * other for m, c in self.terms.items()})
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly(self.ring, {})
        if len(a) < len(b):
            a, b = b, a
        t = {}
        get = t.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(map(add, ma, mb))
                v = get(m)
                if v is None:
                    t[m] = ca * cb
                else:
                    t[m] = v + ca * cb
        return Poly(self.ring, {m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative exponent")
        result = Poly.const(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        return self * c

    def mul_term(self, mon, c):
        return Poly(self.ring, {tuple(map(add, m, mon)): v * c for m, v in self.terms.items()})

    # univariate division (only used by the QQ[x] backend) ---------------
    def divmod_univariate(self, other):
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        ring = self.ring
        r = dict(self.terms)
        q = {}
        dm = max(other.terms)
        dc = other.terms[dm]
        dd = dm[0]
        while r:
            m = max(r)
            if m[0] < dd:
                break
            c = r[m] / dc
            qm = (m[0] - dd, -(m[0] - dd))
            q[qm] = c
            for om, oc in other.terms.items():
                k = (om[0] + qm[0], om[1] + qm[1])
                v = r.get(k, 0) - c * oc
                if v:
                    r[k] = v
                else:
                    r.pop(k, None)
        return Poly(ring, q), Poly(ring, r)

    def exact_div(self, other):
        """Exact multivariate division; raises ValueError if not exact."""
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        r = dict(self.terms)
        q = {}
        dm = max(other.terms)
        dc = other.terms[dm]
        while r:
            m = max(r)
            if not mon_divides(dm, m):
                raise ValueError("division is not exact")
            qm = tuple(map(sub, m, dm))
            c = r[m] / dc
            q[qm] = c
            for om, oc in other.terms.items():
                k = tuple(map(add, om, qm))
                v = r.get(k, 0) - c * oc
                if v:
                    r[k] = v
                else:
                    r.pop(k, None)
        return Poly(self.ring, q)

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, type(mpq(0)))):
            if not other:
                return not self.terms
            return self.terms == {self.ring.one_mon: other}
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        h = self._hash
        if h is None:
            if not self.terms:
                h = hash(0)
            elif len(self.terms) == 1 and self.ring.one_mon in self.terms:
                h = hash(self.terms[self.ring.one_mon])
            else:
                h = hash(frozenset(self.terms.items()))
            self._hash = h
        return h

    def __repr__(self):
        return self.ring.format(self)

    __str__ = __repr__

    def evaluate(self, values):
        """Evaluate at rational values, one per variable."""
        total = mpq(0)
        for m, c in self.terms.items():
            v = c
            for e, x in zip(exps_from_mon(m), values):
                if e:
                    v *= mpq(x) ** e
            total += v
        return total


# --------------------------------------------------------------------------
# rings

class Ring:
    """Base class for coefficient rings."""

    name = "?"
    variables: tuple = ()
    is_field = False
    is_euclidean = True

    def __eq__(self, other):
        return isinstance(other, Ring) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return self.name

    def __str__(self):
        return self.name

    # the methods below are overridden
    def coerce(self, v):  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def is_unit(self, a):  # pragma: no cover - abstract
        raise NotImplementedError

    def parse(self, text):
        return _ExprParser(self, text).parse_single()

    def format(self, a):
        return _format_rational(a)


def _format_rational(c):
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class RationalField(Ring):
    name = "QQ"
    is_field = True

    def coerce(self, v):
        if isinstance(v, str):
            return self.parse(v)
        return mpq(v)

    def is_unit(self, a):
        return a != 0

    def unit_inverse(self, a):
        return 1 / mpq(a)

    # euclidean structure
    def quo_rem(self, a, b):
        return a / b, mpq(0)

    def normal_unit(self, a):
        """Unit u such that u*a is the normalized associate of a."""
        return 1 / a

    def euclid_size(self, a):
        return 0


class IntegerRing(Ring):
    name = "ZZ"

    def coerce(self, v):
        if isinstance(v, str):
            return self.parse(v)
        if isinstance(v, int):
            return v
        q = mpq(v)
        if q.denominator != 1:
            raise ValueError(f"{v} is not an integer")
        return int(q.numerator)

    def is_unit(self, a):
        return a == 1 or a == -1

    def unit_inverse(self, a):
        return a

    def quo_rem(self, a, b):
        q, r = divmod(a, b)
        if b < 0 and r:
            # keep the remainder nonnegative
            q += 1
            r -= b
        return q, r

    def normal_unit(self, a):
        return -1 if a < 0 else 1

    def euclid_size(self, a):
        return abs(a)

    def format(self, a):
        return str(a)


class PolynomialRing(Ring):
    """Polynomials over QQ in the given variables."""

    def __init__(self, variables):
        variables = tuple(variables)
        if not variables:
            raise ValueError("a polynomial ring needs at least one variable")
        for v in variables:
            if not _IDENT.match(v):
                raise ValueError(f"bad variable name {v!r}")
        if len(set(variables)) != len(variables):
            raise ValueError("variable names must be distinct")
        self.variables = variables
        self.nvars = len(variables)
        self.name = "QQ[" + ",".join(variables) + "]"
        self.is_euclidean = self.nvars == 1
        self.one_mon = (0,) * (self.nvars + 1)
        self._zero = Poly(self, {})
        self._one = Poly(self, {self.one_mon: mpq(1)})

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    def var(self, name_or_index):
        i = name_or_index if isinstance(name_or_index, int) else self.variables.index(name_or_index)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {mon_from_exps(e): mpq(1)})

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps, c=1):
        c = mpq(c)
        if not c:
            return self._zero
        return Poly(self, {mon_from_exps(tuple(exps)): c})

    def coerce(self, v):
        if isinstance(v, Poly):
            if v.ring is self or v.ring == self:
                return v if v.ring is self else Poly(self, dict(v.terms))
            raise ValueError(f"{v} is not in {self}")
        if isinstance(v, str):
            return self.parse(v)
        return Poly.const(self, v)

    def is_unit(self, a):
        return bool(a.terms) and a.is_constant()

    def unit_inverse(self, a):
        return Poly.const(self, 1 / a.constant_value())

    # euclidean structure (univariate only)
    def quo_rem(self, a, b):
        return a.divmod_univariate(b)

    def normal_unit(self, a):
        return Poly.const(self, 1 / a.lc())

    def euclid_size(self, a):
        return a.degree()

    def format(self, a):
        if not a.terms:
            return "0"
        parts = []
        for m in sorted(a.terms, reverse=True):
            c = a.terms[m]
            exps = exps_from_mon(m)
            factors = []
            for v, e in zip(self.variables, exps):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            mono = "*".join(factors)
            neg = c < 0
            ac = -c if neg else c
            if not mono:
                body = _format_rational(ac)
            elif ac == 1:
                body = mono
            else:
                body = _format_rational(ac) + "*" + mono
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("-" if neg else "+") + body)
        return "".join(parts)


QQ = RationalField()
ZZ = IntegerRing()

_RING_CACHE = {"QQ": QQ, "ZZ": ZZ}


def parse_ring(text):
    """Parse ``QQ``, ``ZZ``, ``QQ[x]`` or ``QQ[x,y,z]``."""
    s = text.strip()
    if s in _RING_CACHE:
        return _RING_CACHE[s]
    m = re.fullmatch(r"QQ\s*\[(.*)\]", s)
    if not m:
        raise ParseError(f"unknown ring {text!r}")
    names = [v.strip() for v in m.group(1).split(",")]
    for v in names:
        if not _IDENT.match(v):
            raise ParseError(f"bad variable name {v!r} in ring {text!r}")
    try:
        ring = PolynomialRing(names)
    except ValueError as e:
        raise ParseError(str(e)) from None
    return _RING_CACHE.setdefault(ring.name, ring)


# --------------------------------------------------------------------------
# expression parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


class _ExprParser:
    """Recursive descent parser for ring elements.

    Grammar: expr := ['+'|'-'] term (('+'|'-') term)*;
    term := power ('*' power | '/' power)*; power := atom ['^' int];
    atom := int | variable | '(' expr ')'.
    """

    def __init__(self, ring, text, line=1, column=1):
        self.ring = ring
        self.text = text
        self.line0 = line
        self.col0 = column
        self.tokens = []
        pos = 0
        n = len(text)
        while pos < n:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                break
            if m.group(0).strip() == "":
                break
            start = m.start(m.lastindex)
            if m.group(1) is not None:
                self.tokens.append(("int", m.group(1), start))
            elif m.group(2) is not None:
                self.tokens.append(("name", m.group(2), start))
            else:
                self.tokens.append(("op", m.group(3), start))
            pos = m.end()
        self.i = 0

    def error(self, msg, offset=None):
        if offset is None:
            offset = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        prefix = self.text[:offset]
        line = self.line0 + prefix.count("\n")
        if "\n" in prefix:
            col = offset - prefix.rfind("\n")
        else:
            col = self.col0 + offset
        raise ParseError(msg, line, col)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse_single(self):
        if not self.tokens:
            self.error("empty expression")
        v = self.expr()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return v

    def expr(self):
        ring = self.ring
        sign = 1
        t = self.peek()
        if t and t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        v = self.term()
        if sign < 0:
            v = -v
        while True:
            t = self.peek()
            if t and t[0] == "op" and t[1] in "+-":
                self.take()
                w = self.term()
                v = v + w if t[1] == "+" else v - w
            else:
                return v if v is not None else ring.zero

    def term(self):
        v = self.power()
        while True:
            t = self.peek()
            if t and t[0] == "op" and t[1] == "*":
                self.take()
                v = v * self.power()
            elif t and t[0] == "op" and t[1] == "/":
                self.take()
                start = self.peek()[2] if self.peek() else len(self.text)
                d = self.power()
                v = self._divide(v, d, start)
            else:
                return v

    def _divide(self, v, d, offset):
        ring = self.ring
        if isinstance(ring, PolynomialRing):
            if not d.is_constant() or d.is_zero():
                self.error("division only by nonzero constants", offset)
            return v * (1 / d.constant_value())
        if d == 0:
            self.error("division by zero", offset)
        if isinstance(ring, IntegerRing):
            if v % d:
                self.error("non-integral quotient in ZZ", offset)
            return v // d
        return mpq(v) / mpq(d)

    def power(self):
        v = self.atom()
        t = self.peek()
        if t and t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e is None or e[0] != "int":
                self.i -= 1 if e is None else 1
                self.error("exponent must be a nonnegative integer")
            v = v ** int(e[1])
        return v

    def atom(self):
        ring = self.ring
        t = self.take()
        if t is None:
            self.i -= 1
            self.error("unexpected end of expression")
        kind, val, off = t
        if kind == "int":
            return ring.coerce(int(val))
        if kind == "name":
            if val in ring.variables:
                return ring.var(val)
            self.i -= 1
            self.error(f"unknown variable {val!r}")
        if val == "(":
            v = self.expr()
            t = self.take()
            if t is None or t[1] != ")":
                self.i -= 1
                self.error("expected ')'")
            return v
        self.i -= 1
        self.error(f"unexpected {val!r}")
