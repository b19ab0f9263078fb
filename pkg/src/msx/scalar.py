"""Exact multivariate polynomials and rational functions over Q.

Coefficients are ``int`` or :class:`fractions.Fraction` (integral fractions are
stored as ``int``).  A monomial is a tuple of ``(variable, exponent)`` pairs
sorted by variable name, so polynomials over different variable sets combine
without any alignment step.

Rational functions are kept as an unreduced numerator/denominator pair.  Only
cheap reductions are applied: constant denominators are folded into the
numerator, shared monomial factors are divided out, exact polynomial quotients
are detected, and the denominator is made monic.  Equality is decided by
cross-multiplication.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DivisionByZero, PoleAtPoint

__all__ = ["Polynomial", "Scalar", "const", "var", "as_rational", "ONE", "ZERO"]


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def as_rational(value) -> Fraction | int:
    """Coerce ints, Fractions and integral strings like ``"3/4"`` to an exact rational."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return _norm(value)
    if isinstance(value, str):
        return _norm(Fraction(value))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def _mono_div(a, b):
    """Return a/b if b divides a, else None."""
    if not b:
        return a
    da = dict(a)
    for v, e in b:
        have = da.get(v, 0)
        if have < e:
            return None
        if have == e:
            del da[v]
        else:
            da[v] = have - e
    return tuple(sorted(da.items()))


def _mono_degree(m):
    return sum(e for _, e in m)


def _order_key(m):
    # ascending key == descending graded-lex with variables ordered by name
    return (-_mono_degree(m), tuple((v, -e) for v, e in m))


class Polynomial:
    """Sparse polynomial with exact rational coefficients.

    ``terms`` maps monomials to nonzero coefficients.  Instances are treated as
    immutable once built.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = terms if terms is not None else {}

    @classmethod
    def from_terms(cls, items: Iterable) -> "Polynomial":
        """Build from ``(monomial-mapping-or-pairs, coefficient)`` items, merging duplicates."""
        acc: dict = {}
        for mono, c in items:
            pairs = mono.items() if isinstance(mono, Mapping) else mono
            key = tuple(sorted((v, e) for v, e in pairs if e))
            for _, e in key:
                if e < 0:
                    raise ValueError("negative exponents are not polynomial")
            acc[key] = acc.get(key, 0) + as_rational(c)
        return cls({m: _norm(c) for m, c in acc.items() if c != 0})

    @classmethod
    def constant(cls, c) -> "Polynomial":
        c = as_rational(c)
        return cls({(): c} if c != 0 else {})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(()) == 1

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), 0)

    @property
    def variables(self) -> tuple:
        seen = set()
        for m in self.terms:
            for v, _ in m:
                seen.add(v)
        return tuple(sorted(seen))

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=-1)

    def leading(self):
        m = min(self.terms, key=_order_key)
        return m, self.terms[m]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = _norm(s + c)
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial()
        if len(a) == 1 and () in a:
            return other.scale(a[()])
        if len(b) == 1 and () in b:
            return self.scale(b[()])
        out: dict = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial({m: _norm(c) for m, c in out.items() if c != 0})

    def scale(self, c) -> "Polynomial":
        if c == 0:
            return Polynomial()
        if c == 1:
            return self
        return Polynomial({m: _norm(v * c) for m, v in self.terms.items()})

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def partial(self, name: str) -> "Polynomial":
        out: dict = {}
        for m, c in self.terms.items():
            for idx, (v, e) in enumerate(m):
                if v == name:
                    if e == 1:
                        nm = m[:idx] + m[idx + 1:]
                    else:
                        nm = m[:idx] + ((v, e - 1),) + m[idx + 1:]
                    out[nm] = out.get(nm, 0) + c * e
                    break
        return Polynomial({m: _norm(c) for m, c in out.items() if c != 0})

    def evaluate(self, point: Mapping[str, object]):
        total = 0
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                try:
                    t = t * point[v] ** e
                except KeyError:
                    raise ValueError(f"no value given for variable {v!r}") from None
            total += t
        return _norm(Fraction(total)) if not isinstance(total, int) else total

    def exact_div(self, other: "Polynomial") -> "Polynomial | None":
        """Quotient self/other when the division is exact in Q[vars], else None."""
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        if other.is_constant():
            return self.scale(Fraction(1) / other.terms[()])
        lm_b, lc_b = other.leading()
        rem = self
        quot: dict = {}
        # each step removes the current leading monomial, so this terminates
        while rem.terms:
            lm_r, lc_r = rem.leading()
            t = _mono_div(lm_r, lm_b)
            if t is None:
                return None
            c = _norm(Fraction(lc_r) / lc_b)
            quot[t] = c
            rem = rem - Polynomial({t: c}) * other
        return Polynomial(quot)

    def monomial_gcd(self):
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        try:
            first = dict(next(it))
        except StopIteration:
            return ()
        for m in it:
            dm = dict(m)
            for v in list(first):
                e = min(first[v], dm.get(v, 0))
                if e:
                    first[v] = e
                else:
                    del first[v]
            if not first:
                return ()
        return tuple(sorted(first.items()))

    def div_monomial(self, mono) -> "Polynomial":
        if not mono:
            return self
        return Polynomial({_mono_div(m, mono): c for m, c in self.terms.items()})

    # -- rendering --------------------------------------------------------

    def sorted_terms(self, order: Sequence[str] | None = None) -> list:
        """Terms in graded-lex order with respect to ``order`` (extra variables sort after, by name)."""
        rank = {v: i for i, v in enumerate(order or ())}
        extra = sorted({v for m in self.terms for v, _ in m if v not in rank})
        for v in extra:
            rank[v] = len(rank)
        width = len(rank)

        def key(m):
            vec = [0] * width
            for v, e in m:
                vec[rank[v]] = e
            return (-_mono_degree(m), [-e for e in vec])

        return [(m, self.terms[m]) for m in sorted(self.terms, key=key)]

    def render(self, order: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        rank = {v: i for i, v in enumerate(order or ())}
        pieces = []
        for m, c in self.sorted_terms(order):
            mono = "*".join(
                v if e == 1 else f"{v}^{e}"
                for v, e in sorted(m, key=lambda ve: (rank.get(ve[0], len(rank)), ve[0]))
            )
            neg = c < 0
            mag = -c if neg else c
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not pieces:
                pieces.append(f"-{body}" if neg else body)
            else:
                pieces.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self.render()!r})"


_ONE_POLY = Polynomial({(): 1})


def _lift(x) -> "Scalar":
    if isinstance(x, Scalar):
        return x
    if isinstance(x, Polynomial):
        return Scalar(x)
    return Scalar(Polynomial.constant(x))


class Scalar:
    """Element of the rational function field Q(vars), stored as num/den."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None or den.is_one():
            self.num, self.den = num, _ONE_POLY
            return
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            self.num, self.den = num, _ONE_POLY
            return
        if den.is_constant():
            self.num, self.den = num.scale(Fraction(1) / den.terms[()]), _ONE_POLY
            return
        g = num.monomial_gcd()
        if g:
            gd = den.monomial_gcd()
            common = tuple((v, min(e, dict(gd).get(v, 0))) for v, e in g)
            common = tuple((v, e) for v, e in common if e)
            if common:
                num = num.div_monomial(common)
                den = den.div_monomial(common)
                if den.is_constant():
                    self.num, self.den = num.scale(Fraction(1) / den.terms[()]), _ONE_POLY
                    return
        q = num.exact_div(den)
        if q is not None:
            self.num, self.den = q, _ONE_POLY
            return
        lc = den.leading()[1]
        if lc != 1:
            inv = Fraction(1) / lc
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def _raw(cls, num, den=_ONE_POLY):
        s = object.__new__(cls)
        s.num = num
        s.den = den
        return s

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num.terms

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("scalar is not constant")
        return _norm(Fraction(self.num.constant_value()) / self.den.constant_value())

    @property
    def variables(self) -> tuple:
        if self.den.is_one():
            return self.num.variables
        return tuple(sorted(set(self.num.variables) | set(self.den.variables)))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = _lift(other)
        if self.den.is_one() and other.den.is_one():
            return Scalar._raw(self.num + other.num)
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw(-self.num, self.den)

    def __sub__(self, other) -> "Scalar":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Scalar":
        return _lift(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        if not isinstance(other, (Scalar, Polynomial)):
            c = as_rational(other)
            return Scalar._raw(self.num.scale(c), self.den) if c else Scalar._raw(Polynomial())
        other = _lift(other)
        if self.den.is_one() and other.den.is_one():
            return Scalar._raw(self.num * other.num)
        return Scalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        other = _lift(other)
        if other.is_zero():
            raise DivisionByZero("division by the zero scalar")
        if other.num.is_constant() and other.den.is_one():
            return Scalar._raw(self.num.scale(Fraction(1) / other.num.terms[()]), self.den)
        return Scalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "Scalar":
        return _lift(other) / self

    def __pow__(self, e: int) -> "Scalar":
        if e < 0:
            if self.is_zero():
                raise DivisionByZero("negative power of zero")
            return Scalar(self.den ** (-e), self.num ** (-e))
        if self.den.is_one():
            return Scalar._raw(self.num ** e)
        return Scalar(self.num ** e, self.den ** e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Scalar, Polynomial, int, Fraction)):
            return NotImplemented
        other = _lift(other)
        if self.den.is_one() and other.den.is_one():
            return self.num.terms == other.num.terms
        return (self.num * other.den).terms == (other.num * self.den).terms

    __hash__ = None

    # -- calculus and evaluation -----------------------------------------

    def partial(self, name: str) -> "Scalar":
        if self.den.is_one():
            return Scalar._raw(self.num.partial(name))
        dn = self.num.partial(name)
        dd = self.den.partial(name)
        if dd.is_zero():
            return Scalar(dn, self.den)
        return Scalar(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Mapping[str, object]):
        d = self.den.evaluate(point)
        if d == 0:
            raise PoleAtPoint("denominator vanishes at the point")
        n = self.num.evaluate(point)
        if d == 1:
            return n
        return _norm(Fraction(n) / d)

    def substitute(self, mapping: Mapping[str, "Scalar"]) -> "Scalar":
        """Replace variables by scalars; unmapped variables are left alone."""
        num = _subst_poly(self.num, mapping)
        if self.den.is_one():
            return num
        den = _subst_poly(self.den, mapping)
        if den.is_zero():
            raise DivisionByZero("denominator vanishes identically after substitution")
        return num / den

    # -- rendering --------------------------------------------------------

    def render(self, order: Sequence[str] | None = None) -> str:
        if self.den.is_one():
            return self.num.render(order)
        return f"({self.num.render(order)})/({self.den.render(order)})"

    def __repr__(self) -> str:
        return f"Scalar({self.render()!r})"


def _subst_poly(p: Polynomial, mapping: Mapping[str, Scalar]) -> Scalar:
    powers: dict = {}

    def power(v, e):
        key = (v, e)
        got = powers.get(key)
        if got is None:
            base = mapping.get(v)
            base = _lift(base) if base is not None else Scalar._raw(Polynomial.variable(v))
            got = base if e == 1 else base ** e
            powers[key] = got
        return got

    all_poly = all(
        (v not in mapping) or _lift(mapping[v]).den.is_one()
        for m in p.terms for v, _ in m
    )
    if all_poly:
        acc = Polynomial()
        for m, c in p.terms.items():
            t = Polynomial({(): c})
            for v, e in m:
                t = t * power(v, e).num
            acc = acc + t
        return Scalar._raw(acc)
    total = Scalar._raw(Polynomial())
    for m, c in p.terms.items():
        t = Scalar._raw(Polynomial({(): c}))
        for v, e in m:
            t = t * power(v, e)
        total = total + t
    return total


ONE = Scalar._raw(_ONE_POLY)
ZERO = Scalar._raw(Polynomial())


def const(c) -> Scalar:
    return Scalar._raw(Polynomial.constant(c))


def var(name: str) -> Scalar:
    return Scalar._raw(Polynomial.variable(name))
