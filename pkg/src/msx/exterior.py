"""Charts, vector-valued differential forms and vector fields.

A :class:`VForm` of form degree ``p`` and value degree ``r`` is a sum of terms

    c * dq^{a_1} ^ ... ^ dq^{a_p}  (x)  R_{m_1} ^ ... ^ R_{m_r}

with both index lists strictly increasing.  Form indices are positions in the
chart's coordinate list; value indices are model-space indices ``1..n+k``
where ``1..n`` is the horizontal block and ``n+1..n+k`` the vertical block.
Wedge products carry the sign ``(-1)^(p q + r s)`` under commutation.

Variables appearing in coefficients that are not chart coordinates are treated
as constant parameters by :func:`ext_d`.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    ChartMismatch,
    DegreeMismatch,
    DegreeZero,
    DivisionByZero,
    PoleAtSubstitution,
)
from .scalar import ONE, ZERO, Polynomial, Scalar, as_rational, const

__all__ = [
    "ROLES",
    "Chart",
    "VForm",
    "VField",
    "ChartMap",
    "TangentVector",
    "sort_with_sign",
    "wedge",
    "ext_d",
    "interior",
    "lie_derivative",
    "pullback",
    "pushforward",
    "wedge_power",
    "pair_value",
]

ROLES = ("base", "fiber", "momentum", "frame")


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, Polynomial):
        return Scalar(x)
    return const(x)


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple
    n: int
    k: int
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = [c for c, _ in self.coords]
        if len(set(names)) != len(names):
            raise ValueError("coordinate names must be unique")
        for _, role in self.coords:
            if role not in ROLES:
                raise ValueError(f"unknown coordinate role {role!r}")
        if self.n < 1 or self.k < 0:
            raise ValueError("chart needs n >= 1 and k >= 0")
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(names)})

    @property
    def names(self) -> tuple:
        return tuple(c for c, _ in self.coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a coordinate of {self.name}") from None

    def has(self, name: str) -> bool:
        return name in self._index

    def with_role(self, role: str) -> tuple:
        return tuple(c for c, r in self.coords if r == role)

    def __str__(self) -> str:
        return self.name


def _same_chart(a: Chart, b: Chart) -> None:
    if a is not b and a != b:
        raise ChartMismatch(f"{a.name} vs {b.name}")


def sort_with_sign(seq: Iterable[int]):
    """Sort distinct indices, returning ``(sorted_tuple, sign)`` or ``(None, 0)`` on repeats."""
    items = list(seq)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and items[j - 1] == items[j]:
            return None, 0
    for i in range(1, len(items)):
        if items[i - 1] == items[i]:
            return None, 0
    return tuple(items), sign


def _merge(a: tuple, b: tuple):
    """Concatenate two sorted index tuples and sort, tracking the sign."""
    if not a:
        return b, 1
    if not b:
        return a, 1
    inversions = 0
    for x in a:
        pos = bisect_left(b, x)
        if pos < len(b) and b[pos] == x:
            return None, 0
        inversions += pos
    return tuple(sorted(a + b)), (-1 if inversions & 1 else 1)


class VForm:
    """A differential form with values in an exterior power of R^(n+k)."""

    __slots__ = ("chart", "p", "r", "terms")

    def __init__(self, chart: Chart, p: int, r: int, terms: dict | None = None):
        self.chart = chart
        self.p = p
        self.r = r
        self.terms = terms if terms is not None else {}

    # -- construction -----------------------------------------------------

    @classmethod
    def from_terms(cls, chart: Chart, p: int, r: int, items: Iterable) -> "VForm":
        """Build from ``(form_coords, value_indices, coeff)`` triples in any order.

        ``form_coords`` may be coordinate names or positions; unsorted indices
        are sorted with the permutation sign absorbed into the coefficient.
        """
        acc: dict = {}
        for form, value, coeff in items:
            pos = [chart.index(f) if isinstance(f, str) else int(f) for f in form]
            if len(pos) != p or len(value) != r:
                raise DegreeMismatch("term does not match the declared degrees")
            fs, s1 = sort_with_sign(pos)
            vs, s2 = sort_with_sign(value)
            if fs is None or vs is None:
                continue
            c = as_scalar(coeff)
            if s1 * s2 < 0:
                c = -c
            key = (fs, vs)
            acc[key] = acc[key] + c if key in acc else c
        return cls(chart, p, r, {k: v for k, v in acc.items() if not v.is_zero()})

    @classmethod
    def zero(cls, chart: Chart, p: int = 0, r: int = 0) -> "VForm":
        return cls(chart, p, r, {})

    @classmethod
    def function(cls, chart: Chart, coeff, value: Sequence[int] = ()) -> "VForm":
        return cls.from_terms(chart, 0, len(value), [((), tuple(value), coeff)])

    @classmethod
    def differential(cls, chart: Chart, name: str) -> "VForm":
        return cls(chart, 1, 0, {((chart.index(name),), ()): ONE})

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, form: Sequence, value: Sequence[int] = ()) -> Scalar:
        pos = [self.chart.index(f) if isinstance(f, str) else int(f) for f in form]
        fs, s1 = sort_with_sign(pos)
        vs, s2 = sort_with_sign(value)
        if fs is None or vs is None:
            return ZERO
        c = self.terms.get((fs, vs), ZERO)
        return c if s1 * s2 > 0 else -c

    def value_components(self) -> dict:
        """Split by value index: ``{value_tuple: VForm of value degree 0}``."""
        out: dict = {}
        for (f, v), c in self.terms.items():
            out.setdefault(v, {})[(f, ())] = c
        return {v: VForm(self.chart, self.p, 0, t) for v, t in out.items()}

    # -- linear structure -------------------------------------------------

    def _check(self, other: "VForm") -> None:
        _same_chart(self.chart, other.chart)
        if (self.p, self.r) != (other.p, other.r) and self.terms and other.terms:
            raise DegreeMismatch(
                f"cannot add degrees ({self.p},{self.r}) and ({other.p},{other.r})"
            )

    def __add__(self, other: "VForm") -> "VForm":
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key)
            if s is None:
                out[key] = c
            else:
                s = s + c
                if s.is_zero():
                    del out[key]
                else:
                    out[key] = s
        return VForm(self.chart, self.p, self.r, out)

    def __neg__(self) -> "VForm":
        return VForm(self.chart, self.p, self.r, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "VForm") -> "VForm":
        return self + (-other)

    def __mul__(self, s) -> "VForm":
        if isinstance(s, VForm):
            return NotImplemented
        s = as_scalar(s)
        if s.is_zero():
            return VForm(self.chart, self.p, self.r, {})
        return VForm(self.chart, self.p, self.r, {k: c * s for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VForm):
            return NotImplemented
        if self.chart != other.chart:
            return False
        if self.terms and other.terms and (self.p, self.r) != (other.p, other.r):
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[k] for k, c in self.terms.items())

    __hash__ = None

    # -- evaluation and rendering ----------------------------------------

    def evaluate(self, point: Mapping[str, object]) -> "VForm":
        """Freeze every coefficient at a point, giving constant coefficients."""
        out = {}
        for key, c in self.terms.items():
            v = c.evaluate(point)
            if v != 0:
                out[key] = const(v)
        return VForm(self.chart, self.p, self.r, out)

    def substitute(self, mapping: Mapping[str, Scalar]) -> "VForm":
        """Substitute into coefficients only (no change of the form basis)."""
        out = {}
        for key, c in self.terms.items():
            v = c.substitute(mapping)
            if not v.is_zero():
                out[key] = v
        return VForm(self.chart, self.p, self.r, out)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def render(self) -> str:
        if not self.terms:
            return "0"
        names = self.chart.names
        pieces = []
        for (f, v), c in self.sorted_terms():
            basis = "^".join("d" + names[i] for i in f)
            if v:
                basis = (basis + " " if basis else "") + "@R(" + ",".join(map(str, v)) + ")"
            coeff = c.render(names)
            if not basis:
                pieces.append(f"({coeff})")
            elif coeff == "1":
                pieces.append(basis)
            else:
                pieces.append(f"({coeff})*{basis}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"VForm<{self.chart.name}; p={self.p}, r={self.r}>[{self.render()}]"


class VField:
    """A vector field on a chart; zero components are not stored."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Mapping[str, object] | None = None):
        self.chart = chart
        comps = {}
        for name, c in (components or {}).items():
            chart.index(name)
            s = as_scalar(c)
            if not s.is_zero():
                comps[name] = s
        self.components = comps

    def component(self, name: str) -> Scalar:
        return self.components.get(name, ZERO)

    def is_zero(self) -> bool:
        return not self.components

    def apply(self, f) -> Scalar:
        """Directional derivative X(f) of a scalar."""
        f = as_scalar(f)
        total = ZERO
        for name, c in self.components.items():
            d = f.partial(name)
            if not d.is_zero():
                total = total + c * d
        return total

    def bracket(self, other: "VField") -> "VField":
        """Lie bracket [X, Y]^m = X(Y^m) - Y(X^m)."""
        _same_chart(self.chart, other.chart)
        out = {}
        for name in self.chart.names:
            val = self.apply(other.component(name)) - other.apply(self.component(name))
            if not val.is_zero():
                out[name] = val
        return VField(self.chart, out)

    def __add__(self, other: "VField") -> "VField":
        _same_chart(self.chart, other.chart)
        out = dict(self.components)
        for name, c in other.components.items():
            out[name] = out[name] + c if name in out else c
        return VField(self.chart, out)

    def __neg__(self) -> "VField":
        return VField(self.chart, {k: -c for k, c in self.components.items()})

    def __sub__(self, other: "VField") -> "VField":
        return self + (-other)

    def __mul__(self, s) -> "VField":
        s = as_scalar(s)
        return VField(self.chart, {k: c * s for k, c in self.components.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VField):
            return NotImplemented
        if self.chart != other.chart or self.components.keys() != other.components.keys():
            return False
        return all(c == other.components[k] for k, c in self.components.items())

    __hash__ = None

    def restrict(self, names: Iterable[str]) -> dict:
        keep = set(names)
        return {k: c for k, c in self.components.items() if k in keep}

    def evaluate(self, point: Mapping[str, object]) -> dict:
        return {k: c.evaluate(point) for k, c in self.components.items()}

    def render(self) -> str:
        if not self.components:
            return "0"
        names = self.chart.names
        parts = []
        for name in names:
            if name in self.components:
                parts.append(f"({self.components[name].render(names)})*d/d{name}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"VField<{self.chart.name}>[{self.render()}]"


@dataclass(frozen=True)
class TangentVector:
    """A vector at a single point: base coordinates and components, all exact rationals."""

    chart: Chart
    base: dict
    components: dict

    def __eq__(self, other) -> bool:
        if not isinstance(other, TangentVector):
            return NotImplemented
        nz = lambda d: {k: v for k, v in d.items() if v != 0}
        return (self.chart == other.chart and self.base == other.base
                and nz(self.components) == nz(other.components))

    __hash__ = None


class ChartMap:
    """A smooth map between charts given by Scalars over the source coordinates."""

    __slots__ = ("source", "target", "assignment", "_dforms")

    def __init__(self, source: Chart, target: Chart, assignment: Mapping[str, object]):
        missing = [c for c in target.names if c not in assignment]
        if missing:
            raise ValueError(f"target coordinates not assigned: {missing}")
        self.source = source
        self.target = target
        self.assignment = {c: as_scalar(assignment[c]) for c in target.names}
        self._dforms: dict = {}

    def image(self, point: Mapping[str, object]) -> dict:
        return {c: s.evaluate(point) for c, s in self.assignment.items()}

    def differential_of(self, target_name: str) -> VForm:
        got = self._dforms.get(target_name)
        if got is None:
            got = ext_d(VForm.function(self.source, self.assignment[target_name]))
            self._dforms[target_name] = got
        return got


# -- operators -------------------------------------------------------------


def wedge(a: VForm, b: VForm) -> VForm:
    _same_chart(a.chart, b.chart)
    out: dict = {}
    for (fa, va), ca in a.terms.items():
        for (fb, vb), cb in b.terms.items():
            f, s1 = _merge(fa, fb)
            if f is None:
                continue
            v, s2 = _merge(va, vb)
            if v is None:
                continue
            c = ca * cb
            if s1 * s2 < 0:
                c = -c
            key = (f, v)
            prev = out.get(key)
            out[key] = c if prev is None else prev + c
    return VForm(a.chart, a.p + b.p, a.r + b.r,
                 {k: c for k, c in out.items() if not c.is_zero()})


def ext_d(a: VForm) -> VForm:
    chart = a.chart
    out: dict = {}
    for (f, v), c in a.terms.items():
        for name in c.variables:
            if not chart.has(name):
                continue
            pos = chart.index(name)
            at = bisect_left(f, pos)
            if at < len(f) and f[at] == pos:
                continue
            dc = c.partial(name)
            if dc.is_zero():
                continue
            if at & 1:
                dc = -dc
            key = (f[:at] + (pos,) + f[at:], v)
            prev = out.get(key)
            out[key] = dc if prev is None else prev + dc
    return VForm(chart, a.p + 1, a.r, {k: c for k, c in out.items() if not c.is_zero()})


def interior(X: VField, a: VForm) -> VForm:
    """Contract X into the first slot of the form part."""
    _same_chart(X.chart, a.chart)
    if a.p == 0:
        raise DegreeZero("cannot contract a vector field into a 0-form")
    comps = {a.chart.index(n): c for n, c in X.components.items()}
    out: dict = {}
    for (f, v), c in a.terms.items():
        for l, pos in enumerate(f):
            x = comps.get(pos)
            if x is None:
                continue
            t = c * x
            if l & 1:
                t = -t
            key = (f[:l] + f[l + 1:], v)
            prev = out.get(key)
            out[key] = t if prev is None else prev + t
    return VForm(a.chart, a.p - 1, a.r, {k: c for k, c in out.items() if not c.is_zero()})


def lie_derivative(X: VField, a: VForm) -> VForm:
    """Cartan formula; for 0-forms the second term is absent."""
    _same_chart(X.chart, a.chart)
    first = interior(X, ext_d(a))
    if a.p == 0:
        return first
    return first + ext_d(interior(X, a))


def pullback(m: ChartMap, a: VForm) -> VForm:
    _same_chart(m.target, a.chart)
    names = a.chart.names
    wedges: dict = {}

    def basis(f):
        got = wedges.get(f)
        if got is None:
            got = VForm(m.source, 0, 0, {((), ()): ONE})
            for pos in f:
                got = wedge(got, m.differential_of(names[pos]))
            wedges[f] = got
        return got

    acc: dict = {}
    for (f, v), c in a.terms.items():
        try:
            cs = c.substitute(m.assignment)
        except DivisionByZero as exc:
            raise PoleAtSubstitution(str(exc)) from None
        if cs.is_zero():
            continue
        for (fs, _), bc in basis(f).terms.items():
            key = (fs, v)
            t = cs * bc
            prev = acc.get(key)
            acc[key] = t if prev is None else prev + t
    return VForm(m.source, a.p, a.r, {k: c for k, c in acc.items() if not c.is_zero()})


def pushforward(m: ChartMap, X: VField, point: Mapping[str, object]) -> TangentVector:
    """Jacobian-vector product of X at a point, landing at the image point."""
    _same_chart(m.source, X.chart)
    xs = X.evaluate(point)
    comps = {}
    for t, s in m.assignment.items():
        total = 0
        for name, xv in xs.items():
            if xv:
                total += s.partial(name).evaluate(point) * xv
        comps[t] = as_rational(Fraction(total))
    return TangentVector(m.target, m.image(point), comps)


def wedge_power(a: VForm, m: int) -> VForm:
    if m < 0:
        raise ValueError("wedge power needs m >= 0")
    out = VForm(a.chart, 0, 0, {((), ()): ONE})
    for _ in range(m):
        out = wedge(out, a)
    return out


def pair_value(a: VForm, V: Mapping[tuple, object]) -> VForm:
    """Contract the value part against a covector given by its sorted-index components."""
    for key in V:
        if len(key) != a.r:
            raise DegreeMismatch(f"covector of degree {len(key)} against value degree {a.r}")
    comps = {}
    for key, val in V.items():
        idx, sign = sort_with_sign(key)
        if idx is None:
            continue
        comps[idx] = as_rational(val) * sign
    acc: dict = {}
    for (f, v), c in a.terms.items():
        w = comps.get(v, 0)
        if not w:
            continue
        t = c * w
        key = (f, ())
        prev = acc.get(key)
        acc[key] = t if prev is None else prev + t
    return VForm(a.chart, a.p, 0, {k: c for k, c in acc.items() if not c.is_zero()})
