"""Charts, multivector fields, differential forms and smooth maps.

Tensors are stored sparsely over strictly increasing index tuples.  Bivector
components follow ``pi^{ij} = pi(dx^i, dx^j)`` and a contraction always eats
the first slot.

The Schouten bracket is the odd-variable (super) formula multiplied by
``(-1)^((p-1)(q-1))``.  That sign leaves ``[X, f] = X(f)``, the Lie bracket and
``[X, P] = L_X P`` untouched and makes Jacobi pairs satisfy
``[pi, pi] = 2 E ^ pi``; ``[P, .]`` then acts as a right derivation,
``[P, Q^R] = (-1)^((p-1) r) [P, Q]^R + Q^[P, R]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Mapping, Sequence, Tuple

from .errors import ChartMismatchError, DegreeError
from .symcore import ONE, ZERO, Scalar, as_scalar, determinant
from .symcore.parse import parse_scalar

Index = Tuple[int, ...]


@dataclass(frozen=True)
class Chart:
    name: str
    coords: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"chart {self.name}: duplicate coordinates")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, v: str) -> int:
        try:
            return self.coords.index(v)
        except ValueError:
            raise ChartMismatchError(f"{v} is not a coordinate of chart {self.name}") from None

    def fresh(self, base: str) -> str:
        name, k = base, 0
        while name in self.coords:
            k += 1
            name = f"{base}_{k}"
        return name

    def extend(self, base: str = "t", name: str | None = None) -> Tuple["Chart", str]:
        """The product chart with one new coordinate appended."""
        t = self.fresh(base)
        return Chart(name or f"{self.name}xR", self.coords + (t,)), t

    def parse(self, text: str) -> Scalar:
        return parse_scalar(text, self.coords)

    def same(self, other: "Chart") -> bool:
        return self.coords == other.coords


def _sort_sign(idx: Sequence[int]):
    """Sign of the permutation sorting ``idx`` (0 if an index repeats) and the sorted tuple."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class _Graded:
    """Shared storage for multivector fields and forms."""

    __slots__ = ("chart", "degree", "comps")
    symbol = "?"

    def __init__(self, chart: Chart, degree: int, comps: Mapping[Index, Scalar] | None = None):
        if degree < 0:
            raise DegreeError("negative degree")
        self.chart = chart
        self.degree = degree
        clean: Dict[Index, Scalar] = {}
        for idx, c in (comps or {}).items():
            c = as_scalar(c)
            if c.is_zero():
                continue
            if len(idx) != degree or any(i < 0 or i >= chart.dim for i in idx):
                raise DegreeError(f"index {idx} does not fit degree {degree} on {chart.name}")
            sign, key = _sort_sign(idx)
            if sign == 0:
                continue
            prev = clean.get(key, ZERO) + (c if sign > 0 else -c)
            if prev.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = prev
        self.comps = clean

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, degree: int):
        return cls(chart, degree, {})

    @classmethod
    def scalar(cls, chart: Chart, f) -> "_Graded":
        return cls(chart, 0, {(): as_scalar(f)})

    @classmethod
    def basis(cls, chart: Chart, *names: str):
        return cls(chart, len(names), {tuple(chart.index(n) for n in names): ONE})

    @classmethod
    def from_terms(cls, chart: Chart, degree: int, terms: Mapping):
        """Build from ``{(var names...): coefficient}``; coefficients may be text."""
        comps: Dict[Index, Scalar] = {}
        for names, c in terms.items():
            if isinstance(names, str):
                names = (names,)
            c = chart.parse(c) if isinstance(c, str) else as_scalar(c)
            sign, key = _sort_sign([chart.index(n) for n in names])
            if sign == 0 or len(names) != degree:
                raise DegreeError(f"bad index {names} for degree {degree}")
            comps[key] = comps.get(key, ZERO) + (c if sign > 0 else -c)
        return cls(chart, degree, comps)

    # access ---------------------------------------------------------------
    def __getitem__(self, idx) -> Scalar:
        if isinstance(idx, (int, str)):
            idx = (idx,)
        idx = tuple(self.chart.index(i) if isinstance(i, str) else i for i in idx)
        sign, key = _sort_sign(idx)
        if sign == 0:
            return ZERO
        c = self.comps.get(key, ZERO)
        return c if sign > 0 else -c

    def value(self) -> Scalar:
        if self.degree != 0:
            raise DegreeError("only degree-0 tensors have a scalar value")
        return self.comps.get((), ZERO)

    def is_zero(self) -> bool:
        return not self.comps

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if not self.chart.same(other.chart):
            raise ChartMismatchError(f"charts {self.chart.name} and {other.chart.name} differ")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree:
            raise DegreeError("cannot add tensors of different degrees")
        comps = dict(self.comps)
        for k, v in other.comps.items():
            comps[k] = comps.get(k, ZERO) + v
        return type(self)(self.chart, self.degree, comps)

    def __neg__(self):
        return type(self)(self.chart, self.degree, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, _Graded):
            return NotImplemented
        s = as_scalar(s)
        return type(self)(self.chart, self.degree, {k: s * v for k, v in self.comps.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, _Graded) or type(other) is not type(self):
            return NotImplemented
        return self.chart.same(other.chart) and self.degree == other.degree and self.comps == other.comps

    def __hash__(self):
        return hash((type(self).__name__, self.chart.coords, self.degree, frozenset(self.comps.items())))

    def map_coeffs(self, fn):
        return type(self)(self.chart, self.degree, {k: fn(v) for k, v in self.comps.items()})

    def subs(self, mapping):
        return self.map_coeffs(lambda c: c.subs(mapping))

    def to_chart(self, chart: Chart, mapping: Mapping[str, str] | None = None):
        """Re-express on another chart whose coordinates include ours (renamed by ``mapping``)."""
        mapping = mapping or {}
        pos = [chart.index(mapping.get(v, v)) for v in self.chart.coords]
        ren = {v: Scalar.var(mapping[v]) for v in mapping}
        comps = {}
        for k, c in self.comps.items():
            comps[tuple(pos[i] for i in k)] = c.subs(ren) if ren else c
        return type(self)(chart, self.degree, comps)

    def __str__(self):
        if not self.comps:
            return "0"
        if self.degree == 0:
            return str(self.value())
        parts = []
        for k in sorted(self.comps):
            basis = "^".join(self.symbol + self.chart.coords[i] for i in k)
            parts.append(f"({self.comps[k]})*{basis}")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class MultiVectorField(_Graded):
    __slots__ = ()
    symbol = "D"


class DifferentialForm(_Graded):
    __slots__ = ()
    symbol = "d"


def vector_field(chart: Chart, terms: Mapping) -> MultiVectorField:
    return MultiVectorField.from_terms(chart, 1, terms)


def one_form(chart: Chart, terms: Mapping) -> DifferentialForm:
    return DifferentialForm.from_terms(chart, 1, terms)


def _same_kind(a, b):
    if type(a) is not type(b):
        raise TypeError("wedge needs two tensors of the same kind")
    if not a.chart.same(b.chart):
        raise ChartMismatchError(f"charts {a.chart.name} and {b.chart.name} differ")


def wedge(a: _Graded, b: _Graded) -> _Graded:
    _same_kind(a, b)
    deg = a.degree + b.degree
    out: Dict[Index, Scalar] = {}
    if deg <= a.chart.dim:
        for ka, ca in a.comps.items():
            for kb, cb in b.comps.items():
                sign, key = _sort_sign(ka + kb)
                if sign == 0:
                    continue
                term = ca * cb
                out[key] = out.get(key, ZERO) + (term if sign > 0 else -term)
    return type(a)(a.chart, deg, out)


def wedge_all(items: Sequence[_Graded]) -> _Graded:
    acc = items[0]
    for it in items[1:]:
        acc = wedge(acc, it)
    return acc


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    out: Dict[Index, Scalar] = {}
    coords = a.chart.coords
    if a.degree < a.chart.dim:
        for k, c in a.comps.items():
            for j, v in enumerate(coords):
                if j in k:
                    continue
                dc = c.diff(v)
                if dc.is_zero():
                    continue
                sign, key = _sort_sign((j,) + k)
                out[key] = out.get(key, ZERO) + (dc if sign > 0 else -dc)
    return DifferentialForm(a.chart, a.degree + 1, out)


def d(f) -> DifferentialForm:
    """Exterior derivative; also accepts a Scalar paired with a chart as ``(chart, f)``."""
    if isinstance(f, tuple):
        chart, s = f
        return exterior_derivative(DifferentialForm.scalar(chart, s))
    return exterior_derivative(f)


def _contract(vec: Mapping[Index, Scalar], t: _Graded) -> Dict[Index, Scalar]:
    out: Dict[Index, Scalar] = {}
    for k, c in t.comps.items():
        for j, i in enumerate(k):
            x = vec.get((i,))
            if x is None:
                continue
            rest = k[:j] + k[j + 1:]
            term = x * c
            out[rest] = out.get(rest, ZERO) + (term if j % 2 == 0 else -term)
    return out


def interior_product(X: MultiVectorField, a: DifferentialForm) -> DifferentialForm:
    """Contraction of a vector field into the first slot of a form."""
    if X.degree != 1:
        raise DegreeError("interior product needs a vector field")
    if a.degree < 1:
        raise DegreeError("cannot contract a function")
    _check_charts(X, a)
    return DifferentialForm(a.chart, a.degree - 1, _contract(X.comps, a))


def contract_covector(alpha: DifferentialForm, P: MultiVectorField) -> MultiVectorField:
    """Contraction of a 1-form into the first slot of a multivector field."""
    if alpha.degree != 1:
        raise DegreeError("needs a 1-form")
    if P.degree < 1:
        raise DegreeError("cannot contract a function")
    _check_charts(alpha, P)
    return MultiVectorField(P.chart, P.degree - 1, _contract(alpha.comps, P))


def pair(alpha: DifferentialForm, X: MultiVectorField) -> Scalar:
    """The duality pairing of a 1-form and a vector field."""
    _check_charts(alpha, X)
    total = ZERO
    for k, c in alpha.comps.items():
        x = X.comps.get(k)
        if x is not None:
            total = total + c * x
    return total


def apply_to_vector(X: MultiVectorField, f: Scalar) -> Scalar:
    """Directional derivative X(f)."""
    total = ZERO
    for (i,), c in X.comps.items():
        df = as_scalar(f).diff(X.chart.coords[i])
        if not df.is_zero():
            total = total + c * df
    return total


def _check_charts(a, b):
    if not a.chart.same(b.chart):
        raise ChartMismatchError(f"charts {a.chart.name} and {b.chart.name} differ")


def _rderiv(P: MultiVectorField, i: int) -> MultiVectorField:
    """Right derivative with respect to the odd variable dual to coordinate i."""
    out = {}
    p = P.degree
    for k, c in P.comps.items():
        if i in k:
            j = k.index(i)
            rest = k[:j] + k[j + 1:]
            out[rest] = c if (p - 1 - j) % 2 == 0 else -c
    return MultiVectorField(P.chart, p - 1, out)


def _xderiv(P: MultiVectorField, i: int) -> MultiVectorField:
    v = P.chart.coords[i]
    return MultiVectorField(P.chart, P.degree, {k: c.diff(v) for k, c in P.comps.items()})


def schouten_bracket(P: MultiVectorField, Q: MultiVectorField) -> MultiVectorField:
    _check_charts(P, Q)
    p, q = P.degree, Q.degree
    deg = p + q - 1
    chart = P.chart
    if deg < 0:
        return MultiVectorField.zero(chart, 0)
    acc = MultiVectorField.zero(chart, deg)
    if deg > chart.dim:
        return acc
    twist = ((p - 1) * (q - 1)) % 2
    sign = 1 if twist else -1
    for i in range(chart.dim):
        if p >= 1:
            rp = _rderiv(P, i)
            if not rp.is_zero():
                acc = acc + wedge(rp, _xderiv(Q, i))
        if q >= 1:
            rq = _rderiv(Q, i)
            if not rq.is_zero():
                acc = acc + sign * wedge(rq, _xderiv(P, i))
    return -acc if twist else acc


def lie_derivative(X: MultiVectorField, a: _Graded) -> _Graded:
    if X.degree != 1:
        raise DegreeError("Lie derivative along a vector field only")
    _check_charts(X, a)
    if isinstance(a, MultiVectorField):
        return schouten_bracket(X, a)
    if a.degree == 0:
        return DifferentialForm.scalar(a.chart, apply_to_vector(X, a.value()))
    return interior_product(X, exterior_derivative(a)) + exterior_derivative(interior_product(X, a))


@dataclass(frozen=True)
class SmoothMap:
    source: Chart
    target: Chart
    components: Tuple[Scalar, ...]

    def __post_init__(self):
        comps = tuple(as_scalar(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.target.dim:
            raise ValueError("one component per target coordinate is required")

    @classmethod
    def identity(cls, chart: Chart) -> "SmoothMap":
        return cls(chart, chart, tuple(Scalar.var(v) for v in chart.coords))

    @classmethod
    def from_exprs(cls, source: Chart, target: Chart, exprs: Sequence) -> "SmoothMap":
        return cls(source, target, tuple(source.parse(e) if isinstance(e, str) else as_scalar(e) for e in exprs))

    @classmethod
    def projection(cls, source: Chart, target: Chart, names: Sequence[str] | None = None) -> "SmoothMap":
        """Coordinate projection; ``names`` lists the source coordinate for each target one."""
        names = names or target.coords
        return cls(source, target, tuple(Scalar.var(source.coords[source.index(n)]) for n in names))

    def pull_scalar(self, f) -> Scalar:
        """``f`` composed with the map."""
        return as_scalar(f).subs(dict(zip(self.target.coords, self.components)))

    def jacobian(self) -> List[List[Scalar]]:
        return [[c.diff(v) for v in self.source.coords] for c in self.components]

    def image_point(self, point: Mapping) -> Dict[str, object]:
        return {v: c.specialize(point) for v, c in zip(self.target.coords, self.components)}


def pullback(phi: SmoothMap, a: DifferentialForm) -> DifferentialForm:
    if not a.chart.same(phi.target):
        raise ChartMismatchError("form does not live on the map's target chart")
    src = phi.source
    dphi = [exterior_derivative(DifferentialForm.scalar(src, c)) for c in phi.components]
    acc = DifferentialForm.zero(src, a.degree)
    for k, c in a.comps.items():
        coeff = phi.pull_scalar(c)
        term = DifferentialForm.scalar(src, coeff)
        for i in k:
            term = wedge(term, dphi[i])
        acc = acc + term
    return acc


def pushforward_components(phi: SmoothMap, src: MultiVectorField) -> Dict[Index, Scalar]:
    """Components of ``dphi(src)`` as functions on the source chart."""
    if not src.chart.same(phi.source):
        raise ChartMismatchError("multivector does not live on the map's source chart")
    jac = phi.jacobian()
    p = src.degree
    out = {}
    for J in combinations(range(phi.target.dim), p):
        total = ZERO
        for I, c in src.comps.items():
            minor = determinant([[jac[j][i] for i in I] for j in J]) if p else ONE
            if not minor.is_zero():
                total = total + c * minor
        out[J] = total
    return out


def related_residues(phi: SmoothMap, src: MultiVectorField, dst: MultiVectorField) -> Dict[Index, Scalar]:
    """Nonzero entries of ``dphi(src) - dst o phi``."""
    if src.degree != dst.degree:
        raise DegreeError("relatedness compares tensors of equal degree")
    if not dst.chart.same(phi.target):
        raise ChartMismatchError("destination tensor does not live on the target chart")
    pushed = pushforward_components(phi, src)
    out = {}
    for J, v in pushed.items():
        r = v - phi.pull_scalar(dst.comps.get(J, ZERO))
        if not r.is_zero():
            out[J] = r
    return out


def related_check(phi: SmoothMap, src: MultiVectorField, dst: MultiVectorField) -> bool:
    return not related_residues(phi, src, dst)


def top_coefficient(a: DifferentialForm) -> Scalar:
    if a.degree != a.chart.dim:
        raise DegreeError("not a top-degree form")
    return a.comps.get(tuple(range(a.chart.dim)), ZERO)


def power(a: DifferentialForm, n: int) -> DifferentialForm:
    acc = DifferentialForm.scalar(a.chart, ONE)
    for _ in range(n):
        acc = wedge(acc, a)
    return acc
