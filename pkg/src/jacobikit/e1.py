"""Calculus on the extended bundle (TM x R) + (T*M x R).

A ``PairForm`` of degree k is a pair (alpha, beta) of a k-form and a
(k-1)-form.  The extended differential, contraction and Lie derivative act on
pairs, and sections of the extended bundle carry the symmetric pairing and the
Dorfman bracket built from them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import ChartMismatchError, DegreeError
from .geom import (
    Chart,
    DifferentialForm,
    MultiVectorField,
    apply_to_vector,
    exterior_derivative,
    interior_product,
    pair,
    schouten_bracket,
)
from .symcore import ZERO, Scalar, as_scalar

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PairForm:
    hi: DifferentialForm
    lo: Optional[DifferentialForm] = None

    def __post_init__(self):
        if self.hi.degree == 0:
            if self.lo is not None and not self.lo.is_zero():
                raise DegreeError("a degree-0 pair has no lower slot")
            object.__setattr__(self, "lo", None)
            return
        lo = self.lo if self.lo is not None else DifferentialForm.zero(self.hi.chart, self.hi.degree - 1)
        if lo.degree != self.hi.degree - 1:
            raise DegreeError("pair slots must have degrees k and k-1")
        if not lo.chart.same(self.hi.chart):
            raise ChartMismatchError("pair slots live on different charts")
        object.__setattr__(self, "lo", lo)

    @property
    def chart(self) -> Chart:
        return self.hi.chart

    @property
    def degree(self) -> int:
        return self.hi.degree

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "PairForm":
        lo = DifferentialForm.zero(chart, degree - 1) if degree else None
        return cls(DifferentialForm.zero(chart, degree), lo)

    @classmethod
    def function(cls, chart: Chart, g) -> "PairForm":
        return cls(DifferentialForm.scalar(chart, g))

    @classmethod
    def covector(cls, alpha: DifferentialForm, g) -> "PairForm":
        return cls(alpha, DifferentialForm.scalar(alpha.chart, g))

    def is_zero(self) -> bool:
        return self.hi.is_zero() and (self.lo is None or self.lo.is_zero())

    def __add__(self, other: "PairForm") -> "PairForm":
        lo = None if self.lo is None else self.lo + other.lo
        return PairForm(self.hi + other.hi, lo)

    def __neg__(self):
        return PairForm(-self.hi, None if self.lo is None else -self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        s = as_scalar(s)
        return PairForm(s * self.hi, None if self.lo is None else s * self.lo)

    __rmul__ = __mul__

    def __str__(self):
        return f"({self.hi}, {self.lo if self.lo is not None else '-'})"


@dataclass(frozen=True)
class ExtendedVector:
    X: MultiVectorField
    f: Scalar = ZERO

    def __post_init__(self):
        object.__setattr__(self, "f", as_scalar(self.f))
        if self.X.degree != 1:
            raise DegreeError("extended vectors carry a vector field")

    @property
    def chart(self):
        return self.X.chart

    @classmethod
    def zero(cls, chart: Chart):
        return cls(MultiVectorField.zero(chart, 1), ZERO)

    def is_zero(self):
        return self.X.is_zero() and self.f.is_zero()

    def __add__(self, o):
        return ExtendedVector(self.X + o.X, self.f + o.f)

    def __neg__(self):
        return ExtendedVector(-self.X, -self.f)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, s):
        s = as_scalar(s)
        return ExtendedVector(s * self.X, s * self.f)

    __rmul__ = __mul__

    def __str__(self):
        return f"({self.X}, {self.f})"


@dataclass(frozen=True)
class ExtendedCovector:
    alpha: DifferentialForm
    g: Scalar = ZERO

    def __post_init__(self):
        object.__setattr__(self, "g", as_scalar(self.g))
        if self.alpha.degree != 1:
            raise DegreeError("extended covectors carry a 1-form")

    @property
    def chart(self):
        return self.alpha.chart

    @classmethod
    def zero(cls, chart: Chart):
        return cls(DifferentialForm.zero(chart, 1), ZERO)

    @classmethod
    def from_pair(cls, p: PairForm) -> "ExtendedCovector":
        if p.degree != 1:
            raise DegreeError("only degree-1 pairs are covectors")
        return cls(p.hi, p.lo.value())

    def as_pair(self) -> PairForm:
        return PairForm.covector(self.alpha, self.g)

    def is_zero(self):
        return self.alpha.is_zero() and self.g.is_zero()

    def __add__(self, o):
        return ExtendedCovector(self.alpha + o.alpha, self.g + o.g)

    def __neg__(self):
        return ExtendedCovector(-self.alpha, -self.g)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, s):
        s = as_scalar(s)
        return ExtendedCovector(s * self.alpha, s * self.g)

    __rmul__ = __mul__

    def __str__(self):
        return f"({self.alpha}, {self.g})"


@dataclass(frozen=True)
class ExtendedSection:
    ev: ExtendedVector
    ec: ExtendedCovector

    def __post_init__(self):
        if not self.ev.chart.same(self.ec.chart):
            raise ChartMismatchError("vector and covector parts live on different charts")

    @property
    def chart(self):
        return self.ev.chart

    @classmethod
    def zero(cls, chart: Chart):
        return cls(ExtendedVector.zero(chart), ExtendedCovector.zero(chart))

    @classmethod
    def build(cls, X: MultiVectorField, f, alpha: DifferentialForm, g) -> "ExtendedSection":
        return cls(ExtendedVector(X, f), ExtendedCovector(alpha, g))

    def is_zero(self):
        return self.ev.is_zero() and self.ec.is_zero()

    def __add__(self, o):
        return ExtendedSection(self.ev + o.ev, self.ec + o.ec)

    def __neg__(self):
        return ExtendedSection(-self.ev, -self.ec)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, s):
        return ExtendedSection(self.ev * s, self.ec * s)

    __rmul__ = __mul__

    def to_row(self) -> List[Scalar]:
        """Coefficients in the frame (d/dx^1..d/dx^n, 1, dx^1..dx^n, 1)."""
        n = self.chart.dim
        X, a = self.ev.X, self.ec.alpha
        return ([X.comps.get((i,), ZERO) for i in range(n)] + [self.ev.f]
                + [a.comps.get((i,), ZERO) for i in range(n)] + [self.ec.g])

    @classmethod
    def from_row(cls, chart: Chart, row: Sequence) -> "ExtendedSection":
        n = chart.dim
        row = [as_scalar(x) for x in row]
        X = MultiVectorField(chart, 1, {(i,): row[i] for i in range(n)})
        a = DifferentialForm(chart, 1, {(i,): row[n + 1 + i] for i in range(n)})
        return cls(ExtendedVector(X, row[n]), ExtendedCovector(a, row[2 * n + 1]))

    def __eq__(self, other):
        if not isinstance(other, ExtendedSection):
            return NotImplemented
        return self.chart.same(other.chart) and self.to_row() == other.to_row()

    def __hash__(self):
        return hash(tuple(self.to_row()))

    def __str__(self):
        return f"{self.ev} + {self.ec}"


def tilde_d(a: PairForm) -> PairForm:
    """Extended differential: (alpha, beta) -> (d alpha, alpha - d beta); g -> (dg, g)."""
    if a.degree == 0:
        return PairForm(exterior_derivative(a.hi), a.hi)
    return PairForm(exterior_derivative(a.hi), a.hi - exterior_derivative(a.lo))


def tilde_i(v: ExtendedVector, a: PairForm) -> PairForm:
    """Extended contraction: (alpha, beta) -> (i_X alpha + f beta, -i_X beta)."""
    if a.degree == 0:
        raise DegreeError("cannot contract a degree-0 pair")
    if not v.chart.same(a.chart):
        raise ChartMismatchError("contraction across charts")
    hi = interior_product(v.X, a.hi) + v.f * a.lo
    if a.degree == 1:
        return PairForm(hi)
    return PairForm(hi, -interior_product(v.X, a.lo))


def tilde_lie(v: ExtendedVector, a: PairForm) -> PairForm:
    """Extended Lie derivative by the Cartan formula."""
    out = tilde_i(v, tilde_d(a))
    if a.degree > 0:
        out = out + tilde_d(tilde_i(v, a))
    return out


def vector_bracket(v: ExtendedVector, w: ExtendedVector) -> ExtendedVector:
    """([X, Y], X(h) - Y(f))."""
    return ExtendedVector(schouten_bracket(v.X, w.X), apply_to_vector(v.X, w.f) - apply_to_vector(w.X, v.f))


def contract_covector(v: ExtendedVector, c: ExtendedCovector) -> Scalar:
    """i_(X,f)(alpha, g) = alpha(X) + f g."""
    return pair(c.alpha, v.X) + v.f * c.g


def pairing(s1: ExtendedSection, s2: ExtendedSection) -> Scalar:
    if not s1.chart.same(s2.chart):
        raise ChartMismatchError("pairing across charts")
    return HALF * (contract_covector(s1.ev, s2.ec) + contract_covector(s2.ev, s1.ec))


def dorfman(s1: ExtendedSection, s2: ExtendedSection) -> ExtendedSection:
    if not s1.chart.same(s2.chart):
        raise ChartMismatchError("bracket across charts")
    ev = vector_bracket(s1.ev, s2.ev)
    cov = tilde_lie(s1.ev, s2.ec.as_pair()) - tilde_i(s2.ev, tilde_d(s1.ec.as_pair()))
    return ExtendedSection(ev, ExtendedCovector.from_pair(cov))


def coordinate_frame(chart: Chart) -> List[ExtendedSection]:
    """The 2n+2 sections dual to the row coordinates of ``to_row``."""
    size = 2 * chart.dim + 2
    return [ExtendedSection.from_row(chart, [1 if j == i else 0 for j in range(size)]) for i in range(size)]


def gram_matrix(chart: Chart):
    frame = coordinate_frame(chart)
    return [[pairing(a, b) for b in frame] for a in frame]
