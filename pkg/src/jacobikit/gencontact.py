"""Generalized contact structures as endomorphisms of E1(M) = (TM x R) + (T*M x R).

Matrices act on columns in the frame (d/dx^1..d/dx^n, 1, dx^1..dx^n, 1), the
same order as ``ExtendedSection.to_row``.  Blocks are named by domain and
target: ``vv`` (vectors to vectors), ``cv`` (covectors to vectors), ``vc``
and ``cc``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from .e1 import ExtendedSection, coordinate_frame, dorfman, gram_matrix
from .errors import StructureError
from .gauge import gauge_matrix
from .geom import Chart, DifferentialForm, exterior_derivative
from .jacobi import (
    ContactForm,
    ExtendedBundleMap,
    MapKind,
    contact_to_jacobi,
    pair_contraction_matrix,
    sharp_matrix,
)
from .symcore.matrix import (
    Matrix,
    block,
    identity,
    is_zero_matrix,
    matmul,
    matrix_inverse,
    matvec,
    mequal,
    mneg,
    sub_block,
    transpose,
    zeros,
)


class SquareClass(str, Enum):
    PLUS_ID = "PLUS_ID"
    MINUS_ID = "MINUS_ID"
    NEITHER = "NEITHER"


@dataclass(frozen=True)
class E1Endomorphism:
    chart: Chart
    matrix: Matrix

    def __post_init__(self):
        size = 2 * self.chart.dim + 2
        if len(self.matrix) != size or any(len(r) != size for r in self.matrix):
            raise ValueError(f"expected a {size}x{size} matrix")

    @classmethod
    def from_blocks(cls, chart: Chart, vv: Matrix, cv: Matrix, vc: Matrix, cc: Matrix) -> "E1Endomorphism":
        return cls(chart, block([[vv, cv], [vc, cc]]))

    @classmethod
    def identity(cls, chart: Chart) -> "E1Endomorphism":
        return cls(chart, identity(2 * chart.dim + 2))

    @classmethod
    def zero(cls, chart: Chart) -> "E1Endomorphism":
        return cls(chart, zeros(2 * chart.dim + 2, 2 * chart.dim + 2))

    def _block(self, r: int, c: int) -> Matrix:
        k = self.chart.dim + 1
        return sub_block(self.matrix, r * k, (r + 1) * k, c * k, (c + 1) * k)

    @property
    def vv(self) -> Matrix:
        return self._block(0, 0)

    @property
    def cv(self) -> Matrix:
        return self._block(0, 1)

    @property
    def vc(self) -> Matrix:
        return self._block(1, 0)

    @property
    def cc(self) -> Matrix:
        return self._block(1, 1)

    def blocks(self) -> Tuple[ExtendedBundleMap, ExtendedBundleMap, ExtendedBundleMap, ExtendedBundleMap]:
        c = self.chart
        return (ExtendedBundleMap(c, MapKind.ENDO_VEC, self.vv), ExtendedBundleMap(c, MapKind.COVEC_TO_VEC, self.cv),
                ExtendedBundleMap(c, MapKind.VEC_TO_COVEC, self.vc), ExtendedBundleMap(c, MapKind.ENDO_COVEC, self.cc))

    def __matmul__(self, other: "E1Endomorphism") -> "E1Endomorphism":
        return E1Endomorphism(self.chart, matmul(self.matrix, other.matrix))

    def apply(self, s: ExtendedSection) -> ExtendedSection:
        return ExtendedSection.from_row(self.chart, matvec(self.matrix, s.to_row()))

    def equals(self, other: "E1Endomorphism") -> bool:
        return mequal(self.matrix, other.matrix)


def from_contact(eta) -> E1Endomorphism:
    """(0, sharp ; (d eta, eta)~, 0) for the Jacobi structure of a contact form."""
    form = eta.eta if isinstance(eta, ContactForm) else eta
    J = contact_to_jacobi(form)  # raises on a non-contact form
    n1 = form.chart.dim + 1
    vc = pair_contraction_matrix(exterior_derivative(form), form)
    return E1Endomorphism.from_blocks(form.chart, zeros(n1, n1), sharp_matrix(J), vc, zeros(n1, n1))


def square_class(I: E1Endomorphism) -> SquareClass:
    sq = matmul(I.matrix, I.matrix)
    one = identity(len(sq))
    if mequal(sq, one):
        return SquareClass.PLUS_ID
    if mequal(sq, mneg(one)):
        return SquareClass.MINUS_ID
    return SquareClass.NEITHER


def adjoint(I: E1Endomorphism) -> E1Endomorphism:
    """I* = G^-1 I^T G for the Gram matrix G of the E1 pairing."""
    G = gram_matrix(I.chart)
    Ginv, _ = matrix_inverse(G)
    return E1Endomorphism(I.chart, matmul(Ginv, matmul(transpose(I.matrix), G)))


def torsion(I: E1Endomorphism, a: ExtendedSection, b: ExtendedSection) -> ExtendedSection:
    """[[Ia, Ib]] - I[[Ia, b]] - I[[a, Ib]] + I^2[[a, b]] with the Dorfman bracket."""
    Ia, Ib = I.apply(a), I.apply(b)
    return (dorfman(Ia, Ib) - I.apply(dorfman(Ia, b)) - I.apply(dorfman(a, Ib))
            + I.apply(I.apply(dorfman(a, b))))


def torsion_witness(I: E1Endomorphism) -> Optional[Tuple[int, int, ExtendedSection]]:
    frame = coordinate_frame(I.chart)
    for i, a in enumerate(frame):
        for j, b in enumerate(frame):
            t = torsion(I, a, b)
            if any(not x.is_zero() for x in t.to_row()):
                return i, j, t
    return None


@dataclass
class AxiomReport:
    square: SquareClass
    adjoint_ok: bool
    torsion_zero: bool
    torsion_witness: Optional[Tuple[int, int, ExtendedSection]] = field(default=None, compare=False)

    @property
    def key(self):
        return self.square, self.adjoint_ok, self.torsion_zero

    @property
    def note(self) -> Optional[str]:
        if self.square is SquareClass.MINUS_ID:
            return "square is -Id; the defining condition is sometimes stated as +Id"
        return None


def check_axioms(I: E1Endomorphism) -> AxiomReport:
    adj = adjoint(I)
    adjoint_ok = is_zero_matrix([[a + b for a, b in zip(r, s)] for r, s in zip(adj.matrix, I.matrix)])
    w = torsion_witness(I)
    return AxiomReport(square_class(I), adjoint_ok, w is None, w)


def exp_b(B: DifferentialForm) -> E1Endomorphism:
    """(Id, 0 ; (dB, B)~, Id)."""
    n1 = B.chart.dim + 1
    return E1Endomorphism.from_blocks(B.chart, identity(n1), zeros(n1, n1), gauge_matrix(B).matrix, identity(n1))


def bfield_transform(I: E1Endomorphism, B: DifferentialForm) -> E1Endomorphism:
    """exp(B) o I o exp(-B)."""
    if not B.chart.same(I.chart):
        raise StructureError("B lives on a different chart")
    return exp_b(B) @ I @ exp_b(-B)


@dataclass
class ContactTypeReport:
    vv_zero: bool
    cc_zero: bool
    cv_skew: bool
    witness_block: Optional[Matrix] = None

    @property
    def passed(self) -> bool:
        return self.vv_zero and self.cc_zero and self.cv_skew


def contact_type_report(I: E1Endomorphism) -> ContactTypeReport:
    vv, cc, cv = I.vv, I.cc, I.cv
    vv_zero, cc_zero = is_zero_matrix(vv), is_zero_matrix(cc)
    cv_skew = mequal(transpose(cv), mneg(cv))
    witness = None if vv_zero else vv
    if witness is None and not cc_zero:
        witness = cc
    return ContactTypeReport(vv_zero, cc_zero, cv_skew, witness)


def is_contact_type(I: E1Endomorphism) -> bool:
    return contact_type_report(I).passed


def expected_top_left(eta, B: DifferentialForm) -> Matrix:
    """The vector block -sharp o (dB, B)~ produced by a B-field transform of from_contact(eta)."""
    form = eta.eta if isinstance(eta, ContactForm) else eta
    return mneg(matmul(sharp_matrix(contact_to_jacobi(form)), gauge_matrix(B).matrix))
