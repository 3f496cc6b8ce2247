"""Jacobi structures, their sharp maps, and the contact / l.c.s. sources.

Bundle maps between ``T*M x R`` and ``TM x R`` are square Scalar matrices in
the frames (dx^1..dx^n, 1) and (d/dx^1..d/dx^n, 1); column j holds the image
of the j-th frame element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .e1 import ExtendedCovector, ExtendedVector
from .errors import ChartMismatchError, SingularMatrixError, StructureError
from .geom import (
    Chart,
    DifferentialForm,
    MultiVectorField,
    SmoothMap,
    contract_covector,
    exterior_derivative,
    power,
    related_residues,
    schouten_bracket,
    top_coefficient,
    wedge,
)
from .symcore import (
    ZERO,
    NonvanishingResult,
    Scalar,
    as_scalar,
    classify_nonvanishing,
    identity,
    matmul,
    matrix_inverse,
    rank,
)
from .symcore.matrix import Matrix, mequal


class MapKind(str, Enum):
    COVEC_TO_VEC = "COVEC_TO_VEC"
    VEC_TO_COVEC = "VEC_TO_COVEC"
    ENDO_COVEC = "ENDO_COVEC"
    ENDO_VEC = "ENDO_VEC"

    @property
    def domain(self):
        return "covec" if self in (MapKind.COVEC_TO_VEC, MapKind.ENDO_COVEC) else "vec"

    @property
    def codomain(self):
        return "vec" if self in (MapKind.COVEC_TO_VEC, MapKind.ENDO_VEC) else "covec"


def _kind_for(domain: str, codomain: str) -> MapKind:
    table = {
        ("covec", "vec"): MapKind.COVEC_TO_VEC,
        ("vec", "covec"): MapKind.VEC_TO_COVEC,
        ("covec", "covec"): MapKind.ENDO_COVEC,
        ("vec", "vec"): MapKind.ENDO_VEC,
    }
    return table[(domain, codomain)]


@dataclass(frozen=True)
class ExtendedBundleMap:
    chart: Chart
    kind: MapKind
    matrix: Matrix

    def __matmul__(self, other: "ExtendedBundleMap") -> "ExtendedBundleMap":
        """Composition ``self o other``."""
        if other.kind.codomain != self.kind.domain:
            raise TypeError(f"cannot compose {self.kind.value} after {other.kind.value}")
        return ExtendedBundleMap(self.chart, _kind_for(other.kind.domain, self.kind.codomain),
                                 matmul(self.matrix, other.matrix))

    def __add__(self, other):
        if other.kind != self.kind:
            raise TypeError("cannot add bundle maps of different kinds")
        return ExtendedBundleMap(self.chart, self.kind,
                                 [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)])

    def __neg__(self):
        return ExtendedBundleMap(self.chart, self.kind, [[-a for a in r] for r in self.matrix])

    def equals(self, other: "ExtendedBundleMap") -> bool:
        return self.kind == other.kind and mequal(self.matrix, other.matrix)

    def inverse(self) -> "ExtendedBundleMap":
        inv, _ = matrix_inverse(self.matrix)
        return ExtendedBundleMap(self.chart, _kind_for(self.kind.codomain, self.kind.domain), inv)

    def apply(self, x):
        """Apply to an ExtendedVector or ExtendedCovector matching the domain."""
        col = _to_col(x)
        out = [sum((row[j] * col[j] for j in range(len(col)) if not col[j].is_zero()), ZERO)
               for row in self.matrix]
        return _from_col(self.chart, out, self.kind.codomain)

    @staticmethod
    def identity(chart: Chart, kind: MapKind = MapKind.ENDO_COVEC) -> "ExtendedBundleMap":
        return ExtendedBundleMap(chart, kind, identity(chart.dim + 1))


def _to_col(x) -> List[Scalar]:
    n = x.chart.dim
    if isinstance(x, ExtendedVector):
        return [x.X.comps.get((i,), ZERO) for i in range(n)] + [x.f]
    if isinstance(x, ExtendedCovector):
        return [x.alpha.comps.get((i,), ZERO) for i in range(n)] + [x.g]
    raise TypeError(f"cannot apply a bundle map to {type(x).__name__}")


def _from_col(chart: Chart, col, kind: str):
    n = chart.dim
    if kind == "vec":
        return ExtendedVector(MultiVectorField(chart, 1, {(i,): col[i] for i in range(n)}), col[n])
    return ExtendedCovector(DifferentialForm(chart, 1, {(i,): col[i] for i in range(n)}), col[n])


@dataclass(frozen=True)
class JacobiStructure:
    pi: MultiVectorField
    E: MultiVectorField

    def __post_init__(self):
        if self.pi.degree != 2 or self.E.degree != 1:
            raise StructureError("a Jacobi pair is a bivector and a vector field")
        if not self.pi.chart.same(self.E.chart):
            raise ChartMismatchError("pi and E live on different charts")

    @property
    def chart(self) -> Chart:
        return self.pi.chart

    @classmethod
    def zero(cls, chart: Chart) -> "JacobiStructure":
        return cls(MultiVectorField.zero(chart, 2), MultiVectorField.zero(chart, 1))

    def __neg__(self):
        return JacobiStructure(-self.pi, -self.E)

    def equals(self, other: "JacobiStructure") -> bool:
        return self.pi == other.pi and self.E == other.E


@dataclass(frozen=True)
class JacobiReport:
    c1: MultiVectorField
    c2: MultiVectorField

    @property
    def passed(self) -> bool:
        return self.c1.is_zero() and self.c2.is_zero()


def verify_jacobi(pi: MultiVectorField, E: MultiVectorField | None = None) -> JacobiReport:
    """Residues c1 = [pi, pi] - 2 E ^ pi and c2 = [E, pi]."""
    if isinstance(pi, JacobiStructure):
        pi, E = pi.pi, pi.E
    if not pi.chart.same(E.chart):
        raise ChartMismatchError("pi and E live on different charts")
    c1 = schouten_bracket(pi, pi) - 2 * wedge(E, pi)
    c2 = schouten_bracket(E, pi)
    return JacobiReport(c1, c2)


def require_jacobi(J: JacobiStructure) -> JacobiStructure:
    rep = verify_jacobi(J)
    if not rep.passed:
        raise StructureError("not a Jacobi structure", residues={"c1": rep.c1, "c2": rep.c2})
    return J


def sharp_matrix(J: JacobiStructure) -> Matrix:
    n = J.chart.dim
    m = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for k in range(n):
            m[k][i] = J.pi[i, k]
        m[n][i] = -J.E.comps.get((i,), ZERO)
        m[i][n] = J.E.comps.get((i,), ZERO)
    return m


def sharp_map(J: JacobiStructure) -> ExtendedBundleMap:
    """(alpha, g) -> (pi#alpha + g E, -<alpha, E>)."""
    return ExtendedBundleMap(J.chart, MapKind.COVEC_TO_VEC, sharp_matrix(J))


def jacobi_from_sharp(chart: Chart, m: Matrix) -> JacobiStructure:
    """Read (pi, E) back from a COVEC_TO_VEC matrix; the matrix must be skew."""
    n = chart.dim
    for i in range(n + 1):
        for k in range(n + 1):
            if not (m[i][k] + m[k][i]).is_zero():
                raise StructureError("sharp matrix is not skew", residues={(i, k): m[i][k] + m[k][i]})
    pi = MultiVectorField(chart, 2, {(i, k): m[k][i] for i in range(n) for k in range(i + 1, n)})
    E = MultiVectorField(chart, 1, {(k,): m[k][n] for k in range(n)})
    return JacobiStructure(pi, E)


def pair_contraction_matrix(B1: DifferentialForm, B: DifferentialForm) -> Matrix:
    """Matrix of (X, f) -> i_(X,f)(B1, B) = (i_X B1 + f B, -B(X))."""
    chart = B.chart
    n = chart.dim
    m = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for j in range(n):
        for k in range(n):
            m[k][j] = B1[j, k]
        m[n][j] = -B.comps.get((j,), ZERO)
        m[j][n] = B.comps.get((j,), ZERO)
    return m


def pair_contraction(B1: DifferentialForm, B: DifferentialForm) -> ExtendedBundleMap:
    return ExtendedBundleMap(B.chart, MapKind.VEC_TO_COVEC, pair_contraction_matrix(B1, B))


def hamiltonian_vf(J: JacobiStructure, h) -> MultiVectorField:
    """X_h = pi#(dh) + h E."""
    h = as_scalar(h)
    dh = exterior_derivative(DifferentialForm.scalar(J.chart, h))
    if dh.is_zero():
        return h * J.E
    return contract_covector(dh, J.pi) + h * J.E


def characteristic_rank_at(J: JacobiStructure, point) -> int:
    n = J.chart.dim
    m = sharp_matrix(J)
    vals = [[m[k][j].specialize(point) for j in range(n + 1)] for k in range(n)]
    return rank(vals)


# contact and l.c.s. sources ----------------------------------------------------

@dataclass(frozen=True)
class ContactForm:
    eta: DifferentialForm
    status: Optional[NonvanishingResult] = field(default=None, compare=False)

    @property
    def chart(self) -> Chart:
        return self.eta.chart

    @classmethod
    def checked(cls, eta: DifferentialForm, samples=()) -> "ContactForm":
        res = contact_condition(eta, samples)
        if not res.ok:
            raise StructureError("not a contact form: eta ^ (d eta)^n vanishes", residues={"top": contact_volume(eta)},
                                 witness=res.witness)
        return cls(eta, res)


def contact_volume(eta: DifferentialForm) -> Scalar:
    chart = eta.chart
    if chart.dim % 2 != 1:
        raise StructureError("contact forms live on odd-dimensional charts")
    n = (chart.dim - 1) // 2
    return top_coefficient(wedge(eta, power(exterior_derivative(eta), n)))


def contact_condition(eta: DifferentialForm, samples=()) -> NonvanishingResult:
    return classify_nonvanishing(contact_volume(eta), samples)


def _flat_inverse(chart: Chart, F: Matrix, what: str) -> Matrix:
    try:
        G, _ = matrix_inverse(F)
    except SingularMatrixError:
        raise StructureError(f"flat map is singular: {what}") from None
    return G


def _jacobi_from_flat(chart: Chart, G: Matrix, two_form: DifferentialForm, one: DifferentialForm) -> JacobiStructure:
    n = chart.dim
    pi = {}
    for i in range(n):
        for k in range(i + 1, n):
            total = ZERO
            for a in range(n):
                if G[a][i].is_zero():
                    continue
                for b in range(n):
                    w = two_form[a, b]
                    if w.is_zero() or G[b][k].is_zero():
                        continue
                    total = total + G[a][i] * G[b][k] * w
            pi[(i, k)] = total
    E = {}
    for a in range(n):
        total = ZERO
        for j in range(n):
            c = one.comps.get((j,))
            if c is not None:
                total = total + G[a][j] * c
        E[(a,)] = total
    return JacobiStructure(MultiVectorField(chart, 2, pi), MultiVectorField(chart, 1, E))


def contact_flat_matrix(eta: DifferentialForm) -> Matrix:
    """X -> i_X d eta + eta(X) eta on TM."""
    chart = eta.chart
    n = chart.dim
    deta = exterior_derivative(eta)
    e = [eta.comps.get((j,), ZERO) for j in range(n)]
    return [[deta[j, k] + e[j] * e[k] for j in range(n)] for k in range(n)]


def contact_to_jacobi(c) -> JacobiStructure:
    eta = c.eta if isinstance(c, ContactForm) else c
    chart = eta.chart
    G = _flat_inverse(chart, contact_flat_matrix(eta), "not a contact form")
    return _jacobi_from_flat(chart, G, exterior_derivative(eta), eta)


def contact_inverse_matrix(eta: DifferentialForm) -> Matrix:
    """Matrix of (X, f) -> (-i_X d eta - f eta, eta(X))."""
    deta = exterior_derivative(eta)
    return [[-x for x in row] for row in pair_contraction_matrix(deta, eta)]


@dataclass(frozen=True)
class LcsStructure:
    omega: DifferentialForm
    theta: DifferentialForm
    status: Optional[NonvanishingResult] = field(default=None, compare=False)

    @property
    def chart(self) -> Chart:
        return self.omega.chart

    @classmethod
    def checked(cls, omega: DifferentialForm, theta: DifferentialForm, samples=()) -> "LcsStructure":
        res = lcs_residues(omega, theta)
        if res:
            raise StructureError("not a locally conformally symplectic pair", residues=res)
        status = lcs_condition(omega, samples)
        if not status.ok:
            raise StructureError("omega is degenerate", witness=status.witness)
        return cls(omega, theta, status)


def lcs_residues(omega: DifferentialForm, theta: DifferentialForm) -> Dict[str, DifferentialForm]:
    out = {}
    dtheta = exterior_derivative(theta)
    if not dtheta.is_zero():
        out["d theta"] = dtheta
    r = exterior_derivative(omega) - wedge(theta, omega)
    if not r.is_zero():
        out["d omega - theta ^ omega"] = r
    return out


def lcs_condition(omega: DifferentialForm, samples=()) -> NonvanishingResult:
    chart = omega.chart
    if chart.dim % 2:
        raise StructureError("l.c.s. structures live on even-dimensional charts")
    return classify_nonvanishing(top_coefficient(power(omega, chart.dim // 2)), samples)


def lcs_to_jacobi(l) -> JacobiStructure:
    omega, theta = (l.omega, l.theta) if isinstance(l, LcsStructure) else l
    chart = omega.chart
    n = chart.dim
    F = [[omega[j, k] for j in range(n)] for k in range(n)]
    G = _flat_inverse(chart, F, "omega is degenerate")
    return _jacobi_from_flat(chart, G, omega, theta)


# Poissonization, conformal change, maps ---------------------------------------

def poissonize(J: JacobiStructure, base: str = "t") -> Tuple[MultiVectorField, Chart, str]:
    """e^{-t}(pi + d/dt ^ E) on the chart extended by a fresh coordinate."""
    ext, t = J.chart.extend(base)
    pi = J.pi.to_chart(ext)
    E = J.E.to_chart(ext)
    dt = MultiVectorField.basis(ext, t)
    factor = Scalar.exp({t: -1})
    return factor * (pi + wedge(dt, E)), ext, t


def conformal_change(J: JacobiStructure, sigma, samples=()) -> JacobiStructure:
    """(sigma pi, pi#(d sigma) + sigma E) for a nowhere-vanishing sigma."""
    sigma = as_scalar(sigma)
    res = classify_nonvanishing(sigma, samples)
    if not res.ok:
        raise StructureError(f"conformal factor {sigma} is not nowhere-vanishing ({res.status.value})",
                             witness=res.witness)
    return JacobiStructure(sigma * J.pi, hamiltonian_vf(J, sigma))


class MapMode(str, Enum):
    JACOBI = "JACOBI"
    ANTI = "ANTI"
    CONFORMAL = "CONFORMAL"


def map_residues(phi: SmoothMap, J_src: JacobiStructure, J_dst: JacobiStructure, mode: MapMode = MapMode.JACOBI,
                 sigma=None, samples=()) -> Dict[str, dict]:
    if mode == MapMode.CONFORMAL:
        if sigma is None:
            raise ValueError("CONFORMAL mode needs a conformal factor")
        J_src = conformal_change(J_src, sigma, samples)
    if mode == MapMode.ANTI:
        J_dst = -J_dst
    out = {}
    r = related_residues(phi, J_src.pi, J_dst.pi)
    if r:
        out["pi"] = r
    r = related_residues(phi, J_src.E, J_dst.E)
    if r:
        out["E"] = r
    return out


def check_map(phi: SmoothMap, J_src: JacobiStructure, J_dst: JacobiStructure, mode: MapMode = MapMode.JACOBI,
              sigma=None, samples=()) -> bool:
    return not map_residues(phi, J_src, J_dst, mode, sigma, samples)


def sharp_is_skew(m: Matrix) -> bool:
    size = len(m)
    return all((m[i][k] + m[k][i]).is_zero() for i in range(size) for k in range(size))


def contact_roundtrip(eta: DifferentialForm) -> bool:
    """sharp(contact_to_jacobi(eta)) composed with the contact inverse is the identity."""
    S = sharp_matrix(contact_to_jacobi(eta))
    size = eta.chart.dim + 1
    return mequal(matmul(S, contact_inverse_matrix(eta)), identity(size))
