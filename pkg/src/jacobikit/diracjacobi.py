"""Dirac-Jacobi subbundles presented by frames of n+1 extended sections.

Also holds the classical (TM + T*M) counterpart used on the Diracized chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .e1 import (
    ExtendedCovector,
    ExtendedSection,
    ExtendedVector,
    dorfman,
    pairing,
    tilde_d,
    tilde_i,
    tilde_lie,
)
from .errors import ChartMismatchError, EvaluationError, InconclusiveError, NotSubmersionError, StructureError
from .geom import (
    Chart,
    DifferentialForm,
    MultiVectorField,
    SmoothMap,
    contract_covector,
    exterior_derivative,
    interior_product,
    lie_derivative,
    pair,
    schouten_bracket,
)
from .jacobi import JacobiStructure, sharp_map
from .symcore import (
    ONE,
    ZERO,
    Nonvanishing,
    NonvanishingResult,
    Scalar,
    classify_nonvanishing,
    determinant,
    echelon,
    nullspace,
    rank,
    same_row_space,
    transpose,
)
from .symcore.matrix import row_span_contains

MINOR_SEARCH_LIMIT = 256


@dataclass(frozen=True)
class DJStructure:
    chart: Chart
    frame: Tuple[ExtendedSection, ...]

    def __post_init__(self):
        frame = tuple(self.frame)
        object.__setattr__(self, "frame", frame)
        for s in frame:
            if not s.chart.same(self.chart):
                raise ChartMismatchError("frame section lives on another chart")

    def matrix(self):
        return [s.to_row() for s in self.frame]

    def __len__(self):
        return len(self.frame)


@dataclass
class DJReport:
    isotropy: bool
    rank_ok: bool
    integrable: bool
    rank_status: str = "UNIT"
    isotropy_witness: Optional[tuple] = None
    rank_witness: Optional[dict] = None
    integrability_witness: Optional[tuple] = None

    @property
    def passed(self) -> bool:
        return self.isotropy and self.rank_ok and self.integrable


def _rank_certificate(rows, samples) -> Tuple[bool, str, Optional[dict]]:
    """Pointwise full row rank: a UNIT minor, else exact rank at every sample."""
    k = len(rows)
    width = len(rows[0])
    half = width // 2
    preferred = [tuple(range(half, width)), tuple(range(half))]
    tried = set()
    for cols in preferred + list(combinations(range(width), k))[:MINOR_SEARCH_LIMIT]:
        if len(cols) != k or cols in tried:
            continue
        tried.add(cols)
        if determinant([[r[c] for c in cols] for r in rows]).is_unit():
            return True, Nonvanishing.UNIT.value, None
    if rank(rows) < k:
        return False, Nonvanishing.ZERO.value, None
    samples = list(samples)
    if not samples:
        return False, "UNDECIDED", None
    for point in samples:
        vals = [[x.specialize(point) for x in r] for r in rows]
        if rank(vals) < k:
            return False, Nonvanishing.VANISHES_AT_SAMPLE.value, {v: Fraction(c) for v, c in point.items()}
    return True, Nonvanishing.NONVANISHING_ON_SAMPLES.value, None


def verify_dj(L, samples=()) -> DJReport:
    frame = L.frame if isinstance(L, DJStructure) else tuple(L)
    chart = frame[0].chart
    if len(frame) != chart.dim + 1:
        raise StructureError(f"a Dirac-Jacobi frame on a {chart.dim}-chart needs {chart.dim + 1} sections, got {len(frame)}")
    iso_w = None
    for i in range(len(frame)):
        for j in range(i, len(frame)):
            v = pairing(frame[i], frame[j])
            if not v.is_zero():
                iso_w = (i, j, v)
                break
        if iso_w:
            break
    rows = [s.to_row() for s in frame]
    rank_ok, rank_status, rank_w = _rank_certificate(rows, samples)
    red, piv, _ = echelon(rows)
    int_w = None
    for i in range(len(frame)):
        for j in range(len(frame)):
            br = dorfman(frame[i], frame[j])
            if not row_span_contains(red, piv, br.to_row()):
                int_w = (i, j, br)
                break
        if int_w:
            break
    return DJReport(iso_w is None, rank_ok, int_w is None, rank_status, iso_w, rank_w, int_w)


def graph_of_jacobi(J: JacobiStructure) -> DJStructure:
    chart = J.chart
    S = sharp_map(J)
    frame = []
    for i in range(chart.dim):
        dx = ExtendedCovector(DifferentialForm.basis(chart, chart.coords[i]), ZERO)
        frame.append(ExtendedSection(S.apply(dx), dx))
    frame.append(ExtendedSection(ExtendedVector(J.E, ZERO), ExtendedCovector(DifferentialForm.zero(chart, 1), ONE)))
    return DJStructure(chart, tuple(frame))


def graph_of_precontact(eta: DifferentialForm) -> DJStructure:
    """Sections (X, f) + (i_X d eta + f eta, -eta(X)) on the coordinate frame."""
    chart = eta.chart
    deta = exterior_derivative(eta)
    frame = []
    for v in chart.coords:
        X = MultiVectorField.basis(chart, v)
        frame.append(ExtendedSection.build(X, ZERO, interior_product(X, deta), -eta[v]))
    frame.append(ExtendedSection.build(MultiVectorField.zero(chart, 1), ONE, eta, ZERO))
    return DJStructure(chart, tuple(frame))


def opposite(L: DJStructure) -> DJStructure:
    return DJStructure(L.chart, tuple(ExtendedSection(-s.ev, s.ec) for s in L.frame))


def same_span(a, b) -> bool:
    """Frames span the same subbundle over the function field."""
    ma = a.matrix() if hasattr(a, "matrix") else [s.to_row() for s in a]
    mb = b.matrix() if hasattr(b, "matrix") else [s.to_row() for s in b]
    return same_row_space(ma, mb)


def kernel_at(L: DJStructure, point) -> List[Tuple[List[Scalar], Scalar]]:
    """Basis of L intersected with (TM x R) + 0 at a point, as (vector components, f)."""
    n = L.chart.dim
    rows = [[x.specialize(point) for x in s.to_row()] for s in L.frame]
    vec = [r[: n + 1] for r in rows]
    cov = [r[n + 1:] for r in rows]
    out = []
    for c in nullspace(transpose(cov)):
        v = [sum((c[i] * vec[i][j] for i in range(len(rows))), ZERO) for j in range(n + 1)]
        out.append((v[:n], v[n]))
    red = [x[0] + [x[1]] for x in out]
    if red and rank(red) < len(red):
        raise StructureError("frame is not of full rank at the point")
    return out


@dataclass
class ContactDJReport:
    kernel: NonvanishingResult
    cokernel: NonvanishingResult

    @property
    def passed(self) -> bool:
        return self.kernel.ok and self.cokernel.ok


def contact_dj_report(L: DJStructure, samples=()) -> ContactDJReport:
    n = L.chart.dim
    if n % 2 != 1:
        raise StructureError("contact Dirac-Jacobi structures live on odd-dimensional charts")
    rows = L.matrix()
    cov = determinant([r[n + 1:] for r in rows])
    vec = determinant([r[: n + 1] for r in rows])
    return ContactDJReport(classify_nonvanishing(cov, samples), classify_nonvanishing(vec, samples))


def is_contact_dj(L: DJStructure, samples=()) -> bool:
    return contact_dj_report(L, samples).passed


def jet_bracket(J: JacobiStructure, a: ExtendedCovector, b: ExtendedCovector) -> ExtendedCovector:
    """[a, b] = L~_{sharp a} b - i_{sharp b} d~ a on T*M x R."""
    S = sharp_map(J)
    va, vb = S.apply(a), S.apply(b)
    out = tilde_lie(va, b.as_pair()) - tilde_i(vb, tilde_d(a.as_pair()))
    return ExtendedCovector.from_pair(out)


def _point_values(point):
    return {k: Fraction(v) for k, v in point.items()}


def _const_point(chart: Chart, phi: SmoothMap, point):
    image = {}
    for v, c in zip(phi.target.coords, phi.components):
        val = c.specialize(point)
        if not val.is_constant():
            raise EvaluationError(f"image coordinate {v} is not rational at the sample")
        image[v] = val.constant_value()
    return image


def pushforward_fiber(phi: SmoothMap, L_src: DJStructure, point) -> List[List[Scalar]]:
    """Rows spanning phi_*(L) at phi(point), in the target's extended frame."""
    ns, m = phi.source.dim, phi.target.dim
    jac = [[x.specialize(point) for x in row] for row in phi.jacobian()]
    if rank(jac) < m:
        raise NotSubmersionError(f"map is not a submersion at {point}")
    rows = [[x.specialize(point) for x in s.to_row()] for s in L_src.frame]
    k = len(rows)
    vec = [r[: ns + 1] for r in rows]
    cov = [r[ns + 1:] for r in rows]
    # unknowns (c_1..c_k, alpha_1..alpha_m, g): sum c_i cov_i = (J^T alpha, g)
    system = []
    for a in range(ns + 1):
        eq = [cov[i][a] for i in range(k)]
        eq += [-jac[j][a] if a < ns else ZERO for j in range(m)]
        eq += [-ONE if a == ns else ZERO]
        system.append(eq)
    out = []
    for sol in nullspace(system):
        c, alpha, g = sol[:k], sol[k:k + m], sol[k + m]
        X = [sum((c[i] * vec[i][a] for i in range(k)), ZERO) for a in range(ns + 1)]
        pushed = [sum((jac[j][a] * X[a] for a in range(ns)), ZERO) for j in range(m)]
        out.append(pushed + [X[ns]] + list(alpha) + [g])
    return out


def forward_dj_residues(phi: SmoothMap, L_src: DJStructure, L_dst: DJStructure, samples):
    if not L_src.chart.same(phi.source) or not L_dst.chart.same(phi.target):
        raise ChartMismatchError("frames do not live on the map's charts")
    samples = list(samples)
    if not samples:
        raise InconclusiveError("forward Dirac-Jacobi checks need sample points")
    bad = []
    for point in samples:
        pushed = pushforward_fiber(phi, L_src, point)
        image = _const_point(phi.source, phi, point)
        target = [[x.specialize(image) for x in s.to_row()] for s in L_dst.frame]
        if not (rank(pushed) == rank(target) == L_dst.chart.dim + 1 and same_row_space(pushed, target)):
            bad.append(_point_values(point))
    return bad


def forward_dj_check(phi: SmoothMap, L_src: DJStructure, L_dst: DJStructure, samples) -> bool:
    return not forward_dj_residues(phi, L_src, L_dst, samples)


# classical Dirac structures on TM + T*M ----------------------------------------

@dataclass(frozen=True)
class ClassicalSection:
    X: MultiVectorField
    alpha: DifferentialForm

    @property
    def chart(self):
        return self.X.chart

    def to_row(self):
        n = self.chart.dim
        return [self.X.comps.get((i,), ZERO) for i in range(n)] + [self.alpha.comps.get((i,), ZERO) for i in range(n)]

    def __add__(self, o):
        return ClassicalSection(self.X + o.X, self.alpha + o.alpha)


def courant_pairing(a: ClassicalSection, b: ClassicalSection) -> Scalar:
    return Fraction(1, 2) * (pair(a.alpha, b.X) + pair(b.alpha, a.X))


def classical_dorfman(a: ClassicalSection, b: ClassicalSection) -> ClassicalSection:
    return ClassicalSection(schouten_bracket(a.X, b.X),
                            lie_derivative(a.X, b.alpha) - interior_product(b.X, exterior_derivative(a.alpha)))


def diracize_section(s: ExtendedSection, ext: Chart, t: str) -> ClassicalSection:
    """(X, f) + (alpha, g) -> (X + f d/dt) + e^t (alpha + g dt)."""
    X = s.ev.X.to_chart(ext) + s.ev.f * MultiVectorField.basis(ext, t)
    alpha = s.ec.alpha.to_chart(ext) + s.ec.g * DifferentialForm.basis(ext, t)
    return ClassicalSection(X, Scalar.exp({t: 1}) * alpha)


def diracize(L, base: str = "t"):
    """Frame on the chart extended by a fresh coordinate; returns (frame, chart, t)."""
    chart = L.chart
    ext, t = chart.extend(base)
    return [diracize_section(s, ext, t) for s in L.frame], ext, t


def graph_of_poisson(pi: MultiVectorField) -> List[ClassicalSection]:
    chart = pi.chart
    out = []
    for v in chart.coords:
        dx = DifferentialForm.basis(chart, v)
        out.append(ClassicalSection(contract_covector(dx, pi), dx))
    return out


def classical_gauge(frame: Sequence[ClassicalSection], B2: DifferentialForm) -> List[ClassicalSection]:
    """X + alpha -> X + (alpha + i_X B2)."""
    return [ClassicalSection(s.X, s.alpha + interior_product(s.X, B2)) for s in frame]


def verify_dirac(frame: Sequence[ClassicalSection]) -> bool:
    """Isotropy and bracket closure of a classical frame (rank taken generically)."""
    if any(not courant_pairing(a, b).is_zero() for a in frame for b in frame):
        return False
    rows = [s.to_row() for s in frame]
    red, piv, _ = echelon(rows)
    if len(piv) != frame[0].chart.dim:
        return False
    return all(row_span_contains(red, piv, classical_dorfman(a, b).to_row()) for a in frame for b in frame)
