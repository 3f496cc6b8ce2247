"""Gauge transformations by pairs (B1, B) and by 1-forms B through (dB, B)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .diracjacobi import (
    DJStructure,
    _const_point,
    classical_gauge,
    diracize,
    graph_of_jacobi,
    jet_bracket,
    pushforward_fiber,
    same_span,
)
from .e1 import ExtendedCovector, ExtendedSection, PairForm, tilde_i
from .errors import ChartMismatchError, InconclusiveError, StructureError
from .geom import Chart, DifferentialForm, MultiVectorField, SmoothMap, exterior_derivative, pullback, wedge
from .jacobi import (
    ContactForm,
    ExtendedBundleMap,
    JacobiStructure,
    LcsStructure,
    MapKind,
    contact_condition,
    jacobi_from_sharp,
    lcs_condition,
    lcs_residues,
    pair_contraction_matrix,
    poissonize,
    sharp_matrix,
)
from .symcore import (
    ZERO,
    Nonvanishing,
    Scalar,
    classify_nonvanishing,
    determinant,
    identity,
    matmul,
    matrix_inverse,
    rank,
    same_row_space,
)
from .symcore.matrix import madd, mequal

UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class GaugePair:
    B1: DifferentialForm
    B: DifferentialForm

    @classmethod
    def exact(cls, B: DifferentialForm) -> "GaugePair":
        return cls(exterior_derivative(B), B)

    @property
    def closed(self) -> bool:
        return (self.B1 - exterior_derivative(self.B)).is_zero()


@dataclass
class Verdict:
    """Outcome of a nonvanishing decision, UNDECIDED when no certificate and no samples."""

    status: str
    witness: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.status in (Nonvanishing.UNIT.value, Nonvanishing.NONVANISHING_ON_SAMPLES.value)

    @property
    def undecided(self) -> bool:
        return self.status == UNDECIDED


def decide(s: Scalar, samples) -> Verdict:
    try:
        res = classify_nonvanishing(s, samples)
    except InconclusiveError:
        return Verdict(UNDECIDED)
    return Verdict(res.status.value, res.witness)


def _require(v: Verdict, what: str):
    if v.undecided:
        raise InconclusiveError(f"{what}: cannot decide without sample points")
    if not v.ok:
        raise StructureError(f"{what} ({v.status})", witness=v.witness)


def gauge_frame(L, gp: GaugePair) -> List[ExtendedSection]:
    """(X, f) + (alpha, g) -> (X, f) + (alpha + i_X B1 + f B, g - B(X))."""
    frame = L.frame if isinstance(L, DJStructure) else L
    shift = PairForm(gp.B1, gp.B)
    out = []
    for s in frame:
        if not s.chart.same(gp.B.chart):
            raise ChartMismatchError("gauge form lives on another chart")
        out.append(ExtendedSection(s.ev, s.ec + ExtendedCovector.from_pair(tilde_i(s.ev, shift))))
    return out


def gauge_dj(L: DJStructure, B: DifferentialForm) -> DJStructure:
    return DJStructure(L.chart, tuple(gauge_frame(L, GaugePair.exact(B))))


def gauge_matrix(B: DifferentialForm) -> ExtendedBundleMap:
    """(dB, B)~ : TM x R -> T*M x R."""
    return ExtendedBundleMap(B.chart, MapKind.VEC_TO_COVEC, pair_contraction_matrix(exterior_derivative(B), B))


@dataclass
class AdmissibilityReport:
    Phi: ExtendedBundleMap
    det: Scalar
    verdict: Verdict
    identically_zero: bool = False

    @property
    def status(self) -> str:
        return self.verdict.status


def admissibility(J: JacobiStructure, B: DifferentialForm, samples=()) -> AdmissibilityReport:
    S = sharp_matrix(J)
    Bt = gauge_matrix(B).matrix
    Phi = madd(identity(J.chart.dim + 1), matmul(Bt, S))
    det = determinant(Phi)
    verdict = decide(det, samples)
    samples = list(samples)
    if det.is_zero() and samples:
        # an identically vanishing determinant vanishes at every sample; report the first one
        verdict = Verdict(Nonvanishing.VANISHES_AT_SAMPLE.value, {k: Fraction(v) for k, v in samples[0].items()})
    return AdmissibilityReport(ExtendedBundleMap(J.chart, MapKind.ENDO_COVEC, Phi), det, verdict, det.is_zero())


def gauge_jacobi(J: JacobiStructure, B: DifferentialForm, samples=()) -> JacobiStructure:
    """Read (pi_B, E_B) off sharp o (Id + (dB, B)~ o sharp)^(-1)."""
    rep = admissibility(J, B, samples)
    _require(rep.verdict, "1-form is not admissible")
    inv, _ = matrix_inverse(rep.Phi.matrix)
    return jacobi_from_sharp(J.chart, matmul(sharp_matrix(J), inv))


@dataclass
class AlgebroidIsoReport:
    anchor: bool
    bracket: bool
    cocycle: bool
    bracket_witness: Optional[tuple] = None

    @property
    def passed(self) -> bool:
        return self.anchor and self.bracket and self.cocycle


def _covector_frame(chart: Chart) -> List[ExtendedCovector]:
    out = [ExtendedCovector(DifferentialForm.basis(chart, v), ZERO) for v in chart.coords]
    out.append(ExtendedCovector(DifferentialForm.zero(chart, 1), Scalar.const(1)))
    return out


def verify_algebroid_iso(J: JacobiStructure, B: DifferentialForm, samples=()) -> AlgebroidIsoReport:
    rep = admissibility(J, B, samples)
    _require(rep.verdict, "1-form is not admissible")
    JB = gauge_jacobi(J, B, samples)
    Phi = rep.Phi
    S, SB = sharp_matrix(J), sharp_matrix(JB)
    anchor = mequal(S, matmul(SB, Phi.matrix))
    witness = None
    frame = _covector_frame(J.chart)
    for i, a in enumerate(frame):
        for j, b in enumerate(frame):
            lhs = Phi.apply(jet_bracket(J, a, b))
            rhs = jet_bracket(JB, Phi.apply(a), Phi.apply(b))
            if not (lhs - rhs).is_zero():
                witness = (i, j, lhs - rhs)
                break
        if witness:
            break
    n = J.chart.dim
    c = [[-J.E.comps.get((i,), ZERO) for i in range(n)] + [ZERO]]
    cB = [[-JB.E.comps.get((i,), ZERO) for i in range(n)] + [ZERO]]
    cocycle = mequal(matmul(cB, Phi.matrix), c)
    return AlgebroidIsoReport(anchor, witness is None, cocycle, witness)


def gauge_contact(c, B: DifferentialForm, samples=()) -> ContactForm:
    """eta_B = eta - B, required to be contact."""
    eta = c.eta if isinstance(c, ContactForm) else c
    new = eta - B
    try:
        res = contact_condition(new, samples)
    except InconclusiveError:
        raise InconclusiveError("cannot decide contactness of eta - B without sample points") from None
    if not res.ok:
        raise StructureError(f"eta - B is not contact ({res.status.value})", witness=res.witness)
    return ContactForm(new, res)


def gauge_lcs(l: LcsStructure, B: DifferentialForm, samples=()) -> LcsStructure:
    """(omega - dB - B ^ theta, theta)."""
    omega = l.omega - exterior_derivative(B) - wedge(B, l.theta)
    res = lcs_residues(omega, l.theta)
    if res:
        raise StructureError("gauged pair fails the l.c.s. identities", residues=res)
    status = lcs_condition(omega, samples)
    if not status.ok:
        raise StructureError(f"gauged 2-form is degenerate ({status.status.value})", witness=status.witness)
    return LcsStructure(omega, l.theta, status)


def btilde(B: DifferentialForm, base: str = "t"):
    """e^t (dB + dt ^ B) on the chart extended by a fresh coordinate; returns (form, chart, t)."""
    ext, t = B.chart.extend(base)
    dt = DifferentialForm.basis(ext, t)
    form = Scalar.exp({t: 1}) * (exterior_derivative(B).to_chart(ext) + wedge(dt, B.to_chart(ext)))
    return form, ext, t


def _extend_samples(samples, t: str):
    out = []
    for p in samples:
        for tv in (0, 1):
            q = dict(p)
            q[t] = Fraction(tv)
            out.append(q)
    return out


def poisson_gauge_operator(pi: MultiVectorField, B2: DifferentialForm):
    """The sharp matrix of pi and Id + B2_flat o pi_sharp."""
    n = pi.chart.dim
    P = [[pi[i, k] for i in range(n)] for k in range(n)]
    Bf = [[B2[j, k] for j in range(n)] for k in range(n)]
    return P, madd(identity(n), matmul(Bf, P))


@dataclass
class CommuteReport:
    passed: bool
    details: dict

    def __bool__(self):
        return self.passed


def commute_diracization(L: DJStructure, B: DifferentialForm) -> CommuteReport:
    left, ext, t = diracize(gauge_dj(L, B))
    right_src, _, _ = diracize(L)
    Bt, _, _ = btilde(B)
    right = classical_gauge(right_src, Bt)
    closed = exterior_derivative(Bt).is_zero()
    ok = same_span(left, right)
    return CommuteReport(ok and closed, {"span": ok, "btilde_closed": closed})


def commute_poissonization(J: JacobiStructure, B: DifferentialForm, samples=()) -> CommuteReport:
    rep = admissibility(J, B, samples)
    pi_t, ext, t = poissonize(J)
    Bt, _, _ = btilde(B)
    n = ext.dim
    P, M = poisson_gauge_operator(pi_t, Bt)
    det_p = determinant(M)
    ext_samples = _extend_samples(samples, t)
    poisson_verdict = decide(det_p, ext_samples)
    details = {
        "jacobi_status": rep.status,
        "poisson_status": poisson_verdict.status,
        "statuses_agree": rep.verdict.ok == poisson_verdict.ok and rep.verdict.undecided == poisson_verdict.undecided,
    }
    _require(rep.verdict, "1-form is not admissible")
    inv, _ = matrix_inverse(M)
    gauged_sharp = matmul(P, inv)
    pi_B, _, _ = poissonize(gauge_jacobi(J, B, samples))
    target = [[pi_B[i, k] for i in range(n)] for k in range(n)]
    details["matrix_identity"] = mequal(gauged_sharp, target)
    details["btilde_closed"] = exterior_derivative(Bt).is_zero()
    ok = details["matrix_identity"] and details["btilde_closed"] and details["statuses_agree"]
    return CommuteReport(ok, details)


def verify_commute(obj, B: DifferentialForm, mode: str, samples=()) -> bool:
    mode = mode.upper()
    if mode == "DIRACIZATION":
        L = obj if isinstance(obj, DJStructure) else graph_of_jacobi(obj)
        return commute_diracization(L, B).passed
    if mode == "POISSONIZATION":
        if not isinstance(obj, JacobiStructure):
            raise TypeError("Poissonization commutation needs a Jacobi structure")
        return commute_poissonization(obj, B, samples).passed
    raise ValueError(f"unknown mode {mode}")


def pullback_lemma_residues(phi: SmoothMap, L_src: DJStructure, B: DifferentialForm, samples):
    """Sample points where phi_*(tau_{phi^*B} L) and tau_B(phi_* L) differ."""
    if not B.chart.same(phi.target):
        raise ChartMismatchError("B must live on the map's target chart")
    samples = list(samples)
    if not samples:
        raise InconclusiveError("the pullback lemma is checked at sample points")
    gauged_src = gauge_dj(L_src, pullback(phi, B))
    dB = exterior_derivative(B)
    m = phi.target.dim
    bad = []
    for point in samples:
        lhs = pushforward_fiber(phi, gauged_src, point)
        image = _const_point(phi.source, phi, point)
        Bv = [B.comps.get((j,), ZERO).specialize(image) for j in range(m)]
        dBv = [[dB[j, k].specialize(image) for k in range(m)] for j in range(m)]
        rhs = []
        for row in pushforward_fiber(phi, L_src, point):
            Y, f, alpha, g = row[:m], row[m], row[m + 1:2 * m + 1], row[2 * m + 1]
            shift = [sum((Y[j] * dBv[j][k] for j in range(m)), ZERO) + f * Bv[k] for k in range(m)]
            new_alpha = [a + s for a, s in zip(alpha, shift)]
            new_g = g - sum((Bv[j] * Y[j] for j in range(m)), ZERO)
            rhs.append(Y + [f] + new_alpha + [new_g])
        if not (rank(lhs) == rank(rhs) and same_row_space(lhs, rhs)):
            bad.append({k: Fraction(v) for k, v in point.items()})
    return bad


def pullback_lemma_check(phi: SmoothMap, L_src: DJStructure, B: DifferentialForm, samples) -> bool:
    return not pullback_lemma_residues(phi, L_src, B, samples)
