"""The pair contact groupoid M x R x M over a contact chart.

An arrow is (x, t, y) with target x and source y; (x, t, y)(y, s, w) = (x, t + s, w).
The multiplicative function is sigma = t and the contact form is
e^sigma pr3^*eta - pr1^*eta.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import InconclusiveError, StructureError
from .gauge import Verdict, decide, gauge_jacobi
from .geom import Chart, DifferentialForm, SmoothMap, pullback
from .jacobi import (
    JacobiStructure,
    MapMode,
    contact_to_jacobi,
    contact_volume,
    hamiltonian_vf,
    map_residues,
)
from .symcore import ZERO, Scalar, rank

LEFT, RIGHT = "1", "2"


@dataclass
class PairGroupoid:
    base: Chart
    total: Chart
    sigma_var: str
    alpha_map: SmoothMap
    beta_map: SmoothMap
    base_eta: DifferentialForm
    eta_G: DifferentialForm
    contact: Verdict

    @property
    def sigma(self) -> Scalar:
        return Scalar.var(self.sigma_var)

    def left(self, v: str) -> str:
        return v + LEFT

    def right(self, v: str) -> str:
        return v + RIGHT


def _total_chart(base: Chart):
    names = [v + LEFT for v in base.coords] + [v + RIGHT for v in base.coords]
    t, k = "t", 0
    while t in names:
        k += 1
        t = f"t_{k}"
    coords = [v + LEFT for v in base.coords] + [t] + [v + RIGHT for v in base.coords]
    if len(set(coords)) != len(coords):
        raise ValueError("coordinate names collide in the groupoid chart")
    return Chart(f"{base.name}xRx{base.name}", tuple(coords)), t


def groupoid_samples(G: PairGroupoid, base_samples: Sequence[dict]) -> List[dict]:
    """Points (x_i, t_i, x_{i+1}) of the total chart built from base sample points."""
    base_samples = list(base_samples)
    out = []
    k = len(base_samples)
    for i, x in enumerate(base_samples):
        y = base_samples[(i + 1) % k]
        p = {G.left(v): Fraction(x[v]) for v in G.base.coords}
        p.update({G.right(v): Fraction(y[v]) for v in G.base.coords})
        p[G.sigma_var] = Fraction(i % 3 - 1)
        out.append(p)
    return out


def build_pair_groupoid(eta, samples=()) -> PairGroupoid:
    """Assemble (M x R x M, e^sigma pr3^*eta - pr1^*eta, sigma = t); samples live on the base."""
    eta = getattr(eta, "eta", eta)
    base = eta.chart
    total, t = _total_chart(base)
    alpha = SmoothMap(total, base, tuple(Scalar.var(v + RIGHT) for v in base.coords))
    beta = SmoothMap(total, base, tuple(Scalar.var(v + LEFT) for v in base.coords))
    eta_G = Scalar.exp({t: 1}) * pullback(alpha, eta) - pullback(beta, eta)
    G = PairGroupoid(base, total, t, alpha, beta, eta, eta_G, Verdict("UNDECIDED"))
    G.contact = _contact_verdict(G, samples)
    if not G.contact.ok and not G.contact.undecided:
        raise StructureError(f"groupoid form is not contact ({G.contact.status})", witness=G.contact.witness)
    return G


def _contact_verdict(G: PairGroupoid, base_samples) -> Verdict:
    vol = contact_volume(G.eta_G)
    return decide(vol, groupoid_samples(G, base_samples) if base_samples else ())


def _eval_covector(form: DifferentialForm, point: Dict[str, Scalar], vec: Sequence[Scalar]) -> Scalar:
    total = ZERO
    for (k,), c in form.comps.items():
        if vec[k].is_zero():
            continue
        total = total + c.subs(point) * vec[k]
    return total


def multiplicativity_residue(G: PairGroupoid, form: DifferentialForm) -> Scalar:
    """eta_gh(X_g . Y_h) - eta_g(X_g) - e^sigma(g) eta_h(Y_h) at a symbolic composable pair."""
    base = G.base.coords
    x = {v: Scalar.var("x_" + v) for v in base}
    y = {v: Scalar.var("y_" + v) for v in base}
    w = {v: Scalar.var("w_" + v) for v in base}
    sg, sh = Scalar.var("s_g"), Scalar.var("s_h")
    u = [Scalar.var("u_" + v) for v in base]
    m = [Scalar.var("m_" + v) for v in base]
    k = [Scalar.var("k_" + v) for v in base]
    a, b = Scalar.var("a_t"), Scalar.var("b_t")

    def point(left, s, right):
        p = {G.left(v): left[v] for v in base}
        p.update({G.right(v): right[v] for v in base})
        p[G.sigma_var] = s
        return p

    g_pt, h_pt, gh_pt = point(x, sg, y), point(y, sh, w), point(x, sg + sh, w)
    Xg = u + [a] + m
    Yh = m + [b] + k
    XY = u + [a + b] + k
    lhs = _eval_covector(form, gh_pt, XY)
    rhs = _eval_covector(form, g_pt, Xg) + Scalar.exp({"s_g": 1}) * _eval_covector(form, h_pt, Yh)
    return lhs - rhs


def verify_multiplicative(G: PairGroupoid, form: Optional[DifferentialForm] = None) -> bool:
    return multiplicativity_residue(G, G.eta_G if form is None else form).is_zero()


def sigma_multiplicative(G: PairGroupoid) -> bool:
    """sigma(gh) - sigma(g) - sigma(h) at a symbolic composable pair."""
    sg, sh = Scalar.var("s_g"), Scalar.var("s_h")
    return (G.sigma.subs({G.sigma_var: sg + sh}) - G.sigma.subs({G.sigma_var: sg})
            - G.sigma.subs({G.sigma_var: sh})).is_zero()


def gauged_form(G: PairGroupoid, B: DifferentialForm) -> DifferentialForm:
    """eta_G - e^sigma alpha^*B + beta^*B."""
    return G.eta_G - Scalar.exp({G.sigma_var: 1}) * pullback(G.alpha_map, B) + pullback(G.beta_map, B)


@dataclass
class GroupoidMapReport:
    source_conformal: bool
    target_anti: bool
    residues: dict

    @property
    def passed(self) -> bool:
        return self.source_conformal and self.target_anti


def groupoid_jacobi(G: PairGroupoid) -> JacobiStructure:
    return contact_to_jacobi(G.eta_G)


def check_structure_maps(G: PairGroupoid, J_base: JacobiStructure, samples=()) -> GroupoidMapReport:
    """alpha is conformal Jacobi with factor e^sigma and beta is anti-Jacobi."""
    JG = groupoid_jacobi(G)
    ra = map_residues(G.alpha_map, JG, J_base, MapMode.CONFORMAL, sigma=Scalar.exp({G.sigma_var: 1}),
                      samples=samples)
    rb = map_residues(G.beta_map, JG, J_base, MapMode.ANTI)
    return GroupoidMapReport(not ra, not rb, {"alpha": ra, "beta": rb})


def gauge_groupoid_contact(G: PairGroupoid, B: DifferentialForm, samples=()) -> PairGroupoid:
    """Replace the contact form by eta_G - e^sigma alpha^*B + beta^*B (B admissible on the base)."""
    J_base = contact_to_jacobi(G.base_eta)
    gauge_jacobi(J_base, B, samples)  # raises when B is not admissible
    new = PairGroupoid(G.base, G.total, G.sigma_var, G.alpha_map, G.beta_map, G.base_eta - B,
                       gauged_form(G, B), Verdict("UNDECIDED"))
    new.contact = _contact_verdict(new, samples)
    if not new.contact.ok and not new.contact.undecided:
        raise StructureError(f"gauged groupoid form is not contact ({new.contact.status})")
    return new


@dataclass
class KernelReport:
    containment: bool
    source_rank: int
    target_rank: int
    kernel_dim: int
    witness: Optional[dict] = None

    @property
    def spans(self) -> bool:
        return self.source_rank == self.kernel_dim and self.target_rank == self.kernel_dim


def source_target_kernels(G: PairGroupoid, probes: Sequence[Scalar], samples, with_constant: bool = True) -> KernelReport:
    """Hamiltonian fields of beta^*f lie in ker d(alpha) and those of e^sigma alpha^*f in ker d(beta).

    The constant function 1 is adjoined to the probes by default: the fibers of
    alpha have dimension dim M + 1, one more than the coordinate probes provide.
    """
    if not samples:
        raise InconclusiveError("kernel checks are made at sample points")
    JG = groupoid_jacobi(G)
    probes = list(probes) + ([Scalar.const(1)] if with_constant else [])
    es = Scalar.exp({G.sigma_var: 1})
    left_fields = [hamiltonian_vf(JG, G.beta_map.pull_scalar(f)) for f in probes]
    right_fields = [hamiltonian_vf(JG, es * G.alpha_map.pull_scalar(f)) for f in probes]
    ja, jb = G.alpha_map.jacobian(), G.beta_map.jacobian()
    n = G.total.dim
    kdim = n - G.base.dim
    pts = groupoid_samples(G, samples)
    containment, witness = True, None
    src_rank = tgt_rank = kdim
    for p in pts:
        L = [[X.comps.get((i,), ZERO).specialize(p) for i in range(n)] for X in left_fields]
        R = [[X.comps.get((i,), ZERO).specialize(p) for i in range(n)] for X in right_fields]
        for rows, jac in ((L, ja), (R, jb)):
            for r in rows:
                for jrow in jac:
                    if not sum((jrow[i].specialize(p) * r[i] for i in range(n)), ZERO).is_zero():
                        containment, witness = False, {k: v for k, v in p.items()}
        src_rank = min(src_rank, rank(L))
        tgt_rank = min(tgt_rank, rank(R))
    return KernelReport(containment, src_rank, tgt_rank, kdim, witness)


def check_source_target_kernels(G: PairGroupoid, probes: Sequence[Scalar], samples) -> bool:
    rep = source_target_kernels(G, probes, samples)
    if rep.containment and not rep.spans:
        raise StructureError(f"insufficient probes: hamiltonian fields span {min(rep.source_rank, rep.target_rank)} "
                             f"of {rep.kernel_dim} kernel directions")
    return rep.containment and rep.spans
