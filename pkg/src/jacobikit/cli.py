"""jacobi-kit: load a definition file and run verification or transformation commands.

Exit codes: 0 all checks pass, 1 some check fails, 2 input or usage error,
3 some check is undecided (a nonvanishing question needs sample points).
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional

from . import diracjacobi as dj
from . import gauge, gencontact, glb, groupoid
from .errors import InconclusiveError, JacobiKitError, ParseError
from .geom import Chart, DifferentialForm, MultiVectorField, schouten_bracket
from .jacobi import (
    ContactForm,
    JacobiStructure,
    LcsStructure,
    contact_to_jacobi,
    contact_volume,
    lcs_residues,
    lcs_to_jacobi,
    poissonize,
    verify_jacobi,
)
from .symcore import Scalar

PASS, FAIL, UNDECIDED = "PASS", "FAIL", "UNDECIDED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(JacobiKitError):
    pass


# definition files --------------------------------------------------------------

@dataclass
class DJDecl:
    chart: Chart
    how: str
    source: str


@dataclass
class Workspace:
    charts: Dict[str, Chart] = field(default_factory=dict)
    oneforms: Dict[str, DifferentialForm] = field(default_factory=dict)
    twoforms: Dict[str, DifferentialForm] = field(default_factory=dict)
    jacobis: Dict[str, JacobiStructure] = field(default_factory=dict)
    contacts: Dict[str, ContactForm] = field(default_factory=dict)
    lcss: Dict[str, LcsStructure] = field(default_factory=dict)
    samples: Dict[str, List[dict]] = field(default_factory=dict)
    djs: Dict[str, DJDecl] = field(default_factory=dict)

    def get(self, kind: str, name: str):
        table = getattr(self, kind)
        if name not in table:
            raise UsageError(f"unknown {kind[:-1]} '{name}'")
        return table[name]

    def jacobi(self, name: str) -> JacobiStructure:
        """A Jacobi structure by name; contact forms and l.c.s. pairs are converted."""
        if name in self.jacobis:
            return self.jacobis[name]
        if name in self.contacts:
            return contact_to_jacobi(self.contacts[name].eta)
        if name in self.lcss:
            return lcs_to_jacobi(self.lcss[name])
        raise UsageError(f"unknown Jacobi structure '{name}'")

    def dj(self, name: str) -> dj.DJStructure:
        if name in self.djs:
            d = self.djs[name]
            if d.how == "precontact":
                return dj.graph_of_precontact(self.get("oneforms", d.source))
            return dj.graph_of_jacobi(self.jacobi(d.source))
        return dj.graph_of_jacobi(self.jacobi(name))

    def sample_grid(self, name: Optional[str], chart: Chart) -> List[dict]:
        if name is None:
            return []
        pts = self.get("samples", name)
        if pts and set(pts[0]) != set(chart.coords):
            raise UsageError(f"samples '{name}' live on another chart")
        return pts


_HEAD = re.compile(r"^(\w+)\s+([A-Za-z_]\w*)\s*(?:on\s+([A-Za-z_]\w*)\s*)?:\s*(.*)$")


def _items(body: str) -> List[str]:
    return [x.strip() for x in body.split(";") if x.strip()]


def _assignment(item: str, lineno: int):
    if "=" not in item:
        raise ParseError(f"expected '<name> = <expr>' in '{item}'", line=lineno)
    lhs, rhs = item.split("=", 1)
    return lhs.strip(), rhs.strip()


def _expr(chart: Chart, text: str, lineno: int) -> Scalar:
    try:
        return chart.parse(text)
    except ParseError as e:
        raise ParseError(f"{e.message} in '{text}'", line=lineno) from None


def _var(chart: Chart, v: str, lineno: int) -> str:
    if v not in chart.coords:
        raise ParseError(f"'{v}' is not a coordinate of chart {chart.name}", line=lineno)
    return v


def _form_terms(chart: Chart, degree: int, items, lineno: int) -> DifferentialForm:
    terms = {}
    for item in items:
        lhs, rhs = _assignment(item, lineno)
        names = tuple(_var(chart, v.strip(), lineno) for v in lhs.split("^"))
        if len(names) != degree:
            raise ParseError(f"expected a degree-{degree} term, got '{lhs}'", line=lineno)
        terms[names] = _expr(chart, rhs, lineno)
    return DifferentialForm.from_terms(chart, degree, terms)


def parse_workspace(text: str) -> Workspace:
    ws = Workspace()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEAD.match(line)
        if not m:
            raise ParseError(f"cannot read line: {line}", line=lineno)
        kind, name, chart_name, body = m.groups()
        if kind == "chart":
            _unique(ws.charts, name, lineno)
            coords = body.split()
            if not coords or len(set(coords)) != len(coords):
                raise ParseError("a chart needs distinct coordinate names", line=lineno)
            ws.charts[name] = Chart(name, tuple(coords))
            continue
        if chart_name is None:
            raise ParseError(f"'{kind}' needs 'on <chart>'", line=lineno)
        if chart_name not in ws.charts:
            raise ParseError(f"unknown chart '{chart_name}'", line=lineno)
        chart = ws.charts[chart_name]
        if kind == "oneform":
            _unique(ws.oneforms, name, lineno)
            ws.oneforms[name] = _form_terms(chart, 1, _items(body), lineno)
        elif kind == "twoform":
            _unique(ws.twoforms, name, lineno)
            ws.twoforms[name] = _form_terms(chart, 2, _items(body), lineno)
        elif kind == "jacobi":
            _unique(ws.jacobis, name, lineno)
            ws.jacobis[name] = _parse_jacobi(chart, body, lineno)
        elif kind == "contact":
            _unique(ws.contacts, name, lineno)
            eta = _ref(ws.oneforms, body.strip(), "one-form", lineno)
            ws.contacts[name] = ContactForm(_on(eta, chart, lineno))
        elif kind == "lcs":
            _unique(ws.lcss, name, lineno)
            parts = dict(_assignment(i, lineno) for i in _items(body))
            if set(parts) != {"omega", "theta"}:
                raise ParseError("lcs needs 'omega = <twoform> ; theta = <oneform>'", line=lineno)
            omega = _on(_ref(ws.twoforms, parts["omega"], "two-form", lineno), chart, lineno)
            theta = _on(_ref(ws.oneforms, parts["theta"], "one-form", lineno), chart, lineno)
            ws.lcss[name] = LcsStructure(omega, theta)
        elif kind == "samples":
            _unique(ws.samples, name, lineno)
            ws.samples[name] = _parse_samples(chart, body, lineno)
        elif kind == "dj":
            _unique(ws.djs, name, lineno)
            how, _, src = body.partition(" ")
            if how not in ("graph", "precontact") or not src.strip():
                raise ParseError("dj needs 'graph <jacobi>' or 'precontact <oneform>'", line=lineno)
            ws.djs[name] = DJDecl(chart, how, src.strip())
        else:
            raise ParseError(f"unknown declaration '{kind}'", line=lineno)
    return ws


def _unique(table, name, lineno):
    if name in table:
        raise ParseError(f"duplicate name '{name}'", line=lineno)


def _ref(table, name, what, lineno):
    if name not in table:
        raise ParseError(f"unknown {what} '{name}'", line=lineno)
    return table[name]


def _on(obj, chart: Chart, lineno: int):
    if not obj.chart.same(chart):
        raise ParseError(f"referenced entity does not live on chart {chart.name}", line=lineno)
    return obj


def _parse_jacobi(chart: Chart, body: str, lineno: int) -> JacobiStructure:
    pi_terms, e_terms, mode = {}, {}, None
    for item in _items(body):
        for key in ("pi", "E"):
            if item == key or item.startswith(key + " "):
                mode, item = key, item[len(key):].strip()
        if not item:
            continue
        if mode is None:
            raise ParseError("jacobi terms must follow 'pi' or 'E'", line=lineno)
        lhs, rhs = _assignment(item, lineno)
        if mode == "pi":
            names = tuple(_var(chart, v.strip(), lineno) for v in lhs.split("^"))
            if len(names) != 2:
                raise ParseError(f"bivector terms look like 'q^p = ...', got '{lhs}'", line=lineno)
            pi_terms[names] = _expr(chart, rhs, lineno)
        else:
            e_terms[(_var(chart, lhs, lineno),)] = _expr(chart, rhs, lineno)
    return JacobiStructure(MultiVectorField.from_terms(chart, 2, pi_terms),
                           MultiVectorField.from_terms(chart, 1, e_terms))


def _parse_samples(chart: Chart, body: str, lineno: int) -> List[dict]:
    pts = []
    for item in _items(body):
        if not (item.startswith("(") and item.endswith(")")):
            raise ParseError(f"sample points look like '(1, 0, 1/2)', got '{item}'", line=lineno)
        vals = [v.strip() for v in item[1:-1].split(",")]
        if len(vals) != chart.dim:
            raise ParseError(f"sample point has {len(vals)} values, chart {chart.name} has {chart.dim}", line=lineno)
        try:
            pts.append({v: Fraction(x) for v, x in zip(chart.coords, vals)})
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational in '{item}'", line=lineno) from None
    return pts


def check_workspace(ws: Workspace) -> List[str]:
    """Eager invariant checks; returns error messages with residues."""
    errors = []
    for name, J in ws.jacobis.items():
        rep = verify_jacobi(J)
        if not rep.passed:
            errors.append(f"jacobi {name} fails: c1 = {rep.c1}; c2 = {rep.c2}")
    for name, c in ws.contacts.items():
        v = gauge.decide(contact_volume(c.eta), ())
        if not v.ok and not v.undecided:
            errors.append(f"contact {name} is degenerate: eta ^ (d eta)^n = {contact_volume(c.eta)}")
    for name, l in ws.lcss.items():
        for what, r in lcs_residues(l.omega, l.theta).items():
            errors.append(f"lcs {name} fails {what}: {r}")
        try:
            v = gauge.decide(_lcs_top(l), ())
        except JacobiKitError as e:
            errors.append(f"lcs {name}: {e}")
            continue
        if not v.ok and not v.undecided:
            errors.append(f"lcs {name} is degenerate")
    for name in ws.djs:
        rep = dj.verify_dj(ws.dj(name))
        if not (rep.isotropy and rep.integrable):
            errors.append(f"dj {name} fails isotropy or integrability")
    return errors


def _lcs_top(l: LcsStructure) -> Scalar:
    from .geom import power, top_coefficient

    return top_coefficient(power(l.omega, l.chart.dim // 2))


# reports -----------------------------------------------------------------------

def _fmt_point(p: Optional[dict]):
    if p is None:
        return None
    return {k: str(Fraction(v)) for k, v in p.items()}


REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "checks", "elapsed_ms"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "elapsed_ms": {"type": "number"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "status": {"enum": ["PASS", "FAIL", "UNDECIDED"]},
                    "witness": {"type": "object", "additionalProperties": {"type": "string"}},
                    "residue": {"type": "string"},
                },
            },
        },
    },
}


@dataclass
class Report:
    command: str
    checks: List[dict] = field(default_factory=list)
    info: List[str] = field(default_factory=list)
    emit: List[str] = field(default_factory=list)

    def check(self, name: str, status, witness=None, residue=None):
        if isinstance(status, bool):
            status = PASS if status else FAIL
        entry = {"name": name, "status": status}
        if witness is not None:
            entry["witness"] = witness
        if residue is not None:
            entry["residue"] = str(residue)
        self.checks.append(entry)

    def verdict(self, name: str, v: gauge.Verdict):
        status = UNDECIDED if v.undecided else (PASS if v.ok else FAIL)
        self.check(name, status, witness=_fmt_point(v.witness) if not v.ok else None,
                   residue=None if v.ok or v.undecided else v.status)

    def exit_code(self) -> int:
        statuses = [c["status"] for c in self.checks]
        if FAIL in statuses:
            return EXIT_FAIL
        if UNDECIDED in statuses:
            return EXIT_UNDECIDED
        return EXIT_OK

    def text(self) -> str:
        lines = [f"COMMAND {self.command}"]
        lines += [f"  {x}" for x in self.info]
        for c in self.checks:
            line = f"CHECK {c['name']} {c['status']}"
            if "witness" in c:
                line += " witness=" + ",".join(f"{k}={v}" for k, v in c["witness"].items())
            if "residue" in c:
                line += f" residue={c['residue']}"
            lines.append(line)
        return "\n".join(lines) + "\n"

    def as_json(self, elapsed_ms) -> str:
        data = {"command": self.command, "checks": self.checks, "elapsed_ms": elapsed_ms}
        return json.dumps(data, indent=2) + "\n"


# emitting in the definition grammar --------------------------------------------

def _emit_chart(c: Chart) -> str:
    return f"chart {c.name} : {' '.join(c.coords)}"


def _emit_form(kind: str, name: str, f: DifferentialForm) -> str:
    terms = " ; ".join(f"{'^'.join(f.chart.coords[i] for i in k)} = {c}" for k, c in sorted(f.comps.items())
                       if not c.is_zero())
    return f"{kind} {name} on {f.chart.name} : {terms}"


def _emit_jacobi(name: str, J: JacobiStructure) -> str:
    c = J.chart.coords
    pi = " ; ".join(f"{c[i]}^{c[j]} = {v}" for (i, j), v in sorted(J.pi.comps.items()) if not v.is_zero())
    E = " ; ".join(f"{c[i]} = {v}" for (i,), v in sorted(J.E.comps.items()) if not v.is_zero())
    body = "pi " + pi if pi else "pi"
    if E:
        body += " ; E " + E
    return f"jacobi {name} on {J.chart.name} : {body}"


# commands ----------------------------------------------------------------------

def _jacobi_checks(rep: Report, J: JacobiStructure, prefix: str = "jacobi"):
    r = verify_jacobi(J)
    rep.check(f"{prefix}.c1", r.c1.is_zero(), residue=None if r.c1.is_zero() else r.c1)
    rep.check(f"{prefix}.c2", r.c2.is_zero(), residue=None if r.c2.is_zero() else r.c2)


def _dj_checks(rep: Report, L: dj.DJStructure, samples, prefix: str = "dj"):
    r = dj.verify_dj(L, samples)
    rep.check(f"{prefix}.isotropy", r.isotropy)
    status = UNDECIDED if r.rank_status == UNDECIDED else (PASS if r.rank_ok else FAIL)
    rep.check(f"{prefix}.rank", status, witness=_fmt_point(r.rank_witness))
    wit = None if r.integrable else f"bracket of frame sections {r.integrability_witness[0]}, {r.integrability_witness[1]}"
    rep.check(f"{prefix}.integrable", r.integrable, residue=wit)


def cmd_verify(ws: Workspace, args, rep: Report):
    what, name = args.what, args.name
    if what == "jacobi":
        J = ws.jacobi(name)
        rep.info.append(f"pi = {J.pi}")
        rep.info.append(f"E = {J.E}")
        _jacobi_checks(rep, J)
    elif what == "dj":
        L = ws.dj(name)
        _dj_checks(rep, L, ws.sample_grid(args.samples, L.chart))
    elif what == "contact":
        c = ws.get("contacts", name)
        vol = contact_volume(c.eta)
        rep.info.append(f"eta ^ (d eta)^n = {vol}")
        v = gauge.decide(vol, ws.sample_grid(args.samples, c.chart))
        rep.verdict("contact.nondegenerate", v)
        if v.ok:
            _jacobi_checks(rep, contact_to_jacobi(c.eta))
    elif what == "lcs":
        l = ws.get("lcss", name)
        res = lcs_residues(l.omega, l.theta)
        rep.check("lcs.closed", not res, residue="; ".join(f"{k}: {v}" for k, v in res.items()) or None)
        v = gauge.decide(_lcs_top(l), ws.sample_grid(args.samples, l.chart))
        rep.verdict("lcs.nondegenerate", v)
        if v.ok and not res:
            _jacobi_checks(rep, lcs_to_jacobi(l))
    elif what in ("commute-diracization", "commute-poissonization", "algebroid-iso"):
        if args.one_form is None:
            raise UsageError(f"verify {what} needs a one-form")
        J = ws.jacobi(name)
        B = ws.get("oneforms", args.one_form)
        samples = ws.sample_grid(args.samples, J.chart)
        if what == "commute-diracization":
            r = gauge.commute_diracization(dj.graph_of_jacobi(J), B)
            rep.check("commute.span", r.details["span"])
            rep.check("commute.btilde_closed", r.details["btilde_closed"])
        elif what == "commute-poissonization":
            _admissible(rep, J, B, samples)
            if rep.checks[-1]["status"] == PASS:
                r = gauge.commute_poissonization(J, B, samples)
                rep.info.append(f"jacobi status = {r.details['jacobi_status']}")
                rep.info.append(f"poisson status = {r.details['poisson_status']}")
                rep.check("commute.statuses_agree", r.details["statuses_agree"])
                rep.check("commute.matrix_identity", r.details["matrix_identity"])
                rep.check("commute.btilde_closed", r.details["btilde_closed"])
        else:
            _admissible(rep, J, B, samples)
            if rep.checks[-1]["status"] == PASS:
                r = gauge.verify_algebroid_iso(J, B, samples)
                rep.check("iso.anchor", r.anchor)
                rep.check("iso.bracket", r.bracket)
                rep.check("iso.cocycle", r.cocycle)
    else:
        raise UsageError(f"unknown verify target '{what}'")


def _admissible(rep: Report, J: JacobiStructure, B: DifferentialForm, samples):
    a = gauge.admissibility(J, B, samples)
    rep.info.append(f"det(Id + (dB, B)~ o sharp) = {a.det}")
    rep.verdict("gauge.admissible", a.verdict)


def cmd_gauge(ws: Workspace, args, rep: Report):
    what, name = args.what, args.name
    B = ws.get("oneforms", args.one_form)
    tag = f"{name}_{args.one_form}"
    if what == "dj":
        L = ws.dj(name)
        samples = ws.sample_grid(args.samples, L.chart)
        LB = gauge.gauge_dj(L, B)
        _dj_checks(rep, LB, samples)
        decl = ws.djs.get(name)
        if decl is not None and decl.how == "precontact":
            # tau_B of the graph of eta is the graph of eta + B
            new = ws.get("oneforms", decl.source) + B
            rep.check("gauge.precontact_shift", dj.same_span(LB, dj.graph_of_precontact(new)))
            rep.emit += [_emit_chart(L.chart), _emit_form("oneform", f"{tag}_eta", new),
                         f"dj {tag} on {L.chart.name} : precontact {tag}_eta"]
        else:
            J = ws.jacobi(decl.source if decl is not None else name)
            v = gauge.admissibility(J, B, samples).verdict
            if v.ok:
                JB = gauge.gauge_jacobi(J, B, samples)
                rep.check("gauge.graph_of_gauged", dj.same_span(LB, dj.graph_of_jacobi(JB)))
                rep.emit += [_emit_chart(L.chart), _emit_jacobi(f"{tag}_J", JB),
                             f"dj {tag} on {L.chart.name} : graph {tag}_J"]
        return
    J = ws.jacobi(name)
    samples = ws.sample_grid(args.samples, J.chart)
    _admissible(rep, J, B, samples)
    if rep.checks[-1]["status"] != PASS:
        return
    JB = gauge.gauge_jacobi(J, B, samples)
    rep.info.append(f"pi_B = {JB.pi}")
    rep.info.append(f"E_B = {JB.E}")
    _jacobi_checks(rep, JB)
    if what == "jacobi":
        rep.emit += [_emit_chart(J.chart), _emit_jacobi(tag, JB)]
    elif what == "contact":
        c = ws.get("contacts", name)
        new = c.eta - B
        rep.check("gauge.contact_coherent", JB.equals(contact_to_jacobi(new)))
        rep.emit += [_emit_chart(c.chart), _emit_form("oneform", f"{tag}_eta", new), f"contact {tag} on {c.chart.name} : {tag}_eta"]
    elif what == "lcs":
        l = ws.get("lcss", name)
        try:
            new = gauge.gauge_lcs(l, B, samples)
        except InconclusiveError:
            rep.check("gauge.lcs", UNDECIDED)
            return
        except JacobiKitError as e:
            rep.check("gauge.lcs", FAIL, residue=e)
            return
        rep.check("gauge.lcs_identities", not lcs_residues(new.omega, new.theta))
        rep.check("gauge.lcs_coherent", JB.equals(lcs_to_jacobi(new)))
        rep.emit += [_emit_chart(l.chart), _emit_form("twoform", f"{tag}_omega", new.omega),
                     _emit_form("oneform", f"{tag}_theta", new.theta),
                     f"lcs {tag} on {l.chart.name} : omega = {tag}_omega ; theta = {tag}_theta"]
    else:
        raise UsageError(f"unknown gauge target '{what}'")


def cmd_poissonize(ws: Workspace, args, rep: Report):
    J = ws.jacobi(args.name)
    P, ext, t = poissonize(J)
    rep.info.append(f"poissonized = {P}")
    br = schouten_bracket(P, P)
    rep.check("poisson", br.is_zero(), residue=None if br.is_zero() else br)
    rep.emit += [_emit_chart(ext), _emit_jacobi(f"{args.name}_pois", JacobiStructure(P, MultiVectorField.zero(ext, 1)))]


def cmd_groupoid(ws: Workspace, args, rep: Report):
    c = ws.get("contacts", args.name)
    samples = ws.sample_grid(args.samples, c.chart)
    if not samples:
        raise UsageError("groupoid checks need --samples")
    G = groupoid.build_pair_groupoid(c.eta, samples)
    J = contact_to_jacobi(c.eta)
    rep.info.append(f"eta_G = {G.eta_G}")
    rep.verdict("groupoid.contact", G.contact)
    rep.check("groupoid.multiplicative", groupoid.verify_multiplicative(G))
    rep.check("groupoid.sigma_multiplicative", groupoid.sigma_multiplicative(G))
    m = groupoid.check_structure_maps(G, J, samples)
    rep.check("groupoid.source_conformal", m.source_conformal)
    rep.check("groupoid.target_anti", m.target_anti)
    probes = [Scalar.var(v) for v in c.chart.coords]
    k = groupoid.source_target_kernels(G, probes, samples)
    rep.check("groupoid.kernels", k.containment and k.spans, witness=_fmt_point(k.witness))
    if args.gauge:
        B = ws.get("oneforms", args.gauge)
        _admissible(rep, J, B, samples)
        if rep.checks[-1]["status"] != PASS:
            return
        GB = groupoid.gauge_groupoid_contact(G, B, samples)
        rep.info.append(f"eta_B = {GB.eta_G}")
        rep.check("groupoid.gauged_multiplicative", groupoid.verify_multiplicative(GB))
        shifted = groupoid.build_pair_groupoid(c.eta - B)
        rep.check("groupoid.gauged_is_shift", (GB.eta_G - shifted.eta_G).is_zero())
        mB = groupoid.check_structure_maps(GB, gauge.gauge_jacobi(J, B, samples), samples)
        rep.check("groupoid.gauged_source_conformal", mB.source_conformal)
        rep.check("groupoid.gauged_target_anti", mB.target_anti)


def cmd_glb(ws: Workspace, args, rep: Report):
    J = ws.jacobi(args.name)
    pair = glb.canonical_pair(J)
    A, T = pair.A, pair.A_dual
    if args.what == "canonical":
        rep.info.append("cotangent cocycle = (" + ", ".join(str(x) for x in A.cocycle) + ")")
        rep.info.append("tangent cocycle = (" + ", ".join(str(x) for x in T.cocycle) + ")")
        rep.check("glb.cotangent_cocycle_closed", A.cocycle_closed())
        rep.check("glb.tangent_cocycle_closed", T.cocycle_closed())
        for label, alg in (("cotangent", A), ("tangent", T)):
            ok = all(alg.twisted_differential(alg.twisted_differential(w)).is_zero() for w in glb.sample_forms(alg))
            rep.check(f"glb.{label}_d_squared", ok)
    elif args.what == "compat":
        for label, (X, Y) in (("tangent_side", (T, A)), ("cotangent_side", (A, T))):
            bad = glb.compat_failures(X, Y)
            rep.check(f"glb.compat_{label}", not bad, residue=f"{len(bad)} failing pairs" if bad else None)
    elif args.what == "psi-b":
        if args.one_form is None:
            raise UsageError("glb psi-b needs a one-form")
        B = ws.get("oneforms", args.one_form)
        samples = ws.sample_grid(args.samples, J.chart)
        _admissible(rep, J, B, samples)
        if rep.checks[-1]["status"] != PASS:
            return
        r = glb.psi_b_gauge(J, B, samples)
        rep.info.append(f"det psi_B = {r.det}")
        rep.verdict("psi.invertible", r.verdict)
        rep.check("psi.sharp_coherent", r.sharp_coherent)
        rep.check("psi.cocycle_closed", r.cocycle_closed)
        rep.check("psi.algebroid_iso", r.algebroid_iso)
    else:
        raise UsageError(f"unknown glb target '{args.what}'")


def cmd_gcs(ws: Workspace, args, rep: Report):
    if args.what != "from-contact":
        raise UsageError(f"unknown gcs target '{args.what}'")
    c = ws.get("contacts", args.name)
    I = gencontact.from_contact(c.eta)
    base = gencontact.check_axioms(I)
    target, report = I, base
    if args.bfield:
        B = ws.get("oneforms", args.bfield)
        target = gencontact.bfield_transform(I, B)
        report = gencontact.check_axioms(target)
        rep.check("gcs.report_preserved", report.key == base.key)
    rep.info.append(f"square = {report.square.value}")
    if report.note:
        rep.info.append(f"note: {report.note}")
    rep.info.append(f"contact_type = {str(gencontact.is_contact_type(target)).lower()}")
    rep.check("gcs.square", report.square is not gencontact.SquareClass.NEITHER, residue=None
              if report.square is not gencontact.SquareClass.NEITHER else report.square.value)
    rep.check("gcs.adjoint", report.adjoint_ok)
    rep.check("gcs.torsion", report.torsion_zero)


COMMANDS = {
    "verify": cmd_verify,
    "gauge": cmd_gauge,
    "poissonize": cmd_poissonize,
    "groupoid": cmd_groupoid,
    "glb": cmd_glb,
    "gcs": cmd_gcs,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--lazy", action="store_true", help="skip invariant checks on load")
    common.add_argument("--emit", metavar="PATH", help="write transformed structures in the definition grammar")
    common.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0 for reproducible JSON")
    common.add_argument("--samples", metavar="NAME", help="sample grid for nonvanishing decisions")

    p = argparse.ArgumentParser(prog="jacobi-kit", description=__doc__.splitlines()[0])
    p.add_argument("file", help="definition file, or 'desk' for the bundled fixtures")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common])
    v.add_argument("what", choices=["jacobi", "dj", "contact", "lcs", "commute-diracization",
                                    "commute-poissonization", "algebroid-iso"])
    v.add_argument("name")
    v.add_argument("one_form", nargs="?")

    g = sub.add_parser("gauge", parents=[common])
    g.add_argument("what", choices=["jacobi", "contact", "lcs", "dj"])
    g.add_argument("name")
    g.add_argument("--one-form", required=True)

    ps = sub.add_parser("poissonize", parents=[common])
    ps.add_argument("name")

    gr = sub.add_parser("groupoid", parents=[common])
    gr.add_argument("what", choices=["pair"])
    gr.add_argument("name")
    gr.add_argument("--gauge", metavar="ONEFORM")

    gl = sub.add_parser("glb", parents=[common])
    gl.add_argument("what", choices=["canonical", "compat", "psi-b"])
    gl.add_argument("name")
    gl.add_argument("one_form", nargs="?")

    gc = sub.add_parser("gcs", parents=[common])
    gc.add_argument("what", choices=["from-contact"])
    gc.add_argument("name")
    gc.add_argument("--bfield", metavar="ONEFORM")
    return p


def read_definitions(path: str) -> str:
    if path == "desk":
        return resources.files("jacobikit").joinpath("data/desk.jk").read_text()
    with open(path) as fh:
        return fh.read()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    command = " ".join(a for a in (argv if argv is not None else sys.argv[1:])[1:] if a not in ("--no-timing",))
    rep = Report(command)
    try:
        ws = parse_workspace(read_definitions(args.file))
        if not args.lazy:
            errors = check_workspace(ws)
            if errors:
                for e in errors:
                    print(f"error: {e}", file=sys.stderr)
                return EXIT_USAGE
        COMMANDS[args.command](ws, args, rep)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, TypeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InconclusiveError as e:
        rep.check("inconclusive", UNDECIDED, residue=e)
    except JacobiKitError as e:
        rep.check("structure", FAIL, residue=e)
    elapsed = 0 if args.no_timing else round((time.perf_counter() - start) * 1000, 1)
    if args.emit and rep.emit:
        with open(args.emit, "w") as fh:
            fh.write("\n".join(rep.emit) + "\n")
    sys.stdout.write(rep.as_json(elapsed) if args.json else rep.text())
    return rep.exit_code()


if __name__ == "__main__":
    sys.exit(main())
