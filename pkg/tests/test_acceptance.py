"""Acceptance suite A1-A12; every item prints one PASS/FAIL line and asserts it."""

import json
import random
import shutil
import subprocess
from importlib import resources

import jsonschema
import pytest

from conftest import GRID_M, GRID_P, M, P
from jacobikit import cli
from jacobikit.diracjacobi import graph_of_jacobi, same_span, verify_dj
from jacobikit.errors import StructureError
from jacobikit.gauge import (
    admissibility,
    btilde,
    commute_poissonization,
    gauge_contact,
    gauge_dj,
    gauge_jacobi,
    gauge_lcs,
    verify_algebroid_iso,
    verify_commute,
)
from jacobikit.gencontact import (
    SquareClass,
    bfield_transform,
    check_axioms,
    contact_type_report,
    expected_top_left,
    from_contact,
)
from jacobikit.geom import DifferentialForm, MultiVectorField, exterior_derivative, one_form, pullback, wedge
from jacobikit.glb import canonical_pair, compat_failures, psi_b_gauge, sample_forms
from jacobikit.groupoid import (
    build_pair_groupoid,
    check_source_target_kernels,
    check_structure_maps,
    gauge_groupoid_contact,
    gauged_form,
    multiplicativity_residue,
)
from jacobikit.jacobi import (
    contact_condition,
    contact_inverse_matrix,
    contact_to_jacobi,
    lcs_to_jacobi,
    sharp_matrix,
    verify_jacobi,
)
from jacobikit.symcore import Scalar, identity, matmul
from jacobikit.symcore.matrix import is_zero_matrix, mequal

GRID5 = cli.parse_workspace(cli.read_definitions("desk")).samples["grid5"]
BAD = str(resources.files("jacobikit").joinpath("data/desk_bad.jk"))


@pytest.fixture
def report(capsys):
    def emit(tag: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            print(f"\n{tag} {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        assert ok, f"{tag}: {detail}"
    return emit


def fixtures(J1, J2, lcs3):
    return {"C1": (J1, M, GRID_M), "J2": (J2, P, GRID_P), "L3": (lcs_to_jacobi(lcs3), P, GRID_P)}


def random_form(rng: random.Random, chart):
    """A 1-form with small integer polynomial coefficients of degree at most 1."""
    terms = {}
    for v in chart.coords:
        if rng.random() < 0.7:
            c = Scalar.const(rng.randint(-2, 2))
            for w in chart.coords:
                if rng.random() < 0.4:
                    c = c + rng.randint(-2, 2) * Scalar.var(w)
            terms[(v,)] = c
    return DifferentialForm.from_terms(chart, 1, terms)


def test_A1_jacobi_constructors(report, eta1, lcs3, J_bad):
    r1 = verify_jacobi(contact_to_jacobi(eta1))
    r3 = verify_jacobi(lcs_to_jacobi(lcs3))
    rb = verify_jacobi(J_bad)
    expected = wedge(MultiVectorField.basis(M, "q"), MultiVectorField.basis(M, "p"))
    ok = (r1.c1.is_zero() and r1.c2.is_zero() and r3.c1.is_zero() and r3.c2.is_zero()
          and not rb.passed and rb.c2 == expected)
    report("A1", ok, f"negative fixture residue [E, pi] = {rb.c2}")


def test_A2_graph_characterization(report, J1, J2, lcs3, J_bad):
    valid = all(verify_dj(graph_of_jacobi(J)).passed for J, _, _ in fixtures(J1, J2, lcs3).values())
    bad = verify_dj(graph_of_jacobi(J_bad))
    report("A2", valid and bad.isotropy and not bad.integrable, "negative fixture fails integrability")


def test_A3_contact_inverse(report, eta1, J1):
    prod = matmul(sharp_matrix(J1), contact_inverse_matrix(eta1))
    report("A3", mequal(prod, identity(4)), "sharp o flat = Id (4x4)")


def test_A4_gauge_action(report, J1, J2, lcs3):
    rng = random.Random(20240611)
    checked = 0
    ok = True
    for J, chart, _ in fixtures(J1, J2, lcs3).values():
        L = graph_of_jacobi(J)
        ok = ok and same_span(gauge_dj(L, DifferentialForm.zero(chart, 1)), L)
        for _ in range(3):
            B, B2 = random_form(rng, chart), random_form(rng, chart)
            ok = ok and same_span(gauge_dj(gauge_dj(L, B), B2), gauge_dj(L, B + B2))
            checked += 1
    report("A4", ok, f"{checked} random pairs, tau_0 = id on 3 fixtures")


def test_A5_admissibility(report, eta1, J1, B4, B5):
    good = admissibility(J1, B4, GRID_M)
    bad = admissibility(J1, B5, GRID_M)
    contact_good = contact_condition(eta1 - B4, GRID_M).ok
    contact_bad = not contact_condition(eta1 - B5, GRID_M).ok
    try:
        gauge_contact(eta1, B5, GRID_M)
        raised = False
    except StructureError:
        raised = True
    ok = (good.verdict.ok and bad.status == "VANISHES_AT_SAMPLE" and bad.verdict.witness is not None
          and contact_good and contact_bad and raised)
    witness = ",".join(f"{k}={v}" for k, v in (bad.verdict.witness or {}).items())
    report("A5", ok, f"B4 {good.status}; B5 {bad.status} witness={witness}")


def test_A6_contact_lcs_coherence(report, eta1, J1, B4, lcs3, Bp):
    contact_side = mequal(sharp_matrix(gauge_jacobi(J1, B4, GRID_M)), sharp_matrix(contact_to_jacobi(eta1 - B4)))
    J3 = lcs_to_jacobi(lcs3)
    new = gauge_lcs(lcs3, Bp, GRID_P)
    lcs_side = mequal(sharp_matrix(gauge_jacobi(J3, Bp, GRID_P)), sharp_matrix(lcs_to_jacobi(new)))
    identity_ok = (exterior_derivative(new.omega) - wedge(new.theta, new.omega)).is_zero()
    report("A6", contact_side and lcs_side and identity_ok, f"omega' = {new.omega}")


def test_A7_algebroid_iso(report, J1, B4, J2, Bq):
    a = verify_algebroid_iso(J1, B4, GRID_M)
    b = verify_algebroid_iso(J2, Bq, GRID_P)
    ok = all((r.anchor, r.bracket, r.cocycle) == (True, True, True) for r in (a, b))
    report("A7", ok, "anchor, bracket and cocycle on (C1, B4) and (J2, q dq)")


def test_A8_commutation(report, J1, B4, J2, Bq):
    cases = [(J1, B4, GRID_M), (J2, Bq, GRID_P)]
    ok = True
    for J, B, grid in cases:
        ok = ok and verify_commute(J, B, "DIRACIZATION") and verify_commute(J, B, "POISSONIZATION", grid)
        ok = ok and exterior_derivative(btilde(B)[0]).is_zero()
        details = commute_poissonization(J, B, grid).details
        ok = ok and details["statuses_agree"]
    report("A8", bool(ok), "both modes; Btilde closed; determinant statuses agree")


def test_A9_pair_groupoid(report, eta1, J1, B4):
    G = build_pair_groupoid(eta1, GRID5)
    eta_mult = multiplicativity_residue(G, G.eta_G).is_zero()
    gauged = gauged_form(G, B4)
    gauged_mult = multiplicativity_residue(G, gauged).is_zero()
    sigma = Scalar.exp({G.sigma_var: 1})
    formula = gauged == sigma * pullback(G.alpha_map, eta1 - B4) - pullback(G.beta_map, eta1 - B4)
    before = check_structure_maps(G, J1, GRID5).passed
    H = gauge_groupoid_contact(G, B4, GRID5)
    after = check_structure_maps(H, contact_to_jacobi(eta1 - B4), GRID5).passed
    coords = [Scalar.var(v) for v in M.coords]
    kernels = check_source_target_kernels(G, coords, GRID5)
    ok = eta_mult and gauged_mult and formula and before and after and kernels
    report("A9", ok, "multiplicativity, gauged formula, structure maps, kernels")


def test_A10_glb(report, J1, J2, lcs3, B4):
    d2 = True
    compat = True
    for J, _, _ in fixtures(J1, J2, lcs3).values():
        pair = canonical_pair(J)
        for A in (pair.A, pair.A_dual):
            d2 = d2 and all(A.twisted_differential(A.twisted_differential(w)).is_zero() for w in sample_forms(A))
        compat = compat and compat_failures(pair.A, pair.A_dual) == []
    psi = psi_b_gauge(J1, B4, GRID_M)
    report("A10", d2 and compat and psi.sharp_coherent, f"psi_B det = {psi.det}")


def test_A11_generalized_contact(report, eta1, B4):
    I = from_contact(eta1)
    rep = check_axioms(I)
    base = rep.adjoint_ok and rep.torsion_zero and rep.square is SquareClass.MINUS_ID
    preserved = check_axioms(bfield_transform(I, B4)).key == rep.key
    flips = True
    for coeffs in ({"p": "-q"}, {"z": 1}, {"q": "z", "p": 1}):
        B = one_form(M, coeffs)
        ct = contact_type_report(bfield_transform(I, B))
        flips = flips and not ct.passed and not is_zero_matrix(ct.witness_block)
        flips = flips and mequal(ct.witness_block, expected_top_left(eta1, B))
    report("A11", base and preserved and flips, f"note: {rep.note}")


# --- A12 --------------------------------------------------------------------------

DESK_COMMANDS = [
    (["verify", "jacobi", "J2"], 0),
    (["verify", "dj", "D1"], 0),
    (["verify", "dj", "D2"], 0),
    (["verify", "contact", "C1"], 0),
    (["verify", "contact", "C6"], 3),
    (["verify", "lcs", "L3", "--samples", "gridP"], 0),
    (["verify", "commute-diracization", "J2", "Bq"], 0),
    (["verify", "commute-poissonization", "C1", "B4", "--samples", "grid1"], 0),
    (["verify", "algebroid-iso", "C1", "B4", "--samples", "grid1"], 0),
    (["gauge", "jacobi", "C1", "--one-form", "B4", "--samples", "grid1"], 0),
    (["gauge", "jacobi", "C1", "--one-form", "B5", "--samples", "grid1"], 1),
    (["gauge", "contact", "C1", "--one-form", "B4", "--samples", "grid1"], 0),
    (["gauge", "lcs", "L3", "--one-form", "Bp", "--samples", "gridP"], 0),
    (["gauge", "dj", "D1", "--one-form", "B4"], 0),
    (["poissonize", "C1"], 0),
    (["groupoid", "pair", "C1", "--samples", "grid5"], 0),
    (["groupoid", "pair", "C1", "--gauge", "B4", "--samples", "grid5"], 0),
    (["glb", "canonical", "C1"], 0),
    (["glb", "compat", "J2"], 0),
    (["glb", "psi-b", "C1", "B4", "--samples", "grid1"], 0),
    (["gcs", "from-contact", "C1"], 0),
    (["gcs", "from-contact", "C1", "--bfield", "B4"], 0),
    (["verify", "jacobi", "nope"], 2),
]


def _run(capsys, argv):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_A12_cli_end_to_end(report, capsys, tmp_path):
    problems = []
    seen = set()
    for argv, expected in DESK_COMMANDS:
        code, text = _run(capsys, ["desk", *argv])
        seen.add(code)
        if code != expected:
            problems.append(f"{' '.join(argv)} exited {code}, expected {expected}")
        if _run(capsys, ["desk", *argv])[1] != text:
            problems.append(f"{' '.join(argv)} text report differs between runs")
        if code == 2:
            continue
        js = ["desk", *argv, "--json", "--no-timing"]
        out1, out2 = _run(capsys, js)[1], _run(capsys, js)[1]
        if out1 != out2:
            problems.append(f"{' '.join(argv)} JSON report differs between runs")
        try:
            jsonschema.validate(json.loads(out1), cli.REPORT_SCHEMA)
        except jsonschema.ValidationError as e:
            problems.append(f"{' '.join(argv)} JSON invalid: {e.message}")
    # the negative fixture: exit 2 eagerly, exit 1 when loaded lazily
    if _run(capsys, [BAD, "verify", "jacobi", "Jbad"])[0] != 2:
        problems.append("eager load of the bad file did not exit 2")
    if _run(capsys, [BAD, "verify", "jacobi", "Jbad", "--lazy"])[0] != 1:
        problems.append("lazy verify of the bad fixture did not exit 1")
    # the installed console script, once, as a real process
    exe = shutil.which("jacobi-kit")
    if exe is not None:
        proc = subprocess.run([exe, "desk", "verify", "contact", "C6"], capture_output=True, text=True)
        seen.add(proc.returncode)
        if proc.returncode != 3:
            problems.append(f"console script exited {proc.returncode} on the undecided example")
    ok = not problems and seen >= {0, 1, 2, 3}
    detail = f"{len(DESK_COMMANDS)} commands, exit codes {sorted(seen)}"
    report("A12", ok, "; ".join([detail, *problems]))
