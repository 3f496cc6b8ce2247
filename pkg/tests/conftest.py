"""Shared fixtures, an independent sympy oracle and hypothesis strategies."""

from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from jacobikit.geom import Chart, DifferentialForm, MultiVectorField, one_form, vector_field
from jacobikit.jacobi import ContactForm, JacobiStructure, LcsStructure, contact_to_jacobi
from jacobikit.symcore import Scalar

settings.register_profile("jk", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("jk")

M = Chart("M", ("q", "p", "z"))
P = Chart("P", ("q", "p"))


def grid(chart: Chart, values=(-1, 0, 1)):
    return [dict(zip(chart.coords, map(Fraction, pt))) for pt in itertools.product(values, repeat=chart.dim)]


GRID_M = grid(M)
GRID_P = grid(P)


# --- oracle ---------------------------------------------------------------------

def to_sympy(s: Scalar) -> sympy.Expr:
    """Read a Scalar back through its printed form; independent of the internal ring."""
    return sympy.sympify(str(s).replace("^", "**"), locals={"exp": sympy.exp})


def sym_equal(s: Scalar, expr) -> bool:
    return sympy.simplify(to_sympy(s) - sympy.sympify(expr)) == 0


# --- desk fixtures --------------------------------------------------------------

@pytest.fixture
def chart_m():
    return M


@pytest.fixture
def chart_p():
    return P


@pytest.fixture
def eta1():
    """dz - p dq."""
    return one_form(M, {"z": 1, "q": "-p"})


@pytest.fixture
def contact1(eta1):
    return ContactForm.checked(eta1)


@pytest.fixture
def J1(eta1):
    return contact_to_jacobi(eta1)


@pytest.fixture
def J2():
    return JacobiStructure(MultiVectorField.from_terms(P, 2, {("q", "p"): 1}), MultiVectorField.zero(P, 1))


@pytest.fixture
def lcs3():
    omega = DifferentialForm.from_terms(P, 2, {("q", "p"): "exp(q)"})
    return LcsStructure.checked(omega, one_form(P, {"q": 1}), GRID_P)


@pytest.fixture
def J_bad():
    return JacobiStructure(MultiVectorField.from_terms(M, 2, {("q", "p"): "z"}), vector_field(M, {"z": 1}))


@pytest.fixture
def B4():
    return one_form(M, {"p": "-q"})


@pytest.fixture
def B5():
    return one_form(M, {"z": 1})


@pytest.fixture
def Bq():
    return one_form(P, {"q": "q"})


@pytest.fixture
def Bp():
    return one_form(P, {"p": 1})


# --- strategies -----------------------------------------------------------------

small = st.integers(-3, 3)


@st.composite
def polynomials(draw, chart: Chart = M, max_terms: int = 3, max_deg: int = 2):
    """Sparse integer polynomials in the chart coordinates."""
    out = Scalar.const(draw(small))
    for _ in range(draw(st.integers(0, max_terms))):
        term = Scalar.const(draw(st.integers(-3, 3).filter(bool)))
        for v in chart.coords:
            term = term * Scalar.var(v) ** draw(st.integers(0, max_deg))
        out = out + term
    return out


@st.composite
def scalars(draw, chart: Chart = M):
    """Polynomials, optionally times exp of a small linear form, optionally over 1 + v^2."""
    s = draw(polynomials(chart))
    if draw(st.booleans()):
        s = s * Scalar.exp({draw(st.sampled_from(chart.coords)): draw(st.integers(-1, 1))})
    if draw(st.booleans()):
        v = Scalar.var(draw(st.sampled_from(chart.coords)))
        s = s / (1 + v * v)
    return s


@st.composite
def forms(draw, chart: Chart, degree: int, coeffs=None):
    if coeffs is None:
        coeffs = polynomials(chart, max_terms=2)
    terms = {}
    for idx in itertools.combinations(chart.coords, degree):
        if draw(st.booleans()):
            terms[idx] = draw(coeffs)
    return DifferentialForm.from_terms(chart, degree, terms)


@st.composite
def multivectors(draw, chart: Chart, degree: int, coeffs=None):
    if coeffs is None:
        coeffs = polynomials(chart, max_terms=2)
    terms = {}
    for idx in itertools.combinations(chart.coords, degree):
        if draw(st.booleans()):
            terms[idx] = draw(coeffs)
    return MultiVectorField.from_terms(chart, degree, terms)


def rational_points(chart: Chart):
    return st.fixed_dictionaries({v: st.fractions(-3, 3, max_denominator=4) for v in chart.coords})
