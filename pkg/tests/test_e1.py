from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from conftest import M, P, forms, multivectors, polynomials
from jacobikit.diracjacobi import graph_of_jacobi
from jacobikit.e1 import (
    ExtendedSection,
    ExtendedVector,
    PairForm,
    coordinate_frame,
    dorfman,
    pairing,
    tilde_d,
    tilde_i,
    tilde_lie,
    vector_bracket,
)
from jacobikit.geom import DifferentialForm, MultiVectorField, exterior_derivative, one_form, wedge
from jacobikit.symcore import Scalar

dq, dp = DifferentialForm.basis(M, "q"), DifferentialForm.basis(M, "p")
Dq, Dp, Dz = (MultiVectorField.basis(M, v) for v in ("q", "p", "z"))
ZERO1 = DifferentialForm.zero(M, 1)
NO_VEC = MultiVectorField.zero(M, 1)


@st.composite
def pair_forms(draw, degree: int):
    hi = draw(forms(M, degree))
    if degree == 0:
        return PairForm(hi)
    return PairForm(hi, draw(forms(M, degree - 1)))


@st.composite
def ext_vectors(draw):
    return ExtendedVector(draw(multivectors(M, 1)), draw(polynomials(M, max_terms=2)))


@st.composite
def sections(draw):
    X = draw(multivectors(M, 1))
    a = draw(forms(M, 1))
    f, g = draw(polynomials(M, max_terms=2)), draw(polynomials(M, max_terms=2))
    return ExtendedSection.build(X, f, a, g)


class TestTildeD:
    def test_contact_form(self, eta1):
        assert tilde_d(PairForm.covector(eta1, 0)) == PairForm(exterior_derivative(eta1), eta1)

    def test_function_slot(self):
        f = Scalar.var("q") * Scalar.var("z")
        res = tilde_d(PairForm(ZERO1, DifferentialForm.scalar(M, f)))
        assert res.hi.is_zero() and res.lo == -exterior_derivative(DifferentialForm.scalar(M, f))

    def test_square_example(self):
        a = PairForm.covector(one_form(M, {"q": "p"}), Scalar.var("q"))
        assert tilde_d(tilde_d(a)).is_zero()

    def test_degree_zero(self):
        g = Scalar.var("p")
        res = tilde_d(PairForm.function(M, g))
        assert res.hi == exterior_derivative(DifferentialForm.scalar(M, g)) and res.lo.value() == g

    @given(st.integers(0, 2), st.data())
    def test_square_zero(self, k, data):
        a = data.draw(pair_forms(k))
        assert tilde_d(tilde_d(a)).is_zero()


class TestTildeI:
    def test_reeb_on_contact_pair(self, eta1):
        res = tilde_i(ExtendedVector(Dz, 0), PairForm(exterior_derivative(eta1), eta1))
        assert res.hi.is_zero() and res.lo.value() == Scalar.const(-1)

    def test_unit_function_slot(self, B4):
        res = tilde_i(ExtendedVector(NO_VEC, 1), PairForm(exterior_derivative(B4), B4))
        assert res == PairForm(B4, DifferentialForm.zero(M, 0))

    def test_basis(self):
        res = tilde_i(ExtendedVector(Dq, 0), PairForm(wedge(dq, dp), dq))
        assert res.hi == dp and res.lo.value() == Scalar.const(-1)

    @given(ext_vectors(), ext_vectors(), st.integers(1, 2), st.data())
    def test_commutator_identity(self, v, w, k, data):
        a = data.draw(pair_forms(k))
        lhs = tilde_lie(v, tilde_i(w, a)) - tilde_i(w, tilde_lie(v, a))
        assert (lhs - tilde_i(vector_bracket(v, w), a)).is_zero()


class TestTildeLie:
    def test_reeb_preserves_contact_pair(self, eta1):
        assert tilde_lie(ExtendedVector(Dz, 0), PairForm.covector(eta1, 0)).is_zero()

    def test_unit_function_is_identity_on_covectors(self):
        # Cartan expansion: i_(0,1) d~(a, g) + d~ i_(0,1)(a, g) = (a - dg, 0) + (dg, g)
        a = PairForm.covector(one_form(M, {"q": "p", "z": "q^2"}), Scalar.var("z"))
        assert tilde_lie(ExtendedVector(NO_VEC, 1), a) == a

    def test_zero_pair(self):
        v = ExtendedVector(Scalar.var("q") * Dp, Scalar.var("z"))
        assert tilde_lie(v, PairForm.zero(M, 1)).is_zero()

    @given(ext_vectors(), pair_forms(1))
    def test_commutes_with_d(self, v, a):
        assert (tilde_lie(v, tilde_d(a)) - tilde_d(tilde_lie(v, a))).is_zero()


class TestPairing:
    def test_vector_against_covector(self):
        s1 = ExtendedSection.build(Dq, 0, ZERO1, 0)
        s2 = ExtendedSection.build(NO_VEC, 0, dq, 0)
        assert pairing(s1, s2) == Scalar.const(Fraction(1, 2))

    def test_function_slots(self):
        s1 = ExtendedSection.build(NO_VEC, 1, ZERO1, 0)
        s2 = ExtendedSection.build(NO_VEC, 0, ZERO1, 1)
        assert pairing(s1, s2) == Scalar.const(Fraction(1, 2))

    def test_graph_is_isotropic(self, J2):
        for s in graph_of_jacobi(J2).frame:
            X, a = s.ev.X, s.ec.alpha
            direct = sum((a[v] * X[v] for v in P.coords), Scalar.const(0)) + s.ev.f * s.ec.g
            assert direct.is_zero() and pairing(s, s).is_zero()

    @given(sections(), sections())
    def test_symmetry(self, s1, s2):
        assert (pairing(s1, s2) - pairing(s2, s1)).is_zero()


class TestDorfman:
    def test_coordinate_fields(self):
        a = ExtendedSection.build(Dq, 0, ZERO1, 0)
        b = ExtendedSection.build(Dp, 0, ZERO1, 0)
        assert dorfman(a, b).is_zero()

    def test_self_bracket_expansion(self):
        s = ExtendedSection.build(Dq, 0, dq, 0)
        v, c = ExtendedVector(Dq, 0), PairForm.covector(dq, 0)
        expected = tilde_lie(v, c) - tilde_i(v, tilde_d(c))
        br = dorfman(s, s)
        assert br.ev.is_zero() and br.ec.as_pair() == expected

    def test_unit_covector(self):
        s = ExtendedSection.build(NO_VEC, 0, ZERO1, 1)
        assert dorfman(s, s).is_zero()

    @given(sections(), sections(), polynomials(M, max_terms=1))
    def test_left_anchor_rule(self, s1, s2, f):
        # [[s1, f s2]] = f [[s1, s2]] + X1(f) s2 with the extended anchor (X, f) -> X
        lhs = dorfman(s1, f * s2)
        Xf = sum((s1.ev.X[v] * f.diff(v) for v in M.coords), Scalar.const(0))
        assert (lhs - (f * dorfman(s1, s2) + Xf * s2)).is_zero()

    @given(sections())
    def test_self_bracket_pairs_to_zero_against_itself(self, s):
        # <<[[s, s]], s>> = 1/2 rho(s) <<s, s>> for the Dorfman bracket, and the frame symbols agree
        lhs = pairing(dorfman(s, s), s)
        ss = pairing(s, s)
        rhs = Fraction(1, 2) * (sum((s.ev.X[v] * ss.diff(v) for v in M.coords), Scalar.const(0)) + s.ev.f * ss)
        assert (lhs - rhs).is_zero()


def test_coordinate_frame_rows_are_unit_vectors():
    frame = coordinate_frame(M)
    for i, s in enumerate(frame):
        row = s.to_row()
        assert all((x == Scalar.const(1)) == (j == i) for j, x in enumerate(row))
        assert ExtendedSection.from_row(M, row) == s
