import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import M, P, forms, multivectors, polynomials, sym_equal, to_sympy
from jacobikit.errors import ChartMismatchError
from jacobikit.geom import (
    Chart,
    DifferentialForm,
    MultiVectorField,
    SmoothMap,
    exterior_derivative,
    interior_product,
    lie_derivative,
    one_form,
    pullback,
    related_check,
    schouten_bracket,
    wedge,
)
from jacobikit.jacobi import contact_to_jacobi, verify_jacobi
from jacobikit.symcore import Scalar

R1 = Chart("R", ("q",))
Tt = Chart("T", ("t",))
dq, dp, dz = (DifferentialForm.basis(M, v) for v in ("q", "p", "z"))
Dq, Dp, Dz = (MultiVectorField.basis(M, v) for v in ("q", "p", "z"))
p, q, z = (Scalar.var(v) for v in ("p", "q", "z"))


def parity(k: int) -> int:
    return -1 if k % 2 else 1


class TestWedge:
    def test_square_vanishes(self):
        assert wedge(dq, dq).is_zero()

    def test_antisymmetry(self):
        assert wedge(dq, dp) == -wedge(dp, dq)

    def test_coefficient(self):
        assert wedge(p * dq, dz) == p * wedge(dq, dz)

    def test_chart_mismatch(self):
        with pytest.raises(ChartMismatchError):
            wedge(dq, DifferentialForm.basis(P, "q"))

    @given(st.integers(0, 3), st.integers(0, 3), st.data())
    def test_graded_commutativity(self, k, l, data):
        a = data.draw(forms(M, k))
        b = data.draw(forms(M, l))
        assert wedge(a, b) == (-1) ** (k * l) * wedge(b, a)


class TestExteriorDerivative:
    def test_one_form(self):
        assert exterior_derivative(p * dq) == wedge(dp, dq)

    def test_contact_form_twice(self, eta1):
        assert exterior_derivative(exterior_derivative(eta1)).is_zero()

    def test_top_degree(self):
        w = DifferentialForm.from_terms(P, 2, {("q", "p"): "exp(q)"})
        assert exterior_derivative(w).is_zero()

    @given(st.integers(0, 2), st.data())
    def test_square_zero(self, k, data):
        a = data.draw(forms(M, k))
        assert exterior_derivative(exterior_derivative(a)).is_zero()

    @given(forms(M, 1))
    def test_one_forms_match_oracle(self, a):
        da = exterior_derivative(a)
        xs = [sympy.Symbol(v) for v in M.coords]
        coeffs = [to_sympy(a[v]) for v in M.coords]
        for i in range(3):
            for j in range(i + 1, 3):
                expected = sympy.diff(coeffs[j], xs[i]) - sympy.diff(coeffs[i], xs[j])
                assert sym_equal(da[i, j], expected)


class TestInterior:
    def test_basis(self):
        assert interior_product(Dq, wedge(dq, dp)) == dp

    def test_contact_reeb(self, eta1):
        assert interior_product(Dz, eta1).value() == Scalar.const(1)

    @given(multivectors(M, 1), forms(M, 2), polynomials(M))
    def test_tensoriality(self, X, a, f):
        assert interior_product(X, f * a) == f * interior_product(X, a)


class TestLie:
    def test_z_free_coefficients(self, eta1):
        assert lie_derivative(Dz, eta1).is_zero()

    def test_multivector(self):
        pi = MultiVectorField.from_terms(M, 2, {("q", "p"): "z"})
        assert lie_derivative(Dz, pi) == wedge(Dq, Dp)

    @given(multivectors(M, 1), forms(M, 1))
    def test_cartan_formula(self, X, a):
        cartan = interior_product(X, exterior_derivative(a)) + exterior_derivative(interior_product(X, a))
        assert lie_derivative(X, a) == cartan


class TestSchouten:
    def test_coordinate_fields_commute(self):
        assert schouten_bracket(Dq, Dp).is_zero()

    def test_constant_poisson(self, J2):
        assert schouten_bracket(J2.pi, J2.pi).is_zero()

    def test_vector_on_function(self):
        f = MultiVectorField.scalar(M, q * q * p)
        assert schouten_bracket(Dq, f).value() == 2 * q * p

    def test_contact_pair_convention(self, J1):
        # pins the sign convention to [pi, pi] = 2 E ^ pi
        assert J1.pi == MultiVectorField.from_terms(M, 2, {("q", "p"): 1, ("z", "p"): "p"})
        assert J1.E == Dz
        assert (schouten_bracket(J1.pi, J1.pi) - 2 * wedge(J1.E, J1.pi)).is_zero()
        assert verify_jacobi(J1).passed

    @given(multivectors(M, 1), multivectors(M, 1))
    def test_lie_bracket_matches_oracle(self, X, Y):
        br = schouten_bracket(X, Y)
        xs = [sympy.Symbol(v) for v in M.coords]
        Xs = [to_sympy(X[v]) for v in M.coords]
        Ys = [to_sympy(Y[v]) for v in M.coords]
        for i in range(3):
            expected = sum(Xs[j] * sympy.diff(Ys[i], xs[j]) - Ys[j] * sympy.diff(Xs[i], xs[j]) for j in range(3))
            assert sym_equal(br[i], expected)

    @given(st.integers(0, 3), st.integers(0, 3), st.data())
    def test_graded_skew(self, k, l, data):
        P_ = data.draw(multivectors(M, k))
        Q_ = data.draw(multivectors(M, l))
        sign = parity((k - 1) * (l - 1))
        assert (schouten_bracket(P_, Q_) + sign * schouten_bracket(Q_, P_)).is_zero()

    @given(st.lists(st.integers(0, 2), min_size=3, max_size=3).filter(lambda ds: ds.count(0) <= 1), st.data())
    def test_graded_jacobi(self, degrees, data):
        a, b, c = degrees
        coeffs = polynomials(M, max_terms=1, max_deg=1)
        P_ = data.draw(multivectors(M, a, coeffs))
        Q_ = data.draw(multivectors(M, b, coeffs))
        R_ = data.draw(multivectors(M, c, coeffs))
        br = schouten_bracket

        def s(x, y):
            return parity((x - 1) * (y - 1))

        total = (s(a, c) * br(P_, br(Q_, R_)) + s(b, a) * br(Q_, br(R_, P_)) + s(c, b) * br(R_, br(P_, Q_)))
        assert total.is_zero()


class TestPullback:
    def test_projection(self):
        prod = Chart("MxR", ("q", "p", "z", "t"))
        pr1 = SmoothMap.projection(prod, M)
        assert pullback(pr1, dq) == DifferentialForm.basis(prod, "q")

    def test_curve(self):
        phi = SmoothMap.from_exprs(Tt, P, ["t", "t^2"])
        dt = DifferentialForm.basis(Tt, "t")
        assert pullback(phi, DifferentialForm.basis(P, "p")) == 2 * Scalar.var("t") * dt

    def test_naturality_example(self):
        phi = SmoothMap.from_exprs(Tt, P, ["t", "t^2"])
        a = one_form(P, {"q": "p"})
        assert pullback(phi, exterior_derivative(a)) == exterior_derivative(pullback(phi, a))

    @given(st.lists(polynomials(P, max_terms=2), min_size=3, max_size=3), st.integers(0, 2), st.data())
    def test_naturality(self, comps, k, data):
        phi = SmoothMap(P, M, tuple(comps))
        a = data.draw(forms(M, k, polynomials(M, max_terms=1)))
        assert pullback(phi, exterior_derivative(a)) == exterior_derivative(pullback(phi, a))


class TestRelated:
    def test_identity(self, J2):
        assert related_check(SmoothMap.identity(P), J2.pi, J2.pi)

    def test_projection_to_line(self, J2):
        assert related_check(SmoothMap.projection(P, R1), J2.pi, MultiVectorField.zero(R1, 2))

    def test_scaling(self):
        phi = SmoothMap.from_exprs(R1, R1, ["2*q"])
        Dq1 = MultiVectorField.basis(R1, "q")
        assert not related_check(phi, Dq1, Dq1)
        assert related_check(phi, Dq1, 2 * Dq1)


def test_contact_jacobi_is_derived_pair(eta1):
    # oracle: invert (X, f) -> (-i_X d eta - f eta, eta(X)) with sympy
    qs, ps, zs = sympy.symbols("q p z")
    eta = sympy.Matrix([-ps, 0, 1])
    deta = sympy.Matrix([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])  # d eta = dq ^ dp, row i = i_{d_i} d eta
    flat = sympy.zeros(4, 4)
    flat[:3, :3] = -deta.T
    flat[:3, 3] = -eta
    flat[3, :3] = eta.T
    inv = flat.inv()
    J = contact_to_jacobi(eta1)
    # columns of inv are the images of dq, dp, dz, 1; entry (k, i) is pi(dx^i, dx^k)
    pi_qp, pi_zp = inv[1, 0], inv[1, 2]
    assert sym_equal(J.pi["q", "p"], pi_qp) and sym_equal(J.pi["z", "p"], pi_zp)
    assert sym_equal(J.E["z"], inv[2, 3])
