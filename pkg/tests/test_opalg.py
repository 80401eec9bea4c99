from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spinfock.opalg import (
    I, ContextMismatchError, GaussianRational, OperatorExpr as X, ParseError, RadialOp,
    THREE_D, anticommutator, as_scalar, commutator, is_zero, parse_expr, radial,
)
from spinfock.opalg.core import _is_zero_by_clearing


def P(text, **kw):
    return parse_expr(text, **kw)


# --- scalars -------------------------------------------------------------

def test_gaussian_rational_arithmetic():
    z = GaussianRational(Fraction(1, 2), 3)
    assert z * z.conjugate() == Fraction(37, 4)
    assert (z / z) == 1
    assert I ** 2 == -1
    assert as_scalar("2/3") == Fraction(2, 3)
    assert as_scalar(1j) == I


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        as_scalar(0.5)


# --- parser examples ---------------------------------------------------------

def test_parse_angular_momentum():
    l1 = P("x2*p3 - x3*p2")
    assert len(l1) == 2
    assert l1 == X.x(2) * X.p(3) - X.x(3) * X.p(2)


def test_parse_ccr_bracket():
    assert P("[p1, x1]") == X.scalar(-I)


def test_parse_pauli_product():
    assert P("s1*s2") == X.sigma(3) * I


def test_unknown_identifier_column():
    with pytest.raises(ParseError) as err:
        P("x4")
    assert err.value.column == 1
    assert "unknown identifier" in str(err.value)


def test_error_column_points_at_token():
    with pytest.raises(ParseError) as err:
        P("x1 + p1^-1")
    assert err.value.column >= 6


@pytest.mark.parametrize("text", ["x1 +", "(x1", "[x1, p1", "x1 ^ ", "2/0"])
def test_malformed_inputs(text):
    with pytest.raises(ParseError):
        P(text)


def test_radial_context_substitutes_j():
    op = parse_expr("j*(j+1)*r^-2 - dr^2", radial(Fraction(1, 2)))
    assert op == RadialOp.r(-2) * Fraction(3, 4) - RadialOp.dr(2)


def test_named_bindings():
    l3 = P("x1*p2 - x2*p1")
    assert P("[L3, x3]", names={"L3": l3}) == X.zero()


# --- multiplication ----------------------------------------------------------

def test_reordering():
    assert X.p(1) * X.x(1) == X.x(1) * X.p(1) - I


def test_laurent_cancellation():
    assert X.r(-1) * X.r(1) == X.identity()


def test_pauli_anticommuting_pair():
    assert X.sigma(2) * X.sigma(1) == X.sigma(3) * (-I)


def test_pauli_squares_and_anticommutators():
    for a in (1, 2, 3):
        assert X.sigma(a) * X.sigma(a) == X.identity()
        for b in (1, 2, 3):
            expect = X.identity() * 2 if a == b else X.zero()
            assert anticommutator(X.sigma(a), X.sigma(b)) == expect


def test_canonical_commutation():
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            expect = X.scalar(I) if a == b else X.zero()
            assert commutator(X.x(a), X.p(b)) == expect


def test_momentum_on_inverse_radius():
    assert commutator(X.p(1), X.r(-1)) == X.x(1) * X.r(-3) * I


def test_angular_momentum_algebra():
    l = [P("x2*p3 - x3*p2"), P("x3*p1 - x1*p3"), P("x1*p2 - x2*p1")]
    assert commutator(l[0], l[1]) == l[2] * I


def test_coulomb_hamiltonian_commutes_with_l3():
    h = P("1/2*m^-1*(p1^2 + p2^2 + p3^2) - q*r^-1")
    assert is_zero(commutator(h, P("x1*p2 - x2*p1")))


def test_radial_derivative_ccr():
    assert commutator(RadialOp.dr(), RadialOp.r()) == RadialOp.identity()
    assert RadialOp.dr().adjoint() == -RadialOp.dr()


def test_context_mismatch():
    with pytest.raises(ContextMismatchError):
        commutator(X.x(1), RadialOp.r())


# --- zero test -------------------------------------------------------------------

def test_ring_relation_is_zero():
    op = P("r^-2*(x1^2 + x2^2 + x3^2) - 1")
    assert is_zero(op)
    assert _is_zero_by_clearing(op)


def test_nonzero_operator():
    assert not is_zero(P("x1*p2 - x2*p1"))


def test_normal_form_eliminates_x3_squared():
    assert X.x(3, 2) == X.r(2) - X.x(1, 2) - X.x(2, 2)


# --- properties -----------------------------------------------------------------

_ATOMS_3D = ["x1", "x2", "x3", "p1", "p2", "p3", "s1", "s2", "s3", "r", "r^-1", "m", "alpha^-1", "i"]


@st.composite
def operators(draw, max_terms=3, max_factors=3):
    terms = []
    for _ in range(draw(st.integers(1, max_terms))):
        coeff = draw(st.fractions(min_value=-3, max_value=3, max_denominator=4))
        factors = draw(st.lists(st.sampled_from(_ATOMS_3D), min_size=0, max_size=max_factors))
        terms.append(f"({coeff})*" + "*".join(["1"] + factors))
    return P(" + ".join(terms))


@settings(max_examples=40, deadline=None)
@given(operators(), operators(), operators())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@settings(max_examples=40, deadline=None)
@given(operators(), operators(), operators())
def test_commutator_is_a_derivation(a, b, c):
    assert commutator(a, b * c) == commutator(a, b) * c + b * commutator(a, c)
    assert commutator(a, b) == -commutator(b, a)


@settings(max_examples=40, deadline=None)
@given(operators(), operators())
def test_adjoint_reverses_products(a, b):
    assert (a * b).adjoint() == b.adjoint() * a.adjoint()
    assert a.adjoint().adjoint() == a


@settings(max_examples=60, deadline=None)
@given(operators(max_terms=4))
def test_print_parse_round_trip(a):
    assert P(str(a)) == a


@settings(max_examples=60, deadline=None)
@given(operators(), operators())
def test_zero_routes_agree(a, b):
    d = a * b - b * a - commutator(a, b)
    assert is_zero(d) and _is_zero_by_clearing(d)
    e = a * b
    assert is_zero(e) == _is_zero_by_clearing(e) == (len(e) == 0)


def test_default_context_is_three_d():
    assert parse_expr("x1", THREE_D) == X.x(1)
