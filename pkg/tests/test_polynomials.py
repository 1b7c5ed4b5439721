import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nodalzeta.errors import ParseError
from nodalzeta.exact import NumberField
from nodalzeta.polynomials import (
    HomogeneousPolynomial,
    divide_with_cofactors,
    evaluate,
    frobenius_substitute,
    groebner_with_cofactors,
    in_ideal,
    jacobian,
    monomial_basis,
    monomial_count,
    parse_polynomial,
)

CAYLEY = "x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3"
FERMAT = "x0^3 + x1^3 + x2^3 + x3^3"


def poly(text):
    return parse_polynomial(text, 4)


def test_monomial_counts():
    assert list(monomial_basis(0, 4)) == [(0, 0, 0, 0)]
    assert len(monomial_basis(2, 4)) == 10
    assert monomial_count(108, 4) == 221815


def test_evaluate_cayley_node():
    assert evaluate(poly(CAYLEY), [1, 0, 0, 0]) == 0


def test_evaluate_kummer_node():
    K = NumberField([-3, 0, 1])
    s3 = K.gen()
    f = poly(
        "x0^4+x1^4+12*x2^4+27*x3^4+x0^2*(46*x1^2-20*x2^2-44*x2*x3-30*x3^2)"
        "-x1^2*(20*x2^2-44*x2*x3+30*x3^2)-30*x2^2*x3^2"
    )
    for sign in (1, -1):
        assert not evaluate(f, [sign * s3, K(0), K(-1), K(1)])


@given(st.lists(st.integers(-4, 4), min_size=4, max_size=4), st.integers(-3, 3).filter(bool))
def test_homogeneity(point, lam):
    f = poly(CAYLEY + " + 3*x0^3 - x2^2*x3")
    assert evaluate(f, [lam * x for x in point]) == lam**3 * evaluate(f, point)


def test_frobenius_substitution():
    assert frobenius_substitute(poly("x0*x1"), 5) == poly("x0^5*x1^5")
    sub = frobenius_substitute(poly(CAYLEY), 5)
    assert sub.degree == 15
    assert sub == poly("x0^5*x1^5*x2^5 + x0^5*x1^5*x3^5 + x0^5*x2^5*x3^5 + x1^5*x2^5*x3^5")


def test_groebner_single_generator():
    gb = groebner_with_cofactors([poly("x0")])
    assert gb.basis == [poly("x0")]
    assert gb.cofactors == [[HomogeneousPolynomial.monomial((0, 0, 0, 0))]]


def test_groebner_cayley_jacobian():
    f = poly(CAYLEY)
    gb = groebner_with_cofactors(jacobian(f))
    assert gb.check()
    for a in range(len(gb.basis)):
        for b in range(a + 1, len(gb.basis)):
            g, h = gb.basis[a], gb.basis[b]
            lg, lh = g.leading_monomial(), h.leading_monomial()
            lcm = tuple(max(x, y) for x, y in zip(lg, lh))
            sg = g.mul_monomial(tuple(x - y for x, y in zip(lcm, lg)), 1 / g.leading_coefficient())
            sh = h.mul_monomial(tuple(x - y for x, y in zip(lcm, lh)), 1 / h.leading_coefficient())
            assert in_ideal(sg - sh, gb)


def test_groebner_fermat_is_generators():
    gb = groebner_with_cofactors(jacobian(poly(FERMAT)))
    leads = sorted(g.leading_monomial() for g in gb.basis)
    assert leads == sorted(tuple(2 if i == j else 0 for i in range(4)) for j in range(4))


def test_euler_cofactors():
    f = poly(FERMAT)
    gb = groebner_with_cofactors(jacobian(f))
    cofs, rem = divide_with_cofactors(f, gb)
    assert not rem
    assert cofs == [HomogeneousPolynomial.variable(i, 4).scale(mpq(1, 3)) for i in range(4)]


def test_euler_relation_holds_generally():
    f = poly(CAYLEY)
    gb = groebner_with_cofactors(jacobian(f))
    cofs, rem = divide_with_cofactors(f, gb)
    assert not rem
    total = sum((c * g for c, g in zip(cofs, jacobian(f))), HomogeneousPolynomial.zero(3, 4))
    assert total == f


def test_cayley_frobenius_monomial_in_jacobian():
    gb = groebner_with_cofactors(jacobian(poly(CAYLEY)))
    assert in_ideal(poly("x0^9*x1^9*x2^4*x3^4"), gb)
    assert not in_ideal(poly("x0*x1"), gb)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_polynomial("x0^2 + * x1", 4)
    assert "column" in str(err.value)


def test_parse_rejects_inhomogeneous():
    with pytest.raises(ParseError):
        parse_polynomial("x0^2 + x1", 4)
