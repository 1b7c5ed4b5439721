"""Identities of the de Rham, Koszul and Euler-contraction operators.

Every property compares exact rational forms for equality.
"""

from itertools import combinations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from nodalzeta.forms import (
    DifferentialForm,
    de_rham_d,
    deformed_d,
    euler_contract,
    exterior_derivative_of_function,
    koszul,
    standard_omega,
    wedge,
)
from nodalzeta.linalg import rank
from nodalzeta.polynomials import HomogeneousPolynomial, monomial_basis, parse_polynomial

NV = 4
CASES = settings(max_examples=1000, deadline=None)

coefficients = st.integers(-5, 5)


@st.composite
def polynomials(draw, degree, nvars=NV, max_terms=4):
    mons = monomial_basis(degree, nvars)
    picks = draw(st.lists(st.sampled_from(mons), min_size=0, max_size=max_terms))
    terms = {m: mpq(draw(coefficients)) for m in picks}
    return HomogeneousPolynomial(terms, degree, nvars)


@st.composite
def forms(draw, level=None, coeff_degree=None, nvars=NV):
    if level is None:
        level = draw(st.integers(0, nvars))
    if coeff_degree is None:
        coeff_degree = draw(st.integers(0, 3))
    idx = draw(st.lists(st.sampled_from(list(combinations(range(nvars), level))), max_size=3, unique=True))
    comps = {i: draw(polynomials(coeff_degree, nvars)) for i in idx}
    return DifferentialForm(level, comps, coeff_degree, nvars)


@st.composite
def hypersurfaces(draw, degrees=(2, 3, 4)):
    N = draw(st.sampled_from(degrees))
    f = draw(polynomials(N, max_terms=5))
    return f


def zero_like(level, degree):
    return DifferentialForm.zero(level, degree, NV)


# ------------------------------------------------------------- properties


@CASES
@given(forms())
def test_cartan_identity(omega):
    if omega.level == 0:
        omega = wedge(DifferentialForm.basic((0,), NV), omega)
    m = omega.total_degree
    lhs = euler_contract(de_rham_d(omega)) if omega.level < NV else zero_like(omega.level, omega.coeff_degree)
    rhs = de_rham_d(euler_contract(omega))
    assert lhs + rhs == omega.scale(m)


@CASES
@given(hypersurfaces())
def test_contraction_of_df(f):
    assert euler_contract(exterior_derivative_of_function(f)) == DifferentialForm.function(f.scale(f.degree))


@CASES
@given(forms(), st.integers(1, NV))
def test_contraction_exactness_witness(eta, level):
    # omega = Delta(eta) lies in ker Delta, and Delta(d omega) = m omega recovers it
    if eta.level == 0:
        eta = wedge(DifferentialForm.basic((level - 1,), NV), eta)
    omega = euler_contract(eta)
    if omega.level == 0:
        return
    assert not euler_contract(omega)
    m = omega.total_degree
    assert euler_contract(de_rham_d(omega)) == omega.scale(m)


@CASES
@given(forms())
def test_d_squared(omega):
    assert not de_rham_d(de_rham_d(omega))


@CASES
@given(forms(), hypersurfaces())
def test_koszul_squared(omega, f):
    assert not koszul(koszul(omega, f), f)


@CASES
@given(forms(), hypersurfaces())
def test_anticommutation(omega, f):
    df = exterior_derivative_of_function(f)
    lhs = de_rham_d(wedge(df, omega))
    rhs = wedge(df, de_rham_d(omega))
    assert lhs + rhs == zero_like(lhs.level, lhs.coeff_degree)


@st.composite
def deformation_data(draw):
    N = draw(st.sampled_from((2, 3)))
    s = draw(st.integers(1, 2))
    level = draw(st.integers(1, min(NV, s * N)))
    f = draw(polynomials(N, max_terms=5))
    gamma = draw(forms(level=level, coeff_degree=s * N - level))
    return f, s, gamma


@CASES
@given(deformation_data())
def test_deformed_differential_commutes_with_contraction(data):
    # f d(Delta g) - s df ^ Delta g = -Delta(f dg - s df ^ g) for |g| = sN
    f, s, gamma = data
    contracted = euler_contract(gamma)
    lhs = de_rham_d(contracted).scale(f) - koszul(contracted, f).scale(s)
    rhs = -euler_contract(de_rham_d(gamma).scale(f) - koszul(gamma, f).scale(s))
    assert lhs == rhs


def test_deformed_d_matches_definition():
    f = parse_polynomial("x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3", 4)
    gamma = DifferentialForm.basic((0, 2), NV, parse_polynomial("x3", 4))
    expected = de_rham_d(gamma).scale(f) - koszul(gamma, f).scale(mpq(gamma.total_degree, 3))
    assert deformed_d(gamma, f) == expected


# ---------------------------------------------------- exactness by rank


def _contraction_rank(level, degree):
    """Rank of Delta on level-l forms of total degree ``degree``."""
    cdeg = degree - level
    if cdeg < 0:
        return 0
    rows = []
    for idx in combinations(range(NV), level):
        for mono in monomial_basis(cdeg, NV):
            img = euler_contract(DifferentialForm.basic(idx, NV, HomogeneousPolynomial.monomial(mono)))
            vec = {}
            for j, poly in img.components.items():
                for m, c in poly.terms.items():
                    vec[(j, m)] = c
            rows.append(vec)
    keys = sorted({k for r in rows for k in r})
    where = {k: i for i, k in enumerate(keys)}
    return rank([{where[k]: v for k, v in r.items()} for r in rows])


def _space_dim(level, degree):
    from math import comb

    cdeg = degree - level
    if cdeg < 0:
        return 0
    return comb(NV, level) * comb(cdeg + NV - 1, NV - 1)


@pytest.mark.parametrize("degree", range(1, 9))
def test_contraction_complex_exact(degree):
    ranks = {l: _contraction_rank(l, degree) for l in range(1, NV + 1)}
    for level in range(1, NV):
        kernel = _space_dim(level, degree) - ranks[level]
        assert kernel == ranks[level + 1]
    # the image in level 0 is the whole degree slice of the maximal ideal
    assert ranks[1] == _space_dim(0, degree)
    assert ranks[NV] == _space_dim(NV, degree)


# ------------------------------------------------------------ examples


def test_basic_two_form():
    form = DifferentialForm.basic((0, 1), NV)
    assert form.level == 2
    assert form.component((0, 1)) == HomogeneousPolynomial.monomial((0, 0, 0, 0))


def test_basic_form_sign_from_order():
    assert DifferentialForm.basic((1, 0), NV) == -DifferentialForm.basic((0, 1), NV)
    assert not DifferentialForm.basic((2, 2), NV)


def test_cayley_correction_form():
    f = parse_polynomial("x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3", 4)
    gamma = DifferentialForm.basic((0, 2), NV, parse_polynomial("x3", 4))
    got = koszul(gamma, f)
    # df ^ x3 dx0^dx2 = x3 (f_1 dx1^dx0^dx2 + f_3 dx3^dx0^dx2)
    f1 = f.derivative(1)
    f3 = f.derivative(3)
    x3 = parse_polynomial("x3", 4)
    expected = DifferentialForm.basic((1, 0, 2), NV, f1 * x3) + DifferentialForm.basic((3, 0, 2), NV, f3 * x3)
    assert got == expected


def test_standard_omega():
    omega = standard_omega(NV)
    assert omega.level == NV - 1
    coeffs = omega.level_n_coefficients()
    for i, c in enumerate(coeffs):
        sign = -1 if i % 2 else 1
        assert c == HomogeneousPolynomial.variable(i, NV).scale(sign)


def test_closed_gamma_deformation():
    # d(gamma) = 0 leaves only the Koszul term
    f = parse_polynomial("x0^3 + x1^3 + x2^3 + x3^3", 4)
    gamma = de_rham_d(DifferentialForm.basic((0,), NV, parse_polynomial("x1^2", 4)))
    s = mpq(gamma.total_degree, 3)
    assert not de_rham_d(gamma)
    assert deformed_d(gamma, f) == -koszul(gamma, f).scale(s)
