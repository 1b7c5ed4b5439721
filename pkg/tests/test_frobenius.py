import math

import pytest
from gmpy2 import mpq

from nodalzeta.exact import padic_embed
from nodalzeta.frobenius import (
    ReductionContext,
    frobenius_matrix,
    frobenius_term,
    precision_bound,
    reduce_classes,
    reduce_once,
    truncation_bound,
)
from nodalzeta.padic import padic_frobenius_matrix
from nodalzeta.polynomials import HomogeneousPolynomial, frobenius_substitute, groebner_with_cofactors, jacobian, parse_polynomial
from nodalzeta.spectral import e2_basis

from _data import surface


@pytest.fixture(scope="module")
def cayley():
    f = surface("cayley")
    gb = groebner_with_cofactors(jacobian(f))
    e2 = e2_basis(f, 4, gb)
    return f, e2, ReductionContext(f, e2, gb)


def test_precision_bound_cayley():
    assert precision_bound(2, 5, 3)[0] == 2


def test_precision_bound_kummer_7():
    gamma = math.comb(5, 2) * 7**2.5
    assert precision_bound(5, 7, 3)[0] == math.ceil(math.log(2 * gamma + 1, 7))


def test_precision_bound_empty():
    assert precision_bound(0, 5, 3)[0] == 0


def _scan_truncation(D, p, n):
    def rhs(k):
        return D + (n + 1) * int(math.floor(math.log(p * (k + n) - 1, p) + 1e-12)) - n + 1

    return max([k + 1 for k in range(2000) if k < rhs(k)] + [1])


@pytest.mark.parametrize("D,p", [(2, 5), (8, 7), (0, 5), (14, 5), (5, 7)])
def test_truncation_bound(D, p):
    assert truncation_bound(D, p, 3) == _scan_truncation(D, p, 3)


def test_truncation_bound_cayley():
    assert truncation_bound(2, 5, 3) == 8


def test_first_cayley_term():
    f = surface("cayley")
    term = frobenius_term(parse_polynomial("x0*x1", 4), 2, 0, 5, f)
    assert term.pole == 10
    assert term.numerator == parse_polynomial("125*x0^9*x1^9*x2^4*x3^4", 4)


@pytest.mark.parametrize("k", range(4))
def test_series_weights_at_pole_two(k):
    f = parse_polynomial("x0^3 + x1^3 + x2^3 + x3^3 + x0*x1*x2", 4)
    h = parse_polynomial("x0*x1", 4)
    g = f**5 - frobenius_substitute(f, 5)
    first = frobenius_term(h, 2, 0, 5, f).numerator
    expected = first * g**k if k else first
    assert frobenius_term(h, 2, k, 5, f).numerator == expected.scale(k + 1)


def test_kummer_omega_term():
    f = surface("kummer")
    one = HomogeneousPolynomial.monomial((0, 0, 0, 0))
    term = frobenius_term(one, 1, 0, 7, f)
    assert term.pole == 7
    assert term.numerator == parse_polynomial("343*x0^6*x1^6*x2^6*x3^6", 4)


def test_reduce_first_cayley_term(cayley):
    f, e2, ctx = cayley
    term = frobenius_term(parse_polynomial("x0*x1", 4), 2, 0, 5, f)
    got = reduce_classes(ctx, {"t": (term.numerator, term.pole)})["t"]
    assert got == [mpq(25, 126), 0]


def test_reduce_basis_element(cayley):
    f, e2, ctx = cayley
    rest, captured = reduce_once(parse_polynomial("x0*x2", 4), 2, ctx)
    assert not rest
    assert {k: v for k, v in captured.items() if v} == {1: 1}


def test_cayley_matrix_near_25(cayley):
    f, e2, ctx = cayley
    F = frobenius_matrix(f, 5, e2, ctx, 7)
    for i in range(2):
        for j in range(2):
            target = 25 if i == j else 0
            assert padic_embed(F.entries[i][j] - target, 5, 4).residue == 0


def test_padic_engine_matches_exact(cayley):
    f, e2, ctx = cayley
    exact = frobenius_matrix(f, 5, e2, ctx, 4)
    fast = padic_frobenius_matrix(f, 5, e2, ctx, 4)
    assert fast.precision >= 8
    for i in range(2):
        for j in range(2):
            diff = exact.entries[i][j] - fast.entries[i][j]
            assert padic_embed(diff, 5, fast.precision).residue == 0


def test_partial_sums(cayley):
    f, e2, ctx = cayley
    F = frobenius_matrix(f, 5, e2, ctx, 3)
    assert F.partial(1)[0][0] == mpq(25, 126)
    assert F.partial(3) == F.entries
