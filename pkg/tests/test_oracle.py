import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodalzeta.errors import BudgetExceeded, VerificationMismatch
from nodalzeta.oracle import (
    ExtensionField,
    count_points,
    is_irreducible,
    least_irreducible,
    projective_space_count,
    verify_zeta,
)
from nodalzeta.polynomials import HomogeneousPolynomial, monomial_basis, parse_polynomial
from nodalzeta.zeta import assemble_zeta

from _data import surface


def test_least_irreducible():
    assert least_irreducible(19, 2) == [1, 0, 1]
    assert least_irreducible(2, 3) == [1, 1, 0, 1]
    assert is_irreducible([2, 0, 1], 5)
    assert not is_irreducible([1, 0, 1], 5)


@pytest.mark.parametrize("p,r", [(5, 1), (3, 2), (2, 3), (7, 2)])
def test_extension_field_axioms(p, r):
    F = ExtensionField(p, r)
    q = F.q
    assert all(F.mul[1, x] == x for x in range(q))
    assert all(F.add[x, F.neg[x]] == 0 for x in range(q))
    # every nonzero element has an inverse
    assert all((F.mul[x] == 1).any() for x in range(1, q))
    # Frobenius x -> x^p is additive
    pw = F.power_table(p)
    assert all(pw[p, F.add[x, y]] == F.add[pw[p, x], pw[p, y]] for x in range(q) for y in range(q))


def test_cayley_count():
    assert count_points(surface("cayley"), 5) == 41


def test_six_node_count_over_f361():
    assert count_points(surface("six"), 19, 2, jobs=1) == 132267


@pytest.mark.parametrize("p,r", [(2, 1), (3, 2), (5, 1), (2, 3)])
def test_hyperplane_count(p, r):
    assert count_points(parse_polynomial("x0", 4), p, r) == projective_space_count(p**r, 2)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_projective_space_identity(p):
    # x0*...: union of coordinate hyperplanes has #P^3 - (q-1)^3 points
    f = parse_polynomial("x0*x1*x2*x3", 4)
    assert count_points(f, p) == projective_space_count(p, 3) - (p - 1) ** 3


@st.composite
def cubics(draw):
    mons = monomial_basis(3, 4)
    picks = draw(st.lists(st.sampled_from(mons), min_size=1, max_size=5, unique=True))
    return HomogeneousPolynomial({m: draw(st.integers(1, 4)) for m in picks}, 3, 4)


@settings(max_examples=40, deadline=None)
@given(cubics(), st.sampled_from([(3, 1), (5, 1), (2, 2)]))
def test_chart_orders_agree(f, pr):
    p, r = pr
    assert count_points(f, p, r) == count_points(f, p, r, order="last")


def test_budget():
    with pytest.raises(BudgetExceeded):
        count_points(surface("cayley"), 5, 3, budget=10**4)


def test_verify_cayley_three_extensions():
    z = assemble_zeta([1, -10, 25], 5, 3)
    rows = verify_zeta(z, surface("cayley"), 5, R=3)
    assert [row[2] for row in rows] == [41, 701, 16001]


def test_verify_kummer_11_smooth_quadric():
    z = assemble_zeta([1, 11], 11, 3)
    assert len(verify_zeta(z, surface("kummer"), 11, R=2)) == 2


def test_verify_detects_perturbation():
    z = assemble_zeta([1, -9, 25], 5, 3)
    with pytest.raises(VerificationMismatch):
        verify_zeta(z, surface("cayley"), 5, R=1)


def _naive_count(f, p):
    """Plain enumeration of points whose first nonzero coordinate is 1."""
    terms = [(m, int(c)) for m, c in f.terms.items()]
    count = 0
    for P in itertools.product(range(p), repeat=4):
        if any(P) and next(x for x in P if x) == 1:
            value = sum(c * math.prod(x**e for x, e in zip(P, m)) for m, c in terms)
            count += value % p == 0
    return count


@pytest.mark.parametrize("name,p", [("fermat", 7), ("cayley", 5), ("six", 5)])
def test_naive_enumeration_agrees(name, p):
    f = surface(name)
    assert count_points(f, p) == _naive_count(f, p)
