import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nodalzeta.errors import AmbiguousLift, PDivides, SingularMatrix
from nodalzeta.exact import (
    NumberField,
    PrimeField,
    TruncatedPadic,
    is_prime,
    nf_solve_linear,
    padic_embed,
    padic_to_integer,
)

primes = st.sampled_from([3, 5, 7, 11, 13])
small_rationals = st.builds(lambda a, b: mpq(a, b), st.integers(-10**6, 10**6), st.integers(1, 10**4))


def test_embed_cayley_residue():
    x = padic_embed(mpq(25, 126), 5, 8)
    assert x.digits() == [0, 0, 1, 0, 0, 4, 4, 4]


def test_embed_zero():
    assert padic_embed(0, 7, 5).residue == 0
    assert padic_embed(0, 7, 5).valuation == 5


def test_embed_minus_one():
    assert padic_embed(-1, 7, 4).digits() == [6, 6, 6, 6]


def test_embed_rejects_p_in_denominator():
    with pytest.raises(PDivides):
        padic_embed(mpq(1, 5), 5, 3)


def test_lift_small_integer():
    assert padic_to_integer(padic_embed(25, 5, 8), 50) == 25


def test_lift_kummer_coefficient():
    # the first eight 7-adic digits are displayed; one more separates the lift
    x = padic_embed(-10823719, 7, 9)
    assert x.digits()[:8] == [3, 5, 6, 6, 6, 6, 5, 0]
    assert padic_to_integer(x, 11 * 10**6) == -10823719


def test_lift_zero():
    assert padic_to_integer(TruncatedPadic(0, 5, 3), 10) == 0


def test_lift_ambiguous():
    with pytest.raises(AmbiguousLift):
        padic_to_integer(TruncatedPadic(3, 5, 1), 3)


@given(small_rationals, small_rationals, primes)
def test_embedding_is_a_ring_homomorphism(a, b, p):
    if int(a.denominator) % p == 0 or int(b.denominator) % p == 0:
        return
    D = 6
    ea, eb = padic_embed(a, p, D), padic_embed(b, p, D)
    assert ea + eb == padic_embed(a + b, p, D)
    assert ea * eb == padic_embed(a * b, p, D)


@given(st.integers(-10**9, 10**9), primes)
def test_lift_inverts_embedding(c, p):
    D = 1
    while p**D <= 2 * 10**9 + 1:
        D += 1
    assert padic_to_integer(padic_embed(c, p, D), 10**9) == c


def test_is_prime():
    assert [x for x in range(30) if is_prime(x)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_prime_field_inverse():
    F = PrimeField(7)
    assert (F(3) * F(mpq(1, 3))) == F(1)


def test_number_field_arithmetic():
    K = NumberField([-2, 0, 1])
    r = K.gen()
    assert r * r == K(2)
    assert (r + 1) * (r - 1) == K(1)
    assert (r.inverse() * r) == K(1)


def test_solve_identity():
    K = NumberField([-3, 0, 1])
    b = [K([1, 2]), K(5)]
    assert nf_solve_linear([[1, 0], [0, 1]], b) == b


def test_solve_forced_by_minpoly():
    K = NumberField([-2, 0, 1])
    r = K.gen()
    assert nf_solve_linear([[r]], [K(2)]) == [r]


def test_solve_conjugate_system_is_rational():
    # rows (1, s) and (1, -s) with s = sqrt 3 and a rational right side
    K = NumberField([-3, 0, 1])
    s = K.gen()
    sol = nf_solve_linear([[K(1), s], [K(1), -s]], [K(4), K(4)])
    assert sol[0] == K(4) and sol[1] == K(0)
    assert all(x.is_rational() for x in sol)


def test_solve_singular():
    with pytest.raises(SingularMatrix):
        nf_solve_linear([[1, 2], [2, 4]], [1, 2])


def test_certification_is_inconclusive_for_biquadratic_field():
    assert NumberField([-2, 0, 1]).is_certified_irreducible()
    assert not NumberField([1, 0, -10, 0, 1]).is_certified_irreducible()
