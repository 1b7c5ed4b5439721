import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nodalzeta.errors import AmbiguousLift, DegreeMismatch, WeilViolation
from nodalzeta.exact import padic_embed
from nodalzeta.zeta import (
    assemble_zeta,
    charpoly,
    degree_check,
    expand_factors,
    factor_q,
    format_factored,
    interesting_factor,
    recover_q,
    weil_root_check,
)

KUMMER_7 = [1, -11, -14, 98, 3773, -16807]
KUMMER_7_MATRIX = [
    [2932436, 3752975, 2573683, 0, 3187818],
    [3326797, 160280, 4878860, 0, 5469046],
    [273412, 5678768, 1729819, 0, 1682962],
    [0, 0, 0, 7 + 7**7, 0],
    [4996579, 3315242, 144893, 0, 5177634],
]


def test_charpoly_diagonal():
    assert charpoly([[25, 0], [0, 25]]) == [1, -50, 625]


def test_charpoly_zero_matrix():
    assert charpoly([[0, 0], [0, 0]])[1:] == [0, 0]
    assert charpoly([]) == [1]


def test_charpoly_kummer_display():
    got = charpoly(KUMMER_7_MATRIX)
    expected = [1, -10823719, -36173410616147, 190881663422782977071, -307702002432034842717713096,
                148750558587753605666444041808300]
    assert [int(x) for x in got] == expected


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=3, max_size=3))
def test_charpoly_against_cofactor_expansion(M):
    a = M
    trace = a[0][0] + a[1][1] + a[2][2]
    minors = sum(a[i][i] * a[j][j] - a[i][j] * a[j][i] for i in range(3) for j in range(i + 1, 3))
    det = (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )
    assert charpoly(M) == [1, -trace, minors, -det]


def test_recover_cayley():
    rec = interesting_factor([[mpq(25), 0], [0, mpq(25)]], 5, 3, 2)
    assert rec.coefficients == [1, -10, 25]


def test_recover_kummer_7_from_displayed_matrix():
    # the displayed matrix already includes the division by p
    cp = charpoly(KUMMER_7_MATRIX)
    rec = recover_q(cp, 7, 3, [10**6, 6, 6, 6, 6, 6])
    assert rec.coefficients == KUMMER_7


def test_recover_kummer_5():
    Q = expand_factors([([1, -5], 1), ([1, 5], 4)])
    approx = [mpq(c) + 5**9 * mpq(1, 3) for c in Q]
    approx[0] = mpq(1)
    assert recover_q(approx, 5, 3, [10**6] + [9] * 5).coefficients == Q


def test_recover_rejects_insufficient_precision():
    with pytest.raises(AmbiguousLift):
        recover_q([mpq(1), mpq(3), mpq(5)], 5, 3, [10**6, 1, 1])


def test_weil_root_check():
    assert weil_root_check(KUMMER_7, 7, 3)
    with pytest.raises(WeilViolation):
        weil_root_check([1, -20, 25], 5, 3)


def test_degree_check():
    assert degree_check([1, -10, 25], 3, 3, 4)
    with pytest.raises(DegreeMismatch):
        degree_check([1, -10, 25], 3, 3, 3)


def test_factor_kummer_7():
    found, rest = factor_q(KUMMER_7, 7, 3)
    assert found == [([1, -7], 3)]
    assert rest == [1, 10, 49]


def test_format_factored():
    assert format_factored([1, -10, 25], 5, 3) == "(1-5T)^2"


def test_assemble_cayley():
    z = assemble_zeta([1, -10, 25], 5, 3)
    assert z.describe() == "1/((1-T)(1-5T)^3(1-25T))"
    assert z.point_counts(3) == [41, 701, 16001]


def test_assemble_kummer_7():
    z = assemble_zeta(KUMMER_7, 7, 3)
    assert z.describe() == "1/((1-T)(1-7T)^4(1-49T)(1+10T+49T^2))"


def test_assemble_trivial_interesting_factor():
    z = assemble_zeta([1], 7, 3)
    assert z.describe() == "1/((1-T)(1-7T)(1-49T))"
    assert z.point_counts(1) == [57]


def test_padic_approximation_of_cayley_series():
    # partial sums of the reduction trace converge 5-adically to 25
    r = [mpq(25, 126), mpq(5**5, 9009), mpq(5**6, 34034), mpq(1013 * 5**5, 5819814),
         mpq(1487 * 5**6, 38244492), mpq(2084 * 5**6, 49766871), mpq(2087 * 5**8, 1185579252)]
    assert padic_embed(sum(r), 5, 4) == padic_embed(25, 5, 4)
