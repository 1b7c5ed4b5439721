import pytest

from nodalzeta.errors import NotIsolated, NotSingular
from nodalzeta.exact import NumberField
from nodalzeta.polynomials import parse_polynomial
from nodalzeta.singularities import (
    equisingularity_check,
    is_odp,
    normalize_point,
    tau_count,
    verify_singular_points,
)

from _data import load, surface


def test_cayley_nodes_verify():
    inp = load("cayley")
    pts = verify_singular_points(inp.problem.f, inp.problem.points, inp.problem.field)
    assert pts.tau == 4


def test_kummer_nodes_verify():
    inp = load("kummer")
    pts = verify_singular_points(inp.problem.f, inp.problem.points, inp.problem.field)
    assert pts.tau == 16


def test_smooth_point_rejected():
    K = NumberField([-2, 0, 1])
    f = surface("cayley")
    with pytest.raises(NotSingular):
        verify_singular_points(f, [[K(1), K(1), K(1), K.gen()]], K)


def test_repeated_point_rejected():
    f = surface("cayley")
    with pytest.raises(NotSingular):
        verify_singular_points(f, [[1, 0, 0, 0], [2, 0, 0, 0]])


def test_normalize_point():
    K = NumberField.rationals()
    assert normalize_point([2, 4, 0, 2], K) == [K(1), K(2), K(0), K(1)]


def test_cayley_node_is_odp():
    cert = is_odp(surface("cayley"), [1, 0, 0, 0])
    assert cert.is_odp and cert.rank == 3


def test_kummer_hessian_drops_mod_11():
    inp = load("kummer")
    f, P = inp.problem.f, inp.problem.points[0]
    cert = is_odp(f, P)
    assert cert.is_odp
    # (sqrt 3 : 0 : -1 : 1) is rational in x1, x2, x3 and the affine Hessian is -11616 * 8
    assert cert.affine_determinant.is_rational()
    assert cert.affine_determinant.to_rational() == -11616 * 8
    assert not is_odp(f, P, 11).is_odp
    assert is_odp(f, P, 5).is_odp


def test_cusp_is_not_odp():
    f = parse_polynomial("x0*x1*x3 - x2^3", 4)
    cert = is_odp(f, [0, 0, 0, 1])
    assert not cert.is_odp and cert.rank == 2


def test_double_plane_is_not_isolated():
    with pytest.raises(NotIsolated):
        tau_count(parse_polynomial("x0^2", 4))


@pytest.mark.parametrize("name,tau", [("cayley", 4), ("kummer", 16), ("six", 6), ("fermat", 0), ("quartic2nodes", 2)])
def test_tau_over_q(name, tau):
    assert tau_count(surface(name)) == tau


def test_tau_quintic():
    assert tau_count(surface("quintic")) == 14


def test_tau_quartic2nodes_mod_5():
    assert tau_count(surface("quartic2nodes"), 5) == 4


def test_gate_kummer_11_fails():
    inp = load("kummer")
    rep = equisingularity_check(inp.problem.f, 11, inp.problem.points)
    assert not rep.passed
    assert any("modulo 11" in r for r in rep.reasons)


def test_gate_quartic2nodes_fails():
    inp = load("quartic2nodes")
    rep = equisingularity_check(inp.problem.f, 5, inp.problem.points)
    assert not rep.passed
    assert rep.tau_q == 2 and rep.tau_p == 4


def test_gate_cayley_passes():
    inp = load("cayley")
    rep = equisingularity_check(inp.problem.f, 5, inp.problem.points)
    assert rep.passed
    assert rep.tau_q == rep.tau_p == 4


def test_gate_kummer_5_passes():
    inp = load("kummer")
    assert equisingularity_check(inp.problem.f, 5, inp.problem.points).passed
