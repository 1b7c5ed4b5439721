"""Koszul cohomology of the Jacobian, the induced de Rham map, and E2 bases.

Level-n forms in the kernel of df^ are handled through their coefficient
vectors: alpha = sum_i (-1)^i a_i eps_i satisfies df ^ alpha = sum_i a_i f_i
and d(alpha) = (sum_i d a_i / d x_i) dx_0 ^ ... ^ dx_n, so kernel elements
are exactly syzygies of the partial derivatives.
"""

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from gmpy2 import mpq

from .errors import DimensionMismatch, SingularMatrix, TransversalityFailure
from .exact import NumberFieldElement
from .forms import DifferentialForm, _sort_sign
from .linalg import Echelon
from .polynomials import (
    HomogeneousPolynomial,
    divide,
    evaluate,
    groebner_with_cofactors,
    jacobian,
    lex_key,
    monomial_basis,
)


def b_formula(n, N):
    """Primitive middle Betti number of a smooth degree-N hypersurface in P^n."""
    if N < 2:
        raise ValueError("N must be at least 2")
    return ((N - 1) ** (n + 1) + (-1) ** (n + 1) * (N - 1)) // N


# ------------------------------------------------------------ graded maps


@dataclass
class GradedLinearMap:
    """Matrix of a linear map between graded pieces of forms.

    Columns are sparse dicts over target coordinates.  A coordinate of a
    level-l piece of coefficient degree j is ``block * |S_j| + monomial``,
    where ``block`` enumerates increasing index tuples in lexicographic order.
    """

    source_level: int
    source_degree: int
    target_level: int
    target_degree: int
    nrows: int
    columns: list

    @property
    def ncols(self):
        return len(self.columns)

    def to_dense(self):
        M = [[mpq(0)] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                M[i][j] = mpq(v)
        return M

    def rank(self):
        ech = Echelon()
        for col in self.columns:
            ech.insert(col)
        return ech.rank


class _Piece:
    """Coordinates of the level-l, coefficient-degree-j piece."""

    def __init__(self, level, degree, nvars):
        self.level = level
        self.degree = degree
        self.blocks = list(combinations(range(nvars), level))
        self.block_index = {b: i for i, b in enumerate(self.blocks)}
        self.monos = monomial_basis(degree, nvars) if degree >= 0 else ()
        self.mono_index = {m: i for i, m in enumerate(self.monos)}
        self.size = len(self.blocks) * len(self.monos)

    def coord(self, block, mono):
        return self.block_index[block] * len(self.monos) + self.mono_index[mono]

    def split(self, c):
        b, m = divmod(c, len(self.monos))
        return self.blocks[b], self.monos[m]

    def form_to_vector(self, form):
        vec = {}
        for idx, poly in form.components.items():
            for m, c in poly.terms.items():
                vec[self.coord(idx, m)] = c
        return vec

    def vector_to_form(self, vec, nvars):
        comps = {}
        for c, v in vec.items():
            if not v:
                continue
            block, mono = self.split(c)
            comps.setdefault(block, {})[mono] = v
        return DifferentialForm(
            self.level,
            {b: HomogeneousPolynomial(t, self.degree, nvars) for b, t in comps.items()},
            self.degree,
            nvars,
        )


def koszul_map(f, level, degree):
    """df ^ : (level, degree) -> (level + 1, degree + N - 1)."""
    nv = f.nvars
    N = f.degree
    src = _Piece(level, degree, nv)
    tgt = _Piece(level + 1, degree + N - 1, nv)
    partials = jacobian(f)
    columns = []
    for block in src.blocks:
        for mono in src.monos:
            col = {}
            for i in range(nv):
                if i in block or not partials[i]:
                    continue
                sign, new = _sort_sign((i,) + block)
                for m, c in partials[i].terms.items():
                    key = tgt.coord(new, tuple(a + b for a, b in zip(m, mono)))
                    v = col.get(key, 0) + sign * c
                    if v:
                        col[key] = v
                    else:
                        col.pop(key, None)
            columns.append(col)
    return GradedLinearMap(level, degree, level + 1, degree + N - 1, tgt.size, columns)


def _euler_dim(f, level, degree, gb):
    """Dimension from the Euler characteristic and the Hilbert function.

    Valid when the Koszul complex is exact below level n, i.e. for isolated
    singularities; used as an independent cross-check of the rank method.
    """
    nv = f.nvars
    n = nv - 1
    N = f.degree
    if level == n + 1:
        return gb.hilbert_function(degree) if degree >= 0 else 0
    if level != n:
        return 0
    chi = 0
    for l in range(n + 2):
        j = degree - (n - l) * (N - 1)
        size = comb(nv, l) * (comb(j + n, n) if j >= 0 else 0)
        chi += (-1) ** l * size
    top = gb.hilbert_function(degree + N - 1)
    return (-1) ** n * chi + top


def koszul_dim(f, level, degree, method="rank", gb=None):
    """dim H^level(K_f)_degree, with ``degree`` the coefficient degree.

    ``method="rank"`` uses exact elimination on the df^ matrices;
    ``method="euler"`` uses the Gröbner Hilbert function and the Euler
    characteristic (assumes isolated singularities).
    """
    if degree < 0:
        return 0
    nv = f.nvars
    if method == "euler":
        gb = gb or groebner_with_cofactors(jacobian(f), with_syzygies=False)
        return _euler_dim(f, level, degree, gb)
    N = f.degree
    dim_source = comb(nv, level) * comb(degree + nv - 1, nv - 1)
    rank_out = koszul_map(f, level, degree).rank() if level < nv else 0
    prev = degree - (N - 1)
    rank_in = koszul_map(f, level - 1, prev).rank() if level >= 1 and prev >= 0 else 0
    return dim_source - rank_out - rank_in


@dataclass
class KoszulCohomologySlice:
    level: int
    degree: int
    dimension: int
    basis: list = field(default_factory=list)


def _greedy_monomials(degree, nvars, independent):
    """Monomials in lex-descending order, kept when ``independent`` says so."""
    picked = []
    for m in sorted(monomial_basis(degree, nvars), key=lex_key, reverse=True):
        if independent(m):
            picked.append(m)
    return picked


def koszul_basis(f, level, degree):
    """Explicit representatives of H^level(K_f)_degree."""
    nv = f.nvars
    N = f.degree
    prev = degree - (N - 1)
    ech = Echelon()
    if level >= 1 and prev >= 0:
        for col in koszul_map(f, level - 1, prev).columns:
            ech.insert(col)
    piece = _Piece(level, degree, nv)
    if level == nv:
        one_block = tuple(range(nv))

        def independent(m):
            ok, _ = ech.insert({piece.coord(one_block, m): mpq(1)})
            return ok

        monos = _greedy_monomials(degree, nv, independent) if degree >= 0 else []
        basis = [DifferentialForm.top(HomogeneousPolynomial.monomial(m)) for m in monos]
        return KoszulCohomologySlice(level, degree, len(basis), basis)
    kernel = _kernel(koszul_map(f, level, degree)) if degree >= 0 else []
    basis = []
    for vec in kernel:
        ok, _ = ech.insert(vec)
        if ok:
            basis.append(piece.vector_to_form(vec, nv))
    return KoszulCohomologySlice(level, degree, len(basis), basis)


def _kernel(gmap):
    ech = Echelon(track=True)
    out = []
    for j, col in enumerate(gmap.columns):
        ok, relation = ech.insert(col, j)
        if not ok:
            out.append(relation)
    return out


# ---------------------------------------------------- syzygy based helpers


def syzygy_top(coeffs):
    """Top coefficient of d(alpha) for alpha = sum_i (-1)^i a_i eps_i."""
    out = None
    for i, a in enumerate(coeffs):
        if a:
            d = a.derivative(i)
            out = d if out is None else out + d
    if out is None:
        deg = max(coeffs[0].degree - 1, 0)
        return HomogeneousPolynomial.zero(deg, len(coeffs))
    return out


def syzygy_form(coeffs):
    """The level-n form sum_i (-1)^i a_i eps_i."""
    return DifferentialForm.from_level_n([a if i % 2 == 0 else -a for i, a in enumerate(coeffs)])


def shift_syzygy(coeffs, mono):
    return [a.mul_monomial(mono) for a in coeffs]


def syzygy_degree(coeffs):
    for a in coeffs:
        if a:
            return a.degree
    return None


def syzygy_candidates(gb, degree):
    """Monomial multiples of the syzygy generators with coefficient degree ``degree``.

    Sparser generators come first, so greedy selections stay sparse.
    """
    nv = gb.nvars
    gens = [s for s in gb.syzygies if syzygy_degree(s) is not None and syzygy_degree(s) <= degree]
    gens.sort(key=lambda s: (sum(len(a) for a in s), syzygy_degree(s)))
    for s in gens:
        shift = degree - syzygy_degree(s)
        for mono in monomial_basis(shift, nv):
            yield s, mono


class NormalForms:
    """Coordinates of polynomials in S_d / J_d via standard monomials."""

    def __init__(self, gb):
        self.gb = gb
        self._std = {}

    def standard(self, degree):
        if degree not in self._std:
            sm = self.gb.standard_monomials(degree) if degree >= 0 else []
            self._std[degree] = (sm, {m: i for i, m in enumerate(sm)})
        return self._std[degree]

    def vector(self, poly):
        _, rem = divide(poly, self.gb)
        _, index = self.standard(poly.degree)
        return {index[m]: c for m, c in rem.terms.items()}


def d_image_echelon(gb, nf, degree, stop_rank=None):
    """Echelon of NF(d(alpha)) over kernel elements alpha of coefficient degree ``degree + 1``.

    Returns (echelon, generators) where generators[i] is (syzygy, monomial)
    for each independent image, in insertion order.
    """
    ech = Echelon(track=True)
    sources = []
    if degree < 0:
        return ech, sources
    sm, _ = nf.standard(degree)
    full = len(sm)
    for syz, mono in syzygy_candidates(gb, degree + 1):
        if ech.rank >= full or (stop_rank is not None and ech.rank >= stop_rank):
            break
        top = syzygy_top(shift_syzygy(syz, mono))
        if not top:
            continue
        vec = nf.vector(top)
        ok, _ = ech.insert(vec, len(sources))
        if ok:
            sources.append((syz, mono))
    return ech, sources


# --------------------------------------------------------------- E1 and E2


def e1_differential(f, s):
    """Matrix of d : H^n(K_f)_{sN-n} -> H^{n+1}(K_f)_{sN-n-1} in koszul_basis bases."""
    nv = f.nvars
    n = nv - 1
    N = f.degree
    src = koszul_basis(f, n, s * N - n)
    tgt = koszul_basis(f, n + 1, s * N - n - 1)
    d = s * N - n - 1
    piece = _Piece(n + 1, d, nv)
    ech = Echelon(track=True)
    prev = d - (N - 1)
    if prev >= 0:
        for j, col in enumerate(koszul_map(f, n, prev).columns):
            ech.insert(col, ("im", j))
    for i, form in enumerate(tgt.basis):
        ech.insert(piece.form_to_vector(form), ("b", i))
    columns = []
    block = tuple(range(nv))
    for form in src.basis:
        coeffs = form.level_n_coefficients()
        signed = [a if i % 2 == 0 else -a for i, a in enumerate(coeffs)]
        top = syzygy_top(signed)
        vec = {piece.coord(block, m): c for m, c in top.terms.items()}
        coords = ech.coordinates(vec) if vec else {}
        columns.append({k[1]: v for k, v in coords.items() if k[0] == "b"})
    return GradedLinearMap(n, s * N - n, n + 1, d, tgt.dimension, columns)


@dataclass
class E2Basis:
    """Classes h * Omega / f^s spanning H^n_dR of the complement."""

    entries: list  # (HomogeneousPolynomial monomial, pole order)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def at_pole(self, s):
        return [(i, h) for i, (h, t) in enumerate(self.entries) if t == s]

    def describe(self):
        return [f"{h.to_string()} / f^{s}" for h, s in self.entries]


def e2_basis(f, tau=None, gb=None):
    """Monomial E2 basis chosen greedily in lex-descending order.

    A monomial is kept when its class is independent of the image of the E1
    differential and of the monomials already kept.
    """
    nv = f.nvars
    n = nv - 1
    N = f.degree
    gb = gb or groebner_with_cofactors(jacobian(f))
    nf = NormalForms(gb)
    entries = []
    for s in range(1, n + 1):
        d = s * N - n - 1
        if d < 0:
            continue
        ech, _ = d_image_echelon(gb, nf, d)
        sm, _ = nf.standard(d)
        if ech.rank == len(sm):
            continue

        def independent(m):
            ok, _ = ech.insert(nf.vector(HomogeneousPolynomial.monomial(m)))
            return ok

        for m in _greedy_monomials(d, nv, independent):
            entries.append((HomogeneousPolynomial.monomial(m), s))
    if tau is not None and n % 2 == 1:
        expected = b_formula(n, N) - tau
        if len(entries) != expected:
            raise DimensionMismatch(
                f"E2 basis has {len(entries)} elements, expected b(n,N) - tau = {expected}"
            )
    return E2Basis(entries)


def stabilized_degree(n, N):
    """Coefficient degree (n+1)N - n where the level-n slice has dimension tau."""
    return (n + 1) * N - n


def subdiagonal_generators(f, i0=0, points=None, gb=None, k_values=(0,)):
    """tau kernel forms at the stabilized degree, as syzygy coefficient vectors.

    The returned vectors a give forms sum_i (-1)^i a_i eps_i whose differentials
    are independent modulo the Jacobian ideal.  With ``points`` the node
    evaluation matrices of x_{i0}^k * gamma_i are checked for each k in
    ``k_values``; a singular one raises TransversalityFailure.
    """
    nv = f.nvars
    n = nv - 1
    N = f.degree
    gb = gb or groebner_with_cofactors(jacobian(f))
    nf = NormalForms(gb)
    e0 = stabilized_degree(n, N)
    sm, _ = nf.standard(e0 - 1)
    tau = len(sm)
    if tau == 0:
        return []
    ech = Echelon()
    gens = []
    for syz, mono in syzygy_candidates(gb, e0):
        vec_syz = shift_syzygy(syz, mono)
        top = syzygy_top(vec_syz)
        if not top:
            continue
        ok, _ = ech.insert(nf.vector(top))
        if ok:
            gens.append(vec_syz)
            if len(gens) == tau:
                break
    if len(gens) != tau:
        raise DimensionMismatch(f"found {len(gens)} of {tau} stabilized generators")
    if points is not None:
        unit = tuple(1 if j == i0 else 0 for j in range(nv))
        for k in k_values:
            mono = tuple(k * u for u in unit)
            tops = [syzygy_top(shift_syzygy(g, mono)) for g in gens]
            if not _nodes_independent(tops, points):
                raise TransversalityFailure(
                    f"x{i0}^{k} times the stabilized generators is not a basis at the nodes"
                )
    return gens


def node_vector(poly, points):
    """Evaluations at the nodes, flattened to rational coordinates."""
    out = []
    for P in points:
        v = evaluate(poly, P)
        if isinstance(v, NumberFieldElement):
            out.extend(v.coords)
        else:
            out.append(mpq(v))
    return {i: c for i, c in enumerate(out) if c}


def _nodes_independent(polys, points):
    ech = Echelon()
    for p in polys:
        ok, _ = ech.insert(node_vector(p, points))
        if not ok:
            return False
    return True


__all__ = [
    "b_formula",
    "GradedLinearMap",
    "koszul_map",
    "koszul_dim",
    "koszul_basis",
    "KoszulCohomologySlice",
    "e1_differential",
    "E2Basis",
    "e2_basis",
    "subdiagonal_generators",
    "syzygy_top",
    "syzygy_form",
    "NormalForms",
    "SingularMatrix",
]
