"""Polynomial differential forms on affine (n+1)-space.

A level-l form is a map from strictly increasing index tuples to homogeneous
polynomials of one common degree.  Its total degree counts each dx_i as 1.
"""

from itertools import combinations

from gmpy2 import mpq

from .polynomials import HomogeneousPolynomial


def _sort_sign(indices):
    """Sign of the permutation sorting ``indices``; 0 if an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class DifferentialForm:
    """Homogeneous polynomial differential form.

    ``coeff_degree`` is the degree of the component polynomials; the total
    degree is ``coeff_degree + level``.
    """

    __slots__ = ("level", "components", "coeff_degree", "nvars")

    def __init__(self, level, components, coeff_degree=None, nvars=None):
        comps = {}
        for idx, poly in components.items():
            idx = tuple(idx)
            if len(idx) != level or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing of length {level}")
            if not poly:
                continue
            if coeff_degree is None:
                coeff_degree = poly.degree
            elif poly.degree != coeff_degree:
                raise ValueError("components of a form must share one degree")
            if nvars is None:
                nvars = poly.nvars
            comps[idx] = poly
        if coeff_degree is None or nvars is None:
            raise ValueError("degree and nvars are required for the zero form")
        if any(i >= nvars or i < 0 for idx in comps for i in idx):
            raise ValueError("index out of range")
        self.level = level
        self.components = comps
        self.coeff_degree = coeff_degree
        self.nvars = nvars

    # -- constructors

    @classmethod
    def zero(cls, level, coeff_degree, nvars):
        return cls(level, {}, coeff_degree, nvars)

    @classmethod
    def function(cls, poly):
        return cls(0, {(): poly}, poly.degree, poly.nvars)

    @classmethod
    def basic(cls, indices, nvars, poly=None):
        """poly * dx_{i_1} ^ ... ^ dx_{i_l} for arbitrary index order."""
        if poly is None:
            poly = HomogeneousPolynomial.monomial((0,) * nvars)
        sign, idx = _sort_sign(indices)
        if sign == 0:
            return cls.zero(len(indices), poly.degree, nvars)
        return cls(len(idx), {idx: poly.scale(sign)}, poly.degree, nvars)

    @classmethod
    def top(cls, poly):
        """poly * dx_0 ^ ... ^ dx_n."""
        return cls(poly.nvars, {tuple(range(poly.nvars)): poly}, poly.degree, poly.nvars)

    @classmethod
    def from_level_n(cls, coeffs):
        """sum_i a_i * eps_i with eps_i = dx_0..(omit i)..dx_n."""
        nv = len(coeffs)
        comps = {}
        deg = None
        for i, a in enumerate(coeffs):
            deg = a.degree if deg is None or a else deg
            if a:
                comps[tuple(j for j in range(nv) if j != i)] = a
        return cls(nv - 1, comps, deg if deg is not None else 0, nv)

    # -- protocol

    @property
    def total_degree(self):
        return self.coeff_degree + self.level

    def __bool__(self):
        return bool(self.components)

    def component(self, idx):
        return self.components.get(tuple(idx), HomogeneousPolynomial.zero(self.coeff_degree, self.nvars))

    def top_coefficient(self):
        if self.level != self.nvars:
            raise ValueError("not a top-level form")
        return self.component(tuple(range(self.nvars)))

    def level_n_coefficients(self):
        """Coefficients a_i with self = sum_i a_i eps_i (level n forms only)."""
        if self.level != self.nvars - 1:
            raise ValueError("not a level-n form")
        return [self.component(tuple(j for j in range(self.nvars) if j != i)) for i in range(self.nvars)]

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if not self.components and not other.components:
            return True
        return (
            self.level == other.level
            and self.coeff_degree == other.coeff_degree
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.level, frozenset(self.components.items())))

    def _check(self, other):
        if self.level != other.level or self.nvars != other.nvars:
            raise ValueError("forms of different levels")
        if self.components and other.components and self.coeff_degree != other.coeff_degree:
            raise ValueError("forms of different degrees")

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for idx, poly in other.components.items():
            s = comps[idx] + poly if idx in comps else poly
            if s:
                comps[idx] = s
            else:
                comps.pop(idx, None)
        deg = self.coeff_degree if self.components else other.coeff_degree
        return DifferentialForm(self.level, comps, deg, self.nvars)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if isinstance(c, HomogeneousPolynomial):
            return DifferentialForm(
                self.level, {i: p * c for i, p in self.components.items()}, self.coeff_degree + c.degree, self.nvars
            )
        c = mpq(c)
        return DifferentialForm(
            self.level, {i: p.scale(c) for i, p in self.components.items()} if c else {}, self.coeff_degree, self.nvars
        )

    __mul__ = scale

    def __rmul__(self, c):
        return self.scale(c)

    def __repr__(self):
        if not self.components:
            return f"DifferentialForm(level={self.level}, 0)"
        parts = []
        for idx in sorted(self.components):
            d = "^".join(f"dx{i}" for i in idx) or "1"
            parts.append(f"({self.components[idx].to_string()})*{d}")
        return " + ".join(parts)


def wedge(a, b):
    """Exterior product; graded commutative."""
    if a.nvars != b.nvars:
        raise ValueError("mixed numbers of variables")
    level = a.level + b.level
    deg = a.coeff_degree + b.coeff_degree
    if level > a.nvars:
        return DifferentialForm.zero(min(level, a.nvars), deg, a.nvars)
    comps = {}
    for ia, pa in a.components.items():
        for ib, pb in b.components.items():
            sign, idx = _sort_sign(ia + ib)
            if not sign:
                continue
            prod = pa * pb
            if sign < 0:
                prod = -prod
            comps[idx] = comps[idx] + prod if idx in comps else prod
    comps = {i: p for i, p in comps.items() if p}
    return DifferentialForm(level, comps, deg, a.nvars)


def exterior_derivative_of_function(poly):
    """df as a level-1 form."""
    comps = {}
    for i in range(poly.nvars):
        d = poly.derivative(i)
        if d:
            comps[(i,)] = d
    return DifferentialForm(1, comps, max(poly.degree - 1, 0), poly.nvars)


def de_rham_d(omega):
    """Exterior derivative; level goes up by one, total degree is preserved."""
    nv = omega.nvars
    if omega.level >= nv:
        return DifferentialForm.zero(nv, max(omega.coeff_degree - 1, 0), nv)
    comps = {}
    for idx, poly in omega.components.items():
        for j in range(nv):
            if j in idx:
                continue
            dp = poly.derivative(j)
            if not dp:
                continue
            sign, new = _sort_sign((j,) + idx)
            term = dp if sign > 0 else -dp
            comps[new] = comps[new] + term if new in comps else term
    comps = {i: p for i, p in comps.items() if p}
    return DifferentialForm(omega.level + 1, comps, max(omega.coeff_degree - 1, 0), nv)


def euler_contract(omega):
    """Contraction with the Euler field sum_i x_i d/dx_i."""
    nv = omega.nvars
    if omega.level == 0:
        raise ValueError("cannot contract a function")
    comps = {}
    for idx, poly in omega.components.items():
        for pos, i in enumerate(idx):
            new = idx[:pos] + idx[pos + 1 :]
            unit = tuple(1 if k == i else 0 for k in range(nv))
            term = poly.mul_monomial(unit, -1 if pos % 2 else 1)
            comps[new] = comps[new] + term if new in comps else term
    comps = {i: p for i, p in comps.items() if p}
    return DifferentialForm(omega.level - 1, comps, omega.coeff_degree + 1, nv)


def koszul(omega, f):
    """df ^ omega."""
    return wedge(exterior_derivative_of_function(f), omega)


def deformed_d(gamma, f):
    """d_f(gamma) = f * d(gamma) - (|gamma| / N) * df ^ gamma."""
    N = f.degree
    first = de_rham_d(gamma).scale(f)
    second = koszul(gamma, f).scale(mpq(gamma.total_degree, N))
    if not first:
        return -second
    if not second:
        return first
    return first - second


def standard_omega(nvars):
    """Omega = Euler contraction of dx_0 ^ ... ^ dx_n."""
    one = HomogeneousPolynomial.monomial((0,) * nvars)
    return euler_contract(DifferentialForm.top(one))


def basis_indices(level, nvars):
    return list(combinations(range(nvars), level))
