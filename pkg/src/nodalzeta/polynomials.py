"""Homogeneous polynomials in n+1 variables and a Gröbner engine.

Monomials are exponent tuples.  Within a degree they are enumerated in
descending grevlex order (x0 > x1 > ... > xn), and ``MonomialIndexer`` maps
exponent arrays to positions in that enumeration with numpy so that the
reduction engine can build its index tables without Python-level loops.
"""

import heapq
import itertools
from functools import lru_cache
from math import comb

import numpy as np
from gmpy2 import mpq

from .errors import ParseError
from .exact import rational

# --------------------------------------------------------------- monomials


def monomial_degree(m):
    return sum(m)


def grevlex_key(m):
    """Sort key: larger key means larger monomial in grevlex."""
    return (sum(m), tuple(-e for e in reversed(m)))


def _heap_key(m):
    return (-sum(m), tuple(reversed(m)))


def lex_key(m):
    return tuple(m)


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


@lru_cache(maxsize=64)
def _monomial_basis(degree, nvars):
    if nvars == 1:
        return ((degree,),)
    out = []
    # descending grevlex: last exponent ascending, then the previous one, ...
    def rec(prefix_rev, remaining, k):
        if k == 1:
            out.append((remaining,) + tuple(reversed(prefix_rev)))
            return
        for e in range(remaining + 1):
            rec(prefix_rev + (e,), remaining - e, k - 1)

    rec((), degree, nvars)
    return tuple(out)


def monomial_basis(degree, nvars=4):
    """All monomials of ``degree`` in ``nvars`` variables, grevlex descending."""
    if degree < 0:
        return ()
    return _monomial_basis(degree, nvars)


def monomial_count(degree, nvars=4):
    return comb(degree + nvars - 1, nvars - 1) if degree >= 0 else 0


class MonomialIndexer:
    """Vectorised rank of monomials inside ``monomial_basis(d, nvars)``."""

    def __init__(self, nvars, max_degree=512):
        self.nvars = nvars
        size = max_degree + nvars + 2
        table = np.zeros((size, nvars + 1), dtype=np.int64)
        for a in range(size):
            for j in range(nvars + 1):
                table[a, j] = comb(a, j) if a >= j else 0
        self._binom = table

    def index(self, exps, degree):
        """Positions of the rows of ``exps`` (shape k x nvars) in degree ``degree``."""
        exps = np.asarray(exps, dtype=np.int64)
        B = self._binom
        idx = np.zeros(exps.shape[0], dtype=np.int64)
        rem = np.full(exps.shape[0], degree, dtype=np.int64)
        for j in range(self.nvars - 1, 0, -1):
            mj = exps[:, j]
            idx += B[rem + j, j] - B[rem - mj + j, j]
            rem = rem - mj
        return idx

    def index_one(self, m):
        return int(self.index(np.array([m]), sum(m))[0])


# -------------------------------------------------------------- polynomials


class HomogeneousPolynomial:
    """Sparse homogeneous polynomial with exact coefficients.

    ``terms`` maps exponent tuples to nonzero coefficients.  The degree is
    fixed at construction so the zero polynomial still knows its grade.
    """

    __slots__ = ("terms", "degree", "nvars")

    def __init__(self, terms, degree=None, nvars=None):
        clean = {}
        for m, c in terms.items():
            if c:
                m = tuple(int(e) for e in m)
                clean[m] = c
        if nvars is None:
            if not clean:
                raise ValueError("nvars is required for the zero polynomial")
            nvars = len(next(iter(clean)))
        if degree is None:
            if not clean:
                raise ValueError("degree is required for the zero polynomial")
            degree = sum(next(iter(clean)))
        for m in clean:
            if len(m) != nvars or sum(m) != degree or min(m) < 0:
                raise ValueError(f"monomial {m} does not have degree {degree} in {nvars} variables")
        self.terms = clean
        self.degree = degree
        self.nvars = nvars

    @classmethod
    def _raw(cls, terms, degree, nvars):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.degree = degree
        obj.nvars = nvars
        return obj

    @classmethod
    def zero(cls, degree, nvars):
        return cls._raw({}, degree, nvars)

    @classmethod
    def monomial(cls, exps, coeff=1):
        exps = tuple(exps)
        return cls._raw({exps: rational(coeff)} if coeff else {}, sum(exps), len(exps))

    @classmethod
    def variable(cls, i, nvars):
        return cls.monomial(tuple(1 if j == i else 0 for j in range(nvars)))

    @classmethod
    def parse(cls, text, nvars=None):
        return parse_polynomial(text, nvars)

    # -- basic protocol

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.sorted_terms())

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def coefficient(self, m):
        return self.terms.get(tuple(m), 0)

    def leading_monomial(self):
        return max(self.terms, key=grevlex_key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def __eq__(self, other):
        if isinstance(other, HomogeneousPolynomial):
            if not self.terms and not other.terms:
                return True
            return self.degree == other.degree and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    # -- arithmetic

    def _check(self, other):
        if other.nvars != self.nvars:
            raise ValueError("mixed numbers of variables")
        if self.terms and other.terms and other.degree != self.degree:
            raise ValueError(f"cannot add degree {self.degree} and degree {other.degree}")

    def __add__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            if other == 0:
                return self
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        degree = self.degree if self.terms else other.degree
        return HomogeneousPolynomial._raw(out, degree, self.nvars)

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented

    def __neg__(self):
        return HomogeneousPolynomial._raw({m: -c for m, c in self.terms.items()}, self.degree, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return HomogeneousPolynomial.zero(self.degree, self.nvars)
        return HomogeneousPolynomial._raw({m: v * c for m, v in self.terms.items()}, self.degree, self.nvars)

    def __mul__(self, other):
        if isinstance(other, HomogeneousPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("mixed numbers of variables")
            out = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    v = out.get(m, 0) + c1 * c2
                    if v:
                        out[m] = v
                    else:
                        out.pop(m, None)
            return HomogeneousPolynomial._raw(out, self.degree + other.degree, self.nvars)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return self.scale(1 / rational(c))

    def __pow__(self, e):
        result = HomogeneousPolynomial.monomial((0,) * self.nvars)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mul_monomial(self, exps, coeff=1):
        exps = tuple(exps)
        return HomogeneousPolynomial._raw(
            {tuple(a + b for a, b in zip(m, exps)): c * coeff for m, c in self.terms.items()} if coeff else {},
            self.degree + sum(exps),
            self.nvars,
        )

    def derivative(self, i):
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = m[:i] + (e - 1,) + m[i + 1 :]
                out[mm] = c * e
        return HomogeneousPolynomial._raw(out, max(self.degree - 1, 0), self.nvars) if self.degree > 0 else \
            HomogeneousPolynomial.zero(0, self.nvars)

    def gradient(self):
        return [self.derivative(i) for i in range(self.nvars)]

    def map_coefficients(self, fn):
        out = {}
        for m, c in self.terms.items():
            v = fn(c)
            if v:
                out[m] = v
        return HomogeneousPolynomial._raw(out, self.degree, self.nvars)

    def __call__(self, point):
        return evaluate(self, point)

    def to_string(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"HomogeneousPolynomial({self.to_string()!r}, degree={self.degree})"


def evaluate(poly, point):
    """Exact value of ``poly`` at ``point`` (any coefficients supporting * and +)."""
    if len(point) != poly.nvars:
        raise ValueError(f"point has {len(point)} coordinates, expected {poly.nvars}")
    powers = [{} for _ in point]

    def pw(i, e):
        cache = powers[i]
        v = cache.get(e)
        if v is None:
            v = point[i] ** e
            cache[e] = v
        return v

    total = None
    for m, c in poly.terms.items():
        term = c
        for i, e in enumerate(m):
            if e:
                term = pw(i, e) * term
        total = term if total is None else total + term
    if total is None:
        return 0 * point[0] if point else 0
    return total


def frobenius_substitute(poly, p):
    """x_i -> x_i^p applied to every monomial."""
    return HomogeneousPolynomial._raw(
        {tuple(e * p for e in m): c for m, c in poly.terms.items()}, poly.degree * p, poly.nvars
    )


def linear_substitute(poly, A):
    """poly(A x), i.e. x_i -> sum_j A[i][j] x_j."""
    nv = poly.nvars
    unit = [tuple(int(k == j) for k in range(nv)) for j in range(nv)]
    lin = [
        HomogeneousPolynomial._raw({unit[j]: mpq(A[i][j]) for j in range(nv) if A[i][j]}, 1, nv)
        for i in range(nv)
    ]
    one = HomogeneousPolynomial._raw({(0,) * nv: mpq(1)}, 0, nv)
    powers = [[one] for _ in range(nv)]

    def pw(i, e):
        while len(powers[i]) <= e:
            powers[i].append(powers[i][-1] * lin[i])
        return powers[i][e]

    total = HomogeneousPolynomial.zero(poly.degree, nv)
    for m, c in poly.terms.items():
        t = one
        for i, e in enumerate(m):
            if e:
                t = t * pw(i, e)
        total = total + t.scale(c)
    return total


def format_polynomial(poly, names=None):
    if not poly.terms:
        return "0"
    names = names or [f"x{i}" for i in range(poly.nvars)]
    parts = []
    for m, c in poly.sorted_terms():
        mono = "*".join(
            names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(m) if e
        )
        c = rational(c)
        if mono:
            if c == 1:
                s = mono
            elif c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}"
        else:
            s = str(c)
        parts.append(s)
    out = parts[0]
    for s in parts[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


# ------------------------------------------------------------------- parser


class _Parser:
    """Recursive-descent parser for +, -, *, /, ^ and parentheses.

    Produces a dict from exponent tuples (over ``names``) to rationals.
    Division is only allowed by constants.
    """

    def __init__(self, text, names, line=None):
        self.text = text
        self.names = names
        self.pos = 0
        self.line = line
        self.nv = len(names)

    def error(self, msg):
        raise ParseError(msg, line=self.line, column=self.pos + 1)

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        if not self.peek():
            self.error("empty expression")
        value = self.expr()
        if self.peek():
            self.error(f"unexpected character {self.peek()!r}")
        return value

    def expr(self):
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        value = _scale(self.term(), sign)
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            value = _add(value, rhs if op == "+" else _scale(rhs, -1))
        return value

    def term(self):
        value = self.power()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                value = _mul(value, self.power())
            elif ch == "/":
                self.pos += 1
                start = self.pos
                rhs = self.power()
                if any(any(m) for m in rhs) or not rhs:
                    self.pos = start
                    self.error("division by a non-constant or zero")
                value = _scale(value, 1 / rhs[(0,) * self.nv])
            elif ch and (ch == "(" or ch.isalpha() or ch.isdigit()):
                value = _mul(value, self.power())  # implicit product, e.g. 2x0
            else:
                return value

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            if self.peek() == "(":
                self.error("exponent must be a non-negative integer")
            e = self.integer()
            result = {(0,) * self.nv: mpq(1)}
            for _ in range(e):
                result = _mul(result, base)
            return result
        return base

    def integer(self):
        self.peek()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected an integer")
        return int(self.text[start : self.pos])

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                self.error("missing closing parenthesis")
            self.pos += 1
            return value
        if ch.isdigit():
            return {(0,) * self.nv: mpq(self.integer())}
        if ch == "-" or ch == "+":
            self.pos += 1
            return _scale(self.power(), -1 if ch == "-" else 1)
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start : self.pos]
            if name not in self.names:
                self.pos = start
                self.error(f"unknown variable {name!r}")
            i = self.names.index(name)
            return {tuple(1 if j == i else 0 for j in range(self.nv)): mpq(1)}
        self.error(f"unexpected {ch!r}" if ch else "unexpected end of input")


def _add(a, b):
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _scale(a, c):
    return {m: v * c for m, v in a.items() if v * c}


def _mul(a, b):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def parse_expression(text, names, line=None):
    """Parse an expression into {exponent tuple: Rational} over ``names``."""
    return _Parser(text, list(names), line).parse()


def parse_polynomial(text, nvars=None, line=None):
    """Parse a homogeneous polynomial in x0..x{nvars-1}.

    When ``nvars`` is omitted it is inferred from the largest index used.
    """
    if nvars is None:
        import re

        idx = [int(k) for k in re.findall(r"x(\d+)", text)]
        if not idx:
            raise ParseError("no variables x0, x1, ... found", line=line)
        nvars = max(idx) + 1
    terms = parse_expression(text, [f"x{i}" for i in range(nvars)], line)
    degrees = {sum(m) for m in terms}
    if len(degrees) > 1:
        raise ParseError(f"polynomial is not homogeneous (degrees {sorted(degrees)})", line=line)
    if not terms:
        raise ParseError("polynomial is zero", line=line)
    return HomogeneousPolynomial(terms, nvars=nvars)


# ----------------------------------------------------------- Gröbner bases


class GroebnerBasis:
    """Reduced grevlex Gröbner basis remembering how it was built.

    ``cofactors[k][i]`` is the coefficient of ``generators[i]`` in
    ``basis[k]``.  ``syzygies`` generate the module of relations
    ``sum_i a_i * generators[i] = 0``.
    """

    def __init__(self, generators, basis, cofactors, syzygies=None):
        self.generators = list(generators)
        self.basis = list(basis)
        self.cofactors = [list(c) for c in cofactors]
        self.syzygies = syzygies
        self.nvars = generators[0].nvars
        self.leading = [g.leading_monomial() for g in self.basis]

    def __len__(self):
        return len(self.basis)

    def reduces(self, m):
        return any(divides(lm, m) for lm in self.leading)

    def standard_monomials(self, degree):
        return [m for m in monomial_basis(degree, self.nvars) if not self.reduces(m)]

    def hilbert_function(self, degree):
        """dim of (S / ideal) in ``degree``."""
        return len(self.standard_monomials(degree))

    def check(self):
        """Verify the recorded cofactor combinations exactly."""
        for g, row in zip(self.basis, self.cofactors):
            total = HomogeneousPolynomial.zero(g.degree, self.nvars)
            for c, f in zip(row, self.generators):
                if c:
                    total = total + c * f
            if total != g:
                return False
        return True


def _reduce_full(poly, basis, leading):
    """Full division of ``poly`` by ``basis``; returns (quotients, remainder).

    Quotients are term dicts, one per basis element.
    """
    work = dict(poly.terms)
    heap = [(_heap_key(m), m) for m in work]
    heapq.heapify(heap)
    quots = [dict() for _ in basis]
    rem = {}
    lcs = [b.terms[lm] for b, lm in zip(basis, leading)]
    while heap:
        _, m = heapq.heappop(heap)
        c = work.pop(m, None)
        if not c:
            continue
        for k, lm in enumerate(leading):
            if divides(lm, m):
                q = mono_div(m, lm)
                factor = c / lcs[k]
                quots[k][q] = quots[k].get(q, 0) + factor
                for tm, tc in basis[k].terms.items():
                    if tm == lm:
                        continue
                    t = mono_mul(tm, q)
                    v = work.get(t)
                    if v is None:
                        work[t] = -factor * tc
                        heapq.heappush(heap, (_heap_key(t), t))
                    else:
                        v -= factor * tc
                        if v:
                            work[t] = v
                        else:
                            del work[t]
                break
        else:
            rem[m] = c
    return quots, HomogeneousPolynomial._raw(rem, poly.degree, poly.nvars)


def _combine(coeff_polys, rows, nvars, degree, width=None):
    """sum_k coeff_polys[k] * rows[k] (rows are vectors of polynomials)."""
    if width is None:
        width = len(rows[0]) if rows else 0
    out = [HomogeneousPolynomial.zero(degree, nvars) for _ in range(width)]
    for q, row in zip(coeff_polys, rows):
        if not q:
            continue
        for i, c in enumerate(row):
            if c:
                out[i] = out[i] + q * c
    return out


def _terms_poly(terms, nvars, degree):
    return HomogeneousPolynomial._raw({m: c for m, c in terms.items() if c}, degree, nvars)


def groebner_with_cofactors(generators, with_syzygies=True):
    """Reduced grevlex Gröbner basis of homogeneous generators with cofactors."""
    gens = [g for g in generators]
    if not gens or any(not g for g in gens):
        raise ValueError("generators must be nonzero")
    nvars = gens[0].nvars
    m = len(gens)

    def unit(i):
        return [
            HomogeneousPolynomial.monomial((0,) * nvars) if j == i else HomogeneousPolynomial.zero(0, nvars)
            for j in range(m)
        ]

    basis, cof = [], []

    def add(poly, row):
        lc = poly.leading_coefficient()
        inv = 1 / lc
        basis.append(poly.scale(inv))
        cof.append([c.scale(inv) if c else HomogeneousPolynomial.zero(poly.degree - gens[j].degree, nvars)
                    for j, c in enumerate(row)])

    for i, g in enumerate(gens):
        leading = [b.leading_monomial() for b in basis]
        quots, rem = _reduce_full(g, basis, leading) if basis else ([], g)
        if rem:
            row = unit(i)
            corr = _combine(
                [_terms_poly(q, nvars, g.degree - b.degree) for q, b in zip(quots, basis)], cof, nvars, 0, m
            )
            row = [r - c if c else r for r, c in zip(row, corr)]
            add(rem, _fix_degrees(row, rem.degree, gens))

    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    while pairs:
        pairs.sort(key=lambda ij: (sum(mono_lcm(basis[ij[0]].leading_monomial(), basis[ij[1]].leading_monomial())), ij[1], ij[0]))
        i, j = pairs.pop(0)
        lmi, lmj = basis[i].leading_monomial(), basis[j].leading_monomial()
        lcm = mono_lcm(lmi, lmj)
        if lcm == mono_mul(lmi, lmj):
            continue  # coprime leading monomials
        if _chain_criterion(i, j, lcm, basis, pairs):
            continue
        ui, uj = mono_div(lcm, lmi), mono_div(lcm, lmj)
        s = basis[i].mul_monomial(ui) - basis[j].mul_monomial(uj)
        if not s:
            continue
        leading = [b.leading_monomial() for b in basis]
        quots, rem = _reduce_full(s, basis, leading)
        if not rem:
            continue
        row = [
            a.mul_monomial(ui) - b.mul_monomial(uj)
            for a, b in zip(cof[i], cof[j])
        ]
        corr = _combine([_terms_poly(q, nvars, s.degree - b.degree) for q, b in zip(quots, basis)], cof, nvars, 0)
        row = [r - c for r, c in zip(row, corr)]
        add(rem, _fix_degrees(row, rem.degree, gens))
        k = len(basis) - 1
        pairs.extend((a, k) for a in range(k))

    basis, cof = _interreduce(basis, cof, gens)
    gb = GroebnerBasis(gens, basis, cof)
    if with_syzygies:
        gb.syzygies = _syzygies(gb)
    return gb


def _fix_degrees(row, degree, gens):
    """Give zero cofactors the right degree so later sums type-check."""
    out = []
    for c, g in zip(row, gens):
        if not c:
            out.append(HomogeneousPolynomial.zero(degree - g.degree, g.nvars))
        else:
            out.append(c)
    return out


def _chain_criterion(i, j, lcm, basis, pairs):
    pending = set(pairs)
    for k in range(len(basis)):
        if k in (i, j):
            continue
        if not divides(basis[k].leading_monomial(), lcm):
            continue
        a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
        if a not in pending and b not in pending:
            return True
    return False


def _interreduce(basis, cof, gens):
    nvars = gens[0].nvars
    # drop elements whose leading monomial is divisible by another's
    keep = []
    lms = [b.leading_monomial() for b in basis]
    for k, lm in enumerate(lms):
        redundant = False
        for l, other in enumerate(lms):
            if l != k and divides(other, lm) and (other != lm or l < k):
                redundant = True
                break
        if not redundant:
            keep.append(k)
    basis = [basis[k] for k in keep]
    cof = [cof[k] for k in keep]
    order = sorted(range(len(basis)), key=lambda k: grevlex_key(basis[k].leading_monomial()))
    basis = [basis[k] for k in order]
    cof = [cof[k] for k in order]
    for k in range(len(basis)):
        others = [b for l, b in enumerate(basis) if l != k]
        other_cof = [c for l, c in enumerate(cof) if l != k]
        lm = basis[k].leading_monomial()
        lead = HomogeneousPolynomial._raw({lm: basis[k].terms[lm]}, basis[k].degree, nvars)
        tail = basis[k] - lead
        leading = [b.leading_monomial() for b in others]
        quots, rem = _reduce_full(tail, others, leading)
        if any(quots):
            corr = _combine(
                [_terms_poly(q, nvars, tail.degree - b.degree) for q, b in zip(quots, others)],
                other_cof, nvars, 0, len(gens),
            )
            cof[k] = [r - c for r, c in zip(cof[k], corr)]
            basis[k] = lead + rem
    # monic with integral-friendly ordering: ascending leading monomial
    return basis, [_fix_degrees(row, b.degree, gens) for row, b in zip(cof, basis)]


def _syzygies(gb):
    """Generators of the syzygy module of the original generators."""
    nvars = gb.nvars
    gens = gb.generators
    out = []
    basis, leading = gb.basis, gb.leading

    def to_generators(vec, degree):
        # vec: per-basis polynomial coefficients
        return _combine(vec, gb.cofactors, nvars, 0)

    for j in range(len(basis)):
        for i in range(j):
            lcm = mono_lcm(leading[i], leading[j])
            ui, uj = mono_div(lcm, leading[i]), mono_div(lcm, leading[j])
            s = basis[i].mul_monomial(ui) - basis[j].mul_monomial(uj)
            quots, rem = _reduce_full(s, basis, leading)
            assert not rem, "S-polynomial of a Gröbner basis must reduce to zero"
            deg = sum(lcm)
            vec = [_terms_poly(q, nvars, deg - b.degree) for q, b in zip(quots, basis)]
            vec[i] = vec[i] - HomogeneousPolynomial.monomial(ui)
            vec[j] = vec[j] + HomogeneousPolynomial.monomial(uj)
            syz = to_generators(vec, deg)
            syz = _fix_degrees(syz, deg, gens)
            if any(syz):
                out.append(syz)
    for i, f in enumerate(gens):
        quots, rem = _reduce_full(f, basis, leading)
        assert not rem
        vec = [_terms_poly(q, nvars, f.degree - b.degree) for q, b in zip(quots, basis)]
        comb_ = to_generators(vec, f.degree)
        syz = [(-c if c else c) for c in comb_]
        syz[i] = syz[i] + HomogeneousPolynomial.monomial((0,) * nvars)
        syz = _fix_degrees(syz, f.degree, gens)
        if any(syz):
            out.append(syz)
    return out


def divide(g, gb):
    """Quotients with respect to the Gröbner basis elements, and remainder."""
    quots, rem = _reduce_full(g, gb.basis, gb.leading)
    return [_terms_poly(q, g.nvars, g.degree - b.degree) for q, b in zip(quots, gb.basis)], rem


def divide_with_cofactors(g, gb):
    """Write g = sum_i c_i * generators[i] + remainder.

    The remainder is fully reduced with respect to ``gb``; the cofactors are
    with respect to the original generators.
    """
    quots, rem = divide(g, gb)
    cofs = _combine(quots, gb.cofactors, g.nvars, 0)
    return _fix_degrees(cofs, g.degree, gb.generators), rem


def in_ideal(g, gb):
    return not divide(g, gb)[1]


def jacobian(f):
    return [f.derivative(i) for i in range(f.nvars)]


def all_monomials_up_to(degree, nvars):
    return itertools.chain.from_iterable(monomial_basis(d, nvars) for d in range(degree + 1))
