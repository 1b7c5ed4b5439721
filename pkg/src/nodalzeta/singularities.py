"""Singular locus: node verification, singularity counts and the equisingularity gate.

Node coordinates are supplied by the caller over a number field Q[t]/(m).
The count tau is computed independently as the dimension of S/J in degree
(n+1)(N-1), over Q from the Gröbner basis and over F_p by linear algebra
modulo p.
"""

from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .errors import NotIsolated, NotSingular
from .exact import NumberField, NumberFieldElement, PrimeField, rational
from .polynomials import evaluate, groebner_with_cofactors, jacobian, monomial_basis


@dataclass
class SingularPointSet:
    points: list
    field: object = None

    @property
    def tau(self):
        return len(self.points)


def _as_field_element(x, K):
    if isinstance(x, NumberFieldElement):
        return x
    return K(x)


def normalize_point(point, K=None):
    """Scale so that the last nonzero coordinate is 1."""
    K = K or _field_of(point)
    P = [_as_field_element(x, K) for x in point]
    pivot = next((x for x in reversed(P) if x), None)
    if pivot is None:
        raise NotSingular("the zero vector is not a projective point")
    inv = pivot.inverse()
    return [x * inv for x in P]


def _field_of(point):
    for x in point:
        if isinstance(x, NumberFieldElement):
            return x.field
    return NumberField.rationals()


def verify_singular_points(f, points, field=None):
    """Check that every point kills f and all its partial derivatives."""
    K = field or (_field_of(points[0]) if points else NumberField.rationals())
    partials = jacobian(f)
    out = []
    seen = set()
    for i, P in enumerate(points):
        if len(P) != f.nvars:
            raise NotSingular(f"point {i} has {len(P)} coordinates, expected {f.nvars}")
        Q = normalize_point(P, K)
        for g, name in [(f, "f")] + [(d, f"df/dx{j}") for j, d in enumerate(partials)]:
            if evaluate(g, Q):
                raise NotSingular(f"point {i} does not satisfy {name} = 0")
        key = tuple(x.coords for x in Q)
        if key in seen:
            raise NotSingular(f"point {i} repeats an earlier point")
        seen.add(key)
        out.append(Q)
    return SingularPointSet(out, K)


# ------------------------------------------------------------------ Hessian


def hessian(f):
    partials = jacobian(f)
    return [[d.derivative(j) for j in range(f.nvars)] for d in partials]


def hessian_at(f, point):
    return [[evaluate(h, point) for h in row] for row in hessian(f)]


def matrix_rank(M):
    """Rank over any field whose elements support bool, -, * and /."""
    rows = [list(r) for r in M]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                t = rows[r][c] / pr[c]
                rows[r] = [a - t * b for a, b in zip(rows[r], pr)]
        rank += 1
    return rank


def determinant(M):
    """Determinant by elimination over a field."""
    rows = [list(r) for r in M]
    n = len(rows)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if rows[r][c]), None)
        if piv is None:
            return 0 * rows[0][0] if n else 1
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        pr = rows[c]
        det = pr[c] * det
        for r in range(c + 1, n):
            if rows[r][c]:
                t = rows[r][c] / pr[c]
                rows[r] = [a - t * b for a, b in zip(rows[r], pr)]
    return det


def norm(x):
    """Norm from Q[t]/(m) to Q."""
    if not isinstance(x, NumberFieldElement):
        return rational(x)
    K = x.field
    t = K.gen()
    basis = [K.one()]
    for _ in range(K.degree - 1):
        basis.append(basis[-1] * t)
    rows = [list((x * b).coords) for b in basis]
    return determinant([[mpq(v) for v in r] for r in rows])


@dataclass
class OdpCertificate:
    is_odp: bool
    rank: int
    affine_determinant: object = None


def _is_rational_point(point):
    return all(not isinstance(x, NumberFieldElement) or x.is_rational() for x in point)


def is_odp(f, point, p=None):
    """Hessian rank test: an ODP has homogeneous Hessian of rank exactly n.

    With ``p`` and a rational point the rank is taken over F_p.  For a point
    over a number field the test modulo p is that the norm of the affine
    Hessian determinant is prime to p, i.e. the rank stays n modulo every
    prime above p; the rank field is then None when it drops.
    """
    n = f.nvars - 1
    P = normalize_point(point)
    H = hessian_at(f, P)
    j = max(i for i, x in enumerate(P) if x)
    minor = [[H[a][b] for b in range(n + 1) if b != j] for a in range(n + 1) if a != j]
    det = determinant(minor)
    if p is None:
        rank = matrix_rank(H)
        return OdpCertificate(rank == n, rank, det)
    if _is_rational_point(P):
        F = PrimeField(p)
        Hp = [[F(_rational_entry(v)) for v in row] for row in H]
        rank = matrix_rank(Hp)
        return OdpCertificate(rank == n, rank, det)
    v = _valuation(norm(det), p) if det else None
    ok = v is not None and v <= 0
    return OdpCertificate(ok, n if ok else None, det)


def _rational_entry(v):
    return v.to_rational() if isinstance(v, NumberFieldElement) else rational(v)


def affine_hessian_determinant(f, point):
    """det of the n x n Hessian in the chart where the last nonzero coordinate is 1."""
    return is_odp(f, point).affine_determinant


# ------------------------------------------------------------ tau counts


def plateau_degree(n, N):
    return (n + 1) * (N - 1)


def _quotient_dim_mod_p(f, p, degree):
    """dim_{F_p} (S / J)_degree by row reduction modulo p."""
    nv = f.nvars
    mons = monomial_basis(degree, nv)
    size = len(mons)
    index = {m: i for i, m in enumerate(mons)}
    shift = degree - (f.degree - 1)
    if shift < 0:
        return size
    rows = []
    F = PrimeField(p)
    for g in jacobian(f):
        if not g:
            continue
        gterms = [(m, F(rational(c)).residue) for m, c in g.terms.items()]
        for mu in monomial_basis(shift, nv):
            row = np.zeros(size, dtype=np.int64)
            for m, c in gterms:
                if c:
                    row[index[tuple(a + b for a, b in zip(m, mu))]] = c
            rows.append(row)
    if not rows:
        return size
    return size - _rank_mod_p(np.array(rows), p)


def _rank_mod_p(A, p):
    A = A % p
    rank = 0
    nrows, ncols = A.shape
    for c in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(A[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, c]), -1, p)
        A[rank] = (A[rank] * inv) % p
        col = A[:, c].copy()
        col[rank] = 0
        mask = np.nonzero(col)[0]
        if mask.size:
            A[mask] = (A[mask] - np.outer(col[mask], A[rank])) % p
        rank += 1
    return rank


def tau_count(f, p=None, gb=None):
    """dim (S/J) at the plateau degree (n+1)(N-1), checked against the next degree.

    Over Q when p is None, over F_p otherwise.  Raises NotIsolated if the
    two slices differ.
    """
    n = f.nvars - 1
    m = plateau_degree(n, f.degree)
    if p is None:
        gb = gb or groebner_with_cofactors([g for g in jacobian(f) if g])
        a, b = gb.hilbert_function(m), gb.hilbert_function(m + 1)
    else:
        a, b = _quotient_dim_mod_p(f, p, m), _quotient_dim_mod_p(f, p, m + 1)
    if a != b:
        where = "Q" if p is None else f"F_{p}"
        raise NotIsolated(f"dim (S/J) grows from {a} to {b} at degree {m} over {where}: singularities are not isolated")
    return a


# ---------------------------------------------------------- equisingularity


@dataclass
class EquisingularityReport:
    p: int
    tau_q: int = None
    tau_p: int = None
    degree_ok: bool = True
    node_verdicts: list = field(default_factory=list)
    reasons: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.reasons

    def describe(self):
        if self.passed:
            return f"equisingular at p={self.p}"
        return f"not equisingular at p={self.p}: " + "; ".join(self.reasons)


def _valuation(x, p):
    x = rational(x)
    if not x:
        return None
    num, den = int(x.numerator), int(x.denominator)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def equisingularity_check(f, p, points=None, gb=None):
    """Operational equisingularity test at p.

    Passes iff f stays of degree N mod p, tau over F_p equals tau over Q,
    and, when nodes are supplied, the affine Hessian determinant at every
    node has norm prime to p (so each node stays an ODP modulo every prime
    above p).
    """
    rep = EquisingularityReport(p)
    coeffs = [rational(c) for c in f.terms.values()]
    if any(int(c.denominator) % p == 0 for c in coeffs):
        rep.degree_ok = False
        rep.reasons.append("f has a coefficient with p in the denominator")
    elif all(int(c.numerator) % p == 0 for c in coeffs):
        rep.degree_ok = False
        rep.reasons.append("f vanishes modulo p")
    try:
        rep.tau_q = tau_count(f, gb=gb)
    except NotIsolated as exc:
        rep.reasons.append(str(exc))
    if rep.degree_ok:
        try:
            rep.tau_p = tau_count(f, p)
        except NotIsolated as exc:
            rep.reasons.append(str(exc))
        if rep.tau_q is not None and rep.tau_p is not None and rep.tau_q != rep.tau_p:
            rep.reasons.append(f"tau over Q is {rep.tau_q} but over F_{p} it is {rep.tau_p}")
    bad = []
    for i, P in enumerate(points or []):
        cert = is_odp(f, P, p)
        rep.node_verdicts.append((i, cert.is_odp, cert.affine_determinant))
        if not cert.is_odp:
            bad.append(i)
    if bad:
        rep.reasons.append(f"the Hessian rank drops modulo {p} at nodes {bad}")
    return rep
