"""Frobenius action on H^n_dR of the complement by pole-order reduction.

A class g * Omega / f^m with g in the Jacobian ideal, g = sum_i c_i f_i, is
cohomologous to (sum_i dc_i/dx_i) * Omega / ((m-1) f^(m-1)).  A remainder
outside the ideal is first traded for an element of J using d(alpha) of a
kernel form alpha (pole orders above n) or projected onto the E2 basis
(pole orders up to n).

The engine works degree by degree on dense coefficient lists indexed by the
grevlex enumeration of monomials.  Index tables for each degree are built
with numpy; the exact arithmetic runs on gmpy2 rationals.
"""

import logging
import time
from dataclasses import dataclass, field
from math import comb, log

import numpy as np
from gmpy2 import mpq

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    ResidueNotInIdeal,
    SingularSolRed,
)
from .exact import NumberFieldElement, nf_solve_linear
from .linalg import Echelon
from .polynomials import (
    HomogeneousPolynomial,
    MonomialIndexer,
    evaluate,
    frobenius_substitute,
    groebner_with_cofactors,
    jacobian,
    monomial_basis,
)
from .spectral import (
    NormalForms,
    node_vector,
    shift_syzygy,
    stabilized_degree,
    subdiagonal_generators,
    syzygy_candidates,
    syzygy_top,
)

log_ = logging.getLogger(__name__)


# ----------------------------------------------------------------- bounds


def weil_bounds(b, q, n):
    """|c_i| <= C(b, i) * q^(i(n-1)/2) for the coefficients of Q(T)."""
    out = []
    for i in range(b + 1):
        e = i * (n - 1)
        if e % 2 == 0:
            out.append(comb(b, i) * q ** (e // 2))
        else:
            # q^(1/2) rounded up keeps the bound valid
            from math import isqrt

            out.append(comb(b, i) * q ** (e // 2) * (isqrt(q) + 1))
    return out


def _ceil_log(x, p):
    """Smallest D >= 0 with p^D >= x."""
    D, v = 0, 1
    while v < x:
        v *= p
        D += 1
    return D


def precision_bound(b, q, n, per_coefficient=False):
    """p-adic precision D needed to recover Q(T).

    The default follows D >= log_p(2*gamma + 1) with
    gamma = C(b, floor(b/2)) * q^(b/2); with ``per_coefficient`` it is the
    largest of the per-coefficient requirements over all i.
    Returns (D, per-coefficient bounds).
    """
    p = _prime_of(q)
    gammas = weil_bounds(b, q, n)
    if b == 0:
        return 0, gammas
    if per_coefficient:
        return max(_ceil_log(2 * g + 1, p) for g in gammas), gammas
    half = b // 2
    if b % 2 == 0:
        gamma = comb(b, half) * q ** (b // 2)
        return _ceil_log(2 * gamma + 1, p), gammas
    # q^(b/2) is irrational for odd b: compare squares, 4*gamma^2 = 4*C^2*q^b
    c = comb(b, half)
    D, v = 0, 1
    while True:
        # v >= 2*gamma + 1  <=>  (v - 1)^2 >= 4 * c^2 * q^b
        if v >= 1 and (v - 1) ** 2 >= 4 * c * c * q**b:
            return D, gammas
        v *= p
        D += 1


def _prime_of(q):
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    return q


def _floor_log(x, p):
    e, v = 0, p
    while v <= x:
        v *= p
        e += 1
    return e


def truncation_bound(D, p, n):
    """Smallest M with k >= D + (n+1)*floor(log_p(p(k+n) - 1)) - n + 1 for all k >= M."""
    def holds(k):
        return k >= D + (n + 1) * _floor_log(p * (k + n) - 1, p) - n + 1

    # the right side grows like log k, so it fails only below some point;
    # scan far enough that k dominates, then take the last failure + 1
    limit = max(64, 4 * (D + 8 * (n + 1)))
    while not holds(limit) or not holds(limit * p):
        limit *= 2
    last_fail = -1
    for k in range(limit + 1):
        if not holds(k):
            last_fail = k
    return max(last_fail + 1, 1)


# ------------------------------------------------------------ series terms


@dataclass
class FrobeniusTerm:
    k: int
    numerator: HomogeneousPolynomial
    pole: int


def frobenius_term(h, s, k, p, f):
    """k-th term p^n alpha_k h(x^p) (prod x)^(p-1) (f^p - f(x^p))^k / f^(p(s+k))."""
    nv = f.nvars
    n = nv - 1
    alpha = comb(s + k - 1, k)
    base = frobenius_substitute(h, p).mul_monomial((p - 1,) * nv)
    g = f**p - frobenius_substitute(f, p)
    num = base * (g**k) if k else base
    return FrobeniusTerm(k, num.scale(mpq(p**n * alpha)), p * (s + k))


def expanded_numerator(h, s, j, p, f):
    """F_j = h(x^p) (prod x)^(p-1) f(x^p)^j, pole order p(s+j).

    Binomial re-expansion: sum_{k<M} term_k = p^n sum_j c_j F_j / f^(p(s+j))
    with c_j = (-1)^j sum_{k=j}^{M-1} C(s+k-1, k) C(k, j).
    """
    nv = f.nvars
    base = frobenius_substitute(h, p).mul_monomial((p - 1,) * nv)
    if j == 0:
        return base
    return base * (frobenius_substitute(f, p) ** j)


# ------------------------------------------------------- exponent tables


def exponent_array(degree, nvars):
    """All exponent vectors of ``degree`` in the order of ``monomial_basis``."""
    if degree < 0:
        return np.zeros((0, nvars), dtype=np.int64)
    if nvars == 1:
        return np.array([[degree]], dtype=np.int64)
    if nvars == 2:
        e = np.arange(degree + 1, dtype=np.int64)
        return np.stack([degree - e, e], axis=1)
    if nvars == 3:
        last = np.arange(degree + 1, dtype=np.int64)
        lengths = degree + 1 - last
        e2 = np.repeat(last, lengths)
        starts = np.repeat(np.cumsum(lengths) - lengths, lengths)
        e1 = np.arange(e2.size, dtype=np.int64) - starts
        return np.stack([degree - e1 - e2, e1, e2], axis=1)
    blocks = []
    for e in range(degree + 1):
        sub = exponent_array(degree - e, nvars - 1)
        blocks.append(np.hstack([sub, np.full((sub.shape[0], 1), e, dtype=np.int64)]))
    return np.vstack(blocks)


class _Plan:
    """Index tables for dividing degree-d polynomials by the Gröbner basis."""

    __slots__ = ("degree", "size", "red", "rows", "qpos", "cof_targets", "dtargets", "size1", "size0", "std")


# ------------------------------------------------------ reduction context


class ReductionContext:
    """Everything needed to reduce classes g * Omega / f^m to the E2 basis.

    ``points`` are the nodes (coordinate lists over a number field or the
    rationals).  Without points, kernel forms are chosen through normal forms
    instead of node evaluations; both give the same classes.
    """

    def __init__(self, f, e2, gb=None, points=None, transversal=0, max_plan_cache=2):
        self.f = f
        self.nv = f.nvars
        self.n = self.nv - 1
        self.N = f.degree
        self.e2 = e2
        self.gb = gb or groebner_with_cofactors(jacobian(f))
        self.points = list(points) if points is not None else None
        self.transversal = transversal
        self.indexer = MonomialIndexer(self.nv)
        self.nf = NormalForms(self.gb)
        self._plans = {}
        self._plan_order = []
        self.max_plan_cache = max_plan_cache
        self._resolutions = {}
        self._targets = {}
        self._gammas = None
        self.stats = {"divisions": 0, "monomials": 0}
        gb_ = self.gb
        self.lm = np.array(gb_.leading, dtype=np.int64)
        self.tails = []
        for g, lm in zip(gb_.basis, gb_.leading):
            self.tails.append([(m, -c) for m, c in g.terms.items() if m != lm])
        self.tail_coeffs = [[c for _, c in t] for t in self.tails]
        self.cofactor_terms = []
        for row in gb_.cofactors:
            entries = []
            for i, c in enumerate(row):
                for m, v in c.terms.items():
                    entries.append((i, m, v))
            self.cofactor_terms.append(entries)
        self.tau = self.gb.hilbert_function((self.n + 1) * (self.N - 1))
        if self.points is not None and len(self.points) != self.tau:
            raise DimensionMismatch(f"{len(self.points)} nodes supplied but tau = {self.tau}")

    # -- index tables

    def plan(self, d):
        if d in self._plans:
            return self._plans[d]
        P = self._build_plan(d)
        self._plans[d] = P
        self._plan_order.append(d)
        while len(self._plan_order) > self.max_plan_cache:
            old = self._plan_order.pop(0)
            self._plans.pop(old, None)
        return P

    def _build_plan(self, d):
        nv, N = self.nv, self.N
        idx = self.indexer.index
        mons = exponent_array(d, nv)
        size = mons.shape[0]
        red = np.full(size, -1, dtype=np.int64)
        for k, lm in enumerate(self.lm):
            if lm.sum() > d:
                continue
            mask = (red < 0) & np.all(mons >= lm, axis=1)
            red[mask] = k
        P = _Plan()
        P.degree = d
        P.size = size
        P.red = red.tolist()
        P.std = np.nonzero(red < 0)[0].tolist()
        rows = [None] * size
        qpos = [0] * size
        cof_targets = []
        d1 = d - N + 1
        for k, lm in enumerate(self.lm):
            ts = np.nonzero(red == k)[0]
            if ts.size == 0:
                cof_targets.append([])
                continue
            mu = mons[ts] - lm
            tail_idx = [idx(mu + np.array(m, dtype=np.int64), d) for m, _ in self.tails[k]]
            if tail_idx:
                T = np.stack(tail_idx, axis=1).tolist()
            else:
                T = [[] for _ in range(ts.size)]
            tl = ts.tolist()
            for pos, t in enumerate(tl):
                rows[t] = T[pos]
                qpos[t] = pos
            entries = []
            for i, m, v in self.cofactor_terms[k]:
                entries.append((i, idx(mu + np.array(m, dtype=np.int64), d1).tolist(), v))
            cof_targets.append(entries)
        P.rows = rows
        P.qpos = qpos
        P.cof_targets = cof_targets
        # derivative tables: S_{d-N+1} -> S_{d-N}
        P.size1 = self._count_nv(d1)
        P.size0 = self._count_nv(d - N)
        dt = []
        if d1 >= 1:
            mons1 = exponent_array(d1, nv)
            for i in range(nv):
                e = mons1[:, i]
                shifted = mons1.copy()
                shifted[:, i] -= 1
                ok = e > 0
                tg = np.full(mons1.shape[0], -1, dtype=np.int64)
                tg[ok] = idx(shifted[ok], d1 - 1)
                dt.append((tg.tolist(), e.tolist()))
        P.dtargets = dt
        return P

    def _count_nv(self, d):
        return comb(d + self.nv - 1, self.nv - 1) if d >= 0 else 0

    # -- the division step

    def divide_dense(self, coef, P):
        """Divide in place; returns (E-polynomial list over S_{d-N}, remainder dict).

        For g = sum_i c_i f_i + r, the E-polynomial is sum_i dc_i/dx_i.
        ``coef`` is consumed.
        """
        red, rows, qpos = P.red, P.rows, P.qpos
        tailc = self.tail_coeffs
        nb = len(tailc)
        quot = [[] for _ in range(nb)]
        rem = {}
        count = 0
        for t in range(P.size):
            c = coef[t]
            if not c:
                continue
            count += 1
            k = red[t]
            if k < 0:
                rem[t] = c
                continue
            quot[k].append((qpos[t], c))
            for tg, tc in zip(rows[t], tailc[k]):
                coef[tg] += c * tc
        self.stats["divisions"] += 1
        self.stats["monomials"] += count
        size1 = self._count_nv(P.degree - self.N + 1)
        size0 = self._count_nv(P.degree - self.N)
        if size0 <= 0:
            return [], rem
        A = [[0] * size1 for _ in range(self.nv)]
        for k in range(nb):
            qk = quot[k]
            if not qk:
                continue
            for i, tgts, v in P.cof_targets[k]:
                Ai = A[i]
                for pos, c in qk:
                    Ai[tgts[pos]] += c * v
        E = [0] * size0
        for i in range(self.nv):
            Ai = A[i]
            tg, mult = P.dtargets[i]
            for b in range(size1):
                v = Ai[b]
                if v:
                    e = mult[b]
                    if e:
                        E[tg[b]] += e * v
        return E, rem

    # -- kernel forms

    def gammas(self):
        if self._gammas is None:
            self._gammas = subdiagonal_generators(self.f, self.transversal, None, gb=self.gb)
        return self._gammas

    def _stage_b_forms(self, d):
        """tau kernel forms of coefficient degree d+1 with independent differentials.

        Candidates are x_j^k * gamma_i with j running over the transversal
        variable first and then the others; a single variable suffices when
        its hyperplane misses every node.
        """
        e = d + 1
        e0 = stabilized_degree(self.n, self.N)
        k = e - e0
        if k < 0:
            raise ValueError("stage (b) below the stabilized degree")
        order = [self.transversal] + [j for j in range(self.nv) if j != self.transversal]
        ech = Echelon()
        chosen = []
        for j in order:
            mono = tuple(k if i == j else 0 for i in range(self.nv))
            for g in self.gammas():
                vec = shift_syzygy(g, mono)
                top = syzygy_top(vec)
                key = node_vector(top, self.points) if self.points is not None else self.nf.vector(top)
                ok, _ = ech.insert(key)
                if ok:
                    chosen.append((vec, top, j))
                    if len(chosen) == self.tau:
                        return chosen
            if k == 0:
                break
        raise SingularSolRed(f"no basis of kernel forms found at coefficient degree {e}")

    # -- per-degree resolution of remainders

    def standard_positions(self, d):
        """Ranks of the standard monomials of degree d (monomials outside in(J))."""
        if d < 0:
            return []
        mons = exponent_array(d, self.nv)
        mask = np.ones(mons.shape[0], dtype=bool)
        for lm in self.lm:
            if lm.sum() <= d:
                mask &= ~np.all(mons >= lm, axis=1)
        return np.nonzero(mask)[0].tolist()

    def resolution_targets(self, m):
        """Exact data for the remainders at pole order m.

        Returns (std positions, monomials, captured rows, targets).  For the
        standard monomial sigma = monomials[i], sigma is congruent to
        sum_h captured[i][h] * h + top(d alpha) + targets[i] with
        targets[i] in J; targets are sparse dicts {monomial: coefficient}.
        """
        if m in self._targets:
            return self._targets[m]
        d = m * self.N - self.n - 1
        std = self.standard_positions(d)
        rows = exponent_array(d, self.nv)[std].tolist() if std else []
        mons = {t: tuple(r) for t, r in zip(std, rows)}
        captured = []
        targets = []
        if not std:
            res = ([], [], [], [])
            self._targets[m] = res
            return res
        if m > self.n:
            chosen = self._stage_b_forms(d)
            if self.points is not None:
                coeffs = self._solve_at_nodes([top for _, top, _ in chosen], [mons[t] for t in std])
            else:
                coeffs = self._solve_by_normal_forms([top for _, top, _ in chosen], [mons[t] for t in std])
            for t, c in zip(std, coeffs):
                poly = {mons[t]: mpq(1)}
                for ci, (_, top, _) in zip(c, chosen):
                    if ci:
                        for mm, v in top.terms.items():
                            poly[mm] = poly.get(mm, 0) - ci * v
                targets.append(poly)
                captured.append({})
        else:
            hs = self.e2.at_pole(m)
            nf = self.nf
            sm, sm_index = nf.standard(d)
            ech = Echelon(track=True)
            sources = []
            for col, h in hs:
                ok, _ = ech.insert(nf.vector(h), ("h", col))
                if not ok:
                    raise DimensionMismatch("E2 monomials are dependent in the Koszul quotient")
            for syz, mono in syzygy_candidates(self.gb, d + 1):
                if ech.rank >= len(sm):
                    break
                top = syzygy_top(shift_syzygy(syz, mono))
                if not top:
                    continue
                ok, _ = ech.insert(nf.vector(top), ("a", len(sources)))
                if ok:
                    sources.append(top)
            if ech.rank != len(sm):
                raise DimensionMismatch(f"E2 basis and d-image do not span at pole order {m}")
            for t in std:
                sigma = mons[t]
                coords = ech.coordinates({sm_index[sigma]: mpq(1)})
                poly = {sigma: mpq(1)}
                cap = {}
                for (kind, ident), v in coords.items():
                    if kind == "h":
                        cap[ident] = v
                        hmono = next(iter(self.e2.entries[ident][0].terms))
                        poly[hmono] = poly.get(hmono, 0) - v
                    else:
                        for mm, c in sources[ident].terms.items():
                            poly[mm] = poly.get(mm, 0) - v * c
                targets.append(poly)
                captured.append(cap)
        res = (std, [mons[t] for t in std], captured, targets)
        self._targets[m] = res
        return res

    def resolution(self, m):
        """Exact resolution at pole m: (std positions, captured rows, E-corrections).

        corrections[i] is the E-polynomial of targets[i] as a sparse dict
        over S_{d-N}.
        """
        if m in self._resolutions:
            return self._resolutions[m]
        d = m * self.N - self.n - 1
        std, _, captured, targets = self.resolution_targets(m)
        if not std:
            self._resolutions[m] = ([], [], [])
            return self._resolutions[m]
        P = self.plan(d)
        corrections = []
        index = self.indexer
        for poly in targets:
            coef = [0] * P.size
            items = [(mm, v) for mm, v in poly.items() if v]
            if items:
                pos = index.index(np.array([mm for mm, _ in items], dtype=np.int64), d).tolist()
                for p_, (_, v) in zip(pos, items):
                    coef[p_] += v
            E, rem = self.divide_dense(coef, P)
            if rem:
                raise ResidueNotInIdeal(
                    f"remainder survives at pole order {m}: the node data or the kernel forms are inconsistent"
                )
            corrections.append({i: v for i, v in enumerate(E) if v})
        res = (std, captured, corrections)
        self._resolutions[m] = res
        return res

    def _solve_at_nodes(self, tops, sigmas):
        pts = self.points
        cols = [[evaluate(top, P) for P in pts] for top in tops]
        A = [[cols[j][i] for j in range(len(tops))] for i in range(len(pts))]
        # invert once, then apply to each right-hand side
        field = next((x.field for row in A for x in row if isinstance(x, NumberFieldElement)), None)
        out = []
        inv_cols = None
        if field is not None:
            n = len(pts)
            try:
                inv_cols = [nf_solve_linear(A, [field(1 if r == c else 0) for r in range(n)]) for c in range(n)]
            except Exception as exc:
                raise SingularSolRed(str(exc)) from exc
        for sigma in sigmas:
            mono = HomogeneousPolynomial.monomial(sigma)
            rhs = [evaluate(mono, P) for P in pts]
            if inv_cols is None:
                from .linalg import solve_dense

                try:
                    sol = solve_dense(A, rhs)
                except Exception as exc:
                    raise SingularSolRed(str(exc)) from exc
                out.append([mpq(x) for x in sol])
                continue
            sol = []
            for i in range(len(pts)):
                acc = field(0)
                for c, b in enumerate(rhs):
                    if b:
                        acc = acc + inv_cols[c][i] * b
                sol.append(acc)
            if not all(x.is_rational() for x in sol):
                raise SingularSolRed("node solve produced an irrational combination")
            out.append([x.to_rational() for x in sol])
        return out

    def _solve_by_normal_forms(self, tops, sigmas):
        ech = Echelon(track=True)
        for j, top in enumerate(tops):
            ok, _ = ech.insert(self.nf.vector(top), j)
            if not ok:
                raise SingularSolRed("kernel form differentials are dependent")
        out = []
        for sigma in sigmas:
            coords = ech.coordinates(self.nf.vector(HomogeneousPolynomial.monomial(sigma)))
            out.append([coords.get(j, mpq(0)) for j in range(len(tops))])
        return out

    # -- one step

    def step(self, coef, m):
        """Reduce a dense coefficient list at pole m by one pole order.

        Returns (new coefficient list at pole m-1 before the 1/(m-1) factor,
        captured dict {basis column: coefficient}).
        """
        d = m * self.N - self.n - 1
        if d < 0:
            if any(coef):
                raise DimensionMismatch("nonzero numerator in negative degree")
            return [], {}
        P = self.plan(d)
        E, rem = self.divide_dense(coef, P)
        captured = {}
        if rem:
            std, cap_rows, corrections = self.resolution(m)
            where = {t: i for i, t in enumerate(std)}
            for t, r in rem.items():
                i = where[t]
                for col, v in cap_rows[i].items():
                    captured[col] = captured.get(col, 0) + r * v
                for pos, v in corrections[i].items():
                    E[pos] += r * v
        return E, captured


def reduce_once(g, s, ctx):
    """One reduction step of g * Omega / f^s.

    Returns (g', captured) with g' the numerator at pole order s-1 and
    ``captured`` the E2 coordinates recorded at pole order s.
    """
    d = g.degree
    if d != s * ctx.N - ctx.n - 1:
        raise ValueError(f"degree {d} does not match pole order {s}")
    coef = [0] * ctx._count_nv(d)
    if g.terms:
        items = list(g.terms.items())
        pos = ctx.indexer.index(np.array([m for m, _ in items], dtype=np.int64), d).tolist()
        for p_, (_, v) in zip(pos, items):
            coef[p_] += v
    E, captured = ctx.step(coef, s)
    if s <= 1:
        return HomogeneousPolynomial.zero(max(d - ctx.N, 0), ctx.nv), captured
    scale = mpq(1, s - 1)
    mons = monomial_basis(d - ctx.N, ctx.nv)
    terms = {mons[i]: v * scale for i, v in enumerate(E) if v}
    return HomogeneousPolynomial._raw(terms, d - ctx.N, ctx.nv), captured


# ------------------------------------------------------------ batch engine


def reduce_classes(ctx, items, progress=None, budget_seconds=None):
    """Reduce many numerators to E2 coordinates in one downward sweep.

    ``items`` maps a key to (numerator polynomial, pole order).  All items
    sharing a pole order use the same index tables, which are built once.
    Returns {key: [coordinate per E2 element]}.
    """
    nb = len(ctx.e2)
    result = {key: [mpq(0)] * nb for key in items}
    if not items:
        return result
    pending = {}
    for key, (poly, pole) in items.items():
        pending.setdefault(pole, []).append((key, poly))
    active = {}  # key -> (coef list, scale)
    top = max(pending)
    start = time.time()
    for m in range(top, 0, -1):
        d = m * ctx.N - ctx.n - 1
        for key, poly in pending.get(m, []):
            coef = [0] * ctx._count_nv(d)
            if poly.terms:
                its = list(poly.terms.items())
                pos = ctx.indexer.index(np.array([mm for mm, _ in its], dtype=np.int64), d).tolist()
                for p_, (_, v) in zip(pos, its):
                    coef[p_] += v
            active[key] = (coef, mpq(1))
        if not active:
            continue
        for key in list(active):
            coef, scale = active[key]
            if d < 0:
                active.pop(key)
                continue
            E, captured = ctx.step(coef, m)
            for col, v in captured.items():
                result[key][col] += scale * v
            if m > 1 and E and any(E):
                active[key] = (E, scale / (m - 1))
            else:
                active.pop(key)
        if progress is not None:
            progress(m, len(active))
        if budget_seconds is not None and time.time() - start > budget_seconds:
            raise BudgetExceeded(f"reduction exceeded {budget_seconds} s at pole order {m}")
    return result


# ------------------------------------------------------- Frobenius matrix


@dataclass
class FrobeniusMatrix:
    """Exact rational approximation of Frobenius on the E2 basis.

    ``entries[i][j]`` is the coordinate on basis element i of the image of
    basis element j.  ``term_classes[k]`` holds the per-term contributions,
    so partial sums over k are available for convergence checks.
    """

    entries: list
    basis: object
    p: int
    terms: int
    term_classes: list = field(default_factory=list)
    precision: int = None
    stats: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.basis)

    def partial(self, K):
        """Matrix from the first K series terms."""
        b = self.size
        M = [[mpq(0)] * b for _ in range(b)]
        for k in range(min(K, len(self.term_classes))):
            T = self.term_classes[k]
            for i in range(b):
                for j in range(b):
                    M[i][j] += T[i][j]
        return M


def frobenius_matrix(f, p, e2, ctx, M, progress=None, budget_seconds=None):
    """Frobenius matrix from the first M series terms, with per-term classes.

    Each basis element h * Omega / f^s contributes the expanded numerators
    F_j (j < M); their classes v_j are combined as
    term_k = p^n C(s+k-1, k) sum_j C(k, j) (-1)^j v_j.
    """
    n = f.nvars - 1
    b = len(e2)
    items = {}
    for col, (h, s) in enumerate(e2.entries):
        for j in range(M):
            items[(col, j)] = (expanded_numerator(h, s, j, p, f), p * (s + j))
    classes = reduce_classes(ctx, items, progress=progress, budget_seconds=budget_seconds)
    term_classes = []
    pn = mpq(p**n)
    for k in range(M):
        T = [[mpq(0)] * b for _ in range(b)]
        for col, (h, s) in enumerate(e2.entries):
            alpha = comb(s + k - 1, k)
            for j in range(k + 1):
                w = pn * alpha * comb(k, j) * (-1) ** j
                v = classes[(col, j)]
                for i in range(b):
                    if v[i]:
                        T[i][col] += w * v[i]
        term_classes.append(T)
    F = FrobeniusMatrix([], e2, p, M, term_classes)
    F.entries = F.partial(M)
    return F
