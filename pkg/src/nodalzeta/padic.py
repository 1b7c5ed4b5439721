"""Pole-order reduction modulo a fixed power of p.

Numerators are stored as residue vectors modulo p^K together with an exact
rational scale, so the class represented is scale * vector.  The Gröbner
data and the resolution targets must be p-integral; every division by an
integer m - 1 or by a power of p is pushed into the scale.  A contribution
recorded while the scale has valuation v is known modulo p^(K + v), and the
smallest such bound is reported as the absolute precision of the result.

The exact engine in ``frobenius`` computes the same classes over Q and is
kept as an independent route for cross-checks.
"""

import logging
import random
import time
from dataclasses import dataclass
from math import comb

import numpy as np
from gmpy2 import mpq

from . import kernels
from .errors import BudgetExceeded, PDivides, ResidueNotInIdeal, SingularSolRed
from .frobenius import FrobeniusMatrix, expanded_numerator
from .kernels import MontgomeryRing
from .linalg import solve_dense
from .polynomials import groebner_with_cofactors, jacobian, linear_substitute
from .spectral import shift_syzygy, stabilized_degree, syzygy_candidates, syzygy_top

log_ = logging.getLogger(__name__)


def _valuation(x, p):
    num, den = int(x.numerator), int(x.denominator)
    if num == 0:
        return None
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _rational_inverse(A):
    n = len(A)
    rhs = [[mpq(int(i == j)) for j in range(n)] for i in range(n)]
    cols = [solve_dense(A, [rhs[i][j] for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _pivot_rows(rows, rank, p):
    """Indices of ``rank`` rows spanning the same Z_p-lattice as all rows.

    Complete pivoting on the entry of least valuation; returns None if the
    rows have smaller rank.
    """
    work = [[mpq(x) for x in r] for r in rows]
    alive = list(range(len(work)))
    chosen = []
    for _ in range(rank):
        best = None
        for i in alive:
            for c, x in enumerate(work[i]):
                if x:
                    v = _valuation(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, c)
        if best is None:
            return None
        _, i, c = best
        chosen.append(i)
        alive.remove(i)
        piv = work[i]
        for k in alive:
            if work[k][c]:
                t = work[k][c] / piv[c]
                work[k] = [a - t * b for a, b in zip(work[k], piv)]
    return chosen


def is_p_integral(gb, p):
    """True if the Gröbner basis and its cofactors have no p in a denominator."""
    for g in gb.basis:
        if any(int(mpq(c).denominator) % p == 0 for c in g.terms.values()):
            return False
    for row in gb.cofactors:
        for c in row:
            if any(int(mpq(v).denominator) % p == 0 for v in c.terms.values()):
                return False
    return True


@dataclass
class IntegralModel:
    """f(A x) with a Gröbner basis free of p in its denominators.

    A is an integer matrix of determinant +-1, so the surface and its zeta
    function are unchanged; ``points`` are the nodes in the new coordinates.
    """

    f: object
    matrix: list
    gb: object
    points: list = None


def _unimodular(rng, nv, steps):
    A = [[int(i == j) for j in range(nv)] for i in range(nv)]
    for _ in range(steps):
        i, j = rng.sample(range(nv), 2)
        c = rng.choice((1, -1))
        A[i] = [a + c * b for a, b in zip(A[i], A[j])]
    return A


def integral_model(f, p, points=None, gb=None, attempts=40, seed=0):
    """Find coordinates in which the Jacobian Gröbner data is p-integral.

    Tries the given coordinates first, then products of elementary
    integer matrices drawn from a seeded generator.
    """
    nv = f.nvars
    rng = random.Random(seed)
    for attempt in range(attempts):
        if attempt == 0:
            A = [[int(i == j) for j in range(nv)] for i in range(nv)]
            g = f
            basis = gb or groebner_with_cofactors(jacobian(f))
        else:
            A = _unimodular(rng, nv, 1 + (attempt - 1) // 4)
            g = linear_substitute(f, A)
            basis = groebner_with_cofactors(jacobian(g))
        if not is_p_integral(basis, p):
            continue
        pts = None
        if points is not None:
            inv_cols = [solve_dense(A, [int(i == j) for i in range(nv)]) for j in range(nv)]
            pts = [[sum((inv_cols[j][i] * P[j] for j in range(nv)), 0 * P[0]) for i in range(nv)] for P in points]
        if attempt:
            log_.info("using coordinates %s for p-integral Gröbner data", A)
        return IntegralModel(g, A, basis, pts)
    raise PDivides(f"no p-integral Gröbner basis found for p = {p} after {attempts} coordinate changes")


class PadicReducer:
    """Batch reduction of numerators to E2 coordinates modulo p^K."""

    def __init__(self, ctx, p, K=None):
        self.ctx = ctx
        self.p = int(p)
        self.ring = ring = MontgomeryRing(p, K)
        self.K = ring.K
        self.nv = ctx.nv
        self.N = ctx.N
        self.n = ctx.n
        self.binom = ctx.indexer._binom
        self.small = ring.small_table(self.binom.shape[0])
        nv = self.nv
        self.lm = np.ascontiguousarray(ctx.lm, dtype=np.int64)
        self.lm_deg = self.lm.sum(axis=1).astype(np.int64)
        tail_ptr, tail_exp, tail_coef = [0], [], []
        for k, tail in enumerate(ctx.tails):
            for mono, c in tail:
                tail_exp.append(mono)
                tail_coef.append(self._mont_int(c, f"Gröbner basis element {k}"))
            tail_ptr.append(len(tail_exp))
        cof_ptr, cof_var, cof_exp, cof_coef = [0], [], [], []
        for k, entries in enumerate(ctx.cofactor_terms):
            for i, mono, c in entries:
                cof_var.append(i)
                cof_exp.append(mono)
                cof_coef.append(self._mont_int(c, f"cofactor of Gröbner basis element {k}"))
            cof_ptr.append(len(cof_exp))
        self.tail_ptr = np.array(tail_ptr, dtype=np.int64)
        self.tail_exp = np.array(tail_exp, dtype=np.int64).reshape(-1, nv)
        self.tail_coef = ring.pack(tail_coef)
        self.cof_ptr = np.array(cof_ptr, dtype=np.int64)
        self.cof_var = np.array(cof_var, dtype=np.int64)
        self.cof_exp = np.array(cof_exp, dtype=np.int64).reshape(-1, nv)
        self.cof_coef = ring.pack(cof_coef)
        self._rem_cap = 1 << 12
        self._res = {}
        self.stats = {"divisions": 0, "shifts": 0}

    def _mont_int(self, x, what):
        try:
            return self.ring.to_mont_int(mpq(x))
        except ZeroDivisionError:
            raise PDivides(f"{what} has {self.p} in a denominator; use the exact engine") from None

    def _residue(self, x, what):
        try:
            return int(x.numerator) * pow(int(x.denominator), -1, self.ring.modulus) % self.ring.modulus
        except ValueError:
            raise PDivides(f"{what} has {self.p} in a denominator") from None

    # -- vectors

    def size(self, d):
        return comb(d + self.nv - 1, self.nv - 1) if d >= 0 else 0

    def vector(self, terms, d, weight=1):
        """Residue vector of weight * sum of terms (a dict monomial -> rational)."""
        vec = self.ring.zeros(self.size(d))
        self.add_terms(vec, terms, d, weight)
        return vec

    def add_terms(self, vec, terms, d, weight=1):
        items = [(m, c) for m, c in terms.items() if c]
        if not items:
            return
        pos = self.ctx.indexer.index(np.array([m for m, _ in items], dtype=np.int64), d)
        w = mpq(weight)
        vals = self.ring.pack([self._mont_int(w * c, "a numerator coefficient") for _, c in items])
        kernels.scatter_add(vec, pos, vals, self.ring.mod)

    def divide(self, vec, d):
        """Divide in place; returns (E vector over degree d - N, remainder positions, values)."""
        ring = self.ring
        d1 = d - self.N + 1
        A = np.zeros((self.nv, max(self.size(d1), 0), 2), dtype=np.uint64)
        while True:
            rem_pos = np.zeros(self._rem_cap, dtype=np.int64)
            rem_val = np.zeros((self._rem_cap, 2), dtype=np.uint64)
            nrem = kernels.divide_degree(
                vec, d, self.nv, self.N, self.binom, self.lm, self.lm_deg,
                self.tail_ptr, self.tail_exp, self.tail_coef,
                self.cof_ptr, self.cof_var, self.cof_exp, self.cof_coef,
                A, rem_pos, rem_val, ring.mod, ring.minv,
            )
            if nrem >= 0:
                break
            # reduced entries are already in A and remainders are still in vec
            self._rem_cap *= 4
        self.stats["divisions"] += 1
        E = ring.zeros(self.size(d - self.N))
        if E.size:
            kernels.divergence(A, d1, self.nv, self.binom, self.small, E, ring.mod, ring.minv)
        return E, rem_pos[:nrem], rem_val[:nrem]

    # -- resolution data per pole order

    def _projection(self, m):
        """(where, captured rows, E-corrections, shift) at pole order m <= n.

        Targets and captured rows are multiplied by p^shift so that they are
        p-integral; ``where`` maps a remainder position to its row.
        """
        ctx = self.ctx
        d = m * self.N - self.n - 1
        std, _, captured, targets = ctx.resolution_targets(m)
        vals = [v for row in captured for v in row.values() if v]
        vals += [v for t in targets for v in t.values() if v]
        shift = max([0] + [-_valuation(mpq(v), self.p) for v in vals])
        scale = mpq(self.p) ** shift
        size0 = max(self.size(d - self.N), 0)
        corr = np.zeros((len(std), size0, 2), dtype=np.uint64)
        caps = []
        for i, (row, target) in enumerate(zip(captured, targets)):
            caps.append({col: self._residue(v * scale, "a captured coordinate") for col, v in row.items() if v})
            if not target:
                continue
            vec = self.vector(target, d, scale)
            E, _, rem_val = self.divide(vec, d)
            if rem_val.size and np.any(rem_val):
                raise ResidueNotInIdeal(f"resolution target at pole order {m} is not in the Jacobian ideal")
            if size0:
                corr[i] = E
        return ({t: i for i, t in enumerate(std)}, caps, corr, shift)

    def _kernel_candidates(self, d):
        ctx = self.ctx
        e = d + 1
        k = e - stabilized_degree(self.n, self.N)
        order = [ctx.transversal] + [j for j in range(self.nv) if j != ctx.transversal]
        for j in order:
            mono = tuple(k if i == j else 0 for i in range(self.nv))
            for g in ctx.gammas():
                yield shift_syzygy(g, mono)
            if k == 0:
                break
        for syz, mono in syzygy_candidates(ctx.gb, e):
            yield shift_syzygy(syz, mono)

    def _remainder_row(self, vec, d, where):
        """(top scaled to be primitive at p, E-vector, remainder coordinates as integers)."""
        top = syzygy_top(vec)
        vals = [_valuation(mpq(c), self.p) for c in top.terms.values() if c]
        if not vals:
            return None
        weight = mpq(self.p) ** (-min(vals))
        E, rp, rv = self.divide(self.vector(top.terms, d, weight), d)
        r = [0] * len(where)
        half = self.ring.modulus // 2
        for t, x in zip(rp.tolist(), rv):
            y = self.ring.from_mont(x)
            r[where[t]] = y - self.ring.modulus if y > half else y
        return (top, weight), E, r

    def _kernel(self, m):
        """(where, W, E-vectors, shift) at pole order m > n.

        Kernel forms are chosen so that their remainders r_i span the
        largest available lattice; with e the valuation of det(r_i),
        W = p^e (r_i)^-1 modulo p^K and p^e sigma equals
        sum_i W[i][sigma] top_i plus an element of J whose E-polynomial is
        -sum_i W[i][sigma] E_i.  Independence modulo p (e = 0) is tried
        first; otherwise a pool of candidates is searched by p-adic pivoting.
        """
        p, mod = self.p, self.ring.modulus
        d = m * self.N - self.n - 1
        std = self.ctx.standard_positions(d)
        where = {t: i for i, t in enumerate(std)}
        tau = len(std)
        pool_limit = 6 * tau + 24
        pivots = []
        pool = []
        R, Es = [], []
        for vec in self._kernel_candidates(d):
            if len(R) == tau or len(pool) >= pool_limit:
                break
            row = self._remainder_row(vec, d, where)
            if row is None:
                continue
            src, E, r = row
            pool.append((vec, r))
            red = [x % p for x in r]
            for c, prow in pivots:
                if red[c]:
                    t = red[c]
                    red = [(a_ - t * b_) % p for a_, b_ in zip(red, prow)]
            c = next((i for i, x in enumerate(red) if x), None)
            if c is None:
                continue
            inv = pow(red[c], -1, p)
            pivots.append((c, [x * inv % p for x in red]))
            R.append(r)
            Es.append(E)
        if len(R) < tau:
            chosen = _pivot_rows([r for _, r in pool], tau, p)
            if chosen is None:
                raise SingularSolRed(f"kernel forms do not span the quotient at pole order {m}")
            R, Es = [], []
            for i in chosen:
                _, E, r = self._remainder_row(pool[i][0], d, where)
                R.append(r)
                Es.append(E)
            self.stats["kernel_pools"] = self.stats.get("kernel_pools", 0) + 1
        # column i of the solve is r_i
        A = [[mpq(R[i][s_]) for i in range(tau)] for s_ in range(tau)]
        inv = _rational_inverse(A)
        e = max(0, -min((_valuation(x, p) for row in inv for x in row if x), default=0))
        pe = mpq(p) ** e
        W = [[int((x * pe).numerator * pow(int((x * pe).denominator), -1, mod) % mod) for x in row] for row in inv]
        return where, W, Es, e

    def resolution(self, m):
        if m in self._res:
            return self._res[m]
        if m > self.n:
            res = ("kernel",) + self._kernel(m)
        else:
            res = ("projection",) + self._projection(m)
        # only the pole orders just below the current one are needed again
        self._res = {k: v for k, v in self._res.items() if k < m + 2}
        self._res[m] = res
        return res

    def _apply_kernel(self, res, E, rem_pos, rem_val, scale):
        """Fold the kernel corrections into E; returns the new scale."""
        _, where, W, Es, e = res
        ring = self.ring
        mod = ring.modulus
        if e:
            kernels.scale_vector(E, ring.to_mont(mpq(self.p) ** e), ring.mod, ring.minv)
            scale = scale / mpq(self.p) ** e
        r = [0] * len(W)
        for t, x in zip(rem_pos.tolist(), rem_val):
            if x.any():
                i = where.get(t)
                if i is None:
                    raise ResidueNotInIdeal("remainder outside the standard monomials")
                r[i] = ring.from_mont(x)
        if E.size:
            for i, Ei in enumerate(Es):
                w = -sum(a * b for a, b in zip(W[i], r)) % mod
                if w:
                    kernels.axpy(E, ring.limbs(w * ring.r % mod), Ei, ring.mod, ring.minv)
        return scale

    def _apply_projection(self, res, E, rem_pos, rem_val, scale, sums):
        """Record E2 coordinates and fold the corrections into E; returns the new scale."""
        _, where, caps, corr, shift = res
        ring, p = self.ring, self.p
        if shift:
            kernels.scale_vector(E, ring.to_mont(mpq(p) ** shift), ring.mod, ring.minv)
            scale = scale / mpq(p) ** shift
        acc = [0] * len(sums)
        for t, x in zip(rem_pos.tolist(), rem_val):
            if not x.any():
                continue
            i = where.get(t)
            if i is None:
                raise ResidueNotInIdeal("remainder outside the standard monomials")
            rr = ring.from_mont(x)
            for col, c in caps[i].items():
                acc[col] += rr * c
            if E.size:
                kernels.axpy(E, x, corr[i], ring.mod, ring.minv)
        for col, a in enumerate(acc):
            a %= ring.modulus
            if a:
                if a > ring.modulus // 2:
                    a -= ring.modulus
                sums[col] += scale * a
        return scale

    # -- batch sweep

    def reduce(self, items, progress=None, budget_seconds=None):
        """Reduce weighted numerators in one downward sweep.

        ``items`` maps a key to a list of (pole order, polynomial, weight);
        the class of a key is sum weight * poly * Omega / f^pole.  Returns
        ({key: [coordinate per E2 element]}, {key: absolute precision}).
        """
        ring = self.ring
        p, K = self.p, self.K
        nb = len(self.ctx.e2)
        sums = {key: [mpq(0)] * nb for key in items}
        prec = {key: None for key in items}
        pending = {}
        for key, entries in items.items():
            for pole, poly, weight in entries:
                if weight:
                    pending.setdefault(pole, []).append((key, poly, mpq(weight)))
        if not pending:
            return sums, {key: K for key in items}
        active = {}  # key -> [vector, scale]
        start = time.time()
        for m in range(max(pending), 0, -1):
            d = m * self.N - self.n - 1
            for key, poly, weight in pending.get(m, []):
                if key not in active:
                    active[key] = [self.vector(poly.terms, d), weight]
                    continue
                vec, scale = active[key]
                ratio = weight / scale
                v = _valuation(ratio, p)
                if v is not None and v < 0:
                    pm = ring.to_mont(mpq(p) ** (-v))
                    kernels.scale_vector(vec, pm, ring.mod, ring.minv)
                    scale = scale / mpq(p) ** (-v)
                    active[key][1] = scale
                    ratio = weight / scale
                    self.stats["shifts"] += 1
                self.add_terms(vec, poly.terms, d, ratio)
            if not active or d < 0:
                continue
            for key in list(active):
                vec, scale = active[key]
                E, rem_pos, rem_val = self.divide(vec, d)
                if rem_pos.size:
                    res = self.resolution(m)
                    if res[0] == "kernel":
                        scale = self._apply_kernel(res, E, rem_pos, rem_val, scale)
                    else:
                        scale = self._apply_projection(res, E, rem_pos, rem_val, scale, sums[key])
                        bound = K + _valuation(scale, p)
                        prec[key] = bound if prec[key] is None else min(prec[key], bound)
                if m > 1 and E.size and kernels.count_nonzero(E):
                    active[key] = [E, scale / (m - 1)]
                else:
                    active.pop(key)
            if progress is not None:
                progress(m, len(active))
            if budget_seconds is not None and time.time() - start > budget_seconds:
                raise BudgetExceeded(f"reduction exceeded {budget_seconds} s at pole order {m}")
        return sums, {key: (K if v is None else v) for key, v in prec.items()}


def horner_weights(s, M, p, n):
    """c_j p^n with c_j = (-1)^j sum_{k=j}^{M-1} C(s+k-1, k) C(k, j)."""
    out = []
    for j in range(M):
        c = sum(comb(s + k - 1, k) * comb(k, j) for k in range(j, M))
        out.append(mpq((-1) ** j * c * p**n))
    return out


def padic_frobenius_matrix(f, p, e2, ctx, M, K=None, per_term=False, progress=None, budget_seconds=None):
    """Frobenius matrix from M series terms, computed modulo p^K.

    With ``per_term`` the classes of every F_j are kept separately so the
    term classes are available; otherwise each column is reduced as one
    weighted sum.  ``F.precision`` is the smallest absolute precision over
    the columns.
    """
    n = f.nvars - 1
    b = len(e2)
    reducer = PadicReducer(ctx, p, K)
    items = {}
    for col, (h, s) in enumerate(e2.entries):
        if per_term:
            for j in range(M):
                items[(col, j)] = [(p * (s + j), expanded_numerator(h, s, j, p, f), 1)]
        else:
            w = horner_weights(s, M, p, n)
            items[col] = [(p * (s + j), expanded_numerator(h, s, j, p, f), w[j]) for j in range(M)]
    classes, prec = reducer.reduce(items, progress=progress, budget_seconds=budget_seconds)
    if per_term:
        pn = mpq(p**n)
        term_classes = []
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
        # v_j carries weight up to p^n C(s+k-1,k) C(k,j), all p-integral
        F.precision = min(prec.values()) + n if prec else reducer.K
    else:
        F = FrobeniusMatrix([[classes[col][i] for col in range(b)] for i in range(b)], e2, p, M)
        F.precision = min(prec.values()) if prec else reducer.K
    F.stats = dict(reducer.stats)
    return F
