"""Brute-force point counts over F_{p^r} and a check of a candidate zeta function."""

import itertools
from concurrent.futures import ProcessPoolExecutor

import numba as nb
import numpy as np

from .errors import BudgetExceeded, VerificationMismatch
from .exact import rational

DEFAULT_BUDGET = 10**9


def _poly_mulmod(a, b, modulus, p):
    """Product of coefficient lists (constant term first) modulo a monic polynomial."""
    r = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, r - 1, -1):
        c = prod[k]
        if c:
            for j in range(r + 1):
                prod[k - r + j] = (prod[k - r + j] - c * modulus[j]) % p
    return (prod + [0] * r)[:r]


def _has_factor_of_degree(g, k, p):
    """True if the monic g has a monic divisor of degree k (exhaustive search)."""
    for tail in itertools.product(range(p), repeat=k):
        h = list(tail) + [1]
        rem = list(g)
        for i in range(len(rem) - 1, k - 1, -1):
            c = rem[i]
            if c:
                for j in range(k + 1):
                    rem[i - k + j] = (rem[i - k + j] - c * h[j]) % p
        if not any(rem[:k]):
            return True
    return False


def is_irreducible(g, p):
    """Irreducibility of a monic polynomial over F_p by exhaustive trial division."""
    r = len(g) - 1
    return all(not _has_factor_of_degree(g, k, p) for k in range(1, r // 2 + 1))


def least_irreducible(p, r):
    """Monic irreducible of degree r, least in lex order of (c_{r-1}, ..., c_0); constant term first."""
    for tail in itertools.product(range(p), repeat=r):
        g = list(reversed(tail)) + [1]
        if is_irreducible(g, p):
            return g
    raise ValueError(f"no irreducible polynomial of degree {r} over F_{p}")


class ExtensionField:
    """F_{p^r} = F_p[y]/(g) with elements indexed by sum c_i p^i.

    Addition and multiplication are precomputed tables, so the field must be
    small (q = p^r at most a few thousand).
    """

    def __init__(self, p, r=1):
        self.p = p
        self.r = r
        self.q = p**r
        self.modulus = least_irreducible(p, r) if r > 1 else [0, 1]
        q = self.q
        digits = np.array([[(x // p**i) % p for i in range(r)] for x in range(q)], dtype=np.int64)
        weights = p ** np.arange(r, dtype=np.int64)
        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        self.mul = self._multiplication_table(digits)

    def element(self, coeffs):
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(coeffs))

    def coefficients(self, x):
        return [(x // self.p**i) % self.p for i in range(self.r)]

    def _multiplication_table(self, digits):
        q, p = self.q, self.p
        if self.r == 1:
            a = np.arange(q, dtype=np.int64)
            return np.outer(a, a) % p
        g = self._primitive_element()
        exp = np.zeros(q - 1, dtype=np.int64)
        x = [1] + [0] * (self.r - 1)
        gc = self.coefficients(g)
        for k in range(q - 1):
            exp[k] = self.element(x)
            x = _poly_mulmod(x, gc, self.modulus, p)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        nz = np.arange(1, q)
        table = np.zeros((q, q), dtype=np.int64)
        table[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        return table

    def _primitive_element(self):
        q, p = self.q, self.p
        order = q - 1
        primes = [d for d in range(2, order + 1) if order % d == 0 and all(d % e for e in range(2, d))]
        for g in range(1, q):
            gc = self.coefficients(g)
            if all(self._power(gc, order // ell) != [1] + [0] * (self.r - 1) for ell in primes):
                return g
        raise ValueError("no primitive element")

    def _power(self, a, e):
        out = [1] + [0] * (self.r - 1)
        while e:
            if e & 1:
                out = _poly_mulmod(out, a, self.modulus, self.p)
            a = _poly_mulmod(a, a, self.modulus, self.p)
            e >>= 1
        return out

    def power_table(self, emax):
        """pw[e, x] = x^e."""
        pw = np.zeros((emax + 1, self.q), dtype=np.int64)
        pw[0] = 1
        for e in range(1, emax + 1):
            pw[e] = self.mul[pw[e - 1], np.arange(self.q)]
        return pw


@nb.njit(cache=True)
def _count_chart(k, nv, exps, coefs, pw, add, mul, outer_lo, outer_hi):
    """Zeros of f on the chart x_0..x_{k-1} = 0, x_k = 1, x_{k+1}.. free.

    The first free coordinate ranges over [outer_lo, outer_hi); the rest over F_q.
    """
    q = pw.shape[1]
    nfree = nv - k - 1
    x = np.zeros(nv, dtype=np.int64)
    x[k] = 1
    count = 0
    if nfree == 0:
        outer_lo, outer_hi = 0, 1
    for a in range(outer_lo, outer_hi):
        if nfree > 0:
            x[k + 1] = a
        total_inner = q ** max(nfree - 1, 0)
        for idx in range(total_inner):
            t = idx
            for j in range(k + 2, nv):
                x[j] = t % q
                t //= q
            s = 0
            for term in range(exps.shape[0]):
                skip = False
                for j in range(k):
                    if exps[term, j] > 0:
                        skip = True
                        break
                if skip:
                    continue
                v = coefs[term]
                for j in range(k, nv):
                    e = exps[term, j]
                    if e > 0:
                        v = mul[v, pw[e, x[j]]]
                s = add[s, v]
            if s == 0:
                count += 1
    return count


def _term_arrays(f, field):
    exps, coefs = [], []
    for m, c in f.terms.items():
        c = rational(c)
        num, den = int(c.numerator), int(c.denominator)
        if den % field.p == 0:
            raise ZeroDivisionError(f"coefficient {c} is not p-integral")
        v = num * pow(den, -1, field.p) % field.p
        if v:
            exps.append(list(m))
            coefs.append(v)
    if not exps:
        return np.zeros((0, f.nvars), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.array(exps, dtype=np.int64), np.array(coefs, dtype=np.int64)


def _chart_job(args):
    k, nv, exps, coefs, p, r, lo, hi = args
    field = ExtensionField(p, r)
    pw = field.power_table(max(int(exps.max(initial=0)), 1))
    return _count_chart(k, nv, exps, coefs, pw, field.add, field.mul, lo, hi)


def count_points(f, p, r=1, budget=DEFAULT_BUDGET, jobs=1, order="first"):
    """#Z(f)(F_{p^r}) by enumerating the standard affine charts.

    ``order="first"`` uses the charts [1:*:...:*], [0:1:*:...], ...; ``"last"``
    normalizes the last nonzero coordinate instead, which is an independent
    traversal of the same point set.
    """
    nv = f.nvars
    n = nv - 1
    q = p**r
    if q**n > budget:
        raise BudgetExceeded(f"{q}^{n} points exceed the enumeration budget {budget}")
    if order == "last":
        f = _reverse_variables(f)
    elif order != "first":
        raise ValueError(f"unknown chart order {order!r}")
    field = ExtensionField(p, r)
    exps, coefs = _term_arrays(f, field)
    tasks = []
    for k in range(nv):
        hi = q if k < n else 1
        step = max(1, -(-hi // max(jobs, 1)))
        for lo in range(0, hi, step):
            tasks.append((k, nv, exps, coefs, p, r, lo, min(hi, lo + step)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return int(sum(pool.map(_chart_job, tasks)))
    pw = field.power_table(max(int(exps.max(initial=0)), 1))
    return int(sum(_count_chart(k, nv, exps, coefs, pw, field.add, field.mul, lo, hi) for k, nv, _, _, _, _, lo, hi in tasks))


def _reverse_variables(f):
    from .polynomials import HomogeneousPolynomial

    return HomogeneousPolynomial({tuple(reversed(m)): c for m, c in f.terms.items()}, f.degree, f.nvars)


def projective_space_count(q, n):
    return (q ** (n + 1) - 1) // (q - 1)


def verify_zeta(zeta, f, p, R=2, budget=DEFAULT_BUDGET, jobs=1):
    """Compare the counts predicted by ``zeta`` with brute force for r = 1..R.

    Returns the list of (r, predicted, counted); raises VerificationMismatch
    at the first disagreement.
    """
    predicted = zeta.point_counts(R)
    rows = []
    for r in range(1, R + 1):
        counted = count_points(f, p, r, budget=budget, jobs=jobs)
        rows.append((r, predicted[r - 1], counted))
        if predicted[r - 1] != counted:
            raise VerificationMismatch(f"r={r}: zeta predicts {predicted[r - 1]} points but {counted} were counted")
    return rows


__all__ = [
    "ExtensionField",
    "count_points",
    "is_irreducible",
    "least_irreducible",
    "projective_space_count",
    "verify_zeta",
]
