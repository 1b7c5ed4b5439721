"""Compiled inner loops for reduction modulo a fixed prime power.

Residues modulo m = p^K < 2^127 are kept in Montgomery form with R = 2^128
as two 64-bit limbs, stored as the rows of uint64 arrays of shape (size, 2)
(low limb first).  Monomials of degree d are addressed by their rank in
``monomial_basis(d, nvars)``; ranks are computed from a binomial table.
"""

import numba as nb
import numpy as np
from llvmlite import ir
from numba import types
from numba.extending import intrinsic

_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@intrinsic
def _mulhilo(typingctx, a, b):
    """Full 64 x 64 -> 128 bit product as (high, low)."""
    sig = types.UniTuple(types.uint64, 2)(types.uint64, types.uint64)

    def codegen(context, builder, signature, args):
        i128 = ir.IntType(128)
        prod = builder.mul(builder.zext(args[0], i128), builder.zext(args[1], i128))
        lo = builder.trunc(prod, ir.IntType(64))
        hi = builder.trunc(builder.lshr(prod, ir.Constant(i128, 64)), ir.IntType(64))
        return context.make_tuple(builder, signature.return_type, [hi, lo])

    return sig, codegen


@nb.njit(inline="always", cache=True)
def _mac(t, a, b, c):
    """t + a * b + c as (high, low); cannot overflow 128 bits."""
    h, lo = _mulhilo(a, b)
    s = lo + t
    if s < lo:
        h += _ONE
    s2 = s + c
    if s2 < s:
        h += _ONE
    return h, s2


@nb.njit(inline="always", cache=True)
def montmul(a0, a1, b0, b1, m0, m1, minv):
    """a * b / 2^128 mod m for a, b < m < 2^127; minv = -m^-1 mod 2^64."""
    # word 0 of b
    c, t0 = _mac(_ZERO, a0, b0, _ZERO)
    c, t1 = _mac(_ZERO, a1, b0, c)
    t2 = c
    q = t0 * minv
    c, _ = _mac(t0, q, m0, _ZERO)
    c, t0 = _mac(t1, q, m1, c)
    t1 = t2 + c
    t2 = _ONE if t1 < c else _ZERO
    # word 1 of b
    c, t0 = _mac(t0, a0, b1, _ZERO)
    c, t1 = _mac(t1, a1, b1, c)
    s = t2 + c
    t3 = _ONE if s < c else _ZERO
    t2 = s
    q = t0 * minv
    c, _ = _mac(t0, q, m0, _ZERO)
    c, t0 = _mac(t1, q, m1, c)
    t1 = t2 + c
    t2 = t3 + (_ONE if t1 < c else _ZERO)
    if t2 != _ZERO or t1 > m1 or (t1 == m1 and t0 >= m0):
        borrow = _ONE if t0 < m0 else _ZERO
        t0 = t0 - m0
        t1 = t1 - m1 - borrow
    return t0, t1


@nb.njit(inline="always", cache=True)
def addmod(a0, a1, b0, b1, m0, m1):
    s0 = a0 + b0
    s1 = a1 + b1 + (_ONE if s0 < a0 else _ZERO)
    if s1 > m1 or (s1 == m1 and s0 >= m0):
        borrow = _ONE if s0 < m0 else _ZERO
        s0 = s0 - m0
        s1 = s1 - m1 - borrow
    return s0, s1


@nb.njit(inline="always", cache=True)
def _rank_shift(e, shift, sign, d, binom, nv):
    """Rank of e + sign * shift in degree d."""
    idx = 0
    rem = d
    for j in range(nv - 1, 0, -1):
        mj = e[j] + sign * shift[j]
        idx += binom[rem + j, j] - binom[rem - mj + j, j]
        rem -= mj
    return idx


@nb.njit(inline="always", cache=True)
def _rank_sum(e, a, b, d, binom, nv):
    """Rank of e - a + b in degree d."""
    idx = 0
    rem = d
    for j in range(nv - 1, 0, -1):
        mj = e[j] - a[j] + b[j]
        idx += binom[rem + j, j] - binom[rem - mj + j, j]
        rem -= mj
    return idx


@nb.njit(inline="always", cache=True)
def _advance(e, d, nv):
    """Step e to the next exponent vector of degree d in basis order.

    e[1] runs fastest and e[nv-1] slowest; returns False after the last one.
    """
    s = 0
    for i in range(1, nv):
        s += e[i]
    if s < d:
        e[1] += 1
        e[0] -= 1
        return True
    for j in range(1, nv - 1):
        s -= e[j]
        e[j] = 0
        if s < d:
            e[j + 1] += 1
            e[0] = d - s - 1
            return True
    return False


@nb.njit(cache=True)
def divide_degree(
    coef, d, nv, N, binom, lm, lm_deg, tail_ptr, tail_exp, tail_coef,
    cof_ptr, cof_var, cof_exp, cof_coef, A, rem_pos, rem_val, mod, minv,
):
    """Divide a degree-d residue vector by the Gröbner basis, in place.

    For each reducible monomial the quotient coefficient is pushed through
    the cofactors into A[i] (degree d - N + 1), so that afterwards
    g = sum_i A_i f_i + remainder.  Remainder entries are left in ``coef``
    and copied to rem_pos / rem_val; the return value is their number, or
    -1 if the buffers overflow.
    """
    m0 = mod[0]
    m1 = mod[1]
    nb_ = lm.shape[0]
    d1 = d - N + 1
    e = np.zeros(nv, dtype=np.int64)
    e[0] = d
    nrem = 0
    size = coef.shape[0]
    for t in range(size):
        c0 = coef[t, 0]
        c1 = coef[t, 1]
        if c0 != _ZERO or c1 != _ZERO:
            k = -1
            for g in range(nb_):
                if lm_deg[g] > d:
                    continue
                ok = True
                for i in range(nv):
                    if e[i] < lm[g, i]:
                        ok = False
                        break
                if ok:
                    k = g
                    break
            if k < 0:
                if nrem >= rem_pos.shape[0]:
                    return -1
                rem_pos[nrem] = t
                rem_val[nrem, 0] = c0
                rem_val[nrem, 1] = c1
                nrem += 1
            else:
                lk = lm[k]
                for r in range(tail_ptr[k], tail_ptr[k + 1]):
                    tg = _rank_sum(e, lk, tail_exp[r], d, binom, nv)
                    p0, p1 = montmul(c0, c1, tail_coef[r, 0], tail_coef[r, 1], m0, m1, minv)
                    coef[tg, 0], coef[tg, 1] = addmod(coef[tg, 0], coef[tg, 1], p0, p1, m0, m1)
                for r in range(cof_ptr[k], cof_ptr[k + 1]):
                    tg = _rank_sum(e, lk, cof_exp[r], d1, binom, nv)
                    v = cof_var[r]
                    p0, p1 = montmul(c0, c1, cof_coef[r, 0], cof_coef[r, 1], m0, m1, minv)
                    A[v, tg, 0], A[v, tg, 1] = addmod(A[v, tg, 0], A[v, tg, 1], p0, p1, m0, m1)
                coef[t, 0] = _ZERO
                coef[t, 1] = _ZERO
        if t + 1 < size:
            _advance(e, d, nv)
    return nrem


@nb.njit(cache=True)
def divergence(A, d1, nv, binom, small, out, mod, minv):
    """out += sum_i dA_i/dx_i, with A_i of degree d1 and out of degree d1 - 1."""
    m0 = mod[0]
    m1 = mod[1]
    e = np.zeros(nv, dtype=np.int64)
    e[0] = d1
    unit = np.zeros(nv, dtype=np.int64)
    size = A.shape[1]
    for t in range(size):
        for i in range(nv):
            a0 = A[i, t, 0]
            a1 = A[i, t, 1]
            if (a0 != _ZERO or a1 != _ZERO) and e[i] > 0:
                unit[i] = 1
                tg = _rank_shift(e, unit, -1, d1 - 1, binom, nv)
                unit[i] = 0
                p0, p1 = montmul(a0, a1, small[e[i], 0], small[e[i], 1], m0, m1, minv)
                out[tg, 0], out[tg, 1] = addmod(out[tg, 0], out[tg, 1], p0, p1, m0, m1)
        if t + 1 < size:
            _advance(e, d1, nv)


@nb.njit(cache=True)
def scale_vector(v, c, mod, minv):
    """v *= c."""
    for i in range(v.shape[0]):
        if v[i, 0] != _ZERO or v[i, 1] != _ZERO:
            v[i, 0], v[i, 1] = montmul(v[i, 0], v[i, 1], c[0], c[1], mod[0], mod[1], minv)


@nb.njit(cache=True)
def axpy(y, a, x, mod, minv):
    """y += a * x."""
    m0 = mod[0]
    m1 = mod[1]
    for i in range(x.shape[0]):
        if x[i, 0] != _ZERO or x[i, 1] != _ZERO:
            p0, p1 = montmul(a[0], a[1], x[i, 0], x[i, 1], m0, m1, minv)
            y[i, 0], y[i, 1] = addmod(y[i, 0], y[i, 1], p0, p1, m0, m1)


@nb.njit(cache=True)
def scatter_add(y, pos, vals, mod):
    for i in range(pos.shape[0]):
        t = pos[i]
        y[t, 0], y[t, 1] = addmod(y[t, 0], y[t, 1], vals[i, 0], vals[i, 1], mod[0], mod[1])


@nb.njit(cache=True)
def count_nonzero(v):
    n = 0
    for i in range(v.shape[0]):
        if v[i, 0] != _ZERO or v[i, 1] != _ZERO:
            n += 1
    return n


class MontgomeryRing:
    """Z / p^K with two-limb Montgomery residues; K is the largest with p^K < 2^127."""

    def __init__(self, p, K=None):
        self.p = int(p)
        if K is None:
            K = 0
            while self.p ** (K + 1) < 2**127:
                K += 1
        self.K = K
        self.modulus = self.p**K
        if self.modulus >= 2**127 or self.modulus % 2 == 0:
            raise ValueError("modulus must be odd and below 2^127")
        self.mod = self.limbs(self.modulus)
        self.minv = np.uint64((-pow(self.modulus, -1, 2**64)) % 2**64)
        self.r = pow(2, 128, self.modulus)
        self.rinv = pow(self.r, -1, self.modulus)

    @staticmethod
    def limbs(x):
        return np.array([x & 0xFFFFFFFFFFFFFFFF, x >> 64], dtype=np.uint64)

    def zeros(self, size):
        return np.zeros((max(size, 0), 2), dtype=np.uint64)

    def to_mont_int(self, x):
        """Montgomery form of a p-integral rational, as a Python integer."""
        num, den = int(x.numerator), int(x.denominator)
        if den % self.p == 0:
            raise ZeroDivisionError("denominator divisible by p")
        return num * pow(den, -1, self.modulus) * self.r % self.modulus

    def to_mont(self, x):
        return self.limbs(self.to_mont_int(x))

    def from_mont(self, v):
        """Residue in [0, p^K) of a Montgomery value given as two limbs."""
        return (int(v[0]) | (int(v[1]) << 64)) * self.rinv % self.modulus

    def pack(self, values):
        """Array of shape (len, 2) from Python integers already in Montgomery form."""
        out = np.zeros((len(values), 2), dtype=np.uint64)
        for i, x in enumerate(values):
            out[i, 0] = x & 0xFFFFFFFFFFFFFFFF
            out[i, 1] = x >> 64
        return out

    def small_table(self, n):
        return self.pack([k * self.r % self.modulus for k in range(n + 1)])
