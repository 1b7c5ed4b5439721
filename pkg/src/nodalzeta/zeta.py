"""From a Frobenius matrix to the zeta function.

Polynomials are coefficient lists in ascending order.  For n = 3 the zeta
function of the surface is 1 / (Q(T) (1 - T)(1 - qT)(1 - q^2 T)) with
Q(T) = det(I - T F / q) of degree b; the roots of Q have absolute value
q^-((n-1)/2).
"""

from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .errors import AmbiguousLift, DegreeMismatch, PDivides, WeilViolation
from .exact import padic_embed, padic_to_integer, rational
from .frobenius import weil_bounds
from .spectral import b_formula


# --------------------------------------------------------------- polynomials


def _trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_divmod(a, b):
    """Division of ascending coefficient lists over the rationals."""
    a = [mpq(x) for x in a]
    b = _trim([mpq(x) for x in b])
    if len(a) < len(b):
        return [mpq(0)], _trim(a)
    q = [mpq(0)] * (len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / b[-1]
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    rem = _trim(a[: len(b) - 1] or [mpq(0)])
    return _trim(q), rem


def _is_zero(p):
    return all(c == 0 for c in p)


def poly_gcd(a, b):
    a, b = _trim([mpq(x) for x in a]), _trim([mpq(x) for x in b])
    while not _is_zero(b):
        _, r = poly_divmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a]


def poly_derivative(a):
    return _trim([i * c for i, c in enumerate(a)][1:] or [0])


def poly_pow(a, e):
    out = [1]
    for _ in range(e):
        out = poly_mul(out, a)
    return out


def format_poly(c, var="T"):
    """1-50T+625T^2 style; ascending."""
    parts = []
    for i, x in enumerate(c):
        x = int(x) if mpq(x).denominator == 1 else x
        if x == 0:
            continue
        mag = abs(x)
        body = "" if (mag == 1 and i > 0) else str(mag)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        sign = "-" if x < 0 else "+"
        parts.append((sign, body + mono))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, term in parts[1:]:
        s += sign + term
    return s


# ---------------------------------------------------------------- charpoly


def charpoly(M):
    """det(I - M T) as exact ascending coefficients (Faddeev-LeVerrier)."""
    n = len(M)
    if n == 0:
        return [mpq(1)]
    A = [[mpq(x) for x in row] for row in M]
    if any(len(row) != n for row in A):
        raise ValueError("matrix is not square")
    # c[k] multiplies t^(n-k) in det(tI - A)
    c = [mpq(0)] * (n + 1)
    c[0] = mpq(1)
    Mk = [[mpq(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk = A * M_{k-1} + c_{k-1} I
        prod = [[sum((A[i][l] * Mk[l][j] for l in range(n) if Mk[l][j]), mpq(0)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += c[k - 1]
        Mk = prod
        tr = sum((A[i][l] * Mk[l][i] for i in range(n) for l in range(n)), mpq(0))
        c[k] = -tr / k
    # det(I - T A) = T^n det(T^-1 I - A) = sum_k c[k] T^k
    return c


# ----------------------------------------------------------------- recovery


def _prime_power(q):
    p = next(d for d in range(2, q + 1) if q % d == 0)
    a, r = 0, q
    while r % p == 0:
        r //= p
        a += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, a


def _congruent(x, y, p, D):
    """x == y mod p^D, i.e. v_p(x - y) >= D."""
    diff = rational(x) - rational(y)
    if diff == 0:
        return True
    num, den = int(diff.numerator), int(diff.denominator)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v >= D


@dataclass
class Recovery:
    coefficients: list
    sign: int
    approximations: list
    precision: int
    lifted_directly: list = field(default_factory=list)


def recover_q(approx, q, n, D):
    """Integer Q(T) from p-adic approximations of its coefficients.

    Coefficients c_i with p^D > 2 gamma_i + 1 are lifted directly; the rest
    follow from c_(b-i) = eps * q^((b-2i)(n-1)/2) * c_i with eps = +-1.  Each
    sign is accepted only if every coefficient agrees with its
    approximation modulo p^D; exactly one sign must survive.  D may be a
    list giving the precision of each coefficient separately.
    """
    p, _ = _prime_power(q)
    b = len(approx) - 1
    Ds = list(D) if isinstance(D, (list, tuple)) else [D] * (b + 1)
    gammas = weil_bounds(b, q, n)
    w = n - 1
    direct = [None] * (b + 1)
    for i in range(b + 1):
        if Ds[i] > 0 and p ** Ds[i] > 2 * gammas[i] + 1:
            try:
                direct[i] = padic_to_integer(padic_embed(approx[i], p, Ds[i]), gammas[i])
            except PDivides:
                raise PDivides(
                    f"coefficient {i} of Q has a p in its denominator; the series is not converged"
                ) from None
            except AmbiguousLift:
                direct[i] = "out-of-bounds"
    candidates = []
    for eps in (1, -1):
        c = [None] * (b + 1)
        ok = True
        for i in range(b + 1):
            j = b - i
            if i <= j:
                # the exponent of q is (b - 2i) * w / 2; w is even for odd n
                scale = q ** ((j - i) * w // 2) if w % 2 == 0 else None
                if scale is None:
                    raise ValueError("n must be odd")
                lo = direct[i] if isinstance(direct[i], int) else None
                hi = direct[j] if isinstance(direct[j], int) else None
                if lo is None and hi is not None:
                    if hi % scale:
                        ok = False
                        break
                    lo = eps * hi // scale
                if lo is None:
                    ok = False
                    break
                c[i] = lo
                c[j] = eps * scale * lo if i != j else lo
                if i == j and eps == -1 and lo != 0:
                    ok = False
                    break
        if not ok:
            continue
        if c[0] != 1:
            continue
        if any(abs(x) > g for x, g in zip(c, gammas)):
            continue
        if all(_congruent_safe(x, a, p, Di) for x, a, Di in zip(c, approx, Ds)):
            candidates.append((eps, c))
    if not candidates:
        raise AmbiguousLift(
            f"no integer polynomial with the functional equation matches the data mod {p}^{D}"
        )
    if len(candidates) > 1:
        if candidates[0][1] == candidates[1][1]:
            candidates = candidates[:1]
        else:
            # both signs fit; only one can satisfy the Weil root test
            good = [cand for cand in candidates if weil_root_check(cand[1], q, n, raise_error=False)]
            if len(good) != 1:
                raise AmbiguousLift("the sign of the functional equation is not determined at this precision")
            candidates = good
    eps, c = candidates[0]
    return Recovery(c, eps, list(approx), D, [x for x in direct])


def _congruent_safe(x, a, p, D):
    try:
        return _congruent(x, a, p, D)
    except (TypeError, ValueError):
        return False


def interesting_factor(F, q, n, D):
    """Q(T) = det(I - T F / q) as an integer polynomial, recovered at precision D."""
    b = len(F)
    if b == 0:
        return Recovery([1], 1, [mpq(1)], D)
    cp = charpoly(F)
    approx = [c / mpq(q) ** i for i, c in enumerate(cp)]
    return recover_q(approx, q, n, D)


# -------------------------------------------------------------- Weil checks


def squarefree_part(c):
    c = [mpq(x) for x in c]
    if len(c) <= 2:
        return c
    g = poly_gcd(c, poly_derivative(c))
    if len(g) == 1:
        return c
    quo, _ = poly_divmod(c, g)
    return quo


def weil_root_check(c, q, n, tol=1e-6, raise_error=True):
    """All complex roots of Q have absolute value q^-((n-1)/2), to relative tolerance tol.

    Roots are computed on the squarefree part after substituting
    T = U / q^((n-1)/2), so every root should lie on the unit circle.
    """
    if len(c) <= 1:
        return True
    sf = squarefree_part(c)
    w = n - 1
    scale = q ** (w / 2)
    scaled = [float(mpq(x)) / scale**i for i, x in enumerate(sf)]
    roots = np.roots(scaled[::-1])
    bad = [r for r in roots if abs(abs(r) - 1.0) > tol]
    if bad:
        if raise_error:
            raise WeilViolation(f"roots off the critical circle: {bad[:3]}")
        return False
    return True


def weil_coefficient_check(c, q, n):
    return all(abs(x) <= g for x, g in zip(c, weil_bounds(len(c) - 1, q, n)))


def degree_check(c, n, N, tau):
    expected = b_formula(n, N) - tau
    if len(c) - 1 != expected:
        raise DegreeMismatch(f"deg Q = {len(c) - 1}, expected {expected}")
    return True


# ----------------------------------------------------------------- factors


def factor_q(c, q, n):
    """Split off factors 1 -+ q^(kw/2) T^k (w = n - 1) by trial division.

    Binomials of degree k >= 2 are tried from the top down and kept only when
    they contain a non-linear factor; linear factors come last.  Returns
    (list of (factor, multiplicity), remaining cofactor).
    """
    w = n - 1
    rest = [mpq(x) for x in c]
    found = []

    def strip(factor):
        nonlocal rest
        mult = 0
        while len(rest) - 1 >= len(factor) - 1:
            quo, rem = poly_divmod(rest, factor)
            if not _is_zero(rem):
                break
            rest = quo
            mult += 1
        if mult:
            found.append(([int(x) for x in factor], mult))

    b = len(c) - 1
    if w % 2:
        return [], [int(x) for x in c]
    for k in range(b, 1, -1):
        for sign in (-1, 1):
            if k == 2 and sign == -1:
                continue  # 1 - q^w T^2 is a product of linear factors
            factor = [1] + [0] * (k - 1) + [sign * q ** (k * w // 2)]
            strip(factor)
    for sign in (-1, 1):
        strip([1, sign * q ** (w // 2)])
    found.sort(key=lambda fm: (len(fm[0]), fm[0][-1]))
    return found, [int(x) for x in rest]


def format_factored(c, q, n):
    found, rest = factor_q(c, q, n)
    parts = []
    for fac, mult in found:
        s = f"({format_poly(fac)})"
        parts.append(s + (f"^{mult}" if mult > 1 else ""))
    if len(rest) > 1:
        parts.append(f"({format_poly(rest)})")
    return "".join(parts) if parts else "1"


# --------------------------------------------------------------- assembling


@dataclass
class ZetaResult:
    """zeta(T) = 1 / (Q(T) * prod_i (1 - q^i T)^e_i)."""

    q: int
    n: int
    q_coefficients: list
    denominator_exponents: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def degree(self):
        return len(self.q_coefficients) - 1

    def numerator_denominator(self):
        """(numerator, denominator) of zeta as integer coefficient lists."""
        den = list(self.q_coefficients)
        for i, e in enumerate(self.denominator_exponents):
            for _ in range(e):
                den = poly_mul(den, [1, -(self.q**i)])
        return [1], [int(x) for x in den]

    def point_counts(self, R):
        """Predicted #X(F_{q^r}) for r = 1..R from the logarithmic derivative."""
        c = self.q_coefficients
        b = len(c) - 1
        e = [(-1) ** i * c[i] for i in range(b + 1)]
        ps = [0] * (R + 1)
        for r in range(1, R + 1):
            s = 0
            for i in range(1, min(r, b + 1)):
                s += (-1) ** (i - 1) * e[i] * ps[r - i]
            if r <= b:
                s += (-1) ** (r - 1) * r * e[r]
            ps[r] = s
        out = []
        for r in range(1, R + 1):
            base = sum(ex * self.q ** (i * r) for i, ex in enumerate(self.denominator_exponents))
            out.append(base + ps[r])
        return out

    def describe(self):
        """Product form with equal factors merged, e.g. 1/((1-T)(1-5T)^3(1-25T))."""
        found, rest = factor_q(self.q_coefficients, self.q, self.n)
        mult = {}
        for i, e in enumerate(self.denominator_exponents):
            key = (1, -(self.q**i))
            mult[key] = mult.get(key, 0) + e
        for fac, m in found:
            mult[tuple(fac)] = mult.get(tuple(fac), 0) + m
        order = sorted(mult, key=lambda f: (len(f), abs(f[-1]), f[-1] > 0))
        parts = [f"({format_poly(f)})" + (f"^{mult[f]}" if mult[f] > 1 else "") for f in order if mult[f]]
        if len(rest) > 1:
            parts.append(f"({format_poly(rest)})")
        return "1/(" + "".join(parts) + ")"


def assemble_zeta(Q, q, n, diagnostics=None):
    """zeta = 1 / (Q(T) * (1 - T)(1 - qT)...(1 - q^(n-1) T))."""
    if not Q or Q[0] != 1:
        raise ValueError("Q(0) must be 1")
    return ZetaResult(q, n, [int(x) for x in Q], [1] * n, dict(diagnostics or {}))


def expand_factors(factors):
    """Product of (coefficients, multiplicity) pairs."""
    out = [1]
    for fac, mult in factors:
        out = poly_mul(out, poly_pow(fac, mult))
    return out


__all__ = [
    "charpoly",
    "recover_q",
    "interesting_factor",
    "weil_root_check",
    "weil_coefficient_check",
    "degree_check",
    "factor_q",
    "format_factored",
    "format_poly",
    "ZetaResult",
    "assemble_zeta",
    "expand_factors",
]
