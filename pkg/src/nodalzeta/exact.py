"""Exact coefficient domains.

Rationals are ``gmpy2.mpq`` values: they are reduced, have a positive
denominator and are much faster than ``fractions.Fraction`` in the reduction
loops.  The other domains here are small immutable value classes.
"""

from functools import total_ordering
from math import gcd

import gmpy2
from gmpy2 import mpq, mpz

from .errors import AmbiguousLift, ParseError, PDivides, SingularMatrix

Rational = mpq


def rational(value):
    """Coerce an int, Fraction, mpq or ``"a/b"`` string to a Rational."""
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return mpq(int(num), int(den))
            return mpq(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational number: {value!r}") from exc
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return mpq(int(value.numerator), int(value.denominator))
    return mpq(value)


def is_prime(p):
    return p >= 2 and bool(gmpy2.is_prime(p, 50))


# ---------------------------------------------------------------- prime field


class PrimeField:
    """The field F_p."""

    __slots__ = ("p",)

    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = int(p)

    def __call__(self, value):
        if isinstance(value, PrimeFieldElement):
            if value.p != self.p:
                raise ValueError("element of a different prime field")
            return value
        value = rational(value)
        den = int(value.denominator)
        if den % self.p == 0:
            raise PDivides(f"denominator {den} divisible by {self.p}")
        return PrimeFieldElement(int(value.numerator) * pow(den, -1, self.p), self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


class PrimeFieldElement:
    __slots__ = ("residue", "p")

    def __init__(self, residue, p):
        self.residue = int(residue) % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise ValueError("mixed prime fields")
            return other.residue
        if isinstance(other, int):
            return other % self.p
        other = rational(other)
        den = int(other.denominator)
        if den % self.p == 0:
            raise PDivides(f"denominator {den} divisible by {self.p}")
        return int(other.numerator) * pow(den, -1, self.p) % self.p

    def __add__(self, other):
        return PrimeFieldElement(self.residue + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return PrimeFieldElement(self.residue - self._coerce(other), self.p)

    def __rsub__(self, other):
        return PrimeFieldElement(self._coerce(other) - self.residue, self.p)

    def __mul__(self, other):
        return PrimeFieldElement(self.residue * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(-self.residue, self.p)

    def inverse(self):
        if self.residue == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return PrimeFieldElement(pow(self.residue, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * PrimeFieldElement(self._coerce(other), self.p).inverse()

    def __rtruediv__(self, other):
        return PrimeFieldElement(self._coerce(other), self.p) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return PrimeFieldElement(pow(self.residue, e, self.p), self.p)

    def __eq__(self, other):
        try:
            return self.residue == self._coerce(other)
        except (ValueError, TypeError, PDivides):
            return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p))

    def __bool__(self):
        return self.residue != 0

    def __repr__(self):
        return f"{self.residue} (mod {self.p})"


# ------------------------------------------------------------------- p-adics


class TruncatedPadic:
    """An element of Z_p known modulo p^D.

    ``valuation`` is the p-adic valuation of the stored residue (``D`` when the
    residue is zero, since the true valuation is then only known to be >= D).
    """

    __slots__ = ("residue", "p", "precision")

    def __init__(self, residue, p, precision):
        if precision < 1:
            raise ValueError("precision must be positive")
        self.p = int(p)
        self.precision = int(precision)
        self.residue = int(residue) % self.modulus

    @property
    def modulus(self):
        return self.p ** self.precision

    @property
    def valuation(self):
        if self.residue == 0:
            return self.precision
        v, r = 0, self.residue
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def digits(self):
        """Base-p digits, least significant first, padded to the precision."""
        out, r = [], self.residue
        for _ in range(self.precision):
            r, d = divmod(r, self.p)
            out.append(d)
        return out

    def _check(self, other):
        if isinstance(other, TruncatedPadic):
            if other.p != self.p or other.precision != self.precision:
                raise ValueError("mixed p-adic precisions")
            return other.residue
        return padic_embed(other, self.p, self.precision).residue

    def __add__(self, other):
        return TruncatedPadic(self.residue + self._check(other), self.p, self.precision)

    __radd__ = __add__

    def __sub__(self, other):
        return TruncatedPadic(self.residue - self._check(other), self.p, self.precision)

    def __rsub__(self, other):
        return TruncatedPadic(self._check(other) - self.residue, self.p, self.precision)

    def __mul__(self, other):
        return TruncatedPadic(self.residue * self._check(other), self.p, self.precision)

    __rmul__ = __mul__

    def __neg__(self):
        return TruncatedPadic(-self.residue, self.p, self.precision)

    def __truediv__(self, other):
        r = self._check(other)
        if r % self.p == 0:
            # Dividing by p loses a digit; a fixed-precision value cannot absorb that.
            raise PDivides("division by a non-unit at fixed precision")
        return TruncatedPadic(self.residue * pow(r, -1, self.modulus), self.p, self.precision)

    def __eq__(self, other):
        try:
            return self.residue == self._check(other)
        except (ValueError, TypeError, PDivides):
            return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p, self.precision))

    def __repr__(self):
        return f"TruncatedPadic({self.residue}, p={self.p}, D={self.precision})"


def padic_embed(x, p, precision):
    """Image of a p-integral rational in Z/p^D."""
    x = rational(x)
    den = int(x.denominator)
    if den % p == 0:
        raise PDivides(f"denominator {den} of {x} divisible by {p}")
    modulus = p**precision
    return TruncatedPadic(int(x.numerator) * pow(den, -1, modulus), p, precision)


def padic_to_integer(x, bound):
    """The unique integer c with |c| <= bound congruent to x."""
    modulus = x.modulus
    if 2 * bound + 1 > modulus:
        raise AmbiguousLift(
            f"p^D = {modulus} cannot separate integers of size up to {bound}"
        )
    c = x.residue
    if c > modulus // 2:
        c -= modulus
    if abs(c) > bound:
        raise AmbiguousLift(f"symmetric lift {c} exceeds the bound {bound}")
    return c


# --------------------------------------------------------------- number field


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = [mpq(x) for x in a]
    b = _poly_trim(b)
    if len(a) < len(b):
        return [], _poly_trim(a)
    q = [mpq(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    return _poly_trim(q), _poly_trim(a[: len(b) - 1])


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return _poly_trim(
        [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    )


class NumberField:
    """Q[t]/(m(t)) for a monic integer polynomial m.

    ``minpoly`` lists the coefficients of m from the constant term upward.
    Degree 1 (m = t) gives the rationals themselves.
    """

    __slots__ = ("minpoly", "degree", "name", "_reduction")

    def __init__(self, minpoly, name="t"):
        coeffs = [int(c) for c in minpoly]
        coeffs = _poly_trim(coeffs)
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise ValueError("the defining polynomial must be monic of degree >= 1")
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.name = name
        # t^(d+i) as a vector in the power basis, for i in [0, d-1)
        d = self.degree
        table = []
        cur = [mpq(-c) for c in coeffs[:-1]]  # t^d
        for _ in range(max(d - 1, 0)):
            table.append(cur)
            nxt = [mpq(0)] + cur[:-1]
            top = cur[-1]
            if top:
                for i in range(d):
                    nxt[i] -= top * coeffs[i]
            cur = nxt
        table.append(cur)
        self._reduction = table

    @classmethod
    def rationals(cls):
        return cls([0, 1])

    def __call__(self, value):
        if isinstance(value, NumberFieldElement):
            if value.field != self:
                raise ValueError("element of a different number field")
            return value
        if isinstance(value, (list, tuple)):
            coords = [rational(v) for v in value]
            if len(coords) > self.degree:
                return self._reduce_vector(coords)
            return NumberFieldElement(self, coords + [mpq(0)] * (self.degree - len(coords)))
        return NumberFieldElement(self, [rational(value)] + [mpq(0)] * (self.degree - 1))

    def gen(self):
        if self.degree == 1:
            return self(-self.minpoly[0])
        return self([0, 1])

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def _reduce_vector(self, coords):
        d = self.degree
        out = list(coords[:d]) + [mpq(0)] * max(0, d - len(coords))
        for i in range(d, len(coords)):
            c = coords[i]
            if c:
                if i - d >= len(self._reduction):
                    return self._reduce_slow(coords)
                row = self._reduction[i - d]
                for j in range(d):
                    out[j] += c * row[j]
        return NumberFieldElement(self, out)

    def _reduce_slow(self, coords):
        _, rem = _poly_divmod(coords, [mpq(c) for c in self.minpoly])
        return NumberFieldElement(self, rem + [mpq(0)] * (self.degree - len(rem)))

    def is_certified_irreducible(self, primes=(2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)):
        """True if m is irreducible modulo some small prime (hence over Q).

        A False answer is inconclusive: some irreducible polynomials, such as
        the minimal polynomial of sqrt(2)+sqrt(3), split modulo every prime.
        """
        if self.degree == 1:
            return True
        for ell in primes:
            if _irreducible_mod(self.minpoly, ell):
                return True
        return False

    def __eq__(self, other):
        return isinstance(other, NumberField) and other.minpoly == self.minpoly

    def __hash__(self):
        return hash(("NF", self.minpoly))

    def __repr__(self):
        return f"NumberField({list(self.minpoly)})"


def _irreducible_mod(coeffs, ell):
    """Rabin-style irreducibility test of a monic polynomial over F_ell."""
    f = [c % ell for c in coeffs]
    d = len(f) - 1

    def mulmod(a, b):
        out = [0] * (len(a) + len(b) - 1) if a and b else []
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % ell
        return polymod(out)

    def polymod(a):
        a = list(a)
        while len(a) > d:
            c = a.pop()
            if c:
                base = len(a) - d
                for j in range(d):
                    a[base + j] = (a[base + j] - c * f[j]) % ell
        while a and a[-1] == 0:
            a.pop()
        return a

    def powmod(a, e):
        result, base = [1], a
        while e:
            if e & 1:
                result = mulmod(result, base)
            base = mulmod(base, base)
            e >>= 1
        return result

    def gcd_poly(a, b):
        while b:
            a, b = b, _fp_rem(a, b, ell)
        return a

    x = [0, 1]
    # x^(ell^d) == x  and gcd(x^(ell^(d/r)) - x, f) == 1 for prime r | d
    xq = x
    powers = {}
    for k in range(1, d + 1):
        xq = powmod(xq, ell)
        powers[k] = xq
    if polymod(powers[d]) != polymod(x):
        return False
    for r in _prime_divisors(d):
        h = powers[d // r]
        diff = [(h[i] if i < len(h) else 0) - (x[i] if i < len(x) else 0) for i in range(max(len(h), 2))]
        diff = [c % ell for c in diff]
        while diff and diff[-1] == 0:
            diff.pop()
        g = gcd_poly(list(f), diff) if diff else f
        if len(g) > 1:
            return False
    return True


def _fp_rem(a, b, ell):
    a = list(a)
    inv = pow(b[-1], -1, ell)
    while len(a) >= len(b):
        c = a[-1] * inv % ell
        shift = len(a) - len(b)
        for j, y in enumerate(b):
            a[shift + j] = (a[shift + j] - c * y) % ell
        while a and a[-1] == 0:
            a.pop()
    return a


def _prime_divisors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@total_ordering
class NumberFieldElement:
    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(mpq(c) for c in coords)

    def _lift(self, other):
        if isinstance(other, NumberFieldElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("mixed number fields")
            return other.coords
        other = rational(other)
        return (other,) + (mpq(0),) * (self.field.degree - 1)

    def __add__(self, other):
        o = self._lift(other)
        return NumberFieldElement(self.field, [a + b for a, b in zip(self.coords, o)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NumberFieldElement(self.field, [a - b for a, b in zip(self.coords, o)])

    def __rsub__(self, other):
        o = self._lift(other)
        return NumberFieldElement(self.field, [b - a for a, b in zip(self.coords, o)])

    def __neg__(self):
        return NumberFieldElement(self.field, [-a for a in self.coords])

    def __mul__(self, other):
        if not isinstance(other, NumberFieldElement):
            c = rational(other)
            return NumberFieldElement(self.field, [a * c for a in self.coords])
        o = self._lift(other)
        d = self.field.degree
        prod = [mpq(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o):
                    if b:
                        prod[i + j] += a * b
        return self.field._reduce_vector(prod)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero in a number field")
        if self.is_rational():
            return self.field(1 / self.coords[0])
        # extended Euclid in Q[t]: s*a + u*m = 1
        m = [mpq(c) for c in self.field.minpoly]
        a = _poly_trim(self.coords)
        r0, r1 = m, a
        s0, s1 = [], [mpq(1)]
        while r1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if len(r0) != 1:
            raise ZeroDivisionError("element is a zero divisor: m(t) is reducible")
        inv = [c / r0[0] for c in s0]
        return self.field(inv) if len(inv) <= self.field.degree else self.field._reduce_slow(inv)

    def __truediv__(self, other):
        if not isinstance(other, NumberFieldElement):
            c = rational(other)
            return NumberFieldElement(self.field, [a / c for a in self.coords])
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def __bool__(self):
        return any(self.coords)

    def __eq__(self, other):
        try:
            return self.coords == self._lift(other)
        except (ValueError, TypeError):
            return NotImplemented

    def __lt__(self, other):
        return self.coords < self._lift(other)

    def __hash__(self):
        if self.is_rational():
            return hash(self.coords[0])
        return hash(self.coords)

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                mono = "" if i == 0 else (self.field.name if i == 1 else f"{self.field.name}^{i}")
                terms.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(terms) if terms else "0"


# ----------------------------------------------------------- linear solving


def nf_solve_linear(A, b):
    """Solve A c = b over a number field by fraction-free (Bareiss) elimination.

    Entries may be NumberFieldElement or rationals; the result is a list of
    NumberFieldElement.
    """
    n = len(A)
    if any(len(row) != n for row in A) or len(b) != n:
        raise ValueError("nf_solve_linear needs a square system")
    field = _field_of(A, b)
    M = [[field(x) for x in row] + [field(b[i])] for i, row in enumerate(A)]
    prev = field.one()
    for k in range(n):
        piv = next((r for r in range(k, n) if M[r][k]), None)
        if piv is None:
            raise SingularMatrix("matrix is singular over the number field")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        inv_prev = prev.inverse()
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n + 1):
                row_i[j] = (pk * row_i[j] - mik * row_k[j]) * inv_prev
            row_i[k] = field.zero()
        prev = pk
    x = [field.zero()] * n
    for i in range(n - 1, -1, -1):
        acc = M[i][n]
        for j in range(i + 1, n):
            if M[i][j]:
                acc = acc - M[i][j] * x[j]
        x[i] = acc / M[i][i]
    return x


def _field_of(A, b):
    for row in list(A) + [b]:
        for x in row:
            if isinstance(x, NumberFieldElement):
                return x.field
    return NumberField.rationals()


def integer_content(values):
    """gcd of a collection of integers (0 for an empty or all-zero input)."""
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g


__all__ = [
    "Rational",
    "mpq",
    "mpz",
    "rational",
    "is_prime",
    "PrimeField",
    "PrimeFieldElement",
    "TruncatedPadic",
    "padic_embed",
    "padic_to_integer",
    "NumberField",
    "NumberFieldElement",
    "nf_solve_linear",
]
