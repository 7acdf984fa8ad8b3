"""Exact arithmetic in cyclotomic fields Q(zeta_n), plus a float fallback.

An :class:`ExactScalar` is a polynomial in ``zeta_n = exp(2 pi i / n)`` with
rational coefficients, kept reduced modulo the n-th cyclotomic polynomial.
Pure rationals live at order 1 so the common path stays cheap.  Operands of
different orders are lifted to the lcm of their orders, which is capped by
:data:`MAX_ORDER` to keep representations from exploding.

:class:`FloatScalar` exposes the same interface over ``complex`` with an
absolute zero tolerance; it exists for phases that are not rational multiples
of pi and is never used for proofs.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

#: Hard cap on the cyclotomic order reached by promotion.
MAX_ORDER = 256
# recognize_in_field tries 2^(phi-1) conjugate sign patterns; give up above this
MAX_SIGN_SEARCH_DEGREE = 12

#: Default zero tolerance of the float backend.
DEFAULT_TOL = 1e-10


class DivisionByZero(ZeroDivisionError):
    pass


class OrderCapExceeded(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# cyclotomic polynomial tables


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def totient(n: int) -> int:
    result = n
    for p in _prime_factors(n):
        result -= result // p
    return result


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1] // lead
        out[k] = c
        if c:
            for j, dj in enumerate(den):
                num[k + j] -= c * dj
    return out


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[mpq, ...], ...]:
    """Reduced coefficient vectors of zeta_n^k for k = 0 .. n-1."""
    phi = totient(n)
    poly = cyclotomic_poly(n)
    rows = []
    cur = [mpq(0)] * phi
    cur[0] = mpq(1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by zeta: shift and reduce x^phi = -sum poly[j] x^j
        top = cur[-1]
        nxt = [mpq(0)] + cur[:-1]
        if top:
            for j in range(phi):
                nxt[j] -= top * poly[j]
        cur = nxt
    return tuple(rows)


def _reduce(n: int, raw: Sequence) -> tuple[mpq, ...]:
    phi = totient(n)
    table = _power_table(n)
    out = [mpq(0)] * phi
    for k, c in enumerate(raw):
        if not c:
            continue
        if k < phi:
            out[k] += c
        else:
            for j, t in enumerate(table[k % n]):
                if t:
                    out[j] += c * t
    return tuple(out)


def _check_order(n: int) -> None:
    if n > MAX_ORDER:
        raise OrderCapExceeded(f"cyclotomic order {n} exceeds cap {MAX_ORDER}")


# ---------------------------------------------------------------------------
# exact scalars


class ExactScalar:
    """Element of Q(zeta_order) in the reduced power basis."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence):
        self.order = order
        self.coeffs = tuple(coeffs)

    # -- construction -----------------------------------------------------

    @classmethod
    def rational(cls, num, den=1) -> "ExactScalar":
        return cls(1, (mpq(num, den),))

    @classmethod
    def from_coeffs(cls, order: int, coeffs: Sequence) -> "ExactScalar":
        """Build from possibly unreduced coefficients of powers of zeta_order."""
        if order < 1:
            raise ValueError("order must be positive")
        _check_order(order)
        coeffs = [mpq(c) for c in coeffs]
        if order % 4 == 2:
            # Q(zeta_2m) = Q(zeta_m) for odd m; zeta_2m = -zeta_m^((m+1)/2)
            m = order // 2
            z = -root_of_unity(m, (m + 1) // 2)
            acc = ZERO
            power = ONE
            for c in coeffs:
                if c:
                    acc = acc + power * ExactScalar.rational(c)
                power = power * z
            return acc
        return cls(order, _reduce(order, coeffs))._shrink()

    def _shrink(self) -> "ExactScalar":
        n = self.order
        c = self.coeffs
        while n > 1:
            if not any(c[1:]):
                return ExactScalar(1, (c[0],))
            moved = False
            for p in _prime_factors(n):
                if n % (p * p) == 0 and all(not c[j] for j in range(len(c)) if j % p):
                    n //= p
                    c = tuple(c[j] for j in range(0, len(c), p))
                    moved = True
                    break
            if not moved:
                break
        return ExactScalar(n, c)

    # -- structure ----------------------------------------------------------

    def lift(self, n: int) -> tuple[mpq, ...]:
        """Coefficients of this element inside Q(zeta_n); requires order | n."""
        if n == self.order:
            return self.coeffs
        if n % self.order:
            raise ValueError(f"order {self.order} does not divide {n}")
        step = n // self.order
        raw = [mpq(0)] * n
        for j, c in enumerate(self.coeffs):
            raw[(j * step) % n] += c
        return _reduce(n, raw)

    def is_rational(self) -> bool:
        return self.order == 1

    def as_rational(self) -> mpq:
        if self.order != 1:
            raise ValueError("not a rational scalar")
        return self.coeffs[0]

    def sort_key(self, n: int | None = None) -> tuple:
        n = self.order if n is None else n
        return tuple(self.lift(n))

    def galois(self, k: int) -> "ExactScalar":
        """Apply the automorphism zeta -> zeta^k (k coprime to the order)."""
        n = self.order
        if n == 1:
            return self
        raw = [mpq(0)] * n
        for j, c in enumerate(self.coeffs):
            if c:
                raw[(j * k) % n] += c
        return ExactScalar(n, _reduce(n, raw))._shrink()

    def minimal(self) -> "ExactScalar":
        """Same value expressed over the smallest cyclotomic field containing it."""
        x = self
        changed = True
        while changed and x.order > 1:
            changed = False
            n = x.order
            for p in _prime_factors(n):
                m = n // p
                if m % 4 == 2:
                    m //= 2
                if m == n or not x._fixed_over(m):
                    continue
                y = _descend(x, m)
                if y is not None:
                    x = y
                    changed = True
                    break
        return x

    def _fixed_over(self, m: int) -> bool:
        n = self.order
        return all(
            self.galois(k) == self
            for k in range(1, n)
            if k % m == 1 % m and math.gcd(k, n) == 1
        )

    # -- arithmetic ---------------------------------------------------------

    def _binary(self, other):
        if not isinstance(other, ExactScalar):
            other = as_exact(other)
        if self.order == other.order:
            return self.order, self.coeffs, other.coeffs
        n = math.lcm(self.order, other.order)
        _check_order(n)
        return n, self.lift(n), other.lift(n)

    def __add__(self, other):
        if isinstance(other, FloatScalar):
            return NotImplemented
        if self.order == 1 and isinstance(other, ExactScalar) and other.order == 1:
            return ExactScalar(1, (self.coeffs[0] + other.coeffs[0],))
        n, a, b = self._binary(other)
        return ExactScalar(n, tuple(x + y for x, y in zip(a, b)))._shrink()

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, FloatScalar):
            return NotImplemented
        if self.order == 1 and isinstance(other, ExactScalar) and other.order == 1:
            return ExactScalar(1, (self.coeffs[0] - other.coeffs[0],))
        n, a, b = self._binary(other)
        return ExactScalar(n, tuple(x - y for x, y in zip(a, b)))._shrink()

    def __rsub__(self, other):
        return as_exact(other) - self

    def __mul__(self, other):
        if isinstance(other, FloatScalar):
            return NotImplemented
        if isinstance(other, ExactScalar) and other.order == 1:
            q = other.coeffs[0]
            if self.order == 1:
                return ExactScalar(1, (self.coeffs[0] * q,))
            if not q:
                return ZERO
            return ExactScalar(self.order, tuple(x * q for x in self.coeffs))
        n, a, b = self._binary(other)
        if n == 1:
            return ExactScalar(1, (a[0] * b[0],))
        raw = [mpq(0)] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        raw[i + j] += x * y
        return ExactScalar(n, _reduce(n, raw))._shrink()

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if not self:
            raise DivisionByZero("inverse of zero")
        n = self.order
        if n == 1:
            return ExactScalar(1, (1 / self.coeffs[0],))
        # x^-1 = (product of the other distinct conjugates) / norm(x); the
        # distinct conjugates are the roots of x's minimal polynomial, so
        # their product is rational
        conj: list[ExactScalar] = [self]
        for k in range(2, n):
            if math.gcd(k, n) == 1:
                g = self.galois(k)
                if not any(g == c for c in conj):
                    conj.append(g)
        rest = ONE
        for g in conj[1:]:
            rest = rest * g
        norm = self * rest
        return rest * ExactScalar.rational(1 / norm.as_rational())

    def __truediv__(self, other):
        if isinstance(other, FloatScalar):
            return NotImplemented
        if not isinstance(other, ExactScalar):
            other = as_exact(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_exact(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return self.galois(-1 % self.order) if self.order > 1 else self

    def approx(self) -> complex:
        n = self.order
        if n == 1:
            return complex(float(self.coeffs[0]))
        z = cmath.exp(2j * math.pi / n)
        return sum((float(c) * z**j for j, c in enumerate(self.coeffs) if c), 0j)

    # -- comparison -----------------------------------------------------------

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, FloatScalar):
            return other == self
        if not isinstance(other, ExactScalar):
            try:
                other = as_exact(other)
            except TypeError:
                return NotImplemented
        if self.order == other.order:
            return self.coeffs == other.coeffs
        n = math.lcm(self.order, other.order)
        return self.lift(n) == other.lift(n)

    def __hash__(self) -> int:
        m = self.minimal()
        if m.order == 1:
            return hash(m.coeffs[0])
        return hash((m.order, m.coeffs))

    def __repr__(self) -> str:
        if self.order == 1:
            return f"ExactScalar({self.coeffs[0]})"
        return f"ExactScalar(order={self.order}, coeffs={[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if self.order == 1:
            return str(self.coeffs[0])
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                base = "" if j == 0 else (f"z{self.order}" + (f"^{j}" if j > 1 else ""))
                if not base:
                    terms.append(str(c))
                elif c == 1:
                    terms.append(base)
                else:
                    terms.append(f"({c})*{base}")
        return " + ".join(terms) or "0"


def _descend(x: ExactScalar, m: int) -> ExactScalar | None:
    """Coordinates of x over Q(zeta_m), assuming x is fixed by Gal(n/m)."""
    n = x.order
    phi_m = totient(m)
    basis = [ExactScalar.from_coeffs(m, [0] * j + [1]).lift(n) for j in range(phi_m)]
    from mfrf import linalg  # local import: linalg builds on this module

    cols = [[ExactScalar.rational(basis[j][i]) for j in range(phi_m)] for i in range(len(x.coeffs))]
    rhs = [ExactScalar.rational(c) for c in x.coeffs]
    sol = linalg.solve_least(cols, rhs)
    if sol is None:
        return None
    return ExactScalar.from_coeffs(m, [s.as_rational() for s in sol])


ZERO = ExactScalar(1, (mpq(0),))
ONE = ExactScalar(1, (mpq(1),))


def as_exact(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, Fraction)) or type(x).__name__ == "mpq":
        return ExactScalar(1, (mpq(x),))
    if isinstance(x, str):
        return parse_rational_str(x)
    raise TypeError(f"cannot convert {type(x).__name__} to ExactScalar")


def parse_rational_str(s: str) -> ExactScalar:
    s = s.strip().replace("−", "-")
    try:
        return ExactScalar(1, (mpq(s),))
    except ValueError as exc:
        raise ValueError(f"malformed rational {s!r}") from exc


def root_of_unity(n: int, k: int = 1) -> ExactScalar:
    """zeta_n^k in canonical form."""
    if n < 1:
        raise ValueError("n must be positive")
    k %= n
    if n % 4 == 2:
        # zeta_2m^k = (-1)^k zeta_m^(k (m+1)/2) for odd m
        m = n // 2
        r = root_of_unity(m, (k * (m + 1) // 2) % m) if m > 1 else ONE
        return -r if k % 2 else r
    _check_order(n)
    return ExactScalar(n, _power_table(n)[k])._shrink()


def sqrt_rational(q) -> ExactScalar:
    """Principal square root of a rational, realised inside a cyclotomic field.

    Uses sqrt(2) = zeta_8 + zeta_8^-1 and quadratic Gauss sums for odd primes.
    """
    q = q.as_rational() if isinstance(q, ExactScalar) else mpq(q)
    if q == 0:
        return ZERO
    num, den = q.numerator, q.denominator
    # sqrt(num/den) = sqrt(num*den)/den
    m = int(num * den)
    sign = -1 if m < 0 else 1
    m = abs(m)
    outside = 1
    squarefree = 1
    # only primes up to the order cap can survive in the squarefree part
    p = 2
    while p <= MAX_ORDER and m > 1:
        m, e = (int(x) for x in gmpy2.remove(m, p))
        outside *= p ** (e // 2)
        if e % 2:
            squarefree *= p
        p = int(gmpy2.next_prime(p))
    if m > 1:
        if not gmpy2.is_square(m):
            raise OrderCapExceeded(f"square root of {q} needs a prime above the order cap")
        outside *= int(gmpy2.isqrt(m))
    root = ExactScalar.rational(outside, den)
    for p in _prime_factors(squarefree):
        root = root * _sqrt_prime(p)
    if sign < 0:
        root = root * root_of_unity(4, 1)
    return root


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> ExactScalar:
    if p == 2:
        return root_of_unity(8, 1) + root_of_unity(8, 7)
    _check_order(p if p % 4 == 1 else 4 * p)
    g = ZERO
    for a in range(1, p):
        legendre = pow(a, (p - 1) // 2, p)
        g = g + (root_of_unity(p, a) if legendre == 1 else -root_of_unity(p, a))
    if p % 4 == 3:
        g = g * root_of_unity(4, 3)  # g = i sqrt(p)
    if g.approx().real < 0:
        g = -g
    return g


def exact_sqrt(x: ExactScalar) -> ExactScalar | None:
    """A square root of x inside a cyclotomic field, or None if none is found.

    Rational radicands always succeed (subject to the order cap); general
    radicands are tried against roots recognised from the numeric value.
    """
    if x.order == 1:
        try:
            return sqrt_rational(x.as_rational())
        except OrderCapExceeded:
            return None
    for cand in recognize_in_field(cmath.sqrt(x.approx()), x.order, conjugates=[
        cmath.sqrt(x.galois(k).approx()) for k in range(x.order) if math.gcd(k, x.order) == 1
    ]):
        if cand * cand == x:
            return cand
    return None


def recognize_in_field(z: complex, n: int, conjugates: Sequence[complex] | None = None,
                       max_den: int = 10**6) -> list[ExactScalar]:
    """Candidate elements of Q(zeta_n) whose complex value is z.

    With phi(n) <= 2 the coordinates follow from real and imaginary parts.
    Otherwise ``conjugates`` must list candidate values of sigma_k(x) for every
    k coprime to n (up to sign) so the power-basis coordinates can be solved.
    Candidates are unverified; callers check them exactly.
    """
    out = []
    if n == 1:
        if abs(z.imag) < 1e-8:
            out.append(ExactScalar.rational(Fraction(z.real).limit_denominator(max_den)))
        return out
    phi = totient(n)
    zeta = cmath.exp(2j * math.pi / n)
    if phi == 2:
        if abs(zeta.imag) < 1e-12:
            return out
        b = z.imag / zeta.imag
        a = z.real - b * zeta.real
        fa = Fraction(a).limit_denominator(max_den)
        fb = Fraction(b).limit_denominator(max_den)
        out.append(ExactScalar.from_coeffs(n, [fa, fb]))
        return out
    if conjugates is None or phi > MAX_SIGN_SEARCH_DEGREE:
        return out
    import numpy as np

    ks = [k for k in range(1, n) if math.gcd(k, n) == 1]
    vand = np.array([[cmath.exp(2j * math.pi * k * j / n) for j in range(phi)] for k in ks])
    vals = np.array(conjugates[: len(ks)])
    for signs in product((1, -1), repeat=len(ks) - 1):
        rhs = vals * np.array((1,) + signs)
        coords, *_ = np.linalg.lstsq(vand, rhs, rcond=None)
        if np.max(np.abs(coords.imag)) > 1e-6:
            continue
        out.append(ExactScalar.from_coeffs(n, [Fraction(c.real).limit_denominator(max_den) for c in coords]))
    return out


# ---------------------------------------------------------------------------
# float backend


class FloatScalar:
    """Double-precision complex scalar with an absolute zero tolerance."""

    __slots__ = ("value", "tol")

    def __init__(self, value, tol: float = DEFAULT_TOL):
        if isinstance(value, ExactScalar):
            value = value.approx()
        self.value = complex(value)
        self.tol = tol

    def _other(self, other):
        if isinstance(other, FloatScalar):
            return other.value
        if isinstance(other, ExactScalar):
            return other.approx()
        return complex(other)

    def __add__(self, other):
        return FloatScalar(self.value + self._other(other), self.tol)

    __radd__ = __add__

    def __sub__(self, other):
        return FloatScalar(self.value - self._other(other), self.tol)

    def __rsub__(self, other):
        return FloatScalar(self._other(other) - self.value, self.tol)

    def __mul__(self, other):
        return FloatScalar(self.value * self._other(other), self.tol)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if abs(o) <= self.tol:
            raise DivisionByZero("division by (numerically) zero")
        return FloatScalar(self.value / o, self.tol)

    def __rtruediv__(self, other):
        return FloatScalar(self._other(other), self.tol) / self

    def __neg__(self):
        return FloatScalar(-self.value, self.tol)

    def __pow__(self, k: int):
        return FloatScalar(self.value**k, self.tol)

    def inverse(self):
        return FloatScalar(1, self.tol) / self

    def conjugate(self):
        return FloatScalar(self.value.conjugate(), self.tol)

    def approx(self) -> complex:
        return self.value

    def is_rational(self) -> bool:
        return False

    def sort_key(self, n=None) -> tuple:
        r = round(self.value.real, 8) + 0.0
        i = round(self.value.imag, 8) + 0.0
        return (r, i)

    def __bool__(self) -> bool:
        return abs(self.value) > self.tol

    def __eq__(self, other) -> bool:
        try:
            return abs(self.value - self._other(other)) <= self.tol
        except TypeError:
            return NotImplemented

    __hash__ = None  # tolerance equality is not transitive

    def __repr__(self) -> str:
        return f"FloatScalar({self.value!r})"

    __str__ = __repr__


# ---------------------------------------------------------------------------
# helpers shared by the rest of the package


def scalar(x, backend: str = "exact", tol: float = DEFAULT_TOL):
    """Coerce ``x`` into the requested backend."""
    if backend == "float":
        return x if isinstance(x, FloatScalar) else FloatScalar(x if not isinstance(x, (int, str)) else as_exact(x), tol)
    return as_exact(x)


def common_order(values: Iterable) -> int:
    n = 1
    for v in values:
        if isinstance(v, ExactScalar) and v.order > 1:
            n = math.lcm(n, v.order)
    return n


def arith(a, b, op: str):
    """Dispatch ``add``/``sub``/``mul`` by name."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def invert(a):
    return a.inverse()


def conjugate(a):
    return a.conjugate()


def approx(a) -> complex:
    return a.approx()
