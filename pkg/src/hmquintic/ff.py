"""Exact prime-field arithmetic and small-degree polynomial factor patterns.

Everything here is deterministic: trial-division primality, Euler-criterion
Legendre symbols, and two independent factor-degree routines that the test
suite cross-checks against each other.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union


class BadPrime(Exception):
    """Modulus is not an admissible prime for the requested operation."""


class Ramified(Exception):
    """Polynomial is not squarefree modulo p."""


#: Primes of bad reduction for the variety pipeline.
BAD_PRIMES = frozenset({2, 5, 11})


def is_prime(n: int) -> bool:
    """Deterministic primality by trial division (word-sized inputs only)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """A verified prime modulus; ``variety=True`` additionally excludes 2, 5, 11."""

    p: int
    variety: bool = False

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise BadPrime(f"{self.p} is not prime")
        if self.variety and self.p in BAD_PRIMES:
            raise BadPrime(f"p={self.p} is a prime of bad reduction")

    def __int__(self) -> int:
        return self.p


def as_prime(p: Union[int, PrimeModulus]) -> int:
    p = int(p)
    if not is_prime(p):
        raise BadPrime(f"{p} is not prime")
    return p


def variety_prime(p: Union[int, PrimeModulus]) -> int:
    """Validate a modulus for variety work: prime and outside {2, 5, 11}."""
    p = as_prime(p)
    if p in BAD_PRIMES:
        raise BadPrime(f"p={p} is a prime of bad reduction")
    return p


@dataclass(frozen=True)
class FieldElement:
    """An element of F_p in canonical representation 0 <= value < p."""

    value: int
    p: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other
        return FieldElement(int(other), self.p)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.value + o.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.value - o.value, self.p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.value * o.value, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return FieldElement(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def __pow__(self, e: int):
        return FieldElement(pow(self.value, e, self.p), self.p)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0


def legendre(a: Union[int, FieldElement], p: Optional[int] = None) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1} by Euler's criterion."""
    if isinstance(a, FieldElement):
        p = a.p
        a = a.value
    if p is None:
        raise ValueError("modulus required for integer argument")
    if p == 2 or not is_prime(p):
        raise BadPrime(f"legendre needs an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> Optional[int]:
    """Smallest nonnegative square root of a mod p, or None."""
    a %= p
    for r in range((p // 2) + 1):
        if r * r % p == a:
            return r
    return None


def fifth_root_of_unity(p: Union[int, PrimeModulus]) -> Optional[FieldElement]:
    """A primitive fifth root of unity in F_p, present iff p = 1 mod 5.

    Deterministic choice: the (p-1)/5 power of the first base g >= 2 whose
    power is not 1. Downstream counts are asserted independent of this choice.
    """
    p = as_prime(p)
    if p in BAD_PRIMES:
        raise BadPrime(f"p={p} excluded")
    if p % 5 != 1:
        return None
    for g in range(2, p):
        e = pow(g, (p - 1) // 5, p)
        if e != 1:
            return FieldElement(e, p)
    raise RuntimeError("unreachable for prime p = 1 mod 5")


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, constant term first; consumers require degree <= 4."""

    coefficients: tuple

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        if not coeffs or coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def eval_mod(self, x: int, p: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * x + c) % p
        return acc


def _as_coeffs(f: Union[IntPolynomial, Iterable[int]]) -> list:
    if isinstance(f, IntPolynomial):
        return list(f.coefficients)
    return [int(c) for c in f]


# ------------------------------------------------------------------ poly mod p

def poly_mod(coeffs: list, p: int) -> list:
    c = [v % p for v in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly_eval_mod(coeffs: list, x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def poly_deriv_mod(coeffs: list, p: int) -> list:
    d = [(i * coeffs[i]) % p for i in range(1, len(coeffs))]
    return poly_mod(d or [0], p)


def poly_divmod_mod(num: list, den: list, p: int) -> tuple:
    num = [v % p for v in num]
    dd = len(den) - 1
    dn = len(num) - 1
    if dn < dd:
        return [0], num
    inv = pow(den[-1], p - 2, p)
    quo = [0] * (dn - dd + 1)
    for i in range(dn - dd, -1, -1):
        q = num[i + dd] * inv % p
        quo[i] = q
        for j in range(dd + 1):
            num[i + j] = (num[i + j] - q * den[j]) % p
    return poly_mod(quo, p), poly_mod(num[:dd] or [0], p)


def poly_gcd_mod(a: list, b: list, p: int) -> list:
    a, b = poly_mod(a, p), poly_mod(b, p)
    while b != [0]:
        _, r = poly_divmod_mod(a, b, p)
        a, b = b, r
    if a != [0]:
        inv = pow(a[-1], p - 2, p)
        a = [v * inv % p for v in a]
    return a


def poly_mulmod(a: list, b: list, f: list, p: int) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    _, r = poly_divmod_mod(out, f, p)
    return r


def poly_powmod_x(e: int, f: list, p: int) -> list:
    """x^e mod (f, p) by square and multiply."""
    result = [1]
    base = poly_mod([0, 1], p)
    _, base = poly_divmod_mod(base, f, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, f, p)
        base = poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def is_squarefree_mod(coeffs: list, p: int) -> bool:
    c = poly_mod(coeffs, p)
    d = poly_deriv_mod(c, p)
    if d == [0]:
        return len(c) == 1
    return len(poly_gcd_mod(c, d, p)) == 1


# ------------------------------------------------------------- factor patterns

def _poly_div_linear(c: list, root: int, p: int) -> list:
    out = [0] * (len(c) - 1)
    acc = 0
    for i in range(len(c) - 1, 0, -1):
        acc = (acc * root + c[i]) % p
        out[i - 1] = acc
    return out


def _is_irreducible_quadratic(q: list, p: int) -> bool:
    a0, a1, _ = q
    disc = (a1 * a1 - 4 * a0) % p
    return legendre(disc, p) == -1


def _factor_degrees_trial(c: list, p: int) -> list:
    deg = len(c) - 1
    roots = [x for x in range(p) if poly_eval_mod(c, x, p) == 0]
    degs = [1] * len(roots)
    rem = deg - len(roots)
    if rem == 0:
        return sorted(degs)
    work = c[:]
    for x in roots:
        work = _poly_div_linear(work, x, p)
    # rootless part of degree <= 4: any quadratic factor found by trial
    # division must itself be irreducible, the rest is one irreducible block
    quad_hits = 0
    for b in range(p):
        if len(work) - 1 < 2:
            break
        for a in range(p):
            q = [a, b, 1]
            quo, r = poly_divmod_mod(work, q, p)
            if r == [0] and _is_irreducible_quadratic(q, p):
                quad_hits += 1
                work = quo
                if len(work) - 1 < 2:
                    break
    degs += [2] * quad_hits
    left = deg - sum(degs)
    if left:
        degs.append(left)
    return sorted(degs)


def _factor_degrees_gcd(c: list, p: int) -> list:
    """Distinct-degree pattern via gcd(f, x^(p^k) - x)."""
    deg = len(c) - 1
    inv = pow(c[-1], p - 2, p)
    f = [v * inv % p for v in c]
    degs = []
    work = f[:]
    q = p
    k = 1
    while len(work) - 1 > 0:
        xq = poly_powmod_x(q, work, p)
        xq_minus_x = poly_mod([(xq[i] if i < len(xq) else 0) - (1 if i == 1 else 0)
                               for i in range(max(len(xq), 2))], p)
        g = poly_gcd_mod(work, xq_minus_x, p)
        gd = len(g) - 1
        if gd > 0:
            # product of all irreducible factors of degree exactly k
            degs += [k] * (gd // k)
            work, _ = poly_divmod_mod(work, g, p)
        q *= p
        k += 1
        if k > deg:
            break
    return sorted(degs)


def factor_degrees(f: Union[IntPolynomial, Iterable[int]],
                   p: Union[int, PrimeModulus],
                   method: str = "trial") -> list:
    """Sorted degrees of the irreducible factors of f mod p (deg f <= 4).

    Raises Ramified when f mod p is not squarefree. Two independent methods
    ("trial": root search plus monic-quadratic trial division; "gcd":
    distinct-degree gcd with x^(p^k) - x) are kept in agreement by tests.
    """
    p = as_prime(p)
    coeffs = _as_coeffs(f)
    c = poly_mod(coeffs, p)
    deg = len(c) - 1
    if deg > 4:
        raise ValueError("factor_degrees limited to degree <= 4")
    if len(coeffs) - 1 != deg:
        raise ValueError("leading coefficient vanishes mod p")
    if deg == 0:
        return []
    if not is_squarefree_mod(c, p):
        raise Ramified(f"{coeffs} is not squarefree mod {p}")
    if method == "trial":
        return _factor_degrees_trial(c, p)
    if method == "gcd":
        return _factor_degrees_gcd(c, p)
    raise ValueError(f"unknown method {method!r}")
