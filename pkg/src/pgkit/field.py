"""Arithmetic in GF(p^e) for the small prime powers used by projective geometries.

Elements are coefficient vectors over Z_p (little-endian), reduced modulo a
monic irreducible polynomial. Internally every element also has an integer
index ``sum(c_i * p**i)``; the index gives the fixed element order (0 first,
1 second) and keys the per-field operation tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import CompositeBase, DivisionByZero, FieldMismatch, UnsupportedSize

MAX_ORDER = 64
MAX_DEGREE = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    # m monic, little-endian
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return [c % p for c in a[:dm]] + [0] * max(0, dm - len(a))


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Exhaustive test: no monic factor of degree 1..deg/2 divides ``poly``."""
    deg = len(poly) - 1
    if deg < 1 or poly[-1] % p != 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_poly_mod(list(poly), divisor, p)):
                return False
    return True


def _monic_polys(p: int, e: int):
    # Increasing order of the base-p value, i.e. lexicographic from the top coefficient down.
    for value in range(p**e):
        low = [(value // p**i) % p for i in range(e)]
        yield tuple(low) + (1,)


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise CompositeBase(f"{self.p} is not prime")
        if self.e < 1 or self.e > MAX_DEGREE or self.p**self.e > MAX_ORDER:
            raise UnsupportedSize(f"GF({self.p}^{self.e}) exceeds the supported size")
        if len(self.modulus) != self.e + 1 or self.modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {self.e}")
        if any(not 0 <= c < self.p for c in self.modulus):
            raise ValueError("modulus coefficients out of range")
        if self.e > 1 and not is_irreducible(self.modulus, self.p):
            raise ValueError(f"modulus {self.modulus} is reducible over Z_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.e

    def __repr__(self):
        return f"GF({self.q})"

    # -- index <-> coefficient conversion -------------------------------

    def coeffs(self, index: int) -> tuple[int, ...]:
        return tuple((index // self.p**i) % self.p for i in range(self.e))

    def index(self, coeffs) -> int:
        return sum(c * self.p**i for i, c in enumerate(coeffs))

    # -- operation tables, indexed by element index ---------------------

    @cached_property
    def add_table(self) -> tuple[tuple[int, ...], ...]:
        q, p = self.q, self.p
        rows = []
        for a in range(q):
            ca = self.coeffs(a)
            rows.append(tuple(self.index([(x + y) % p for x, y in zip(ca, self.coeffs(b))]) for b in range(q)))
        return tuple(rows)

    @cached_property
    def mul_table(self) -> tuple[tuple[int, ...], ...]:
        q, p, e = self.q, self.p, self.e
        mod = list(self.modulus)
        rows = []
        for a in range(q):
            ca = self.coeffs(a)
            row = []
            for b in range(q):
                cb = self.coeffs(b)
                prod = [0] * (2 * e - 1)
                for i, x in enumerate(ca):
                    if x:
                        for j, y in enumerate(cb):
                            prod[i + j] = (prod[i + j] + x * y) % p
                row.append(self.index(_poly_mod(prod, mod, p) if e > 1 else prod))
            rows.append(tuple(row))
        return tuple(rows)

    @cached_property
    def neg_table(self) -> tuple[int, ...]:
        return tuple(self.index([(-c) % self.p for c in self.coeffs(a)]) for a in range(self.q))

    @cached_property
    def inv_table(self) -> tuple[int, ...]:
        # inv_table[0] is a placeholder; callers must reject zero.
        mul = self.mul_table
        inv = [0] * self.q
        for a in range(1, self.q):
            inv[a] = next(b for b in range(1, self.q) if mul[a][b] == 1)
        return tuple(inv)

    # -- element construction --------------------------------------------

    def element(self, value) -> "FieldElement":
        """Build an element from a coefficient sequence or an element index."""
        if isinstance(value, int):
            if not 0 <= value < self.q:
                raise ValueError(f"index {value} out of range for {self!r}")
            return FieldElement(self, self.coeffs(value))
        coeffs = tuple(value)
        if len(coeffs) != self.e or any(not 0 <= c < self.p for c in coeffs):
            raise ValueError(f"invalid coefficient vector {coeffs} for {self!r}")
        return FieldElement(self, coeffs)

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    @property
    def index(self) -> int:
        return self.spec.index(self.coeffs)

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.spec != self.spec:
            raise FieldMismatch(f"{self.spec!r} vs {other.spec!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self.spec.element(self.spec.add_table[self.index][other.index])

    def __neg__(self):
        return self.spec.element(self.spec.neg_table[self.index])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self.spec.element(self.spec.mul_table[self.index][other.index])

    def inverse(self) -> "FieldElement":
        if not any(self.coeffs):
            raise DivisionByZero(f"zero has no inverse in {self.spec!r}")
        return self.spec.element(self.spec.inv_table[self.index])

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, n: int):
        result = self.spec.one
        base = self
        if n < 0:
            base, n = self.inverse(), -n
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        if self.spec.e == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c:
                mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(mono if c == 1 and i else (f"{c}" if i == 0 else f"{c}{mono}"))
        return "+".join(terms) or "0"


@lru_cache(maxsize=None)
def field_make(p: int, e: int = 1) -> FieldSpec:
    """Return GF(p^e) using the smallest monic irreducible modulus of degree e.

    Polynomials are ordered by their base-p value (top coefficient most
    significant). For e == 1 the modulus is ``x``.
    """
    if not is_prime(p):
        raise CompositeBase(f"{p} is not prime")
    if e < 1 or e > MAX_DEGREE or p**e > MAX_ORDER:
        raise UnsupportedSize(f"GF({p}^{e}) exceeds the supported size (q <= {MAX_ORDER}, e <= {MAX_DEGREE})")
    if e == 1:
        return FieldSpec(p, 1, (0, 1))
    for poly in _monic_polys(p, e):
        if is_irreducible(poly, p):
            return FieldSpec(p, e, poly)
    raise AssertionError("every degree has an irreducible polynomial")  # pragma: no cover


def field_of_order(q: int) -> FieldSpec:
    """GF(q) for a prime power q."""
    for p in range(2, q + 1):
        if is_prime(p) and q % p == 0:
            e, rest = 0, q
            while rest % p == 0:
                rest //= p
                e += 1
            if rest != 1:
                break
            return field_make(p, e)
    raise CompositeBase(f"{q} is not a prime power")


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = next(d for d in range(2, q + 1) if q % d == 0)
    while q % p == 0:
        q //= p
    return q == 1


def field_elements(spec: FieldSpec) -> list[FieldElement]:
    return [spec.element(i) for i in range(spec.q)]


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def field_neg(a: FieldElement) -> FieldElement:
    return -a


def field_inv(a: FieldElement) -> FieldElement:
    return a.inverse()
