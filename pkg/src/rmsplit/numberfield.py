"""Exact arithmetic in a real quadratic field F = Q(sqrt d).

Elements are stored as (x + y*sqrt(D))/2 with D the field discriminant, so
both the d = 1 mod 4 and d = 2, 3 mod 4 cases share one representation.
An element is integral exactly when x, y are integers with x = y*D (mod 2).
"""
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import factorint, isprime

from .errors import DomainError, InvalidElementError


def _frac(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


def is_squarefree(n):
    return n != 0 and all(e == 1 for e in factorint(abs(n)).values())


@dataclass(frozen=True)
class QuadraticField:
    d: int

    def __post_init__(self):
        if self.d <= 1 or not is_squarefree(self.d):
            raise DomainError(f"d must be a squarefree integer > 1, got {self.d}")

    @classmethod
    def from_discriminant(cls, D):
        """The real quadratic field of fundamental discriminant D."""
        if D % 4 == 1:
            field = cls(D)
        elif D % 4 == 0 and (D // 4) % 4 in (2, 3):
            field = cls(D // 4)
        else:
            raise DomainError(f"{D} is not a fundamental discriminant")
        if field.D != D:
            raise DomainError(f"{D} is not a fundamental discriminant")
        return field

    @property
    def D(self):
        return self.d if self.d % 4 == 1 else 4 * self.d

    def element(self, x, y=0):
        """The (possibly non-integral) element (x + y sqrt D)/2."""
        return FieldElement(_frac(x), _frac(y), self.D)

    def integer(self, x, y=0):
        """The integral element (x + y sqrt D)/2; raises on a parity violation."""
        el = self.element(x, y)
        if not el.is_integral():
            raise InvalidElementError(f"(x, y) = ({x}, {y}) is not integral for D = {self.D}")
        return el

    def rational(self, q):
        return FieldElement(2 * _frac(q), Fraction(0), self.D)

    def from_basis(self, g0, g1):
        """g0 + g1*omega with omega = (D + sqrt D)/2."""
        return FieldElement(Fraction(2 * g0 + g1 * self.D), Fraction(g1), self.D)

    @property
    def omega(self):
        return self.from_basis(0, 1)

    @property
    def sqrtD(self):
        return FieldElement(Fraction(0), Fraction(2), self.D)

    @property
    def one(self):
        return self.rational(1)

    @property
    def zero(self):
        return self.rational(0)


@dataclass(frozen=True, eq=False)
class FieldElement:
    x: Fraction
    y: Fraction
    D: int

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y, self.D))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.D != self.D:
                raise DomainError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return FieldElement(2 * _frac(other), Fraction(0), self.D)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.x + o.x, self.y + o.y, self.D)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.x, -self.y, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.x - o.x, self.y - o.y, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        x = (self.x * o.x + self.D * self.y * o.y) / 2
        y = (self.x * o.y + self.y * o.x) / 2
        return FieldElement(x, y, self.D)

    __rmul__ = __mul__

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return FieldElement(c.x / n, c.y / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = FieldElement(Fraction(2), Fraction(0), self.D)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __bool__(self):
        return bool(self.x) or bool(self.y)

    # invariants -------------------------------------------------------------
    def conj(self):
        return FieldElement(self.x, -self.y, self.D)

    def norm(self):
        n = (self.x * self.x - self.D * self.y * self.y) / 4
        return int(n) if n.denominator == 1 else n

    def trace(self):
        t = self.x
        return int(t) if t.denominator == 1 else t

    def is_integral(self):
        return (self.x.denominator == 1 and self.y.denominator == 1
                and (self.x.numerator - self.y.numerator * self.D) % 2 == 0)

    def is_rational(self):
        return self.y == 0

    def totally_positive(self):
        # both embeddings positive <=> trace > 0 and norm > 0
        return self.x > 0 and self.norm() > 0

    def coords(self):
        """Coordinates (g0, g1) in the integral basis {1, omega}."""
        if not self.is_integral():
            raise InvalidElementError(f"{self} is not integral")
        g1 = int(self.y)
        return (int(self.x) - g1 * self.D) // 2, g1

    def embeddings(self):
        """Both real embeddings as floats, (sigma_1, sigma_2) with sigma_1(sqrt D) > 0."""
        s = math.sqrt(self.D)
        a = float(self.x) / 2
        b = float(self.y) * s / 2
        plus, minus = a + b, a - b
        # avoid cancellation in the smaller embedding
        if abs(plus) >= abs(minus) and plus != 0:
            minus = float(self.norm()) / plus
        elif minus != 0:
            plus = float(self.norm()) / minus
        return plus, minus

    @property
    def sigma1(self):
        return self.embeddings()[0]

    @property
    def sigma2(self):
        return self.embeddings()[1]

    def __repr__(self):
        def f(q):
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        return f"({f(self.x)} + {f(self.y)}*sqrt({self.D}))/2"


def element_arith(x):
    """(norm, trace, conjugate, totally_positive) of an integral element."""
    if not x.is_integral():
        raise InvalidElementError(f"{x} violates the parity condition")
    return x.norm(), x.trace(), x.conj(), x.totally_positive()


class SplittingType(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def kronecker(D, p):
    """Kronecker symbol (D/p) for a prime p."""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    r = pow(D % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def splitting_type(F, p):
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    k = kronecker(F.D, p)
    if k == 0:
        return SplittingType.RAMIFIED
    return SplittingType.SPLIT if k == 1 else SplittingType.INERT


@lru_cache(maxsize=None)
def _fundamental_unit_xy(D):
    # continued fraction of xi = (P + sqrt D)/2, P = D mod 2; the first
    # convergent h/k with Nm(h - k*xi) = +-1 yields the fundamental unit
    s = math.isqrt(D)
    P, Q = D % 2, 2
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    P0 = D % 2
    for _ in range(100000):
        a = (P + s) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        x = 2 * h - k * P0
        if x * x - D * k * k in (4, -4):
            return x, k
        P = a * Q - P
        Q = (D - P * P) // Q
    raise RuntimeError(f"continued fraction period not found for D = {D}")


def fundamental_unit(F):
    """The fundamental unit eps > 1 (first embedding) of O_F."""
    x, y = _fundamental_unit_xy(F.D)
    return F.integer(x, y)


def integral_points_in_box(D, lo1, hi1, lo2, hi2):
    """Arrays (x, y) of integral (x + y sqrt D)/2 with sigma_i in [lo_i, hi_i].

    Float bounds are padded slightly; callers needing exact boundaries
    filter the result themselves.
    """
    s = math.sqrt(D)
    pad = 1e-9 * (1 + max(abs(lo1), abs(hi1), abs(lo2), abs(hi2)))
    ymin = math.ceil((lo1 - hi2 - pad) / s)
    ymax = math.floor((hi1 - lo2 + pad) / s)
    if ymax < ymin:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    xs, ys = [], []
    for y in range(ymin, ymax + 1):
        lo = max(2 * lo1 - y * s, 2 * lo2 + y * s) - pad
        hi = min(2 * hi1 - y * s, 2 * hi2 + y * s) + pad
        x0 = math.ceil(lo)
        if (x0 - y * D) % 2:
            x0 += 1
        x1 = math.floor(hi)
        if x1 < x0:
            continue
        row = np.arange(x0, x1 + 1, 2, dtype=np.int64)
        xs.append(row)
        ys.append(np.full(row.shape, y, dtype=np.int64))
    if not xs:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(xs), np.concatenate(ys)


def split_generator(F, p):
    """A totally positive lambda with Nm(lambda) = p, or None.

    Candidates are searched in the band where both embeddings lie in
    [sqrt(p)/u^2, sqrt(p)*u^2], u the fundamental unit; among them the one
    with the smallest larger embedding is returned, ties going to
    sigma_1 > sigma_2.
    """
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    if splitting_type(F, p) is SplittingType.INERT:
        return None
    u = fundamental_unit(F).sigma1
    bound = math.sqrt(p) * u * u
    D = F.D
    best = None
    for x in range(1, int(2 * bound) + 1):
        t = x * x - 4 * p
        if t < 0 or t % D:
            continue
        y = math.isqrt(t // D)
        if y * y * D != t or (x - y * D) % 2:
            continue
        if (x + y * math.sqrt(D)) / 2 > bound * (1 + 1e-12):
            continue
        key = (x + y * math.sqrt(D), 0 if y > 0 else 1)
        if best is None or key < best[0]:
            best = (key, x, y)
    if best is None:
        return None
    lam = F.integer(best[1], best[2])
    assert lam.norm() == p and lam.totally_positive()
    return lam
