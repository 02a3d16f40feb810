"""Positive definite integral binary quadratic forms a x^2 + b xy + c y^2."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class BinaryQF:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.disc >= 0:
            raise DomainError(f"{self.triple()} is not positive definite")

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    def triple(self):
        return (self.a, self.b, self.c)

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self):
        return math.gcd(self.a, self.b, self.c)

    def is_primitive(self):
        return self.content() == 1

    def primitive(self):
        g = self.content()
        return BinaryQF(self.a // g, self.b // g, self.c // g)

    def act(self, p, q, r, s):
        """The form Q(p x + q y, r x + s y)."""
        a, b, c = self.a, self.b, self.c
        return BinaryQF(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )


def reduce(Q):
    """Gauss-reduced form equivalent to Q under SL2(Z)."""
    if not isinstance(Q, BinaryQF):
        Q = BinaryQF(*Q)
    a, b, c = Q.a, Q.b, Q.c
    while True:
        # translate b into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            b, c = b + 2 * a * k, a * k * k + b * k + c
        if a > c:
            a, b, c = c, -b, a
            continue
        break
    if a == c and b < 0:
        b = -b
    return BinaryQF(a, b, c)


def is_reduced(Q):
    a, b, c = Q.triple()
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


def reduced_forms(disc, primitive_only=True):
    """All reduced forms of discriminant disc < 0."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise DomainError(f"invalid negative discriminant {disc}")
    out = []
    amax = math.isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if primitive_only and math.gcd(a, b, c) != 1:
                continue
            out.append(BinaryQF(a, b, c))
    return out


def class_number(disc):
    return len(reduced_forms(disc))


def _search_order(bound):
    yield 0
    for k in range(1, bound + 1):
        yield k
        yield -k


def represents(Q, n):
    """A witness (x, y) with Q(x, y) = n, or None.

    x is searched in the order 0, 1, -1, 2, -2, ... and for each x the
    candidate y with y >= 0 is preferred.
    """
    if n < 0:
        return None
    if n == 0:
        return (0, 0)
    a, b, c = Q.triple()
    delta = -Q.disc
    # completing the square in y: x^2 <= 4 c n / |disc|
    xmax = math.isqrt(4 * c * n // delta)
    for x in _search_order(xmax):
        # c y^2 + b x y + (a x^2 - n) = 0
        disc_y = b * b * x * x - 4 * c * (a * x * x - n)
        if disc_y < 0:
            continue
        s = math.isqrt(disc_y)
        if s * s != disc_y:
            continue
        roots = []
        for num in (-b * x + s, -b * x - s):
            if num % (2 * c) == 0:
                roots.append(num // (2 * c))
        if roots:
            roots.sort(key=lambda y: (y < 0, abs(y)))
            return (x, roots[0])
    return None


def represented_values(Q, N):
    """Sorted array of the distinct values 0 < Q(x, y) <= N."""
    a, b, c = Q.triple()
    delta = -Q.disc
    ymax = math.isqrt(4 * a * N // delta)
    found = []
    for y in range(-ymax, ymax + 1):
        # a x^2 + b y x + (c y^2 - N) <= 0
        disc_x = b * b * y * y - 4 * a * (c * y * y - N)
        if disc_x < 0:
            continue
        s = math.isqrt(disc_x)
        x0 = -((b * y + s + 2 * a - 1) // (2 * a)) - 1
        x1 = (-b * y + s) // (2 * a) + 1
        xs = np.arange(x0, x1 + 1, dtype=np.int64)
        vals = a * xs * xs + b * xs * y + c * y * y
        found.append(vals[(vals > 0) & (vals <= N)])
    if not found:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(found))


def interval_bound(Q, N):
    return 1 + 4 * math.sqrt(2 * N) + 8 * N / math.sqrt(-Q.disc)


def count_represented_interval(Q, N):
    """(#{n in [sqrt N, N] represented by Q}, 1 + 4 sqrt(2N) + 8N/sqrt|disc|)."""
    if N < 1:
        raise DomainError("N must be positive")
    lo = math.isqrt(N)
    if lo * lo < N:
        lo += 1
    vals = represented_values(Q, N)
    count = int(np.count_nonzero(vals >= lo))
    return count, interval_bound(Q, N)
