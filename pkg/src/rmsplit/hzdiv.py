"""Hirzebruch-Zagier divisors T(r) on the Hilbert modular surface of F.

A component of T(r) is cut out by a lattice vector M = (a, gamma; gamma', b)
with a in D*normA*Z, b in Z, gamma in O_F and det M = ab - Nm(gamma) = r*normA.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import factorint, primerange

from .errors import DomainError, InvariantViolationError
from .numberfield import FieldElement, SplittingType, kronecker, splitting_type


@dataclass(frozen=True)
class PolarizationModulus:
    normA: int = 1

    def __post_init__(self):
        if self.normA < 1:
            raise DomainError("normA must be >= 1")


DEFAULT_MODULUS = PolarizationModulus()


@dataclass(frozen=True)
class ComponentMatrix:
    a: int
    b: int
    gamma: FieldElement

    @property
    def D(self):
        return self.gamma.D

    def det(self):
        return self.a * self.b - self.gamma.norm()

    def height(self):
        s1, s2 = self.gamma.embeddings()
        return max(abs(self.a), abs(self.b), abs(s1), abs(s2))

    def in_lattice(self, modulus=DEFAULT_MODULUS):
        """Exact membership in L."""
        for v in (self.a, self.b):
            if isinstance(v, Fraction) and v.denominator != 1:
                return False
        return int(self.a) % (self.D * modulus.normA) == 0 and self.gamma.is_integral()

    def coords(self, modulus=DEFAULT_MODULUS):
        """Integer coordinates (a/(D normA), b, g0, g1) of M in L."""
        g0, g1 = self.gamma.coords()
        return (int(self.a) // (self.D * modulus.normA), int(self.b), g0, g1)

    @classmethod
    def from_coords(cls, F, v, modulus=DEFAULT_MODULUS):
        return cls(v[0] * F.D * modulus.normA, v[1], F.from_basis(v[2], v[3]))

    def __neg__(self):
        return ComponentMatrix(-self.a, -self.b, -self.gamma)

    def evaluate(self, z1, z2):
        """a z1 z2 + sigma_1(gamma) z1 + sigma_2(gamma) z2 + b."""
        s1, s2 = self.gamma.embeddings()
        return self.a * z1 * z2 + s1 * z1 + s2 * z2 + self.b

    def sort_key(self):
        return (self.a, self.b, self.gamma.x, self.gamma.y)


@dataclass
class HZDivisor:
    r: int
    field: object
    modulus: PolarizationModulus = DEFAULT_MODULUS
    components: list = field(default_factory=list)

    def special_degree(self):
        # Q(s) = det(M)/D for the special endomorphism attached to a component
        return Fraction(self.r * self.modulus.normA, self.field.D)


def neg_norm_residues(D):
    """{-Nm(gamma) mod D : gamma in O_F}."""
    res = set()
    for g0 in range(D):
        for g1 in range(D):
            x, y = 2 * g0 + g1 * D, g1
            res.add((-(x * x - D * y * y) // 4) % D)
    return res


def hz_nonempty(r, F, modulus=DEFAULT_MODULUS):
    if r < 1:
        raise DomainError("r must be positive")
    return (r * modulus.normA) % F.D in neg_norm_residues(F.D)


def hz_is_compact(r, F):
    """True iff r is not the norm of an ideal of O_F."""
    if r == 0:
        raise DomainError("r must be nonzero")
    for q, e in factorint(abs(r)).items():
        if e % 2 and splitting_type(F, q) is SplittingType.INERT:
            return True
    return False


def _split_unit(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def hilbert_symbol(a, b, p):
    """Hilbert symbol (a, b)_p for nonzero integers; p = 0 means the real place."""
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol of zero")
    if p == 0:
        return -1 if (a < 0 and b < 0) else 1
    alpha, u = _split_unit(a, p)
    beta, v = _split_unit(b, p)
    if p == 2:
        def eps(t):
            return ((t - 1) // 2) % 2

        def omega(t):
            return ((t * t - 1) // 8) % 2

        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * kronecker(u, p) ** beta * kronecker(v, p) ** alpha


def quaternion_ramified_primes(D, minus_rNormA):
    """Finite primes where the quaternion algebra (D, minus_rNormA)_Q ramifies."""
    if D == 0 or minus_rNormA == 0:
        raise DomainError("entries must be nonzero")
    if hilbert_symbol(D, minus_rNormA, 0) == -1:
        raise InvariantViolationError("algebra is definite (ramified at infinity)")
    primes = {2} | set(factorint(abs(D))) | set(factorint(abs(minus_rNormA)))
    ram = {p for p in primes if hilbert_symbol(D, minus_rNormA, p) == -1}
    if len(ram) % 2:
        raise InvariantViolationError(f"odd number of ramified places: {sorted(ram)}")
    return ram


def _gamma_quadrant(D, H):
    # integral (x + y sqrt D)/2 with x, y >= 0 and both embeddings in [-H, H],
    # tested exactly; the full box is the orbit under x -> -x, y -> -y
    h2 = Fraction(H) * 2
    num, den = h2.numerator, h2.denominator
    xmax = num // den
    ymax = math.isqrt((num * num) // (den * den * D)) + 1
    X, Y = np.meshgrid(np.arange(0, xmax + 1, dtype=np.int64),
                       np.arange(0, ymax + 1, dtype=np.int64), indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    slack = num - den * X
    keep = ((X - Y * D) % 2 == 0) & (slack >= 0) & (D * Y * Y * den * den <= slack * slack)
    return X[keep], Y[keep]


def enumerate_components(r, F, modulus=DEFAULT_MODULUS, H=10, limit=None):
    """All M in L with det M = r normA and height <= H, sorted.

    With limit set, stops after that many components (used for witness
    searches, where any single component suffices).
    """
    if H < 0:
        raise DomainError("height bound must be nonnegative")
    D = F.D
    target = r * modulus.normA
    X, Y = _gamma_quadrant(D, H)
    norms = (X * X - D * Y * Y) // 4
    order = np.argsort(norms, kind="stable")
    sn, sx, sy = norms[order], X[order], Y[order]
    hint = int(math.floor(H))
    step = D * modulus.normA
    out = []

    def emit(a, b, lo, hi):
        for i in range(lo, hi):
            x, y = int(sx[i]), int(sy[i])
            for gx, gy in sorted({(x, y), (-x, y), (x, -y), (-x, -y)}):
                out.append(ComponentMatrix(int(a), int(b), F.integer(gx, gy)))

    As = np.arange(-(hint // step) * step, hint + 1, step, dtype=np.int64)
    Bs = np.arange(-hint, hint + 1, dtype=np.int64)
    if As.size and Bs.size:
        A, B = np.meshgrid(As, Bs, indexing="ij")
        A, B = A.ravel(), B.ravel()
        need = A * B - target
        lo = np.searchsorted(sn, need, side="left")
        hi = np.searchsorted(sn, need, side="right")
        for k in np.nonzero(hi > lo)[0]:
            emit(A[k], B[k], lo[k], hi[k])
            if limit is not None and len(out) >= limit:
                return out[:limit]
    out.sort(key=ComponentMatrix.sort_key)
    return out


def has_witness(r, F, modulus=DEFAULT_MODULUS, H=None):
    """Whether some component of T(r) has height <= H (default 10 r).

    Heights are tried in doubling steps so cheap witnesses are found early.
    """
    if H is None:
        H = 10 * r
    h = min(H, 8)
    while True:
        if enumerate_components(r, F, modulus, h, limit=1):
            return True
        if h >= H:
            return False
        h = min(2 * h, H)


def hz_divisor(r, F, modulus=DEFAULT_MODULUS, H=10):
    return HZDivisor(r, F, modulus, enumerate_components(r, F, modulus, H))


def compact_family(F, X):
    """Sorted {qD : q <= X prime and inert in F}."""
    return sorted(q * F.D for q in primerange(2, int(X) + 1)
                  if splitting_type(F, q) is SplittingType.INERT)
