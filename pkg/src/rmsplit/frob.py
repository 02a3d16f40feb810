"""Point counts, Frobenius data and split classification for genus 2 curves y^2 = f(x).

For a prime p of good reduction the Frobenius characteristic polynomial is
x^4 + a1 x^3 + a2 x^2 + p a1 x + p^2, recovered from #C(F_p) and #C(F_p^2).
Counting is naive (O(p^2) for the quadratic extension) but vectorized.
"""
import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
from sympy import Poly, discriminant, factorint, isprime, primerange
from sympy.abc import x as _x

from .errors import BadPrimeError, ConsistencyError, DomainError, RegistryError


@dataclass(frozen=True)
class Genus2Curve:
    f: tuple
    label: str = None

    def __post_init__(self):
        f = tuple(int(c) for c in self.f)
        while f and f[-1] == 0:
            f = f[:-1]
        object.__setattr__(self, "f", f)
        if len(f) - 1 not in (5, 6):
            raise DomainError(f"f must have degree 5 or 6, got {len(f) - 1}")
        if self.disc == 0:
            raise DomainError("f is not squarefree")

    @property
    def degree(self):
        return len(self.f) - 1

    @property
    def disc(self):
        return _disc(self.f)

    def is_good(self, p):
        return p % 2 == 1 and self.disc % p != 0 and self.f[-1] % p != 0

    def twist(self, c):
        """The quadratic twist y^2 = c f(x)."""
        return Genus2Curve(tuple(c * a for a in self.f), None)


@lru_cache(maxsize=None)
def _disc(f):
    return int(discriminant(Poly(list(reversed(f)), _x)))


# counting ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _square_table(p):
    t = np.zeros(p, dtype=bool)
    t[(np.arange(p, dtype=np.int64) ** 2) % p] = True
    return t


def _chi(values, p):
    """Quadratic character of F_p on an int array of residues."""
    sq = _square_table(p)[values]
    return np.where(values == 0, 0, np.where(sq, 1, -1))


def _nonresidue(p):
    sq = _square_table(p)
    return int(np.nonzero(~sq)[0][0])


def count_fp(f, p):
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(f):
        acc = (acc * xs + c) % p
    affine = p + int(_chi(acc, p).sum())
    if len(f) - 1 == 5:
        inf = 1
    else:
        inf = 2 if _square_table(p)[f[-1] % p] else 0
    return affine + inf


def _count_fp2_horner(f, p):
    # direct Horner evaluation over all of F_{p^2} = F_p[t]/(t^2 - n)
    n = _nonresidue(p)
    q = p * p
    idx = np.arange(q, dtype=np.int64)
    U, V = idx % p, idx // p
    au = np.zeros(q, dtype=np.int64)
    av = np.zeros(q, dtype=np.int64)
    for c in reversed(f):
        au, av = (au * U + n * av * V + c) % p, (au * V + av * U) % p
    nrm = (au * au - n * av * av) % p
    return q + int(_chi(nrm, p).sum()) + (1 if len(f) - 1 == 5 else 2)


def count_fp2(f, p):
    """#C(F_{p^2}) with F_{p^2} = F_p[t]/(t^2 - n), n a non-residue.

    For x = u + v t, f(u + v t) = sum_k g_k(u) (v t)^k with g_k the Taylor
    coefficients, so both coordinates of f(x) are sums of outer products.
    chi(f(x)) = chi_p(Nm f(x)) is invariant under v -> -v (Frobenius), so
    only v in [0, (p - 1)/2] is evaluated.
    """
    n = _nonresidue(p)
    deg = len(f) - 1
    us = np.arange(p, dtype=np.int64)
    # g_k(u) = sum_j f_j C(j, k) u^(j-k) mod p
    g = []
    for k in range(deg + 1):
        acc = np.zeros(p, dtype=np.int64)
        for j in range(deg, k - 1, -1):
            acc = (acc * us + f[j] * math.comb(j, k)) % p
        g.append(acc)
    h = (p - 1) // 2
    vs = np.arange(0, h + 1, dtype=np.int64)
    A = np.zeros((p, h + 1), dtype=np.int64)
    B = np.zeros((p, h + 1), dtype=np.int64)
    vk = np.ones(h + 1, dtype=np.int64)
    for k in range(deg + 1):
        coeff = (vk * pow(n, k // 2, p)) % p
        term = np.multiply.outer(g[k], coeff)
        if k % 2 == 0:
            A += term
        else:
            B += term
        vk = (vk * vs) % p
    A %= p
    B %= p
    chi = _chi((A * A - n * B * B) % p, p)
    total = int(chi[:, 0].sum()) + 2 * int(chi[:, 1:].sum())
    # leading coefficient lies in F_p, hence is a square in F_{p^2}
    return p * p + total + (1 if deg == 5 else 2)


def point_count(C, q):
    """#C(F_q) for q = p or p^2 with p an odd prime of good reduction."""
    if isprime(q):
        p, k = q, 1
    else:
        p = math.isqrt(q)
        if p * p != q or not isprime(p):
            raise DomainError(f"q = {q} must be p or p^2")
        k = 2
    if not C.is_good(p):
        raise BadPrimeError(f"p = {p} is bad for {C.f}")
    f = tuple(c % p for c in C.f)
    return count_fp(f, p) if k == 1 else count_fp2(f, p)


# Frobenius data ------------------------------------------------------------------

@dataclass(frozen=True)
class FrobeniusData:
    p: int
    a1: int
    a2: int

    def charpoly(self):
        """Coefficients of x^4 + a1 x^3 + a2 x^2 + p a1 x + p^2, leading first."""
        return (1, self.a1, self.a2, self.p * self.a1, self.p * self.p)

    def delta(self):
        return self.a1 * self.a1 - 4 * (self.a2 - 2 * self.p)

    def weil_ok(self, rtol=1e-6):
        p = self.p
        if self.a1 * self.a1 > 16 * p or abs(self.a2) > 6 * p:
            return False
        roots = np.roots(np.array(self.charpoly(), dtype=float))
        return bool(np.all(np.abs(np.abs(roots) / math.sqrt(p) - 1) < rtol))

    def counts(self):
        """(#C(F_p), #C(F_p^2)) implied by (a1, a2)."""
        p = self.p
        return p + 1 + self.a1, p * p + 1 - (self.a1 * self.a1 - 2 * self.a2)


def frobenius_data(C, p):
    n1 = point_count(C, p)
    n2 = point_count(C, p * p)
    a1 = n1 - (p + 1)
    twice = a1 * a1 - p * p - 1 + n2
    if twice % 2:
        raise ConsistencyError(f"odd power-sum combination at p = {p}")
    data = FrobeniusData(p, a1, twice // 2)
    if not data.weil_ok():
        raise ConsistencyError(f"Weil bounds violated at p = {p}: {data}")
    return data


# classification ------------------------------------------------------------------

class SplitKind(enum.Enum):
    BAD = "Bad"
    SPLIT_RATIONAL = "SplitRational"
    SPLIT_EQUAL = "SplitEqual"
    SUPERSINGULAR = "Supersingular"
    ORDINARY_NO_SPLIT = "Ordinary-NoSplitDetected"
    NONORDINARY_NO_SPLIT = "NonOrdinary-NoSplitDetected"


GEOMETRIC_CAVEAT = ("base-field evidence only: a quartic irreducible over Q may still "
                    "split over an extension")


@dataclass(frozen=True)
class SplitClass:
    kind: SplitKind
    s1: float = float("nan")
    s2: float = float("nan")
    alpha: int = None
    beta: int = None
    ordinary: bool = False
    supersingular: bool = False
    rm_consistent: bool = False
    caveat: str = GEOMETRIC_CAVEAT

    @property
    def is_split(self):
        return self.kind in (SplitKind.SPLIT_RATIONAL, SplitKind.SPLIT_EQUAL)


def _squarefree_part(n):
    out = 1
    for q, e in factorint(n).items():
        if e % 2:
            out *= q
    return out


def split_classify(data, D):
    p, a1, a2 = data.p, data.a1, data.a2
    delta = data.delta()
    if delta < 0:
        raise ConsistencyError(f"negative discriminant {delta} at p = {p}")
    r = math.isqrt(delta)
    is_sq = r * r == delta
    sp = math.sqrt(p)
    root = math.sqrt(delta)
    s1 = (-a1 - root) / (2 * sp)
    s2 = (-a1 + root) / (2 * sp)
    ordinary = a2 % p != 0
    supersingular = a1 % p == 0 and a2 % p == 0
    d = _squarefree_part(D) if D else 0
    rm = is_sq or (d > 0 and math.isqrt(delta * d) ** 2 == delta * d)
    alpha = beta = None
    if delta == 0:
        kind = SplitKind.SPLIT_EQUAL
        alpha = beta = -a1 // 2
    elif is_sq:
        kind = SplitKind.SPLIT_RATIONAL
        alpha, beta = (-a1 - r) // 2, (-a1 + r) // 2
    elif supersingular:
        kind = SplitKind.SUPERSINGULAR
    elif ordinary:
        kind = SplitKind.ORDINARY_NO_SPLIT
    else:
        kind = SplitKind.NONORDINARY_NO_SPLIT
    return SplitClass(kind, s1, s2, alpha, beta, ordinary, supersingular, rm)


# Sato-Tate statistics -------------------------------------------------------------

def semicircle_cdf(s):
    s = np.clip(s, -2, 2)
    return 0.5 + np.arcsin(s / 2) / np.pi + s * np.sqrt(4 - s * s) / (4 * np.pi)


def st_density(s1, s2):
    """Normalized product-semicircle density 1/(4 pi^2) sqrt(4 - s1^2) sqrt(4 - s2^2)."""
    return np.sqrt(np.clip(4 - s1 * s1, 0, None)) * np.sqrt(np.clip(4 - s2 * s2, 0, None)) / (4 * np.pi ** 2)


def st_bin_masses(bins=20, ordered=False):
    """Bin masses of the product density; ordered=True folds onto s1 <= s2."""
    edges = np.linspace(-2, 2, bins + 1)
    m = np.diff(semicircle_cdf(edges))
    out = np.outer(m, m)
    if ordered:
        out = np.triu(2 * out, 1) + np.diag(m * m)
    return out


@dataclass
class ScanSummary:
    X: int
    records: list = field(default_factory=list)   # (p, FrobeniusData, SplitClass)
    bad_primes: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    sum_inv_sqrt: float = 0.0
    histogram: np.ndarray = None
    edges: np.ndarray = None
    near_diagonal: int = 0
    near_diagonal_exact: bool = True

    def split_count(self):
        return sum(1 for _, _, c in self.records if c.is_split)


def sato_tate_scan(C, D, X, bins=20, xmin=3):
    """Frobenius data and classes for all odd primes in [xmin, X]; bad primes are listed."""
    if X < 3:
        raise DomainError("X must be >= 3")
    summary = ScanSummary(X)
    s1s, s2s = [], []
    total = 0.0
    for p in primerange(max(3, int(xmin)), int(X) + 1):
        if not C.is_good(p):
            summary.bad_primes.append(p)
            continue
        data = frobenius_data(C, p)
        cls = split_classify(data, D)
        summary.records.append((p, data, cls))
        summary.counts[cls.kind.value] = summary.counts.get(cls.kind.value, 0) + 1
        total += 1 / math.sqrt(p)
        s1s.append(cls.s1)
        s2s.append(cls.s2)
        if abs(cls.s1 - cls.s2) < 1 / math.sqrt(p):
            summary.near_diagonal += 1
            if data.delta() != 0:
                summary.near_diagonal_exact = False
    summary.sum_inv_sqrt = total
    edges = np.linspace(-2, 2, bins + 1)
    summary.histogram, _, _ = np.histogram2d(s1s, s2s, bins=[edges, edges])
    summary.edges = edges
    return summary


# registry -------------------------------------------------------------------------

@dataclass(frozen=True)
class RegistryEntry:
    label: str
    curve: Genus2Curve
    D: int
    note: str


def parse_registry(text):
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [s.strip() for s in line.split(",", 3)]
        if len(parts) != 4:
            raise RegistryError(f"line {lineno}: expected 4 comma-separated fields")
        label, coeffs, D, note = parts
        try:
            f = tuple(int(c) for c in coeffs.split())
            curve = Genus2Curve(f, label)
            D = int(D)
        except (ValueError, DomainError) as e:
            raise RegistryError(f"line {lineno}: {e}") from e
        entries[label] = RegistryEntry(label, curve, D, note)
    return entries


def load_registry(path=None):
    if path is None:
        text = resources.files("rmsplit").joinpath("data/curves.txt").read_text()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as e:
            raise RegistryError(str(e)) from e
    return parse_registry(text)


def get_curve(label, path=None):
    reg = load_registry(path)
    if label not in reg:
        raise RegistryError(f"unknown curve label {label!r}")
    return reg[label]
