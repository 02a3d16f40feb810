"""Positive definite quadratic lattices of rank <= 4 and the filtration model.

Vectors are integer coefficient vectors in the lattice basis and
Q(v) = v^t G v with G the Gram matrix.  Successive minima are lengths
sqrt(Q).  Counting and enumeration use a level-wise Fincke-Pohst search
whose outer levels run in floating point with padding (a superset) and
whose innermost level is exact integer arithmetic, so results are exact.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _intmat
from .errors import DomainError, NumericError

MAX_RANK = 4
CHUNK = 1 << 18


def schmidt_constant(m):
    return 8 ** m


class QuadLattice:
    def __init__(self, gram, basis=None):
        G = [[Fraction(x) for x in row] for row in gram]
        m = len(G)
        if any(len(row) != m for row in G):
            raise DomainError("Gram matrix must be square")
        if m > MAX_RANK:
            raise DomainError(f"rank {m} exceeds {MAX_RANK}")
        for i in range(m):
            for j in range(i):
                if G[i][j] != G[j][i]:
                    raise DomainError("Gram matrix must be symmetric")
        for k in range(1, m + 1):
            if _intmat.det([row[:k] for row in G[:k]]) <= 0:
                raise DomainError("Gram matrix is not positive definite")
        self.gram = tuple(tuple(row) for row in G)
        self.basis = None if basis is None else [list(map(int, b)) for b in basis]
        self._reduced = None   # cached (LLL Gram, transform)

    @property
    def rank(self):
        return len(self.gram)

    def Q(self, v):
        m = self.rank
        return sum(self.gram[i][j] * v[i] * v[j] for i in range(m) for j in range(m))

    def det(self):
        return _intmat.det(self.gram) if self.rank else 1

    def int_gram(self):
        """(G_int, scale) with G_int = scale * G integral."""
        scale = 1
        for row in self.gram:
            for x in row:
                scale = scale * x.denominator // math.gcd(scale, x.denominator)
        return [[int(x * scale) for x in row] for row in self.gram], scale

    def __repr__(self):
        rows = [[str(x) for x in row] for row in self.gram]
        return f"QuadLattice({rows})"


def lll_reduce(G, delta=Fraction(3, 4)):
    """LLL on a Gram matrix, exactly.  Returns (G', T) with G' = T G T^t."""
    n = len(G)
    G0 = [[Fraction(x) for x in row] for row in G]
    # plain ints are much faster than Fractions when G is integral
    G0 = [[int(x) if x.denominator == 1 else x for x in row] for row in G0]
    T = [[int(i == j) for j in range(n)] for i in range(n)]

    def gram():
        TG = [[sum(T[i][a] * G0[a][b] for a in range(n)) for b in range(n)] for i in range(n)]
        return [[sum(TG[i][b] * T[j][b] for b in range(n)) for j in range(n)] for i in range(n)]

    def gso(Gc):
        mu = [[Fraction(0)] * n for _ in range(n)]
        B = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = Gc[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))
                mu[i][j] = s / B[j]
            B[i] = Gc[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
        return mu, B

    k = 1
    while k < n:
        mu, B = gso(gram())
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                T[k] = [x - q * y for x, y in zip(T[k], T[j])]
                mu, B = gso(gram())
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            T[k], T[k - 1] = T[k - 1], T[k]
            k = max(k - 1, 1)
    return gram(), T


def _cholesky_q(G):
    m = len(G)
    q = np.array(G, dtype=float)
    for i in range(m):
        for j in range(i + 1, m):
            q[j, i] = q[i, j]
            q[i, j] = q[i, j] / q[i, i]
        for k in range(i + 1, m):
            for l in range(k, m):
                q[k, l] -= q[k, i] * q[i, l]
    return q


def _isqrt_array(a):
    s = np.floor(np.sqrt(a.astype(float))).astype(np.int64)
    for _ in range(3):
        s = np.where(s * s > a, s - 1, s)
        s = np.where((s + 1) * (s + 1) <= a, s + 1, s)
    return s


def _walk(G, N, collect):
    """Fincke-Pohst over integral G; yields per-chunk (count) or vectors."""
    m = len(G)
    Gi = np.array(G, dtype=np.int64)
    A = int(Gi[0, 0])
    b = Gi[0, 1:]
    Grest = Gi[1:, 1:]
    q = _cholesky_q(G)
    # on an LLL-reduced Gram the exact inner step stays below A * N * 4^m
    if A * max(N, 1) * 4 ** m >= 2 ** 62:
        raise NumericError("enumeration bound too large for int64 arithmetic")

    def inner(V):
        # V: rows of (v_1, ..., v_{m-1}); count/enumerate v_0 exactly
        Bh = V @ b
        C = np.einsum("ij,jk,ik->i", V, Grest, V)
        disc = Bh * Bh - A * (C - N)
        ok = disc >= 0
        V, Bh, disc = V[ok], Bh[ok], disc[ok]
        s = _isqrt_array(disc)
        xmax = (-Bh + s) // A
        xmin = -((Bh + s) // A)
        cnt = np.maximum(xmax - xmin + 1, 0)
        if not collect:
            return int(cnt.sum())
        rows = np.repeat(np.arange(len(V)), cnt)
        offs = np.arange(int(cnt.sum())) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        x0 = np.repeat(xmin, cnt) + offs
        return np.column_stack([x0, V[rows]])

    def level(i, V, R):
        if i == 0:
            yield inner(V)
            return
        c = -(V @ q[i, i + 1:]) if V.shape[1] else np.zeros(len(V))
        w = np.sqrt(np.maximum(R, 0) / q[i, i]) * (1 + 1e-9) + 1e-9
        lo = np.ceil(c - w).astype(np.int64)
        hi = np.floor(c + w).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return
        rows = np.repeat(np.arange(len(V)), cnt)
        offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        vi = np.repeat(lo, cnt) + offs
        newV = np.column_stack([vi, V[rows]])
        newR = R[rows] - q[i, i] * (vi - c[rows]) ** 2
        for s in range(0, total, CHUNK):
            yield from level(i - 1, newV[s:s + CHUNK], newR[s:s + CHUNK])

    if m == 1:
        xm = math.isqrt(N // A)
        if collect:
            yield np.arange(-xm, xm + 1, dtype=np.int64).reshape(-1, 1)
        else:
            yield 2 * xm + 1
        return
    yield from level(m - 1, np.zeros((1, 0), dtype=np.int64), np.array([float(N)]))


def _prepared(L, N):
    G, scale = L.int_gram()
    Nint = math.floor(Fraction(N) * scale)
    if L._reduced is None:
        Gr, T = lll_reduce(G)
        L._reduced = ([[int(x) for x in row] for row in Gr], np.array(T, dtype=np.int64))
    return L._reduced[0], Nint, L._reduced[1]


def short_vectors(L, N):
    """All integer vectors v (rows, in L's basis) with Q(v) <= N, zero included."""
    m = L.rank
    if N < 0:
        return np.zeros((0, m), dtype=np.int64)
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    Gr, Nint, T = _prepared(L, N)
    parts = list(_walk(Gr, Nint, collect=True))
    V = np.concatenate(parts) if parts else np.zeros((0, m), dtype=np.int64)
    return V @ T


def _count(L, N):
    if N < 0:
        return 0
    if L.rank == 0:
        return 1
    Gr, Nint, _ = _prepared(L, N)
    return sum(_walk(Gr, Nint, collect=False))


def successive_minima_sq(L):
    """Exact squared successive minima (Q-values), ascending."""
    m = L.rank
    if m == 0:
        return ()
    Gr, T = lll_reduce(L.gram)
    R = max(Gr[i][i] for i in range(m))
    V = short_vectors(L, R)
    G = np.array(L.int_gram()[0], dtype=object)
    scale = L.int_gram()[1]
    vals = np.einsum("ij,jk,ik->i", V.astype(object), G, V.astype(object))
    order = sorted(range(len(V)), key=lambda i: (vals[i], tuple(V[i])))
    basis = []
    minima = []
    for i in order:
        if vals[i] == 0:
            continue
        cand = basis + [list(map(int, V[i]))]
        if len(_intmat.span_basis(cand)) > len(basis):
            basis.append(list(map(int, V[i])))
            minima.append(Fraction(int(vals[i]), scale))
            if len(basis) == m:
                break
    return tuple(int(x) if x.denominator == 1 else x for x in minima)


def successive_minima(L):
    """Successive minima as lengths sqrt(Q)."""
    return tuple(math.sqrt(x) for x in successive_minima_sq(L))


def schmidt_bound(L, N, minima=None):
    m = L.rank
    mu = successive_minima(L) if minima is None else minima
    total, prod = 0.0, 1.0
    for j in range(m + 1):
        if j:
            prod *= mu[j - 1]
        total += N ** (j / 2) / prod
    return schmidt_constant(m) * total


def count_short(L, N):
    """(#{v : Q(v) <= N} including zero, Schmidt-type upper bound)."""
    return _count(L, N), schmidt_bound(L, N)


def represents_value(L, value):
    """Whether some v in L has Q(v) == value exactly."""
    # Q takes values in (1/scale) Z, so compare counts just below and at value
    _, scale = L.int_gram()
    value = Fraction(value)
    if (value * scale).denominator != 1:
        return False
    return _count(L, value) > _count(L, value - Fraction(1, scale))


# filtration model ----------------------------------------------------------

def _minors2(rows):
    a, b = rows
    return [a[i] * b[j] - a[j] * b[i] for i in range(len(a)) for j in range(i + 1, len(a))]


def _saturation_split(rows, m):
    # rows = H_r * (first r rows of W) with W unimodular; returns (|det H_r|, W)
    H, U, pivots = _intmat.column_echelon(rows)
    r = len(pivots)
    Hr = [row[:r] for row in H]
    W = [[int(x) for x in row] for row in _intmat.inverse(U)]
    if r < len(rows):
        return 0, r, W      # dependent rows: no finite index
    return abs(_intmat.det(Hr)) if r else 1, r, W


def is_primitive(rows, m):
    """Whether the integer rows are independent and span a saturated sublattice of Z^m."""
    rows = [list(map(int, r)) for r in rows]
    if not rows:
        return True
    index, r, _ = _saturation_split(rows, m)
    return r == len(rows) and index == 1


def complement_basis(rows, m):
    """Rows completing a primitive sublattice basis to a basis of Z^m."""
    if not rows:
        return [[int(i == j) for j in range(m)] for i in range(m)]
    _, r, W = _saturation_split([list(map(int, x)) for x in rows], m)
    return W[r:]


@dataclass
class FiltrationModel:
    M: QuadLattice
    Lambda: list = field(default_factory=list)
    ell: int = 2
    e_v: int = 1
    n0: int = 1

    def __post_init__(self):
        m = self.M.rank
        self.Lambda = [list(map(int, r)) for r in self.Lambda]
        if len(self.Lambda) > 2:
            raise DomainError("Lambda must have rank <= 2")
        if any(len(r) != m for r in self.Lambda):
            raise DomainError("Lambda rows must have length rank(M)")
        if not is_primitive(self.Lambda, m):
            raise DomainError("Lambda must be primitive (co-torsion free) in M")
        if self.ell < 2 or self.e_v < 1 or self.n0 < 1:
            raise DomainError("need ell >= 2, e_v >= 1, n0 >= 1")

    @property
    def m(self):
        return self.M.rank

    @property
    def m_prime(self):
        return len(self.Lambda)

    def level(self, n):
        k, rem = divmod(n - self.n0, self.e_v)
        if rem or k < 0:
            raise DomainError(f"n = {n} is not of the form n0 + k e_v with k >= 0")
        return k


def sublattice(M, rows):
    """The sublattice of M spanned by integer rows (coords in M's basis)."""
    B = [list(map(int, r)) for r in rows]
    G = M.gram
    m = M.rank
    gram = [[sum(B[i][a] * G[a][b] * B[j][b] for a in range(m) for b in range(m))
             for j in range(len(B))] for i in range(len(B))]
    return QuadLattice(gram, basis=B)


def filtration_basis(model, n):
    k = model.level(n)
    m = model.m
    scaled = [[model.ell ** k * int(i == j) for j in range(m)] for i in range(m)]
    return _intmat.span_basis(model.Lambda + scaled)


def filtration_lattice(model, n):
    """Lambda + ell^k M for n = n0 + k e_v, with its basis in M-coordinates."""
    return sublattice(model.M, filtration_basis(model, n))


def index_in_M(model, n):
    return abs(_intmat.det(filtration_basis(model, n)))


def discriminant_ratio(model, n):
    """[M_n : M_{n+e_v}], the covolume ratio of consecutive levels."""
    return Fraction(index_in_M(model, n + model.e_v), index_in_M(model, n))


def scaled_containment(model, n):
    """ell * M_n is contained in M_{n+e_v}, checked exactly."""
    B = filtration_basis(model, n)
    Bn = filtration_basis(model, n + model.e_v)
    At = [[row[i] for row in Bn] for i in range(model.m)]
    return all(_intmat.solve_integer(At, [model.ell * x for x in v]) is not None for v in B)


def mu_step_check(model, n):
    """mu_i(M_{n+e_v}) <= ell * mu_i(M_n) for every i, on squares (exact)."""
    a = successive_minima_sq(filtration_lattice(model, n))
    b = successive_minima_sq(filtration_lattice(model, n + model.e_v))
    return all(y <= model.ell ** 2 * x for x, y in zip(a, b))


def minima_growth_check(model, n, j):
    """prod_{i<=j} mu_i(M_n) >= ell^-m ell^{(n-n0)(j-m')/e_v}, plus the step ratio."""
    m = model.m
    if not 1 <= j <= m:
        raise DomainError("need 1 <= j <= m")
    k = model.level(n)
    mu2 = successive_minima_sq(filtration_lattice(model, n))
    prod = Fraction(1)
    for x in mu2[:j]:
        prod *= x
    # squares of both sides
    rhs = Fraction(model.ell) ** (2 * (k * (j - model.m_prime) - m))
    growth_ok = prod >= rhs
    ratio_ok = discriminant_ratio(model, n) == model.ell ** (m - model.m_prime)
    return growth_ok and ratio_ok


def _projected_min_sq(model):
    # squared minimum of the projection of M orthogonal to Lambda
    m, mp = model.m, model.m_prime
    if mp == 0:
        return successive_minima_sq(model.M)[0]
    G = [[Fraction(x) for x in row] for row in model.M.gram]
    lam = model.Lambda
    LG = [[sum(lam[i][a] * G[a][b] for a in range(m)) for b in range(m)] for i in range(mp)]
    lam_gram = [[sum(LG[i][b] * lam[j][b] for b in range(m)) for j in range(mp)]
                for i in range(mp)]
    lam_inv = _intmat.inverse(lam_gram)
    P = [[G[a][b] - sum(LG[i][a] * lam_inv[i][j] * LG[j][b] for i in range(mp) for j in range(mp))
          for b in range(m)] for a in range(m)]
    # Lambda is primitive, so a complement C gives a basis of the projection
    C = complement_basis(lam, m)
    proj = [[sum(C[i][a] * P[a][b] * C[j][b] for a in range(m) for b in range(m))
             for j in range(len(C))] for i in range(len(C))]
    return successive_minima_sq(QuadLattice(proj))[0]


def rank_le1_constant(model):
    """c with #{Q <= N} <= c (N^1/2 + sum_{j>=2} N^{j/2} / ell^{(j-1)k}), for m' <= 1."""
    if model.m_prime > 1:
        raise DomainError("bound requires rank(Lambda) <= 1")
    m = model.m
    mu1 = math.sqrt(successive_minima_sq(model.M)[0])
    rho = math.sqrt(_projected_min_sq(model))
    K = max([1.0, 1 / mu1] + [1 / (mu1 * rho ** (j - 1)) for j in range(2, m + 1)])
    if model.m_prime == 0:
        K = max([1.0] + [1 / mu1 ** j for j in range(1, m + 1)])
    return 2 * schmidt_constant(m) * K


def rank_le1_bound(model, n, N):
    if N < 1:
        raise DomainError("N must be >= 1")
    k = model.level(n)
    m = model.m
    s = math.sqrt(N) + sum(N ** (j / 2) / model.ell ** ((j - 1) * k) for j in range(2, m + 1))
    return rank_le1_constant(model) * s


# confinement -------------------------------------------------------------------

def confinement_data(M, P):
    """(P', s, detP) for a primitive rank-2 P in M.

    P' = P^perp in M, s the least positive integer with s M in P + P', and
    detP the Gram determinant of P (so d^8 = detP^4 for the root
    discriminant d = sqrt(detP)).
    """
    m = M.rank
    P = [list(map(int, r)) for r in P]
    if len(P) != 2 or len(_intmat.span_basis(P)) != 2:
        raise DomainError("P must have rank 2")
    if not is_primitive(P, m):
        raise DomainError("P is not primitive in M")
    G, _ = M.int_gram()
    PG = [[sum(p[a] * G[a][b] for a in range(m)) for b in range(m)] for p in P]
    Pperp = _intmat.integer_kernel(PG)
    C = P + Pperp
    Cinv = _intmat.inverse(C)
    s = 1
    for row in Cinv:
        for x in row:
            s = s * x.denominator // math.gcd(s, x.denominator)
    detP = sublattice(M, P).det()
    return Pperp, s, detP


def confinement_threshold_met(M, P, k, ell, N):
    _, s, detP = confinement_data(M, P)
    return ell ** (2 * k) > s * s * Fraction(detP) ** 4 * Fraction(N)


def orthogonal_split_confinement(M, P, k, ell, N, Lambda=None):
    """Short vectors of Lambda + ell^k M lie in P once ell^{2k} > s^2 d^8 N.

    Lambda defaults to P.  Returns True when the threshold is not met
    (nothing to check) or when enumeration confirms confinement.
    """
    Pperp, s, detP = confinement_data(M, P)
    if not confinement_threshold_met(M, P, k, ell, N):
        return True
    m = M.rank
    lam = P if Lambda is None else [list(map(int, r)) for r in Lambda]
    scaled = [[ell ** k * int(i == j) for j in range(m)] for i in range(m)]
    B = _intmat.span_basis(lam + scaled)
    L = sublattice(M, B)
    V = short_vectors(L, N) @ np.array(B, dtype=np.int64)
    Pt = [[p[i] for p in P] for i in range(m)]
    return all(_intmat.solve_integer(Pt, list(map(int, v))) is not None for v in V)
