"""Geometry on H^2 for Gamma = SL2(O_F + d^-1; d + O_F).

Gamma consists of (a, b; c, d) with a, d in O_F, b in the inverse different
d^-1 = (1/sqrt D) O_F, c in d = sqrt(D) O_F and determinant 1.  It acts on
H^2 by sigma_1 on the first factor and sigma_2 on the second.

Transport convention: for E(z; M) = a z1 z2 + gamma z1 + gamma' z2 + b,

    E(U z; M) = E(z; U^t M U') / (j1 j2),   j_i = c_i z_i + d_i,

so ``transport(U, M)`` returns U^t M U' (U' the Galois conjugate).
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _intmat
from .errors import (DegeneracyError, DomainError, InvariantViolationError, NonConvergenceError,
                     NotSpecialError, NumericError, RealRootError, ToleranceError)
from .hzdiv import DEFAULT_MODULUS, ComponentMatrix
from .numberfield import (FieldElement, QuadraticField, fundamental_unit,
                          integral_points_in_box)
from .qform import BinaryQF, reduce as reduce_form

DEFAULT_EPS = 1e-10


@dataclass(frozen=True)
class PointH2:
    z1: complex
    z2: complex
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        object.__setattr__(self, "z1", complex(self.z1))
        object.__setattr__(self, "z2", complex(self.z2))
        if not (self.z1.imag > 0 and self.z2.imag > 0):
            raise DomainError(f"({self.z1}, {self.z2}) is not in H^2")

    def height(self):
        return self.z1.imag * self.z2.imag

    def distance(self, other):
        return max(abs(self.z1 - other.z1), abs(self.z2 - other.z2))

    def as_tuple(self):
        return (self.z1, self.z2)


def field_of(el):
    return QuadraticField.from_discriminant(el.D)


@dataclass(frozen=True)
class MatrixGL2F:
    u11: FieldElement
    u12: FieldElement
    u21: FieldElement
    u22: FieldElement

    @classmethod
    def identity(cls, F):
        return cls(F.one, F.zero, F.zero, F.one)

    @classmethod
    def of(cls, F, u11, u12, u21, u22):
        def lift(v):
            return v if isinstance(v, FieldElement) else F.rational(v)
        return cls(lift(u11), lift(u12), lift(u21), lift(u22))

    def entries(self):
        return (self.u11, self.u12, self.u21, self.u22)

    def det(self):
        return self.u11 * self.u22 - self.u12 * self.u21

    def __matmul__(self, o):
        return MatrixGL2F(
            self.u11 * o.u11 + self.u12 * o.u21, self.u11 * o.u12 + self.u12 * o.u22,
            self.u21 * o.u11 + self.u22 * o.u21, self.u21 * o.u12 + self.u22 * o.u22)

    def adj(self):
        return MatrixGL2F(self.u22, -self.u12, -self.u21, self.u11)

    def inverse(self):
        d = self.det()
        return MatrixGL2F(*(e / d for e in self.adj().entries()))

    def conj(self):
        return MatrixGL2F(*(e.conj() for e in self.entries()))

    def transpose(self):
        return MatrixGL2F(self.u11, self.u21, self.u12, self.u22)

    def sigma(self):
        """Both real embeddings as 2x2 float arrays."""
        emb = [e.embeddings() for e in self.entries()]
        return tuple(np.array([[emb[0][i], emb[1][i]], [emb[2][i], emb[3][i]]]) for i in (0, 1))

    def in_gamma(self):
        sq = FieldElement(Fraction(0), Fraction(2), self.u11.D)
        return (self.u11.is_integral() and self.u22.is_integral()
                and (self.u12 * sq).is_integral() and (self.u21 / sq).is_integral()
                and self.det() == 1)


# exact sign of an embedding ------------------------------------------------------

def sigma_sign(el, i):
    """Sign of sigma_i(el) decided exactly."""
    x, y = el.x, (el.y if i == 1 else -el.y)
    if x >= 0 and y >= 0:
        return 0 if (x == 0 and y == 0) else 1
    if x <= 0 and y <= 0:
        return -1
    return (1 if x > 0 else -1) if x * x > el.D * y * y else (1 if y > 0 else -1)


# action ----------------------------------------------------------------------------

def _act_float(s, z, eps):
    (a, b), (c, d) = s
    den = c * z + d
    if abs(den) < eps:
        raise NumericError("vanishing denominator in Moebius action")
    return (a * z + b) / den


def moebius_act(g, z):
    d = g.det()
    if sigma_sign(d, 1) <= 0 or sigma_sign(d, 2) <= 0:
        raise DomainError("determinant must be totally positive")
    s1, s2 = g.sigma()
    return PointH2(_act_float(s1, z.z1, z.eps), _act_float(s2, z.z2, z.eps), z.eps)


def automorphy(g, z):
    """(j1, j2) = (c_i z_i + d_i)."""
    s1, s2 = g.sigma()
    return s1[1, 0] * z.z1 + s1[1, 1], s2[1, 0] * z.z2 + s2[1, 1]


# named elements of Gamma --------------------------------------------------------------

def translation(F, t):
    return MatrixGL2F(F.one, t, F.zero, F.one)


def lower(F, c):
    return MatrixGL2F(F.one, F.zero, c, F.one)


def unit_scaling(F, k):
    e = fundamental_unit(F) ** k
    return MatrixGL2F(e, F.zero, F.zero, e.inverse())


def inversion(F):
    """(0, -1/sqrt D; sqrt D, 0), acting by z -> -1/(D z) on both factors."""
    s = F.sqrtD
    return MatrixGL2F(F.zero, -s.inverse(), s, F.zero)


def inverse_different_basis(F):
    """Z-basis (1/sqrt D, omega/sqrt D) of d^-1."""
    s = F.sqrtD.inverse()
    return s, F.omega * s


def random_gamma(F, rng, length=4, size=3):
    """A random word in translations, lower translations, unit scalings and the inversion."""
    e1, e2 = inverse_different_basis(F)
    g = MatrixGL2F.identity(F)
    for _ in range(length):
        kind = rng.integers(4)
        if kind == 0:
            t = e1 * int(rng.integers(-size, size + 1)) + e2 * int(rng.integers(-size, size + 1))
            g = translation(F, t) @ g
        elif kind == 1:
            c = F.sqrtD * F.from_basis(int(rng.integers(-1, 2)), int(rng.integers(-1, 2)))
            g = lower(F, c) @ g
        elif kind == 2:
            g = unit_scaling(F, int(rng.integers(-1, 2))) @ g
        else:
            g = inversion(F) @ g
    return g


# fundamental domain reduction ------------------------------------------------------------

class _Reducer:
    def __init__(self, F, tol=1e-12):
        self.F = F
        self.tol = tol
        self.D = F.D
        eps = fundamental_unit(F)
        self.eps = eps
        self.eps1 = eps.sigma1
        self.log_step = 4 * math.log(self.eps1)
        # reduced basis of the embedded inverse different
        b1, b2 = inverse_different_basis(F)
        v1, v2 = np.array(b1.embeddings()), np.array(b2.embeddings())
        while True:
            if v1 @ v1 > v2 @ v2:
                v1, v2, b1, b2 = v2, v1, b2, b1
            k = round((v1 @ v2) / (v1 @ v1))
            if k == 0:
                break
            v2 = v2 - k * v1
            b2 = b2 - b1 * k
        self.tbasis = (b1, b2)
        self.tmat = np.array([v1, v2]).T
        self.S = inversion(F)

    def translate(self, z):
        x = np.array([z[0].real, z[1].real])
        c = np.linalg.solve(self.tmat, x)
        n = np.floor(c + 0.5).astype(int)
        if not n.any():
            return None
        return translation(self.F, -(self.tbasis[0] * int(n[0]) + self.tbasis[1] * int(n[1])))

    def balance(self, z):
        rho = math.log(z[0].imag / z[1].imag)
        k = -math.floor(rho / self.log_step + 0.5)
        if k == 0:
            return None
        return unit_scaling(self.F, k)

    def search(self, z):
        """An element of Gamma raising y1 y2, from an exhaustive bottom-row search."""
        D, F = self.D, self.F
        (x1, y1), (x2, y2) = (z[0].real, z[0].imag), (z[1].real, z[1].imag)
        rD = math.sqrt(D)
        s = math.sqrt(self.eps1)
        B1, B2 = s / (rD * y1), s / (rD * y2)
        cx, cy = integral_points_in_box(D, -B1, B1, -B2, B2)
        found = []
        for X, Y in zip(cx.tolist(), cy.tolist()):
            if X == 0 and Y == 0:
                continue
            cp = F.integer(X, Y)
            c1, c2 = cp.embeddings()
            c1, c2 = c1 * rD, -c2 * rD
            r1 = s * s - (c1 * y1) ** 2
            r2 = s * s - (c2 * y2) ** 2
            if r1 <= 0 or r2 <= 0:
                continue
            r1, r2 = math.sqrt(r1), math.sqrt(r2)
            dx, dy = integral_points_in_box(D, -c1 * x1 - r1, -c1 * x1 + r1,
                                            -c2 * x2 - r2, -c2 * x2 + r2)
            if not dx.size:
                continue
            d1 = (dx + dy * rD) / 2
            d2 = (dx - dy * rD) / 2
            nrm = np.abs((c1 * z[0] + d1) * (c2 * z[1] + d2))
            for k in np.nonzero(nrm < 1 - self.tol)[0]:
                found.append((float(nrm[k]), X, Y, int(dx[k]), int(dy[k])))
        found.sort()
        for _, X, Y, dxk, dyk in found:
            g = self._complete(F.integer(X, Y), F.integer(dxk, dyk))
            if g is not None:
                return g
        return None

    def _complete(self, cp, d):
        # find a in O_F, b' in O_F with a d - b' c' = 1
        F = self.F
        w = F.omega
        cols = [d.coords(), (w * d).coords(), (-cp).coords(), (-(w * cp)).coords()]
        A = [[col[i] for col in cols] for i in range(2)]
        sol = _intmat.solve_integer(A, [1, 0])
        if sol is None:
            return None
        a = F.from_basis(sol[0], sol[1])
        bp = F.from_basis(sol[2], sol[3])
        sq = F.sqrtD
        g = MatrixGL2F(a, bp / sq, cp * sq, d)
        assert g.det() == 1
        return g


_reducers = {}


def _reducer(F):
    if F.D not in _reducers:
        _reducers[F.D] = _Reducer(F)
    return _reducers[F.D]


def reduce_fundamental(z, F, max_moves=10_000):
    """(z*, g) with z* = g z in a canonical fundamental region for Gamma.

    Greedy moves (unit balancing, translations by d^-1, the inversion) are
    followed by an exhaustive search for any element of Gamma raising the
    height y1 y2; the loop stops when none exists, so z* maximizes y1 y2 on
    its orbit.  The final point is normalized by units and translations.
    """
    R = _reducer(F)
    g = MatrixGL2F.identity(F)
    cur = (z.z1, z.z2)
    moves = 0

    def apply(h):
        nonlocal g, cur, moves
        s1, s2 = h.sigma()
        cur = (_act_float(s1, cur[0], z.eps), _act_float(s2, cur[1], z.eps))
        g = h @ g
        moves += 1
        if moves > max_moves:
            raise NonConvergenceError(f"reduction exceeded {max_moves} moves")

    while True:
        for step in (R.balance, R.translate):
            h = step(cur)
            if h is not None:
                apply(h)
        if R.D * abs(cur[0]) * abs(cur[1]) < 1 - R.tol:
            apply(R.S)
            continue
        h = R.search(cur)
        if h is None:
            break
        apply(h)
    return moebius_act(g, z), g


# Hecke orbits --------------------------------------------------------------------------

def hecke_representatives(p, lam):
    F = field_of(lam)
    reps = [MatrixGL2F(F.one, F.rational(j), F.zero, lam) for j in range(p)]
    reps.append(MatrixGL2F(lam, F.zero, F.zero, F.one))
    return reps


def _check_lambda(p, lam):
    if not lam.is_integral() or lam.norm() != p or not lam.totally_positive():
        raise DomainError(f"lambda = {lam} must be totally positive of norm {p}")


def hecke_orbit_matrices(z, p, lam):
    """[(w_j, U_j)] with w_j = U_j z reduced, U_j = g_j R_j, in representative order."""
    _check_lambda(p, lam)
    F = field_of(lam)
    out = []
    for R in hecke_representatives(p, lam):
        w, g = reduce_fundamental(moebius_act(R, z), F)
        out.append((w, g @ R))
    return out


def hecke_orbit(z, p, lam):
    """The p + 1 reduced points of T_p z, ordered j = 0, ..., p - 1, infinity."""
    return [w for w, _ in hecke_orbit_matrices(z, p, lam)]


def same_multiset(points_a, points_b, tol=1e-8):
    """Whether two point lists agree as multisets within tol."""
    if len(points_a) != len(points_b):
        return False
    left = list(points_b)
    for a in points_a:
        k = next((i for i, b in enumerate(left) if a.distance(b) < tol), None)
        if k is None:
            return False
        left.pop(k)
    return True


# divisor proximity and transport ------------------------------------------------------

def proximity(z, M):
    """|a z1 z2 + gamma z1 + gamma' z2 + b|."""
    return abs(M.evaluate(z.z1, z.z2))


def normalized_proximity(z, M):
    """|E(z; M)| / sqrt(y1 y2), invariant under transport by Gamma."""
    return proximity(z, M) / math.sqrt(z.height())


def _rational(v):
    if not v.is_rational():
        raise InvariantViolationError(f"diagonal entry {v} is not rational")
    q = v.x / 2
    return int(q) if q.denominator == 1 else q


def transport(U, M):
    """U^t M U' in exact arithmetic; det scales by Nm(det U)."""
    F = field_of(M.gamma)
    Mm = MatrixGL2F(F.rational(M.a), M.gamma, M.gamma.conj(), F.rational(M.b))
    N = U.transpose() @ Mm @ U.conj()
    if N.u21 != N.u12.conj():
        raise InvariantViolationError("transported matrix is not Galois-hermitian")
    return ComponentMatrix(_rational(N.u11), _rational(N.u22), N.u12)


def component_through_orbit_point(U, M):
    """Component of T(Nm(det U) det M) through U z when M passes through z."""
    return transport(U.adj(), M)


# CM points from two near-misses -----------------------------------------------------

@dataclass(frozen=True)
class NearMiss:
    m: int
    l: int
    eta: FieldElement
    p: int
    r: int
    normA: int = 1

    def __post_init__(self):
        if self.m * self.l - self.eta.norm() != self.p * self.r * self.normA:
            raise DomainError("near-miss must satisfy m l - Nm(eta) = p r normA")
        if self.m % (self.eta.D * self.normA):
            raise DomainError("m must be divisible by D normA")

    @classmethod
    def from_component(cls, M, p, r, normA=1):
        return cls(int(M.a), int(M.b), M.gamma, p, r, normA)

    def component(self):
        return ComponentMatrix(self.m, self.l, self.eta)


def cm_coefficients(n1, n2):
    """Exact (A, B, C) of f(z) = (eta1 z + l1)(eta2' + m2 z) - (eta2 z + l2)(eta1' + m1 z)."""
    e1, e2 = n1.eta, n2.eta
    A = e1 * n2.m - e2 * n1.m
    B = e1 * e2.conj() + n1.l * n2.m - e2 * e1.conj() - n2.l * n1.m
    C = e2.conj() * n1.l - e1.conj() * n2.l
    return A, B, C


def cm_point(n1, n2, eps=DEFAULT_EPS):
    """The intersection point of the two components, with the exact coefficients of f."""
    if n1.p == n2.p:
        raise DomainError("near-misses must come from distinct primes")
    A, B, C = cm_coefficients(n1, n2)
    if not A:
        raise DegeneracyError("leading coefficient eta1 m2 - eta2 m1 vanishes")
    disc = B * B - 4 * A * C
    if sigma_sign(disc, 1) >= 0:
        raise RealRootError("f has real roots")
    a, b, c = A.sigma1, B.sigma1, C.sigma1
    dv = disc.sigma1
    z1 = (-b + 1j * math.sqrt(-dv)) / (2 * a)
    if z1.imag <= 0:
        z1 = z1.conjugate()
    s1, s2 = n1.eta.embeddings()
    z2 = -(s1 * z1 + n1.l) / (s2 + n1.m * z1)
    if z2.imag <= 0:
        raise DomainError("intersection lies outside H x H")
    return PointH2(z1, z2, eps), (A, B, C)


def coincident(z, w, tol):
    """Numeric stand-in for the uniqueness statement: points within tol are merged."""
    return z.distance(w) < tol


# special points -------------------------------------------------------------------

def special_lattice(z, F, modulus=DEFAULT_MODULUS, H=10, tol=1e-8):
    """Z-basis (in L-coordinates) of {M in L : height <= H, |E(z; M)| < tol}."""
    D = F.D
    step = D * modulus.normA
    hint = int(math.floor(H))
    gx, gy = integral_points_in_box(D, -H, H, -H, H)
    g1 = (gx + gy * math.sqrt(D)) / 2
    g2 = (gx - gy * math.sqrt(D)) / 2
    ok = (np.abs(g1) <= H + 1e-12) & (np.abs(g2) <= H + 1e-12)
    gx, gy, g1, g2 = gx[ok], gy[ok], g1[ok], g2[ok]
    lin = g1 * z.z1 + g2 * z.z2
    vecs = []
    for a in range(-(hint // step) * step, hint + 1, step):
        for b in range(-hint, hint + 1):
            E = a * z.z1 * z.z2 + lin + b
            for k in np.nonzero(np.abs(E) < tol)[0]:
                if a == 0 and b == 0 and gx[k] == 0 and gy[k] == 0:
                    continue
                gam = F.integer(int(gx[k]), int(gy[k]))
                vecs.append(ComponentMatrix(a, b, gam).coords(modulus))
    return _intmat.span_basis(vecs) if vecs else []


def _det_form(F, modulus, v):
    return ComponentMatrix.from_coords(F, v, modulus).det()


def special_point_form(z, F, modulus=DEFAULT_MODULUS, H=10, tol=1e-8, with_content=False):
    """Reduced primitive binary form of det restricted to the special lattice at z."""
    basis = special_lattice(z, F, modulus, H, tol)
    if len(basis) < 2:
        raise NotSpecialError(f"solution lattice has rank {len(basis)} < 2")
    if len(basis) > 2:
        raise ToleranceError(f"solution lattice has rank {len(basis)} > 2")
    v1, v2 = basis
    q1 = _det_form(F, modulus, v1)
    q2 = _det_form(F, modulus, v2)
    q12 = _det_form(F, modulus, [x + y for x, y in zip(v1, v2)]) - q1 - q2
    content = math.gcd(q1, q12, q2)
    if q1 < 0:
        content = -content
    form = reduce_form(BinaryQF(q1 // content, q12 // content, q2 // content))
    return (form, content) if with_content else form
