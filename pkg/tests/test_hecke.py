import math

import numpy as np
import pytest
import sympy

from rmsplit import hecke
from rmsplit.errors import (DegeneracyError, DomainError, NonConvergenceError, NotSpecialError,
                            NumericError, RealRootError)
from rmsplit.hecke import (MatrixGL2F, NearMiss, PointH2, cm_point, hecke_orbit,
                           hecke_orbit_matrices, moebius_act, proximity, reduce_fundamental,
                           special_point_form, transport)
from rmsplit.hzdiv import ComponentMatrix, enumerate_components
from rmsplit.numberfield import QuadraticField, fundamental_unit, split_generator
from rmsplit.qform import BinaryQF

F5 = QuadraticField.from_discriminant(5)
I = 1j


def random_point(rng, spread=2.0):
    return PointH2(complex(rng.uniform(-spread, spread), rng.uniform(0.2, 2.0)),
                   complex(rng.uniform(-spread, spread), rng.uniform(0.2, 2.0)))


def test_moebius_examples():
    z = PointH2(I, I)
    assert moebius_act(MatrixGL2F.identity(F5), z) == z
    w = moebius_act(MatrixGL2F(F5.one, F5.one, F5.zero, F5.one), z)
    assert w.distance(PointH2(1 + I, 1 + I)) < 1e-15


def test_moebius_errors():
    with pytest.raises(DomainError):
        moebius_act(MatrixGL2F(F5.sqrtD, F5.zero, F5.zero, F5.one), PointH2(I, I))
    with pytest.raises(NumericError):
        moebius_act(MatrixGL2F(F5.zero, -F5.one, F5.one, F5.zero), PointH2(1e-12j, I))
    with pytest.raises(DomainError):
        PointH2(1.0, I)


def test_group_action_law():
    rng = np.random.default_rng(0)
    lam = split_generator(F5, 11)
    reps = hecke.hecke_representatives(11, lam)
    for _ in range(100):
        g = hecke.random_gamma(F5, rng)
        h = hecke.random_gamma(F5, rng) @ reps[int(rng.integers(len(reps)))]
        z = random_point(rng)
        a = moebius_act(g @ h, z)
        b = moebius_act(g, moebius_act(h, z))
        assert a.distance(b) <= 1e-9 * max(1.0, abs(a.z1), abs(a.z2))


def test_gamma_membership():
    rng = np.random.default_rng(1)
    for D in (5, 8, 13):
        F = QuadraticField.from_discriminant(D)
        for _ in range(30):
            assert hecke.random_gamma(F, rng).in_gamma()
        assert hecke.inversion(F).in_gamma()
        assert not MatrixGL2F(F.one, F.zero, F.one, F.one).in_gamma()


# reduction ---------------------------------------------------------------------------

@pytest.mark.parametrize("D", [5, 8, 13])
def test_reduction_properties(D):
    F = QuadraticField.from_discriminant(D)
    rng = np.random.default_rng(D)
    for _ in range(100):
        z = random_point(rng, spread=5.0)
        zs, g = reduce_fundamental(z, F)
        assert g.in_gamma()
        assert moebius_act(g, z).distance(zs) < 1e-9
        assert zs.height() >= z.height() - z.eps
        again, _ = reduce_fundamental(zs, F)
        assert again.distance(zs) < 1e-9


def test_reduction_translation_recovered():
    rng = np.random.default_rng(4)
    for _ in range(20):
        zs, _ = reduce_fundamental(random_point(rng), F5)
        shifted = PointH2(zs.z1 + 3, zs.z2 + 3)
        back, _ = reduce_fundamental(shifted, F5)
        assert back.distance(zs) < 1e-9


def test_reduction_gamma_equivariant():
    rng = np.random.default_rng(6)
    for _ in range(40):
        zs, _ = reduce_fundamental(random_point(rng), F5)
        moved = moebius_act(hecke.random_gamma(F5, rng), zs)
        back, _ = reduce_fundamental(moved, F5)
        assert back.distance(zs) < 1e-8


def test_reduction_reduced_point_fixed():
    zs, _ = reduce_fundamental(PointH2(0.3 + 1.1j, -0.2 + 0.9j), F5)
    again, g = reduce_fundamental(zs, F5)
    assert again.distance(zs) < 1e-12
    assert g == MatrixGL2F.identity(F5)


def test_reduction_move_cap():
    with pytest.raises(NonConvergenceError):
        reduce_fundamental(PointH2(40 + 0.01j, -40 + 0.01j), F5, max_moves=2)


# Hecke orbits -------------------------------------------------------------------------

@pytest.mark.parametrize("p", [11, 19, 29, 31, 41])
def test_orbit_size_and_distinct(p):
    lam = split_generator(F5, p)
    orbit = hecke_orbit(PointH2(0.3 + 1.1j, -0.2 + 0.9j), p, lam)
    assert len(orbit) == p + 1
    for i in range(len(orbit)):
        for j in range(i):
            assert orbit[i].distance(orbit[j]) > 1e-8


def test_orbit_gamma_invariant():
    rng = np.random.default_rng(8)
    z = PointH2(0.3 + 1.1j, -0.2 + 0.9j)
    for p in (11, 19):
        lam = split_generator(F5, p)
        base = hecke_orbit(z, p, lam)
        for _ in range(3):
            moved = moebius_act(hecke.random_gamma(F5, rng), z)
            assert hecke.same_multiset(base, hecke_orbit(moved, p, lam))
        u = fundamental_unit(F5)
        assert hecke.same_multiset(base, hecke_orbit(z, p, lam * u * u))


def test_orbit_bad_lambda():
    with pytest.raises(DomainError):
        hecke_orbit(PointH2(I, I), 11, F5.sqrtD)
    with pytest.raises(DomainError):
        hecke_orbit(PointH2(I, I), 11, F5.integer(9, 1))


# proximity and transport ---------------------------------------------------------------

def test_proximity_examples():
    M = ComponentMatrix(5, 1, F5.sqrtD)
    assert proximity(PointH2(I, I), M) == pytest.approx(4)
    M = ComponentMatrix(0, 1, fundamental_unit(F5))   # det 1
    s1, s2 = fundamental_unit(F5).embeddings()
    z1 = 0.4 + 0.7j
    z = PointH2(z1, -(s1 * z1 + 1) / s2)
    assert proximity(z, M) < 1e-12


def test_transport_identity_and_det():
    M = ComponentMatrix(5, 2, F5.zero)
    assert transport(MatrixGL2F.identity(F5), M) == M
    lam = split_generator(F5, 11)
    rng = np.random.default_rng(3)
    for R in hecke.hecke_representatives(11, lam):
        U = R @ hecke.random_gamma(F5, rng)
        assert transport(U, M).det() == 11 * M.det()


def test_transport_matches_symbolic():
    s = sympy.sqrt(5)
    rng = np.random.default_rng(12)

    def sym(el):
        return (sympy.Rational(el.x) + sympy.Rational(el.y) * s) / 2

    def conj(expr):
        return expr.subs(s, -s)

    for _ in range(10):
        U = hecke.random_gamma(F5, rng)
        M = enumerate_components(10, F5, H=6)[int(rng.integers(20))]
        Us = sympy.Matrix([[sym(U.u11), sym(U.u12)], [sym(U.u21), sym(U.u22)]])
        Ms = sympy.Matrix([[M.a, sym(M.gamma)], [conj(sym(M.gamma)), M.b]])
        out = (Us.T * Ms * Us.applyfunc(conj)).applyfunc(sympy.simplify)
        T = transport(U, M)
        assert sympy.simplify(out[0, 0] - T.a) == 0
        assert sympy.simplify(out[1, 1] - T.b) == 0
        assert sympy.simplify(out[0, 1] - sym(T.gamma)) == 0


def test_transport_automorphy_identity():
    rng = np.random.default_rng(13)
    comps = enumerate_components(10, F5, H=10)
    lam = split_generator(F5, 19)
    reps = hecke.hecke_representatives(19, lam)
    worst = 0.0
    for _ in range(300):
        U = hecke.random_gamma(F5, rng) @ reps[int(rng.integers(len(reps)))]
        M = comps[int(rng.integers(len(comps)))]
        z = random_point(rng)
        j1, j2 = hecke.automorphy(U, z)
        lhs = M.evaluate(*moebius_act(U, z).as_tuple())
        rhs = transport(U, M).evaluate(z.z1, z.z2) / (j1 * j2)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    assert worst < 1e-9


def test_normalized_proximity_gamma_invariant():
    rng = np.random.default_rng(14)
    comps = enumerate_components(10, F5, H=10)
    for _ in range(200):
        U = hecke.random_gamma(F5, rng)
        M = comps[int(rng.integers(len(comps)))]
        z = random_point(rng)
        a = hecke.normalized_proximity(moebius_act(U, z), M)
        b = hecke.normalized_proximity(z, transport(U, M))
        assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_raw_proximity_differs_by_automorphy():
    # the unnormalized identity only holds up to |j1 j2|
    U = hecke.inversion(F5)
    M = ComponentMatrix(5, 2, F5.zero)
    z = PointH2(0.3 + 1.1j, -0.2 + 0.9j)
    j1, j2 = hecke.automorphy(U, z)
    a = proximity(moebius_act(U, z), M)
    b = proximity(z, transport(U, M))
    assert abs(a - b) > 1e-3
    assert a == pytest.approx(b / abs(j1 * j2), rel=1e-12)


def test_hecke_divisor_identity():
    u = fundamental_unit(F5)
    M = ComponentMatrix(0, 1, u)        # a component of T(1)
    s1, s2 = u.embeddings()
    rng = np.random.default_rng(17)
    for p in (11, 19):
        lam = split_generator(F5, p)
        comps = enumerate_components(p, F5, H=10 * p)
        a = np.array([float(C.a) for C in comps])
        b = np.array([float(C.b) for C in comps])
        g = np.array([C.gamma.embeddings() for C in comps])
        for _ in range(3):
            z1 = complex(rng.uniform(-1, 1), rng.uniform(0.3, 1.5))
            z = PointH2(z1, -(s1 * z1 + 1) / s2)
            best = min(np.abs(a * w.z1 * w.z2 + g[:, 0] * w.z1 + g[:, 1] * w.z2 + b).min()
                       for w in hecke_orbit(z, p, lam))
            assert best < 1e-6
        # the component through each orbit point is an explicit transport
        for w, U in hecke_orbit_matrices(z, p, lam):
            C = hecke.component_through_orbit_point(U, M)
            assert C.det() == p and C.in_lattice()
            assert proximity(w, C) < 1e-8 * max(1.0, C.height())


# CM points ---------------------------------------------------------------------------

def _planted():
    """Two special base points with analytically known lattice vectors of prime det/5."""
    out = []
    # at (i, i): (a, b, gamma) = (5k, 5k, c sqrt 5), det 5 (5k^2 + c^2)
    out.append((PointH2(I, I), lambda k, c: (5 * k, 5 * k, c), [(2, 3, 29), (1, 6, 41)]))
    # at (sqrt2 i, sqrt2 i): (5k, 10k, c sqrt 5), det 5 (10k^2 + c^2)
    r2 = math.sqrt(2) * I
    out.append((PointH2(r2, r2), lambda k, c: (5 * k, 10 * k, c), [(1, 1, 11), (1, 3, 19)]))
    return out


def _near_miss(M, p):
    return NearMiss.from_component(M, p, 5)


def test_cm_plant_and_recover():
    rng = np.random.default_rng(23)
    worst = 0.0
    n = 0
    while n < 50:
        base, vec, pairs = _planted()[n % 2]
        g = hecke.random_gamma(F5, rng)
        truth = moebius_act(g, base)
        ginv = g.inverse()
        nms = []
        for k, c, p in pairs:
            a, b, cc = vec(k, c)
            M = ComponentMatrix(a, b, F5.sqrtD * cc)
            nms.append(_near_miss(transport(ginv, M), p))
        # a perturbed observation is a near miss for both components
        tilt = PointH2(truth.z1 + 1e-10, truth.z2 - 1e-10j)
        for nm in nms:
            assert proximity(tilt, nm.component()) < 1e-6 * max(1.0, nm.component().height()) ** 2
        z, (A, B, C) = cm_point(*nms)
        worst = max(worst, z.distance(truth))
        for nm in nms:
            assert proximity(z, nm.component()) < 1e-8 * max(1.0, nm.component().height()) ** 2
        n += 1
    assert worst < 1e-6


def test_cm_errors():
    e = F5.sqrtD
    n1 = NearMiss(5, 10, e, 11, 5)
    n2 = NearMiss(5, 18, e, 19, 5)
    with pytest.raises(DegeneracyError):
        cm_point(n1, n2)
    with pytest.raises(DomainError):
        cm_point(n1, NearMiss(5, 10, e, 11, 5))
    with pytest.raises(DomainError):
        NearMiss(5, 10, e, 13, 5)
    # components of T(10) and T(15) meeting only off H^2: real roots of f
    m1 = NearMiss(-5, -3, F5.integer(-5, -1), 2, 5)
    m2 = NearMiss(-5, -4, F5.integer(5, -1), 3, 5)
    with pytest.raises(RealRootError):
        cm_point(m1, m2)


def test_special_point_form():
    form, content = special_point_form(PointH2(I, I), F5, H=10, with_content=True)
    assert form == BinaryQF(1, 0, 5) and content == 5
    assert form.disc < 0
    with pytest.raises(NotSpecialError):
        special_point_form(PointH2(0.3137 + 1.1j, -0.2271 + 0.9123j), F5, H=6)
    r2 = math.sqrt(2) * I
    form, content = special_point_form(PointH2(r2, r2), F5, H=12, with_content=True)
    assert form == BinaryQF(1, 0, 10) and content == 5
