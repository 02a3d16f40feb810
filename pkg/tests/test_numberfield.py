import math

import pytest
from hypothesis import given, strategies as st
from sympy import primerange

import oracles
from rmsplit.errors import DomainError, InvalidElementError
from rmsplit.numberfield import (QuadraticField, SplittingType, element_arith, fundamental_unit,
                                 split_generator, splitting_type)

DISCS = (5, 8, 13)
F5 = QuadraticField.from_discriminant(5)


@st.composite
def elements(draw, D=None):
    D = D or draw(st.sampled_from(DISCS))
    F = QuadraticField.from_discriminant(D)
    x = draw(st.integers(-60, 60))
    y = draw(st.integers(-60, 60))
    if (x - y * D) % 2:
        x += 1
    return F.integer(x, y)


def test_field_from_discriminant():
    assert QuadraticField.from_discriminant(8).d == 2
    assert QuadraticField(3).D == 12
    for bad in (1, 4, 9, 12 * 4, 7):
        with pytest.raises(DomainError):
            QuadraticField.from_discriminant(bad)
    with pytest.raises(DomainError):
        QuadraticField(4)


def test_element_arith_examples():
    assert element_arith(F5.one) == (1, 2, F5.one, True)
    n, t, c, tp = element_arith(F5.integer(7, 1))
    assert (n, t, tp) == (11, 7, True)
    assert c == F5.integer(7, -1)
    n, t, _, tp = element_arith(F5.sqrtD)
    assert (n, t, tp) == (-5, 0, False)


def test_parity_violation():
    with pytest.raises(InvalidElementError):
        F5.integer(1, 0)
    with pytest.raises(InvalidElementError):
        element_arith(F5.element(1, 0))


@given(st.sampled_from(DISCS).flatmap(lambda D: st.tuples(elements(D), elements(D))))
def test_norm_trace_homomorphic(pair):
    x, y = pair
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x * x.conj() == x.norm()
    assert isinstance(x.norm(), int)


@given(elements())
def test_inverse_and_embeddings(x):
    if x == 0:
        return
    assert x * x.inverse() == 1
    s1, s2 = x.embeddings()
    assert math.isclose(s1 * s2, x.norm(), rel_tol=1e-9, abs_tol=1e-6)
    assert x.totally_positive() == (s1 > 0 and s2 > 0)


@pytest.mark.parametrize("D", DISCS)
def test_fundamental_unit_matches_oracle(D):
    F = QuadraticField.from_discriminant(D)
    u = fundamental_unit(F)
    assert (int(u.x), int(u.y)) == oracles.fundamental_unit_xy(D)
    assert abs(u.norm()) == 1


def test_fundamental_unit_examples():
    assert fundamental_unit(F5) == F5.integer(1, 1)
    F8 = QuadraticField.from_discriminant(8)
    assert fundamental_unit(F8) == F8.rational(1) + F8.element(0, 1)   # 1 + sqrt 2
    F13 = QuadraticField.from_discriminant(13)
    assert fundamental_unit(F13) == F13.integer(3, 1)
    assert fundamental_unit(F13).norm() == -1


@pytest.mark.parametrize("d", [d for d in range(2, 110) if all(d % (q * q) for q in range(2, 11))])
def test_fundamental_unit_many(d):
    F = QuadraticField(d)
    u = fundamental_unit(F)
    assert (int(u.x), int(u.y)) == oracles.fundamental_unit_xy(F.D)


def test_splitting_examples():
    assert splitting_type(F5, 11) is SplittingType.SPLIT
    assert splitting_type(F5, 2) is SplittingType.INERT
    assert splitting_type(F5, 5) is SplittingType.RAMIFIED
    with pytest.raises(DomainError):
        splitting_type(F5, 9)


@pytest.mark.parametrize("D", DISCS)
def test_splitting_matches_norm_form(D):
    # these fields have class number one, so p splits iff +-p is a norm
    F = QuadraticField.from_discriminant(D)
    for p in primerange(2, 200):
        norms = oracles.norms_in_box(D, 2 * p)
        if D % p == 0:
            expect = SplittingType.RAMIFIED
        elif p in norms or -p in norms:
            expect = SplittingType.SPLIT
        else:
            expect = SplittingType.INERT
        assert splitting_type(F, p) is expect, p


def test_split_generator_examples():
    assert split_generator(F5, 11) == F5.integer(7, 1)
    assert split_generator(F5, 19) == F5.integer(9, 1)
    assert split_generator(F5, 2) is None


@pytest.mark.parametrize("D", DISCS)
def test_split_generator_properties(D):
    F = QuadraticField.from_discriminant(D)
    u = fundamental_unit(F)
    e = u.sigma1
    for p in primerange(3, 400):
        lam = split_generator(F, p)
        if splitting_type(F, p) is SplittingType.INERT:
            assert lam is None
            continue
        if lam is None:
            continue
        assert lam.norm() == p and lam.totally_positive()
        for s in lam.embeddings():
            assert math.sqrt(p) / e ** 2 * (1 - 1e-12) <= s <= math.sqrt(p) * e ** 2 * (1 + 1e-12)
        shifted = lam * u * u
        assert shifted.norm() == p and shifted.totally_positive()


def test_split_generator_minimal_in_band():
    # brute-force: among all totally positive norm-p elements in a generous box,
    # the returned one has the least larger embedding
    for p in (11, 19, 29, 31, 41, 59, 61):
        lam = split_generator(F5, p)
        best = None
        for x in range(1, 4 * p):
            for y in range(-2 * p, 2 * p):
                if (x - 5 * y) % 2 or x * x - 5 * y * y != 4 * p:
                    continue
                el = F5.integer(x, y)
                if el.totally_positive():
                    key = max(el.embeddings())
                    if best is None or key < best[0] - 1e-12:
                        best = (key, el)
        assert math.isclose(max(lam.embeddings()), best[0], rel_tol=1e-12)
