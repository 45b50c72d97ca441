import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import PolyQuotient, minimal_polynomial_fp
from thetalift.errors import (
    ContextMismatch,
    EvenCharacteristic,
    NoRoot,
    NotIrreducible,
    NotPrime,
    SingularCurve,
    ZeroInverse,
)
from thetalift.finite_field import FqContext, fq_extend, hasse_witt_ordinary

from conftest import EX1_MODULUS


def test_context_construction(f9, f3_10):
    assert f9.q == 9 and f3_10.q == 3**10
    assert f3_10.modulus == tuple(EX1_MODULUS)


@pytest.mark.parametrize(
    "p, modulus, exc",
    [(3, [2, 0, 1], NotIrreducible), (4, [1, 1], NotPrime), (2, [1, 1, 1], EvenCharacteristic),
     (3, [1, 0, 2], NotIrreducible)],
)
def test_context_rejects(p, modulus, exc):
    with pytest.raises(exc):
        FqContext(p, modulus)


def test_f9_small_facts(f9):
    w = f9.gen
    assert w * w == f9(2)
    assert w.inverse() == 2 * w
    assert w.frobenius() == 2 * w
    assert f9(2).sqrt() == w


def test_zero_inverse_and_mismatch(f9, f27):
    with pytest.raises(ZeroInverse):
        f9.zero.inverse()
    with pytest.raises(ContextMismatch):
        f9.gen + f27.gen


def test_square_and_multiply_matches_split_exponent(f3_10):
    z = f3_10.gen
    assert z**9089 == z**4544 * z**4545
    # against a schoolbook quotient ring
    ring = PolyQuotient(EX1_MODULUS, 3)
    assert (z**37).c == ring.power((0, 1), 37)


def test_frobenius_is_cubing_in_f27(f27):
    t = f27.gen
    assert t.frobenius() == t * t * t
    for a in f27.elements():
        assert a.frobenius(f27.d) == a


def test_sqrt_on_all_of_f27(f27):
    minus_one = -f27.one
    for a in f27.elements():
        if a.is_zero():
            assert a.sqrt() == a
            continue
        euler = a ** ((f27.q - 1) // 2)
        if euler == minus_one:
            with pytest.raises(NoRoot):
                a.sqrt()
        else:
            r = a.sqrt()
            assert r * r == a
            assert r.c <= (-r).c


def test_sqrt_prime_field_nonresidue(f3):
    with pytest.raises(NoRoot):
        f3(2).sqrt()


def test_sqrt_of_square_takes_smaller_branch(f3_10):
    x = f3_10.gen**9089
    r = (x * x).sqrt()
    assert r in (x, -x)
    assert r.c == min(x.c, (-x).c)


def test_extension_identity(f9):
    big, emb = fq_extend(f9, 1)
    assert big == f9 and emb(f9.gen) == f9.gen


def test_extension_is_homomorphism(f3, f9):
    big, emb = fq_extend(f3, 2)
    assert emb(f3(2)) ** 2 == emb(f3(4)) == emb(f3(1))
    big, emb = fq_extend(f9, 3)
    for a in list(f9.elements()):
        for b in (f9.gen, f9(2) + f9.gen):
            assert emb(a * b) == emb(a) * emb(b)
            assert emb(a + b) == emb(a) + emb(b)
        assert emb(a.frobenius()) == emb(a).frobenius()


def _minpoly(elem):
    ctx = elem.ctx
    ring = PolyQuotient(list(ctx.modulus), ctx.p)
    return minimal_polynomial_fp(tuple(elem.c), ring.mul, ring.reduce([1]), ctx.p, ctx.d)


def test_embedding_preserves_minimal_polynomial(f3_10):
    a02 = f3_10.gen**9089
    big, emb = fq_extend(f3_10, 4)
    assert big.d == 40
    assert _minpoly(a02) == _minpoly(emb(a02))
    assert list(a02.minimal_polynomial()) == _minpoly(a02)


def test_embedding_preserves_minpolys_small(f27, rng):
    for ctx, e in ((f27, 2), (FqContext(3, [1, 0, 1]), 4), (FqContext(3, [2, 1, 0, 0, 1]), 3)):
        big, emb = fq_extend(ctx, e)
        assert big.d == ctx.d * e <= 12
        for _ in range(5):
            a = ctx.random_element(rng)
            assert _minpoly(a) == _minpoly(emb(a))


def test_preimage_recovers_subfield_elements(f27):
    big, emb = fq_extend(f27, 2)
    for a in f27.elements():
        assert emb.preimage(emb(a)) == a
    outside = next(b for b in big.elements() if emb.preimage(b) is None)
    assert outside.frobenius(f27.d) != outside


def test_parse_and_text_round_trip(f27, f3_10):
    for a in f27.elements():
        assert f27.parse(a.to_text()) == a
    assert f3_10.parse("z^5") == f3_10.gen**5
    with pytest.raises(ContextMismatch):
        f27.parse("3^2:[1,2]")


def test_ordinarity_examples(f3, f27):
    assert hasse_witt_ordinary([1, 1, 0, 1, 0, 1], f3)  # x^5 + x^3 + x + 1
    assert not hasse_witt_ordinary([0, -1, 0, 1], f3)  # x^3 - x
    z = f27.gen
    assert hasse_witt_ordinary([f27.zero, f27.one, z, z**8, z**2])


def test_ordinarity_agrees_with_trace_on_elliptic_curves(f3):
    # an elliptic curve over F_p is supersingular iff its trace is 0 mod p
    from oracles import count_prime_field_points

    seen = set()
    for b, a, c in itertools.product(range(3), repeat=3):
        coeffs = [b, a, c, 1]
        try:
            ordinary = hasse_witt_ordinary(coeffs, f3)
        except SingularCurve:
            continue
        trace = 3 + 1 - count_prime_field_points(coeffs, 3)
        assert ordinary == (trace % 3 != 0)
        seen.add(ordinary)
    assert seen == {True, False}


def test_ordinarity_rejects_repeated_roots(f27):
    with pytest.raises(SingularCurve):
        hasse_witt_ordinary([f27.one, f27.one, f27.gen])


# -- properties --------------------------------------------------------------

F27 = FqContext(3, [1, 2, 0, 1])
F3_10 = FqContext(3, EX1_MODULUS)


def elements(ctx):
    return st.lists(st.integers(0, ctx.p - 1), min_size=ctx.d, max_size=ctx.d).map(ctx)


@settings(max_examples=60, deadline=None)
@given(elements(F3_10), elements(F3_10), elements(F3_10))
def test_field_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == F3_10.zero
    if not a.is_zero():
        assert a * a.inverse() == F3_10.one
        assert a ** (F3_10.q - 1) == F3_10.one


@settings(max_examples=60, deadline=None)
@given(elements(F3_10), elements(F3_10), st.integers(1, 9))
def test_frobenius_is_automorphism(a, b, k):
    assert (a * b).frobenius(k) == a.frobenius(k) * b.frobenius(k)
    assert (a + b).frobenius(k) == a.frobenius(k) + b.frobenius(k)
    assert a.frobenius(k) == a ** (3**k)


@settings(max_examples=40, deadline=None)
@given(elements(F27))
def test_sqrt_of_squares(a):
    r = (a * a).sqrt()
    assert r * r == a * a
