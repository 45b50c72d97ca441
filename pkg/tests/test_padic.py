import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import PolyQuotient, ext_euclid_inverse, hensel_sqrt_digits
from thetalift.errors import BranchMismatch, ContextMismatch, NonUnit, NonUnitInverse, PrecisionError
from thetalift.finite_field import FqContext
from thetalift.padic import ZqContext, zq_context, zq_extend

from conftest import EX1_MODULUS

F9 = FqContext(3, [1, 0, 1])
F27 = FqContext(3, [1, 2, 0, 1])
F3_10 = FqContext(3, EX1_MODULUS)


def test_sigma_generator_of_z9(f9):
    ring = ZqContext(f9, 5)
    assert [int(c) for c in ring.sigma_gen.c] == [0, 3**5 - 1]
    w = ring.gen()
    assert ring.sigma_gen * ring.sigma_gen + 1 == ring.zero()
    assert w.sigma() == -w


def test_sigma_trivial_on_zp(f3):
    ring = ZqContext(f3, 7)
    a = ring(1234)
    assert a.sigma() == a and a.sigma_inv() == a


def test_sigma_generator_example_field(f3_10):
    ring = zq_context(f3_10, 250)
    assert ring.sigma_gen.reduce() == f3_10.gen**3
    # a root of the lifted modulus
    acc = ring.zero()
    for c in reversed(ring.modulus):
        acc = acc * ring.sigma_gen + int(c)
    assert acc.is_zero()


def test_inverse_matches_extended_euclid(f3):
    ring = ZqContext(f3, 4)
    assert int(ring(4).inverse().c[0]) == 61 == ext_euclid_inverse(4, 81)
    for a in range(1, 81):
        if a % 3:
            assert int(ring(a).inverse().c[0]) == ext_euclid_inverse(a, 81)


def test_multiplication_small_cases(f9):
    ring = ZqContext(f9, 3)
    w = ring.gen()
    assert (1 + 3 * w) * (1 - 3 * w) == ring(10)
    a = ring([5, 7])
    for m in range(4):
        assert a.truncate(m) * ring.one(m) == a.truncate(m)


def test_sigma_on_z9_conjugates(f9, rng):
    ring = ZqContext(f9, 12)
    for _ in range(10):
        a, b = rng.randrange(3**12), rng.randrange(3**12)
        assert ring([a, b]).sigma() == ring([a, -b])


def test_sigma_order_and_inverse(f3_10, rng):
    ring = zq_context(f3_10, 30)
    for _ in range(5):
        x = ring.random_element(rng)
        assert x.frobenius(10) == x
        assert x.sigma().sigma_inv() == x
        assert x.sigma_inv().sigma() == x
        y = x
        for _ in range(10):
            y = y.sigma()
        assert y == x


def test_sqrt_examples(f3, f9):
    ring = ZqContext(f3, 5)
    r = ring(7).sqrt(f3(1))
    assert int(r.c[0]) == 175 == hensel_sqrt_digits(7, 3, 5, 1)
    for m in (1, 3, 9):
        assert ZqContext(f3, 9).one(m).sqrt(f3(1)) == 1
    ring9 = ZqContext(f9, 4)
    w = f9.gen
    r = ring9(2).sqrt(w)
    assert r * r == ring9(2) and r.reduce() == w
    assert ring9(2).sqrt(2 * w) == -r


def test_sqrt_errors(f3, f9):
    ring = ZqContext(f3, 5)
    with pytest.raises(BranchMismatch):
        ring(7).sqrt(f3(0) + 2 * f3(1) * 0)
    with pytest.raises(NonUnit):
        ring(9).sqrt(f3(0))
    with pytest.raises(ContextMismatch):
        ring(7).sqrt(f9.one)


def test_sqrt_branch_uniqueness_exhaustive():
    # every unit square mod p^m, both branches, small rings
    for fq, m in ((FqContext(3, [0, 1]), 6), (F9, 3), (F27, 2)):
        ring = ZqContext(fq, m)
        mod = 3**m
        squares = {}
        for k in range(mod ** fq.d):
            digits = []
            for _ in range(fq.d):
                k, r = divmod(k, mod)
                digits.append(r)
            x = ring(digits)
            if not x.is_unit():
                continue
            squares.setdefault((x * x).c, []).append(x)
        for sq, roots in squares.items():
            a = ring(list(sq))
            assert len(roots) == 2
            for x in roots:
                r = a.sqrt(x.reduce())
                assert r == x
                assert a.sqrt((-x).reduce()) == -r


def test_reduce_and_lift(f3, f27, rng):
    assert ZqContext(f3, 5)(175).reduce() == f3(1)
    assert ZqContext(f3, 4).lift(f3(2)) == 2
    ring = zq_context(f27, 10)
    for x in f27.elements():
        assert ring.lift(x).reduce() == x
    for _ in range(20):
        x = ring.random_element(rng)
        assert x.sigma().reduce() == x.reduce().frobenius()


def test_divide_by_p_and_precision(f27):
    ring = zq_context(f27, 10)
    x = ring([9, 18, 27])
    y = x.divide_by_p(2)
    assert y.m == 8 and [int(c) for c in y.c] == [1, 2, 3]
    with pytest.raises(NonUnit):
        ring([1, 0, 0]).divide_by_p()
    with pytest.raises(PrecisionError):
        y.truncate(9)
    with pytest.raises(NonUnitInverse):
        ring(3).inverse()


def test_extension_identity_and_z9(f3):
    base = ZqContext(f3, 8)
    same, emb = zq_extend(base, 1)
    assert same is base and emb(base(5)) == base(5)
    big, emb = zq_extend(base, 2)
    two = emb(base(2))
    big_fq = big.fq
    root = two.sqrt(two.reduce().sqrt())
    assert root * root == two
    assert big_fq.d == 2


def test_extension_example_degree_40(f3_10):
    big, emb = zq_extend(zq_context(f3_10, 8), 4)
    assert big.fq.d == 40
    z = zq_context(f3_10, 8).gen()
    assert emb(z).sigma() == emb(z.sigma())
    assert emb(z * z + 1) == emb(z) * emb(z) + 1
    assert emb.preimage(emb(z)) == z


def test_text_round_trip(f27, rng):
    ring = zq_context(f27, 20)
    for _ in range(5):
        x = ring.random_element(rng, 13)
        y = ring.parse(x.to_text())
        assert y == x and y.m == 13
    with pytest.raises(ContextMismatch):
        ring.parse("3^2@4:[1,2]")


# -- properties ----------------------------------------------------------------


def zq(ring, m):
    mod = 3**m
    return st.lists(st.integers(0, mod - 1), min_size=ring.d, max_size=ring.d).map(lambda c: ring(c, m))


R27 = ZqContext(F27, 16)
R310 = ZqContext(F3_10, 16)


@settings(max_examples=40, deadline=None)
@given(zq(R310, 16), zq(R310, 16), zq(R310, 16))
def test_ring_ops_against_schoolbook(a, b, c):
    oracle = PolyQuotient(EX1_MODULUS, 3**16)
    ab = oracle.mul([int(x) for x in a.c], [int(x) for x in b.c])
    assert tuple(int(x) for x in (a * b).c) == ab
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(zq(R27, 16), zq(R27, 16))
def test_sigma_is_ring_automorphism(a, b):
    assert (a * b).sigma() == a.sigma() * b.sigma()
    assert (a + b).sigma() == a.sigma() + b.sigma()


@settings(max_examples=30, deadline=None)
@given(zq(R310, 16), zq(R310, 16), st.sampled_from([4, 8]))
def test_precision_contract(a, b, m):
    lo_a, lo_b = a.truncate(m), b.truncate(m)
    assert (lo_a * lo_b).c == (a * b).truncate(m).c
    assert (lo_a + lo_b).c == (a + b).truncate(m).c
    assert lo_a.sigma().c == a.sigma().truncate(m).c
    if a.is_unit():
        assert lo_a.inverse().c == a.inverse().truncate(m).c


def test_oracle_sigma_by_substitution(f27, rng):
    ring = zq_context(f27, 12)
    oracle = PolyQuotient(list(f27.modulus), 3**12)
    image = tuple(int(x) for x in ring.sigma_gen.c)
    for _ in range(10):
        x = ring.random_element(rng)
        assert tuple(int(c) for c in x.sigma().c) == oracle.substitute([int(c) for c in x.c], image)
