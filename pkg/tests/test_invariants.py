import itertools
import random

import pytest

from oracles import ModP, PolyQuotient, absolute_igusa_oracle, count_prime_field_points, poly_from_roots, \
    poly_mul, richelot_sextic
from thetalift.errors import DegenerateDenominator, FieldTooLarge, SingularCurve, SplitLocus
from thetalift.finite_field import FqContext, fq_extend
from thetalift.invariants import (
    count_points,
    frobenius_charpoly,
    igusa_clebsch_from_roots,
    igusa_from_clebsch,
    igusa_from_rosenhain,
    j_from_lambda,
    legendre_from_theta_g1,
    rosenhain_from_roots,
    rosenhain_from_theta_same,
    rosenhain_richelot,
    thomae_constraint_holds,
    thomae_theta_from_quintic,
)
from thetalift.lift import _full_vector, pi_residue, pi_section, riemann_system
from thetalift.padic import zq_context

SMALL_FIELDS = [
    FqContext(3, [1, 0, 1]),
    FqContext(3, [1, 2, 0, 1]),
    FqContext(3, [2, 1, 0, 0, 1]),
    FqContext(3, [1, 0, 0, 0, 2, 1]),
    FqContext(3, [1, 0, 0, 0, 1, 1, 1]),
]
P = 1009
FP = FqContext(P, [0, 1])


def distinct(fq, rng, n):
    out = []
    while len(out) < n:
        r = fq.random_element(rng)
        if r not in out:
            out.append(r)
    return out


@pytest.fixture(scope="module")
def quintics():
    rng = random.Random(7)
    out = []
    for k in range(50):
        fq = SMALL_FIELDS[k % len(SMALL_FIELDS)]
        roots = distinct(fq, rng, 5)
        out.append((roots, thomae_theta_from_quintic(roots)))
    return out


def test_thomae_constraint(quintics):
    for roots, th in quintics:
        assert th.extension_degree in (1, 2, 4)
        assert thomae_constraint_holds(roots, th.level2)
        assert all(a * a == s for a, s in zip(th.level2, th.squares))


def test_thomae_rosenhain_round_trip(quintics):
    for roots, th in quintics:
        pair = rosenhain_from_theta_same(th.level2)
        big = pair.candidates[0][0].ctx
        _, emb = fq_extend(roots[0].ctx, big.d // roots[0].ctx.d)
        expected = {tuple(emb(v) for v in t) for t in rosenhain_from_roots(roots)}
        assert {tuple(c) for c in pair.candidates} == expected


def test_thomae_point_extends_to_riemann_solution(quintics):
    # keep the residue fields of the section small: root finding in F_3^96 is slow
    small = [(r, th) for r, th in quintics if th.level2[0].ctx.d <= 12]
    checked = 0
    for roots, th in small:
        try:
            e, big, emb, branches = pi_residue(th.level2)
        except SplitLocus:
            continue
        checked += 1
        ring = zq_context(big, 1)
        a = tuple(ring.lift(emb(v), 1) for v in th.level2)
        vec = _full_vector(pi_section(a, branches), ring.one(1))
        assert all(v.is_zero() for v in riemann_system(2).values(vec))
    assert checked >= 10


def test_thomae_rejects_repeated_roots(f27):
    z = f27.gen
    with pytest.raises(SingularCurve):
        thomae_theta_from_quintic([z, z, f27.one, f27.zero, z * z])


def test_rosenhain_mus_are_roots_of_the_quadratic(quintics):
    for _, th in quintics:
        pair = rosenhain_from_theta_same(th.level2)
        mu1, mu2 = pair.mus
        assert mu1 * mu2 == mu1.ctx.one
        a02, a20, a22 = (pair.embedding(v) for v in th.level2) if pair.embedding else th.level2
        t = (1 - a02**4 + a20**4 - a22**4) / (a20**2 - a02**2 * a22**2)
        assert mu1 + mu2 == t


def test_legendre_and_j_symmetries(f27, rng):
    for _ in range(20):
        lam = f27.random_element(rng)
        if lam.is_zero() or lam == f27.one:
            continue
        j = j_from_lambda(lam)
        for other in (1 - lam, lam.inverse(), 1 - lam.inverse(), (1 - lam).inverse(), lam / (lam - 1)):
            assert j_from_lambda(other) == j
    x = f27.gen
    assert legendre_from_theta_g1(f27.one, None, x) == (2 * x / (1 + x * x)) ** 2


# -- Igusa invariants ----------------------------------------------------------


def _modp(v):
    return ModP(int(v.c[0]), P)


def test_igusa_against_transvectant_oracle():
    rng = random.Random(11)
    for _ in range(12):
        lams = distinct(FP, rng, 3)
        if any(v.is_zero() or v == FP.one for v in lams):
            continue
        ours = igusa_from_rosenhain(lams).absolute()
        sextic = poly_from_roots([ModP(0, P), ModP(1, P)] + [_modp(v) for v in lams], ModP(1, P))
        oracle = absolute_igusa_oracle(sextic + [ModP(0, P)])
        assert [int(v.c[0]) for v in ours] == [o.v for o in oracle]


def test_igusa_invariant_under_affine_change(f27, rng):
    ring = zq_context(f27, 12)
    for _ in range(5):
        roots = [ring.lift(v) for v in distinct(f27, rng, 5)]
        a, b = ring.random_unit(rng), ring.random_element(rng)
        moved = [a * r + b for r in roots]
        one = ring.one()
        base = igusa_from_clebsch(*igusa_clebsch_from_roots(roots, one)).absolute()
        other = igusa_from_clebsch(*igusa_clebsch_from_roots(moved, one)).absolute()
        # the form also scales by a^5 at infinity; absolute invariants do not see it
        for u, v in zip(base, other):
            assert u == v


def test_igusa_residue_matches_lifted_computation(f27, rng):
    for _ in range(5):
        lams = distinct(f27, rng, 3)
        if any(v.is_zero() or v == f27.one for v in lams):
            continue
        res = igusa_from_rosenhain(lams).absolute()
        ring = zq_context(f27, 10)
        lifted = igusa_from_rosenhain([ring.lift(v) for v in lams]).absolute()
        assert [v.reduce() for v in lifted] == list(res)


def test_igusa_rejects_repeated_roots(f27):
    with pytest.raises(SingularCurve):
        igusa_from_rosenhain([f27.gen, f27.gen, f27.gen * 2])


# -- Richelot ------------------------------------------------------------------


def _richelot_samples(count):
    """Level-2 points over F_1009 whose Rosenhain candidates are rational."""
    rng = random.Random(3)
    out = []
    while len(out) < count:
        roots = distinct(FP, rng, 5)
        try:
            th = thomae_theta_from_quintic(roots)
            pair = rosenhain_from_theta_same(th.level2) if th.extension_degree == 1 else None
        except Exception:
            continue
        if pair is None or pair.extension_degree != 1:
            continue
        out.append((th.level2, pair.candidates))
    return out


def _dual_invariants(lams):
    one, zero = ModP(1, P), ModP(0, P)
    l1, l2, l3 = (_modp(v) for v in lams)
    g1 = [zero, one, zero]
    g2 = poly_mul([-one, one], [-l1, one])
    g3 = poly_mul([-l2, one], [-l3, one])
    return [o.v for o in absolute_igusa_oracle(richelot_sextic(g1, g2, g3))]


def test_richelot_model_is_isogenous():
    for level2, candidates in _richelot_samples(8):
        mine = [int(v.c[0]) for v in igusa_from_rosenhain(rosenhain_richelot(level2)).absolute()]
        assert any(mine == _dual_invariants(c) for c in candidates)


def test_printed_mu3_denominator_misses_the_isogeny():
    misses = 0
    for level2, candidates in _richelot_samples(8):
        try:
            mus = rosenhain_richelot(level2, mu3_denominator="a02")
            mine = [int(v.c[0]) for v in igusa_from_rosenhain(mus).absolute()]
        except (DegenerateDenominator, SingularCurve):
            continue
        misses += not any(mine == _dual_invariants(c) for c in candidates)
    assert misses >= 6


def test_richelot_rejects_bad_option(f27):
    with pytest.raises(ValueError):
        rosenhain_richelot((f27.gen,) * 3, mu3_denominator="x")


# -- point counts --------------------------------------------------------------


def _count_f9(coeffs):
    ring = PolyQuotient([1, 0, 1], 3)
    elems = [(a, b) for a in range(3) for b in range(3)]
    squares = {}
    for y in elems:
        s = ring.mul(y, y)
        squares[s] = squares.get(s, 0) + 1
    total = 1  # odd degree: one point at infinity
    for x in elems:
        acc = ring.reduce([0])
        for c in reversed(coeffs):
            acc = ring.add(ring.mul(acc, x), ring.reduce([c]))
        total += squares.get(acc, 0)
    return total


def test_charpoly_genus2_against_direct_counts(f3):
    curve = [1, 1, 0, 1, 0, 1]  # x^5 + x^3 + x + 1
    n1 = count_prime_field_points(curve, 3)
    n2 = _count_f9(curve)
    s1, s2 = 3 + 1 - n1, 9 + 1 - n2
    c1 = -s1
    c2 = (s1 * s1 - s2) // 2
    assert frobenius_charpoly(curve, f3) == [9, 3 * c1, c2, c1, 1]
    assert frobenius_charpoly(curve, f3) == [9, 9, 5, 3, 1]


def test_charpoly_elliptic(f3):
    for curve in ([1, 2, 0, 1], [2, 2, 1, 1], [1, 0, 1, 1]):
        try:
            cp = frobenius_charpoly(curve, f3)
        except SingularCurve:
            continue
        t = 3 + 1 - count_prime_field_points(curve, 3)
        assert cp == [3, -t, 1]


def test_charpoly_functional_equation(f27, rng):
    for _ in range(3):
        curve = [f27.random_element(rng) for _ in range(5)] + [f27.one]
        try:
            cp = frobenius_charpoly(curve, f27)
        except SingularCurve:
            continue
        assert cp[0] == 27**2 and cp[1] == 27 * cp[3]
        # the Jacobian order P(1) is positive and the count over F_q matches
        assert sum(cp) > 0
        assert cp[3] == count_points(curve, f27) - 27 - 1


def test_charpoly_limits(f3):
    with pytest.raises(SingularCurve):
        frobenius_charpoly([0, 0, 1, 1], f3)  # x^3 + x^2 has a double root
    big = FqContext(3, [1, 0, 0, 0, 1, 1, 1])
    with pytest.raises(FieldTooLarge):
        frobenius_charpoly([1, 1, 0, 1, 0, 1], fq_extend(big, 2)[0])


def test_projective_count_even_degree(f3):
    curve = [1, 0, 0, 0, 0, 0, 1]  # x^6 + 1: two points at infinity
    assert count_points([f3(c) for c in curve], f3) == count_prime_field_points(curve, 3)
    assert all(count_points([f3(c) for c in poly], f3) == count_prime_field_points(poly, 3)
               for poly in itertools.product(range(3), repeat=4) if poly[-1])
