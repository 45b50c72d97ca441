"""Curve-side formulas: Thomae, Rosenhain models, Legendre/j, Igusa invariants, point counts.

Every routine accepts elements of a finite field (FqElem) or of Z_q (ZqElem);
when a square root is missing the values are moved to the smallest extension
of degree 1, 2 or 4 that has it, and the degree is reported.
"""

import itertools
from dataclasses import dataclass

from .errors import (
    DegenerateDenominator,
    DegenerateTheta,
    FieldTooLarge,
    NoRoot,
    SingularCurve,
    SplitOrDegenerate,
)
from .finite_field import FqContext, FqElem, _pq_gcd, fq_extend
from .padic import ZqElem, zq_context, zq_extend

EXTENSION_DEGREES = (1, 2, 4)


def _is_unit(x):
    return x.is_unit() if isinstance(x, ZqElem) else not x.is_zero()


def _residue(x):
    return x.reduce() if isinstance(x, ZqElem) else x


def _sqrt(x):
    if isinstance(x, ZqElem):
        return x.sqrt(x.reduce().sqrt())
    return x.sqrt()


def _extension(x, e):
    """(embedding into the degree-e extension of x's ring) as a callable."""
    if isinstance(x, ZqElem):
        return zq_extend(x.ctx, e)[1]
    return fq_extend(x.ctx, e)[1]


def _roots_in_extension(values, build):
    """Smallest e in 1, 2, 4 such that build(mapped values) succeeds; returns (e, emb, result)."""
    for e in EXTENSION_DEGREES:
        emb = _extension(values[0], e)
        try:
            return e, emb, build([emb(v) for v in values])
        except NoRoot:
            continue
    raise NoRoot("required roots do not exist in a degree 4 extension")


# ---------------------------------------------------------------------------
# Thomae


@dataclass
class ThomaeResult:
    level2: tuple  # (a02, a20, a22) with a00 = 1
    extension_degree: int
    embedding: object  # base ring -> ring of level2
    squares: tuple  # the chosen square roots (s02, s20, s22), s = a^2


def check_distinct(roots):
    for x, y in itertools.combinations(roots, 2):
        if not _is_unit(x - y):
            raise SingularCurve("branch points are not distinct in the residue field")


def thomae_theta_from_quintic(roots):
    """Level-2 theta constants of y^2 = prod (x - e_i), e_1..e_5 given.

    The fourth roots are taken as square roots of square roots; a02 is pinned
    by a02^2 = (e1 - e3)/(e1 - e2) a20^2 a22^2, which then also gives the
    fourth power of the third formula.
    """
    roots = tuple(roots)
    if len(roots) != 5:
        raise ValueError("a quintic model needs exactly five branch points")
    check_distinct(roots)
    e1, e2, e3, e4, e5 = roots
    x20 = (e1 - e2) * (e1 - e4) / ((e1 - e3) * (e1 - e5))
    x22 = (e1 - e2) * (e2 - e5) * (e3 - e4) / ((e1 - e3) * (e2 - e4) * (e3 - e5))
    ratio = (e1 - e3) / (e1 - e2)

    def build(vals):
        x20_, x22_, ratio_ = vals
        s20 = _sqrt(x20_)
        s22 = _sqrt(x22_)
        s02 = ratio_ * s20 * s22
        return (_sqrt(s02), _sqrt(s20), _sqrt(s22)), (s02, s20, s22)

    e, emb, (level2, squares) = _roots_in_extension([x20, x22, ratio], build)
    return ThomaeResult(level2, e, emb, squares)


def thomae_constraint_holds(roots, level2):
    e1, e2, e3 = roots[:3]
    a02, a20, a22 = level2
    emb = _embedding_for(roots[0], a02)
    lhs = a02 * a02 * emb(e1 - e2)
    rhs = emb(e1 - e3) * a20 * a20 * a22 * a22
    return lhs == rhs


def _embedding_for(src, dst):
    if src.ctx == dst.ctx:
        return lambda v: v
    e = dst.ctx.fq.d // src.ctx.fq.d if isinstance(src, ZqElem) else dst.ctx.d // src.ctx.d
    return _extension(src, e)


# ---------------------------------------------------------------------------
# Rosenhain models


@dataclass
class RosenhainPair:
    candidates: list  # two (lambda1, lambda2, lambda3) triples, one per root mu
    mus: tuple
    extension_degree: int
    embedding: object


def rosenhain_from_theta_same(level2, a00=None):
    """Rosenhain triples of the curve whose Jacobian carries this theta point.

    mu runs over the roots of mu^2 - t mu + 1 with
    t = (a00^4 - a02^4 + a20^4 - a22^4) / (a00^2 a20^2 - a02^2 a22^2).
    """
    a02, a20, a22 = level2
    a00 = a02 * 0 + 1 if a00 is None else a00
    den = a00**2 * a20**2 - a02**2 * a22**2
    if not (_is_unit(den) and _is_unit(a20) and _is_unit(a22)):
        raise SplitOrDegenerate("denominator vanishes in the residue field")
    t = (a00**4 - a02**4 + a20**4 - a22**4) / den
    disc = t * t - 4

    def build(vals):
        a00_, a02_, a20_, a22_, t_, disc_ = vals
        r = _sqrt(disc_)
        half = (t_ * 0 + 2).inverse()
        mus = ((t_ + r) * half, (t_ - r) * half)
        lam1 = (a00_ * a02_ / (a22_ * a20_)) ** 2
        out = [(lam1, (a02_ / a22_) ** 2 * mu, (a00_ / a20_) ** 2 * mu) for mu in mus]
        return out, mus

    e, emb, (cands, mus) = _roots_in_extension([a00, a02, a20, a22, t, disc], build)
    return RosenhainPair(cands, mus, e, emb)


def rosenhain_richelot(level2, a00=None, mu3_denominator="a20"):
    """Rosenhain triple (mu1, mu2, mu3) of the Richelot-isogenous curve; no roots needed.

    The curve y^2 = x(x-1)(x-mu1)(x-mu2)(x-mu3) is the Richelot image of the
    curve of rosenhain_from_theta_same for the splitting x, (x-1)(x-l1),
    (x-l2)(x-l3).  That holds with mu3 = s+ s- / (4 (a00a20 + a02a22)(a00a20 - a02a22));
    ``mu3_denominator="a02"`` selects (a00a02 + a20a22)(a00a02 - a20a22)
    instead, which gives a curve outside that isogeny class in general.
    """
    a02, a20, a22 = level2
    a00 = a02 * 0 + 1 if a00 is None else a00
    s_plus = a00**2 + a02**2 + a20**2 + a22**2
    s_minus = a00**2 - a02**2 + a20**2 - a22**2
    p1 = a00 * a02 + a20 * a22
    m1 = a00 * a02 - a20 * a22
    q1 = a00 * a20 + a02 * a22
    q2 = a00 * a22 + a02 * a20
    q3 = a00 * a20 - a02 * a22
    if mu3_denominator == "a20":
        den3 = 4 * q1 * q3
    elif mu3_denominator == "a02":
        den3 = p1 * m1
    else:
        raise ValueError("mu3_denominator is 'a20' or 'a02'")
    dens = (2 * q1 * q2, 2 * q2 * q3, den3)
    if not all(_is_unit(d) for d in dens):
        raise DegenerateDenominator("a Richelot denominator vanishes in the residue field")
    return (s_plus * p1 / dens[0], s_minus * p1 / dens[1], s_plus * s_minus / dens[2])


def rosenhain_from_roots(roots):
    """The two Rosenhain triples attached to branch points e1..e5 in the Thomae normalization."""
    e1, e2, e3, e4, e5 = roots
    return [
        ((e1 - e3) / (e1 - e2), (e1 - e4) / (e1 - e2), (e1 - e5) / (e1 - e2)),
        ((e1 - e3) / (e1 - e2), (e1 - e3) / (e1 - e5), (e1 - e3) / (e1 - e4)),
    ]


# ---------------------------------------------------------------------------
# genus 1


def legendre_from_theta_g1(a0, a1, a2):
    """lambda = (2 a0 a2 / (a0^2 + a2^2))^2; a1 is not used."""
    den = a0 * a0 + a2 * a2
    if not _is_unit(den):
        raise DegenerateTheta("a0^2 + a2^2 vanishes in the residue field")
    return (2 * a0 * a2 / den) ** 2


def j_from_lambda(lam):
    """j = 256 (l^2 - l + 1)^3 / (l^2 (l - 1)^2)."""
    den = lam * lam * (lam - 1) ** 2
    if not _is_unit(den):
        raise DegenerateTheta("lambda is 0 or 1 in the residue field")
    return 256 * (lam * lam - lam + 1) ** 3 / den


# ---------------------------------------------------------------------------
# Igusa invariants


@dataclass
class IgusaTriple:
    J2: object
    J4: object
    J6: object
    J8: object
    J10: object

    @property
    def j1(self):
        return self.J2**5 / self.J10

    @property
    def j2(self):
        return self.J2**3 * self.J4 / self.J10

    @property
    def j4(self):
        return self.J2 * self.J8 / self.J10

    def absolute(self):
        return (self.j1, self.j2, self.j4)


def _pair_partitions(items):
    if not items:
        yield []
        return
    a = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for tail in _pair_partitions(rest):
            yield [(a, items[i])] + tail


def igusa_clebsch_from_roots(finite_roots, one):
    """(I2, I4, I6, I10) of y^2 = prod (x - r) for 5 or 6 finite roots, monic.

    With five roots the sixth branch point is at infinity: a squared
    difference with it contributes 1.  The sums are the classical root
    expressions over the 15 pairings, the 10 splittings into triples and the
    60 (splitting, matching) pairs.
    """
    pts = list(range(6))
    roots = list(finite_roots)
    if len(roots) not in (5, 6):
        raise ValueError("need five or six branch points")

    sq = {}
    for i, j in itertools.combinations(pts, 2):
        if j >= len(roots):
            v = one
        else:
            v = (roots[i] - roots[j]) ** 2
        sq[(i, j)] = sq[(j, i)] = v

    i2 = sum((sq[a] * sq[b] * sq[c] for a, b, c in _pair_partitions(pts)), one * 0)
    i4 = one * 0
    i6 = one * 0
    for trip in itertools.combinations(pts[1:], 2):
        t1 = (0,) + trip
        t2 = tuple(x for x in pts if x not in t1)
        tri1 = sq[(t1[0], t1[1])] * sq[(t1[1], t1[2])] * sq[(t1[2], t1[0])]
        tri2 = sq[(t2[0], t2[1])] * sq[(t2[1], t2[2])] * sq[(t2[2], t2[0])]
        i4 = i4 + tri1 * tri2
        for perm in itertools.permutations(t2):
            match = sq[(t1[0], perm[0])] * sq[(t1[1], perm[1])] * sq[(t1[2], perm[2])]
            i6 = i6 + tri1 * tri2 * match
    i10 = one
    for i, j in itertools.combinations(pts, 2):
        i10 = i10 * sq[(i, j)]
    return i2, i4, i6, i10


def _exact_div(x, n):
    """x / n for an integer n; the p-part is removed by exact division (precision drops)."""
    p = x.ctx.p if isinstance(x, ZqElem) else x.ctx.p
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    if k:
        x = x.divide_by_p(k)
    return x * (x * 0 + n).inverse()


def igusa_from_clebsch(i2, i4, i6, i10):
    """Igusa J2..J10 from (I2, I4, I6, I10) in the usual normalization (Z_q elements)."""
    j2 = _exact_div(i2, 8)
    j4 = _exact_div(4 * j2 * j2 - i4.truncate(j2.m), 96)
    m6 = j4.m
    j6 = _exact_div(8 * j2.truncate(m6) ** 3 - 160 * j2.truncate(m6) * j4 - i6.truncate(m6), 576)
    m8 = j6.m
    j8 = _exact_div(j2.truncate(m8) * j6 - j4.truncate(m8) ** 2, 4)
    j10 = _exact_div(i10, 4096)
    if not j10.is_unit():
        raise SingularCurve("J10 vanishes in the residue field")
    return IgusaTriple(j2, j4, j6, j8, j10)


def igusa_from_rosenhain(lams, work_precision=8):
    """Igusa invariants of y^2 = x (x - 1)(x - l1)(x - l2)(x - l3).

    Over a finite field the computation runs in Z_q at ``work_precision``
    (J4 and J6 need exact division by 3 and 9) and is reduced at the end.
    """
    lams = tuple(lams)
    residue = isinstance(lams[0], FqElem)
    if residue:
        ring = zq_context(lams[0].ctx, work_precision)
        lams = tuple(ring.lift(v, work_precision) for v in lams)
    one = lams[0] * 0 + 1
    roots = (one * 0, one) + lams
    check_distinct(roots)
    res = igusa_from_clebsch(*igusa_clebsch_from_roots(roots, one))
    if residue:
        res = IgusaTriple(*(v.reduce() for v in (res.J2, res.J4, res.J6, res.J8, res.J10)))
    return res


# ---------------------------------------------------------------------------
# Frobenius characteristic polynomial by naive point counting

MAX_FIELD_SIZE = 10**6


def _as_poly(curve, ctx):
    return [c if isinstance(c, FqElem) else ctx(c) for c in curve]


def count_points(f, ctx):
    """Projective points on the smooth model of y^2 = f(x) over ctx."""
    squares = {}
    for y in ctx.elements():
        s = y * y
        squares[s] = squares.get(s, 0) + 1
    total = 0
    for x in ctx.elements():
        acc = ctx.zero
        for c in reversed(f):
            acc = acc * x + c
        total += squares.get(acc, 0)
    deg = len(f) - 1
    if deg % 2:
        total += 1
    else:
        total += 2 if f[-1].is_square() else 0
    return total


def frobenius_charpoly(curve, ctx, g=None):
    """Characteristic polynomial of Frobenius of y^2 = f(x), coefficients low to high.

    ``curve`` lists the coefficients of f (ints or elements of ctx), low
    degree first; g defaults to floor((deg f - 1) / 2).  Counts over
    F_q, ..., F_{q^g} give the power sums; Newton's identities and the
    functional equation give the rest.
    """
    if not isinstance(ctx, FqContext):
        raise TypeError("ctx must be a finite field context")
    f = _as_poly(curve, ctx)
    while f and f[-1].is_zero():
        f.pop()
    deg = len(f) - 1
    if deg < 3:
        raise SingularCurve("curve needs degree at least 3")
    g = (deg - 1) // 2 if g is None else g
    q = ctx.q
    if q**g > MAX_FIELD_SIZE:
        raise FieldTooLarge(f"naive counting over F_{q}^{g} is too slow")
    _check_squarefree(f, ctx)
    power_sums = []
    for k in range(1, g + 1):
        big, emb = fq_extend(ctx, k)
        n_k = count_points([emb(c) for c in f], big)
        power_sums.append(q**k + 1 - n_k)
    c = [1]
    for k in range(1, g + 1):
        acc = power_sums[k - 1] + sum(c[i] * power_sums[k - 1 - i] for i in range(1, k))
        if acc % k:
            raise AssertionError("Newton identity gave a non-integer coefficient")
        c.append(-acc // k)
    for k in range(g + 1, 2 * g + 1):
        c.append(q ** (k - g) * c[2 * g - k])
    return list(reversed(c))


def _check_squarefree(f, ctx):
    df = [f[i] * i for i in range(1, len(f))]
    gcd = _pq_gcd(list(f), df)
    if len(gcd) > 1:
        raise SingularCurve("f has a repeated root")
