"""Exact integer LLL and minimal-polynomial reconstruction of p-adic numbers.

A p-adic number gamma in Z_q (degree r over Z_p) known modulo p^m satisfies
an integer polynomial f of degree n when the coefficient vector a lies in the
lattice {a in Z^(n+1) : sum a_i gamma^i = 0 mod p^m}.  Its determinant is at
most p^(m r), so once p^(m r / (n+1)) dwarfs |f| the polynomial shows up as
the first vector of an LLL-reduced basis.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math
from math import gcd

from gmpy2 import mpz

from ._linalg import inverse_mod, pivot_rows
from .errors import DependentRows, NoRelationFound

DELTA = Fraction(99, 100)


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(basis, delta=DELTA):
    """delta-LLL reduction of the rows of ``basis`` in exact integer arithmetic.

    Integral variant: the Gram-Schmidt data is carried as the integers
    d_i = prod |b*_j|^2 and lambda_ij = d_j mu_ij, so no rationals appear.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie strictly between 1/4 and 1")
    num, den = delta.numerator, delta.denominator
    n = len(basis)
    if n == 0:
        return []
    b = [None] + [[mpz(x) for x in row] for row in basis]  # 1-based
    d = [mpz(0)] * (n + 1)
    d[0] = mpz(1)
    lam = [[mpz(0)] * (n + 1) for _ in range(n + 1)]

    def gram(k):
        for j in range(1, k + 1):
            u = _dot(b[k], b[j])
            for i in range(1, j):
                u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise DependentRows("basis rows are linearly dependent")
                d[k] = u

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        big = (d[k - 2] * d[k] + lk * lk) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lk * t) // d[k - 1]
            lam[i][k - 1] = (big * t + lk * lam[i][k]) // d[k]
        d[k - 1] = big

    gram(1)
    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            gram(k)
        red(k, k - 1)
        if den * d[k] * d[k - 2] < num * d[k - 1] ** 2 - den * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                red(k, l)
            k += 1
    out = [[int(x) for x in row] for row in b[1:]]
    assert is_lll_reduced(out, delta), "LLL output fails the Lovasz condition"
    return out


def gram_schmidt(basis):
    """Rational Gram-Schmidt: (orthogonal vectors, mu matrix)."""
    stars, mu = [], []
    for i, v in enumerate(basis):
        w = [Fraction(x) for x in v]
        row = []
        for s in stars:
            c = _dot(v, s) / _dot(s, s)
            row.append(c)
            w = [a - c * x for a, x in zip(w, s)]
        stars.append(w)
        mu.append(row)
    return stars, mu


def is_lll_reduced(basis, delta=DELTA):
    """Size reduction |mu| <= 1/2 and the Lovasz condition, checked in exact rationals."""
    stars, mu = gram_schmidt(basis)
    norms = [_dot(s, s) for s in stars]
    for i, row in enumerate(mu):
        if any(abs(c) > Fraction(1, 2) for c in row):
            return False
        if i and norms[i] < (Fraction(delta) - row[i - 1] ** 2) * norms[i - 1]:
            return False
    return True


# ---------------------------------------------------------------------------
# reconstruction lattice


def _powers(gamma, n, shift):
    """Coordinate rows of p^(shift (n - i)) gamma^i, i = 0..n, as integers mod p^m."""
    ctx, m = gamma.ctx, gamma.m
    rows = []
    acc = ctx.one(m)
    for i in range(n + 1):
        term = acc.mul_p(shift * (n - i)) if shift else acc
        rows.append([int(x) for x in term.c])
        acc = acc * gamma
    return rows


def build_minpoly_lattice(gamma, n, shift=0):
    """The (n+1+r) x r matrix: powers of gamma on top, p^m times the identity below.

    Integer vectors (a_0..a_n, e_1..e_r) with zero product against this matrix
    are exactly the relations sum a_i gamma^i = 0 mod p^m.  With ``shift`` = k
    the number in question is gamma / p^k and row i is scaled by p^(k (n-i)).
    """
    if n < 1:
        raise ValueError("degree bound must be at least 1")
    r = gamma.ctx.fq.d
    pm = gamma.ctx.pm(gamma.m)
    rows = _powers(gamma, n, shift)
    rows += [[pm if i == j else 0 for j in range(r)] for i in range(r)]
    return rows


def _unit_column_basis(top, p, m):
    """Columns spanning the same Z/p^m-module as those of ``top``, with an invertible minor mod p.

    Column operations do not change the left kernel.  Pivots are taken on unit
    entries only; returns None when the column module is not saturated (some
    remaining column is nonzero mod p^m but divisible by p).
    """
    pm = p**m
    cols = [[row[c] % pm for row in top] for c in range(len(top[0]))]
    done, used = [], set()
    while cols:
        hit = next(((i, j) for j, col in enumerate(cols) for i, x in enumerate(col)
                    if i not in used and x % p), None)
        if hit is None:
            break
        i, j = hit
        piv = cols.pop(j)
        inv = pow(piv[i], -1, pm)
        piv = [x * inv % pm for x in piv]
        cols = [[(x - col[i] * y) % pm for x, y in zip(col, piv)] for col in cols]
        done.append(piv)
        used.add(i)
    if any(any(col) for col in cols):
        return None
    return [list(row) for row in zip(*done)] if done else None


def kernel_lattice(mat, p, m):
    return _kernel_with_rank(mat, p, m)[0]


def _kernel_with_rank(mat, p, m):
    """Basis of {a : a M = 0 mod p^m} for an (n+1+r) x r matrix from build_minpoly_lattice.

    Projected to the first n+1 coordinates.  When the power rows span a
    saturated module (the usual case, including numbers living in a subring)
    the basis is written down directly from an invertible minor; otherwise LLL
    runs once on the column-augmented embedding and the kernel is read off.
    Also returns rho = log_p(det) / m, the effective number of p-adic digits
    constrained per unit of precision.
    """
    r = len(mat[0])
    n1 = len(mat) - r
    top = _unit_column_basis(mat[:n1], p, m)
    if top is None:
        basis = _kernel_by_embedding(mat, n1, p**m)
        return basis, _log_det(basis, p) / m
    rho = len(top[0])
    pm = p**m
    piv = pivot_rows(top, p)
    pinv = inverse_mod([top[i] for i in piv], p, m)
    basis = []
    for j in range(n1):
        if j in piv:
            continue
        # a_j = 1 and a_P = -Gamma_j Gamma_P^-1
        c = [sum(top[j][k] * pinv[k][t] for k in range(rho)) % pm for t in range(rho)]
        v = [0] * n1
        v[j] = 1
        for t, i in enumerate(piv):
            v[i] = -c[t] % pm
        basis.append(v)
    for i in piv:
        v = [0] * n1
        v[i] = pm
        basis.append(v)
    return basis, rho


def _log_det(basis, p):
    stars, _ = gram_schmidt(basis)
    sq = 1
    for s in stars:
        sq *= _dot(s, s)
    return math.log(sq.numerator) / (2 * math.log(p)) - math.log(sq.denominator) / (2 * math.log(p))


def _kernel_by_embedding(mat, n1, pm):
    """Kernel via LLL on [identity | W M]; W grows until n1 vectors with zero tail appear."""
    rows = len(mat)
    weight = pm
    while True:
        emb = [[int(i == j) for j in range(rows)] + [weight * x for x in mat[i]] for i in range(rows)]
        red = lll_reduce(emb)
        kern = [row[:n1] for row in red if not any(row[rows:])]
        if len(kern) == n1:
            return kern
        weight *= pm


# ---------------------------------------------------------------------------
# reconstruction


@dataclass
class MinPolyResult:
    coeffs: list  # a_0 .. a_n
    valuation: int  # largest e with f(gamma) = 0 mod p^e, capped at the input precision
    quality: str  # "Confident" or "LowMargin"
    precision_used: int = 0
    margin: float = 0.0  # log_p of |b2| / |b1|
    info: dict = field(default_factory=dict)

    @property
    def degree(self):
        return max(i for i, c in enumerate(self.coeffs) if c)

    def to_text(self, var="x"):
        return poly_text(self.coeffs, var)


def poly_text(coeffs, var="x"):
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return " ".join([head] + [f"{s} {b}" for s, b in parts[1:]])


def normalize_poly(coeffs):
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    if g == 0:
        return list(coeffs)
    out = [c // g for c in coeffs]
    lead = next(c for c in reversed(out) if c)
    return [-c for c in out] if lead < 0 else out


def relation_valuation(coeffs, gamma, shift=0):
    """Largest e <= gamma.m with sum a_i (gamma/p^shift)^i * p^(shift n) = 0 mod p^e."""
    n = len(coeffs) - 1
    ctx, m = gamma.ctx, gamma.m
    acc = ctx.zero(m)
    for i in range(n, -1, -1):
        acc = acc * gamma + ctx(coeffs[i], m).mul_p(shift * (n - i))
    return acc.valuation() if not acc.is_zero() else m


def _norm2(v):
    return sum(x * x for x in v)


def _reduce_at(gamma, n, m_used, shift):
    g = gamma.truncate(m_used)
    mat = build_minpoly_lattice(g, n, shift)
    p = gamma.ctx.fq.p
    kern, rho = _kernel_with_rank(mat, p, m_used)
    basis = lll_reduce(kern)
    # equal lengths: prefer the smaller leading coefficient (closer to monic)
    basis.sort(key=lambda v: (_norm2(v), abs(next((c for c in reversed(v) if c), 0))))
    return basis, rho


def _squarefree(coeffs):
    """gcd(f, f') = 1 over Q."""
    a = [Fraction(c) for c in coeffs]
    b = [Fraction(i * c) for i, c in enumerate(coeffs)][1:]
    for poly in (a, b):
        while poly and poly[-1] == 0:
            poly.pop()
    while b:
        while len(a) >= len(b):
            k = len(a) - len(b)
            f = a[-1] / b[-1]
            for i, c in enumerate(b):
                a[i + k] -= f * c
            while a and a[-1] == 0:
                a.pop()
            if not a:
                break
        a, b = b, a
    return len(a) == 1


def minpoly_reconstruct(gamma, n, m=None, shift=0, sweep=True):
    """Integer polynomial of degree <= n vanishing at gamma / p^shift.

    Lattices are built at precision at most m (default: all of gamma) and
    every candidate is checked against all known digits of gamma.  With
    ``sweep`` the lattice is first reduced at small precisions (growing by
    half each time from a bound based on n and r).  Within one reduced basis
    the shortest vector that verifies and is squarefree is the candidate; a
    repeated factor only means gamma is close to a root of that factor.  The
    first candidate with a comfortable margin over the next lattice vector
    wins.  The margin test asks |b2| / |b1| >= p^(m' rho / (2 (n+1))), the
    square root of the typical vector length in the lattice at precision m'.
    """
    known = gamma.m
    m = known if m is None else min(m, known)
    p = gamma.ctx.fq.p
    r = gamma.ctx.fq.d
    if sweep:
        schedule = []
        t = max(4, -(-2 * (n + 1) // r))
        while t < m:
            schedule.append(t)
            t += max(1, t // 2)
        schedule.append(m)
    else:
        schedule = [m]
    last = None
    for m_used in schedule:
        basis, rho = _reduce_at(gamma, n, m_used, shift)
        for k, vec in enumerate(basis):
            cand = normalize_poly(vec)
            if not any(cand[1:]):
                continue
            v = relation_valuation(cand, gamma, shift)
            if v < known or not _squarefree(cand):
                continue
            # margin in p-adic digits: log_p(|b_next| / |b|)
            if k + 1 < len(basis):
                margin = (math.log(_norm2(basis[k + 1])) - math.log(_norm2(vec))) / (2 * math.log(p))
            else:
                margin = math.inf
            # half the expected log-gap between a planted relation and a generic vector
            quality = "Confident" if margin >= m_used * rho / (2 * (n + 1)) else "LowMargin"
            last = MinPolyResult(cand, v, quality, m_used, margin, {"shift": shift, "degree_bound": n})
            break
        if last is not None and last.quality == "Confident":
            return last
    if last is not None:
        return last
    raise NoRelationFound(f"no squarefree integer relation of degree <= {n} holds modulo p^{known}")


def minpoly_degree_sweep(gamma, degrees, m=None, shift=0):
    """Try each degree bound in turn and return the first verified, Confident result."""
    best = None
    for n in degrees:
        try:
            res = minpoly_reconstruct(gamma, n, m, shift)
        except NoRelationFound:
            continue
        if res.quality == "Confident":
            return res
        best = best or res
    if best is None:
        raise NoRelationFound(f"no relation found for degrees {list(degrees)}")
    return best
