"""Independent reference computations used only by the tests.

Nothing here imports thetalift: every oracle works on plain integers,
Fractions or a caller-supplied modulus.
"""

from fractions import Fraction
from math import comb, factorial


# -- integers ----------------------------------------------------------------


def ext_euclid_inverse(a, n):
    """Inverse of a mod n by the extended Euclidean algorithm."""
    r0, r1, s0, s1 = n, a % n, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise ValueError("not invertible")
    return s0 % n


def hensel_sqrt_digits(a, p, m, branch):
    """Square root of a mod p^m congruent to branch, one p-adic digit at a time."""
    r = branch % p
    for k in range(1, m):
        mod = p ** (k + 1)
        for digit in range(p):
            cand = r + digit * p**k
            if (cand * cand - a) % mod == 0:
                r = cand
                break
        else:
            raise ValueError("no lift")
    return r


# -- polynomials over Z/p^m modulo a monic f (coefficient lists, low first) ----


class PolyQuotient:
    """Schoolbook arithmetic in (Z/N)[z]/(f)."""

    def __init__(self, f, modulus):
        self.f = list(f)
        self.d = len(f) - 1
        self.N = modulus

    def reduce(self, a):
        a = [x % self.N for x in a] + [0] * max(0, self.d - len(a))
        for k in range(len(a) - 1, self.d - 1, -1):
            c = a[k]
            if c:
                for i in range(self.d + 1):
                    a[k - self.d + i] -= c * self.f[i]
        return tuple(x % self.N for x in a[: self.d])

    def mul(self, a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return self.reduce(out)

    def add(self, a, b):
        return tuple((x + y) % self.N for x, y in zip(a, b))

    def power(self, a, e):
        out = self.reduce([1])
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def substitute(self, a, image):
        """a(image): the coefficient polynomial of a evaluated at image."""
        acc = self.reduce([0])
        for c in reversed(a):
            acc = self.add(self.mul(acc, image), self.reduce([c]))
        return acc


def minimal_polynomial_fp(vec, field_mul, one, p, d):
    """Monic minimal polynomial over F_p of an element of a degree-d field.

    Linear algebra on the powers 1, a, a^2, ...: the first power that is
    dependent on the earlier ones gives the polynomial.
    """
    powers = [one]
    while True:
        nxt = field_mul(powers[-1], vec)
        # solve sum c_i powers[i] = nxt over F_p by Gaussian elimination
        k = len(powers)
        rows = [[powers[i][r] for i in range(k)] + [nxt[r]] for r in range(d)]
        sol = _solve_fp(rows, k, p)
        if sol is not None:
            return [(-c) % p for c in sol] + [1]
        powers.append(nxt)


def _solve_fp(rows, k, p):
    rows = [list(r) for r in rows]
    piv_cols = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(all(x % p == 0 for x in row[:k]) and row[k] % p for row in rows):
        return None
    if len(piv_cols) < k:
        return None  # earlier powers dependent: caller never gets here
    sol = [0] * k
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][k]
    return sol


# -- lattices ------------------------------------------------------------------


def shortest_vector_2d(b1, b2, span=60):
    """Exhaustive shortest nonzero vector of the lattice spanned by b1, b2."""
    best = None
    for a in range(-span, span + 1):
        for b in range(-span, span + 1):
            if a == 0 and b == 0:
                continue
            v = [a * x + b * y for x, y in zip(b1, b2)]
            n = sum(t * t for t in v)
            if best is None or n < best:
                best = n
    return best


def gram_schmidt_norms(basis):
    """Squared norms of the Gram-Schmidt vectors, exact."""
    stars = []
    for v in basis:
        w = [Fraction(x) for x in v]
        for s in stars:
            ss = sum(x * x for x in s)
            c = sum(Fraction(a) * b for a, b in zip(v, s)) / ss
            w = [a - c * b for a, b in zip(w, s)]
        stars.append(w)
    return [sum(x * x for x in s) for s in stars]


# -- binary forms and transvectants -------------------------------------------
#
# A binary form of degree n is a dict {(i, j): c} for c x^i y^j, i + j = n,
# with coefficients in any field supporting +, -, *, / (Fraction or ModP).


class ModP:
    """Integers mod a prime, enough for the transvectant oracle."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.p = p
        if isinstance(v, Fraction):
            v = v.numerator * pow(v.denominator, -1, p)
        self.v = int(v) % p

    def _c(self, o):
        return o if isinstance(o, ModP) else ModP(o, self.p)

    def __add__(self, o):
        return ModP(self.v + self._c(o).v, self.p)

    __radd__ = __add__

    def __sub__(self, o):
        return ModP(self.v - self._c(o).v, self.p)

    def __rsub__(self, o):
        return ModP(self._c(o).v - self.v, self.p)

    def __mul__(self, o):
        return ModP(self.v * self._c(o).v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return ModP(self.v * pow(self._c(o).v, -1, self.p), self.p)

    def __rtruediv__(self, o):
        return self._c(o) / self

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __pow__(self, e):
        return ModP(pow(self.v, e, self.p), self.p)

    def __eq__(self, o):
        return self.v == self._c(o).v

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        return f"ModP({self.v}, {self.p})"


def form_from_poly(coeffs, n):
    """Homogenize sum c_k x^k to degree n in (x, y)."""
    return {(k, n - k): c for k, c in enumerate(coeffs) if c != 0}


def _diff(form, dx, dy):
    out = {}
    for (i, j), c in form.items():
        if i < dx or j < dy:
            continue
        f = 1
        for t in range(dx):
            f *= i - t
        for t in range(dy):
            f *= j - t
        key = (i - dx, j - dy)
        out[key] = out.get(key, 0) + c * f
    return out


def _mul(f, g):
    out = {}
    for (a, b), c in f.items():
        for (e, h), d in g.items():
            key = (a + e, b + h)
            out[key] = out.get(key, 0) + c * d
    return out


def transvectant(f, g, k, n, m):
    """(f, g)_k for forms of degrees n and m, with the factorial normalization."""
    acc = {}
    for j in range(k + 1):
        term = _mul(_diff(f, k - j, j), _diff(g, j, k - j))
        sign = comb(k, j) * (-1) ** j
        for key, c in term.items():
            acc[key] = acc.get(key, 0) + c * sign
    scale = Fraction(factorial(n - k) * factorial(m - k), factorial(n) * factorial(m))
    return {key: c * scale for key, c in acc.items()}


def _scalar(form):
    return sum(form.values()) if form else 0


def clebsch_invariants(sextic):
    """Clebsch A, B, C, D of a binary sextic given as 7 coefficients (low first)."""
    f = form_from_poly(sextic, 6)
    i = transvectant(f, f, 4, 6, 6)
    delta = transvectant(i, i, 2, 4, 4)
    y1 = transvectant(f, i, 4, 6, 4)
    y2 = transvectant(i, y1, 2, 4, 2)
    y3 = transvectant(i, y2, 2, 4, 2)
    a = _scalar(transvectant(f, f, 6, 6, 6))
    b = _scalar(transvectant(i, i, 4, 4, 4))
    c = _scalar(transvectant(i, delta, 4, 4, 4))
    d = _scalar(transvectant(y3, y1, 2, 2, 2))
    return a, b, c, d


def igusa_clebsch_oracle(sextic):
    """(I2, I4, I6, I10) from the Clebsch invariants (Mestre's conversion)."""
    a, b, c, d = clebsch_invariants(sextic)
    i2 = -120 * a
    i4 = -720 * a**2 + 6750 * b
    i6 = 8640 * a**3 - 108000 * a * b + 202500 * c
    i10 = (-62208 * a**5 + 972000 * a**3 * b + 1620000 * a**2 * c
           - 3037500 * a * b**2 - 6075000 * b * c - 4556250 * d)
    return i2, i4, i6, i10


def absolute_igusa_oracle(sextic):
    """(J2^5/J10, J2^3 J4/J10, J2 J8/J10) of y^2 = sextic, from the transvectant route."""
    i2, i4, i6, i10 = igusa_clebsch_oracle(sextic)
    j2 = i2 / 8
    j4 = (4 * j2**2 - i4) / 96
    j6 = (8 * j2**3 - 160 * j2 * j4 - i6) / 576
    j8 = (j2 * j6 - j4**2) / 4
    j10 = i10 / 4096
    return j2**5 / j10, j2**3 * j4 / j10, j2 * j8 / j10


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def poly_from_roots(roots, one=1):
    out = [one]
    for r in roots:
        out = poly_mul(out, [-r, one])
    return out


def richelot_sextic(g1, g2, g3):
    """Sextic of the Richelot dual: delta^-1 [G2,G3][G3,G1][G1,G2] with [G,H] = G'H - GH'.

    Each G is a list of three coefficients (low first).  delta is the
    determinant of the coefficient matrix.
    """
    def bracket(g, h):
        dg = [g[1], 2 * g[2]]
        dh = [h[1], 2 * h[2]]
        a = poly_mul(dg, h)
        b = poly_mul(g, dh)
        return [x - y for x, y in zip(a, b)]

    mat = [g1, g2, g3]
    delta = (mat[0][0] * (mat[1][1] * mat[2][2] - mat[1][2] * mat[2][1])
             - mat[0][1] * (mat[1][0] * mat[2][2] - mat[1][2] * mat[2][0])
             + mat[0][2] * (mat[1][0] * mat[2][1] - mat[1][1] * mat[2][0]))
    h = poly_mul(poly_mul(bracket(g2, g3), bracket(g3, g1)), bracket(g1, g2))
    h = h + [0 * h[0]] * (7 - len(h))
    return [c / delta for c in h[:7]]


# -- point counting ------------------------------------------------------------


def count_prime_field_points(coeffs, p):
    """Projective points of y^2 = f(x) over F_p (odd-degree f: one point at infinity)."""
    total = 0
    for x in range(p):
        v = sum(c * pow(x, k, p) for k, c in enumerate(coeffs)) % p
        total += sum(1 for y in range(p) if (y * y - v) % p == 0)
    deg = len(coeffs) - 1
    if deg % 2:
        total += 1
    else:
        lead = coeffs[-1] % p
        total += 2 if any((y * y - lead) % p == 0 for y in range(1, p)) else 0
    return total
