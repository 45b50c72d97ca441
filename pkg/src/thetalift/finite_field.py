"""Finite fields F_q = F_p[z]/(f) for odd p.

Elements are dense little-endian coefficient tuples.  Multiplication packs
both operands into one big integer (Kronecker substitution) and reduces the
product with the sparse tail of the modulus, so a sparse modulus keeps the
reduction cheap.
"""

import functools
import re

import gmpy2

from ._linalg import LeftInverse
from .errors import (
    ContextMismatch,
    EvenCharacteristic,
    NoRoot,
    NotIrreducible,
    NotPrime,
    SingularCurve,
    ZeroInverse,
)

# ---------------------------------------------------------------------------
# polynomials over F_p, little-endian lists of ints


def _trim(a):
    while a and not a[-1]:
        a.pop()
    return a


def fp_poly_mul(a, b, p):
    if not a or not b:
        return []
    r = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                r[i + j] += x * y
    return _trim([x % p for x in r])


def fp_poly_divmod(a, b, p):
    a = [x % p for x in a]
    _trim(a)
    b = _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    if len(a) <= db:
        return [], a
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv % p
        if c:
            q[k - db] = c
            for i, y in enumerate(b):
                a[k - db + i] = (a[k - db + i] - c * y) % p
    return _trim(q), _trim(a[:db])


def fp_poly_gcd(a, b, p):
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, fp_poly_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def fp_poly_powmod(base, e, mod, p):
    result = [1]
    base = fp_poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = fp_poly_divmod(fp_poly_mul(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = fp_poly_divmod(fp_poly_mul(base, base, p), mod, p)[1]
    return result


def _prime_factors(n):
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f, p):
    """Rabin's test for a monic polynomial over F_p."""
    f = _trim([x % p for x in f])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]

    def frob_iter(k):
        h = x
        for _ in range(k):
            h = fp_poly_powmod(h, p, f, p)
        return h

    if fp_poly_divmod(frob_iter(d), f, p)[1] != x:
        return False
    for r in _prime_factors(d):
        h = frob_iter(d // r)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(fp_poly_gcd(f, _trim(diff), p)) > 1:
            return False
    return True


def sparse_irreducible(p, n):
    """Deterministically pick a sparse irreducible monic polynomial of degree n over F_p.

    Trinomials x^n + a x^k + b are tried first (k ascending), then
    tetranomials.
    """
    if n == 1:
        return (0, 1)
    for k in range(1, n):
        for a in range(1, p):
            for b in range(1, p):
                f = [0] * (n + 1)
                f[0], f[k], f[n] = b, a, 1
                if is_irreducible(f, p):
                    return tuple(f)
    for k in range(2, n):
        for j in range(1, k):
            for a in range(1, p):
                for c in range(1, p):
                    for b in range(1, p):
                        f = [0] * (n + 1)
                        f[0], f[j], f[k], f[n] = b, c, a, 1
                        if is_irreducible(f, p):
                            return tuple(f)
    raise NotIrreducible(f"no sparse irreducible polynomial of degree {n} over F_{p}")


# ---------------------------------------------------------------------------


class FqContext:
    """The field F_p[z]/(modulus).  Immutable; compare by (p, modulus)."""

    def __init__(self, p, modulus, name="z"):
        p = int(p)
        if p < 2 or not gmpy2.is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p == 2:
            raise EvenCharacteristic("characteristic 2 is not supported")
        coeffs = _trim([int(c) % p for c in modulus])
        if len(coeffs) < 2:
            raise NotIrreducible("modulus must have degree at least 1")
        if coeffs[-1] != 1:
            raise NotIrreducible("modulus must be monic")
        if not is_irreducible(coeffs, p):
            raise NotIrreducible(f"modulus {coeffs} is reducible over F_{p}")
        self.p = p
        self.d = len(coeffs) - 1
        self.q = p**self.d
        self.modulus = tuple(coeffs)
        self.name = name
        # z^d == sum(c * z^i for i, c in self._tail)
        self._tail = tuple((i, (-c) % p) for i, c in enumerate(coeffs[:-1]) if c)
        self._bits = (self.d * (p - 1) ** 2).bit_length() + 1
        self.zero = FqElem(self, (0,) * self.d)
        self.one = FqElem(self, (1,) + (0,) * (self.d - 1))
        self.gen = self._gen()

    def _gen(self):
        if self.d == 1:
            return FqElem(self, ((-self.modulus[0]) % self.p,))
        return FqElem(self, (0, 1) + (0,) * (self.d - 2))

    def __eq__(self, other):
        return self is other or (
            isinstance(other, FqContext) and self.p == other.p and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"FqContext(p={self.p}, d={self.d}, modulus={list(self.modulus)})"

    # -- element construction ------------------------------------------------

    def __call__(self, value):
        if isinstance(value, FqElem):
            if value.ctx != self:
                raise ContextMismatch("element belongs to another field")
            return value
        if isinstance(value, int):
            return FqElem(self, (value % self.p,) + (0,) * (self.d - 1))
        if isinstance(value, str):
            return self.parse(value)
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.d:
            raise ValueError(f"expected at most {self.d} coefficients")
        return FqElem(self, tuple(coeffs) + (0,) * (self.d - len(coeffs)))

    def from_index(self, k):
        """Element whose coefficient vector is the base-p digit expansion of k."""
        out = []
        for _ in range(self.d):
            k, r = divmod(k, self.p)
            out.append(r)
        return FqElem(self, tuple(out))

    def elements(self):
        for k in range(self.q):
            yield self.from_index(k)

    def random_element(self, rng):
        return FqElem(self, tuple(rng.randrange(self.p) for _ in range(self.d)))

    # -- low level -------------------------------------------------------------

    def _reduce(self, r):
        p, d = self.p, self.d
        for k in range(len(r) - 1, d - 1, -1):
            c = r[k] % p
            if c:
                base = k - d
                for i, g in self._tail:
                    r[base + i] += c * g
        return tuple(int(x % p) for x in r[:d])

    def _mul(self, a, b):
        if self.d == 1:
            return ((a[0] * b[0]) % self.p,)
        bits = self._bits
        prod = gmpy2.unpack(gmpy2.pack(list(a), bits) * gmpy2.pack(list(b), bits), bits)
        r = list(prod) + [0] * (2 * self.d - 1 - len(prod))
        return self._reduce(r)

    @functools.cached_property
    def _frobenius_matrix(self):
        # columns: coefficient vectors of (z^i)^p
        zp = self.gen ** self.p
        cols, cur = [], self.one
        for _ in range(self.d):
            cols.append(cur.c)
            cur = cur * zp
        return [list(r) for r in zip(*cols)]

    @functools.cached_property
    def nonresidue(self):
        k = 1
        while True:
            e = self.from_index(k)
            if not e.is_square():
                return e
            k += 1

    # -- text format ---------------------------------------------------------

    def parse(self, text):
        """Parse ``p^d:[c0,...]``, ``z^k``, ``z`` or an integer."""
        text = text.strip()
        m = re.fullmatch(r"(\d+)\^(\d+):\[([^\]]*)\]", text)
        if m:
            p, d = int(m.group(1)), int(m.group(2))
            if p != self.p or d != self.d:
                raise ContextMismatch(f"element {text!r} is not in F_{self.p}^{self.d}")
            body = m.group(3).strip()
            vals = [int(v) for v in body.split(",")] if body else []
            if len(vals) != self.d:
                raise ValueError(f"expected {self.d} coefficients in {text!r}")
            return self(vals)
        m = re.fullmatch(re.escape(self.name) + r"(?:\^(\d+))?", text)
        if m:
            return self.gen ** int(m.group(1) or 1)
        if re.fullmatch(r"-?\d+", text):
            return self(int(text))
        raise ValueError(f"cannot parse field element {text!r}")

    def extend(self, e):
        """Extension of relative degree e and the embedding of self into it."""
        return fq_extend(self, e)


class FqElem:
    __slots__ = ("ctx", "c")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.c = coeffs

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextMismatch("operands live in different fields")
            return other
        if isinstance(other, int):
            return self.ctx(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ctx.p
        return FqElem(self.ctx, tuple((x + y) % p for x, y in zip(self.c, other.c)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ctx.p
        return FqElem(self.ctx, tuple((x - y) % p for x, y in zip(self.c, other.c)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        p = self.ctx.p
        return FqElem(self.ctx, tuple((-x) % p for x in self.c))

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.ctx.p
            return FqElem(self.ctx, tuple(x * other % p for x in self.c))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FqElem(self.ctx, self.ctx._mul(self.c, other.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, e):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ctx.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.ctx == other.ctx and self.c == other.c

    def __hash__(self):
        return hash((self.ctx.p, self.c))

    def __bool__(self):
        return any(self.c)

    def is_zero(self):
        return not any(self.c)

    def __repr__(self):
        return self.to_text()

    def to_text(self):
        return f"{self.ctx.p}^{self.ctx.d}:[{','.join(map(str, self.c))}]"

    def key(self):
        """Lexicographic sort key on the little-endian coefficient vector."""
        return self.c

    def inverse(self):
        if self.is_zero():
            raise ZeroInverse("zero has no inverse")
        p, f = self.ctx.p, list(self.ctx.modulus)
        # extended Euclid on (a, f), tracking the coefficient of a
        r0, r1 = f, _trim(list(self.c))
        s0, s1 = [], [1]
        while r1:
            q, r = fp_poly_divmod(r0, r1, p)
            r0, r1 = r1, r
            qs = fp_poly_mul(q, s1, p)
            n = max(len(s0), len(qs))
            s0, s1 = s1, _trim([((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)) % p
                                for i in range(n)])
        inv = pow(r0[0], -1, p)
        s = [x * inv % p for x in s0]
        return self.ctx(s)

    def frobenius(self, k=1):
        """self^(p^k)."""
        ctx = self.ctx
        k %= ctx.d
        if k == 0 or ctx.d == 1:
            return self
        mat = ctx._frobenius_matrix
        p = ctx.p
        c = self.c
        for _ in range(k):
            c = tuple(sum(x * y for x, y in zip(row, c)) % p for row in mat)
        return FqElem(ctx, c)

    def is_square(self):
        if self.is_zero():
            return True
        return self ** ((self.ctx.q - 1) // 2) == self.ctx.one

    def sqrt(self):
        """Square root with the lexicographically smaller coefficient vector; NoRoot otherwise."""
        if self.is_zero():
            return self
        ctx = self.ctx
        q = ctx.q
        if self ** ((q - 1) // 2) != ctx.one:
            raise NoRoot(f"{self} is not a square in F_{ctx.p}^{ctx.d}")
        s, t = 0, q - 1
        while t % 2 == 0:
            s, t = s + 1, t // 2
        z = ctx.nonresidue ** t
        x = self ** ((t + 1) // 2)
        b = self ** t
        m = s
        while b != ctx.one:
            i, b2 = 0, b
            while b2 != ctx.one:
                b2 = b2 * b2
                i += 1
            g = z ** (1 << (m - i - 1))
            x = x * g
            z = g * g
            b = b * z
            m = i
        y = -x
        return x if x.c <= y.c else y

    def minimal_polynomial(self):
        """Minimal polynomial over F_p (monic, little-endian) by linear algebra on powers."""
        ctx = self.ctx
        p = ctx.p
        powers = [ctx.one.c]
        cur = ctx.one
        while True:
            cur = cur * self
            # solve cur = sum a_i powers[i] over F_p
            rows = [list(col) for col in zip(*powers)]
            sol = _solve_fp(rows, list(cur.c), p)
            if sol is not None:
                return tuple([(-x) % p for x in sol] + [1])
            powers.append(cur.c)


def _solve_fp(m, b, p):
    """Solve m x = b over F_p (m: rows x cols), or None if inconsistent."""
    rows, cols = len(m), len(m[0])
    aug = [list(r) + [v] for r, v in zip(m, b)]
    piv_cols = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] % p), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [x * inv % p for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] % p:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(aug[i][cols] % p for i in range(r, rows)):
        return None
    x = [0] * cols
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][cols]
    return x


# ---------------------------------------------------------------------------
# polynomials over F_q (lists of FqElem, little-endian) for root finding


def _pq_trim(a):
    while a and a[-1].is_zero():
        a.pop()
    return a


def _pq_mul(a, b, ctx):
    if not a or not b:
        return []
    r = [ctx.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                r[i + j] = r[i + j] + x * y
    return _pq_trim(r)


def _pq_mod(a, f):
    a = list(a)
    inv = f[-1].inverse()
    df = len(f) - 1
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k] * inv
        if c:
            for i, y in enumerate(f):
                a[k - df + i] = a[k - df + i] - c * y
    return _pq_trim(a[:df])


def _pq_divexact(a, f):
    a = list(a)
    inv = f[-1].inverse()
    df = len(f) - 1
    q = [None] * (len(a) - df)
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k] * inv
        q[k - df] = c
        if c:
            for i, y in enumerate(f):
                a[k - df + i] = a[k - df + i] - c * y
    return q


def _pq_monic(a):
    inv = a[-1].inverse()
    return [x * inv for x in a]


def _pq_gcd(a, b):
    a, b = _pq_trim(list(a)), _pq_trim(list(b))
    while b:
        a, b = b, _pq_mod(a, b)
    return _pq_monic(a) if a else a


def _pq_powmod(base, e, f, ctx):
    result = [ctx.one]
    base = _pq_mod(base, f)
    while e:
        if e & 1:
            result = _pq_mod(_pq_mul(result, base, ctx), f)
        e >>= 1
        if e:
            base = _pq_mod(_pq_mul(base, base, ctx), f)
    return result


def _find_root(f, ctx):
    """One root of a monic squarefree polynomial over F_q splitting into linear factors."""
    f = _pq_monic(f)
    k = 0
    while len(f) > 2:
        c = ctx.from_index(k)
        k += 1
        h = _pq_powmod([c, ctx.one], (ctx.q - 1) // 2, f, ctx)
        h = list(h) + [ctx.zero] * max(0, 1 - len(h))
        h[0] = h[0] - ctx.one
        g = _pq_gcd(f, _pq_trim(h))
        if 1 < len(g) < len(f):
            other = _pq_divexact(f, g)
            f = g if len(g) <= len(other) else _pq_monic(other)
    return -f[0] / f[1]


class Embedding:
    """Ring embedding F_p[z]/(f) -> big field given by the image of z."""

    def __init__(self, src, dst, image_of_gen):
        self.src = src
        self.dst = dst
        self.image_of_gen = image_of_gen
        cols, cur = [], dst.one
        for _ in range(src.d):
            cols.append(cur.c)
            cur = cur * image_of_gen
        self._matrix = [list(r) for r in zip(*cols)]
        self._left = None

    def __call__(self, a):
        if a.ctx != self.src:
            raise ContextMismatch("element is not in the embedding's source field")
        p = self.dst.p
        return FqElem(self.dst, tuple(sum(x * y for x, y in zip(row, a.c)) % p for row in self._matrix))

    def preimage(self, b):
        """Inverse image of b, or None if b is not in the subfield."""
        if self._left is None:
            self._left = LeftInverse(self._matrix, self.dst.p, 1)
        c = self._left.solve(list(b.c))
        return None if c is None else self.src(c)


def _identity_embedding(ctx):
    return Embedding(ctx, ctx, ctx.gen)


@functools.lru_cache(maxsize=None)
def fq_extend(ctx, e):
    """Return (big context of degree d*e, embedding ctx -> big).

    The big field gets a deterministic sparse modulus; z is sent to the
    lexicographically smallest root of ctx.modulus in the big field.
    """
    if e < 1:
        raise ValueError("extension degree must be >= 1")
    if e == 1:
        return ctx, _identity_embedding(ctx)
    big = FqContext(ctx.p, sparse_irreducible(ctx.p, ctx.d * e), name="t")
    f = [big(c) for c in ctx.modulus]
    root = _find_root(f, big)
    roots = [root]
    for _ in range(ctx.d - 1):
        roots.append(roots[-1].frobenius())
    return big, Embedding(ctx, big, min(roots, key=lambda r: r.c))


# ---------------------------------------------------------------------------


def _poly_from_roots(roots, ctx):
    poly = [ctx.one]
    for r in roots:
        shifted = [ctx.zero] + poly
        for i, c in enumerate(poly):
            shifted[i] = shifted[i] - r * c
        poly = shifted
    return poly


def _poly_pow(f, e, ctx):
    result = [ctx.one]
    for _ in range(e):
        result = _pq_mul(result, f, ctx)
    return result


def hasse_witt_ordinary(curve, ctx=None):
    """Ordinarity of y^2 = f(x) via the Cartier-Manin matrix.

    ``curve`` is either the roots of f (3 for a cubic, 5 for a quintic) or the
    little-endian coefficients of f (4, 6 or 7 entries).  Returns True iff the
    g x g matrix M[i][j] = [x^(i p - j)] f^((p-1)/2) is invertible.
    """
    curve = list(curve)
    if ctx is None:
        ctx = next(c.ctx for c in curve if isinstance(c, FqElem))
    vals = [ctx(c) for c in curve]
    if len(vals) in (3, 5):
        for i in range(len(vals)):
            for j in range(i):
                if vals[i] == vals[j]:
                    raise SingularCurve("repeated root")
        f = _poly_from_roots(vals, ctx)
    elif len(vals) in (4, 6, 7):
        f = _pq_trim(vals)
        df = [f[i] * i for i in range(1, len(f))]
        if len(_pq_gcd(f, _pq_trim(df))) > 1:
            raise SingularCurve("f has a repeated root")
    else:
        raise ValueError("expected 3 or 5 roots, or 4, 6 or 7 coefficients")
    g = (len(f) - 2) // 2
    p = ctx.p
    h = _poly_pow(f, (p - 1) // 2, ctx)

    def coef(k):
        return h[k] if 0 <= k < len(h) else ctx.zero

    m = [[coef(i * p - j) for j in range(1, g + 1)] for i in range(1, g + 1)]
    if g == 1:
        det = m[0][0]
    else:
        det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return not det.is_zero()
