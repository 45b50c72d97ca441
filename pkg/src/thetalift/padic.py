"""Truncated unramified p-adic rings Z_q = Z_p[z]/(F) to precision p^m.

F is the residue modulus with its integer representatives kept as they are,
so the reduction step stays as sparse as the residue modulus.  The Frobenius
substitution is a linear map on the power basis; its matrix (columns are
powers of sigma(z)) is computed once per context and truncated on demand.
"""

import functools
import re

import gmpy2
from gmpy2 import mpz

from ._linalg import LeftInverse
from .errors import (
    BranchMismatch,
    ContextMismatch,
    NonUnit,
    NonUnitInverse,
    PrecisionError,
    RankDeficient,
)
from .finite_field import FqContext, FqElem, fq_extend


class ZqContext:
    """Z_q at precision up to ``m_max`` over the residue field ``fq``."""

    def __init__(self, fq: FqContext, m_max: int):
        if m_max < 1:
            raise ValueError("m_max must be >= 1")
        self.fq = fq
        self.p = fq.p
        self.d = fq.d
        self.m_max = int(m_max)
        self.modulus = tuple(mpz(c) for c in fq.modulus)
        self._tail = tuple((i, mpz(-c)) for i, c in enumerate(fq.modulus[:-1]) if c)
        self._pow = [mpz(1)]
        self._sigma_cache = {}
        self._sigma_inv_cache = {}
        self._sigma_gen = None
        self._sigma_inv_gen = None

    # m_max is a capacity: contexts over the same residue field are the same ring
    def __eq__(self, other):
        return self is other or (isinstance(other, ZqContext) and self.fq == other.fq)

    def __hash__(self):
        return hash(self.fq)

    def __repr__(self):
        return f"ZqContext(p={self.p}, d={self.d}, m_max={self.m_max})"

    def pm(self, m):
        while len(self._pow) <= m:
            self._pow.append(self._pow[-1] * self.p)
        return self._pow[m]

    # -- construction --------------------------------------------------------

    def _check_m(self, m):
        if m is None:
            return self.m_max
        if m < 0 or m > self.m_max:
            raise PrecisionError(f"precision {m} outside [0, {self.m_max}]")
        return m

    def __call__(self, value, m=None):
        m = self._check_m(m)
        if isinstance(value, ZqElem):
            if value.ctx != self:
                raise ContextMismatch("element belongs to another ring")
            return value.truncate(min(m, value.m))
        if isinstance(value, FqElem):
            return self.lift(value, m)
        mod = self.pm(m)
        if isinstance(value, int) or isinstance(value, type(mpz(0))):
            return ZqElem(self, (mpz(value) % mod,) + (mpz(0),) * (self.d - 1), m)
        if isinstance(value, str):
            return self.parse(value)
        coeffs = [mpz(c) % mod for c in value]
        if len(coeffs) > self.d:
            raise ValueError(f"expected at most {self.d} coefficients")
        return ZqElem(self, tuple(coeffs) + (mpz(0),) * (self.d - len(coeffs)), m)

    def zero(self, m=None):
        return self(0, m)

    def one(self, m=None):
        return self(1, m)

    def gen(self, m=None):
        if self.d == 1:
            return self(self.fq.gen.c[0], m)
        return self([0, 1], m)

    def lift(self, x: FqElem, m=None):
        """Integer representatives in [0, p) of the residue coefficients."""
        if x.ctx != self.fq:
            raise ContextMismatch("residue element is not in this ring's residue field")
        m = self._check_m(m)
        return ZqElem(self, tuple(mpz(c) for c in x.c), m)

    def from_fraction(self, num, den, m=None):
        m = self._check_m(m)
        mod = self.pm(m)
        den = mpz(den)
        if den % self.p == 0:
            raise NonUnitInverse(f"denominator {den} is divisible by p")
        return self(mpz(num) * gmpy2.invert(den, mod), m)

    def random_element(self, rng, m=None):
        m = self._check_m(m)
        mod = int(self.pm(m))
        return ZqElem(self, tuple(mpz(rng.randrange(mod)) for _ in range(self.d)), m)

    def random_unit(self, rng, m=None):
        while True:
            a = self.random_element(rng, m)
            if a.is_unit():
                return a

    # -- internals -----------------------------------------------------------

    def _reduce(self, r, mod):
        d = self.d
        for k in range(len(r) - 1, d - 1, -1):
            c = r[k] % mod
            if c:
                base = k - d
                for i, g in self._tail:
                    r[base + i] += c * g
        return tuple(x % mod for x in r[:d])

    def _mul(self, a, b, m):
        mod = self.pm(m)
        if self.d == 1:
            return (a[0] * b[0] % mod,)
        bits = 2 * int(mod).bit_length() + self.d.bit_length() + 1
        prod = gmpy2.unpack(gmpy2.pack(list(a), bits) * gmpy2.pack(list(b), bits), bits)
        r = list(prod) + [mpz(0)] * (2 * self.d - 1 - len(prod))
        return self._reduce(r, mod)

    def _hensel_root(self, seed: FqElem):
        """Root of the lifted modulus congruent to ``seed``, at precision m_max."""
        one = self.one()
        x = self.lift(seed)
        f = [self(int(c)) for c in self.modulus]
        df = [f[i] * i for i in range(1, len(f))]
        prec = 1
        while prec < self.m_max:
            prec = min(2 * prec, self.m_max)
            xs = x.pad(prec)
            val = _horner(f, xs, one.truncate(prec))
            der = _horner(df, xs, one.truncate(prec))
            x = xs - val * der.inverse()
        return x

    @property
    def sigma_gen(self):
        if self._sigma_gen is None:
            self._sigma_gen = self._hensel_root(self.fq.gen ** self.p) if self.d > 1 else self.gen()
        return self._sigma_gen

    @property
    def sigma_inv_gen(self):
        if self._sigma_inv_gen is None:
            if self.d > 1:
                self._sigma_inv_gen = self._hensel_root(self.fq.gen.frobenius(self.d - 1))
            else:
                self._sigma_inv_gen = self.gen()
        return self._sigma_inv_gen

    @staticmethod
    def _power_matrix(g):
        cols, cur = [], g.ctx.one()
        for _ in range(g.ctx.d):
            cols.append(cur.c)
            cur = cur * g
        return [list(r) for r in zip(*cols)]

    def _sigma_matrix(self, m, inverse=False):
        cache = self._sigma_inv_cache if inverse else self._sigma_cache
        mat = cache.get(m)
        if mat is None:
            full = cache.get(self.m_max)
            if full is None:
                full = self._power_matrix(self.sigma_inv_gen if inverse else self.sigma_gen)
                cache[self.m_max] = full
            mod = self.pm(m)
            mat = [[x % mod for x in row] for row in full]
            cache[m] = mat
        return mat

    # -- text format ---------------------------------------------------------

    def parse(self, text):
        m = re.fullmatch(r"\s*(\d+)\^(\d+)@(\d+):\[([^\]]*)\]\s*", text)
        if not m:
            raise ValueError(f"cannot parse p-adic element {text!r}")
        p, d, prec = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if p != self.p or d != self.d:
            raise ContextMismatch(f"element {text!r} is not in Z_{self.p}^{self.d}")
        vals = [int(v) for v in m.group(4).split(",")]
        if len(vals) != self.d:
            raise ValueError(f"expected {self.d} coefficients in {text!r}")
        return self(vals, prec)

    def extend(self, e):
        return zq_extend(self, e)


def _horner(coeffs, x, one):
    acc = one * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class ZqElem:
    __slots__ = ("ctx", "c", "m")

    def __init__(self, ctx, coeffs, m):
        self.ctx = ctx
        self.c = coeffs
        self.m = m

    def _coerce(self, other):
        if isinstance(other, ZqElem):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextMismatch("operands live in different rings")
            return other
        if isinstance(other, int):
            return self.ctx(other, self.m)
        return NotImplemented

    def truncate(self, m):
        if m > self.m:
            raise PrecisionError(f"cannot raise precision from {self.m} to {m}")
        if m == self.m:
            return self
        mod = self.ctx.pm(m)
        return ZqElem(self.ctx, tuple(x % mod for x in self.c), m)

    def pad(self, m):
        """Same integer coefficients read at a higher precision m (for Newton iterations)."""
        return ZqElem(self.ctx, self.c, m)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = min(self.m, other.m)
        mod = self.ctx.pm(m)
        return ZqElem(self.ctx, tuple((x + y) % mod for x, y in zip(self.c, other.c)), m)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = min(self.m, other.m)
        mod = self.ctx.pm(m)
        return ZqElem(self.ctx, tuple((x - y) % mod for x, y in zip(self.c, other.c)), m)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        mod = self.ctx.pm(self.m)
        return ZqElem(self.ctx, tuple((-x) % mod for x in self.c), self.m)

    def __mul__(self, other):
        if isinstance(other, int):
            mod = self.ctx.pm(self.m)
            return ZqElem(self.ctx, tuple(x * other % mod for x in self.c), self.m)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = min(self.m, other.m)
        a, b = self.c, other.c
        if other.m > m:
            mod = self.ctx.pm(m)
            b = tuple(x % mod for x in b)
        elif self.m > m:
            mod = self.ctx.pm(m)
            a = tuple(x % mod for x in a)
        return ZqElem(self.ctx, self.ctx._mul(a, b, m), m)

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
        result = self.ctx.one(self.m)
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
            other = self.ctx(other, self.m)
        if not isinstance(other, ZqElem):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        m = min(self.m, other.m)
        mod = self.ctx.pm(m)
        return all((x - y) % mod == 0 for x, y in zip(self.c, other.c))

    def __hash__(self):
        return hash((self.c, self.m))

    def __repr__(self):
        return self.to_text()

    def to_text(self):
        return f"{self.ctx.p}^{self.ctx.d}@{self.m}:[{','.join(str(int(x)) for x in self.c)}]"

    def is_zero(self):
        return not any(self.c)

    def is_unit(self):
        return self.m > 0 and bool(self.reduce())

    def valuation(self):
        """min p-adic valuation of the coefficients (m if the element is 0 mod p^m)."""
        v = self.m
        for x in self.c:
            if x:
                v = min(v, int(gmpy2.remove(x, self.ctx.p)[1]))
        return v

    def reduce(self) -> FqElem:
        p = self.ctx.p
        return FqElem(self.ctx.fq, tuple(int(x % p) for x in self.c))

    def divide_by_p(self, k=1):
        """Exact division by p^k; the result has precision m - k."""
        pk = self.ctx.pm(k)
        if any(x % pk for x in self.c):
            raise NonUnit(f"element is not divisible by p^{k}")
        return ZqElem(self.ctx, tuple(x // pk for x in self.c), self.m - k)

    def mul_p(self, k=1):
        """Multiply by p^k; precision grows by k (capped at m_max)."""
        m = min(self.m + k, self.ctx.m_max)
        mod = self.ctx.pm(m)
        pk = self.ctx.pm(k)
        return ZqElem(self.ctx, tuple(x * pk % mod for x in self.c), m)

    def inverse(self):
        if not self.is_unit():
            raise NonUnitInverse("element is not a unit")
        x = self.ctx.lift(self.reduce().inverse(), min(1, self.m))
        prec = 1
        while prec < self.m:
            prec = min(2 * prec, self.m)
            a = self.truncate(prec)
            x = ZqElem(self.ctx, x.c, prec)
            x = x * (2 - a * x)
        return ZqElem(self.ctx, x.c, self.m) if x.m != self.m else x

    def sqrt(self, branch: FqElem):
        """Square root congruent to ``branch`` mod p (Hensel on the inverse square root)."""
        if not self.is_unit():
            raise NonUnit("square roots are only taken of units")
        if branch.ctx != self.ctx.fq:
            raise ContextMismatch("branch lives in another residue field")
        if branch * branch != self.reduce():
            raise BranchMismatch(f"branch {branch} does not square to {self.reduce()}")
        y = self.ctx.lift(branch.inverse(), 1)
        prec = 1
        while prec < self.m:
            prec = min(2 * prec, self.m)
            a = self.truncate(prec)
            y = ZqElem(self.ctx, y.c, prec)
            y = y * (3 - a * y * y) * int((self.ctx.pm(prec) + 1) // 2)
        return self * ZqElem(self.ctx, y.c, self.m)

    def frobenius(self, k=1):
        """sigma^k(self); negative k uses the precomputed inverse substitution."""
        ctx = self.ctx
        if ctx.d == 1:
            return self
        k %= ctx.d
        if k == 0:
            return self
        inverse = k > ctx.d // 2
        steps = ctx.d - k if inverse else k
        mat = ctx._sigma_matrix(self.m, inverse)
        mod = ctx.pm(self.m)
        c = self.c
        for _ in range(steps):
            c = tuple(sum(x * y for x, y in zip(row, c)) % mod for row in mat)
        return ZqElem(ctx, c, self.m)

    def sigma(self):
        return self.frobenius(1)

    def sigma_inv(self):
        return self.frobenius(-1)


# ---------------------------------------------------------------------------


class ZqEmbedding:
    """Ring embedding Z_q -> Z_Q induced by a residue embedding, lifted by Hensel."""

    def __init__(self, src: ZqContext, dst: ZqContext, residue_embedding):
        self.src = src
        self.dst = dst
        self.residue = residue_embedding
        if src.d == 1:
            self.image_of_gen = dst(int(src.gen().c[0]))
        else:
            f = [dst(int(c)) for c in src.modulus]
            df = [f[i] * i for i in range(1, len(f))]
            x = dst.lift(residue_embedding.image_of_gen)
            one = dst.one()
            prec = 1
            while prec < dst.m_max:
                prec = min(2 * prec, dst.m_max)
                xs = x.pad(prec)
                x = xs - _horner(f, xs, one.truncate(prec)) * _horner(df, xs, one.truncate(prec)).inverse()
            self.image_of_gen = x
        cols, cur = [], dst.one()
        for _ in range(src.d):
            cols.append(cur.c)
            cur = cur * self.image_of_gen
        self._matrix = [list(r) for r in zip(*cols)]
        self._left = None

    def __call__(self, a: ZqElem) -> ZqElem:
        if a.ctx != self.src:
            raise ContextMismatch("element is not in the embedding's source ring")
        mod = self.dst.pm(a.m)
        c = tuple(sum(x * y for x, y in zip(row, a.c)) % mod for row in self._matrix)
        return ZqElem(self.dst, c, a.m)

    def preimage(self, b: ZqElem):
        """Element of the source mapping to b, or None if b is not in the image."""
        if self._left is None:
            self._left = LeftInverse([[int(x) for x in row] for row in self._matrix],
                                     self.dst.p, self.dst.m_max)
        c = self._left.solve([int(x) for x in b.c], b.m)
        return None if c is None else self.src(c, b.m)


def zq_extend(ctx: ZqContext, e: int):
    """Unramified extension of relative degree e plus the embedding of ctx into it."""
    return _zq_extend(ctx, ctx.m_max, e)


@functools.lru_cache(maxsize=None)
def _zq_extend(ctx, m_max, e):
    big_fq, emb = fq_extend(ctx.fq, e)
    big = ctx if e == 1 else ZqContext(big_fq, ctx.m_max)
    return big, ZqEmbedding(ctx, big, emb)


@functools.lru_cache(maxsize=None)
def zq_context(fq: FqContext, m_max: int) -> ZqContext:
    """Shared context per (residue field, precision) so cached matrices are reused."""
    return ZqContext(fq, m_max)


# ---------------------------------------------------------------------------
# small dense linear algebra over Z_q (lists of lists of ZqElem)


def zq_mat_mul(a, b):
    cols = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in cols:
            acc = row[0] * col[0]
            for x, y in zip(row[1:], col[1:]):
                acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def zq_mat_vec(a, v):
    out = []
    for row in a:
        acc = row[0] * v[0]
        for x, y in zip(row[1:], v[1:]):
            acc = acc + x * y
        out.append(acc)
    return out


def zq_solve(a, b):
    """Solve A X = B for square A over Z_q (B a matrix); RankDeficient if A is singular mod p."""
    n = len(a)
    aug = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col].is_unit()), None)
        if piv is None:
            raise RankDeficient("matrix is singular modulo p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def zq_det(a):
    """Determinant of a small square matrix (cofactor expansion; used for 3x3 pivot tests)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * zq_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total
