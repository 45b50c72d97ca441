"""Generalized Artin-Schreier systems x = N sigma^(+-1)(x) + V over Z_q.

N must vanish mod p, which makes the right-hand side a contraction: each
fixed-point step gains one p-adic digit.  ``solve_as`` instead halves the
precision recursively (Harley's scheme), so the work is dominated by a few
full-precision matrix-vector products.
"""

from dataclasses import dataclass

from .errors import ContractionViolated
from .padic import ZqElem

BASE_PRECISION = 4


@dataclass
class ASSystem:
    N: list  # k x k matrix of ZqElem, entries divisible by p
    V: list  # length-k vector of ZqElem
    direction: int = 1  # +1 for sigma, -1 for sigma^-1
    m: int = 1

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        k = len(self.V)
        if len(self.N) != k or any(len(row) != k for row in self.N):
            raise ValueError("N must be square and match V")
        for row in self.N:
            for x in row:
                if x.m > 0 and not x.reduce().is_zero():
                    raise ContractionViolated("N has an entry that is a unit")


def _apply(N, x, direction, m):
    xs = [xi.frobenius(direction) for xi in x]
    out = []
    for row in N:
        acc = None
        for a, b in zip(row, xs):
            t = a.truncate(min(a.m, m)) * b
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def _trunc(vec, m):
    return [v.truncate(m) for v in vec]


def _naive(N, V, direction, m):
    N = [_trunc(row, m) for row in N]
    V = _trunc(V, m)
    x = V
    for _ in range(m):
        x = [a + b for a, b in zip(_apply(N, x, direction, m), V)]
    return x


def _harley(N, V, direction, m):
    if m <= BASE_PRECISION:
        return _naive(N, V, direction, m)
    m1 = (m + 1) // 2
    x0 = _harley(N, _trunc(V, m1), direction, m1)
    x0 = [xi.pad(m) for xi in x0]
    Nm = [_trunc(row, m) for row in N]
    nx = _apply(Nm, x0, direction, m)
    r = [v.truncate(m) + a - b for v, a, b in zip(V, nx, x0)]
    r = [ri.divide_by_p(m1) for ri in r]
    x1 = _harley(N, r, direction, m - m1)
    return [a + _shift(b, m1, m) for a, b in zip(x0, x1)]


def _shift(b: ZqElem, k, m):
    mod = b.ctx.pm(m)
    pk = b.ctx.pm(k)
    return ZqElem(b.ctx, tuple(x * pk % mod for x in b.c), m)


def residual(sys: ASSystem, x):
    """x - N sigma^(+-1)(x) - V at precision sys.m."""
    x = _trunc(x, sys.m)
    nx = _apply([_trunc(row, sys.m) for row in sys.N], x, sys.direction, sys.m)
    return [a - b - v.truncate(sys.m) for a, b, v in zip(x, nx, sys.V)]


def _check(sys, x):
    if any(not r.is_zero() for r in residual(sys, x)):
        raise AssertionError("Artin-Schreier solution failed its residual check")
    return x


def solve_as(sys: ASSystem):
    """Unique solution mod p^m by divide and conquer on the precision."""
    if sys.m == 0:
        return _trunc(sys.V, 0)
    return _check(sys, _harley(sys.N, sys.V, sys.direction, sys.m))


def solve_as_naive(sys: ASSystem):
    """Same contract as solve_as by m plain fixed-point steps."""
    if sys.m == 0:
        return _trunc(sys.V, 0)
    return _check(sys, _naive(sys.N, sys.V, sys.direction, sys.m))
