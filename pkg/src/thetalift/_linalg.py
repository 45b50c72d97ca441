"""Dense linear algebra over Z/p^k with unit pivots.

Matrices are lists of rows of plain integers.  Every routine here works over a
local ring Z/p^k, so a pivot is usable only when it is nonzero mod p.
"""

from .errors import RankDeficient


def mat_mul(a, b, modulus):
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % modulus for col in cols] for row in a]


def mat_vec(a, v, modulus):
    return [sum(x * y for x, y in zip(row, v)) % modulus for row in a]


def inverse_mod(a, p, k):
    """Inverse of a square matrix over Z/p^k; raises RankDeficient if singular mod p."""
    n = len(a)
    mod = p**k
    aug = [[x % mod for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] % p), None)
        if piv is None:
            raise RankDeficient("matrix is singular modulo p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, mod)
        aug[col] = [x * inv % mod for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % mod for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def pivot_rows(m, p):
    """Indices of rows of a full-column-rank (mod p) tall matrix forming an invertible minor."""
    ncols = len(m[0])
    work = [[x % p for x in row] for row in m]
    chosen = []
    used = set()
    for col in range(ncols):
        piv = next((r for r in range(len(work)) if r not in used and work[r][col]), None)
        if piv is None:
            raise RankDeficient("matrix does not have full column rank modulo p")
        used.add(piv)
        chosen.append(piv)
        inv = pow(work[piv][col], -1, p)
        for r in range(len(work)):
            if r != piv and work[r][col]:
                f = work[r][col] * inv % p
                work[r] = [(x - f * y) % p for x, y in zip(work[r], work[piv])]
    return chosen


class LeftInverse:
    """Solves M c = b for c, given b in the column space of a tall matrix M over Z/p^k."""

    def __init__(self, m, p, k):
        self.m = [list(row) for row in m]
        self.p = p
        self.k = k
        self.modulus = p**k
        self.rows = pivot_rows(self.m, p)
        self.inv = inverse_mod([self.m[r] for r in self.rows], p, k)

    def solve(self, b, k=None):
        """Return c with M c = b mod p^k, or None when b is not in the image."""
        mod = self.modulus if k is None else self.p**k
        c = mat_vec(self.inv, [b[r] for r in self.rows], mod)
        for row, want in zip(self.m, b):
            if (sum(x * y for x, y in zip(row, c)) - want) % mod:
                return None
        return c
