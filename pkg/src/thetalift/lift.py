"""Canonical lifting of theta null points from characteristic 3.

Genus 1 lifts the 2-torsion ratio x = a2/a0 through the quartic relation
between x and its Frobenius image, then recovers a1 from Riemann's relation.

Genus 2 lifts the level-2 triple a = (a02, a20, a22) (with a00 = 1).  The six
odd coordinates are expressed in a by nested square roots (the section Pi),
whose branches are pinned once at the residue level.  Each Newton step
linearises three correspondence relations f(Pi(a), sigma(Pi(a))) = 0 and
solves the resulting Artin-Schreier system for the correction.
"""

import functools
import itertools
import json
import os
from dataclasses import dataclass, field

from .artin_schreier import ASSystem, solve_as
from .errors import (
    ContractionViolated,
    DegenerateInput,
    NoRoot,
    NotOnModuli,
    RankDeficient,
    SingularSpecialFiber,
    SplitLocus,
    Supersingular,
    NoValidTriple,
)
from .finite_field import FqElem, fq_extend, hasse_witt_ordinary
from .padic import ZqContext, ZqElem, zq_context, zq_det, zq_extend, zq_mat_mul, zq_solve
from .relations import (
    CompiledSystem,
    ThetaNull,
    gen_corresp_relations,
    gen_riemann_relations,
    representatives,
)

EXTENSION_DEGREES = (1, 2, 4)

# variable indices (in relation order x00, x01, x02, x10, x11, x12, x13, x20, x21, x22)
# of the nine affine coordinates (a02, a20, a22, a01, a21, a10, a12, a11, a13)
PI_VARS = (2, 7, 9, 1, 8, 3, 5, 4, 6)
TRIPLES = tuple(itertools.combinations(range(5), 3))


@dataclass
class LiftResult:
    g: int
    m: int  # target precision
    ring: ZqContext  # ring carrying the full theta point
    base: ZqContext  # ring of the input field
    embedding: object  # base -> ring
    theta: ThetaNull
    level2: tuple  # base-ring coordinates: (x,) for g=1, (a02, a20, a22) for g=2
    diagnostics: dict = field(default_factory=dict)

    def truncated(self, k):
        """Same result with every coordinate cut to precision k (target m unchanged)."""
        return LiftResult(
            self.g, self.m, self.ring, self.base, self.embedding,
            self.theta.map(lambda v: v.truncate(min(k, v.m))),
            tuple(v.truncate(min(k, v.m)) for v in self.level2),
            dict(self.diagnostics),
        )


def precision_schedule(m):
    """Precisions visited by the doubling loop, ascending: 1, ..., ceil(m/2), m."""
    out = [m]
    while out[-1] > 1:
        out.append((out[-1] + 1) // 2)
    return out[::-1]


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(directory, level, precision, values, diagnostics):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"level_{level:02d}.txt")
    with open(path, "w") as fh:
        fh.write(f"# precision {precision}\n")
        for v in values:
            fh.write(v.to_text() + "\n")
        fh.write("# " + json.dumps(diagnostics, sort_keys=True) + "\n")
    return path


def load_checkpoint(directory, ring, max_precision):
    """Latest checkpoint with precision <= max_precision: (precision, values, diagnostics) or None."""
    if not directory or not os.path.isdir(directory):
        return None
    best = None
    for name in sorted(os.listdir(directory)):
        if not (name.startswith("level_") and name.endswith(".txt")):
            continue
        with open(os.path.join(directory, name)) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        prec = int(lines[0].split()[-1])
        if prec > max_precision:
            continue
        try:
            values = [ring.parse(ln) for ln in lines[1:-1]]
        except Exception:
            continue
        diag = json.loads(lines[-1][2:])
        if best is None or prec > best[0]:
            best = (prec, values, diag)
    return best


# ---------------------------------------------------------------------------
# genus 1


def correspondence_quartic(x, y):
    """x^4 - 4x^3y^3 + 6x^2y^2 - 4xy + y^4."""
    x2, y2 = x * x, y * y
    return x2 * x2 - 4 * x2 * x * y2 * y + 6 * x2 * y2 - 4 * x * y + y2 * y2


def _quartic_partials(x, y):
    x2, y2 = x * x, y * y
    cx = 4 * x2 * x - 12 * x2 * y2 * y + 12 * x * y2 - 4 * y
    cy = -12 * x2 * x * y2 + 12 * x2 * y - 4 * x + 4 * y2 * y
    return cx, cy


def legendre_lambda_residue(xbar):
    return (2 * xbar / (1 + xbar * xbar)) ** 2


def check_g1_input(xbar: FqElem):
    one = xbar.ctx.one
    if xbar.is_zero() or xbar == one or xbar == -one or (xbar * xbar + one).is_zero():
        raise DegenerateInput(f"x = {xbar} gives a degenerate curve", stage="lift")
    lam = legendre_lambda_residue(xbar)
    if not hasse_witt_ordinary([xbar.ctx.zero, one, lam]):
        raise Supersingular(f"x = {xbar} gives a supersingular curve", stage="lift")
    if (xbar.frobenius(2) - xbar).is_zero():
        raise SingularSpecialFiber(f"x = {xbar} lies in F_9, where the special fiber is singular",
                                   stage="lift")


def _fourth_root_branch(rbar, field_ctx, degrees=EXTENSION_DEGREES):
    """Smallest extension degree e with a 4th root of rbar; returns (e, big ctx, emb, s, t)."""
    for e in degrees:
        big, emb = fq_extend(field_ctx, e)
        r = emb(rbar)
        try:
            s0 = r.sqrt()
        except NoRoot:
            continue
        for s in (s0, -s0):
            try:
                return e, big, emb, s, s.sqrt()
            except NoRoot:
                pass
    raise NoRoot("no fourth root in an extension of degree <= 4")


def lift_x_g1(xbar: FqElem, m: int, checkpoint=None):
    """Lift x with C(x, sigma(x)) = 0 mod 3^m.  Returns (x, diagnostics)."""
    ring = zq_context(xbar.ctx, max(m, 1))
    x = ring.lift(xbar, 1)
    diag = {"levels": []}
    sched = precision_schedule(m)
    for level, prec in enumerate(sched[1:], start=1):
        prev = x.m
        x = x.pad(prec)
        phi = correspondence_quartic(x, x.sigma())
        k = prec - prev
        phi1 = phi.divide_by_p(prev)
        xs = x.truncate(k)
        cx, cy = _quartic_partials(xs, xs.sigma())
        if not cx.reduce().is_zero():
            raise ContractionViolated("C_x is not divisible by 3", stage="lift")
        inv = cy.inverse()
        n = -(cx * inv)
        v = -(phi1 * inv)
        u = solve_as(ASSystem([[n]], [v], -1, k))[0]
        delta = u.sigma_inv()
        x = x + _shift(delta, prev, prec)
        diag["levels"].append({"precision": prec})
        if checkpoint:
            checkpoint(level, prec, [x], diag)
    return x, diag


def _shift(b: ZqElem, k, m):
    mod = b.ctx.pm(m)
    pk = b.ctx.pm(k)
    return ZqElem(b.ctx, tuple(v * pk % mod for v in b.c), m)


def lift_theta_g1(xbar: FqElem, m: int, ext_degree=None, checkpoint=None):
    """Canonical lift of the genus-1 theta null point (1 : a1 : x) to precision m."""
    check_g1_input(xbar)
    x, diag = lift_x_g1(xbar, m, checkpoint)
    rbar = xbar * (1 + xbar * xbar) / 2
    degrees = EXTENSION_DEGREES if ext_degree is None else (ext_degree,)
    e, big_fq, _, sbar, tbar = _fourth_root_branch(rbar, xbar.ctx, degrees)
    base = x.ctx
    ring, emb = zq_extend(base, e)
    X = emb(x)
    r = X * (1 + X * X) * ring.from_fraction(1, 2, m)
    a1 = r.sqrt(sbar).sqrt(tbar)
    one = ring.one(m)
    theta = ThetaNull(1, {(0,): one, (1,): a1, (2,): X})
    diag.update({"extension_degree": e, "branches": {"a1^2": sbar.to_text(), "a1": tbar.to_text()}})
    return LiftResult(1, m, ring, base, emb, theta, (x,), diag)


# ---------------------------------------------------------------------------
# genus 2: the section Pi


@dataclass(frozen=True)
class PiBranches:
    """Residue values pinning every square root taken by the section Pi."""

    b01: FqElem
    b20: FqElem
    b22: FqElem
    roots: tuple  # residues of the six inner roots: (r1+, r1-, r2+, r2-, r3+, r3-)

    def odd_coordinates(self):
        half = self.b01.ctx(2).inverse()
        r = self.roots
        return tuple(
            v for i in range(3) for v in ((r[2 * i] + r[2 * i + 1]) * half, (r[2 * i] - r[2 * i + 1]) * half)
        )

    def to_json(self):
        return {
            "b01": self.b01.to_text(), "b20": self.b20.to_text(), "b22": self.b22.to_text(),
            "roots": [r.to_text() for r in self.roots],
        }


def _pi_radicands(a00, a02, a20, a22):
    lam = (a00 * a00 + a02 * a02 + a20 * a20 + a22 * a22) / 2
    p = a00 * a02 + a20 * a22
    q = a00 * a20 + a02 * a22
    r = a00 * a22 + a02 * a20
    return lam, p, q, r


def pi_residue(abar, big=None):
    """Residue-level Pi over the smallest extension (degree 1, 2 or 4) where all roots exist.

    ``abar`` is (a02, a20, a22) over F_q.  Returns (e, big field, embedding, PiBranches).
    The lexicographically smaller square root is taken everywhere.
    """
    ctx = abar[0].ctx
    degrees = EXTENSION_DEGREES if big is None else (big,)
    last = None
    for e in degrees:
        fbig, emb = fq_extend(ctx, e)
        a02, a20, a22 = (emb(v) for v in abar)
        try:
            branches = _pi_branches_in(fbig.one, a02, a20, a22)
        except NoRoot as exc:
            last = exc
            continue
        return e, fbig, emb, branches
    raise last or NoRoot("square roots for Pi need a larger extension")


def _pi_branches_in(one, a02, a20, a22):
    lam, p, q, r = _pi_radicands(one, a02, a20, a22)
    for name, val in (("lambda", lam), ("a00a02+a20a22", p), ("a00a20+a02a22", q), ("a00a22+a02a20", r)):
        if val.is_zero():
            raise SplitLocus(f"{name} vanishes mod 3: the point lies over the split locus", stage="lift")
    b01 = (p / lam).sqrt()
    b20 = (q / lam).sqrt()
    b22 = (r / lam).sqrt()
    roots = []
    for lead, prod in ((b01, b20 * b22), (b20, b01 * b22), (b22, b01 * b20)):
        for s in (1, -1):
            rad = lam * (lead + prod * s)
            if rad.is_zero():
                raise SplitLocus("an inner radicand of Pi vanishes mod 3", stage="lift")
            roots.append(rad.sqrt())
    return PiBranches(b01, b20, b22, tuple(roots))


def branches_from_theta(theta_bar: ThetaNull):
    """PiBranches reproducing a given residue theta point (with a00 = 1)."""
    a = theta_bar
    lam, p, q, r = _pi_radicands(a[(0, 0)], a[(0, 2)], a[(2, 0)], a[(2, 2)])
    b01 = (a[(0, 1)] ** 2 + a[(2, 1)] ** 2) / lam
    b20 = (a[(1, 0)] ** 2 + a[(1, 2)] ** 2) / lam
    b22 = (a[(1, 1)] ** 2 + a[(1, 3)] ** 2) / lam
    roots = (
        a[(0, 1)] + a[(2, 1)], a[(0, 1)] - a[(2, 1)],
        a[(1, 0)] + a[(1, 2)], a[(1, 0)] - a[(1, 2)],
        a[(1, 1)] + a[(1, 3)], a[(1, 1)] - a[(1, 3)],
    )
    return PiBranches(b01, b20, b22, roots)


def pi_section(a, branches: PiBranches):
    """Nine affine coordinates (a02, a20, a22, a01, a21, a10, a12, a11, a13) over Z_q."""
    a02, a20, a22 = a
    ring = a02.ctx
    m = min(v.m for v in a)
    one = ring.one(m)
    lam, p, q, r = _pi_radicands(one, a02, a20, a22)
    if not (lam.is_unit() and p.is_unit() and q.is_unit() and r.is_unit()):
        raise SplitLocus("a radicand of Pi is not a unit", stage="lift")
    inv_lam = lam.inverse()
    b01 = (p * inv_lam).sqrt(branches.b01)
    b20 = (q * inv_lam).sqrt(branches.b20)
    b22 = (r * inv_lam).sqrt(branches.b22)
    half = ring.from_fraction(1, 2, m)
    odd = []
    it = iter(branches.roots)
    for lead, prod in ((b01, b20 * b22), (b20, b01 * b22), (b22, b01 * b20)):
        rp = (lam * (lead + prod)).sqrt(next(it))
        rm = (lam * (lead - prod)).sqrt(next(it))
        odd.extend(((rp + rm) * half, (rp - rm) * half))
    return (a02, a20, a22) + tuple(odd)


def _full_vector(pi_vals, one):
    vec = [None] * 10
    vec[0] = one
    for idx, v in zip(PI_VARS, pi_vals):
        vec[idx] = v
    return vec


_RIEMANN = {}
_CORRESP = {}


def riemann_system(g):
    if g not in _RIEMANN:
        _RIEMANN[g] = CompiledSystem(gen_riemann_relations(g))
    return _RIEMANN[g]


def corresp_system(g):
    if g not in _CORRESP:
        _CORRESP[g] = CompiledSystem(gen_corresp_relations(g))
    return _CORRESP[g]


def _echelon_solve(a, b):
    """Solve A X = B for tall A (unit pivots, full column rank mod p).  RankDeficient otherwise."""
    rows = [list(ra) + list(rb) for ra, rb in zip(a, b)]
    ncols = len(a[0])
    for col in range(ncols):
        piv = next((i for i in range(col, len(rows)) if rows[i][col].is_unit()), None)
        if piv is None:
            raise RankDeficient("Riemann Jacobian block has no unit pivot", stage="lift")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [x * inv for x in rows[col]]
        for i in range(len(rows)):
            if i != col and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return [row[ncols:] for row in rows[:ncols]]


def d_pi(a, branches: PiBranches, pi_vals=None):
    """9 x 3 derivative of Pi at a: identity on top of D_pi, from D_Lambda(Pi(a)) D_Pi(a) = 0."""
    if pi_vals is None:
        pi_vals = pi_section(a, branches)
    ring = a[0].ctx
    m = min(v.m for v in pi_vals)
    vec = _full_vector(pi_vals, ring.one(m))
    jac = riemann_system(2).jacobian(vec, PI_VARS)
    d1 = [row[:3] for row in jac]
    d2 = [row[3:] for row in jac]
    rhs = [[-x for x in row] for row in d1]
    dpi = _echelon_solve(d2, rhs)
    zero, one = ring.zero(m), ring.one(m)
    ident = [[one if i == j else zero for j in range(3)] for i in range(3)]
    return ident + dpi


# ---------------------------------------------------------------------------
# genus 2: split locus

_I = "i"
_GENERATORS = (
    ((1, 1, 0, 0), (-1, 1, 0, 0), (0, 0, 1, 1), (0, 0, -1, 1)),
    ((1, 0, 1, 0), (-1, 0, 1, 0), (0, 1, 0, 1), (0, -1, 0, 1)),
    ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, _I, 0), (0, 0, 0, _I)),
    ((1, 0, 0, 0), (0, _I, 0, 0), (0, 0, _I, 0), (0, 0, 0, 1)),
)


def _generator_matrices(ctx):
    """The four generators over a field containing i = sqrt(-1)."""
    i = (-ctx.one).sqrt()
    return [[[i if e == _I else ctx(e) for e in row] for row in gen] for gen in _GENERATORS]


def _apply_matrix(mat, v):
    return tuple(sum((a * b for a, b in zip(row, v)), v[0] * 0) for row in mat)


def _normalize(v):
    lead = next(x for x in v if not x.is_zero())
    inv = lead.inverse()
    return tuple(x * inv for x in v)


def _field_with_i(ctx):
    try:
        (-ctx.one).sqrt()
        return ctx, None
    except NoRoot:
        return fq_extend(ctx, 2)


# Gaussian integers as (re, im) pairs, exact; used for the orbit of the Segre form


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _gdivmod_round(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    num = _gmul(a, (b[0], -b[1]))
    q = ((2 * num[0] + n) // (2 * n), (2 * num[1] + n) // (2 * n))
    r = _gadd(a, tuple(-x for x in _gmul(q, b)))
    return q, r


def _ggcd(a, b):
    while b != (0, 0):
        _, r = _gdivmod_round(a, b)
        a, b = b, r
    return a


def _gexact_div(a, b):
    q, r = _gdivmod_round(a, b)
    assert r == (0, 0)
    return q


def _gentry(e):
    return (0, 1) if e == _I else (e, 0)


def _normalize_form(form):
    """Divide by the Gaussian content and fix the unit so the first nonzero entry has re > 0, im >= 0."""
    flat = [x for row in form for x in row]
    g = (0, 0)
    for x in flat:
        g = _ggcd(g, x) if g != (0, 0) else x
    form = [[_gexact_div(x, g) for x in row] for row in form]
    lead = next(x for row in form for x in row if x != (0, 0))
    for unit in ((1, 0), (0, 1), (-1, 0), (0, -1)):
        t = _gmul(lead, unit)
        if t[0] > 0 and t[1] >= 0:
            return tuple(tuple(_gmul(x, unit) for x in row) for row in form)
    raise AssertionError("unreachable")


@functools.lru_cache(maxsize=None)
def split_forms():
    """The orbit of the Segre quadric under the generators, as (word, Gram matrix) pairs.

    The Gram matrix G (symmetric, Gaussian integer entries) represents
    v -> v^T G v, and the word w satisfies form_w(v) = segre(M_w v) where
    M_w is the left-to-right product of the generators in w.
    """
    segre = [[(0, 0)] * 4 for _ in range(4)]
    segre[0][3] = segre[3][0] = (1, 0)
    segre[1][2] = segre[2][1] = (-1, 0)
    start = _normalize_form(segre)
    gens = [[[_gentry(e) for e in row] for row in gen] for gen in _GENERATORS]
    seen = {start: ()}
    frontier = [start]
    while frontier:
        nxt = []
        for form in frontier:
            for gi, mat in enumerate(gens):
                # M^T G M
                gm = [[_gsum(_gmul(form[r][k], mat[k][c]) for k in range(4)) for c in range(4)]
                      for r in range(4)]
                img = [[_gsum(_gmul(mat[k][r], gm[k][c]) for k in range(4)) for c in range(4)]
                       for r in range(4)]
                img = _normalize_form(img)
                if img not in seen:
                    seen[img] = seen[form] + (gi,)
                    nxt.append(img)
        frontier = nxt
    return tuple((word, form) for form, word in seen.items())


def _gsum(items):
    acc = (0, 0)
    for x in items:
        acc = _gadd(acc, x)
    return acc


def _to_field(x, i):
    return i * x[1] + x[0]


def detect_split(abar):
    """Word in the four generators moving (1 : a02 : a20 : a22) onto a00 a22 = a02 a20, or None.

    The ten split components are the zero sets of the forms in split_forms();
    the identity (empty word) is tried first.
    """
    ctx = abar[0].ctx
    big, emb = _field_with_i(ctx)
    conv = (lambda v: v) if emb is None else emb
    i = (-big.one).sqrt()
    v = (big.one,) + tuple(conv(x) for x in abar)
    for word, form in split_forms():
        acc = big.zero
        for r in range(4):
            for c in range(4):
                if form[r][c] != (0, 0):
                    acc = acc + _to_field(form[r][c], i) * v[r] * v[c]
        if acc.is_zero():
            return word
    return None


def word_matrix(word, ctx):
    """Left-to-right product of the generators in ``word`` over ctx (which must contain i)."""
    gens = _generator_matrices(ctx)
    mat = [[ctx.one if i == j else ctx.zero for j in range(4)] for i in range(4)]
    for gi in word:
        g = gens[gi]
        mat = [[sum((mat[r][k] * g[k][c] for k in range(4)), ctx.zero) for c in range(4)] for r in range(4)]
    return mat


def lift_split(abar, m, word=(), checkpoint=None):
    """Lift a point on the Segre component as a product of two genus-1 lifts.

    With a non-empty ``word`` the point is first moved onto the Segre
    component; the returned theta point is then in the moved coordinates and
    ``level2`` holds the level-2 part mapped back.
    """
    ctx = abar[0].ctx
    if word:
        big, emb = _field_with_i(ctx)
        conv = (lambda v: v) if emb is None else emb
        mat = word_matrix(word, big)
        pt = _normalize(_apply_matrix(mat, (big.one,) + tuple(conv(v) for v in abar)))
        seg = pt[1:]
    else:
        seg = tuple(abar)
    a02, a20, a22 = seg
    if not (a22 - a02 * a20).is_zero():
        raise SplitLocus("point is not on the Segre component a00 a22 = a02 a20", stage="lift")
    # (1 : x2' : x2 : x2 x2') with x = a20 from the first factor, x' = a02 from the second
    first = lift_theta_g1(a20, m)
    e = first.diagnostics["extension_degree"]
    second = lift_theta_g1(a02, m)
    e = max(e, second.diagnostics["extension_degree"])
    first = lift_theta_g1(a20, m, ext_degree=e) if first.diagnostics["extension_degree"] != e else first
    second = lift_theta_g1(a02, m, ext_degree=e) if second.diagnostics["extension_degree"] != e else second
    ring = first.ring
    coords = {}
    for u in representatives(2):
        coords[u] = first.theta[(u[0],)] * second.theta[(u[1],)]
    theta = ThetaNull(2, coords)
    level2 = (second.level2[0], first.level2[0], first.level2[0] * second.level2[0])
    diag = {
        "route": "split",
        "word": list(word),
        "extension_degree": e,
        "factors": [first.diagnostics, second.diagnostics],
    }
    base = first.base
    emb = first.embedding
    if word:
        diag["note"] = "theta point is given in coordinates moved onto the Segre component"
        level2 = _map_back_level2(level2, word, base, m)
    return LiftResult(2, m, ring, base, emb, theta, level2, diag)


def _map_back_level2(level2, word, base, m):
    """Apply the inverse automorphism to the lifted level-2 point (needs i in the ring)."""
    fq = base.fq
    big, emb = _field_with_i(fq)
    if emb is None:
        ring, zemb = base, None
    else:
        ring, zemb = zq_extend(base, 2)
    conv = (lambda v: v) if zemb is None else zemb
    i_res = (-big.one).sqrt()
    i_lift = ring(-1, m).sqrt(i_res)
    gens = []
    for gen in _GENERATORS:
        gens.append([[i_lift if e == _I else ring(e, m) for e in row] for row in gen])
    mat = [[ring.one(m) if i == j else ring.zero(m) for j in range(4)] for i in range(4)]
    for gi in word:
        g = gens[gi]
        mat = [[sum((mat[r][k] * g[k][c] for k in range(1, 4)), mat[r][0] * g[0][c]) for c in range(4)]
               for r in range(4)]
    inv = zq_solve(mat, [[ring.one(m) if i == j else ring.zero(m) for j in range(4)] for i in range(4)])
    v = (ring.one(m),) + tuple(conv(x) for x in level2)
    w = tuple(sum((inv[r][k] * v[k] for k in range(1, 4)), inv[r][0] * v[0]) for r in range(4))
    lead = w[0].inverse()
    return tuple(x * lead for x in w[1:])


# ---------------------------------------------------------------------------
# genus 2: Newton lifting


def check_g2_input(abar, branches=None, theta_bar=None):
    """Raise for split, supersingular-looking or off-moduli inputs."""
    word = detect_split(abar)
    if word is not None:
        raise SplitLocus(f"point lies on a split component (automorphism word {list(word)})",
                         stage="lift")
    if theta_bar is not None:
        vec = theta_bar.vector()
        if any(not v.is_zero() for v in riemann_system(2).values(vec)):
            raise NotOnModuli("residue theta point violates the Riemann relations", stage="lift")


def lift_theta_g2(abar, m, theta_bar=None, triple=None, checkpoint=None, resume=None):
    """Canonical lift of the level-2 triple (a02, a20, a22) to precision m.

    ``theta_bar`` optionally fixes the odd residue coordinates (and hence every
    square-root branch); otherwise the branches are chosen deterministically.
    ``triple`` forces the three correspondence relations used in Newton's
    method (indices into the five).  ``resume`` is a checkpoint tuple from
    load_checkpoint.
    """
    abar = tuple(abar)
    check_g2_input(abar, theta_bar=theta_bar)
    base_fq = abar[0].ctx
    if theta_bar is not None:
        big_fq = theta_bar[(0, 0)].ctx
        e = big_fq.d // base_fq.d
        _, emb_fq = fq_extend(base_fq, e)
        branches = branches_from_theta(theta_bar.map(lambda v: v / theta_bar[(0, 0)]))
    else:
        e, big_fq, emb_fq, branches = pi_residue(abar)
    base = zq_context(base_fq, max(m, 1))
    ring, emb = zq_extend(base, e)

    corr = corresp_system(2)
    diag = {"route": "generic", "extension_degree": e, "branches": branches.to_json(), "levels": []}

    start_prec = 1
    a = tuple(ring.lift(emb_fq(v), 1) for v in abar)
    if resume is not None:
        start_prec, vals, saved = resume
        a = tuple(vals)
        triple = tuple(saved["triple"]) if saved.get("triple") is not None else triple
        diag["levels"] = list(saved.get("levels", []))
        diag["resumed_from"] = start_prec

    if triple is not None:
        triple = tuple(triple)
        if triple not in TRIPLES:
            raise ValueError(f"triple must be 3 increasing indices in 0..4, got {triple}")

    sched = [p for p in precision_schedule(m) if p > start_prec]
    for level, prec in enumerate(sched, start=1):
        prev = a[0].m
        k = prec - prev
        a = tuple(v.pad(prec) for v in a)
        pi_vals = pi_section(a, branches)
        one = ring.one(prec)
        xvec = _full_vector(pi_vals, one)
        yvec = [v.sigma() for v in xvec]
        phi_all = corr.values(xvec + yvec)
        # Jacobians only matter mod 3^k
        pik = tuple(v.truncate(k) for v in pi_vals)
        ak = tuple(v.truncate(k) for v in a)
        dpi = d_pi(ak, branches, pik)
        dpi_sigma = [[v.sigma() for v in row] for row in dpi]
        xk = [v.truncate(k) for v in xvec]
        yk = [v.truncate(k) for v in yvec]
        powers = {}
        jx = corr.jacobian(xk + yk, PI_VARS, powers)
        jy = corr.jacobian(xk + yk, [10 + j for j in PI_VARS], powers)
        dx_all = zq_mat_mul(jx, dpi)
        dy_all = zq_mat_mul(jy, dpi_sigma)
        if any(not v.reduce().is_zero() for row in dx_all for v in row):
            raise ContractionViolated("D_X is not divisible by 3; input is not ordinary", stage="lift")
        if triple is None:
            triple = _choose_triple(dy_all)
            diag["triple"] = list(triple)
        dx = [dx_all[i] for i in triple]
        dy = [dy_all[i] for i in triple]
        try:
            phi = [phi_all[i].divide_by_p(prev) for i in triple]
        except Exception as exc:
            raise NotOnModuli(f"residual not divisible by 3^{prev}: {exc}", stage="lift") from exc
        sol = zq_solve(dy, [dx[i] + [phi[i]] for i in range(3)])
        n = [[-v for v in row[:3]] for row in sol]
        vv = [-row[3] for row in sol]
        u = solve_as(ASSystem(n, vv, -1, k))
        delta = [x.sigma_inv() for x in u]
        a = tuple(ai + _shift(di, prev, prec) for ai, di in zip(a, delta))
        diag["levels"].append({"precision": prec})
        if checkpoint:
            checkpoint(level, prec, list(a),
                       {"triple": list(triple), "extension_degree": e, "levels": diag["levels"]})
    if triple is not None:
        diag["triple"] = list(triple)

    a = tuple(v.truncate(m) if v.m > m else v for v in a)
    pi_vals = pi_section(a, branches)
    theta = ThetaNull.from_vector(2, _full_vector(pi_vals, ring.one(m)))
    level2 = tuple(emb.preimage(v) for v in a)
    if any(v is None for v in level2):
        raise NotOnModuli("lifted triple does not descend to the base ring", stage="lift")
    return LiftResult(2, m, ring, base, emb, theta, level2, diag)


def _choose_triple(dy_all):
    for t in TRIPLES:
        det = zq_det([dy_all[i] for i in t])
        if det.is_unit():
            return t
    raise NoValidTriple("no three correspondence relations give an invertible D_Y", stage="lift")


# ---------------------------------------------------------------------------


def verify_lift(result: LiftResult, m=None):
    """Recompute Riemann and correspondence residuals; shortfall 0 means all vanish mod 3^m."""
    m = result.m if m is None else m
    g = result.g
    xs = result.theta.vector()
    ys = [v.sigma() for v in xs]
    riem = riemann_system(g).values(xs)
    corr = corresp_system(g).values(xs + ys)
    vals = [v.valuation() if not isinstance(v, int) else m for v in riem + corr]
    worst = min(vals) if vals else m
    shortfall = max(0, m - worst)
    return {
        "shortfall": shortfall,
        "riemann_valuations": [v.valuation() for v in riem],
        "correspondence_valuations": [v.valuation() for v in corr],
    }
