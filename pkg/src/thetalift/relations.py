"""Level-4 theta relations for dimension g.

Two families are produced by one enumerator over index tuples:

* Riemann relations, quartic in the coordinates x_u of a theta null point;
* degree-3 correspondence relations, bilinear in x_u and y_u, where y stands
  for the Frobenius image of the same point.

Coordinates satisfy x_u = x_{-u}, so only the representative min(u, -u) of
each pair is used as a variable.  Variables are ordered row-major over
(Z/4)^g restricted to representatives, x's before y's.

Text syntax for polynomials (one relation per line)::

    poly  := term (("+" | "-") term)*
    term  := factor ("*" factor)*
    factor:= atom ["^" integer]
    atom  := integer | var | "(" poly ")"
    var   := ("x" | "y") digit{g}

Output uses no parentheses; the parser accepts them and an optional "=".
"""

import itertools
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field

from .errors import MissingSecondPoint

# ---------------------------------------------------------------------------
# index arithmetic on (Z/4)^g


def _add(a, b):
    return tuple((x + y) % 4 for x, y in zip(a, b))


def _neg(a):
    return tuple((-x) % 4 for x in a)


def rep(u):
    """Symmetry representative of u: the smaller of u and -u."""
    u = tuple(x % 4 for x in u)
    return min(u, _neg(u))


def representatives(g):
    return sorted({rep(u) for u in itertools.product(range(4), repeat=g)})


def _two_torsion(g):
    return list(itertools.product((0, 2), repeat=g))


def _even(u):
    return all(c % 2 == 0 for c in u)


def in_s(x, y, z):
    """(x, y, z) lies in S: x - 2y, x + y - z, x + y + z all in the image of (Z/2)^g."""
    return _even(_s_key(x, y, z))


def _s_key(x, y, z):
    return tuple(
        tuple((a - 2 * b) % 4 for a, b in zip(x, y))
        + tuple((a + b - c) % 4 for a, b, c in zip(x, y, z))
        + tuple((a + b + c) % 4 for a, b, c in zip(x, y, z))
    )


def _triple(x, y, z):
    return (
        tuple((a - 2 * b) % 4 for a, b in zip(x, y)),
        tuple((a + b - c) % 4 for a, b, c in zip(x, y, z)),
        tuple((a + b + c) % 4 for a, b, c in zip(x, y, z)),
    )


def _quad(v, w, x, y):
    return (
        tuple((a + b) % 4 for a, b in zip(v, w)),
        tuple((a - b) % 4 for a, b in zip(v, w)),
        tuple((a + b) % 4 for a, b in zip(x, y)),
        tuple((a - b) % 4 for a, b in zip(x, y)),
    )


def in_s_prime(v, w, x, y):
    """(v, w, x, y) lies in S': v + w, v - w, x + y, x - y all in the image of (Z/2)^g."""
    return all(_even(c) for c in _quad(v, w, x, y))


def riemann_classes(g):
    """Equivalence classes of S' under permutation of (v+w, v-w, x+y, x-y)."""
    z4 = list(itertools.product(range(4), repeat=g))
    t2 = _two_torsion(g)
    classes = defaultdict(list)
    for v in z4:
        for t in t2:
            w = _add(_neg(v), t)
            for x in z4:
                for s in t2:
                    y = _add(_neg(x), s)
                    classes[tuple(sorted(_quad(v, w, x, y)))].append((v, w, x, y))
    return dict(classes)


def corresp_classes(g):
    """Classes of S with a fixed first entry x, under permutation of (x-2y, x+y-z, x+y+z)."""
    z4 = list(itertools.product(range(4), repeat=g))
    t2 = _two_torsion(g)
    classes = defaultdict(list)
    for x in z4:
        for y in z4:
            if not _even(tuple((a - 2 * b) % 4 for a, b in zip(x, y))):
                continue
            for t in t2:
                # x + y - z even forces z = x + y + t
                z = _add(_add(x, y), t)
                key = (x, tuple(sorted(_triple(x, y, z))))
                classes[key].append((x, y, z))
    return dict(classes)


# ---------------------------------------------------------------------------
# sparse integer polynomials


@dataclass(frozen=True)
class RelationPoly:
    """Sparse integer polynomial in x_u (and y_u) for u over symmetry representatives."""

    g: int
    terms: tuple  # ((coeff, exponent tuple of length 2n), ...) sorted by decreasing monomial
    kind: str = "riemann"

    @property
    def nvars(self):
        return len(representatives(self.g))

    @classmethod
    def from_dict(cls, g, d, kind):
        terms = tuple(sorted(((c, e) for e, c in d.items() if c), key=lambda t: _mono_key(t[1]),
                             reverse=True))
        return cls(g, terms, kind)

    def as_dict(self):
        return {e: c for c, e in self.terms}

    def is_zero(self):
        return not self.terms

    def normalized(self):
        if not self.terms:
            return self
        content = 0
        for c, _ in self.terms:
            content = math.gcd(content, c)
        sign = 1 if self.terms[0][0] > 0 else -1
        return RelationPoly(self.g, tuple((c // content * sign, e) for c, e in self.terms), self.kind)

    def __neg__(self):
        return RelationPoly(self.g, tuple((-c, e) for c, e in self.terms), self.kind)

    def __sub__(self, other):
        d = defaultdict(int, self.as_dict())
        for c, e in other.terms:
            d[e] -= c
        return RelationPoly.from_dict(self.g, d, self.kind)

    def degree(self):
        return max((sum(e) for _, e in self.terms), default=0)

    def derivative(self, j):
        d = defaultdict(int)
        for c, e in self.terms:
            if e[j]:
                e2 = list(e)
                e2[j] -= 1
                d[tuple(e2)] += c * e[j]
        return RelationPoly.from_dict(self.g, d, self.kind)

    def evaluate(self, xs, ys=None):
        """Evaluate at coordinate vectors (variable order); ring elements or ints."""
        vals = list(xs) + (list(ys) if ys is not None else [None] * len(xs))
        total = None
        for c, e in self.terms:
            t = None
            for v, k in zip(vals, e):
                if k:
                    if v is None:
                        raise MissingSecondPoint("relation involves y but no second point given")
                    f = v ** k if k > 1 else v
                    t = f if t is None else t * f
            t = c if t is None else t * c
            total = t if total is None else total + t
        return 0 if total is None else total

    def to_text(self):
        names = variable_names(self.g)
        out = []
        for i, (c, e) in enumerate(self.terms):
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            mag = abs(c)
            body = "*".join(factors)
            if not body:
                body = str(mag)
            elif mag != 1:
                body = f"{mag}*{body}"
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append(("- " if c < 0 else "+ ") + body)
        return " ".join(out) if out else "0"

    def __str__(self):
        return self.to_text()


def _mono_key(e):
    return (sum(e), e)


def variable_names(g):
    reps = representatives(g)
    xs = ["x" + "".join(map(str, u)) for u in reps]
    ys = ["y" + "".join(map(str, u)) for u in reps]
    return xs + ys


def parse_poly(text, g, kind=None):
    """Parse the documented text syntax; sides of an '=' are subtracted."""
    if "=" in text:
        lhs, rhs = text.split("=", 1)
        a, b = parse_poly(lhs, g, kind), parse_poly(rhs, g, kind)
        diff = a - b
        return RelationPoly(g, diff.terms, kind or _guess_kind(diff))
    names = variable_names(g)
    index = {n: i for i, n in enumerate(names)}
    d = defaultdict(int)
    expanded = _expand(text.replace(" ", ""), index, len(names))
    for e, c in expanded.items():
        d[e] += c
    poly = RelationPoly.from_dict(g, d, "riemann")
    return RelationPoly(g, poly.terms, kind or _guess_kind(poly))


def _guess_kind(poly):
    n = len(poly.terms[0][1]) // 2 if poly.terms else 0
    return "correspondence" if any(any(e[n:]) for _, e in poly.terms) else "riemann"


def _expand(text, index, nvars):
    """Tiny recursive-descent expander supporting + - * ^ and parentheses."""
    pos = 0

    def peek():
        return text[pos] if pos < len(text) else ""

    def poly_add(a, b, sign=1):
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0) + sign * c
        return {e: c for e, c in out.items() if c}

    def poly_mul(a, b):
        out = defaultdict(int)
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                out[tuple(x + y for x, y in zip(e1, e2))] += c1 * c2
        return {e: c for e, c in out.items() if c}

    def expr():
        nonlocal pos
        sign = 1
        if peek() in "+-":
            sign = -1 if peek() == "-" else 1
            pos += 1
        acc = {e: sign * c for e, c in term().items()}
        while peek() in ("+", "-") and peek():
            sign = -1 if peek() == "-" else 1
            pos += 1
            acc = poly_add(acc, term(), sign)
        return acc

    def term():
        nonlocal pos
        acc = factor()
        while peek() == "*" or peek() == "(" or (peek() and peek() in "xy"):
            if peek() == "*":
                pos += 1
            acc = poly_mul(acc, factor())
        return acc

    def factor():
        nonlocal pos
        base = atom()
        if peek() == "^":
            pos += 1
            m = re.match(r"\d+", text[pos:])
            pos += m.end()
            out = {(0,) * nvars: 1}
            for _ in range(int(m.group())):
                out = poly_mul(out, base)
            return out
        return base

    def atom():
        nonlocal pos
        if peek() == "(":
            pos += 1
            inner = expr()
            if peek() != ")":
                raise ValueError(f"unbalanced parentheses in {text!r}")
            pos += 1
            return inner
        m = re.match(r"\d+", text[pos:])
        if m:
            pos += m.end()
            return {(0,) * nvars: int(m.group())}
        m = re.match(r"[xy]\d+", text[pos:])
        if m and m.group() in index:
            pos += m.end()
            e = [0] * nvars
            e[index[m.group()]] = 1
            return {tuple(e): 1}
        raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")

    result = expr()
    if pos != len(text):
        raise ValueError(f"trailing input in polynomial: {text[pos:]!r}")
    return result


# ---------------------------------------------------------------------------
# generation


def _var_index(g):
    return {u: i for i, u in enumerate(representatives(g))}


def _bilinear(pairs, g, nvars, kind):
    """Sum over (first, second) index pairs of the product of the two coordinates."""
    idx = _var_index(g)
    d = defaultdict(int)
    for a, b in pairs:
        e = [0] * (2 * nvars)
        if kind == "correspondence":
            e[nvars + idx[rep(a)]] += 1  # y = Frobenius image
            e[idx[rep(b)]] += 1
        else:
            e[idx[rep(a)]] += 1
            e[idx[rep(b)]] += 1
        d[tuple(e)] += 1
    return RelationPoly.from_dict(g, d, kind)


def _product(p, q):
    d = defaultdict(int)
    for c1, e1 in p.terms:
        for c2, e2 in q.terms:
            d[tuple(x + y for x, y in zip(e1, e2))] += c1 * c2
    return RelationPoly.from_dict(p.g, d, p.kind)


def _poly_key(poly):
    return tuple((_mono_key(e), c) for c, e in poly.terms)


def _star_relations(expressions):
    """Differences of each distinct expression against the largest one (graded-lex)."""
    distinct = {}
    for e in expressions:
        distinct[e.terms] = e
    exprs = sorted(distinct.values(), key=_poly_key, reverse=True)
    if len(exprs) < 2:
        return []
    center = exprs[0]
    return [center - other for other in exprs[1:]]


def _dedupe(rels):
    seen = {}
    for r in rels:
        r = r.normalized()
        if r.terms and r.terms not in seen:
            seen[r.terms] = r
    return sorted(seen.values(), key=_poly_key, reverse=True)


def gen_riemann_relations(g):
    """Level-4 Riemann relations in normal form (content 1, positive leading term)."""
    nvars = len(representatives(g))
    t2 = _two_torsion(g)
    rels = []
    classes = _classes_cache(g, "r")
    # the same bilinear factors and products recur across a class; build each once
    factors, products = {}, {}

    def factor(a, b):
        if (a, b) not in factors:
            factors[(a, b)] = _bilinear([(_add(a, t), _add(b, t)) for t in t2], g, nvars, "riemann")
        return factors[(a, b)]

    for key in sorted(classes):
        exprs = []
        for v, w, x, y in classes[key]:
            left, right = factor(v, w), factor(x, y)
            pk = (left.terms, right.terms)
            if pk not in products:
                products[pk] = _product(left, right)
            exprs.append(products[pk])
        rels.extend(_star_relations(exprs))
    return _dedupe(rels)


def gen_corresp_relations(g):
    """Degree-3 correspondence relations, bilinear in (x, y = Frobenius image of x)."""
    nvars = len(representatives(g))
    t2 = _two_torsion(g)
    rels = []
    classes = _classes_cache(g, "c")
    for key in sorted(classes):
        exprs = [
            _bilinear([(_add(y, u), _add(z, u)) for u in t2], g, nvars, "correspondence")
            for _, y, z in classes[key]
        ]
        rels.extend(_star_relations(exprs))
    return _dedupe(rels)


_CLASS_CACHE = {}


def _classes_cache(g, which):
    key = (g, which)
    if key not in _CLASS_CACHE:
        _CLASS_CACHE[key] = riemann_classes(g) if which == "r" else corresp_classes(g)
    return _CLASS_CACHE[key]


# ---------------------------------------------------------------------------
# theta null points and evaluation


@dataclass
class ThetaNull:
    """Symmetric theta null point indexed by (Z/4)^g; stores representatives only."""

    g: int
    coords: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for u, val in self.coords.items():
            if isinstance(u, int):
                u = (u,)
            u = tuple(c % 4 for c in u)
            r = rep(u)
            if r in clean and clean[r] != val:
                raise ValueError(f"coordinates at {u} and {_neg(u)} differ; theta null points are symmetric")
            clean[r] = val
        missing = [u for u in representatives(self.g) if u not in clean]
        if missing:
            raise ValueError(f"missing coordinates {missing}")
        self.coords = clean

    @classmethod
    def from_vector(cls, g, values):
        return cls(g, dict(zip(representatives(g), values)))

    def __getitem__(self, u):
        if isinstance(u, int):
            u = (u,)
        return self.coords[rep(u)]

    def vector(self):
        return [self.coords[u] for u in representatives(self.g)]

    def map(self, fn):
        return ThetaNull(self.g, {u: fn(v) for u, v in self.coords.items()})


def _vec(point):
    return point.vector() if isinstance(point, ThetaNull) else list(point)


def eval_relations(rels, x, y=None):
    xs = _vec(x)
    ys = _vec(y) if y is not None else None
    if ys is None and any(r.kind == "correspondence" for r in rels):
        raise MissingSecondPoint("correspondence relations need the Frobenius image point")
    return [r.evaluate(xs, ys) for r in rels]


def relation_jacobian(rels, x, y=None, which="x"):
    """Matrix of partial derivatives: rows are relations, columns the x (or y) variables."""
    xs = _vec(x)
    ys = _vec(y) if y is not None else None
    n = len(xs)
    offset = 0 if which == "x" else n
    if ys is None and any(r.kind == "correspondence" for r in rels):
        raise MissingSecondPoint("correspondence relations need the Frobenius image point")
    return [[r.derivative(offset + j).evaluate(xs, ys) for j in range(n)] for r in rels]


def relations_text(rels):
    return "\n".join(r.to_text() for r in rels)


class CompiledSystem:
    """Fast repeated evaluation of a fixed list of polynomials and their partials."""

    def __init__(self, rels):
        self.rels = list(rels)
        self._terms = [self._compile(r) for r in self.rels]
        self._partials = {}

    @staticmethod
    def _compile(poly):
        return [(c, tuple((j, k) for j, k in enumerate(e) if k)) for c, e in poly.terms]

    @staticmethod
    def _run(compiled, vals, powers):
        total = None
        for c, factors in compiled:
            t = None
            for j, k in factors:
                key = (j, k)
                f = powers.get(key)
                if f is None:
                    v = vals[j]
                    if v is None:
                        raise MissingSecondPoint("relation involves y but no second point given")
                    f = v if k == 1 else v ** k
                    powers[key] = f
                t = f if t is None else t * f
            t = c if t is None else t * c
            total = t if total is None else total + t
        return total

    def values(self, vals, powers=None):
        powers = {} if powers is None else powers
        out = []
        for comp in self._terms:
            v = self._run(comp, vals, powers)
            out.append(0 if v is None else v)
        return out

    def jacobian(self, vals, cols, powers=None):
        """Rows: relations; columns: the variable indices listed in ``cols``."""
        powers = {} if powers is None else powers
        zero = None
        rows = []
        for i, r in enumerate(self.rels):
            row = []
            for j in cols:
                comp = self._partials.get((i, j))
                if comp is None:
                    comp = self._compile(r.derivative(j))
                    self._partials[(i, j)] = comp
                v = self._run(comp, vals, powers)
                if v is None or isinstance(v, int):
                    if zero is None:
                        ref = next(x for x in vals if x is not None)
                        zero = ref * 0
                    v = zero + (v or 0)
                row.append(v)
            rows.append(row)
        return rows
