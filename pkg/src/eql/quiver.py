"""Quivers, truncated path series and their representations.

Paths compose left to right: the word ``e1 e2 ... en`` requires
``t(e_k) == s(e_{k+1})`` and acts on a representation as
``u_en @ ... @ u_e1``.  Matrices for an edge ``e`` have shape
``(m_t(e), m_s(e))``.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import NamedTuple

from . import linalg
from .fields import RATIONALS, GaussianRational, Fp


class QuiverError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    source: object
    target: object


class Quiver:
    """Finite directed multigraph ``(V, E, s, t)``."""

    def __init__(self, vertices, edges):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex id")
        vset = set(self.vertices)
        es = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            if e.source not in vset or e.target not in vset:
                raise QuiverError(f"edge {e.id!r} has an endpoint outside the vertex set")
            es.append(e)
        self.edges = tuple(es)
        self._by_id = {e.id: e for e in self.edges}
        if len(self._by_id) != len(self.edges):
            raise QuiverError("duplicate edge id")
        self.edge_ids = tuple(sorted(self._by_id))

    def edge(self, eid):
        try:
            return self._by_id[eid]
        except KeyError:
            raise QuiverError(f"unknown edge {eid!r}") from None

    def source(self, eid):
        return self.edge(eid).source

    def target(self, eid):
        return self.edge(eid).target

    def arrows(self, i, j):
        """The set E_{i,j} of edges from ``i`` to ``j``, sorted by id."""
        return [e.id for e in sorted(self.edges, key=lambda e: e.id)
                if e.source == i and e.target == j]

    def out_edges(self, i):
        return [eid for eid in self.edge_ids if self._by_id[eid].source == i]

    def check_vertex(self, v):
        if v not in self.vertices:
            raise QuiverError(f"unknown vertex {v!r}")

    def __eq__(self, other):
        return (isinstance(other, Quiver) and self.vertices == other.vertices
                and set(self.edges) == set(other.edges))

    def __hash__(self):
        return hash((self.vertices, frozenset(self.edges)))

    def __repr__(self):
        return f"Quiver(vertices={list(self.vertices)}, edges={[(e.id, e.source, e.target) for e in self.edges]})"

    def to_json(self):
        return {"vertices": list(self.vertices),
                "edges": [[e.id, e.source, e.target] for e in self.edges]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["vertices"], [tuple(e) for e in obj["edges"]])


class DimVector:
    """Dimension vector: a non-negative integer per vertex."""

    def __init__(self, quiver, entries):
        if not isinstance(entries, dict):
            entries = dict(zip(quiver.vertices, entries))
        if set(entries) != set(quiver.vertices):
            raise QuiverError("dimension vector must be defined on exactly the vertex set")
        for v, m in entries.items():
            if int(m) != m or m < 0:
                raise QuiverError(f"negative or non-integer entry at vertex {v!r}")
        self.quiver = quiver
        self.entries = {v: int(entries[v]) for v in quiver.vertices}

    def __getitem__(self, v):
        return self.entries[v]

    def as_tuple(self):
        return tuple(self.entries[v] for v in self.quiver.vertices)

    @property
    def total(self):
        return sum(self.entries.values())

    def __eq__(self, other):
        return isinstance(other, DimVector) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"DimVector({self.as_tuple()})"


class PathWord(NamedTuple):
    """A composable edge word; ``start`` is the source vertex (needed for
    the trivial path)."""

    start: object
    edges: tuple

    def __len__(self):
        return len(self.edges)

    def end(self, quiver):
        if not self.edges:
            return self.start
        return quiver.target(self.edges[-1])

    def sort_key(self):
        return (len(self.edges), self.edges, str(self.start))

    def __str__(self):
        if not self.edges:
            return f"ε[{self.start}]"
        return "·".join(self.edges)

    def to_json(self):
        if not self.edges:
            return {"trivial": self.start}
        return list(self.edges)


def word(quiver, edges, start=None):
    """Build and validate a :class:`PathWord`."""
    edges = tuple(edges)
    if not edges:
        if start is None:
            raise QuiverError("trivial path needs a start vertex")
        quiver.check_vertex(start)
        return PathWord(start, ())
    s = quiver.source(edges[0])
    for a, b in zip(edges, edges[1:]):
        if quiver.target(a) != quiver.source(b):
            raise QuiverError(f"edges {a!r}, {b!r} do not compose")
    if start is not None and start != s:
        raise QuiverError("start vertex does not match first edge")
    return PathWord(s, edges)


def word_from_json(quiver, obj):
    if isinstance(obj, dict):
        return word(quiver, (), start=obj["trivial"])
    return word(quiver, obj)


def enumerate_paths(quiver, a, b, max_len):
    """All words from ``a`` to ``b`` of length ``<= max_len``, ordered by
    length then lexicographically by edge ids."""
    quiver.check_vertex(a)
    quiver.check_vertex(b)
    if max_len < 0:
        raise QuiverError("max_len must be non-negative")
    out = []
    layer = [((), a)]
    for n in range(max_len + 1):
        out.extend(PathWord(a, es) for es, end in layer if end == b)
        if n == max_len:
            break
        nxt = []
        for es, end in layer:
            for eid in quiver.out_edges(end):
                nxt.append((es + (eid,), quiver.target(eid)))
        nxt.sort(key=lambda x: x[0])
        layer = nxt
    return out


def all_paths(quiver, max_len, min_len=0):
    """Every word of length in ``[min_len, max_len]`` (any endpoints)."""
    out = []
    for a in quiver.vertices:
        for b in quiver.vertices:
            out.extend(w for w in enumerate_paths(quiver, a, b, max_len) if len(w) >= min_len)
    out.sort(key=PathWord.sort_key)
    return out


def concat(quiver, w1, w2):
    """``w1 w2`` or ``None`` if they do not compose."""
    if w1.end(quiver) != w2.start:
        return None
    return PathWord(w1.start, w1.edges + w2.edges)


class PathSeries:
    """Truncated element of the formal path algebra.

    ``coeffs`` maps :class:`PathWord` to nonzero scalars; every word has
    length ``<= order``.  ``endpoints`` is ``(a, b)`` when the series is
    declared to run from ``a`` to ``b`` and ``None`` for mixed support.
    """

    def __init__(self, quiver, order, coeffs=None, endpoints=None, field=RATIONALS, cyclic=False):
        if order < 0:
            raise QuiverError("truncation order must be non-negative")
        self.quiver = quiver
        self.order = order
        self.field = field
        self.endpoints = tuple(endpoints) if endpoints is not None else None
        self.cyclic = cyclic
        clean = {}
        for w, c in (coeffs or {}).items():
            if not isinstance(w, PathWord):
                w = word(quiver, w)
            if len(w) > order:
                raise QuiverError(f"word {w} exceeds truncation order {order}")
            c = field.coerce(c)
            if c != 0:
                clean[w] = clean.get(w, field.zero) + c
                if clean[w] == 0:
                    del clean[w]
        if self.endpoints is not None:
            a, b = self.endpoints
            for w in clean:
                if w.start != a or w.end(quiver) != b:
                    raise QuiverError(f"word {w} does not run from {a!r} to {b!r}")
        self.coeffs = clean

    @classmethod
    def from_terms(cls, quiver, order, terms, endpoints=None, field=RATIONALS):
        """``terms`` is an iterable of ``(edge tuple or PathWord, coeff)``;
        words longer than ``order`` are dropped."""
        acc = {}
        for w, c in terms:
            if not isinstance(w, PathWord):
                w = word(quiver, w)
            if len(w) > order:
                continue
            acc[w] = acc.get(w, field.zero) + field.coerce(c)
        return cls(quiver, order, acc, endpoints, field)

    def words(self):
        return sorted(self.coeffs, key=PathWord.sort_key)

    def coefficient(self, w):
        if not isinstance(w, PathWord):
            w = word(self.quiver, w)
        return self.coeffs.get(w, self.field.zero)

    def is_zero(self):
        return not self.coeffs

    def min_length(self):
        return min((len(w) for w in self.coeffs), default=None)

    def truncate(self, order):
        return PathSeries(self.quiver, order,
                          {w: c for w, c in self.coeffs.items() if len(w) <= order},
                          self.endpoints, self.field, self.cyclic)

    def _check_compatible(self, other):
        if self.quiver != other.quiver:
            raise QuiverError("quiver mismatch")

    def __add__(self, other):
        self._check_compatible(other)
        n = min(self.order, other.order)
        acc = {w: c for w, c in self.coeffs.items() if len(w) <= n}
        for w, c in other.coeffs.items():
            if len(w) <= n:
                acc[w] = acc.get(w, self.field.zero) + c
        ends = self.endpoints if self.endpoints == other.endpoints else None
        return PathSeries(self.quiver, n, acc, ends, self.field)

    def __neg__(self):
        return PathSeries(self.quiver, self.order, {w: -c for w, c in self.coeffs.items()},
                          self.endpoints, self.field, self.cyclic)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.field.coerce(c)
        return PathSeries(self.quiver, self.order, {w: c * x for w, x in self.coeffs.items()},
                          self.endpoints, self.field, self.cyclic)

    def __mul__(self, other):
        return series_multiply(self, other)

    def __eq__(self, other):
        return (isinstance(other, PathSeries) and self.quiver == other.quiver
                and self.coeffs == other.coeffs)

    def __repr__(self):
        terms = " + ".join(f"{c}*{w}" for w, c in ((w, self.coeffs[w]) for w in self.words()))
        return f"PathSeries(order={self.order}, {terms or '0'})"

    def to_json(self):
        from .fields import format_scalar
        obj = {"order": self.order,
               "terms": [[w.to_json(), format_scalar(self.coeffs[w])] for w in self.words()]}
        if self.endpoints is not None:
            obj["endpoints"] = list(self.endpoints)
        if self.cyclic:
            obj["cyclic"] = True
        return obj

    @classmethod
    def from_json(cls, quiver, obj, field=RATIONALS):
        coeffs = {}
        for w, c in obj["terms"]:
            pw = word_from_json(quiver, w)
            coeffs[pw] = coeffs.get(pw, field.zero) + field.parse(c)
        ends = obj.get("endpoints")
        return cls(quiver, obj["order"], coeffs, ends, field, bool(obj.get("cyclic", False)))


def series_multiply(f, g):
    """Product by concatenation, truncated at the smaller order."""
    if f.quiver != g.quiver:
        raise QuiverError("quiver mismatch")
    q = f.quiver
    n = min(f.order, g.order)
    acc = {}
    z = f.field.zero
    for w1, c1 in f.coeffs.items():
        if len(w1) > n:
            continue
        end = w1.end(q)
        for w2, c2 in g.coeffs.items():
            if w2.start != end or len(w1) + len(w2) > n:
                continue
            w = PathWord(w1.start, w1.edges + w2.edges)
            acc[w] = acc.get(w, z) + c1 * c2
    ends = None
    if f.endpoints is not None and g.endpoints is not None and f.endpoints[1] == g.endpoints[0]:
        ends = (f.endpoints[0], g.endpoints[1])
    return PathSeries(q, n, acc, ends, f.field)


def growth_diagnostic(f):
    """Heuristic growth rate: ``max_n (max |a_w| over |w| = n)^(1/n)``.

    Returned as a rational upper bound for the n-th root (exact when the
    root is rational).  A bounded value across increasing truncations is
    consistent with geometric growth, but a truncation can never prove it.
    """
    best = Fraction(0)
    by_len = {}
    for w, c in f.coeffs.items():
        n = len(w)
        if n == 0:
            continue
        a = _abs_bound(c)
        if a > by_len.get(n, Fraction(0)):
            by_len[n] = a
    for n, a in by_len.items():
        r = _nth_root_upper(a, n)
        if r > best:
            best = r
    return best


def _abs_bound(c):
    """Rational upper bound of ``|c|`` (exact for real rationals)."""
    if isinstance(c, GaussianRational):
        n2 = c.norm()
        return _sqrt_upper(n2)
    if isinstance(c, Fp):
        return Fraction(min(c.v, c.p - c.v))
    return abs(Fraction(c))


def _sqrt_upper(x, denom=10 ** 6):
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    r = Fraction(isqrt(num), isqrt(den)) if _is_square(num) and _is_square(den) else None
    if r is not None:
        return r
    s = isqrt(num * denom * denom // den) + 1
    return Fraction(s, denom)


def _is_square(n):
    return isqrt(n) ** 2 == n


def _nth_root_upper(a, n, bits=40):
    """Smallest dyadic-or-exact rational ``r`` with ``r**n >= a``."""
    a = Fraction(a)
    if a == 0:
        return Fraction(0)
    # exact rational root if one exists
    num = _int_root(a.numerator, n)
    den = _int_root(a.denominator, n)
    if num is not None and den is not None:
        return Fraction(num, den)
    lo, hi = Fraction(0), max(Fraction(1), a)
    for _ in range(bits):
        mid = (lo + hi) / 2
        if mid ** n >= a:
            hi = mid
        else:
            lo = mid
    return hi


def _int_root(k, n):
    r = round(k ** (1.0 / n))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** n == k:
            return c
    return None


class Representation:
    """Point of Rep_Q(m): a matrix ``u_e`` of shape ``(m_t, m_s)`` per edge."""

    def __init__(self, quiver, dims, matrices, field=RATIONALS):
        if not isinstance(dims, DimVector):
            dims = DimVector(quiver, dims)
        self.quiver = quiver
        self.dims = dims
        self.field = field
        mats = {}
        for e in quiver.edges:
            m = matrices.get(e.id)
            rows, cols = dims[e.target], dims[e.source]
            if m is None:
                m = linalg.zeros(rows, cols, field)
            else:
                m = [[field.coerce(x) for x in r] for r in m]
                if len(m) != rows or any(len(r) != cols for r in m):
                    raise QuiverError(f"matrix for edge {e.id!r} must be {rows}x{cols}")
            mats[e.id] = m
        extra = set(matrices) - set(quiver._by_id)
        if extra:
            raise QuiverError(f"matrices given for unknown edges {sorted(extra)}")
        self.matrices = mats

    def dim(self, v):
        return self.dims[v]

    def matrix(self, eid):
        return self.matrices[eid]

    def path_matrix(self, w):
        """``u_en @ ... @ u_e1`` for ``w = e1...en``; identity for trivial."""
        F = self.field
        if not w.edges:
            return linalg.identity(self.dims[w.start], F)
        m = self.matrices[w.edges[0]]
        for eid in w.edges[1:]:
            m = linalg.matmul(self.matrices[eid], m, F, inner=self.dims[self.quiver.source(eid)])
        return m

    def __eq__(self, other):
        return (isinstance(other, Representation) and self.quiver == other.quiver
                and self.dims == other.dims and self.matrices == other.matrices)

    def __repr__(self):
        return f"Representation(dims={self.dims.as_tuple()}, matrices={self.matrices})"

    def to_json(self):
        from .fields import format_scalar
        return {"dims": {str(v): self.dims[v] for v in self.quiver.vertices},
                "matrices": {eid: [[format_scalar(x) for x in r] for r in self.matrices[eid]]
                             for eid in self.quiver.edge_ids}}

    @classmethod
    def from_json(cls, quiver, obj, field=RATIONALS):
        dims_raw = obj["dims"]
        if isinstance(dims_raw, dict):
            lookup = {str(k): v for k, v in dims_raw.items()}
            dims = {v: lookup[str(v)] for v in quiver.vertices}
        else:
            dims = dict(zip(quiver.vertices, dims_raw))
        mats = {eid: [[field.parse(x) for x in r] for r in m] for eid, m in obj.get("matrices", {}).items()}
        return cls(quiver, dims, mats, field)


def evaluate_series(f, rep, a, b):
    """Matrix ``sum_w a_w u_w`` over words from ``a`` to ``b``
    (shape ``(m_b, m_a)``)."""
    if f.quiver != rep.quiver:
        raise QuiverError("series and representation live on different quivers")
    F = rep.field
    out = linalg.zeros(rep.dims[b], rep.dims[a], F)
    q = f.quiver
    cache = {}
    for w in sorted(f.coeffs, key=PathWord.sort_key):
        if w.start != a or w.end(q) != b:
            continue
        c = F.coerce(f.coeffs[w])
        m = _cached_path(rep, w, cache)
        for i, row in enumerate(m):
            orow = out[i]
            for j, x in enumerate(row):
                if x != 0:
                    orow[j] = orow[j] + c * x
    return out


def _cached_path(rep, w, cache):
    if w in cache:
        return cache[w]
    if len(w.edges) <= 1:
        m = rep.path_matrix(w)
    else:
        prefix = PathWord(w.start, w.edges[:-1])
        last = w.edges[-1]
        m = linalg.matmul(rep.matrices[last], _cached_path(rep, prefix, cache), rep.field,
                          inner=rep.dims[rep.quiver.source(last)])
    cache[w] = m
    return m


def gauge_act(g, rep):
    """``u'_e = g_t(e)^{-1} u_e g_s(e)``; ``g`` maps vertex to invertible matrix."""
    F = rep.field
    inv = {}
    for v in rep.quiver.vertices:
        gv = g[v]
        n = rep.dims[v]
        if len(gv) != n or any(len(r) != n for r in gv):
            raise QuiverError(f"gauge component at {v!r} must be {n}x{n}")
        if n:
            try:
                inv[v] = linalg.inverse([[F.coerce(x) for x in r] for r in gv], F)
            except ZeroDivisionError:
                raise QuiverError(f"gauge component at {v!r} is singular") from None
        else:
            inv[v] = []
    mats = {}
    for e in rep.quiver.edges:
        s, t = e.source, e.target
        m = linalg.matmul(inv[t], rep.matrices[e.id], F, inner=rep.dims[t])
        gs = [[F.coerce(x) for x in r] for r in g[s]]
        mats[e.id] = linalg.matmul(m, gs, F, inner=rep.dims[s])
    return Representation(rep.quiver, rep.dims, mats, F)


def random_invertible(n, field, rng, bound=3):
    while True:
        m = [[field.random(rng, bound) for _ in range(n)] for _ in range(n)]
        if linalg.is_invertible(m, field) or n == 0:
            return m


def random_gauge(rep, rng, bound=3):
    return {v: random_invertible(rep.dims[v], rep.field, rng, bound) for v in rep.quiver.vertices}


def random_representation(quiver, dims, field, rng, bound=3, density=1.0):
    if not isinstance(dims, DimVector):
        dims = DimVector(quiver, dims)
    mats = {}
    for e in quiver.edges:
        mats[e.id] = [[(field.random(rng, bound) if rng.random() < density else field.zero)
                       for _ in range(dims[e.source])] for _ in range(dims[e.target])]
    return Representation(quiver, dims, mats, field)


def zero_representation(quiver, dims, field=RATIONALS):
    return Representation(quiver, dims, {}, field)


# convenience constructors used by fixtures and tests

def loop_quiver(n_loops=1, vertex=1):
    names = ["e"] if n_loops == 1 else [f"e{k}" for k in range(1, n_loops + 1)]
    return Quiver([vertex], [(nm, vertex, vertex) for nm in names])


def a2_quiver():
    return Quiver([1, 2], [("a", 1, 2)])


def two_cycle_quiver():
    return Quiver([1, 2], [("a", 1, 2), ("b", 2, 1)])

