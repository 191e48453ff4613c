"""Cyclic pairings, superpotentials and the critical-locus identity.

Every product entering a relation, the Maurer-Cartan defect or a
potential coefficient is weighted by ``mc_sign(n) = (-1)^(n(n-1)/2)``,
which turns ``sum_n mc_sign(n) m_n(x, ..., x)`` into the Maurer-Cartan
equation of the Keller sign convention (``dx - x x = 0`` for a
dg-algebra).  The weight depends only on the arity, so it does not
affect cyclicity.

Representations of the Ext-quiver are matched with degree-1 elements
``x = sum_e e_dual (x) u_e`` of ``H (x) End(V)^op``: the edge attached to
the class ``e_dual`` in block ``(i, j)`` runs from ``i`` to ``j``, and
``m_n(e1, ..., en) (x) u_en ... u_e1`` is the contribution of the word
``e1 ... en``.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .dga import mc_sign
from .fields import GAUSSIAN_RATIONALS, RATIONALS, GaussianRational
from .quiver import PathSeries, PathWord, Quiver, QuiverError, evaluate_series, word
from .report import failed, passed


class PotentialError(ValueError):
    pass


class CyclicPairing:
    """Bilinear form on the basis of ``H`` of degree ``-degree``.

    ``entries[(a, b)]`` is ``(h_a, h_b)``.  The recorded symmetry
    convention is ``(a, b) = (-1)^{|a||b|} (b, a)``.
    """

    def __init__(self, degrees, entries, degree=3, blocks=None, field=RATIONALS):
        self.degrees = list(degrees)
        self.degree = degree
        self.blocks = list(blocks) if blocks is not None else [None] * len(self.degrees)
        self.field = field
        self.entries = {k: field.coerce(v) for k, v in entries.items() if v != 0}

    def __call__(self, a, b):
        return self.entries.get((a, b), self.field.zero)

    def pair(self, vec, b):
        s = self.field.zero
        for a, c in vec.items():
            x = self.entries.get((a, b))
            if x is not None:
                s = s + c * x
        return s

    def scaled(self, c):
        return CyclicPairing(self.degrees, {k: c * v for k, v in self.entries.items()},
                             self.degree, self.blocks, self.field)

    def with_row_scaled(self, a, c):
        ent = {k: (c * v if k[0] == a else v) for k, v in self.entries.items()}
        return CyclicPairing(self.degrees, ent, self.degree, self.blocks, self.field)

    def _partners(self, a):
        blk = self.blocks[a]
        want = None if blk is None else (blk[1], blk[0])
        return [b for b in range(len(self.degrees))
                if self.degrees[b] == self.degree - self.degrees[a] and self.blocks[b] == want]

    def check(self):
        """Nondegeneracy between complementary degrees and graded symmetry."""
        name = "pairing"
        for (a, b), v in self.entries.items():
            if self.degrees[a] + self.degrees[b] != self.degree:
                return failed(name, {"check": "degree", "pair": [a, b]})
            w = self.entries.get((b, a), self.field.zero)
            sign = -1 if (self.degrees[a] * self.degrees[b]) % 2 else 1
            if w != sign * v:
                return failed(name, {"check": "graded symmetry", "pair": [a, b]})
        seen = set()
        for a in range(len(self.degrees)):
            if a in seen:
                continue
            rows = [x for x in range(len(self.degrees))
                    if self.degrees[x] == self.degrees[a] and self.blocks[x] == self.blocks[a]]
            seen.update(rows)
            cols = self._partners(a)
            mat = [[self(r, c) for c in cols] for r in rows]
            if len(rows) != len(cols) or not linalg.is_invertible(mat, self.field):
                return failed(name, {"check": "nondegenerate", "degree": self.degrees[a],
                                     "block": _jsonable(self.blocks[a])})
        return passed(name, degree=self.degree)


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


def pairing_from_hodge(hodge, degree=3):
    """Pairing on ``H`` induced by the algebra's pairing through ``i``."""
    A = hodge.A
    if not A.pairing:
        raise PotentialError("algebra carries no pairing")
    F = A.field
    entries = {}
    for a in range(hodge.dim):
        for b in range(hodge.dim):
            s = F.zero
            for ja, ca in hodge.reps[a].items():
                for jb, cb in hodge.reps[b].items():
                    x = A.pairing.get((ja, jb))
                    if x is not None:
                        s = s + ca * cb * x
            if s != 0:
                entries[(a, b)] = s
    return CyclicPairing(hodge.degrees, entries, degree, hodge.blocks, F)


class ExtQuiverPresentation:
    """Quiver whose edges ``i -> j`` are the degree-1 basis classes of the
    block ``H(i, j)``; ``edge_class[e]`` is the index of ``e_dual``."""

    def __init__(self, ainf):
        self.ainf = ainf
        blocks = ainf.blocks
        if all(b is None for b in blocks):
            verts = [1]
            ends = {k: (1, 1) for k in range(ainf.dim)}
        else:
            verts = sorted({v for b in blocks for v in b}, key=repr)
            ends = {k: tuple(blocks[k]) for k in range(ainf.dim)}
        self.ends = ends
        self.edge_class = {}
        edges = []
        for k in range(ainf.dim):
            if ainf.degrees[k] == 1:
                eid = ainf.names[k]
                self.edge_class[eid] = k
                edges.append((eid, ends[k][0], ends[k][1]))
        self.quiver = Quiver(verts, edges)
        self.class_edge = {k: e for e, k in self.edge_class.items()}

    def edges_between(self, i, j):
        return self.quiver.arrows(i, j)

    def degree2(self):
        return [k for k in range(self.ainf.dim) if self.ainf.degrees[k] == 2]


@dataclass
class DualBasis:
    """Functionals on ``H^2``: ``functionals[k]`` maps a degree-2 class to
    a scalar; ``endpoints[k]`` is where the matching relation runs."""

    labels: list
    functionals: list
    endpoints: list
    kind: str


def degree2_dual_basis(pres, pairing=None):
    """Pairing-induced basis ``o_e(xi) = (xi, e_dual)`` when a pairing is
    given, otherwise the coordinate functionals of the ``H^2`` basis."""
    ainf = pres.ainf
    q = pres.quiver
    if pairing is not None:
        labels, fns, ends = [], [], []
        for eid in q.edge_ids:
            k = pres.edge_class[eid]
            fn = {x: pairing(x, k) for x in pres.degree2() if pairing(x, k) != 0}
            labels.append(eid)
            fns.append(fn)
            ends.append((q.target(eid), q.source(eid)))
        return DualBasis(labels, fns, ends, "pairing")
    labels, fns, ends = [], [], []
    for x in pres.degree2():
        labels.append(ainf.names[x])
        fns.append({x: ainf.field.one})
        ends.append(pres.ends[x])
    return DualBasis(labels, fns, ends, "coordinate")


@dataclass
class RelationSet:
    relations: list
    labels: list
    provenance: str

    def __len__(self):
        return len(self.relations)

    def by_label(self):
        return dict(zip(self.labels, self.relations))

    def check(self):
        for lab, f in zip(self.labels, self.relations):
            if any(len(w) < 2 for w in f.coeffs):
                return failed("relations", {"relation": lab, "check": "words of length >= 2"})
        return passed("relations")

    def to_json(self):
        return {"provenance": self.provenance,
                "relations": [{"label": lab, "series": f.to_json()}
                              for lab, f in zip(self.labels, self.relations)]}


def _degree1_entries(ainf, n):
    deg = ainf.degrees
    for key, vec in ainf.m(n).items():
        if all(deg[k] == 1 for k in key):
            yield key, vec


def relations_from_products(ainf, pres, basis2=None, N=None):
    """``f_o = sum_n sum_words mc_sign(n) <o, m_n(e1, ..., en)> e1 ... en``."""
    N = N if N is not None else ainf.max_arity
    if basis2 is None:
        basis2 = degree2_dual_basis(pres)
    q = pres.quiver
    F = ainf.field
    acc = [dict() for _ in basis2.functionals]
    for n in range(2, N + 1):
        eps = mc_sign(n)
        for key, vec in _degree1_entries(ainf, n):
            try:
                w = word(q, [pres.class_edge[k] for k in key])
            except QuiverError:
                raise PotentialError("product of non-composable classes is nonzero") from None
            for t, fn in enumerate(basis2.functionals):
                c = F.zero
                for x, v in vec.items():
                    y = fn.get(x)
                    if y is not None:
                        c = c + v * y
                if c != 0:
                    acc[t][w] = acc[t].get(w, F.zero) + eps * c
    rels = [PathSeries(q, N, coeffs, ends, F) for coeffs, ends in zip(acc, basis2.endpoints)]
    return RelationSet(rels, list(basis2.labels), "products")


def _pairing_tensor(ainf, pairing, n):
    """``T(a_1, ..., a_{n+1}) = (m_n(a_1..a_n), a_{n+1})`` on degree-1
    classes, as a sparse dict."""
    deg1 = [k for k in range(ainf.dim) if ainf.degrees[k] == 1]
    out = {}
    for key, vec in _degree1_entries(ainf, n):
        for b in deg1:
            c = pairing.pair(vec, b)
            if c != 0:
                out[key + (b,)] = c
    return out


def check_cyclic(ainf, pairing, N=None):
    """Rotation identity ``(m_n(a_1..a_n), a_{n+1}) = (m_n(a_2..a_{n+1}), a_1)``
    on all degree-1 basis tuples, ``2 <= n <= N``."""
    N = N if N is not None else ainf.max_arity
    F = ainf.field
    for n in range(2, N + 1):
        T = _pairing_tensor(ainf, pairing, n)
        for key, c in sorted(T.items()):
            rot = key[1:] + key[:1]
            if T.get(rot, F.zero) != c:
                return failed("cyclic", {"arity": n, "inputs": [ainf.names[k] for k in key],
                                         "value": str(c), "rotated": str(T.get(rot, F.zero))})
    return passed("cyclic", max_arity=N)


def canonical_rotation(edges):
    """Lexicographically minimal rotation of a cyclic edge word."""
    edges = tuple(edges)
    if not edges:
        return edges
    return min(edges[k:] + edges[:k] for k in range(len(edges)))


class SuperPotential:
    """Cyclic words in canonical (minimal-rotation) form with coefficients;
    words have length ``<= order``."""

    def __init__(self, quiver, order, coeffs=None, field=RATIONALS):
        self.quiver = quiver
        self.order = order
        self.field = field
        acc = {}
        for w, c in (coeffs or {}).items():
            edges = w.edges if isinstance(w, PathWord) else tuple(w)
            if not edges:
                raise PotentialError("potential words must be nonempty cycles")
            pw = word(quiver, edges)
            if pw.end(quiver) != pw.start:
                raise PotentialError(f"word {pw} is not a cycle")
            if len(edges) > order:
                raise PotentialError(f"word {pw} exceeds truncation order {order}")
            can = canonical_rotation(edges)
            acc[can] = acc.get(can, field.zero) + field.coerce(c)
        self.coeffs = {PathWord(quiver.source(k[0]), k): c for k, c in acc.items() if c != 0}

    def words(self):
        return sorted(self.coeffs, key=PathWord.sort_key)

    def is_zero(self):
        return not self.coeffs

    def lengths(self):
        return sorted({len(w) for w in self.coeffs})

    def to_series(self):
        return PathSeries(self.quiver, self.order, self.coeffs, None, self.field, cyclic=True)

    def __eq__(self, other):
        return isinstance(other, SuperPotential) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"SuperPotential({self.to_series()!r})"

    def to_json(self):
        return self.to_series().to_json()


def _potential(ainf, pairing, pres, N):
    F = ainf.field
    if F.characteristic:
        raise PotentialError("potential coefficients need characteristic zero")
    acc = {}
    for n in range(3, N + 1):
        eps = mc_sign(n - 1)
        for key, c in _pairing_tensor(ainf, pairing, n - 1).items():
            edges = tuple(pres.class_edge[k] for k in key)
            try:
                word(pres.quiver, edges)
            except QuiverError:
                raise PotentialError("nonzero pairing on a non-composable word") from None
            can = canonical_rotation(edges)
            acc[can] = acc.get(can, F.zero) + eps * c * Fraction(1, n)
    return SuperPotential(pres.quiver, N, acc, F)


def build_potential(ainf, pairing, pres, N=None):
    """``a_w = (1/n) (mc_sign(n-1) m_{n-1}(e_1, ..., e_{n-1}), e_n)`` summed
    over rotation classes, for cyclic words of length ``3 <= n <= N``."""
    N = N if N is not None else ainf.max_arity + 1
    rep = check_cyclic(ainf, pairing, N - 1)
    if not rep.ok:
        raise PotentialError(f"structure is not cyclic: {rep.witness}")
    return _potential(ainf, pairing, pres, N)


def cyclic_derivative(W, e):
    """``sum_a delta(e, e_a) e_{a+1} ... e_n e_1 ... e_{a-1}`` over every
    word of ``W``; a series from ``t(e)`` to ``s(e)``."""
    q = W.quiver
    q.edge(e)
    acc = {}
    F = W.field
    for w, c in W.coeffs.items():
        edges = w.edges
        for a, x in enumerate(edges):
            if x != e:
                continue
            rest = edges[a + 1:] + edges[:a]
            pw = PathWord(q.target(e), rest)
            acc[pw] = acc.get(pw, F.zero) + c
    return PathSeries(q, max(W.order - 1, 0), acc, (q.target(e), q.source(e)), F)


def potential_relations(W):
    q = W.quiver
    return RelationSet([cyclic_derivative(W, e) for e in q.edge_ids], list(q.edge_ids), "potential")


def _compare_series(f, g, order):
    words = sorted(set(f.coeffs) | set(g.coeffs), key=PathWord.sort_key)
    for w in words:
        if len(w) > order:
            continue
        a, b = f.coefficient(w), g.coefficient(w)
        if a != b:
            return w, a, b
    return None


def verify_jacobian_identity(ainf, pairing, pres, N=None):
    """Relations from the products in the pairing-induced dual basis agree
    word by word with the cyclic derivatives of the potential."""
    N = N if N is not None else ainf.max_arity + 1
    W = _potential(ainf, pairing, pres, N)
    basis2 = degree2_dual_basis(pres, pairing)
    rels = relations_from_products(ainf, pres, basis2, N - 1)
    for lab, f in zip(rels.labels, rels.relations):
        g = cyclic_derivative(W, lab)
        bad = _compare_series(f, g, N - 1)
        if bad is not None:
            w, a, b = bad
            return failed("jacobian", {"edge": lab, "word": str(w), "from_products": str(a),
                                       "from_potential": str(b)})
    return passed("jacobian", order=N, relations=len(rels))


def mc_defect(ainf, pres, rep, N=None):
    """``kappa(u) = sum_n mc_sign(n) m_n(x, ..., x)`` for ``x`` built from
    ``rep``: a matrix of shape ``(m_b, m_a)`` per degree-2 class of block
    ``(a, b)``."""
    N = N if N is not None else ainf.max_arity
    q = pres.quiver
    if rep.quiver != q:
        raise QuiverError("representation is not on the Ext-quiver")
    F = rep.field
    out = {}
    for x in pres.degree2():
        a, b = pres.ends[x]
        out[x] = linalg.zeros(rep.dims[b], rep.dims[a], F)
    cache = {}
    for n in range(2, N + 1):
        eps = mc_sign(n)
        for key, vec in _degree1_entries(ainf, n):
            w = PathWord(pres.ends[key[0]][0], tuple(pres.class_edge[k] for k in key))
            if w not in cache:
                cache[w] = rep.path_matrix(w)
            m = cache[w]
            for x, c in vec.items():
                blk = out[x]
                cc = F.coerce(eps * c)
                for i, row in enumerate(m):
                    brow = blk[i]
                    for j, y in enumerate(row):
                        if y != 0:
                            brow[j] = brow[j] + cc * y
    return {ainf.names[x]: m for x, m in out.items()}


def mc_defect_is_zero(kappa):
    return all(linalg.is_zero(m) for m in kappa.values())


def trace_potential(W, rep):
    F = rep.field
    s = F.zero
    for w, c in W.coeffs.items():
        m = rep.path_matrix(w)
        tr = F.zero
        for k in range(len(m)):
            tr = tr + m[k][k]
        s = s + F.coerce(c) * tr
    return s


class SymbolicGradient:
    """Exact gradient of ``tr W`` obtained by expanding the trace as a
    polynomial in the matrix entries and differentiating it."""

    def __init__(self, W, dims, field=RATIONALS):
        from sympy import QQ
        from sympy.polys.rings import ring
        self.W = W
        self.dims = dims
        self.field = field
        if field == RATIONALS:
            dom = QQ
            self._to_dom = lambda x: QQ(x.numerator, x.denominator)
            self._from_dom = lambda v: Fraction(int(v.numerator), int(v.denominator))
        elif field == GAUSSIAN_RATIONALS:
            from sympy import QQ_I
            dom = QQ_I
            self._to_dom = lambda x: QQ_I(QQ(x.re.numerator, x.re.denominator),
                                          QQ(x.im.numerator, x.im.denominator))
            self._from_dom = lambda v: GaussianRational(
                Fraction(int(QQ.numer(v.x)), int(QQ.denom(v.x))),
                Fraction(int(QQ.numer(v.y)), int(QQ.denom(v.y))))
        else:
            raise PotentialError("symbolic gradient needs characteristic zero")
        q = W.quiver
        self.vars = []
        for e in q.edge_ids:
            for p in range(dims[q.target(e)]):
                for r in range(dims[q.source(e)]):
                    self.vars.append((e, p, r))
        if not self.vars:
            self.ring = None
            self.poly = None
            self.grad = {}
            return
        names = [f"u_{e}_{p}_{r}" for e, p, r in self.vars]
        R, *gens = ring(names, dom)
        self.ring = R
        sym = {v: g for v, g in zip(self.vars, gens)}
        mats = {e: [[sym[(e, p, r)] for r in range(dims[q.source(e)])]
                    for p in range(dims[q.target(e)])] for e in q.edge_ids}
        total = R.zero
        for w, c in W.coeffs.items():
            m = None
            for e in w.edges:
                m = mats[e] if m is None else _poly_matmul(mats[e], m, R)
            tr = R.zero
            for k in range(len(m)):
                tr += m[k][k]
            total += self._to_dom(field.coerce(c)) * tr
        self.poly = total
        self.grad = {v: total.diff(g) for v, g in zip(self.vars, gens)}
        # sparse (coeff, [(var index, exponent)]) terms for fast evaluation
        self._terms = {v: [(self._from_dom(c), [(k, x) for k, x in enumerate(mon) if x])
                           for mon, c in g.terms()]
                       for v, g in self.grad.items()}

    def __call__(self, rep):
        """``{edge: matrix}`` with entry ``(p, r)`` equal to the partial
        derivative in ``(u_e)_{pr}``."""
        q = self.W.quiver
        F = self.field
        out = {e: linalg.zeros(rep.dims[q.target(e)], rep.dims[q.source(e)], F) for e in q.edge_ids}
        if not self.vars:
            return out
        point = [F.coerce(rep.matrices[e][p][r]) for e, p, r in self.vars]
        for (e, p, r), terms in self._terms.items():
            s = F.zero
            for c, mon in terms:
                t = c
                for k, x in mon:
                    t = t * point[k] ** x
                s = s + t
            out[e][p][r] = s
        return out


def _poly_matmul(a, b, R):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), R.zero) for j in range(m)] for i in range(n)]


def crit_equals_mc(W, reln, rep, grad=None):
    """Entrywise comparison ``d tr W / d (u_e)_{pq} == eval(f_e)_{qp}``.

    ``reln`` must be indexed by edge (e.g. the pairing-induced relations
    or :func:`potential_relations`).  Words longer than ``W.order - 1``
    are ignored.
    """
    q = W.quiver
    if rep.quiver != q:
        raise QuiverError("representation is not on the potential's quiver")
    grad = grad or SymbolicGradient(W, rep.dims, rep.field)
    G = grad(rep)
    rels = reln.by_label()
    for e in q.edge_ids:
        f = rels[e].truncate(max(W.order - 1, 0))
        ev = evaluate_series(f, rep, q.target(e), q.source(e))
        g = G[e]
        for p in range(len(g)):
            for r in range(len(g[p])):
                if g[p][r] != ev[r][p]:
                    return failed("crit=mc", {"edge": e, "entry": [p, r], "gradient": str(g[p][r]),
                                              "relation": str(ev[r][p])})
    return passed("crit=mc")


def gradient_is_zero(G):
    return all(linalg.is_zero(m) for m in G.values())


def relations_vanish(reln, rep):
    for f in reln.relations:
        a, b = f.endpoints
        if not linalg.is_zero(evaluate_series(f, rep, a, b)):
            return False
    return True


def inject_cyclic_m3(ainf, pairing, coeff=1):
    """Add ``m_3`` on degree-1 classes with
    ``(m_3(a, b, c), d) = coeff (delta_ab delta_cd + delta_bc delta_da)``.

    The right side is invariant under rotation of ``(a, b, c, d)``, so
    the result stays cyclic.  Intended for one-vertex structures."""
    F = ainf.field
    deg1 = [k for k in range(ainf.dim) if ainf.degrees[k] == 1]
    deg2 = [k for k in range(ainf.dim) if ainf.degrees[k] == 2]
    P = [[pairing(x, d) for d in deg1] for x in deg2]
    Pinv = linalg.inverse(P, F)
    # dual[d] = sum_x Pinv[d][x] h_x satisfies (dual[d], e) = delta_de
    dual = [{deg2[x]: Pinv[t][x] for x in range(len(deg2)) if Pinv[t][x] != 0} for t in range(len(deg1))]
    m3 = {key: dict(v) for key, v in ainf.m(3).items()}
    c = F.coerce(coeff)
    for ia, a in enumerate(deg1):
        for ib, b in enumerate(deg1):
            for ic, cc in enumerate(deg1):
                vec = {}
                for idd in range(len(deg1)):
                    t = (1 if (ia == ib and ic == idd) else 0) + (1 if (ib == ic and idd == ia) else 0)
                    if t:
                        for x, y in dual[idd].items():
                            vec[x] = vec.get(x, F.zero) + c * t * y
                vec = {x: y for x, y in vec.items() if y != 0}
                if vec:
                    cur = m3.setdefault((a, b, cc), {})
                    for x, y in vec.items():
                        cur[x] = cur.get(x, F.zero) + y
    prods = dict(ainf.products)
    prods[3] = {k: {x: y for x, y in v.items() if y != 0} for k, v in m3.items()}
    return ainf.with_products(prods)
