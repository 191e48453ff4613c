"""Non-commutative deformation towers of the vertex simples.

Modules are right modules over a truncated quotient path algebra
``A = kQ / (I + m^{N+1})``.  A right module is the same thing as a
representation of ``Q`` (``M e_i`` is the space at vertex ``i`` and an
arrow ``e: i -> j`` acts ``M e_i -> M e_j``), and a path ``e1...en``
acts by ``u_en ... u_e1``.  With this convention ``dim Ext^1(S_i, S_j)``
is the number of arrows ``i -> j``.

The tower ``E^(0) = S``, ``E_i^(n+1)`` = universal extension of
``E_i^(n)`` by the simples, has endomorphism algebras ``R^(n)`` which are
compared with ``A / m^{n+1}`` through ``w -> (g_t(w) -> g_s(w) w)``.
"""

from collections import deque
from dataclasses import dataclass, field as dc_field
from itertools import product as iproduct

from . import finite, linalg
from .fields import RATIONALS, Fp, PrimeField
from .quiver import PathWord, Representation, all_paths
from .report import failed, passed


class NcDeformError(ValueError):
    pass


class InfeasibleEnumeration(NcDeformError):
    def __init__(self, count, limit):
        super().__init__(f"enumeration of {count} candidate modules exceeds the limit {limit}")
        self.count = count
        self.limit = limit


# linear algebra, with an integer fast path over prime fields

def _rref(rows, F, ncols):
    if isinstance(F, PrimeField):
        p = F.p
        r, piv = finite.rref([[int(x) for x in row] for row in rows], p, ncols)
        return [[Fp(x, p) for x in row] for row in r], list(piv)
    if not rows:
        return [], []
    return linalg.rref(rows, F, ncols)


def _nullspace(rows, F, ncols):
    if isinstance(F, PrimeField):
        p = F.p
        return [[Fp(x, p) for x in v] for v in finite.nullspace([[int(x) for x in r] for r in rows], p, ncols)]
    if not rows:
        return [[F.one if i == j else F.zero for j in range(ncols)] for i in range(ncols)]
    return linalg.nullspace(rows, F, ncols)


def _reduce(rows, piv, v):
    return linalg.reduce_against(rows, piv, v)


def _rank(rows, F, ncols):
    return len(_rref(rows, F, ncols)[1])


def _coords_solver(vectors, F, n):
    """Return a function giving coordinates of a vector in the span of
    ``vectors`` (raises if outside)."""
    k = len(vectors)
    # rows: vector entries augmented by identity to track combinations
    aug = [list(v) + [F.one if i == j else F.zero for j in range(k)] for i, v in enumerate(vectors)]
    rows, piv = _rref(aug, F, n + k)
    main = [(r, c) for r, c in zip(rows, piv) if c < n]

    def coords(x):
        w = list(x) + [F.zero] * k
        for r, c in main:
            f = w[c]
            if f != 0:
                w = [a - f * b for a, b in zip(w, r)]
        if any(a != 0 for a in w[:n]):
            raise NcDeformError("vector outside the span")
        return [-a for a in w[n:]]

    return coords


def _zero_mat(r, c, F):
    return [[F.zero] * c for _ in range(r)]


def _is_zero(m):
    return all(x == 0 for row in m for x in row)


# algebra

def _split_relations(relations, order, F):
    rels = relations.relations if hasattr(relations, "relations") else list(relations)
    out = []
    for f in rels:
        q = f.quiver
        by_ends = {}
        for w, c in f.coeffs.items():
            if len(w) <= order:
                by_ends.setdefault((w.start, w.end(q)), {})[w] = F.coerce(c)
        for ends in sorted(by_ends, key=str):
            d = {w: c for w, c in by_ends[ends].items() if c != 0}
            if d:
                out.append((ends, d))
    return rels, out


class QuotientAlgebra:
    """``kQ / (I + m^{order+1})`` with a basis of normal words.

    The ideal is spanned by ``u f v`` for relations ``f`` and paths
    ``u, v``; after elimination with columns in length-lex order the
    pivots are the shortest words, and the remaining words are normal.
    """

    def __init__(self, quiver, relations=(), order=2, field=RATIONALS):
        if order < 0:
            raise NcDeformError("truncation order must be non-negative")
        self.quiver = quiver
        self.order = order
        self.field = F = field
        self.source_relations, self.relations = _split_relations(relations, order, F)
        q = quiver
        words = all_paths(q, order)
        self.words = words
        col = {w: k for k, w in enumerate(words)}
        self._col = col
        into = {v: [u for u in words if u.end(q) == v] for v in q.vertices}
        outof = {v: [u for u in words if u.start == v] for v in q.vertices}
        span = []
        for (a, b), d in self.relations:
            lo = min(len(w) for w in d)
            for u in into[a]:
                if len(u) + lo > order:
                    break
                for v in outof[b]:
                    if len(u) + lo + len(v) > order:
                        break
                    row = [F.zero] * len(words)
                    for w, c in d.items():
                        if len(u) + len(w) + len(v) <= order:
                            k = col[PathWord(u.start, u.edges + w.edges + v.edges)]
                            row[k] = row[k] + c
                    span.append(row)
        self._irows, self._ipiv = _rref(span, F, len(words))
        pset = set(self._ipiv)
        self.basis = [w for k, w in enumerate(words) if k not in pset]
        self.index = {w: k for k, w in enumerate(self.basis)}
        self._normal_cols = [col[w] for w in self.basis]
        for v in q.vertices:
            if PathWord(v, ()) not in self.index:
                raise NcDeformError(f"relations kill the idempotent at vertex {v!r}")
        self._word_cache = {}

    @property
    def dim(self):
        return len(self.basis)

    def idempotent(self, v):
        return self.index[PathWord(v, ())]

    def reduce_terms(self, terms):
        """Normal-word coordinates of ``sum c w`` (words longer than the
        truncation order vanish)."""
        F = self.field
        vec = [F.zero] * len(self.words)
        for w, c in terms.items():
            if len(w) <= self.order:
                k = self._col[w]
                vec[k] = vec[k] + F.coerce(c)
        vec = _reduce(self._irows, self._ipiv, vec)
        return [vec[c] for c in self._normal_cols]

    def reduce_word(self, w):
        out = self._word_cache.get(w)
        if out is None:
            out = self.reduce_terms({w: self.field.one}) if len(w) <= self.order else [self.field.zero] * self.dim
            self._word_cache[w] = out
        return out

    def product(self, i, j):
        a, b = self.basis[i], self.basis[j]
        if a.end(self.quiver) != b.start:
            return [self.field.zero] * self.dim
        return self.reduce_word(PathWord(a.start, a.edges + b.edges))

    def multiplication_table(self):
        return [[self.product(i, j) for j in range(self.dim)] for i in range(self.dim)]

    def graded_dims(self):
        out = [0] * (self.order + 1)
        for w in self.basis:
            out[len(w)] += 1
        return out

    def check(self):
        """Associativity, orthogonal idempotents summing to one, and a
        nilpotent radical."""
        F = self.field
        n = self.dim
        table = self.multiplication_table()

        def mul(x, y):
            out = [F.zero] * n
            for i, a in enumerate(x):
                if a == 0:
                    continue
                for j, b in enumerate(y):
                    if b == 0:
                        continue
                    for k, c in enumerate(table[i][j]):
                        if c != 0:
                            out[k] = out[k] + a * b * c
            return out

        unit = [F.zero] * n
        for v in self.quiver.vertices:
            unit[self.idempotent(v)] = F.one
        for i in range(n):
            e = [F.one if k == i else F.zero for k in range(n)]
            if mul(unit, e) != e or mul(e, unit) != e:
                return failed("quotient_algebra", {"unit": str(self.basis[i])})
        for i, j, k in iproduct(range(n), repeat=3):
            ei = [F.one if t == i else F.zero for t in range(n)]
            ej = [F.one if t == j else F.zero for t in range(n)]
            ek = [F.one if t == k else F.zero for t in range(n)]
            if mul(mul(ei, ej), ek) != mul(ei, mul(ej, ek)):
                return failed("quotient_algebra", {"associativity": [str(self.basis[t]) for t in (i, j, k)]})
        for a in self.quiver.vertices:
            for b in self.quiver.vertices:
                x = table[self.idempotent(a)][self.idempotent(b)]
                want = [F.one if (a == b and t == self.idempotent(a)) else F.zero for t in range(n)]
                if x != want:
                    return failed("quotient_algebra", {"idempotents": [str(a), str(b)]})
        return passed("quotient_algebra", dim=n, graded_dims=self.graded_dims())

    def module_generators(self):
        """Relations of the truncated ideal as ``(ends, {word: coeff})``;
        the paths of length ``order + 1`` are handled separately."""
        return self.relations

    def is_module(self, rep):
        """Whether ``rep`` is a module: relations and long paths vanish."""
        cache = {}
        F = rep.field
        for (a, b), d in self.relations:
            acc = _zero_mat(rep.dims[b], rep.dims[a], F)
            for w, c in d.items():
                m = _path(rep, w, cache)
                acc = [[x + c * y for x, y in zip(r1, r2)] for r1, r2 in zip(acc, m)]
            if not _is_zero(acc):
                return False
        for w, m in _long_paths(rep, self.order + 1):
            if not _is_zero(m):
                return False
        return True

    def projective(self, v):
        """The indecomposable projective ``e_v A`` and its generator."""
        q = self.quiver
        F = self.field
        words = {x: [k for k, w in enumerate(self.basis) if w.start == v and w.end(q) == x] for x in q.vertices}
        dims = {x: len(words[x]) for x in q.vertices}
        mats = {}
        for e in q.edges:
            m = _zero_mat(dims[e.target], dims[e.source], F)
            tpos = {k: r for r, k in enumerate(words[e.target])}
            for c, k in enumerate(words[e.source]):
                w = self.basis[k]
                red = self.reduce_word(PathWord(w.start, w.edges + (e.id,)))
                for t, coeff in enumerate(red):
                    if coeff != 0:
                        m[tpos[t]][c] = coeff
            mats[e.id] = m
        rep = Representation(q, dims, mats, F)
        gen = [F.one if k == self.idempotent(v) else F.zero for k in words[v]]
        return rep, gen, words

    def to_json(self):
        from .fields import format_scalar
        return {"order": self.order, "dim": self.dim, "graded_dims": self.graded_dims(),
                "basis": [str(w) for w in self.basis],
                "table": [[[format_scalar(x) for x in c] for c in row] for row in self.multiplication_table()]}


def _path(rep, w, cache):
    m = cache.get(w)
    if m is None:
        if len(w.edges) <= 1:
            m = rep.path_matrix(w)
        else:
            pre = PathWord(w.start, w.edges[:-1])
            last = w.edges[-1]
            m = linalg.matmul(rep.matrices[last], _path(rep, pre, cache), rep.field,
                              inner=rep.dims[rep.quiver.source(last)])
        cache[w] = m
    return m


def _long_paths(rep, length):
    """Yield ``(word, matrix)`` for every path of exactly ``length``,
    pruning zero prefixes."""
    q = rep.quiver
    F = rep.field
    layer = [(PathWord(v, ()), linalg.identity(rep.dims[v], F)) for v in q.vertices if rep.dims[v]]
    for _ in range(length):
        nxt = []
        for w, m in layer:
            end = w.end(q)
            for eid in q.out_edges(end):
                t = q.target(eid)
                mm = linalg.matmul(rep.matrices[eid], m, F, inner=rep.dims[end])
                if rep.dims[t] and not _is_zero(mm):
                    nxt.append((PathWord(w.start, w.edges + (eid,)), mm))
        layer = nxt
        if not layer:
            return
    yield from layer


# module utilities

def vertex_simple(quiver, v, field):
    return Representation(quiver, {x: (1 if x == v else 0) for x in quiver.vertices}, {}, field)


def direct_sum(reps):
    q = reps[0].quiver
    F = reps[0].field
    dims = {v: sum(r.dims[v] for r in reps) for v in q.vertices}
    mats = {}
    for e in q.edges:
        m = _zero_mat(dims[e.target], dims[e.source], F)
        ro = co = 0
        for r in reps:
            for i, row in enumerate(r.matrices[e.id]):
                for j, x in enumerate(row):
                    m[ro + i][co + j] = x
            ro += r.dims[e.target]
            co += r.dims[e.source]
        mats[e.id] = m
    return Representation(q, dims, mats, F)


def _sub_and_quotient(rep, k_by_vertex):
    """Submodule spanned by the first ``k_v`` basis vectors at each vertex
    (must be invariant) and the quotient by it."""
    q = rep.quiver
    F = rep.field
    sd = {v: k_by_vertex[v] for v in q.vertices}
    qd = {v: rep.dims[v] - sd[v] for v in q.vertices}
    smats, qmats = {}, {}
    for e in q.edges:
        m = rep.matrices[e.id]
        s, t = e.source, e.target
        for i in range(sd[t], rep.dims[t]):
            for j in range(sd[s]):
                if m[i][j] != 0:
                    raise NcDeformError("flag is not invariant")
        smats[e.id] = [row[:sd[s]] for row in m[:sd[t]]]
        qmats[e.id] = [row[sd[s]:] for row in m[sd[t]:]]
    return Representation(q, sd, smats, F), Representation(q, qd, qmats, F)


class Presentation:
    """Generators of a module and the linear relations among translates
    ``g w`` found by a breadth-first search.  Used to compute Hom spaces
    with the unknowns being the images of the generators."""

    def __init__(self, rep, gens=None):
        q = rep.quiver
        F = rep.field
        self.rep = rep
        if gens is None:
            gens = []
            for v in q.vertices:
                n = rep.dims[v]
                rad = [[rep.matrices[e.id][i][j] for i in range(n)]
                       for e in q.edges if e.target == v for j in range(rep.dims[e.source])]
                rad = [r for r in rad if any(x != 0 for x in r)]
                for k in linalg.extend_to_basis(rad, n, F) if n else []:
                    gens.append((v, [F.one if i == k else F.zero for i in range(n)]))
        self.gens = gens
        cache = {}
        self.items = []
        self.rels = []
        state = {v: ([], []) for v in q.vertices}
        queue = deque((g, PathWord(v, ()), v, list(x)) for g, (v, x) in enumerate(gens))
        pending = []
        while queue:
            g, w, v, x = queue.popleft()
            rows, piv = state[v]
            r = _reduce(rows, piv, x)
            if any(a != 0 for a in r):
                state[v] = _rref(rows + [r], F, rep.dims[v])
                self.items.append((g, w, v, x))
                for eid in q.out_edges(v):
                    t = q.target(eid)
                    y = linalg.matvec(rep.matrices[eid], x, F)
                    queue.append((g, PathWord(w.start, w.edges + (eid,)), t, y))
            else:
                pending.append((g, w, v, x))
        del cache
        for v in q.vertices:
            if len(state[v][1]) != rep.dims[v]:
                raise NcDeformError("generators do not span the module")
        self.vertex_items = {v: [k for k, it in enumerate(self.items) if it[2] == v] for v in q.vertices}
        self._basis_inv = {}
        solvers = {}
        for v in q.vertices:
            idx = self.vertex_items[v]
            if idx:
                cols = [self.items[k][3] for k in idx]
                # matrix with these columns, inverted
                B = [[cols[c][r] for c in range(len(cols))] for r in range(rep.dims[v])]
                self._basis_inv[v] = linalg.inverse(B, F)
                solvers[v] = self._basis_inv[v]
        for g, w, v, x in pending:
            c = linalg.matvec(solvers[v], x, F) if rep.dims[v] else []
            self.rels.append((g, w, v, {self.vertex_items[v][k]: a for k, a in enumerate(c) if a != 0}))
        self.gen_vertices = [v for v, _ in gens]

    def unknown_layout(self, N):
        offs, n = [], 0
        for v in self.gen_vertices:
            offs.append(n)
            n += N.dims[v]
        return offs, n

    def equations(self, N):
        F = N.field
        offs, n = self.unknown_layout(N)
        cache = {}
        rows = []
        for g, w, v, coeffs in self.rels:
            dv = N.dims[v]
            if not dv:
                continue
            block = [[F.zero] * n for _ in range(dv)]
            terms = [(g, w, F.one)] + [(self.items[k][0], self.items[k][1], -c) for k, c in coeffs.items()]
            for gg, ww, c in terms:
                m = _path(N, ww, cache)
                o = offs[gg]
                for i in range(dv):
                    row = block[i]
                    for j, y in enumerate(m[i]):
                        if y != 0:
                            row[o + j] = row[o + j] + c * y
            rows.extend(block)
        return rows, n


class HomSpace:
    """``Hom(M, N)`` parametrized by the images of the generators of M."""

    def __init__(self, pres, N):
        self.pres = pres
        self.target = N
        self.field = F = N.field
        self.eq_rows, self.nunk = pres.equations(N)
        self.offs, _ = pres.unknown_layout(N)
        self.basis = _nullspace(self.eq_rows, F, self.nunk)
        self._coords = None
        self._cache = {}

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, x):
        F = self.field
        for row in self.eq_rows:
            s = F.zero
            for a, b in zip(row, x):
                if a != 0 and b != 0:
                    s = s + a * b
            if s != 0:
                return False
        return True

    def coords(self, x):
        if self._coords is None:
            self._coords = _coords_solver(self.basis, self.field, self.nunk)
        return self._coords(x)

    def generator_image(self, x, g):
        v = self.pres.gen_vertices[g]
        o = self.offs[g]
        return x[o:o + self.target.dims[v]]

    def maps(self, x):
        """Vertex matrices ``N_v x M_v`` of the morphism with generator
        images ``x``."""
        pres, N, F = self.pres, self.target, self.field
        out = {}
        for v in N.quiver.vertices:
            idx = pres.vertex_items[v]
            mv = pres.rep.dims[v]
            if not mv:
                out[v] = _zero_mat(N.dims[v], 0, F)
                continue
            cols = []
            for k in idx:
                g, w, _, _ = pres.items[k]
                img = self.generator_image(x, g)
                m = _path(N, w, self._cache)
                cols.append(linalg.matvec(m, img, F))
            C = [[cols[c][r] for c in range(len(cols))] for r in range(N.dims[v])]
            out[v] = linalg.matmul(C, pres._basis_inv[v], F, inner=mv) if N.dims[v] else []
        return out

    def apply(self, x, v, vec):
        m = self.maps(x)[v]
        return linalg.matvec(m, vec, self.field)


def hom_space(M, N, gens=None):
    pres = M if isinstance(M, Presentation) else Presentation(M, gens)
    return HomSpace(pres, N)


# extensions

@dataclass
class ExtData:
    """``Ext^1(M, N)``: ``cocycles`` are coboundary-reduced representatives
    (``{edge: N_t x M_s matrix}``)."""

    source: Representation
    target: Representation
    cocycles: list
    layout: dict
    boundary_rows: list
    boundary_pivots: list

    @property
    def dim(self):
        return len(self.cocycles)

    def flatten(self, c):
        F = self.source.field
        out = []
        for e in self.source.quiver.edge_ids:
            for row in c.get(e, []):
                out.extend(row)
        return out if out else [F.zero] * 0

    def is_coboundary(self, c):
        v = _reduce(self.boundary_rows, self.boundary_pivots, self.flatten(c))
        return all(a == 0 for a in v)


def _unflatten(vec, layout, M, N):
    out = {}
    for e in M.quiver.edges:
        o, r, c = layout[e.id]
        out[e.id] = [vec[o + i * c: o + (i + 1) * c] for i in range(r)]
    return out


def ext_space(A, M, N):
    """Cocycles ``c`` making ``[[u^N, c], [0, u^M]]`` an A-module modulo
    the coboundaries ``u^N phi_s - phi_t u^M``."""
    q = A.quiver
    F = A.field
    layout = {}
    n = 0
    for e in q.edges:
        r, c = N.dims[e.target], M.dims[e.source]
        layout[e.id] = (n, r, c)
        n += r * c
    cacheM, cacheN = {}, {}
    rows = []

    def add_term(acc, after, eid, before, coeff):
        o, r, c = layout[eid]
        if not r or not c:
            return
        for i in range(len(after)):
            ai = after[i]
            for j in range(len(before[0]) if before else 0):
                row = acc[i][j]
                for p_, x in enumerate(ai):
                    if x == 0:
                        continue
                    for q_ in range(c):
                        y = before[q_][j]
                        if y != 0:
                            row[o + p_ * c + q_] = row[o + p_ * c + q_] + coeff * x * y

    def word_rows(terms, a, b):
        ra, rb = M.dims[a], N.dims[b]
        if not ra or not rb:
            return
        acc = [[[F.zero] * n for _ in range(ra)] for _ in range(rb)]
        for w, coeff in terms:
            for k, eid in enumerate(w.edges):
                before = _path(M, PathWord(w.start, w.edges[:k]), cacheM)
                after = _path(N, PathWord(q.target(eid), w.edges[k + 1:]), cacheN)
                if _is_zero(before) or _is_zero(after):
                    continue
                add_term(acc, after, eid, before, coeff)
        for i in range(rb):
            for j in range(ra):
                if any(x != 0 for x in acc[i][j]):
                    rows.append(acc[i][j])

    for (a, b), d in A.relations:
        word_rows(list(d.items()), a, b)
    L = A.order + 1
    for w in all_paths(q, L, L):
        word_rows([(w, F.one)], w.start, w.end(q))
    Z = _nullspace(rows, F, n)
    # coboundaries
    bvecs = []
    for v in q.vertices:
        for i in range(N.dims[v]):
            for j in range(M.dims[v]):
                vec = [F.zero] * n
                for e in q.edges:
                    o, r, c = layout[e.id]
                    if e.source == v:
                        # (u^N_e phi_v)[p][j] += u^N_e[p][i]
                        for p_ in range(r):
                            x = N.matrices[e.id][p_][i]
                            if x != 0:
                                vec[o + p_ * c + j] = vec[o + p_ * c + j] + x
                    if e.target == v:
                        # -(phi_v u^M_e)[i][q] = -u^M_e[j][q]
                        for q_ in range(c):
                            y = M.matrices[e.id][j][q_]
                            if y != 0:
                                vec[o + i * c + q_] = vec[o + i * c + q_] - y
                bvecs.append(vec)
    brows, bpiv = _rref(bvecs, F, n)
    chosen_rows, chosen_piv = list(brows), list(bpiv)
    cocycles = []
    for z in Z:
        r = _reduce(chosen_rows, chosen_piv, z)
        if any(a != 0 for a in r):
            rep_vec = _reduce(brows, bpiv, z)
            cocycles.append(_unflatten(rep_vec, layout, M, N))
            chosen_rows, chosen_piv = _rref(chosen_rows + [r], F, n)
    return ExtData(M, N, cocycles, layout, brows, bpiv)


@dataclass
class UniversalExtension:
    """``0 -> sum_j Ext^1(M, S_j)^* (x) S_j -> module -> M -> 0``; the
    submodule occupies the first ``sub_dims[v]`` coordinates at ``v``."""

    module: Representation
    quotient: Representation
    sub_dims: dict
    exts: dict


def universal_extension(A, M, simples=None):
    q = A.quiver
    F = A.field
    if simples is None:
        simples = {v: vertex_simple(q, v, F) for v in q.vertices}
    exts = {v: ext_space(A, M, S) for v, S in simples.items()}
    r = {v: exts[v].dim if v in exts else 0 for v in q.vertices}
    dims = {v: r[v] + M.dims[v] for v in q.vertices}
    mats = {}
    for e in q.edges:
        s, t = e.source, e.target
        m = _zero_mat(dims[t], dims[s], F)
        for k, c in enumerate(exts[t].cocycles) if t in exts else []:
            for j, x in enumerate(c[e.id][0]):
                m[k][r[s] + j] = x
        for i, row in enumerate(M.matrices[e.id]):
            for j, x in enumerate(row):
                m[r[t] + i][r[s] + j] = x
        mats[e.id] = m
    return UniversalExtension(Representation(q, dims, mats, F), M, r, exts)


# projective resolutions

@dataclass
class ResolutionStep:
    gens: list
    module: Representation
    words: list
    differential: dict


@dataclass
class Resolution:
    """``P_j = sum_{g in gens_j} e_{v(g)} A`` with ``differential`` the
    vertex matrices of ``P_j -> P_{j-1}`` (``P_0 -> M`` for ``j = 0``)."""

    steps: list

    def ranks(self):
        return [[v for v in s.gens] for s in self.steps]


def _projective_sum(A, vertices):
    parts = [A.projective(v) for v in vertices]
    if not parts:
        q = A.quiver
        return Representation(q, {v: 0 for v in q.vertices}, {}, A.field), [], []
    rep = direct_sum([p[0] for p in parts])
    # labels of basis vectors per vertex: (summand, normal word index)
    labels = {v: [] for v in A.quiver.vertices}
    for s, (_, _, words) in enumerate(parts):
        for v in A.quiver.vertices:
            labels[v].extend((s, k) for k in words[v])
    return rep, [p[1] for p in parts], labels


def projective_resolution(A, M, length):
    if length < 1:
        raise NcDeformError("resolution length must be at least 1")
    q = A.quiver
    F = A.field
    steps = []
    cur = M
    incl = None
    for _ in range(length + 1):
        pres = Presentation(cur)
        gens = pres.gens
        P, _, labels = _projective_sum(A, [v for v, _ in gens])
        cache = {}
        # P -> cur: (summand s, word w) -> g_s w
        pi = {}
        for v in q.vertices:
            cols = []
            for s, k in labels[v]:
                gv, x = gens[s]
                cols.append(linalg.matvec(_path(cur, A.basis[k], cache), x, F))
            pi[v] = [[cols[c][r] for c in range(len(cols))] for r in range(cur.dims[v])]
        diff = pi if incl is None else {v: linalg.matmul(incl[v], pi[v], F, inner=cur.dims[v]) if incl[v] else []
                                        for v in q.vertices}
        steps.append(ResolutionStep([v for v, _ in gens], P, labels, diff))
        # kernel
        kb = {}
        for v in q.vertices:
            n = P.dims[v]
            kb[v] = _nullspace(pi[v], F, n) if cur.dims[v] else [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
        kd = {v: len(kb[v]) for v in q.vertices}
        solv = {v: _coords_solver(kb[v], F, P.dims[v]) for v in q.vertices if kd[v]}
        kmats = {}
        for e in q.edges:
            s, t = e.source, e.target
            cols = [solv[t](linalg.matvec(P.matrices[e.id], x, F)) if kd[t] else [] for x in kb[s]]
            kmats[e.id] = [[cols[c][r] for c in range(len(cols))] for r in range(kd[t])]
        K = Representation(q, kd, kmats, F)
        incl = {v: [[kb[v][c][r] for c in range(kd[v])] for r in range(P.dims[v])] for v in q.vertices}
        if sum(kd.values()) == 0:
            break
        cur = K
    return Resolution(steps)


def ext_dim_via_resolution(A, M, N):
    """``dim Ext^1(M, N)`` from ``Hom(P_0,N) -> Hom(P_1,N) -> Hom(P_2,N)``."""
    res = projective_resolution(A, M, 2)
    F = A.field
    q = A.quiver

    def hom_map(j):
        if j >= len(res.steps):
            return None
        src, dst = res.steps[j - 1], res.steps[j]
        nin = sum(N.dims[v] for v in src.gens)
        offs_in, o = [], 0
        for v in src.gens:
            offs_in.append(o)
            o += N.dims[v]
        rows = []
        cache = {}
        for g2, v2 in enumerate(dst.gens):
            # position of generator g2 in P_j at vertex v2
            pos = dst.words[v2].index((g2, A.idempotent(v2)))
            col = [dst.differential[v2][r][pos] for r in range(len(dst.differential[v2]))]
            block = [[F.zero] * nin for _ in range(N.dims[v2])]
            for r, coeff in enumerate(col):
                if coeff == 0:
                    continue
                s, k = src.words[v2][r]
                m = _path(N, A.basis[k], cache)
                o = offs_in[s]
                for i in range(N.dims[v2]):
                    for jj, y in enumerate(m[i]):
                        if y != 0:
                            block[i][o + jj] = block[i][o + jj] + coeff * y
            rows.extend(block)
        return rows, nin

    d1 = hom_map(1)
    if d1 is None:
        return 0
    rows1, n0 = d1
    r1 = _rank(rows1, F, n0) if rows1 else 0
    n1 = sum(N.dims[v] for v in res.steps[1].gens)
    d2 = hom_map(2)
    if d2 is None or not d2[0]:
        ker2 = n1
    else:
        ker2 = n1 - _rank(d2[0], F, n1)
    return ker2 - r1


# towers

@dataclass
class TowerLevel:
    n: int
    summands: dict
    module: Representation
    offsets: dict
    gens: list
    presentation: Presentation
    endo: HomSpace
    exts: dict = dc_field(default_factory=dict)
    quotients: dict = dc_field(default_factory=dict)

    @property
    def dim_R(self):
        return self.endo.dim

    def generator_vector(self, v):
        return self.gens[list(self.module.quiver.vertices).index(v)][1]


@dataclass
class NcTower:
    algebra: QuotientAlgebra
    work: QuotientAlgebra
    levels: list

    @property
    def depth(self):
        return len(self.levels) - 1

    def stabilized_at(self):
        for lv in self.levels:
            if all(e.dim == 0 for ext in lv.exts.values() for e in ext.values()):
                return lv.n
        return None

    def report(self):
        return [{"level": lv.n, "dim_E": sum(lv.module.dims[v] for v in lv.module.quiver.vertices),
                 "dim_R": lv.dim_R,
                 "ext_dims": {f"{i}->{j}": lv.exts[i][j].dim for i in lv.exts for j in lv.exts[i]}}
                for lv in self.levels]


def _assemble_level(n, summands, F, quotients=None):
    q = next(iter(summands.values())).quiver
    verts = list(q.vertices)
    E = direct_sum([summands[i] for i in verts])
    offsets = {}
    acc = {v: 0 for v in verts}
    for i in verts:
        offsets[i] = dict(acc)
        for v in verts:
            acc[v] += summands[i].dims[v]
    return E, offsets


def build_tower(A, n_max):
    """Iterated universal extensions of the vertex simples up to level
    ``n_max``.  Extensions are computed over ``A`` truncated at
    ``n_max + 1`` so that they agree with those over the untruncated
    algebra."""
    if n_max < 0:
        raise NcDeformError("n_max must be non-negative")
    q = A.quiver
    F = A.field
    work = A if A.order >= n_max + 1 else QuotientAlgebra(q, A.source_relations, n_max + 1, F)
    verts = list(q.vertices)
    summands = {i: vertex_simple(q, i, F) for i in verts}
    topgen = {i: [F.one] for i in verts}
    levels = []
    quotients = {}
    for n in range(n_max + 1):
        E, offsets = _assemble_level(n, summands, F)
        gens = []
        for i in verts:
            vec = [F.zero] * E.dims[i]
            for k, x in enumerate(topgen[i]):
                vec[offsets[i][i] + k] = x
            gens.append((i, vec))
        pres = Presentation(E, gens)
        endo = HomSpace(pres, E)
        exts = {}
        nxt, ntop, subd = {}, {}, {}
        for i in verts:
            ue = universal_extension(work, summands[i])
            exts[i] = ue.exts
            nxt[i] = ue.module
            subd[i] = ue.sub_dims
            ntop[i] = [F.zero] * ue.sub_dims[i] + topgen[i]
        levels.append(TowerLevel(n, dict(summands), E, offsets, gens, pres, endo, exts, quotients))
        quotients = subd
        summands, topgen = nxt, ntop
    return NcTower(A, work, levels)


def _theta(level, w, quiver):
    """Generator images of the endomorphism ``g_t(w) -> g_s(w) w``."""
    E = level.module
    F = E.field
    endo = level.endo
    x = [F.zero] * endo.nunk
    s, t = w.start, w.end(quiver)
    verts = list(quiver.vertices)
    src = level.gens[verts.index(s)][1]
    img = linalg.matvec(E.path_matrix(w), src, F)
    o = endo.offs[verts.index(t)]
    x[o:o + len(img)] = img
    return x


def _compose(endo, x, y, mx=None):
    """Generator images of ``phi_x o phi_y``."""
    F = endo.field
    mx = endo.maps(x) if mx is None else mx
    out = []
    for g, v in enumerate(endo.pres.gen_vertices):
        out.extend(linalg.matvec(mx[v], endo.generator_image(y, g), F))
    return out


def theta_map(tower, n):
    """``Theta`` on the normal words of ``A / m^{n+1}`` with values in
    ``R^(n)`` (as generator images)."""
    A = tower.algebra
    An = QuotientAlgebra(A.quiver, A.source_relations, n, A.field)
    lv = tower.levels[n]
    return An, [_theta(lv, w, A.quiver) for w in An.basis]


def _projection(level_hi, level_lo, quotients):
    """Vertex matrices of ``E^(n+1) -> E^(n)``."""
    q = level_hi.module.quiver
    F = level_hi.module.field
    verts = list(q.vertices)
    out = {}
    for v in verts:
        m = _zero_mat(level_lo.module.dims[v], level_hi.module.dims[v], F)
        for i in verts:
            r = quotients[i][v]
            lo = level_lo.summands[i].dims[v]
            for k in range(lo):
                m[level_lo.offsets[i][v] + k][level_hi.offsets[i][v] + r + k] = F.one
        out[v] = m
    return out


def hull_compare(tower):
    """Certify ``R^(n) = A / m^{n+1}`` for every level and the base-change
    isomorphisms ``R^(n) (x)_{R^(n+1)} E^(n+1) = E^(n)``."""
    A = tower.algebra
    q = A.quiver
    F = A.field
    levels_out = []
    for n, lv in enumerate(tower.levels):
        An, thetas = theta_map(tower, n)
        endo = lv.endo
        info = {"level": n, "dim_A": An.dim, "dim_R": endo.dim, "graded_dims": An.graded_dims()}
        if An.dim != endo.dim:
            return failed("hull_compare", {"level": n, "dim_A": An.dim, "dim_R": endo.dim})
        for w, x in zip(An.basis, thetas):
            if not endo.contains(x):
                return failed("hull_compare", {"level": n, "not_a_morphism": str(w)})
        if _rank(thetas, F, endo.nunk) != An.dim:
            return failed("hull_compare", {"level": n, "theta_not_injective": True})
        tmaps = [endo.maps(x) for x in thetas]
        for i in range(An.dim):
            for j in range(An.dim):
                lhs = _compose(endo, thetas[i], thetas[j], tmaps[i])
                prod = An.product(i, j)
                rhs = [F.zero] * endo.nunk
                for k, c in enumerate(prod):
                    if c != 0:
                        rhs = [a + c * b for a, b in zip(rhs, thetas[k])]
                if lhs != rhs:
                    return failed("hull_compare", {"level": n, "product": [str(An.basis[i]), str(An.basis[j])]})
        levels_out.append(info)
    for n in range(len(tower.levels) - 1):
        rep = _base_change_check(tower, n)
        if not rep.ok:
            return rep
        levels_out[n]["base_change"] = rep.details
    return passed("hull_compare", levels=levels_out)


def _base_change_check(tower, n):
    lo, hi = tower.levels[n], tower.levels[n + 1]
    q = lo.module.quiver
    F = lo.module.field
    verts = list(q.vertices)
    pi = _projection(hi, lo, hi.quotients)
    induced = []
    for f in hi.endo.basis:
        fm = hi.endo.maps(f)
        # f must preserve the kernel of pi
        for v in verts:
            comp = linalg.matmul(pi[v], fm[v], F, inner=hi.module.dims[v]) if lo.module.dims[v] else []
            for k in range(hi.module.dims[v]):
                col = [row[k] for row in comp]
                x = [F.one if t == k else F.zero for t in range(hi.module.dims[v])]
                if any(a != 0 for a in linalg.matvec(pi[v], x, F)):
                    continue
                if any(a != 0 for a in col):
                    return failed("base_change", {"level": n, "kernel_not_preserved": str(v)})
        x = []
        for g, v in enumerate(hi.endo.pres.gen_vertices):
            x.extend(linalg.matvec(pi[v], hi.endo.generator_image(f, g), F))
        if not lo.endo.contains(x):
            return failed("base_change", {"level": n, "induced_not_a_morphism": True})
        induced.append(x)
    if _rank(induced, F, lo.endo.nunk) != lo.endo.dim:
        return failed("base_change", {"level": n, "surjection": False})
    # J = kernel of R^(n+1) -> R^(n); J E^(n+1) must be ker(pi)
    cols = [[induced[k][t] for k in range(len(induced))] for t in range(lo.endo.nunk)]
    J = _nullspace(cols, F, len(induced))
    total_hi = sum(hi.module.dims[v] for v in verts)
    total_lo = sum(lo.module.dims[v] for v in verts)
    je = 0
    for v in verts:
        vecs = []
        for c in J:
            f = [F.zero] * hi.endo.nunk
            for k, a in enumerate(c):
                if a != 0:
                    f = [x + a * y for x, y in zip(f, hi.endo.basis[k])]
            m = hi.endo.maps(f)[v]
            vecs.extend([[row[k] for row in m] for k in range(hi.module.dims[v])])
            for k in range(hi.module.dims[v]):
                if any(a != 0 for a in linalg.matvec(pi[v], [row[k] for row in m], F)):
                    return failed("base_change", {"level": n, "JE_not_in_kernel": str(v)})
        je += _rank(vecs, F, hi.module.dims[v]) if vecs else 0
    if total_hi - je != total_lo:
        return failed("base_change", {"level": n, "dim_quotient": total_hi - je, "dim_E": total_lo})
    return passed("base_change", dim_J=len(J), dim_JE=je)


def lemma_checks(tower):
    """``Hom(E_i^(n), S_j)`` is ``k`` for ``i = j`` and zero otherwise, and
    ``Ext^1(E_i^(n), S_j) -> Ext^1(E_i^(n+1), S_j)`` vanishes."""
    q = tower.algebra.quiver
    F = tower.algebra.field
    verts = list(q.vertices)
    homs = {}
    for lv in tower.levels:
        for i in verts:
            for j in verts:
                d = hom_space(lv.summands[i], vertex_simple(q, j, F)).dim
                homs[f"{lv.n}:{i}->{j}"] = d
                if d != (1 if i == j else 0):
                    return failed("lemma_E", {"level": lv.n, "hom": [str(i), str(j)], "dim": d})
    zero_maps = 0
    for n in range(len(tower.levels) - 1):
        lo, hi = tower.levels[n], tower.levels[n + 1]
        for i in verts:
            r = hi.quotients[i]
            for j in verts:
                ext_lo = lo.exts[i][j]
                ext_hi = hi.exts[i][j]
                for c in ext_lo.cocycles:
                    # pull back along E_i^(n+1) -> E_i^(n) (drop the first r_v coordinates)
                    pulled = {}
                    for e in q.edges:
                        s = e.source
                        pulled[e.id] = [[F.zero] * r[s] + list(row) for row in c[e.id]]
                    if not ext_hi.is_coboundary(pulled):
                        return failed("lemma_E", {"level": n, "ext_map_nonzero": [str(i), str(j)]})
                    zero_maps += 1
    return passed("lemma_E", homs=homs, pulled_back_classes=zero_maps)


# the functors

@dataclass
class RModule:
    """Right module over ``R^(n)`` given by the action of ``Theta(w)`` for
    the normal words ``w`` of ``A / m^{n+1}`` (matrices on column
    coordinates, ``t -> t . Theta(w)``)."""

    dim: int
    action: list


@dataclass
class PhiModule:
    module: Representation
    reducers: dict
    tdim: int

    def jh_multiset(self):
        q = self.module.quiver
        return {str(v): self.module.dims[v] for v in q.vertices}


class Equivalence:
    """``Phi = - (x)_R E`` and ``Psi = Hom(E, -)`` at a fixed tower level."""

    def __init__(self, tower, n=None):
        self.tower = tower
        self.n = tower.depth if n is None else n
        self.level = tower.levels[self.n]
        A = tower.algebra
        self.quiver = A.quiver
        self.field = A.field
        self.An, self.thetas = theta_map(tower, self.n)
        endo = self.level.endo
        self.theta_maps = [endo.maps(x) for x in self.thetas]
        self.gen_words = [k for k, w in enumerate(self.An.basis) if len(w) <= 1]

    def psi(self, U):
        """``Hom(E, U)`` with its right R-action."""
        hs = HomSpace(self.level.presentation, U)
        F = self.field
        verts = list(self.quiver.vertices)
        action = []
        cache = {}
        for w in self.An.basis:
            s, t = w.start, w.end(self.quiver)
            m = _path(U, w, cache)
            cols = []
            for x in hs.basis:
                y = [F.zero] * hs.nunk
                src = hs.generator_image(x, verts.index(s))
                img = linalg.matvec(m, src, F)
                o = hs.offs[verts.index(t)]
                y[o:o + len(img)] = img
                cols.append(hs.coords(y))
            action.append([[cols[c][r] for c in range(len(cols))] for r in range(hs.dim)])
        return RModule(hs.dim, action), hs

    def phi(self, T):
        """``T (x)_R E`` as a quotient of ``T (x) E`` by the balancing
        relations for the algebra generators (idempotents and arrows)."""
        E = self.level.module
        F = self.field
        q = self.quiver
        t = T.dim
        reducers = {}
        dims = {}
        for v in q.vertices:
            ev = E.dims[v]
            n = t * ev
            rows = []
            for b in self.gen_words:
                rho = T.action[b]
                th = self.theta_maps[b][v]
                for a in range(t):
                    for k in range(ev):
                        vec = [F.zero] * n
                        for a2 in range(t):
                            x = rho[a2][a]
                            if x != 0:
                                vec[a2 * ev + k] = vec[a2 * ev + k] + x
                        for k2 in range(ev):
                            y = th[k2][k]
                            if y != 0:
                                vec[a * ev + k2] = vec[a * ev + k2] - y
                        if any(z != 0 for z in vec):
                            rows.append(vec)
            rr, piv = _rref(rows, F, n) if rows else ([], [])
            normal = [c for c in range(n) if c not in set(piv)]
            reducers[v] = (rr, piv, normal, ev)
            dims[v] = len(normal)
        mats = {}
        for e in q.edges:
            s, tt = e.source, e.target
            rr_t, piv_t, normal_t, ev_t = reducers[tt]
            _, _, normal_s, ev_s = reducers[s]
            u = E.matrices[e.id]
            cols = []
            for c in normal_s:
                a, k = divmod(c, ev_s)
                vec = [F.zero] * (t * ev_t)
                for k2 in range(ev_t):
                    y = u[k2][k]
                    if y != 0:
                        vec[a * ev_t + k2] = y
                red = _reduce(rr_t, piv_t, vec)
                cols.append([red[c2] for c2 in normal_t])
            mats[e.id] = [[cols[c][r] for c in range(len(cols))] for r in range(len(normal_t))]
        return PhiModule(Representation(q, dims, mats, F), reducers, t)

    def phi_map(self, P1, P2, g):
        """``Phi(g)`` for an R-linear ``g: T1 -> T2`` (matrix ``t2 x t1``)."""
        F = self.field
        out = {}
        for v in self.quiver.vertices:
            _, _, normal1, ev = P1.reducers[v]
            rr2, piv2, normal2, _ = P2.reducers[v]
            cols = []
            for c in normal1:
                a, k = divmod(c, ev)
                vec = [F.zero] * (P2.tdim * ev)
                for a2 in range(P2.tdim):
                    x = g[a2][a]
                    if x != 0:
                        vec[a2 * ev + k] = x
                red = _reduce(rr2, piv2, vec)
                cols.append([red[c2] for c2 in normal2])
            out[v] = [[cols[c][r] for c in range(len(cols))] for r in range(len(normal2))]
        return out

    def counit_is_iso(self, U):
        """``Phi(Psi(U)) -> U``, ``phi (x) x -> phi(x)``, is bijective."""
        T, hs = self.psi(U)
        P = self.phi(T)
        F = self.field
        maps = [hs.maps(x) for x in hs.basis]
        for v in self.quiver.vertices:
            rr, piv, normal, ev = P.reducers[v]
            if len(normal) != U.dims[v]:
                return False
            cols = []
            for c in normal:
                a, k = divmod(c, ev)
                cols.append([row[k] for row in maps[a][v]])
            if U.dims[v] and _rank(cols, F, U.dims[v]) != U.dims[v]:
                return False
        return True

    def unit_is_iso(self, T):
        """``T -> Psi(Phi(T))``, ``t -> (x -> t (x) x)``, is an R-linear
        bijection."""
        P = self.phi(T)
        U = P.module
        hs = HomSpace(self.level.presentation, U)
        if hs.dim != T.dim:
            return False
        F = self.field
        verts = list(self.quiver.vertices)
        images = []
        for a in range(T.dim):
            x = [F.zero] * hs.nunk
            for g, v in enumerate(verts):
                rr, piv, normal, ev = P.reducers[v]
                gv = self.level.gens[g][1]
                vec = [F.zero] * (T.dim * ev)
                for k, y in enumerate(gv):
                    vec[a * ev + k] = y
                red = _reduce(rr, piv, vec)
                img = [red[c] for c in normal]
                o = hs.offs[g]
                x[o:o + len(img)] = img
            if not hs.contains(x):
                return False
            images.append(x)
        if T.dim and _rank(images, F, hs.nunk) != T.dim:
            return False
        return True

    def simple(self, v):
        """The simple right R-module at vertex ``v``."""
        F = self.field
        idx = self.An.idempotent(v)
        return RModule(1, [[[F.one if k == idx else F.zero]] for k in range(self.An.dim)])

    def hom_dims(self, U):
        """``dim Hom(E^(m), U)`` for ``m = 0..n``."""
        return [HomSpace(lv.presentation, U).dim for lv in self.tower.levels[:self.n + 1]]


def nilpotent_modules(A, dim_bound, limit=20000):
    """Every nilpotent module of total dimension ``<= dim_bound`` up to
    isomorphism, produced from strictly upper triangular matrices over a
    vertex-labelled basis (each comes with its composition flag).

    Only defined over a prime field."""
    F = A.field
    if not isinstance(F, PrimeField):
        raise NcDeformError("module enumeration needs a finite field")
    q = A.quiver
    verts = list(q.vertices)
    p = F.p
    count = 0
    for n in range(1, dim_bound + 1):
        for lab in iproduct(verts, repeat=n):
            slots = sum(1 for e in q.edges for i in range(n) for j in range(i + 1, n)
                        if lab[i] == e.target and lab[j] == e.source)
            count += p ** slots
    if count > limit:
        raise InfeasibleEnumeration(count, limit)
    found = []
    buckets = {}
    for n in range(1, dim_bound + 1):
        for lab in iproduct(verts, repeat=n):
            pos = {v: [i for i in range(n) if lab[i] == v] for v in verts}
            local = {i: pos[lab[i]].index(i) for i in range(n)}
            slots = [(e.id, i, j) for e in q.edges for i in range(n) for j in range(i + 1, n)
                     if lab[i] == e.target and lab[j] == e.source]
            for vals in iproduct(range(p), repeat=len(slots)):
                mats = {e.id: [[0] * len(pos[e.source]) for _ in pos[e.target]] for e in q.edges}
                for (eid, i, j), x in zip(slots, vals):
                    mats[eid][local[i]][local[j]] = x
                fr = finite.FiniteRep(q, p, [len(pos[v]) for v in verts], mats)
                rep = fr.to_representation()
                if not A.is_module(rep):
                    continue
                key = _invariants(fr)
                bucket = buckets.setdefault(key, [])
                if any(finite.is_isomorphic(other, fr) for other, _, _ in bucket):
                    continue
                flag = [tuple(sum(1 for i in range(k) if lab[i] == v) for v in verts) for k in range(1, n)]
                bucket.append((fr, rep, flag))
                found.append((rep, flag))
    return found


def _invariants(fr):
    U = finite.total_matrix(fr)
    n = fr.total
    ranks = []
    P = U
    for _ in range(n):
        ranks.append(len(finite.rref(P, fr.p, n)[0]))
        if ranks[-1] == 0:
            break
        P = finite.matmul(P, U, fr.p, n)
    per_edge = tuple(len(finite.rref(fr.mats[e], fr.p, len(fr.mats[e][0]) if fr.mats[e] else 0)[0])
                     for e in fr.quiver.edge_ids)
    return fr.dims, tuple(ranks), per_edge


def _ses_check(eq, U, flag_dims):
    """Psi and then Phi applied to ``0 -> U' -> U -> U'' -> 0``."""
    q = eq.quiver
    F = eq.field
    verts = list(q.vertices)
    k = dict(zip(verts, flag_dims))
    Us, Uq = _sub_and_quotient(U, k)
    T1, h1 = eq.psi(Us)
    T2, h2 = eq.psi(U)
    T3, h3 = eq.psi(Uq)
    # Psi(incl) and Psi(proj) in Hom-coordinates
    gi, gp = [], []
    for x in h1.basis:
        y = []
        for g, v in enumerate(verts):
            img = h1.generator_image(x, g)
            y.extend(list(img) + [F.zero] * (U.dims[v] - k[v]))
        gi.append(h2.coords(y))
    for x in h2.basis:
        y = []
        for g, v in enumerate(verts):
            img = h2.generator_image(x, g)
            y.extend(img[k[v]:])
        gp.append(h3.coords(y))
    mi = [[gi[c][r] for c in range(T1.dim)] for r in range(T2.dim)]
    mp = [[gp[c][r] for c in range(T2.dim)] for r in range(T3.dim)]
    if T1.dim + T3.dim != T2.dim:
        return "psi_not_exact"
    if T1.dim and _rank([list(r) for r in zip(*mi)], F, T2.dim) != T1.dim:
        return "psi_not_exact"
    if T3.dim and _rank(mp, F, T2.dim) != T3.dim:
        return "psi_not_exact"
    P1, P2, P3 = eq.phi(T1), eq.phi(T2), eq.phi(T3)
    fi = eq.phi_map(P1, P2, mi) if T1.dim else None
    fp = eq.phi_map(P2, P3, mp) if T3.dim else None
    for v in verts:
        d1, d2, d3 = P1.module.dims[v], P2.module.dims[v], P3.module.dims[v]
        if d1 + d3 != d2:
            return "phi_not_exact"
        if fi is not None and d1 and _rank([list(r) for r in zip(*fi[v])], F, d2) != d1:
            return "phi_not_exact"
        if fp is not None and d3 and _rank(fp[v], F, d2) != d3:
            return "phi_not_exact"
        if fi is not None and fp is not None and d1 and d3:
            comp = linalg.matmul(fp[v], fi[v], F, inner=d2)
            if not _is_zero(comp):
                return "phi_not_exact"
    return None


def check_equivalence(tower, dim_bound, limit=20000):
    """Verify on every nilpotent module of dimension ``<= dim_bound`` (over
    a prime field) that the counit ``Phi Psi U -> U`` and the unit
    ``Psi U -> Psi Phi Psi U`` are isomorphisms, that both functors are
    exact along composition flags, that ``Hom(E^(m), U)`` grows and
    stabilizes within the tower, and the vanishing statements of
    :func:`lemma_checks`."""
    A = tower.algebra
    eq = Equivalence(tower)
    lem = lemma_checks(tower)
    if not lem.ok:
        return lem
    for v in A.quiver.vertices:
        S = eq.simple(v)
        P = eq.phi(S)
        want = {str(x): (1 if x == v else 0) for x in A.quiver.vertices}
        if P.jh_multiset() != want:
            return failed("equivalence", {"phi_of_simple": str(v), "dims": P.jh_multiset()})
        if not eq.unit_is_iso(S):
            return failed("equivalence", {"unit_on_simple": str(v)})
        if not eq.counit_is_iso(vertex_simple(A.quiver, v, A.field)):
            return failed("equivalence", {"counit_on_simple": str(v)})
    mods = nilpotent_modules(A, dim_bound, limit)
    checked = 0
    for U, flag in mods:
        hd = eq.hom_dims(U)
        total = sum(U.dims[v] for v in A.quiver.vertices)
        if any(a > b for a, b in zip(hd, hd[1:])):
            return failed("equivalence", {"hom_not_monotone": U.to_json(), "dims": hd})
        if hd[-1] != total:
            return failed("equivalence", {"tower_too_shallow": U.to_json(), "dims": hd})
        if not eq.counit_is_iso(U):
            return failed("equivalence", {"counit": U.to_json()})
        T, _ = eq.psi(U)
        if not eq.unit_is_iso(T):
            return failed("equivalence", {"unit": U.to_json()})
        for fd in flag:
            err = _ses_check(eq, U, fd)
            if err:
                return failed("equivalence", {err: U.to_json(), "flag": list(fd)})
        checked += 1
    return passed("equivalence", modules=checked, level=eq.n, dim_bound=dim_bound)
