"""Representations over a prime field with plain-integer arithmetic.

Exhaustive checks enumerate every representation of a small dimension
vector, so this module avoids scalar objects altogether: vectors are
tuples of ints reduced mod ``p`` and subspaces are kept in reduced row
echelon form.  A subrepresentation is a tuple of such echelon bases, one
per vertex, which doubles as a hashable key.
"""

from itertools import product as iproduct
from operator import mul

from .fields import Fp, prime_field
from .quiver import Representation


def rref(rows, p, ncols):
    """Reduced echelon basis (tuple of tuples) and pivot columns."""
    m = [list(r) for r in rows]
    piv = []
    r = 0
    for c in range(ncols):
        k = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(x % p for x in row) for row in m[:r]), tuple(piv)


def reduce(basis, piv, v, p):
    w = list(v)
    for row, c in zip(basis, piv):
        f = w[c]
        if f:
            w = [(x - f * y) % p for x, y in zip(w, row)]
    return w


def nullspace(a, p, ncols):
    rows, piv = rref(a, p, ncols)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, c in zip(rows, piv):
            if row[f]:
                v[c] = (-row[f]) % p
        out.append(v)
    return out


def matvec(m, v, p):
    return [sum(map(mul, row, v)) % p for row in m]


def matmul(a, b, p, inner):
    cols = len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(inner)) % p for j in range(cols)] for i in range(len(a))]


class FiniteRep:
    """Quiver representation over the prime field of order ``p``.

    ``dims`` is indexed like ``quiver.vertices``; ``mats`` maps edge id to
    a ``dims[t] x dims[s]`` list of int rows.
    """

    __slots__ = ("quiver", "p", "dims", "mats", "_vidx", "_out")

    def __init__(self, quiver, p, dims, mats):
        self.quiver = quiver
        self.p = p
        self.dims = tuple(dims)
        self.mats = mats
        self._vidx = {v: k for k, v in enumerate(quiver.vertices)}
        self._out = {v: [(e.id, self._vidx[e.target]) for e in quiver.edges if e.source == v]
                     for v in quiver.vertices}

    @property
    def total(self):
        return sum(self.dims)

    def dim_at(self, v):
        return self.dims[self._vidx[v]]

    def key(self):
        return (self.dims, tuple((e, tuple(map(tuple, self.mats[e]))) for e in self.quiver.edge_ids))

    def to_representation(self):
        F = prime_field(self.p)
        dims = dict(zip(self.quiver.vertices, self.dims))
        mats = {e: [[Fp(x, self.p) for x in row] for row in m] for e, m in self.mats.items()}
        return Representation(self.quiver, dims, mats, F)

    def to_json(self):
        return {"dims": list(self.dims),
                "matrices": {e: [list(r) for r in self.mats[e]] for e in self.quiver.edge_ids}}

    @classmethod
    def from_representation(cls, rep):
        p = rep.field.p
        dims = [rep.dims[v] for v in rep.quiver.vertices]
        mats = {e: [[int(x) % p for x in row] for row in m] for e, m in rep.matrices.items()}
        return cls(rep.quiver, p, dims, mats)

    def __eq__(self, other):
        return isinstance(other, FiniteRep) and self.p == other.p and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FiniteRep(p={self.p}, dims={self.dims}, mats={self.mats})"


def count_reps(quiver, dims, p):
    vidx = {v: k for k, v in enumerate(quiver.vertices)}
    return p ** sum(dims[vidx[e.source]] * dims[vidx[e.target]] for e in quiver.edges)


def enumerate_reps(quiver, dims, p):
    """Every representation with the given dimension vector, in a fixed
    lexicographic order of matrix entries."""
    vidx = {v: k for k, v in enumerate(quiver.vertices)}
    shapes = [(e.id, dims[vidx[e.target]], dims[vidx[e.source]]) for e in sorted(quiver.edges, key=lambda e: e.id)]
    n = sum(r * c for _, r, c in shapes)
    for flat in iproduct(range(p), repeat=n):
        mats = {}
        pos = 0
        for eid, r, c in shapes:
            mats[eid] = [list(flat[pos + i * c: pos + (i + 1) * c]) for i in range(r)]
            pos += r * c
        yield FiniteRep(quiver, p, dims, mats)


def zero_sub(rep):
    return tuple(((), ()) for _ in rep.dims)


def full_sub(rep):
    return tuple(rref([[1 if i == j else 0 for j in range(n)] for i in range(n)], rep.p, n) for n in rep.dims)


def sub_dims(sub):
    return tuple(len(b) for b, _ in sub)


def _insert(basis, piv, w, p):
    """Add the reduced nonzero vector ``w`` to an echelon basis, keeping
    it reduced; returns the new ``(basis, piv)``."""
    c = next(i for i, x in enumerate(w) if x)
    inv = pow(w[c], -1, p)
    w = tuple((x * inv) % p for x in w)
    rows = []
    for row in basis:
        f = row[c]
        rows.append(tuple((x - f * y) % p for x, y in zip(row, w)) if f else row)
    k = sum(1 for q in piv if q < c)
    return tuple(rows[:k]) + (w,) + tuple(rows[k:]), piv[:k] + (c,) + piv[k:]


def closure(rep, sub, gens):
    """Smallest subrepresentation containing ``sub`` and the homogeneous
    vectors ``gens`` (a list of ``(vertex index, vector)``)."""
    p = rep.p
    verts = rep.quiver.vertices
    bases = [b for b, _ in sub]
    pivs = [piv for _, piv in sub]
    queue = list(gens)
    while queue:
        k, v = queue.pop()
        w = reduce(bases[k], pivs[k], v, p)
        if not any(w):
            continue
        bases[k], pivs[k] = _insert(bases[k], pivs[k], w, p)
        for eid, t in rep._out[verts[k]]:
            queue.append((t, matvec(rep.mats[eid], w, p)))
    return tuple(zip(bases, pivs))


def all_vectors(n, p):
    return iproduct(range(p), repeat=n)


def all_submodules(rep):
    """Every subrepresentation, found by adding one vector at a time."""
    p = rep.p
    start = zero_sub(rep)
    seen = {start}
    order = [start]
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for k, n in enumerate(rep.dims):
            for v in all_vectors(n, p):
                if not any(v):
                    continue
                w = reduce(s[k][0], s[k][1], v, p)
                if not any(w):
                    continue
                t = closure(rep, s, [(k, list(v))])
                if t not in seen:
                    seen.add(t)
                    order.append(t)
    return order


def _split_coords(sub_k, n, x, p):
    """Coordinates of ``x`` in the basis (echelon rows of the subspace,
    then standard vectors at the non-pivot columns)."""
    basis, piv = sub_k
    a = [x[c] for c in piv]
    r = reduce(basis, piv, x, p)
    b = [r[c] for c in range(n) if c not in piv]
    return a, b


def _complement(sub_k, n):
    piv = sub_k[1]
    out = []
    for c in range(n):
        if c not in piv:
            e = [0] * n
            e[c] = 1
            out.append(e)
    return out


def restrict(rep, sub):
    """The subrepresentation as a representation in its echelon basis."""
    p = rep.p
    dims = [len(b) for b, _ in sub]
    vidx = rep._vidx
    mats = {}
    for e in rep.quiver.edges:
        s, t = vidx[e.source], vidx[e.target]
        cols = [_split_coords(sub[t], rep.dims[t], matvec(rep.mats[e.id], w, p), p)[0]
                for w in sub[s][0]]
        mats[e.id] = [[cols[j][i] for j in range(len(cols))] for i in range(dims[t])]
    return FiniteRep(rep.quiver, p, dims, mats)


def quotient(rep, sub):
    p = rep.p
    dims = [n - len(b) for (b, _), n in zip(sub, rep.dims)]
    vidx = rep._vidx
    mats = {}
    for e in rep.quiver.edges:
        s, t = vidx[e.source], vidx[e.target]
        cols = [_split_coords(sub[t], rep.dims[t], matvec(rep.mats[e.id], w, p), p)[1]
                for w in _complement(sub[s], rep.dims[s])]
        mats[e.id] = [[cols[j][i] for j in range(len(cols))] for i in range(dims[t])]
    return FiniteRep(rep.quiver, p, dims, mats)


def normalized_vectors(n, p):
    """Nonzero vectors of ``F_p^n`` whose first nonzero entry is 1."""
    return _NORMALIZED.setdefault((n, p), [v for v in all_vectors(n, p)
                                           if any(v) and next(x for x in v if x) == 1])


_NORMALIZED = {}


def minimal_cyclic_submodule(rep):
    """A nonzero subrepresentation of least dimension generated by one
    homogeneous vector; it is simple."""
    p = rep.p
    verts = rep.quiver.vertices
    # a line spanned by v is a submodule iff every arrow maps v into it
    for k, n in enumerate(rep.dims):
        for v in normalized_vectors(n, p):
            lead = next(i for i, x in enumerate(v) if x)
            ok = True
            for eid, t in rep._out[verts[k]]:
                w = matvec(rep.mats[eid], v, p)
                if t != k:
                    ok = not any(w)
                else:
                    c = w[lead]
                    ok = all((x - c * y) % p == 0 for x, y in zip(w, v))
                if not ok:
                    break
            if ok:
                return tuple((((tuple(v),), (lead,)) if j == k else ((), ())) for j in range(len(rep.dims)))
    best = None
    base = zero_sub(rep)
    for k, n in enumerate(rep.dims):
        for v in normalized_vectors(n, rep.p):
            s = closure(rep, base, [(k, list(v))])
            d = sum(sub_dims(s))
            if best is None or d < best[0]:
                best = (d, s)
                if d == 1:
                    return s
    return best[1]


def composition_factors(rep):
    """Simple composition factors (with repetition), bottom to top."""
    out = []
    cur = rep
    while cur.total:
        s = minimal_cyclic_submodule(cur)
        out.append(restrict(cur, s))
        cur = quotient(cur, s)
    return out


def hom_space(a, b):
    """Basis of ``Hom(a, b)``: each element maps vertex index to a
    ``b.dims[k] x a.dims[k]`` matrix."""
    p = a.p
    q = a.quiver
    vidx = a._vidx
    offs, n = [], 0
    for k in range(len(a.dims)):
        offs.append(n)
        n += a.dims[k] * b.dims[k]

    def var(k, i, j):
        return offs[k] + i * a.dims[k] + j

    eqs = []
    for e in q.edges:
        s, t = vidx[e.source], vidx[e.target]
        ua, ub = a.mats[e.id], b.mats[e.id]
        # (phi_t ua - ub phi_s)[i][j] = 0
        for i in range(b.dims[t]):
            for j in range(a.dims[s]):
                row = [0] * n
                for k in range(a.dims[t]):
                    if ua[k][j]:
                        row[var(t, i, k)] = (row[var(t, i, k)] + ua[k][j]) % p
                for k in range(b.dims[s]):
                    if ub[i][k]:
                        row[var(s, k, j)] = (row[var(s, k, j)] - ub[i][k]) % p
                eqs.append(row)
    basis = nullspace(eqs, p, n) if eqs else [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    out = []
    for v in basis:
        phi = []
        for k in range(len(a.dims)):
            phi.append([[v[var(k, i, j)] for j in range(a.dims[k])] for i in range(b.dims[k])])
        out.append(phi)
    return out


def hom_dim(a, b):
    return len(hom_space(a, b))


def is_isomorphic_simple(a, b):
    return a.dims == b.dims and hom_dim(a, b) > 0


def is_isomorphic(a, b):
    """Isomorphism test: some element of a basis-combination of
    ``Hom(a, b)`` is invertible.  Exhaustive over the Hom space, so meant
    for small representations."""
    if a.dims != b.dims:
        return False
    basis = hom_space(a, b)
    p = a.p
    for coeffs in iproduct(range(p), repeat=len(basis)):
        if not any(coeffs):
            continue
        ok = True
        for k, n in enumerate(a.dims):
            m = [[sum(c * phi[k][i][j] for c, phi in zip(coeffs, basis)) % p for j in range(n)] for i in range(n)]
            if len(rref(m, p, n)[0]) != n:
                ok = False
                break
        if ok:
            return True
    return False


def total_matrix(rep):
    """Block matrix on the direct sum of the vertex spaces with block
    ``(t, s)`` equal to the sum of ``u_e`` over edges ``s -> t``."""
    offs, n = [], 0
    for d in rep.dims:
        offs.append(n)
        n += d
    U = [[0] * n for _ in range(n)]
    vidx = rep._vidx
    for e in rep.quiver.edges:
        s, t = vidx[e.source], vidx[e.target]
        m = rep.mats[e.id]
        for i, row in enumerate(m):
            Ui = U[offs[t] + i]
            for j, x in enumerate(row):
                if x:
                    Ui[offs[s] + j] = (Ui[offs[s] + j] + x) % rep.p
    return U


def is_nilpotent(rep):
    """Iterate the radical series ``R_{j+1} = sum_e u_e(R_j)``; the
    representation is nilpotent iff it reaches zero, which happens within
    ``total`` steps or never.  Edges are kept apart so that parallel
    arrows cannot cancel."""
    p = rep.p
    vidx = rep._vidx
    layer = [tuple(tuple(int(i == j) for j in range(d)) for i in range(d)) for d in rep.dims]
    for _ in range(rep.total):
        images = [[] for _ in rep.dims]
        for e in rep.quiver.edges:
            s, t = vidx[e.source], vidx[e.target]
            m = rep.mats[e.id]
            for v in layer[s]:
                w = matvec(m, v, p)
                if any(w):
                    images[t].append(w)
        layer = [rref(rows, p, d)[0] if rows else () for rows, d in zip(images, rep.dims)]
        if not any(layer):
            return True
    return not any(layer)


def is_vertex_simple(rep):
    return rep.total == 1 and all(not any(any(r) for r in m) for m in rep.mats.values())


def group_isomorphic(reps, iso=is_isomorphic_simple):
    """Group representations into isomorphism classes; returns a list of
    ``(representative, count)`` in order of first appearance."""
    classes = []
    for r in reps:
        for c in classes:
            if iso(c[0], r):
                c[1] += 1
                break
        else:
            classes.append([r, 1])
    return [(c[0], c[1]) for c in classes]
