"""Finite-dimensional dg-algebras, splitting data and homotopy transfer.

Vectors are sparse dicts ``{basis index: coefficient}``.  An n-linear
map is a sparse dict ``{input index tuple: vector}`` listing only its
nonzero values on basis tuples.

Sign conventions follow the Keller form of the Stasheff identities,

    sum_{r+s+t=n} (-1)^(r+st) m_{r+1+t}(1^r (x) m_s (x) 1^t) = 0,

with Koszul signs whenever a map of degree ``k`` moves past inputs of
total degree ``D`` (factor ``(-1)^(k*D)``).  The transferred products
are obtained by the recursion over planar binary trees

    phi(leaf) = -i,    phi(T) = -h lambda_T,
    lambda_(L,R) = (-1)^(|L|+1) mu(phi(L) (x) phi(R)),
    m_n = sum_T p lambda_T,    I_n = sum_T h lambda_T  (n >= 2),

where ``|L|`` is the number of leaves of ``L``.  These choices are
verified by :func:`check_stasheff` and :func:`check_morphism`.
"""

from dataclasses import dataclass
from functools import lru_cache

from . import linalg
from .fields import RATIONALS
from .report import failed, passed


class DgaError(ValueError):
    pass


def _acc(acc, vec, c=1):
    for k, x in vec.items():
        y = acc.get(k)
        y = c * x if y is None else y + c * x
        if y == 0:
            acc.pop(k, None)
        else:
            acc[k] = y


def _scaled(vec, c):
    if c == 1:
        return dict(vec)
    return {k: c * x for k, x in vec.items() if c * x != 0}


def mc_sign(n):
    """``(-1)^(n(n-1)/2)``: the weight of ``m_n`` in the Maurer-Cartan sum."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


class DgAlgebra:
    """Graded algebra with differential on a finite basis.

    ``differential`` maps a basis index to the sparse vector ``d(e_k)``;
    ``product`` maps ``(a, b)`` to ``e_a * e_b``.  ``blocks`` optionally
    labels every basis element with a pair ``(source, target)``: the
    product of ``(a, b)`` and ``(b, c)`` lies in ``(a, c)``.
    """

    def __init__(self, names, degrees, differential=None, product=None,
                 field=RATIONALS, blocks=None, unit=None, pairing=None):
        self.names = list(names)
        self.degrees = [int(x) for x in degrees]
        if len(self.names) != len(self.degrees):
            raise DgaError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise DgaError("duplicate basis names")
        self.field = field
        self.dim = len(self.names)
        self.blocks = [tuple(b) for b in blocks] if blocks is not None else None
        if self.blocks is not None and len(self.blocks) != self.dim:
            raise DgaError("one block label per basis element is required")
        self.unit = unit
        self.d = {}
        for k, vec in (differential or {}).items():
            v = {int(j): field.coerce(c) for j, c in vec.items() if c != 0}
            self._check_index(k)
            for j in v:
                self._check_index(j)
            if v:
                self.d[int(k)] = v
        self.mul = {}
        for (a, b), vec in (product or {}).items():
            self._check_index(a)
            self._check_index(b)
            v = {int(j): field.coerce(c) for j, c in vec.items() if c != 0}
            for j in v:
                self._check_index(j)
            if v:
                self.mul.setdefault(a, {})[b] = v
        self.pairing = {}
        for (a, b), c in (pairing or {}).items():
            self._check_index(a)
            self._check_index(b)
            c = field.coerce(c)
            if c != 0:
                self.pairing[(a, b)] = c

    def _check_index(self, k):
        if not (isinstance(k, int) and 0 <= k < len(self.names)):
            raise DgaError(f"basis index {k!r} out of range")

    def index(self, name):
        return self.names.index(name)

    def block(self, k):
        return self.blocks[k] if self.blocks is not None else None

    def apply_d(self, vec):
        out = {}
        for k, c in vec.items():
            dk = self.d.get(k)
            if dk:
                _acc(out, dk, c)
        return out

    def multiply(self, u, v):
        out = {}
        for a, ca in u.items():
            row = self.mul.get(a)
            if not row:
                continue
            for b, cb in v.items():
                r = row.get(b)
                if r:
                    _acc(out, r, ca * cb)
        return out

    def basis_vector(self, k):
        return {k: self.field.one}

    def degree_indices(self, k, block=None):
        return [j for j in range(self.dim) if self.degrees[j] == k
                and (block is None or self.block(j) == block)]

    def graded_dims(self):
        out = {}
        for g in self.degrees:
            out[g] = out.get(g, 0) + 1
        return dict(sorted(out.items()))

    def differential_matrix(self):
        """Dense matrix of ``d`` in the given basis (column = source)."""
        F = self.field
        m = linalg.zeros(self.dim, self.dim, F)
        for k, vec in self.d.items():
            for j, c in vec.items():
                m[j][k] = c
        return m

    def change_basis(self, cols):
        """Same algebra in the basis ``f_k = sum_j cols[k][j] e_j``.

        Each new basis vector must be homogeneous (and lie in one block)."""
        F = self.field
        n = self.dim
        mat = [[F.coerce(cols[k][j]) for k in range(n)] for j in range(n)]
        inv = linalg.inverse(mat, F)
        new_deg, new_blocks = [], []
        for k in range(n):
            supp = [j for j in range(n) if mat[j][k] != 0]
            degs = {self.degrees[j] for j in supp}
            blks = {self.block(j) for j in supp}
            if len(degs) != 1 or len(blks) != 1:
                raise DgaError("change of basis must be homogeneous")
            new_deg.append(degs.pop())
            new_blocks.append(blks.pop())
        fvec = [{j: mat[j][k] for j in range(n) if mat[j][k] != 0} for k in range(n)]

        def to_new(vec):
            out = {}
            for j, c in vec.items():
                for k in range(n):
                    x = inv[k][j]
                    if x != 0:
                        out[k] = out.get(k, F.zero) + x * c
            return {k: c for k, c in out.items() if c != 0}

        d = {k: to_new(self.apply_d(fvec[k])) for k in range(n)}
        prod = {}
        for a in range(n):
            for b in range(n):
                v = to_new(self.multiply(fvec[a], fvec[b]))
                if v:
                    prod[(a, b)] = v
        pairing = {}
        if self.pairing:
            for a in range(n):
                for b in range(n):
                    s = F.zero
                    for ja, ca in fvec[a].items():
                        for jb, cb in fvec[b].items():
                            c = self.pairing.get((ja, jb))
                            if c is not None:
                                s = s + ca * cb * c
                    if s != 0:
                        pairing[(a, b)] = s
        names = [f"f{k}" for k in range(n)]
        return DgAlgebra(names, new_deg, d, prod, F,
                         new_blocks if self.blocks is not None else None, None, pairing)

    def __repr__(self):
        return f"DgAlgebra(dim={self.dim}, degrees={self.graded_dims()})"


def check_dga(A, check_blocks=True):
    """Verify degrees, block compatibility, ``d^2 = 0``, the graded Leibniz
    rule and associativity on all basis tuples."""
    name = "dga"
    deg = A.degrees
    for k, vec in A.d.items():
        for j in vec:
            if deg[j] != deg[k] + 1:
                return failed(name, {"check": "degree of d", "basis": A.names[k], "image": A.names[j]})
            if check_blocks and A.blocks is not None and A.block(j) != A.block(k):
                return failed(name, {"check": "block of d", "basis": A.names[k], "image": A.names[j]})
    for a, row in A.mul.items():
        for b, vec in row.items():
            for j in vec:
                if deg[j] != deg[a] + deg[b]:
                    return failed(name, {"check": "degree of product", "pair": [A.names[a], A.names[b]],
                                         "image": A.names[j]})
                if check_blocks and A.blocks is not None:
                    ba, bb, bj = A.block(a), A.block(b), A.block(j)
                    if ba[1] != bb[0] or bj != (ba[0], bb[1]):
                        return failed(name, {"check": "block of product",
                                             "pair": [A.names[a], A.names[b]], "image": A.names[j]})
    for k in range(A.dim):
        if A.apply_d(A.apply_d({k: A.field.one})):
            return failed(name, {"check": "d^2 = 0", "basis": A.names[k]})
    one = A.field.one
    for a in range(A.dim):
        ea = {a: one}
        da = A.apply_d(ea)
        for b in range(A.dim):
            eb = {b: one}
            lhs = A.apply_d(A.multiply(ea, eb))
            rhs = A.multiply(da, eb)
            _acc(rhs, A.multiply(ea, A.apply_d(eb)), -1 if deg[a] % 2 else 1)
            _acc(lhs, rhs, -1)
            if lhs:
                return failed(name, {"check": "Leibniz", "pair": [A.names[a], A.names[b]]})
    for a in range(A.dim):
        row = A.mul.get(a, {})
        for b, ab in row.items():
            for c in range(A.dim):
                lhs = A.multiply(ab, {c: one})
                rhs = A.multiply({a: one}, A.multiply({b: one}, {c: one}))
                _acc(lhs, rhs, -1)
                if lhs:
                    return failed(name, {"check": "associativity",
                                         "triple": [A.names[a], A.names[b], A.names[c]]})
        # products with a zero left pair still need checking on the right
        for b in range(A.dim):
            if b in row:
                continue
            for c in range(A.dim):
                rhs = A.multiply({a: one}, A.multiply({b: one}, {c: one}))
                if rhs:
                    return failed(name, {"check": "associativity",
                                         "triple": [A.names[a], A.names[b], A.names[c]]})
    if A.unit is not None:
        u = {A.unit: one}
        for k in range(A.dim):
            if A.multiply(u, {k: one}) != {k: one} or A.multiply({k: one}, u) != {k: one}:
                return failed(name, {"check": "unit", "basis": A.names[k]})
    return passed(name, dim=A.dim)


class HodgeData:
    """Splitting ``C^k = B^k + H^k + L^k`` of every (block, degree) piece.

    ``B`` is the image of ``d``, ``H`` a complement of ``B`` in the cycles
    and ``L`` a complement of the cycles.  ``i`` includes ``H``, ``p`` is
    the coordinate projection onto ``H`` and ``h = -(d|_L)^{-1}`` on ``B``
    (zero on ``H`` and ``L``), so that ``p i = id`` and
    ``i p = id + d h + h d``, with ``h h = 0``, ``h i = 0``, ``p h = 0``.
    """

    def __init__(self, A, reps, p_rows, h_map, degrees, blocks, names):
        self.A = A
        self.reps = reps
        self.p_rows = p_rows
        self.h_map = h_map
        self.degrees = degrees
        self.blocks = blocks
        self.names = names
        self.dim = len(reps)

    @property
    def field(self):
        return self.A.field

    def i(self, k):
        return self.reps[k]

    def apply_i(self, hvec):
        out = {}
        for k, c in hvec.items():
            _acc(out, self.reps[k], c)
        return out

    def apply_p(self, vec):
        out = {}
        for j, c in vec.items():
            for k, x in self.p_cols.get(j, {}).items():
                y = out.get(k, self.field.zero) + c * x
                if y == 0:
                    out.pop(k, None)
                else:
                    out[k] = y
        return out

    def apply_h(self, vec):
        out = {}
        for j, c in vec.items():
            hj = self.h_map.get(j)
            if hj:
                _acc(out, hj, c)
        return out

    @property
    def p_cols(self):
        cols = getattr(self, "_p_cols", None)
        if cols is None:
            cols = {}
            for k, row in enumerate(self.p_rows):
                for j, x in row.items():
                    cols.setdefault(j, {})[k] = x
            self._p_cols = cols
        return cols

    def graded_dims(self):
        out = {}
        for g in self.degrees:
            out[g] = out.get(g, 0) + 1
        return dict(sorted(out.items()))

    def block_indices(self, degree=None, block=None):
        return [k for k in range(self.dim)
                if (degree is None or self.degrees[k] == degree)
                and (block is None or self.blocks[k] == block)]

    def check(self):
        """Verify the homotopy relations and side conditions exactly."""
        A = self.A
        F = self.field
        name = "hodge"
        for k in range(self.dim):
            if A.apply_d(self.reps[k]):
                return failed(name, {"check": "d i = 0", "class": self.names[k]})
            if self.apply_p(self.reps[k]) != {k: F.one}:
                return failed(name, {"check": "p i = id", "class": self.names[k]})
            if self.apply_h(self.reps[k]):
                return failed(name, {"check": "h i = 0", "class": self.names[k]})
        for j in range(A.dim):
            e = {j: F.one}
            lhs = self.apply_i(self.apply_p(e))
            rhs = dict(e)
            _acc(rhs, A.apply_d(self.apply_h(e)))
            _acc(rhs, self.apply_h(A.apply_d(e)))
            _acc(lhs, rhs, -1)
            if lhs:
                return failed(name, {"check": "i p = id + d h + h d", "basis": A.names[j]})
            if self.apply_p(A.apply_d(e)):
                return failed(name, {"check": "p d = 0", "basis": A.names[j]})
            if self.apply_h(self.apply_h(e)):
                return failed(name, {"check": "h h = 0", "basis": A.names[j]})
            if self.apply_p(self.apply_h(e)):
                return failed(name, {"check": "p h = 0", "basis": A.names[j]})
        return passed(name, dims=self.graded_dims())


def compute_hodge(A):
    F = A.field
    labels = sorted({A.block(k) for k in range(A.dim)}, key=repr)
    reps, p_rows, degrees, blocks, names = [], [], [], [], []
    h_map = {}
    for blk in labels:
        idx_all = [k for k in range(A.dim) if A.block(k) == blk]
        L_by_deg = {}
        for g in sorted({A.degrees[k] for k in idx_all}):
            idx = [k for k in idx_all if A.degrees[k] == g]
            pos = {k: t for t, k in enumerate(idx)}
            n = len(idx)
            prev_L = L_by_deg.get(g - 1, [])
            # d is injective on the complement L of the cycles, so B = d(L)
            B = [A.apply_d(l) for l in prev_L]
            nxt = [k for k in idx_all if A.degrees[k] == g + 1]
            npos = {k: t for t, k in enumerate(nxt)}
            dmat = linalg.zeros(len(nxt), n, F)
            for k in idx:
                for j, c in A.d.get(k, {}).items():
                    if j not in npos:
                        raise DgaError("differential leaves its block or degree")
                    dmat[npos[j]][pos[k]] = c
            Z = linalg.nullspace(dmat, F, ncols=n) if nxt else linalg.identity(n, F)

            def dense(vec):
                v = [F.zero] * n
                for k, c in vec.items():
                    v[pos[k]] = c
                return v

            basis = [dense(b) for b in B]
            nb = len(basis)
            Hs = _extend(basis, Z, F, n)
            Ls = _extend(basis, linalg.identity(n, F), F, n)
            if len(basis) != n:
                raise DgaError("splitting failed to produce a basis")
            tmat = [[basis[c][r] for c in range(n)] for r in range(n)]
            tinv = linalg.inverse(tmat, F)
            for t, z in enumerate(Hs):
                vec = {idx[r]: z[r] for r in range(n) if z[r] != 0}
                reps.append(vec)
                p_rows.append({idx[c]: tinv[nb + t][c] for c in range(n) if tinv[nb + t][c] != 0})
                degrees.append(g)
                blocks.append(blk)
                names.append(_class_name(A, vec))
            # h(d l) = -l on B, zero on H and L
            for c in range(n):
                hv = {}
                for t in range(nb):
                    x = tinv[t][c]
                    if x != 0:
                        _acc(hv, prev_L[t], -x)
                if hv:
                    h_map[idx[c]] = hv
            L_by_deg[g] = [{idx[r]: l[r] for r in range(n) if l[r] != 0} for l in Ls]
    return HodgeData(A, reps, p_rows, h_map, degrees, blocks, _dedupe(names))


def _extend(basis, candidates, F, n):
    """Append to ``basis`` (in place) the candidates independent of it."""
    added = []
    rows, piv = linalg.rref(basis, F, n)
    for v in candidates:
        if not linalg.in_span(rows, piv, v):
            basis.append(v)
            added.append(v)
            rows, piv = linalg.rref(basis, F, n)
    return added


def _class_name(A, vec):
    k = min(vec)
    if len(vec) == 1:
        return A.names[k]
    return f"[{A.names[k]}]"


def _dedupe(names):
    seen = {}
    out = []
    for nm in names:
        if nm in seen:
            seen[nm] += 1
            out.append(f"{nm}_{seen[nm]}")
        else:
            seen[nm] = 0
            out.append(nm)
    return out


@dataclass(frozen=True)
class BinaryTree:
    """Planar full binary rooted tree; a leaf has no children."""

    left: "BinaryTree | None" = None
    right: "BinaryTree | None" = None

    @property
    def is_leaf(self):
        return self.left is None

    @property
    def n_leaves(self):
        return 1 if self.is_leaf else self.left.n_leaves + self.right.n_leaves

    def __str__(self):
        if self.is_leaf:
            return "*"
        return f"({self.left}{self.right})"


LEAF = BinaryTree()


@lru_cache(maxsize=None)
def _trees(n):
    if n == 1:
        return (LEAF,)
    out = []
    for k in range(1, n):
        for L in _trees(k):
            for R in _trees(n - k):
                out.append(BinaryTree(L, R))
    return tuple(out)


def enumerate_trees(n):
    """All planar binary trees with ``n`` leaves (Catalan ``C_{n-1}``)."""
    if not isinstance(n, int) or n <= 0:
        raise ValueError("number of leaves must be a positive integer")
    return list(_trees(n))


class AInfinityStructure:
    """Graded space with multilinear products ``m_n`` of degree ``2 - n``.

    ``products[n]`` is a sparse n-linear map; a missing arity is zero.
    """

    def __init__(self, degrees, products, field=RATIONALS, names=None, blocks=None, max_arity=None):
        self.degrees = list(degrees)
        self.dim = len(self.degrees)
        self.field = field
        self.names = list(names) if names is not None else [f"h{k}" for k in range(self.dim)]
        self.blocks = list(blocks) if blocks is not None else [None] * self.dim
        self.products = {n: {k: dict(v) for k, v in mp.items() if v} for n, mp in products.items()}
        self.max_arity = max_arity if max_arity is not None else max(self.products, default=2)

    def m(self, n):
        return self.products.get(n, {})

    def evaluate(self, n, inputs):
        return dict(self.m(n).get(tuple(inputs), {}))

    def check_degrees(self):
        for n, mp in self.products.items():
            for key, vec in mp.items():
                din = sum(self.degrees[k] for k in key)
                for j in vec:
                    if self.degrees[j] != din + 2 - n:
                        return failed("degrees", {"arity": n, "inputs": [self.names[k] for k in key],
                                                  "output": self.names[j]})
        return passed("degrees")

    def structure_constants(self, n):
        """Sorted list ``(inputs, output, coeff)`` of the nonzero entries."""
        out = []
        for key in sorted(self.m(n)):
            for j in sorted(self.m(n)[key]):
                out.append((key, j, self.m(n)[key][j]))
        return out

    def with_products(self, products):
        return AInfinityStructure(self.degrees, products, self.field, self.names, self.blocks,
                                  max(self.max_arity, max(products, default=2)))

    def mc_normalized(self):
        """Copy with ``m_n`` replaced by ``(-1)^(n(n-1)/2) m_n``."""
        prods = {n: {k: _scaled(v, mc_sign(n)) for k, v in mp.items()} for n, mp in self.products.items()}
        return AInfinityStructure(self.degrees, prods, self.field, self.names, self.blocks, self.max_arity)


def dga_as_ainfinity(A):
    """The dg-algebra itself as an A-infinity structure (``m_1 = d``,
    ``m_2 = product``)."""
    m1 = {(k,): dict(v) for k, v in A.d.items()}
    m2 = {}
    for a, row in A.mul.items():
        for b, v in row.items():
            m2[(a, b)] = dict(v)
    return AInfinityStructure(A.degrees, {1: m1, 2: m2}, A.field, A.names,
                              A.blocks if A.blocks is not None else None)


class _Transfer:
    """Memoized tree evaluation shared by :func:`transfer_m` and
    :func:`transfer_I`."""

    def __init__(self, hodge):
        self.hodge = hodge
        self.A = hodge.A
        self.hdeg = hodge.degrees
        self._lam = {}
        self._phi = {}

    def phi(self, T):
        if T in self._phi:
            return self._phi[T]
        if T.is_leaf:
            out = {(k,): _scaled(self.hodge.reps[k], -1) for k in range(self.hodge.dim)}
        else:
            out = {}
            for key, vec in self.lam(T).items():
                v = self.hodge.apply_h(vec)
                if v:
                    out[key] = _scaled(v, -1)
        self._phi[T] = out
        return out

    def lam(self, T):
        if T in self._lam:
            return self._lam[T]
        L, R = T.left, T.right
        nl, nr = L.n_leaves, R.n_leaves
        base = -1 if (nl + 1) % 2 else 1
        odd_r = (1 - nr) % 2 == 1
        fl, fr = self.phi(L), self.phi(R)
        out = {}
        hdeg = self.hdeg
        for kl, vl in fl.items():
            s = base
            if odd_r and sum(hdeg[k] for k in kl) % 2:
                s = -s
            for kr, vr in fr.items():
                prod = self.A.multiply(vl, vr)
                if prod:
                    key = kl + kr
                    cur = out.get(key)
                    if cur is None:
                        out[key] = _scaled(prod, s)
                        if not out[key]:
                            del out[key]
                    else:
                        _acc(cur, prod, s)
                        if not cur:
                            del out[key]
        self._lam[T] = out
        return out

    def m_tree(self, T):
        out = {}
        for key, vec in self.lam(T).items():
            v = self.hodge.apply_p(vec)
            if v:
                out[key] = v
        return out

    def I_tree(self, T):
        out = {}
        for key, vec in self.lam(T).items():
            v = self.hodge.apply_h(vec)
            if v:
                out[key] = v
        return out


def _sum_maps(maps):
    out = {}
    for mp in maps:
        for key, vec in mp.items():
            cur = out.get(key)
            if cur is None:
                out[key] = dict(vec)
            else:
                _acc(cur, vec)
                if not cur:
                    del out[key]
    return out


def tree_terms(hodge, T):
    """``(m_{n,T}, I_{n,T})`` for one tree, as sparse multilinear maps."""
    tr = _Transfer(hodge)
    if T.is_leaf:
        return {}, {(k,): dict(hodge.reps[k]) for k in range(hodge.dim)}
    return tr.m_tree(T), tr.I_tree(T)


def transfer(hodge, N):
    """Minimal A-infinity structure on ``H`` and the morphism ``I`` into
    ``A``, up to arity ``N``."""
    if N < 1:
        raise ValueError("arity cap must be at least 1")
    tr = _Transfer(hodge)
    prods = {}
    comps = {1: {(k,): dict(hodge.reps[k]) for k in range(hodge.dim)}}
    for n in range(2, N + 1):
        trees = enumerate_trees(n)
        prods[n] = _sum_maps(tr.m_tree(T) for T in trees)
        comps[n] = _sum_maps(tr.I_tree(T) for T in trees)
    ainf = AInfinityStructure(hodge.degrees, prods, hodge.field, hodge.names, hodge.blocks,
                              max_arity=max(N, 2))
    return ainf, TransferData(hodge, comps, N)


def transfer_m(hodge, N=6):
    if N < 2:
        raise ValueError("arity cap must be at least 2")
    return transfer(hodge, N)[0]


def transfer_I(hodge, N=6):
    return transfer(hodge, N)[1]


class TransferData:
    """Components ``I_n : H^{(x)n} -> A`` of degree ``1 - n``; ``I_1 = i``."""

    def __init__(self, hodge, components, max_arity):
        self.hodge = hodge
        self.components = components
        self.max_arity = max_arity

    def I(self, n):
        return self.components.get(n, {})


def _compose(acc, outer, inner_by_out, r, inner_deg, sign, degrees):
    """``acc += sign * outer(1^r (x) inner (x) 1^t)`` with Koszul signs."""
    for key, vec in outer.items():
        o = key[r]
        ins = inner_by_out.get(o)
        if not ins:
            continue
        pre, post = key[:r], key[r + 1:]
        s = sign
        if inner_deg % 2 and sum(degrees[k] for k in pre) % 2:
            s = -s
        for tin, c in ins:
            nk = pre + tin + post
            cur = acc.get(nk)
            if cur is None:
                cur = acc[nk] = {}
            _acc(cur, vec, s * c)
            if not cur:
                del acc[nk]


def _by_output(mp):
    out = {}
    for key, vec in mp.items():
        for j, c in vec.items():
            out.setdefault(j, []).append((key, c))
    return out


def stasheff_defect(ainf, n):
    """Left side of the arity-``n`` Stasheff identity as a sparse map."""
    acc = {}
    deg = ainf.degrees
    for s in range(1, n + 1):
        inner = ainf.m(s)
        if not inner:
            continue
        ib = _by_output(inner)
        for r in range(0, n - s + 1):
            t = n - s - r
            outer = ainf.m(r + 1 + t)
            if not outer:
                continue
            sign = -1 if (r + s * t) % 2 else 1
            _compose(acc, outer, ib, r, 2 - s, sign, deg)
    return acc


def check_stasheff(ainf, N=None):
    """Exact check of all Stasheff identities up to arity ``N``."""
    N = N if N is not None else ainf.max_arity
    for n in range(1, N + 1):
        defect = stasheff_defect(ainf, n)
        if defect:
            key = min(defect)
            return failed("stasheff", {"arity": n, "inputs": [ainf.names[k] for k in key],
                                       "defect": {ainf.names[j]: str(c) for j, c in sorted(defect[key].items())}})
    return passed("stasheff", max_arity=N)


def morphism_defect(ainf, transfer_data, n):
    """Difference of the two sides of the arity-``n`` A-infinity morphism
    identity for ``I : H -> A`` (target has ``m_1 = d``, ``m_2 = product``)."""
    A = transfer_data.hodge.A
    deg = ainf.degrees
    lhs = {}
    for s in range(1, n + 1):
        inner = ainf.m(s)
        if not inner:
            continue
        ib = _by_output(inner)
        for r in range(0, n - s + 1):
            t = n - s - r
            f = transfer_data.I(r + 1 + t)
            if not f:
                continue
            sign = -1 if (r + s * t) % 2 else 1
            _compose(lhs, f, ib, r, 2 - s, sign, deg)
    rhs = {}
    fn = transfer_data.I(n)
    for key, vec in fn.items():
        dv = A.apply_d(vec)
        if dv:
            rhs[key] = dv
    for i in range(1, n):
        j = n - i
        fi, fj = transfer_data.I(i), transfer_data.I(j)
        base = -1 if (i - 1) % 2 else 1
        odd_j = (1 - j) % 2 == 1
        for ki, vi in fi.items():
            s = base
            if odd_j and sum(deg[k] for k in ki) % 2:
                s = -s
            for kj, vj in fj.items():
                prod = A.multiply(vi, vj)
                if prod:
                    key = ki + kj
                    cur = rhs.setdefault(key, {})
                    _acc(cur, prod, s)
                    if not cur:
                        del rhs[key]
    for key, vec in rhs.items():
        cur = lhs.setdefault(key, {})
        _acc(cur, vec, -1)
        if not cur:
            del lhs[key]
    return lhs


def check_morphism(ainf, transfer_data, N=None):
    N = N if N is not None else transfer_data.max_arity
    for n in range(1, N + 1):
        defect = morphism_defect(ainf, transfer_data, n)
        if defect:
            key = min(defect)
            A = transfer_data.hodge.A
            return failed("morphism", {"arity": n, "inputs": [ainf.names[k] for k in key],
                                       "defect": {A.names[j]: str(c) for j, c in sorted(defect[key].items())}})
    return passed("morphism", max_arity=N)
