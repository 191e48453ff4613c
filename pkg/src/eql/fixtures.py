"""Built-in dg-algebras, A-infinity structures and quiver algebras used by
the tests and the CLI."""

from itertools import combinations

from . import linalg
from .dga import AInfinityStructure, DgAlgebra, compute_hodge, transfer_m
from .fields import RATIONALS, default_rng
from .quiver import Quiver


def _merge_sign(a, b):
    """Sign of sorting the concatenation of two increasing index tuples,
    or 0 if they share an index."""
    if set(a) & set(b):
        return 0
    inv = sum(1 for x in a for y in b if x > y)
    return -1 if inv % 2 else 1


def exterior_monomials(n):
    out = []
    for k in range(n + 1):
        out.extend(combinations(range(n), k))
    return out


def _mono_name(mono, gens):
    if not mono:
        return "1"
    sep = "" if all(len(g) == 1 for g in gens) else "^"
    return sep.join(gens[k] for k in mono)


def exterior_dga(gens, dgen=None, field=RATIONALS, with_pairing=True):
    """Exterior algebra on degree-1 generators.

    ``dgen`` maps a generator name to ``{monomial: coeff}`` where a
    monomial is a tuple of generator names; ``d`` is extended by the
    graded Leibniz rule.  The pairing is the top-degree coefficient of
    the product.
    """
    gens = list(gens)
    n = len(gens)
    monos = exterior_monomials(n)
    pos = {m: k for k, m in enumerate(monos)}
    names = [_mono_name(m, gens) for m in monos]
    degrees = [len(m) for m in monos]

    def wedge(u, v):
        out = {}
        for a, ca in u.items():
            for b, cb in v.items():
                s = _merge_sign(a, b)
                if s:
                    m = tuple(sorted(a + b))
                    out[m] = out.get(m, 0) + s * ca * cb
        return {m: c for m, c in out.items() if c != 0}

    dg = {}
    for g, img in (dgen or {}).items():
        gi = gens.index(g)
        vec = {}
        for mono, c in img.items():
            idx = [gens.index(x) for x in mono]
            s = 1
            # sort the monomial with sign
            for i in range(len(idx)):
                for j in range(len(idx) - 1 - i):
                    if idx[j] > idx[j + 1]:
                        idx[j], idx[j + 1] = idx[j + 1], idx[j]
                        s = -s
            if len(set(idx)) != len(idx):
                continue
            m = tuple(idx)
            vec[m] = vec.get(m, 0) + s * field.coerce(c)
        dg[(gi,)] = vec

    def d_mono(mono):
        out = {}
        for j, g in enumerate(mono):
            img = dg.get((g,))
            if not img:
                continue
            sign = -1 if j % 2 else 1
            term = wedge(wedge({mono[:j]: 1}, img), {mono[j + 1:]: 1})
            for m, c in term.items():
                out[m] = out.get(m, 0) + sign * c
        return {m: c for m, c in out.items() if c != 0}

    differential = {}
    for m in monos:
        v = d_mono(m)
        if v:
            differential[pos[m]] = {pos[k]: c for k, c in v.items()}
    product = {}
    for a in monos:
        for b in monos:
            s = _merge_sign(a, b)
            if s:
                product[(pos[a], pos[b])] = {pos[tuple(sorted(a + b))]: s}
    pairing = {}
    if with_pairing:
        for a in monos:
            rest = tuple(k for k in range(n) if k not in a)
            s = _merge_sign(a, rest)
            pairing[(pos[a], pos[rest])] = s
    return DgAlgebra(names, degrees, differential, product, field, unit=pos[()], pairing=pairing)


def cy3_exterior(field=RATIONALS):
    """Formal exterior algebra on three degree-1 generators with the
    top-wedge pairing of degree -3."""
    return exterior_dga(["x1", "x2", "x3"], field=field)


def massey_dga(field=RATIONALS):
    """Exterior algebra on ``x, y, z`` with ``dz = xy``."""
    return exterior_dga(["x", "y", "z"], {"z": {("x", "y"): 1}}, field=field)


def matrix_exterior(k=2, field=RATIONALS):
    """Exterior algebra on three degree-1 generators tensored with the
    ``k x k`` matrices; block ``(i, j)`` is spanned by ``a (x) E_ij``.

    The pairing is ``top(a b) tr(E_ij E_kl)``."""
    base = cy3_exterior(field)
    names, degrees, blocks, idx = [], [], [], {}
    verts = list(range(1, k + 1))
    for a in range(base.dim):
        for i in verts:
            for j in verts:
                idx[(a, i, j)] = len(names)
                names.append(f"{base.names[a]}.E{i}{j}")
                degrees.append(base.degrees[a])
                blocks.append((i, j))
    product = {}
    for (a, i, j), x in idx.items():
        row = base.mul.get(a, {})
        for (b, k2, l), y in idx.items():
            if j != k2 or b not in row:
                continue
            product[(x, y)] = {idx[(c, i, l)]: v for c, v in row[b].items()}
    pairing = {}
    for (a, i, j), x in idx.items():
        for (b, k2, l), y in idx.items():
            c = base.pairing.get((a, b))
            if c is not None and j == k2 and l == i:
                pairing[(x, y)] = c
    return DgAlgebra(names, degrees, {}, product, field, blocks, None, pairing)


def random_lie_dga(seed=0, field=RATIONALS, bound=3):
    """Chevalley-Eilenberg algebra of a random semidirect product
    ``k (x) k^2`` with nilpotent action (dimension 8), presented in a
    random homogeneous basis.  Nilpotency of the action keeps the
    cohomology large enough to carry nonzero higher products."""
    rng = default_rng(seed)
    while True:
        P = [[field.random(rng, bound) for _ in range(2)] for _ in range(2)]
        if linalg.is_invertible(P, field):
            break
    lam = field.coerce(rng.choice([x for x in range(-bound, bound + 1) if x]))
    N = [[field.zero, lam], [field.zero, field.zero]]
    M = linalg.matmul(linalg.matmul(P, N, field), linalg.inverse(P, field), field)
    # [e0, e1] = M00 e1 + M10 e2, [e0, e2] = M01 e1 + M11 e2
    dgen = {"x1": {("x0", "x1"): -M[0][0], ("x0", "x2"): -M[0][1]},
            "x2": {("x0", "x1"): -M[1][0], ("x0", "x2"): -M[1][1]}}
    A = exterior_dga(["x0", "x1", "x2"], dgen, field=field, with_pairing=False)
    return A.change_basis(_random_homogeneous_basis(A, rng, field, bound))


def _random_homogeneous_basis(A, rng, field, bound):
    n = A.dim
    cols = [[field.zero] * n for _ in range(n)]
    for g in sorted(set(A.degrees)):
        idx = [k for k in range(n) if A.degrees[k] == g]
        while True:
            m = [[field.random(rng, bound) for _ in idx] for _ in idx]
            if linalg.is_invertible(m, field):
                break
        for c, k in enumerate(idx):
            for r, j in enumerate(idx):
                cols[k][j] = m[r][c]
    return cols


def cy3_structure(field=RATIONALS, N=4):
    A = cy3_exterior(field)
    return A, transfer_m(compute_hodge(A), N)


def a2_quiver():
    return Quiver([1, 2], [("a", 1, 2)])


def loop_quiver():
    return Quiver([1], [("e", 1, 1)])


def three_loop_quiver():
    return Quiver([1], [("e1", 1, 1), ("e2", 1, 1), ("e3", 1, 1)])


__all__ = [
    "AInfinityStructure", "a2_quiver", "cy3_exterior", "cy3_structure", "exterior_dga",
    "loop_quiver", "massey_dga", "matrix_exterior", "random_lie_dga", "three_loop_quiver",
]
