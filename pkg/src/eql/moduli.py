"""Relations, nilpotency, slope stability, Jordan-Hoelder data and
wall-crossing of quiver representations.

Semistability is decided exactly in two regimes.  Over a prime field
every subrepresentation is enumerated.  Over the rationals (or Gaussian
rationals) the quiver Grassmannian of each candidate sub-dimension
vector is tested for emptiness with a Groebner basis on every Schubert
cell.  That decides semistability over the algebraic closure, which
agrees with semistability over the base field because the maximal
destabilizing subrepresentation is unique and hence Galois-invariant.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations, product as iproduct

from . import finite, linalg
from .fields import GaussianRational, PrimeField, format_fraction
from .quiver import DimVector, PathSeries, QuiverError, Representation, evaluate_series


class ModuliError(ValueError):
    pass


class InfeasibleEnumeration(ModuliError):
    def __init__(self, count, limit):
        super().__init__(f"enumeration of {count} representations exceeds the limit {limit}")
        self.count = count
        self.limit = limit


class StabilityParameter:
    """Central charge ``Z`` on the vertex simples with ``Im Z(i) > 0``."""

    def __init__(self, quiver, charges):
        self.quiver = quiver
        ch = {}
        for v in quiver.vertices:
            if v not in charges:
                raise ModuliError(f"missing central charge at vertex {v!r}")
            z = charges[v]
            if not isinstance(z, GaussianRational):
                z = GaussianRational(*z) if isinstance(z, (tuple, list)) else GaussianRational(z)
            if z.im <= 0:
                raise ModuliError(f"central charge at vertex {v!r} must have positive imaginary part")
            ch[v] = z
        self.charges = ch

    def central_charge(self, dims):
        dims = _dim_tuple(self.quiver, dims)
        z = GaussianRational(0, 0)
        for v, m in zip(self.quiver.vertices, dims):
            z = z + self.charges[v] * m
        return z

    def scaled(self, c):
        c = Fraction(c)
        if c <= 0:
            raise ModuliError("scaling factor must be positive")
        return StabilityParameter(self.quiver, {v: z * c for v, z in self.charges.items()})

    def to_json(self):
        return {str(v): {"re": format_fraction(z.re), "im": format_fraction(z.im)}
                for v, z in self.charges.items()}

    def __repr__(self):
        return f"StabilityParameter({ {v: str(z) for v, z in self.charges.items()} })"


def _dim_tuple(quiver, dims):
    if isinstance(dims, DimVector):
        return dims.as_tuple()
    if isinstance(dims, dict):
        return tuple(dims[v] for v in quiver.vertices)
    return tuple(dims)


def slope(param, dims):
    """``-Re Z(dims) / Im Z(dims)``."""
    d = _dim_tuple(param.quiver, dims)
    if not any(d):
        raise ModuliError("slope of the zero dimension vector is undefined")
    z = param.central_charge(d)
    return -z.re / z.im


def wall_value(param, sub_dims, dims):
    """``Im(Z(sub) conj(Z(dims)))``: positive iff ``sub`` has larger slope."""
    return (param.central_charge(sub_dims) * param.central_charge(dims).conjugate()).im


def charges_from_sheaf_table(quiver, table, B, omega):
    """Vertex charges ``Z_i = -chi_i + (B + i omega) beta_i`` from a table
    ``vertex -> (chi, beta)``."""
    B, omega = Fraction(B), Fraction(omega)
    return StabilityParameter(quiver, {v: GaussianRational(-Fraction(chi) + B * Fraction(beta),
                                                           omega * Fraction(beta))
                                       for v, (chi, beta) in table.items()})


def sheaf_slope(chi, beta, B, omega):
    """``(chi - B beta) / (omega beta)``, the slope of an object with Euler
    characteristic ``chi`` and curve class ``beta``."""
    return (Fraction(chi) - Fraction(B) * Fraction(beta)) / (Fraction(omega) * Fraction(beta))


# relations and nilpotency

def satisfies_relations(rep, reln):
    rels = reln.relations if hasattr(reln, "relations") else list(reln)
    q = rep.quiver
    for f in rels:
        if not isinstance(f, PathSeries):
            raise ModuliError("relations must be path series")
        pairs = [f.endpoints] if f.endpoints is not None else [(a, b) for a in q.vertices for b in q.vertices]
        for a, b in pairs:
            if not linalg.is_zero(evaluate_series(f, rep, a, b)):
                return False
    return True


def is_nilpotent(rep):
    """The radical series ``R_{j+1} = sum_e u_e(R_j)`` reaches zero.

    It does so within ``sum m_i`` steps or not at all, which is the same
    as every path of length ``sum m_i`` acting by zero."""
    if isinstance(rep.field, PrimeField):
        return finite.is_nilpotent(finite.FiniteRep.from_representation(rep))
    F = rep.field
    q = rep.quiver
    n = rep.dims.total
    layer = {v: linalg.identity(rep.dims[v], F) for v in q.vertices}
    for _ in range(n):
        images = {v: [] for v in q.vertices}
        for e in q.edges:
            m = rep.matrices[e.id]
            for vec in layer[e.source]:
                w = linalg.matvec(m, vec, F)
                if any(x != 0 for x in w):
                    images[e.target].append(w)
        layer = {v: linalg.row_space(images[v], F, rep.dims[v]) if images[v] else [] for v in q.vertices}
        if not any(layer.values()):
            return True
    return not any(layer.values())


def nilpotent_by_paths(rep, length):
    """Brute-force check that every path of exactly ``length`` edges acts
    by zero (used to validate the bound in :func:`is_nilpotent`)."""
    from .quiver import enumerate_paths
    q = rep.quiver
    for a in q.vertices:
        for b in q.vertices:
            for w in enumerate_paths(q, a, b, length):
                if len(w) == length and not linalg.is_zero(rep.path_matrix(w)):
                    return False
    return True


def vertex_simple(quiver, v, field):
    dims = {x: (1 if x == v else 0) for x in quiver.vertices}
    return Representation(quiver, dims, {}, field)


def semisimplify(rep):
    """Composition factors with multiplicities as ``[(simple, count)]``.

    Over a prime field the factors are computed exhaustively.  Over the
    rationals only nilpotent representations are supported, whose
    factors are the vertex simples ``S_i`` with multiplicity ``m_i``."""
    if isinstance(rep.field, PrimeField):
        fr = finite.FiniteRep.from_representation(rep)
        groups = finite.group_isomorphic(finite.composition_factors(fr))
        return [(s.to_representation(), c) for s, c in groups]
    if not is_nilpotent(rep):
        raise ModuliError("semi-simplification over characteristic zero needs a nilpotent representation")
    return [(vertex_simple(rep.quiver, v, rep.field), rep.dims[v])
            for v in rep.quiver.vertices if rep.dims[v]]


# subrepresentations and stability

@dataclass
class Destabilizer:
    dims: tuple
    slope: Fraction
    basis: dict

    def to_json(self):
        from .fields import format_scalar
        return {"dims": list(self.dims), "slope": format_fraction(self.slope),
                "basis": {str(v): [[format_scalar(x) for x in r] for r in rows]
                          for v, rows in self.basis.items()}}


@dataclass
class StabilityVerdict:
    semistable: bool
    destabilizer: Destabilizer | None
    complete: bool
    method: str

    def __bool__(self):
        return self.semistable

    def to_json(self):
        out = {"semistable": self.semistable, "complete": self.complete, "method": self.method}
        if self.destabilizer is not None:
            out["destabilizer"] = self.destabilizer.to_json()
        return out


def _sub_dims_list(d):
    out = []
    for dp in iproduct(*[range(m + 1) for m in d]):
        if any(dp) and dp != tuple(d):
            out.append(dp)
    return out


def _finite_subs(fr):
    return [s for s in finite.all_submodules(fr)
            if any(finite.sub_dims(s)) and finite.sub_dims(s) != fr.dims]


def _sum_subs(fr, subs):
    acc = finite.zero_sub(fr)
    gens = [(k, list(row)) for s in subs for k, (b, _) in enumerate(s) for row in b]
    return finite.closure(fr, acc, gens)


def _finite_destabilizer(param, rep):
    fr = finite.FiniteRep.from_representation(rep)
    mu = slope(param, fr.dims)
    best, best_mu = [], None
    for s in _finite_subs(fr):
        m = slope(param, finite.sub_dims(s))
        if m > mu and (best_mu is None or m >= best_mu):
            if best_mu is None or m > best_mu:
                best, best_mu = [s], m
            else:
                best.append(s)
    if not best:
        return None
    # the sum of all maximal-slope subobjects is the unique largest one
    top = _sum_subs(fr, best)
    F = rep.field
    basis = {v: [[F.coerce(x) for x in row] for row in top[k][0]] for k, v in enumerate(rep.quiver.vertices)}
    return Destabilizer(finite.sub_dims(top), best_mu, basis)


def _to_sympy(x):
    from sympy import I, Rational
    if isinstance(x, GaussianRational):
        return Rational(x.re.numerator, x.re.denominator) + I * Rational(x.im.numerator, x.im.denominator)
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def _from_sympy(v, F):
    from sympy import im, re
    r, i = re(v), im(v)
    if i != 0:
        return F.coerce(GaussianRational(Fraction(int(r.p), int(r.q)), Fraction(int(i.p), int(i.q))))
    return F.coerce(Fraction(int(r.p), int(r.q)))


def _cell_system(rep, dp, pivots):
    """Polynomial conditions for the Schubert cell with the given pivot
    columns to consist of subrepresentations."""
    from sympy import Symbol, expand
    q = rep.quiver
    rows = {}
    syms = []
    for k, v in enumerate(q.vertices):
        n = rep.dims[v]
        P = pivots[k]
        vrows = []
        for i, c in enumerate(P):
            row = []
            for j in range(n):
                if j == c:
                    row.append(1)
                elif j < c or j in P:
                    row.append(0)
                else:
                    s = Symbol(f"w_{k}_{i}_{j}")
                    syms.append(s)
                    row.append(s)
            vrows.append(row)
        rows[v] = vrows
    eqs = []
    mats = {e: [[_to_sympy(x) for x in r] for r in m] for e, m in rep.matrices.items()}
    for e in q.edges:
        u = mats[e.id]
        t_rows = rows[e.target]
        Pt = pivots[q.vertices.index(e.target)]
        for w in rows[e.source]:
            img = [sum((u[i][j] * w[j] for j in range(len(w))), 0) for i in range(len(u))]
            resid = list(img)
            for row, c in zip(t_rows, Pt):
                f = img[c]
                resid = [x - f * y for x, y in zip(resid, row)]
            eqs.extend(expand(x) for x in resid if expand(x) != 0)
    return rows, syms, eqs


def _cells(rep, dp):
    q = rep.quiver
    choices = [list(combinations(range(rep.dims[v]), dp[k])) for k, v in enumerate(q.vertices)]
    return iproduct(*choices)


def _grassmannian_point(rep, dp, want_point=False):
    """Whether some subrepresentation of dimension ``dp`` exists over the
    algebraic closure; with ``want_point`` also return one (used when the
    point is unique and therefore rational)."""
    from sympy import groebner, solve
    for pivots in _cells(rep, dp):
        rows, syms, eqs = _cell_system(rep, dp, pivots)
        if not eqs:
            if not want_point:
                return True, None
            if syms:
                continue
            return True, rows
        if not syms:
            continue
        G = groebner(eqs, *syms, order="lex")
        if list(G) == [1]:
            continue
        if not want_point:
            return True, None
        sols = solve(list(G), syms, dict=True)
        if len(sols) != 1 or set(sols[0]) != set(syms):
            raise ModuliError("maximal destabilizing subrepresentation is not an isolated point")
        sol = sols[0]
        return True, {v: [[x.subs(sol) if hasattr(x, "subs") else x for x in r] for r in vr]
                      for v, vr in rows.items()}
    return False, None


def _exact_destabilizer(param, rep):
    d = _dim_tuple(rep.quiver, rep.dims)
    mu = slope(param, d)
    cands = [dp for dp in _sub_dims_list(d) if slope(param, dp) > mu]
    cands.sort(key=lambda dp: (-slope(param, dp), -sum(dp), dp))
    found = []
    for dp in cands:
        if found and slope(param, dp) < slope(param, found[0]):
            break
        ok, _ = _grassmannian_point(rep, dp)
        if ok:
            found.append(dp)
            break
    if not found:
        return None
    dp = found[0]
    _, rows = _grassmannian_point(rep, dp, want_point=True)
    F = rep.field
    basis = {v: [[_from_sympy(x, F) for x in r] for r in vr] for v, vr in rows.items()}
    return Destabilizer(dp, slope(param, dp), basis)


def _q_closure(rep, gens):
    F = rep.field
    q = rep.quiver
    basis = {v: [] for v in q.vertices}
    queue = list(gens)
    while queue:
        v, x = queue.pop()
        rows, piv = linalg.rref(basis[v], F, rep.dims[v]) if basis[v] else ([], [])
        if linalg.in_span(rows, piv, x):
            continue
        basis[v] = linalg.rref(basis[v] + [x], F, rep.dims[v])[0]
        for e in q.edges:
            if e.source == v:
                queue.append((e.target, linalg.matvec(rep.matrices[e.id], x, F)))
    return basis


def candidate_subreps(rep):
    """Subrepresentations generated by single basis vectors and by the
    common kernel of the outgoing arrows (a cheap, incomplete family)."""
    F = rep.field
    q = rep.quiver
    out = []
    for v in q.vertices:
        n = rep.dims[v]
        vecs = [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]
        outs = [rep.matrices[e.id] for e in q.edges if e.source == v]
        stacked = [r for m in outs for r in m]
        if stacked:
            vecs += linalg.nullspace(stacked, F, n)
        for x in vecs:
            out.append(_q_closure(rep, [(v, x)]))
    return out


def find_destabilizer(param, rep, bound=6):
    """The maximal destabilizing subrepresentation (largest slope, then
    largest dimension) or ``None``; returns ``(destabilizer, complete)``."""
    d = _dim_tuple(rep.quiver, rep.dims)
    if not any(d):
        raise ModuliError("zero representation has no slope")
    if isinstance(rep.field, PrimeField):
        return _finite_destabilizer(param, rep), True
    if sum(d) <= bound:
        return _exact_destabilizer(param, rep), True
    mu = slope(param, d)
    best = None
    for b in candidate_subreps(rep):
        dp = tuple(len(b[v]) for v in rep.quiver.vertices)
        if any(dp) and dp != d and slope(param, dp) > mu:
            cand = Destabilizer(dp, slope(param, dp), b)
            if best is None or (cand.slope, sum(dp)) > (best.slope, sum(best.dims)):
                best = cand
    return best, best is not None


def is_semistable(param, rep, bound=6):
    dest, complete = find_destabilizer(param, rep, bound)
    if isinstance(rep.field, PrimeField):
        method = "exhaustive"
    elif sum(_dim_tuple(rep.quiver, rep.dims)) <= bound:
        method = "groebner"
    else:
        method = "candidates"
    return StabilityVerdict(dest is None, dest, complete, method)


# Jordan-Hoelder filtrations and S-equivalence over prime fields

@dataclass
class JHFiltration:
    """``steps[k]`` is the dimension vector of ``F_k``; ``factors[k]`` is
    the stable quotient ``F_{k+1} / F_k``."""

    steps: list
    factors: list = dc_field(default_factory=list)


def _stable_factors(param, fr):
    """Stable factors of a semistable representation, bottom to top."""
    mu = slope(param, fr.dims)
    out = []
    steps = [tuple(0 for _ in fr.dims)]
    cur = fr
    acc = [0] * len(fr.dims)
    while cur.total:
        best = None
        for s in finite.all_submodules(cur):
            dp = finite.sub_dims(s)
            if any(dp) and slope(param, dp) == mu and (best is None or sum(dp) < sum(finite.sub_dims(best))):
                best = s
        sub = finite.restrict(cur, best)
        out.append(sub)
        acc = [a + b for a, b in zip(acc, finite.sub_dims(best))]
        steps.append(tuple(acc))
        cur = finite.quotient(cur, best)
    return out, steps


def jh_filtration(param, rep):
    fr = rep if isinstance(rep, finite.FiniteRep) else finite.FiniteRep.from_representation(rep)
    if _finite_destabilizer_fr(param, fr) is not None:
        raise ModuliError("Jordan-Hoelder filtrations need a semistable representation")
    factors, steps = _stable_factors(param, fr)
    return JHFiltration(steps, factors)


def _finite_destabilizer_fr(param, fr):
    mu = slope(param, fr.dims)
    for s in _finite_subs(fr):
        if slope(param, finite.sub_dims(s)) > mu:
            return s
    return None


def _is_stable_fr(param, fr):
    mu = slope(param, fr.dims)
    return all(slope(param, finite.sub_dims(s)) < mu for s in _finite_subs(fr))


@dataclass
class SClass:
    factors: list
    members: list

    def to_json(self):
        return {"factors": [{"dims": list(f.dims), "matrices": f.to_json()["matrices"]} for f in self.factors],
                "factor_dims": sorted(list(f.dims) for f in self.factors),
                "members": [m.to_json() for m in self.members]}


def enumerate_with_relations(quiver, reln, dims, p, limit=200000):
    d = _dim_tuple(quiver, dims)
    count = finite.count_reps(quiver, d, p)
    if count > limit:
        raise InfeasibleEnumeration(count, limit)
    rels = [] if reln is None else (reln.relations if hasattr(reln, "relations") else list(reln))
    for fr in finite.enumerate_reps(quiver, d, p):
        if rels and not satisfies_relations(fr.to_representation(), rels):
            continue
        yield fr


def s_equivalence_classes(quiver, reln, dims, param, p, limit=200000, order=None):
    """Partition the semistable representations (over the prime field of
    order ``p``) satisfying ``reln`` by their stable factors up to
    isomorphism.  ``order`` optionally permutes the enumeration."""
    reps = list(enumerate_with_relations(quiver, reln, dims, p, limit))
    if order is not None:
        reps = [reps[k] for k in order]
    registry = []
    classes = {}
    for fr in reps:
        if _finite_destabilizer_fr(param, fr) is not None:
            continue
        factors, _ = _stable_factors(param, fr)
        ids = []
        for f in factors:
            for k, g in enumerate(registry):
                if finite.is_isomorphic_simple(g, f):
                    ids.append(k)
                    break
            else:
                registry.append(f)
                ids.append(len(registry) - 1)
        key = tuple(sorted(ids))
        classes.setdefault(key, []).append(fr)
    out = []
    for key, members in classes.items():
        members = sorted(members, key=finite.FiniteRep.key)
        out.append(SClass([registry[k] for k in key], members))
    out.sort(key=lambda c: c.members[0].key())
    return out


def partition_keys(classes):
    return {frozenset(m.key() for m in c.members) for c in classes}


def _root_in_half_open(a, b, c):
    """Does ``a t^2 + b t + c`` vanish for some ``0 < t <= 1``?"""
    f1 = a + b + c
    if f1 == 0:
        return True
    if a == 0:
        if b == 0:
            return False
        t = -c / b
        return 0 < t <= 1
    if c == 0:
        t = -b / a
        return 0 < t <= 1
    if c * f1 < 0:
        return True
    disc = b * b - 4 * a * c
    if disc < 0:
        return False
    t_star = -b / (2 * a)
    if not (0 < t_star < 1):
        return False
    fv = a * t_star * t_star + b * t_star + c
    return fv == 0 or fv * c < 0


def walls_between(param0, param1, dims, sub_dims):
    """Sub-dimension vectors whose wall ``Im(Z(m') conj Z(m)) = 0`` meets
    the segment from ``param0`` (excluded) to ``param1`` (included)."""
    q = param0.quiver
    out = []
    for dp in sorted(set(sub_dims)):
        def value(t):
            ch = {v: param0.charges[v] * (1 - t) + param1.charges[v] * t for v in q.vertices}
            zp = GaussianRational(0, 0)
            zd = GaussianRational(0, 0)
            for v, a, b in zip(q.vertices, dp, dims):
                zp = zp + ch[v] * a
                zd = zd + ch[v] * b
            return (zp * zd.conjugate()).im
        c = value(Fraction(0))
        f1 = value(Fraction(1))
        fh = value(Fraction(1, 2))
        # fit a t^2 + b t + c through t = 0, 1/2, 1
        a = 2 * f1 - 4 * fh + 2 * c
        b = f1 - c - a
        if a == b == c == 0:
            # vanishes along the whole segment, so it separates nothing
            continue
        if _root_in_half_open(a, b, c):
            out.append({"sub_dims": list(dp), "equation": f"Im(Z({list(dp)})*conj(Z({list(dims)}))) = 0",
                        "value_at_start": format_fraction(c), "value_at_end": format_fraction(f1)})
    return out


def wallcross_compare(quiver, reln, dims, sigma, sigma_plus, p, limit=200000):
    """Fibering of ``sigma_plus``-S-classes over ``sigma``-S-classes.

    Raises :class:`ModuliError` if a wall separates the two parameters or
    a ``sigma_plus``-semistable representation is ``sigma``-unstable."""
    d = _dim_tuple(quiver, dims)
    reps = list(enumerate_with_relations(quiver, reln, d, p, limit))
    subs = set()
    for fr in reps:
        for s in _finite_subs(fr):
            subs.add(finite.sub_dims(s))
    walls = walls_between(sigma, sigma_plus, d, subs)
    if walls:
        err = ModuliError("wall between the stability parameters")
        err.walls = walls
        raise err
    base = s_equivalence_classes(quiver, reln, d, sigma, p, limit)
    plus = s_equivalence_classes(quiver, reln, d, sigma_plus, p, limit)
    where = {}
    for k, c in enumerate(base):
        for m in c.members:
            where[m.key()] = k
    fibering = []
    for j, c in enumerate(plus):
        targets = {where.get(m.key()) for m in c.members}
        if None in targets:
            raise ModuliError("a sigma_plus-semistable representation is sigma-unstable")
        if len(targets) != 1:
            raise ModuliError("a sigma_plus-class meets several sigma-classes")
        fibering.append([j, targets.pop()])
    fibers = {k: [j for j, t in fibering if t == k] for k in range(len(base))}
    return {
        "field": f"F_{p}",
        "dims": list(d),
        "sigma": sigma.to_json(),
        "sigma_plus": sigma_plus.to_json(),
        "sigma_classes": [c.to_json() for c in base],
        "sigma_plus_classes": [c.to_json() for c in plus],
        "fibering": fibering,
        "fibers": {str(k): v for k, v in fibers.items()},
        "semistable_inclusion": True,
    }
