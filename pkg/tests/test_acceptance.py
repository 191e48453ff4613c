"""Acceptance criteria.  Each test prints one PASS/FAIL line; the lines are
repeated in the pytest terminal summary.  Run standalone with
``python tests/test_acceptance.py``."""

import functools
import json
import os
import subprocess
import sys
import time
from fractions import Fraction
from math import factorial
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from support import (DATA, GOLDEN, PotentialChain, a2_algebra, commutator_algebra,  # noqa: E402
                     loop_e3_algebra, record_criterion)

from eql import finite  # noqa: E402
from eql.dga import check_morphism, check_stasheff, compute_hodge, enumerate_trees, transfer  # noqa: E402
from eql.fields import RATIONALS, default_rng, prime_field  # noqa: E402
from eql.fixtures import cy3_exterior, massey_dga, matrix_exterior, random_lie_dga  # noqa: E402
from eql.moduli import (StabilityParameter, is_nilpotent, is_semistable, satisfies_relations,  # noqa: E402
                        semisimplify, wallcross_compare, walls_between)
from eql.ncdeform import (build_tower, check_equivalence, ext_space, hull_compare, lemma_checks,  # noqa: E402
                          vertex_simple)
from eql.potential import (SymbolicGradient, check_cyclic, crit_equals_mc, cyclic_derivative,  # noqa: E402
                           gradient_is_zero, mc_defect, mc_defect_is_zero, potential_relations,
                           relations_vanish, trace_potential, verify_jacobian_identity)
from eql.quiver import (Quiver, Representation, a2_quiver, gauge_act, loop_quiver,  # noqa: E402
                        random_gauge, random_representation, two_cycle_quiver)


def criterion(n, title):
    def deco(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except Exception as exc:
                msg = f"{type(exc).__name__}: {exc}".replace("\n", " ")
                record_criterion(n, title, False, msg[:400])
                raise
            record_criterion(n, title, True, f"{detail}; {time.perf_counter() - t0:.2f}s")
        return run
    return deco


# 1 ---------------------------------------------------------------------

@criterion(1, "binary tree counts")
def test_tree_counts():
    t0 = time.perf_counter()
    counts = []
    for n in range(1, 11):
        got = len(enumerate_trees(n))
        want = factorial(2 * n - 2) // (factorial(n - 1) * factorial(n))
        assert got == want, f"n={n}: {got} trees, expected {want}"
        assert got < 4 ** (n - 1) or n == 1, f"n={n}: {got} >= 4^{n - 1}"
        counts.append(got)
    # for n = 1 the bound reads 1 < 1; the single leaf is the equality case
    assert counts[0] == 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    return f"n=1..10 -> {counts}"


# 2 ---------------------------------------------------------------------

@criterion(2, "transfer satisfies Stasheff (arity 6) and morphism (arity 5) identities")
def test_transfer_soundness():
    fixtures = {"exterior": cy3_exterior(), "massey": massey_dga(), "random_lie": random_lie_dga(0)}
    assert random_lie_dga(0).dim == 8
    out = []
    for name, A in fixtures.items():
        t0 = time.perf_counter()
        hodge = compute_hodge(A)
        assert hodge.check().ok
        ainf, td = transfer(hodge, 6)
        st = check_stasheff(ainf, 6)
        mo = check_morphism(ainf, td, 5)
        assert st.ok, f"{name}: {st.witness}"
        assert mo.ok, f"{name}: {mo.witness}"
        elapsed = time.perf_counter() - t0
        assert elapsed < 60, f"{name} took {elapsed:.1f}s"
        top = max((n for n in range(2, 7) if ainf.m(n)), default=0)
        out.append(f"{name}: highest nonzero m_{top}")
    return ", ".join(out)


# 3 ---------------------------------------------------------------------

@criterion(3, "formality when d = 0")
def test_formality():
    checked = 0
    for A in (cy3_exterior(), matrix_exterior(2)):
        assert not A.d
        hodge = compute_hodge(A)
        assert hodge.dim == A.dim
        ainf, td = transfer(hodge, 6)
        F = A.field
        for a in range(hodge.dim):
            for b in range(hodge.dim):
                lhs = hodge.apply_i(ainf.evaluate(2, (a, b)))
                rhs = A.multiply(hodge.i(a), hodge.i(b))
                assert lhs == {k: v for k, v in rhs.items() if v != F.zero}, (a, b)
                checked += 1
        for n in range(3, 7):
            assert not ainf.m(n), f"m_{n} nonzero"
        for n in range(2, 7):
            assert not any(td.I(n).values()), f"I_{n} nonzero"
    return f"{checked} products compared, m_3..m_6 = 0, I_2..I_6 = 0"


# 4 ---------------------------------------------------------------------

@criterion(4, "CY3 chain: cyclic, cubic potential, commutator relations, jacobian identity")
def test_cy3_chain():
    ch = PotentialChain(cy3_exterior(), N=4)
    assert check_cyclic(ch.ainf, ch.pairing, 3).ok
    W = ch.W
    assert W.lengths() == [3]
    edges = list(ch.quiver.edge_ids)
    assert len(edges) == 3
    coeffs = set(W.coeffs.values())
    assert len(W.coeffs) == 2 and len({abs(c) for c in coeffs}) == 1 and sum(coeffs) == 0
    c = next(iter(W.coeffs.values()))
    for k, e in enumerate(edges):
        a, b = edges[(k + 1) % 3], edges[(k + 2) % 3]
        d = cyclic_derivative(W, e)
        words = {tuple(w.edges): v for w, v in d.coeffs.items()}
        assert set(words) == {(a, b), (b, a)}, words
        assert words[(a, b)] == -words[(b, a)] and abs(words[(a, b)]) == abs(c)
    jac = verify_jacobian_identity(ch.ainf, ch.pairing, ch.pres, 4)
    assert jac.ok, jac.witness
    return f"W = {W.to_series()!r}"


# 5 ---------------------------------------------------------------------

def _commuting_loops(q, d, rng, F=RATIONALS):
    """Loops at one vertex given by polynomials in one random matrix."""
    import eql.linalg as la
    M = [[F.random(rng) for _ in range(d)] for _ in range(d)]
    I = la.identity(d, F)
    M2 = la.matmul(M, M, F)
    polys = [M, la.add(M2, I), la.add(la.scale(Fraction(2), M), la.scale(Fraction(-1), M2))]
    return polys


def _critical_candidates(ch, rng):
    """Representations expected (not assumed) to lie on the critical locus."""
    q = ch.quiver
    out = []
    for d in (1, 2, 3):
        dims = {v: d for v in q.vertices}
        out.append(Representation(q, dims, {}, RATIONALS))
        loops = [e for e in q.edge_ids if q.source(e) == q.target(e) == q.vertices[0]]
        polys = _commuting_loops(q, d, rng)
        out.append(Representation(q, dims, {e: polys[k % 3] for k, e in enumerate(loops)}, RATIONALS))
    return out


def _directional_fd(W, rep, D, h):
    def shifted(t):
        mats = {e: [[x + t * y for x, y in zip(r, s)] for r, s in zip(rep.matrices[e], D[e])]
                for e in rep.matrices}
        return trace_potential(W, Representation(rep.quiver, rep.dims, mats, rep.field))
    return (shifted(h) - shifted(-h)) / (2 * h)


@criterion(5, "critical locus equals Maurer-Cartan locus")
def test_crit_equals_mc():
    t0 = time.perf_counter()
    fixtures = {"cy3": PotentialChain(cy3_exterior()), "matrix_exterior": PotentialChain(matrix_exterior(2)),
                "cy3+m3": PotentialChain(cy3_exterior(), inject=1)}
    summary = []
    h = Fraction(1, 2 ** 10)
    worst = Fraction(0)
    for name, ch in fixtures.items():
        rng = default_rng(5)
        q = ch.quiver
        dW = potential_relations(ch.W)
        grads = {}
        samples = []
        for _ in range(100):
            dims = {v: rng.randint(1, 3) for v in q.vertices}
            samples.append(random_representation(q, dims, RATIONALS, rng))
        samples.extend(_critical_candidates(ch, rng))
        zeros = 0
        for rep in samples:
            key = tuple(rep.dims[v] for v in q.vertices)
            if key not in grads:
                grads[key] = SymbolicGradient(ch.W, {v: rep.dims[v] for v in q.vertices})
            r = crit_equals_mc(ch.W, ch.relations, rep, grads[key])
            assert r.ok, f"{name}: {r.witness}"
            g0 = gradient_is_zero(grads[key](rep))
            k0 = mc_defect_is_zero(mc_defect(ch.ainf, ch.pres, rep, ch.N - 1))
            r0 = relations_vanish(dW, rep)
            assert g0 == k0 == r0, f"{name}: gradient {g0}, kappa {k0}, relations {r0}"
            zeros += g0
        assert 0 < zeros < len(samples), f"{name}: {zeros} critical points among {len(samples)}"
        # central differences of a polynomial of degree <= 4 have error exactly c h^2
        for _ in range(20):
            dims = {v: rng.randint(1, 3) for v in q.vertices}
            key = tuple(dims[v] for v in q.vertices)
            if key not in grads:
                grads[key] = SymbolicGradient(ch.W, dims)
            rep = random_representation(q, dims, RATIONALS, rng)
            D = {e: [[RATIONALS.random(rng) for _ in row] for row in rep.matrices[e]] for e in q.edge_ids}
            G = grads[key](rep)
            exact = sum((G[e][p][r] * D[e][p][r] for e in q.edge_ids
                         for p in range(len(G[e])) for r in range(len(G[e][p]))), Fraction(0))
            err_h = _directional_fd(ch.W, rep, D, h) - exact
            err_2h = _directional_fd(ch.W, rep, D, 2 * h) - exact
            assert err_2h == 4 * err_h, f"{name}: error not quadratic in the step"
            assert abs(err_h) <= h, f"{name}: error {float(err_h)} exceeds the step"
            worst = max(worst, abs(err_h) / h ** 2)
        summary.append(f"{name}: {len(samples)} reps, {zeros} critical")
    elapsed = time.perf_counter() - t0
    assert elapsed < 60, f"took {elapsed:.1f}s"
    return "; ".join(summary) + f"; fd error <= {float(worst):.3g} h^2"


# 6 ---------------------------------------------------------------------

def _verdict_key(v):
    return (v.semistable, v.complete, v.destabilizer.dims if v.destabilizer is not None else None)


def _upper_nilpotent(q, dims, rng):
    mats = {}
    for e in q.edge_ids:
        d = dims[q.source(e)]
        mats[e] = [[RATIONALS.random(rng) if c > r else Fraction(0) for c in range(d)] for r in range(d)]
    return Representation(q, dims, mats, RATIONALS)


@criterion(6, "gauge invariance of tr W, relations, nilpotency and semistability")
def test_gauge_invariance():
    rng = default_rng(6)
    cy3 = PotentialChain(cy3_exterior())
    mx = PotentialChain(matrix_exterior(2))
    a2 = a2_quiver()
    fixtures = []
    # (name, potential or None, relations, parameters, representations)
    q = cy3.quiver
    fixtures.append(("cy3", cy3.W, potential_relations(cy3.W),
                     [StabilityParameter(q, {1: (0, 1)})],
                     [random_representation(q, {1: 2}, RATIONALS, rng),
                      Representation(q, {1: 3}, dict(zip(q.edge_ids, _commuting_loops(q, 3, rng))), RATIONALS),
                      _upper_nilpotent(q, {1: 3}, rng)]))
    q = mx.quiver
    fixtures.append(("matrix_exterior", mx.W, potential_relations(mx.W),
                     [StabilityParameter(q, {1: (0, 1), 2: (1, 1)}), StabilityParameter(q, {1: (0, 1), 2: (-1, 1)})],
                     [random_representation(q, {1: 1, 2: 1}, RATIONALS, rng, density=0.3),
                      Representation(q, {1: 1, 2: 1}, {}, RATIONALS)]))
    fixtures.append(("a2", None, [],
                     [StabilityParameter(a2, {1: (0, 1), 2: (1, 1)}), StabilityParameter(a2, {1: (0, 1), 2: (-1, 1)})],
                     [random_representation(a2, {1: 2, 2: 1}, RATIONALS, rng),
                      random_representation(a2, {1: 1, 2: 2}, RATIONALS, rng),
                      Representation(a2, {1: 2, 2: 2}, {"a": [[1, 2], [2, 4]]}, RATIONALS)]))
    seen = set()
    transforms = 0
    for name, W, rels, params, reps in fixtures:
        for rep in reps:
            base = (trace_potential(W, rep) if W is not None else None,
                    satisfies_relations(rep, rels), is_nilpotent(rep),
                    [_verdict_key(is_semistable(p, rep)) for p in params])
            seen.add(("relations", base[1]))
            seen.add(("nilpotent", base[2]))
            for v in base[3]:
                seen.add(("semistable", v[0]))
            for _ in range(50):
                g = random_gauge(rep, rng)
                moved = gauge_act(g, rep)
                got = (trace_potential(W, moved) if W is not None else None,
                       satisfies_relations(moved, rels), is_nilpotent(moved),
                       [_verdict_key(is_semistable(p, moved)) for p in params])
                assert got == base, f"{name}: {base} became {got}"
                transforms += 1
    # every verdict should be exercised in both directions
    for kind in ("relations", "nilpotent", "semistable"):
        assert {(kind, True), (kind, False)} <= seen, f"{kind} verdict only seen one way"
    return f"{transforms} gauge transformations over {sum(len(f[4]) for f in fixtures)} representations"


# 7 ---------------------------------------------------------------------

def _dim_vectors(nverts, max_total):
    from itertools import product
    for d in product(range(max_total + 1), repeat=nverts):
        if 0 < sum(d) <= max_total:
            yield d


@criterion(7, "nilpotent iff composition factors are the vertex simples (F_2, exhaustive)")
def test_nilpotent_structure():
    t0 = time.perf_counter()
    p = 2
    F = prime_field(p)
    cases = [(loop_quiver(), 4), (a2_quiver(), 4), (two_cycle_quiver(), 4),
             (Quiver([1], [("e1", 1, 1), ("e2", 1, 1)]), 2),
             (Quiver([1], [("e1", 1, 1), ("e2", 1, 1), ("e3", 1, 1)]), 2)]
    total = nilpotent = 0
    for q, bound in cases:
        for dims in _dim_vectors(len(q.vertices), bound):
            for fr in finite.enumerate_reps(q, dims, p):
                factors = finite.composition_factors(fr)
                vertex_only = all(finite.is_vertex_simple(f) for f in factors)
                nil = finite.is_nilpotent(fr)
                assert nil == vertex_only, f"{fr.to_json()}: nilpotent={nil}"
                assert is_nilpotent(fr.to_representation()) == nil
                if nil:
                    ss = semisimplify(fr.to_representation())
                    counts = {}
                    for s, c in ss:
                        assert s.dims.total == 1 and all(not any(any(r) for r in m)
                                                           for m in s.matrices.values())
                        v = next(v for v in q.vertices if s.dims[v])
                        counts[v] = counts.get(v, 0) + c
                    want = {v: m for v, m in zip(q.vertices, dims) if m}
                    assert counts == want, f"{fr.to_json()}: {counts} != {want}"
                    nilpotent += 1
                total += 1
    assert F.p == p
    elapsed = time.perf_counter() - t0
    assert elapsed < 60, f"took {elapsed:.1f}s"
    return f"{total} representations, {nilpotent} nilpotent"


# 8 ---------------------------------------------------------------------

def _members(ms):
    return frozenset(json.dumps(m, sort_keys=True) for m in ms)


def _canonical(classes_members, factor_dims):
    return {(_members(m), json.dumps(sorted(f))) for m, f in zip(classes_members, factor_dims)}


def _charges(obj):
    return {int(v): (Fraction(z[0]), Fraction(z[1])) for v, z in obj.items()}


@criterion(8, "A2 wall-crossing fibering matches golden files over F_2 and F_3")
def test_wallcross_golden():
    q = a2_quiver()
    checked = []
    for path in sorted(GOLDEN.glob("a2_wallcross_*.json")):
        gold = json.loads(path.read_text())
        p = int(gold["field"].split("_")[1])
        sigma = StabilityParameter(q, _charges(gold["sigma"]))
        plus = StabilityParameter(q, _charges(gold["sigma_plus"]))
        got = wallcross_compare(q, [], tuple(gold["dims"]), sigma, plus, p)
        assert got["semistable_inclusion"]

        def matrices(cls):
            return [m["matrices"]["a"] for m in cls["members"]]

        got_base = _canonical([matrices(c) for c in got["sigma_classes"]],
                              [c["factor_dims"] for c in got["sigma_classes"]])
        want_base = _canonical([c["members"] for c in gold["sigma_classes"]],
                               [c["factor_dims"] for c in gold["sigma_classes"]])
        assert got_base == want_base, f"{path.name}: sigma classes differ"
        got_plus = _canonical([matrices(c) for c in got["sigma_plus_classes"]],
                              [c["factor_dims"] for c in got["sigma_plus_classes"]])
        want_plus = _canonical([c["members"] for c in gold["sigma_plus_classes"]],
                               [c["factor_dims"] for c in gold["sigma_plus_classes"]])
        assert got_plus == want_plus, f"{path.name}: perturbed classes differ"
        fib = {(_members(matrices(got["sigma_plus_classes"][j])), _members(matrices(got["sigma_classes"][k])))
               for j, k in got["fibering"]}
        want_fib = {(_members(f["sigma_plus_members"]), _members(f["sigma_members"])) for f in gold["fibering"]}
        assert fib == want_fib, f"{path.name}: fibering differs"
        empty = {_members(matrices(got["sigma_classes"][int(k)])) for k, v in got["fibers"].items() if not v}
        assert empty == {_members(m) for m in gold["empty_fibers"]}, f"{path.name}: empty fibers differ"
        checked.append(path.stem.replace("a2_wallcross_", ""))
    assert len(checked) == 4
    # the two perturbations sit on opposite sides of Re Z(S_2) = 0
    minus = StabilityParameter(q, {1: (0, 1), 2: (-1, 1)})
    plus = StabilityParameter(q, {1: (0, 1), 2: (1, 1)})
    crossed = walls_between(minus, plus, (1, 1), [(0, 1), (1, 0)])
    assert sorted(tuple(w["sub_dims"]) for w in crossed) == [(0, 1), (1, 0)]
    return "sides/fields: " + ", ".join(checked)


# 9 ---------------------------------------------------------------------

@criterion(9, "deformation towers: hull, Hom/Ext lemma and equivalence")
def test_nc_towers():
    t0 = time.perf_counter()
    F2 = prime_field(2)
    out = []
    for name, make in (("A2", a2_algebra), ("loop mod e^3", loop_e3_algebra), ("commutators", commutator_algebra)):
        for F in (RATIONALS, F2):
            tower = build_tower(make(3, F), 3)
            hull = hull_compare(tower)
            assert hull.ok, f"{name} over {F}: {hull.witness}"
            lem = lemma_checks(tower)
            assert lem.ok, f"{name} over {F}: {lem.witness}"
        A = tower.algebra
        q = A.quiver
        # Ext^1 between vertex simples counts arrows
        for i in q.vertices:
            for j in q.vertices:
                e = ext_space(A, vertex_simple(q, i, F2), vertex_simple(q, j, F2))
                assert e.dim == len(q.arrows(i, j)), f"{name}: Ext({i},{j}) = {e.dim}"
        eq = check_equivalence(tower, 3)
        assert eq.ok, f"{name}: {eq.witness}"
        out.append(f"{name}: R dims {[lv['dim_R'] for lv in tower.report()]}, "
                   f"{eq.details['modules']} modules")
    elapsed = time.perf_counter() - t0
    assert elapsed < 120, f"took {elapsed:.1f}s"
    return "; ".join(out)


# 10 --------------------------------------------------------------------

CLI_RUNS = [
    ("transfer", "cy3.json", []), ("transfer", "massey.json", ["--arity", "5"]),
    ("transfer", "random_lie.json", ["--arity", "5"]), ("transfer", "matrix_exterior.json", []),
    ("transfer", "sphere3.json", []),
    ("potential", "cy3.json", []), ("potential", "sphere3.json", []), ("potential", "broken_pairing.json", []),
    ("moduli", "a2_wallcross.json", []), ("moduli", "a2_equal_charge.json", []),
    ("moduli", "cy3_moduli.json", ["--seed", "7"]), ("moduli", "oversize.json", []),
    ("ncdef", "a2_ncdef.json", []), ("ncdef", "semisimple_ncdef.json", []),
    ("ncdef", "loop_e3_ncdef.json", []), ("ncdef", "commutator_ncdef.json", ["--order", "2"]),
    ("ncdef", "cy3_ncdef.json", ["--order", "2"]),
]


def _run_cli(command, fixture, extra, out, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    proc = subprocess.run([sys.executable, "-m", "eql.cli", command, "--input", str(DATA / fixture),
                           "--out", str(out), *extra], env=env, capture_output=True, text=True)
    return proc.returncode, Path(out).read_bytes() if Path(out).exists() else b""


@criterion(10, "CLI reports are byte-identical across runs")
def test_cli_determinism(tmp_path=None):
    import tempfile
    tmp = Path(tmp_path or tempfile.mkdtemp())
    codes = {}
    for k, (command, fixture, extra) in enumerate(CLI_RUNS):
        a = _run_cli(command, fixture, extra, tmp / f"{k}a.json", 1)
        b = _run_cli(command, fixture, extra, tmp / f"{k}b.json", 2)
        assert a[0] == b[0], f"{command} {fixture}: exit codes {a[0]} vs {b[0]}"
        assert a[1] and a[1] == b[1], f"{command} {fixture}: reports differ"
        codes[command] = codes.get(command, set()) | {a[0]}
    assert set(codes) == {"transfer", "potential", "moduli", "ncdef"}
    return f"{len(CLI_RUNS)} runs, exit codes " + ", ".join(f"{c}={sorted(v)}" for c, v in sorted(codes.items()))


if __name__ == "__main__":
    failures = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except Exception:
                failures += 1
    sys.exit(1 if failures else 0)
