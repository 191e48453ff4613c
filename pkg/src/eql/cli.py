"""Command line front end: ``eql {transfer,potential,moduli,ncdef}``.

Exit codes: 0 success, 2 malformed input, 3 a structural check failed,
4 an enumeration would be too large.  Reports are JSON with sorted keys
so that identical inputs give byte-identical output.
"""

import argparse
import sys

from . import io as eio
from .dga import DgaError, check_dga, check_morphism, check_stasheff, compute_hodge, transfer
from .fields import RATIONALS, PrimeField
from .moduli import (InfeasibleEnumeration, ModuliError, StabilityParameter, enumerate_with_relations,
                     is_semistable, s_equivalence_classes, wallcross_compare)
from .ncdeform import (InfeasibleEnumeration as NcInfeasible, QuotientAlgebra, build_tower,
                       check_equivalence, hull_compare, lemma_checks)
from .potential import (ExtQuiverPresentation, PotentialError, check_cyclic, crit_equals_mc,
                        degree2_dual_basis, gradient_is_zero, mc_defect, mc_defect_is_zero,
                        pairing_from_hodge, potential_relations, relations_from_products,
                        SymbolicGradient, verify_jacobian_identity, _potential)
from .quiver import QuiverError, random_representation
from .report import failed, passed

EXIT_INPUT = 2
EXIT_CHECK = 3
EXIT_INFEASIBLE = 4


class CommandFailure(Exception):
    def __init__(self, code, payload):
        super().__init__(code)
        self.code = code
        self.payload = payload


def _load_dga(cfg, data):
    spec = data.get("dga", data)
    A = eio.dga_from_json(spec, cfg.field)
    rep = check_dga(A)
    if not rep.ok:
        raise eio.FixtureError(f"invalid dg-algebra: {rep.witness}", "dga")
    return A


def _class_table(hodge):
    return [{"name": hodge.names[k], "degree": hodge.degrees[k],
             "block": list(hodge.blocks[k]) if hodge.blocks[k] is not None else None}
            for k in range(hodge.dim)]


def cmd_transfer(cfg, data):
    A = _load_dga(cfg, data)
    N = cfg.arity or cfg.order
    hodge = compute_hodge(A)
    ainf, td = transfer(hodge, N)
    st = check_stasheff(ainf, N)
    mo = check_morphism(ainf, td, N)
    payload = eio.report(
        "transfer", [st, mo],
        cohomology={"graded_dims": {str(g): d for g, d in sorted(_graded(hodge).items())},
                    "classes": _class_table(hodge)},
        products=eio.ainf_to_json(ainf, N),
        arity=N)
    if not (st.ok and mo.ok):
        raise CommandFailure(EXIT_CHECK, payload)
    return payload


def _graded(hodge):
    out = {}
    for g in hodge.degrees:
        out[g] = out.get(g, 0) + 1
    return out


def _potential_pipeline(cfg, data, N):
    A = _load_dga(cfg, data)
    if not A.pairing:
        raise eio.FixtureError("the algebra carries no pairing", "dga.pairing")
    hodge = compute_hodge(A)
    ainf, _ = transfer(hodge, max(N - 1, 2))
    pairing = pairing_from_hodge(hodge)
    pres = ExtQuiverPresentation(ainf)
    return A, hodge, ainf, pairing, pres


def cmd_potential(cfg, data):
    N = cfg.order
    if N < 2:
        raise eio.FixtureError("potential pipelines need order >= 2", "--order")
    if isinstance(cfg.field, PrimeField):
        raise eio.FixtureError("potential coefficients need characteristic zero", "--field")
    _, hodge, ainf, pairing, pres = _potential_pipeline(cfg, data, N)
    pc = pairing.check()
    cyc = check_cyclic(ainf, pairing, N - 1)
    verdicts = [pc, cyc]
    if not (pc.ok and cyc.ok):
        raise CommandFailure(EXIT_CHECK, eio.report("potential", verdicts,
                                                    cohomology={"classes": _class_table(hodge)}))
    W = _potential(ainf, pairing, pres, N)
    jac = verify_jacobian_identity(ainf, pairing, pres, N)
    verdicts.append(jac)
    rels = potential_relations(W)
    payload = eio.report(
        "potential", verdicts,
        quiver=pres.quiver.to_json(),
        potential=W.to_json(),
        cyclic_derivatives={lab: f.to_json() for lab, f in zip(rels.labels, rels.relations)},
        order=N)
    if not jac.ok:
        raise CommandFailure(EXIT_CHECK, payload)
    return payload


def _stability(quiver, obj, where):
    try:
        ch = {}
        lookup = {str(k): v for k, v in obj.items()}
        for v in quiver.vertices:
            z = lookup[str(v)]
            if isinstance(z, dict):
                ch[v] = (RATIONALS.parse(z.get("re", "0")), RATIONALS.parse(z.get("im", "0")))
            else:
                ch[v] = (RATIONALS.parse(z[0]), RATIONALS.parse(z[1]))
        return StabilityParameter(quiver, ch)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise eio.FixtureError(str(exc), where) from None


def _sampled_crit_checks(cfg, data, N):
    from .fields import default_rng
    _, _, ainf, pairing, pres = _potential_pipeline(cfg, data, N)
    W = _potential(ainf, pairing, pres, N)
    rels = relations_from_products(ainf, pres, degree2_dual_basis(pres, pairing), N - 1)
    rng = default_rng(cfg.seed)
    samples = int(data.get("samples", 20))
    max_dim = int(data.get("max_dim", 2))
    q = pres.quiver
    grads = {}
    agree = crit_ok = 0
    for _ in range(samples):
        dims = {v: rng.randint(1, max_dim) for v in q.vertices}
        key = tuple(sorted(dims.items(), key=str))
        if key not in grads:
            grads[key] = SymbolicGradient(W, dims, cfg.field)
        rep = random_representation(q, dims, cfg.field, rng)
        r = crit_equals_mc(W, rels, rep, grads[key])
        if not r.ok:
            return failed("crit=mc", {"sample": rep.to_json(), "detail": r.witness}), W
        crit_ok += 1
        if gradient_is_zero(grads[key](rep)) == mc_defect_is_zero(mc_defect(ainf, pres, rep, N - 1)):
            agree += 1
    if agree != samples:
        return failed("crit=mc", {"zero_locus_mismatch": samples - agree}), W
    return passed("crit=mc", samples=crit_ok, seed=cfg.seed), W


def cmd_moduli(cfg, data):
    verdicts = []
    payload = {}
    if "dga" in data:
        if isinstance(cfg.field, PrimeField):
            raise eio.FixtureError("critical-locus checks need characteristic zero", "--field")
        v, W = _sampled_crit_checks(cfg, data, cfg.order)
        verdicts.append(v)
        payload["potential"] = W.to_json()
        if not v.ok:
            raise CommandFailure(EXIT_CHECK, eio.report("moduli", verdicts, **payload))
    if "quiver" in data:
        q = eio.quiver_from_json(data["quiver"])
        ff = eio.field_from_json(data.get("finite_field", str(cfg.field.name) if isinstance(cfg.field, PrimeField)
                                          else "F_2"), "finite_field")
        if not isinstance(ff, PrimeField):
            raise eio.FixtureError("class tables need a finite field", "finite_field")
        rels = eio.relations_from_json(q, data.get("relations", []), ff)
        dims = data.get("dims")
        if dims is None:
            raise eio.FixtureError("missing key 'dims'", "dims")
        try:
            if isinstance(dims, dict):
                dims = tuple(int(dims[str(v)]) for v in q.vertices)
            else:
                dims = tuple(int(d) for d in dims)
            if len(dims) != len(q.vertices) or min(dims) < 0:
                raise ValueError("one non-negative entry per vertex is required")
        except (KeyError, TypeError, ValueError) as exc:
            raise eio.FixtureError(str(exc), "dims") from None
        limit = int(data.get("limit", 200000))
        sigma = _stability(q, _require(data, "sigma"), "sigma")
        try:
            all_reps = list(enumerate_with_relations(q, rels, dims, ff.p, limit))
            sst = sum(1 for fr in all_reps if is_semistable(sigma, fr.to_representation()).semistable)
            classes = s_equivalence_classes(q, rels, dims, sigma, ff.p, limit)
            payload["sigma"] = {"total": len(all_reps), "semistable": sst,
                                "all_semistable": sst == len(all_reps),
                                "classes": [c.to_json() for c in classes]}
            verdicts.append(passed("s_equivalence", classes=len(classes)))
            if "sigma_plus" in data:
                sp = _stability(q, data["sigma_plus"], "sigma_plus")
                try:
                    wc = wallcross_compare(q, rels, dims, sigma, sp, ff.p, limit)
                    payload["wallcross"] = wc
                    verdicts.append(passed("wallcross", fibering=len(wc["fibering"])))
                except ModuliError as exc:
                    if isinstance(exc, InfeasibleEnumeration):
                        raise
                    verdicts.append(failed("wallcross", {"reason": str(exc),
                                                         "walls": getattr(exc, "walls", [])}))
                    raise CommandFailure(EXIT_CHECK, eio.report("moduli", verdicts, **payload))
        except InfeasibleEnumeration as exc:
            verdicts.append(failed("enumeration", {"cardinality": exc.count, "limit": exc.limit}))
            raise CommandFailure(EXIT_INFEASIBLE, eio.report("moduli", verdicts, **payload))
    return eio.report("moduli", verdicts, **payload)


def _require(data, key):
    if key not in data:
        raise eio.FixtureError(f"missing key {key!r}", key)
    return data[key]


def _ncdef_algebra(cfg, data, field, order):
    if "dga" in data:
        if isinstance(field, PrimeField):
            # relations are computed over Q, then reduced
            sub = argparse.Namespace(**{**vars(cfg), "field": RATIONALS})
        else:
            sub = cfg
        _, _, ainf, pairing, pres = _potential_pipeline(sub, data, max(order + 1, 3))
        W = _potential(ainf, pairing, pres, max(order + 1, 3))
        rels = potential_relations(W)
        q = pres.quiver
        return QuotientAlgebra(q, rels.relations, order, field)
    q = eio.quiver_from_json(_require(data, "quiver"))
    rels = eio.relations_from_json(q, data.get("relations", []), field)
    return QuotientAlgebra(q, rels, order, field)


def cmd_ncdef(cfg, data):
    n_max = int(data.get("n_max", cfg.order))
    dim_bound = int(data.get("dim_bound", 3))
    A = _ncdef_algebra(cfg, data, cfg.field, n_max)
    tower = build_tower(A, n_max)
    hull = hull_compare(tower)
    lem = lemma_checks(tower)
    verdicts = [hull, lem]
    payload = {"levels": tower.report(), "stabilized_at": tower.stabilized_at(),
               "algebra": {"graded_dims": A.graded_dims(), "basis": [str(w) for w in A.basis]}}
    eq_field = data.get("equivalence_field")
    if eq_field is not None or isinstance(cfg.field, PrimeField):
        ff = eio.field_from_json(eq_field, "equivalence_field") if eq_field is not None else cfg.field
        if not isinstance(ff, PrimeField):
            raise eio.FixtureError("module enumeration needs a finite field", "equivalence_field")
        depth = int(data.get("equivalence_depth", max(dim_bound - 1, 0)))
        Af = _ncdef_algebra(cfg, data, ff, depth)
        try:
            verdicts.append(check_equivalence(build_tower(Af, depth), dim_bound, int(data.get("limit", 20000))))
        except NcInfeasible as exc:
            verdicts.append(failed("equivalence", {"cardinality": exc.count, "limit": exc.limit}))
            raise CommandFailure(EXIT_INFEASIBLE, eio.report("ncdef", verdicts, **payload))
    out = eio.report("ncdef", verdicts, **payload)
    if not all(v.ok for v in verdicts):
        raise CommandFailure(EXIT_CHECK, out)
    return out


COMMANDS = {"transfer": cmd_transfer, "potential": cmd_potential, "moduli": cmd_moduli, "ncdef": cmd_ncdef}


def build_parser():
    p = argparse.ArgumentParser(prog="eql", description="A-infinity transfer, potentials, quiver moduli "
                                                         "and deformation towers")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", required=True, help="JSON fixture")
    p.add_argument("--order", type=int, default=4, help="truncation order N")
    p.add_argument("--arity", type=int, default=None, help="arity cap for transferred products")
    p.add_argument("--field", default="rationals", help="rationals | gaussian-rationals | F_p")
    p.add_argument("--out", default=None, help="report path (stdout if omitted)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    return p


def _emit(payload, out):
    text = eio.dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.field = eio.field_from_json(args.field, "--field")
        if args.order < 0 or (args.arity is not None and args.arity < 1):
            raise eio.FixtureError("order and arity must be positive", "--order/--arity")
        data = eio.load_json(args.input)
        if not isinstance(data, dict):
            raise eio.FixtureError("top level must be an object", args.input)
        payload = COMMANDS[args.command](args, data)
    except eio.FixtureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DgaError, QuiverError, PotentialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CommandFailure as exc:
        _emit(exc.payload, args.out)
        return exc.code
    _emit(payload, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
