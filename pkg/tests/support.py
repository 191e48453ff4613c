"""Shared builders for the test suite."""

from pathlib import Path

from eql.dga import compute_hodge, transfer
from eql.fields import RATIONALS
from eql.ncdeform import QuotientAlgebra
from eql.potential import (ExtQuiverPresentation, build_potential, degree2_dual_basis, inject_cyclic_m3,
                           pairing_from_hodge, relations_from_products)
from eql.quiver import PathSeries, a2_quiver, loop_quiver

GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).parent.parent / "src" / "eql" / "data"

# criterion number -> printed verdict line
ACCEPTANCE = {}


def record_criterion(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title} ({detail})"
    ACCEPTANCE[n] = line
    print(line)
    return line


class PotentialChain:
    """Transfer, pairing, Ext-quiver, potential and relations for an algebra
    carrying a cyclic pairing."""

    def __init__(self, A, N=4, inject=None):
        self.A = A
        self.N = N
        self.hodge = compute_hodge(A)
        ainf, self.transfer_data = transfer(self.hodge, N - 1)
        self.pairing = pairing_from_hodge(self.hodge)
        if inject is not None:
            ainf = inject_cyclic_m3(ainf, self.pairing, inject)
        self.ainf = ainf
        self.pres = ExtQuiverPresentation(ainf)
        self.quiver = self.pres.quiver
        self.W = build_potential(ainf, self.pairing, self.pres, N)
        self.relations = relations_from_products(ainf, self.pres, degree2_dual_basis(self.pres, self.pairing), N - 1)


def series(quiver, terms, order, field=RATIONALS):
    """``terms`` is a list of (edge list, coefficient)."""
    return PathSeries.from_terms(quiver, order, [(tuple(w), c) for w, c in terms], None, field)


def a2_algebra(order, field):
    return QuotientAlgebra(a2_quiver(), [], order, field)


def loop_e3_algebra(order, field):
    q = loop_quiver()
    return QuotientAlgebra(q, [series(q, [(("e", "e", "e"), 1)], 3, field)], order, field)


def commutator_algebra(order, field):
    from eql.fixtures import three_loop_quiver
    q = three_loop_quiver()
    rels = []
    for a, b in (("e2", "e3"), ("e3", "e1"), ("e1", "e2")):
        rels.append(series(q, [((a, b), 1), ((b, a), -1)], 2, field))
    return QuotientAlgebra(q, rels, order, field)
