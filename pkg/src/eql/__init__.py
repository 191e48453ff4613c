"""Exact computations around A-infinity transfer, quiver potentials,
quiver moduli and non-commutative deformation towers."""

from .dga import (AInfinityStructure, DgAlgebra, HodgeData, check_dga, check_morphism, check_stasheff,
                  compute_hodge, enumerate_trees, transfer, transfer_I, transfer_m)
from .fields import RATIONALS, GaussianRational, field_from_spec, prime_field
from .moduli import (StabilityParameter, find_destabilizer, is_nilpotent, is_semistable, s_equivalence_classes,
                     satisfies_relations, semisimplify, slope, wallcross_compare)
from .ncdeform import (QuotientAlgebra, build_tower, check_equivalence, ext_space, hull_compare, lemma_checks,
                       projective_resolution, universal_extension)
from .potential import (CyclicPairing, ExtQuiverPresentation, build_potential, check_cyclic, crit_equals_mc,
                        cyclic_derivative, mc_defect, relations_from_products, trace_potential,
                        verify_jacobian_identity)
from .quiver import (DimVector, PathSeries, PathWord, Quiver, Representation, enumerate_paths, evaluate_series,
                     gauge_act, growth_diagnostic, series_multiply)

__version__ = "0.1.0"
