"""Finite partial dynamical systems, their groupoids, and orbit equivalence.

The package works at desk scale: spaces, groups, graphs, and Boolean
algebras are finite, boundary path spaces are handled through their
eventually periodic points, and every claimed equivalence is checked by
explicit enumeration rather than taken on faith.
"""

from .booldyn import (
    EMPTY_VERTEX, FiniteBooleanAlgebra, GBDS, build_graph, is_ultrafilter,
    principal_ultrafilter, validate_gbds,
)
from .category import (
    COEReport, COETriple, IsoCheck, OrbitMorphism, check_preserves_stabilisers,
    coe_to_isomorphism, compose, enumerate_groupoid_homs,
    enumerate_orbit_morphisms, functor_apply, functor_invert,
    identity_morphism, invert_isomorphism, is_isomorphism, validate_coe,
    validate_orbit_morphism,
)
from .errors import (
    DescriptorMismatch, EnumerationCap, HypothesisNotMet, InvalidStructure,
    KindError, MapUndefined, OrbitkitError, ParseError, TruncationError,
    UnknownPoint,
)
from .graphs import (
    FiniteGraph, find_graph_isomorphisms, is_primitive_cycle, primitive_cycles,
)
from .groupoid import (
    FiniteGroupoid, GroupoidHom, check_torsion_free_abelian,
    find_groupoid_isomorphism, group_bundle, isotropy_bundle,
    isotropy_interior, pair_groupoid, stabilisers_torsion_free_abelian,
    to_dot, transformation_groupoid, validate_hom,
)
from .groups import (
    FiniteGroup, FreeGroup, GroupDescriptor, GroupElement, Integers,
    cyclic_group, factor_positive, free_to_integer, integer_to_free,
    is_positive, length, length_cocycle, positive_letters, reduce_word,
)
from .instances import (
    InstanceDoc, ResolvedCOE, ResolvedDRCOE, ResolvedMorphism,
    ResolvedPartition, parse_file, parse_text, serialize,
)
from .paths import (
    BoundaryPath, EvPeriodic, FinitePath, cylinder, enumerate_boundary,
    format_boundary, shift_n, vertex_path,
)
from .pds import (
    FinitePDS, FiniteSpace, GroupSubset, PartialBijection,
    extend_semi_saturated, validate,
)
from .recognition import (
    BisectionPartition, LabelDescriptor, ReconstructedSystem, build_cocycle,
    build_phi, canonical_partition, check_cocycle, cocycle_to_action,
    singleton_partition, validate_partition,
)
from .reports import CheckRecord, Report, Violation
from .shift import (
    DRArrow, InducedBoundarySystem, act_word, compose_dr, edge_group,
    induced_finite_pds, inverse_dr, isotropy_decompose, stab_min,
    stab_min_ess, truncated_dr_groupoid, unit_dr, xi, xi_inverse,
)
from .shift_coe import (
    DRCOEData, PathMap, RuleTable, SymbolicCOE, check_eventual_conjugacy,
    check_eventual_conjugacy_symbolic, check_stab_preserving_dr,
    coe_ab_to_kl, coe_kl_to_ab, identity_symbolic_coe, relabel_symbolic_coe,
    validate_dr_coe, validate_symbolic_coe,
)

__all__ = [name for name in dir() if not name.startswith("_")]
