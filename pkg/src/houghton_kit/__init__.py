"""Exact toolkit for Houghton's groups and their finitely generated subgroups.

Element arithmetic on the lexicographically ordered ray set, finite
permutation-group oracles, subgroup structure analysis (translation lattice,
Hirsch length, level and congruence criteria, window orbits), block systems
and their quotients, the multi-wreath embedding, subdirect decompositions,
character-sphere computations and an end-to-end finiteness classifier.
"""

from .blocks import (
    BlockSystem,
    QuotientStructure,
    block_size_bound,
    find_block_systems,
    quotient,
    verify_block_system,
)
from .bns import (
    Character,
    canonicalize,
    f_certificate,
    in_sigma,
    meinert_complement_bound,
    subgroup_type,
)
from .classify import ClassificationReport, classify
from .elements import (
    CycleStructure,
    HoughtonElement,
    aop_exceptional_set,
    commutator,
    cycle_structure,
    from_cycles,
    generator,
    houghton_generators,
    identity,
    random_element,
    transposition,
)
from .finperm import (
    FinitePermGroup,
    brute_force_partition_check,
    is_strongly_orbit_primitive,
)
from .rays import RayPoint, RaySystem, Window, deletion_order_iso, lex_compare
from .subdirect import decompose, kernel_intersection_probe
from .subgroups import (
    GeneratedSubgroup,
    TranslationLattice,
    delta_k,
    finitary_commutator,
    hirsch_length,
    is_congruence_lifting,
    is_level,
    orbit_windows,
    parse_word,
    translation_lattice,
)
from .wreath import (
    BlockContext,
    MultiWreathElement,
    build_block_context,
    kk_embed,
    phi_s_descent,
    verify_kk,
    w_groups,
)

__version__ = "0.1.0"
