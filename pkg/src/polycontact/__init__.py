"""Coarse graining of lattice walks into contact matrices, and the information it loses."""

__version__ = "0.1.0"

from .census import CensusResult, ClassRecord, class_filter, enumerate_preimages, run_census
from .contact import ContactMatrix, ContactRule, build_contact_matrix, canonical_key, range_and_intersections
from .entropy import EntropyReport, check_supermultiplicativity, entropy_report, shannon
from .estimators import CoarseGrainingCensus, ContactMapTransformer
from .lattice import (
    Cube,
    EnumerationBudgetError,
    Walk,
    WalkModel,
    concat_walks,
    count_walks,
    enumerate_walks,
    neighbors,
    validate_walk,
)
from .montecarlo import (
    Estimate,
    estimate_degeneracy_tail,
    estimate_mean_range,
    estimate_pattern_density,
    estimate_return_probability,
    estimate_small_range_prob,
    sample_srw,
)
from .patterns import (
    PATTERN_P,
    PATTERN_Q,
    KestenPattern,
    Occurrence,
    PatternSpec,
    apply_site_swap,
    degeneracy_certificate,
    find_free_4_loops,
    find_kesten_occurrences,
    find_pattern_occurrences,
    kesten_path,
    reverse_loop,
    rotate_cube_interior,
)
