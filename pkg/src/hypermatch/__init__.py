"""Perfect matchings in 4-uniform hypergraphs under minimum-degree thresholds.

Exact hypergraph core and interchange formats, instance generators, exact
matching oracles, the 4x4x4 link-graph classification, dense-substructure
extraction, absorbing matchings, and the two-track solving pipeline.
"""

from .core import (
    DensityKind,
    Edge,
    Hypergraph,
    MatchingCheck,
    PartiteSpec,
    format_hg,
    load_hg,
    parse_hg,
    save_hg,
    validate_matching,
)
from .construct import (
    InstanceRecipe,
    extremal_construction,
    extremal_link_graph,
    pattern_witness,
    planted_pm_instance,
    random_dense_hypergraph,
    random_link_graph,
    threshold,
)
from .link import (
    Classification,
    Pattern,
    Verdict,
    build_link_graph,
    canonical_form,
    classify,
    detect_pattern,
    format_mask,
    is_ext,
    parse_mask,
    tripartite_perfect_matching,
    verify_witness,
)
from .solve import (
    MatchingResult,
    greedy_matching,
    hall_matching,
    has_perfect_matching,
    max_matching_bruteforce,
    max_matching_exact,
    min_degree_peel,
)
from .extract import (
    Incidence,
    MultipartiteWitness,
    common_neighborhood_bucket,
    dense_side,
    extract_one_three,
    extract_partite_volume,
    extract_two_two,
    find_complete_r_partite,
)
from .absorb import (
    AbsorbingMatching,
    absorb,
    build_absorbing_matching,
    is_absorbing_set,
)
from .pipeline import (
    Cover,
    PipelineConfig,
    PipelineReport,
    build_initial_cover,
    detect_extremal,
    extend_cover_nine_sided,
    extend_cover_triples,
    extend_cover_two_classes,
    extremal_matcher,
    solve_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorbingMatching",
    "Classification",
    "Cover",
    "DensityKind",
    "Edge",
    "Hypergraph",
    "Incidence",
    "InstanceRecipe",
    "MatchingCheck",
    "MatchingResult",
    "MultipartiteWitness",
    "PartiteSpec",
    "Pattern",
    "PipelineConfig",
    "PipelineReport",
    "Verdict",
    "absorb",
    "build_absorbing_matching",
    "build_initial_cover",
    "build_link_graph",
    "canonical_form",
    "classify",
    "common_neighborhood_bucket",
    "dense_side",
    "detect_extremal",
    "detect_pattern",
    "extend_cover_nine_sided",
    "extend_cover_triples",
    "extend_cover_two_classes",
    "extract_one_three",
    "extract_partite_volume",
    "extract_two_two",
    "extremal_construction",
    "extremal_link_graph",
    "extremal_matcher",
    "find_complete_r_partite",
    "format_hg",
    "format_mask",
    "greedy_matching",
    "hall_matching",
    "has_perfect_matching",
    "is_absorbing_set",
    "is_ext",
    "load_hg",
    "max_matching_bruteforce",
    "max_matching_exact",
    "min_degree_peel",
    "parse_hg",
    "parse_mask",
    "pattern_witness",
    "planted_pm_instance",
    "random_dense_hypergraph",
    "random_link_graph",
    "save_hg",
    "solve_pipeline",
    "threshold",
    "tripartite_perfect_matching",
    "validate_matching",
    "verify_witness",
]
