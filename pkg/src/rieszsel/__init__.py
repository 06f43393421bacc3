"""Exact Riesz s-energy subset selection on finite metric spaces."""

from .bounds import (
    generate_hex_packing,
    linear_budget,
    overlap_gap,
    pointwise_budget,
    verify_budget,
    zeta_minus_one,
)
from .errors import CapExceeded, DivergenceError, InputError, InvariantViolation, TrivialInstance
from .line_mpd import LineInstance, greedy_feasible, line_mpd_dp, line_mpd_search
from .metric import MetricInstance, mpd, rescale, riesz_energy, validate_metric
from .oracle import (
    OracleResult,
    SearchConfig,
    brute_force_mpd,
    brute_force_riesz,
    find_line_counterexample,
    naive_line_riesz_dp,
)
from .reductions import (
    Graph,
    PlanarInstance,
    ReductionOutput,
    choose_exponent,
    clique_to_rssp,
    gap_quantities,
    gis_to_rssp,
    large_s_threshold,
)
from .schemas import SCHEMAS
from .ultrametric import (
    UltrametricTree,
    binarize,
    build_tree_from_matrix,
    cross_term_check,
    parse_tree,
    solve_ultrametric,
    tree_to_metric,
)

__version__ = "0.1.0"
