"""Resilience of finite power-law networks to random node failures."""

__version__ = "0.1.0"

from .analytic import (
    BETA_0,
    DomainError,
    NoCriticalPoint,
    PlnParams,
    SurvivorPrediction,
    alpha_for_size,
    chi,
    critical_failure_rate,
    giant_fraction_beta2,
    predict,
    self_arc_probability,
    surviving_degree_count,
    xi,
    zeta,
    zeta_inverse,
)
from .failsim import ComponentCensus, FailureMask, census_components, draw_failure_mask, giant_decay_ratio
from .graphgen import (
    DegreeHistogram,
    GraphFormatError,
    Multigraph,
    build_configuration_multigraph,
    count_self_and_parallel,
    generate_graph,
    load_graph,
    save_graph,
    synthesize_histogram,
)
from .harness import SweepConfig, SweepRecord, run_sweep
