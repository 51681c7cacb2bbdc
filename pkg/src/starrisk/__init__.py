"""Star-shaped monetary risk measures on finite probability spaces."""

__version__ = "0.1.0"

from .state_space import (  # noqa: F401
    Capacity,
    DimensionError,
    DomainError,
    LossDistribution,
    LossProfile,
    StateSpace,
    distribution_of,
    pointwise_leq,
    quantile_breakpoints,
)
from .measures import (  # noqa: F401
    LossBenchmark,
    RiskEvaluator,
    Utility,
    entropic,
    entropic_measure,
    es,
    es_measure,
    lvar,
    lvar_measure,
    max_var,
    max_var_measure,
    mean,
    mean_measure,
    med_var,
    med_var_measure,
    shortfall,
    shortfall_measure,
    utility_is_star_compatible,
    var,
    var_measure,
    worst_case,
    worst_case_measure,
)
from .axioms import (  # noqa: F401
    AxiomReport,
    ProbeSet,
    acceptance_set_contains,
    check_axiom,
    coherent_collapse_check,
    default_probe_set,
    measure_from_acceptance,
    risk_to_exposure,
    star_acceptance_check,
)
from .aggregate import (  # noqa: F401
    MeasureFamily,
    NormalityReport,
    SolverConfig,
    SplitSolution,
    additive_capacity,
    ccp_margin,
    ccp_margin_measure,
    choquet_aggregate,
    choquet_measure,
    ecb_blend,
    ecb_blend_measure,
    inf_capacity,
    inf_convolution,
    infconv_measure,
    normality_check,
    order_statistic_capacity,
    sup_capacity,
)
from .envelope import (  # noqa: F401
    EnvelopeMember,
    PenaltyTable,
    aggregate_representation_check,
    envelope_evaluate,
    envelope_family,
    envelope_member_measure,
    envelope_probe_report,
    min_representation_check,
    penalty_of,
    relaxation_member,
)
from .law_invariant import (  # noqa: F401
    GeneratorCurve,
    PrecisionError,
    es_envelope_eval,
    es_minimality_witness,
    fsd_dominates,
    ssd_dominates,
    tail_event,
    var_envelope_eval,
)
from .optimize import (  # noqa: F401
    ActionLossTable,
    InfeasibleError,
    PortfolioProblem,
    decomposition_check,
    minimize_risk,
    mitigated_measure,
    portfolio_exhaustive,
    portfolio_select,
    robust_minimize,
)
