"""Frequency estimation under local differential privacy: protocols,
distinguishability attacks, closed-form accuracy/leakage analysis, adaptive
parameter tuning, and a seeded Monte Carlo benchmark harness."""

from .model import (
    CategoryReport,
    BitVectorReport,
    EmptyCandidates,
    EmptyInput,
    Family,
    HashedReport,
    NonFinite,
    ProtocolConfig,
    PureParams,
    RangeError,
    RealVectorReport,
    RngStream,
    SubsetReport,
    TooLarge,
    UnsupportedFamily,
    derive_stream,
    validate_config,
)
from .protocols import (
    analytic_mse,
    estimate_frequencies,
    estimate_from_counts,
    generic_pure_mse,
    grr_params,
    grr_perturb,
    hash_bucket,
    lh_perturb,
    olh_g,
    oue_params,
    perturb,
    pure_params,
    round_half_away,
    she_estimate,
    she_perturb,
    ss_default_omega,
    ss_perturb,
    subset_alternative_mse,
    sue_params,
    support,
    the_params,
    the_perturb,
    the_threshold,
    ue_pair_from_p,
    ue_perturb,
)
from .attacks import (
    AsrResult,
    DEFAULT_ORACLE_SEED,
    attack,
    bitvector_expected_asr,
    brute_force_expected_asr,
    empirical_asr,
    expected_asr,
    expected_asr_she_mc,
    lh_exact_expected_asr,
    lh_seed_averaged_asr,
)
from .optimizer import (
    ObjectiveWeights,
    OptimizationResult,
    grid_search,
    minimize_scalar_bounded,
    objective,
    optimize_alh,
    optimize_ass,
    optimize_athe,
    optimize_aue,
)
from .presets import (
    ADAPTIVE_NAMES,
    DEFAULT_WEIGHTS,
    PROTOCOL_NAMES,
    ResolvedProtocol,
    resolve_protocol,
)
from .simulate import simulate_run
from .harness import (
    CSV_HEADER,
    CsvProvenance,
    DataMismatch,
    Dataset,
    DirichletProvenance,
    EmptyAfterFiltering,
    ExperimentConfig,
    MissingColumn,
    ParetoRow,
    RunStats,
    UnparsableRow,
    export,
    gen_dirichlet,
    load_csv_column,
    pareto_sweep,
    parse_grid,
    run_experiment,
)

__version__ = "0.1.0"
