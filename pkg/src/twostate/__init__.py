"""Two-state Markov chains: closed-form statistics, simulation, run-length
analysis, funnel-plot confidence machinery, and parameter estimation."""

from .chain import (
    DerivedParams,
    MarkovParams,
    ParameterError,
    derive,
    lag1_correlation_symmetric,
    mean_frequency,
    n_step_self_transitions,
    state_probability,
    stationary_frequency,
    std_of_proportion,
    transition_matrix,
)
from .simulate import (
    BinarySequence,
    ScatterDataset,
    child_seed,
    empirical_autocorrelation,
    ensemble,
    generate,
)
from .runs import (
    STATE_A,
    STATE_B,
    RunHistogram,
    average_and_normalize,
    expected_run_frequencies,
    expected_runs_markov,
    expected_runs_memoryfree,
    extract_runs,
    memoryfree_curve,
    simulate_run_curves,
)
from .funnel import (
    FunnelSingularityError,
    FunnelSpec,
    confidence_bounds,
    coverage,
    required_n,
    sample_curve,
    z_from_level,
)
from .estimate import (
    InfeasibleParametersError,
    RunFit,
    RunFitConfig,
    RunFitMethod,
    ScatterFit,
    estimate_center,
    estimate_nu,
    fit_runs_mle,
    fit_runs_mle_pair,
    fit_runs_simulated,
    fit_scatter,
    invert_to_pq,
    run_curve_objective,
)
from .dataio import (
    AnalysisReport,
    CurveFileError,
    DataFormatError,
    SequenceFormatError,
    StudyFileError,
    StudyRecord,
    parse_curve,
    parse_sequence,
    parse_studies,
    parse_study_records,
    write_curve,
    write_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "BinarySequence",
    "CurveFileError",
    "DataFormatError",
    "DerivedParams",
    "FunnelSingularityError",
    "FunnelSpec",
    "InfeasibleParametersError",
    "MarkovParams",
    "ParameterError",
    "RunFit",
    "RunFitConfig",
    "RunFitMethod",
    "RunHistogram",
    "STATE_A",
    "STATE_B",
    "ScatterDataset",
    "ScatterFit",
    "SequenceFormatError",
    "StudyFileError",
    "StudyRecord",
    "average_and_normalize",
    "child_seed",
    "confidence_bounds",
    "coverage",
    "derive",
    "empirical_autocorrelation",
    "ensemble",
    "estimate_center",
    "estimate_nu",
    "expected_run_frequencies",
    "expected_runs_markov",
    "expected_runs_memoryfree",
    "extract_runs",
    "fit_runs_mle",
    "fit_runs_mle_pair",
    "fit_runs_simulated",
    "fit_scatter",
    "generate",
    "invert_to_pq",
    "lag1_correlation_symmetric",
    "mean_frequency",
    "memoryfree_curve",
    "n_step_self_transitions",
    "parse_curve",
    "parse_sequence",
    "parse_studies",
    "parse_study_records",
    "required_n",
    "run_curve_objective",
    "sample_curve",
    "simulate_run_curves",
    "state_probability",
    "stationary_frequency",
    "std_of_proportion",
    "transition_matrix",
    "write_curve",
    "write_sequence",
    "z_from_level",
]
