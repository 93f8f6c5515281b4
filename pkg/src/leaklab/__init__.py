"""leaklab: seeded side-channel traffic simulation and leakage-bound verification.

A layered traffic pipeline (generate, encapsulate, encrypt, transmit,
observe) with Monte Carlo estimators for the quantities that drive the
leakage bounds, closed-form evaluation of those bounds, and an exact
discrete-channel oracle that certifies every inequality on small instances.
"""

from .bounds import (
    BoundInputs,
    LeakageReport,
    MultiSessionProjection,
    accuracy_from_tv,
    accuracy_lower_bound,
    bhattacharyya,
    binary_entropy,
    build_report,
    chernoff_lower_bound_from_tv,
    delta_N,
    fano_binary_error_lower_bound,
    fano_error_lower_bound,
    multi_session_projection,
    theorem_mi_lower_bound,
    tv_lower_bound_from_expectation,
)
from .channel import (
    ChainConfigs,
    ChainRun,
    EncryptionConfig,
    FeatureRecord,
    MarkedPacketSequence,
    NetworkConfig,
    ObservationConfig,
    Packet,
    ProtocolConfig,
    encapsulate,
    encrypt,
    identity_configs,
    insert_cover,
    observe,
    run_chain,
    transmit,
)
from .config import (
    DefenseParams,
    ScenarioConfig,
    SweepSpec,
    default_scenario,
    load_scenario,
)
from .discrete import (
    DiscreteChannel,
    bsc,
    exact_bayes_error,
    exact_chernoff,
    exact_mi,
    exact_tv,
    product_channel,
    random_channel,
    sample_channel,
)
from .errors import DegenerateSampleError, EnumerationCapError, ValidationError
from .estimators import (
    BinnedFeature,
    PairEstimate,
    RhoEstimate,
    bayes_accuracy,
    default_bins,
    empirical_tv,
    estimate_C,
    estimate_delta_bar,
    estimate_rho,
    plugin_mi,
)
from .harness import (
    DpiResult,
    EfficiencyMetrics,
    ExperimentResult,
    MultiSessionResult,
    OracleSuiteResult,
    SweepResult,
    defense_sweep,
    dpi_check,
    multi_session_experiment,
    oracle_multisession,
    oracle_suite,
    run_scenario,
)
from .traffic import (
    MessageEvent,
    MessageSequence,
    SemanticLabel,
    SizeDistribution,
    TrafficProfile,
    generate_session,
    preset_profiles,
)
from .trajectory import (
    CertificateResult,
    MetricConfig,
    ObservationStatistic,
    StatisticDescriptor,
    WindowedTrajectory,
    default_statistics,
    embed,
    eval_observation_statistic,
    eval_statistic,
    lipschitz_certificate,
    metric_d,
    perturbation_sampler,
)

__version__ = "0.1.0"
