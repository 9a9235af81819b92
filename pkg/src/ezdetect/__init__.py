"""Epileptogenic-zone channel ranking for multichannel intracranial EEG.

Two parallel detectors score every channel of a seizure epoch: a spectral
energy-ratio index (high- over low-band energy charted against its
pre-onset baseline) and a connectivity-based desynchronization index
(phase-transfer-entropy network anomalies charted the same way). The
detectors can be fused and evaluated against labeled ground truth.
"""

from .charts import (
    BaselineStats,
    ChartSeries,
    activation_time,
    baseline_stats,
    cusum,
    ewma,
    tonicity,
)
from .config import AnalysisConfig, config_from_file
from .connectivity import (
    ConnectivityTensor,
    bin_phases,
    connectivity_tensor,
    instantaneous_phase,
    lag_grid,
    load_tensor,
    phase_bins,
    pte_lagged,
    pte_max,
    save_tensor,
)
from .desync import (
    DesyncSeries,
    NetworkStatsSeries,
    abnormal_sets,
    compute_di,
    desync_level,
    desync_series,
    network_stats,
)
from .ei import IndexScoreTable, compute_ei, index_value, rank_by_chart, score_series_table
from .evaluation import (
    AggregateReport,
    DetectionResult,
    EvaluationReport,
    aggregate_patients,
    classify,
    detection_metrics,
    fuse,
    fused_roc_auc,
    normalize_scores,
    roc_auc,
)
from .recording import (
    EpochAnnotation,
    FilterSpec,
    Recording,
    RecordingFormatError,
    apply_comb_filter,
    bipolar_montage,
    exclude_channels,
    load_annotation,
    load_recording,
    save_annotation,
    save_native,
)
from .spectral import BandPair, DEFAULT_BANDS, energy_ratio, energy_series, window_spectrum
from .synthetic import (
    CouplingEdge,
    SynthEvent,
    SynthScenario,
    benchmark_scenario,
    generate,
    oracle_entropy,
    oracle_pte,
    oracle_pte_max,
)
from .windows import WindowPlan, build_plan, window_view

__version__ = "0.1.0"
