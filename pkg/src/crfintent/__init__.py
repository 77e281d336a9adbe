"""Structured crossing-intention inference for multi-pedestrian scenes.

A scene is a CRF over pedestrian nodes plus one environment node. Provider
probabilities for nodes, pedestrian pairs and pedestrian/environment links
become negative log-likelihood potentials, and the jointly most consistent
labeling is found by energy minimization.
"""

from .energy import (
    EnergyBreakdown,
    EnergyWeights,
    EnumerationCapError,
    MissingProbabilityError,
    PRESETS,
    base_energy,
    exact_distribution,
    training_objective,
)
from .estimator import IntentCRF
from .graph import GraphConfig, SceneGraph, build_graph, pairwise_distance, pedestrian_center
from .harness import (
    BenchmarkReport,
    GeneratorConfig,
    OrientationMode,
    emit_trace,
    generate_scene,
    run_benchmark,
)
from .inference import (
    AnnealConfig,
    HardLabels,
    InferenceResult,
    Method,
    consistency_energy,
    exhaustive_map,
    hard_labels,
    infer,
    inference_energy,
    ussa_map,
)
from .potentials import (
    InteractionState,
    ProbClamp,
    interaction_state,
    pe_potential,
    pp_potential,
    unary_potential,
)
from .scene import (
    LabelConfiguration,
    Orientation,
    PedestrianObservation,
    Scene,
    SceneError,
    SceneFormatError,
    SceneValidationError,
    load_scene,
    save_scene,
)
from .validation import ValidationReport, validate_scene

__version__ = "0.1.0"
