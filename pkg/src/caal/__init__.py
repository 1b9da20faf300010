"""Conflict-aware active automata learning.

An observation-tree Reviser lets classic MAT learners recover from
conflicting observations caused by noise or target mutation; a classic-MAT
baseline and a benchmark harness reproduce the comparison at desk scale.
"""

from .eqtest import SamplerParams, TestSampler, char_set, transition_cover
from .harness import (
    ConfigurationError,
    ExperimentConfig,
    RunRecord,
    load_config,
    run_experiment,
    run_grid,
    write_csv,
)
from .learners import (
    LEARNERS,
    HypothesisLog,
    HypothesisSelection,
    KVLearner,
    LStarRS,
    LearnerInconsistency,
    RestartInterrupt,
    elect,
    run_ceal,
)
from .mat import CacheConflictError, MatCache, mat_mq, run_mat
from .mealy import (
    DotParseError,
    GenerationError,
    MealyMachine,
    Observation,
    canonical_fingerprint,
    decode_word,
    encode_word,
    equivalent,
    minimize_canonical,
    parse_dot,
    random_mealy,
    run_word,
    same_structure,
    write_dot,
)
from .obstree import ObservationTree, UpdateStrategy, conflicts_obs
from .reviser import RESTART, SURVIVED, EventLog, Reviser
from .sul import (
    BudgetExhausted,
    NoiseKind,
    NoiseSpec,
    RepeatsPolicy,
    SystemHandle,
    execute_repeated,
)

__version__ = "0.1.0"
