"""Secure mode distinguishability for switching systems under sparse attacks.

A library and CLI that decides, for each pair of modes of a discrete-time
linear switching system, whether the active mode can be identified from
corrupted input/output data when an attacker controls a bounded number of
sensors and actuators, and that backs each verdict with a simulator, a
brute-force estimator and explicit indistinguishability witnesses.
"""

__version__ = "0.1.0"

from .exactla import (  # noqa: F401
    EXACT,
    FLOAT,
    DimensionMismatch,
    Matrix,
    Subspace,
    image,
    includes,
    intersect,
    kernel,
    preimage,
    rank,
    restrict_cols,
    restrict_rows,
    subspace_sum,
)
from .model import (  # noqa: F401
    AttackPattern,
    AugmentedPair,
    LinearMode,
    ModelError,
    SwitchingSystem,
    build_augmented,
    discretize,
    load_bundled,
    load_model,
    markov_matrices,
    mode_output_map,
    observability_matrix,
    stacked_output_map,
)
from .geocontrol import (  # noqa: F401
    InvariantResult,
    OmegaResult,
    max_controlled_invariant,
    omega_star,
    pair_invariant,
    solvable,
)
from .disting import (  # noqa: F401
    BudgetError,
    DistinguishabilityReport,
    Verdict,
    Witness,
    autonomous_distinguishable,
    input_generic_distinguishable,
    pairwise_report,
    sigma_rho_secure_controlled,
    sigma_secure_autonomous,
    witness_construct,
)
from .simulate import (  # noqa: F401
    AttackSpec,
    Trace,
    gen_attack,
    read_trace,
    replay_witness,
    simulate,
    write_trace,
)
from .estimate import (  # noqa: F401
    ConsistencyResult,
    EstimateResult,
    EstimationError,
    consistent_modes,
    estimate_mode,
)
