"""Quantum 2x2 games built from EPR-Bohm joint probability boxes.

The classical game is embedded through constraints on factorizable boxes;
keeping those constraints while letting the box become non-factorizable
can turn the classical symmetric Nash equilibrium into an evolutionarily
stable strategy without any CHSH violation.
"""

from .embedding import (
    ConstrainedFreeParams,
    EmbeddingConstraints,
    QuantumEssReport,
    build_constrained_box,
    classical_embedding,
    classical_ess_difference,
    ess_margin,
    quantum_constraint_residuals,
    reduced_chsh,
    sample_classical_params,
)
from .exceptions import (
    AsymmetricGameError,
    InfeasibleError,
    InvalidBoxError,
    UndefinedEmbeddingError,
)
from .game_model import DEFAULT_TOL, GameMatrix, OmegaTriple, classify_ordering, omegas
from .joint_box import (
    ChshReport,
    FactorizableParams,
    IndependentOctet,
    ProbabilityBox,
    box_from_factorizable,
    chsh_report,
    complete_from_independent,
    exchange_symmetry_residuals,
    outcome_index,
    product_form_test,
    validate_box,
)
from .payoff_engine import (
    EssStatus,
    EssVerdict,
    FitnessInputs,
    PurePayoffTable,
    StrategyProfile,
    ess_classify,
    ess_deltas,
    fitness,
    mixed_payoffs,
    nash_check,
    pure_payoffs,
    symmetry_residuals,
)

__version__ = "0.1.0"
