"""Numerical toolkit for sharp sector theories.

Systems are sector-partitioned inner-product spaces (quantum, classical,
coherent, and their composites); states and effects are block-diagonal
operators.  The package provides the constructive spectral machinery
(diagonalization, Schmidt decomposition, dagger duality), channels,
majorization and entropy monotones, Gibbs states, erasure-cost reports,
and theorem-indexed verification suites.
"""

from .channels import (
    Channel,
    apply,
    distinguishability_protocol,
    is_doubly_stochastic,
    minimally_disturbing,
    naimark,
    random_rare,
    random_reversible,
    rare_channel,
)
from .entropy import (
    SchurConcaveFunction,
    kl_divergence,
    majorizes,
    measurement_monotone_estimate,
    monotone,
    mutual_information,
    preparation_monotone_estimate,
    reducibility_counterexample,
    renyi,
    renyi_function,
    scaled_linear_entropy,
    shannon_function,
    shannon_vn,
    spectrum,
)
from .errors import GptError
from .sectors import (
    SystemDescriptor,
    compose,
    describe,
    make_classical,
    make_coherent,
    make_quantum,
    trivial_system,
)
from .spectral import (
    Diagonalization,
    SchmidtDecomposition,
    TransitionMatrix,
    dagger,
    dagger_extend,
    diagonalize,
    diagonalize_observable,
    diagonalize_vector,
    functional_calculus,
    max_eigenpair,
    maximal_set,
    pure_sharp_measurement,
    schmidt,
    surprisal,
    transition_matrix,
)
from .statespace import (
    Effect,
    Observable,
    PureVector,
    State,
    deterministic_effect,
    invariant_state,
    marginal,
    pair,
    purifications_equivalent,
    purify,
    tensor,
    tensor_effect,
    tensor_observable,
    tensor_pure,
)
from .suites import SUITES, SuiteReport, default_theories, run_suite
from .thermo import (
    Hamiltonian,
    ThermoConfig,
    beta_of_energy,
    energy_of_beta,
    gibbs_state,
    landauer_report,
    log_partition,
    max_entropy_check,
    second_law_lemma_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
