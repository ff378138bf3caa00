"""Fidelity, optimal measurements and (no-)broadcasting of quantum states."""

__version__ = "0.1.0"

from .broadcast import (
    BroadcastCandidate,
    ChainReport,
    broadcast_quality,
    candidate_from_channel,
    clonable,
    commuting_broadcaster,
    correlated_candidate,
    entangled_candidate,
    product_candidate,
    simultaneous_eigenbasis,
    verify_chain,
)
from .distinguish import (
    FidelityWitness,
    Povm,
    brute_force_min_overlap,
    check_povm_optimality,
    fidelity,
    fidelity_unitary,
    optimal_povm,
    povm_overlap,
)
from .errors import *  # noqa: F401,F403
from .linalg import (
    commutator_norm,
    hermitian_eig,
    partial_trace,
    polar_unitary,
    positive_sqrt,
    pseudo_inverse_sqrt,
    tensor,
)
from .search import SearchConfig, SearchResult, search_broadcast, sweep_csv, sweep_noncommutativity
from .states import (
    DensityOperator,
    DilationChannel,
    apply_channel,
    basis_state,
    bloch_qubit,
    dilation_channel,
    kraus_from_dilation,
    marginals,
    maximally_mixed,
    pure_state,
    random_density,
    random_unitary,
    spectral,
    validate_density,
)
