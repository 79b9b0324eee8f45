"""Exact matrix-product ground states of a one-parameter family of spin-1 rings."""

from .model import ConsistencyError, ModelParams, build_site_matrices, check_symmetries, transfer_matrix
from .observables import (
    one_site_entropy,
    one_site_rdm,
    partition_function,
    two_point_transverse,
    two_point_zz,
    two_site_rdm,
    two_site_rdm_thermo,
)
from .entanglement import (
    entanglement_range,
    finite_negativity,
    max_entangled_system_size,
    negativity,
    partial_transpose,
    pt_spectrum_thermo,
    thermo_negativity,
)
from .hamiltonian import HamiltonianWeights, assemble_chain, coupling_constants, null_space_vectors
from .oracle import dense_negativity, dense_rdm, dense_state

__all__ = [
    "ConsistencyError", "ModelParams", "build_site_matrices", "check_symmetries", "transfer_matrix",
    "one_site_entropy", "one_site_rdm", "partition_function", "two_point_transverse", "two_point_zz",
    "two_site_rdm", "two_site_rdm_thermo", "entanglement_range", "finite_negativity",
    "max_entangled_system_size", "negativity", "partial_transpose", "pt_spectrum_thermo",
    "thermo_negativity", "HamiltonianWeights", "assemble_chain", "coupling_constants",
    "null_space_vectors", "dense_negativity", "dense_rdm", "dense_state",
]
