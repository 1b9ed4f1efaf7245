"""Operator-algebra verification of conservation-law-constrained qubit dynamics.

Subpackages cover exact Pauli algebra and dense numerics, the six-gate
witness network in the Heisenberg picture, commutant computations under
additive and non-additive conservation laws, rotation-axis constraint
systems with bounded mediator searches, partial-swap homogenisation, and a
truncated bosonic image of the network.  The ``qwitness`` CLI runs every
check deterministically and writes machine-readable reports.
"""

from .circuit import (
    Circuit,
    DescriptorFrame,
    GateSpec,
    evolve_descriptors,
    gate_unitary,
    network_hamiltonian,
    witness_circuit,
    witness_state_check,
)
from .conservation import (
    ConservedQuantity,
    HamiltonianFamily,
    classicality_filter,
    commutant_basis,
    conservation_residual,
    constrain_family,
)
from .dense import DenseOperator, expm_hermitian, partial_trace, pauli_decompose, to_dense
from .errors import ContractViolation, StructuralError
from .homogenizer import HomogenizerConfig, homogenize_step, partial_swap
from .oscillator import FockOperators, HPQubit, fock_ops, hp_hamiltonian, hp_qubit
from .paulis import OperatorExpr, PauliString, commutator, pauli_mul
from .reports import Check, WitnessReport
from .witness import (
    RotationSpec,
    TargetMap,
    classical_impossibility_search,
    coherence,
    quantum_demo,
    rotation_image,
    solve_axis_system,
)

__version__ = "0.1.0"
