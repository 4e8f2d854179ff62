"""Numerical toolkit for Holstein-model transport: Hamiltonians, closed and
open dynamics, random walks, transport experiments and memory estimates."""

from .errors import HolsimError, IntegratorError, ResourceError, ValidationError
from .model import (
    BathSpec,
    Distribution,
    ProductBasis,
    SiteNetwork,
    build_bath_hamiltonian,
    build_interaction_hamiltonian,
    build_system_hamiltonian,
    build_total_hamiltonian,
    chain_couplings,
    generate_disordered_network,
)
from .dynamics import (
    ChannelSpec,
    IntegratorConfig,
    Trajectory,
    density_matrix,
    evolve_open,
    evolve_unitary,
    localized_state,
    step_propagator,
)
from .walks import CoinSpec, classical_walk, fit_spreading_exponent, quantum_walk
from .transport import (
    coherence_l1,
    crossover_scan,
    mean_squared_displacement,
    site_populations,
    sweep_dephasing,
    transfer_efficiency,
)
from .memory import MemoryModel, max_qubits, product_basis_bits, qubit_state_bits
from .scenario import (
    Scenario,
    SpectralDensitySpec,
    discretize_spectral_density,
    parse_scenario,
    serialize_scenario,
)

__version__ = "0.1.0"
