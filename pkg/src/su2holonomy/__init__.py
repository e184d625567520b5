"""SU(2) adiabatic holonomies of three XY-coupled qubits.

Closed-form eigenstates, connection and holonomies of the degenerate E=0
pair, checked against path-ordered products and Schrodinger evolution, plus
single-turn geometric gate design.
"""

from .hamiltonian import SystemParams, build_hamiltonian, pauli_embed
from .spectrum import (aux_quantities, closed_form_degenerate_states,
                       closed_form_eigenvalues, level_gap, numeric_eigendecomposition)
from .connection import analytic_connection, berry_phase_nondegenerate, numeric_connection
from .holonomy import (ControlPath, Precession, Radial, loop_holonomy,
                       path_ordered_exponential, precession_holonomy_U_XZ,
                       radial_phase_U_Y, rotation_decomposition)
from .dynamics import adiabaticity_report, extract_geometric_unitary, schrodinger_propagate
from .gatedesign import design_gate, hadamard_basis_angle, rotated_holonomy, solve_field

__version__ = "0.1.0"
