"""Adiabatic connection on the E=0 pair and Berry phases of the simple levels.

Convention: the stored matrices are the raw overlaps
``A[c, b] = <chi_c | d chi_b / d lambda>``, which are anti-Hermitian, and the
transported amplitudes obey ``dU/dlambda = -A U``.  The closed form is kept
as Pauli coefficients ``A = i * (c_x sx + c_y sy + c_z sz)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import SX, SY, SZ, SystemParams, build_hamiltonian
from .spectrum import aux_quantities, nondegenerate_energies, zero_frame


@dataclass(frozen=True)
class ConnectionOneForm:
    A_phi: np.ndarray
    A_B: np.ndarray
    B: float
    phi: float
    g: float

    def along(self, dB: float, dphi: float) -> np.ndarray:
        """Contract with a tangent vector (dB, dphi)."""
        return self.A_B * dB + self.A_phi * dphi


def pauli_matrix(coeffs) -> np.ndarray:
    """``c_x sx + c_y sy + c_z sz`` for coefficient arrays of shape (..., 3)."""
    c = np.asarray(coeffs)
    return c[..., 0, None, None] * SX + c[..., 1, None, None] * SY + c[..., 2, None, None] * SZ


def connection_coefficients(B, phi, g):
    """Pauli coefficients of the phi- and B-components of the connection.

    Vectorised over ``B`` and ``phi``.  Returns two arrays of shape (..., 3)
    such that ``A_phi = i * coeffs_phi . sigma`` and likewise for ``A_B``.
    """
    B, phi = np.broadcast_arrays(np.asarray(B, float), np.asarray(phi, float))
    aux = aux_quantities(B, g)
    K = aux.K
    diag = B**2 * (B**2 + 2 * g * g) / K  # half of 2B^2(B^2+2g^2)/K
    twist = 2 * g * B**3 * aux.A / K
    radial = 2 * g * B**2 * aux.A_prime / K
    c3, s3 = np.cos(3 * phi), np.sin(3 * phi)
    coeffs_phi = np.stack([-twist * c3, -twist * s3, diag], axis=-1)
    coeffs_B = np.stack([-radial * s3, radial * c3, np.zeros_like(B)], axis=-1)
    return coeffs_phi, coeffs_B


def radial_strength(B, g):
    """2 g B^2 A' / K, the magnitude of the B-component of the connection."""
    aux = aux_quantities(B, g)
    return 2 * g * np.asarray(B) ** 2 * aux.A_prime / aux.K


def analytic_connection(B: float, phi: float, g: float) -> ConnectionOneForm:
    if B <= 0 or g <= 0:
        raise ValueError("analytic connection needs B > 0 and g > 0")
    cphi, cB = connection_coefficients(B, phi, g)
    return ConnectionOneForm(1j * pauli_matrix(cphi), 1j * pauli_matrix(cB), B, phi, g)


def numeric_connection(B: float, phi: float, g: float, delta: float = 1e-5,
                       min_overlap: float = 0.9) -> ConnectionOneForm:
    """Central-difference estimate of <chi_c | d chi_b> from the closed-form frame.

    Raises ``RuntimeError`` if neighbouring frames overlap by less than
    ``min_overlap``, which would indicate a gauge discontinuity.
    """
    if B - delta <= 0:
        raise ValueError("B - delta must stay positive")
    F = zero_frame(B, phi, g)
    Fdag = F.conj().T

    def derivative(minus: np.ndarray, plus: np.ndarray) -> np.ndarray:
        for nb in (minus, plus):
            overlaps = np.abs(np.sum(F.conj() * nb, axis=0))
            if overlaps.min() < min_overlap:
                raise RuntimeError(f"frame discontinuity: overlap {overlaps.min():.3f}")
        return Fdag @ (plus - minus) / (2 * delta)

    A_phi = derivative(zero_frame(B, phi - delta, g), zero_frame(B, phi + delta, g))
    A_B = derivative(zero_frame(B - delta, phi, g), zero_frame(B + delta, phi, g))
    return ConnectionOneForm(A_phi, A_B, B, phi, g)


def berry_phase_nondegenerate(level_index: int, B: float, g: float, J: float,
                              n_steps: int = 720, min_overlap: float = 0.5) -> complex:
    """exp(i * gamma_B) of one simple level after a single field precession.

    ``level_index`` counts the four simple levels in ascending energy.  Uses
    the gauge-invariant Pancharatnam product of neighbouring eigenvectors
    around the closed circle phi in [0, 2 pi).
    """
    if level_index not in range(4):
        raise ValueError("level_index must be 0..3")
    p0 = SystemParams(g, J, B, 0.0).validate(allow_forbidden_field=True)
    target = nondegenerate_energies(p0)[level_index]

    phis = 2 * np.pi * np.arange(n_steps) / n_steps
    Hs = np.stack([build_hamiltonian(SystemParams(g, J, B, ph)) for ph in phis])
    energies, vecs = np.linalg.eigh(Hs)

    picked = np.argmin(np.abs(energies - target), axis=1)
    neighbour_gap = np.partition(np.abs(energies - target), 1, axis=1)[:, 1]
    if np.any(np.abs(energies[np.arange(n_steps), picked] - target) > 1e-8) \
            or np.any(neighbour_gap < 1e-6):
        raise RuntimeError("could not isolate the requested simple level")
    v = vecs[np.arange(n_steps), :, picked]

    links = np.sum(v.conj() * np.roll(v, -1, axis=0), axis=1)
    if np.abs(links).min() < min_overlap:
        raise RuntimeError("level tracking lost continuity; increase n_steps")
    product = np.prod(links / np.abs(links))
    # gamma = -arg(product)
    return complex(np.conj(product) / abs(product))
