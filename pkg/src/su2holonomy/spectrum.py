"""Closed-form and numerical eigenstructure of the three-qubit Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import SystemParams, build_hamiltonian, ket

DEFAULT_TAU_DEG = 1e-8


@dataclass(frozen=True)
class AuxQuantities:
    """Field-dependent scalars that parametrise the E=0 eigenpair.

    ``A`` sets the precession rotation angle and ``A_prime`` the radial
    connection strength.  ``(axis_x, L / K)`` with ``axis_x = 2 g B^3 / K``
    is the unit rotation axis in the x-z plane.
    """

    A: float
    A_prime: float
    K: float
    L: float
    axis_x: float

    @property
    def axis_z(self) -> float:
        return self.L / self.K


def aux_quantities(B, g) -> AuxQuantities:
    """Evaluate A, A', K and L at drive ``B`` and coupling ``g``.

    Scalar and array ``B`` are both accepted.
    """
    B = np.asarray(B, dtype=float)
    B2 = B * B
    root = np.sqrt(B2 * B2 + 4 * g**4)
    A = 0.5 * (-B2 + 6 * g * g) / root
    A_prime = 0.5 * (B2 + 6 * g * g) / root
    K = B2 * B2 - 2 * g * g * B2 + 8 * g**4
    L = (-B2 + 4 * g * g) * root
    return AuxQuantities(*(_scalar(v) for v in (A, A_prime, K, L, 2 * g * B**3 / K)))


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def rotation_axis(B, g) -> np.ndarray:
    """Unit axis (2gB^3/K, 0, L/K) in the x-z plane of the geometric qubit."""
    aux = aux_quantities(B, g)
    return np.array([aux.axis_x, 0.0, aux.axis_z])


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

LEVEL_ZERO = "zero"
LEVEL_MINUS_J = "minus_J"
LEVEL_NONDEGENERATE = "nondegenerate"


def nondegenerate_energies(p: SystemParams) -> np.ndarray:
    """The four simple levels (J +/- sqrt(J^2 + 4(2g^2 + B^2 +/- 2Bg))) / 2, sorted."""
    g, J, B = p.g, p.J, p.B
    out = []
    for inner in (+1, -1):
        disc = np.sqrt(J * J + 4 * (2 * g * g + B * B + inner * 2 * B * g))
        out.extend([0.5 * (J + disc), 0.5 * (J - disc)])
    return np.sort(np.array(out))


def closed_form_eigenvalues(p: SystemParams) -> tuple[np.ndarray, tuple[str, ...]]:
    """All eight energies, ascending, with a multiplicity label for each."""
    pairs = [(0.0, LEVEL_ZERO)] * 2 + [(-p.J, LEVEL_MINUS_J)] * 2
    pairs += [(float(e), LEVEL_NONDEGENERATE) for e in nondegenerate_energies(p)]
    pairs.sort(key=lambda t: t[0])
    return np.array([e for e, _ in pairs]), tuple(lbl for _, lbl in pairs)


def closed_form_degenerate_states(B: float, phi: float, g: float):
    """Return (chi1, chi2, chi3, chi4).

    chi1, chi2 span the E=0 pair in the gauge where the |000> amplitude of
    chi1 and the |111> amplitude of chi2 are real.  chi3, chi4 span E=-J and
    do not depend on the drive.  B = 0 is allowed and gives the B -> 0 limit
    (|000> and |111>); adiabatic loops never visit it.
    """
    if g <= 0:
        raise ValueError("g must be positive")
    if B < 0:
        raise ValueError("B must be non-negative")
    B2 = B * B
    K = B2 * B2 - 2 * g * g * B2 + 8 * g**4
    e1, e2, e3 = (np.exp(1j * k * phi) for k in (1, 2, 3))

    chi1 = ((-B2 + 4 * g * g) * ket("000")
            + B2 * e2 * ket("011")
            - 2 * g * B * e1 * ket("100")) / np.sqrt(2 * K)
    chi2 = (2 * g * B**3 * e3.conjugate() * ket("000")
            - 4 * g**3 * B * e1.conjugate() * ket("011")
            - B2 * (B2 - 2 * g * g) * e2.conjugate() * ket("100")
            + K * ket("111")) / np.sqrt(2 * K * (B2 * B2 + 4 * g**4))
    chi3 = (ket("001") - ket("010")) / np.sqrt(2)
    chi4 = (ket("110") - ket("101")) / np.sqrt(2)
    return chi1, chi2, chi3, chi4


def zero_frame(B: float, phi: float, g: float) -> np.ndarray:
    """8x2 matrix whose columns are chi1, chi2."""
    chi1, chi2, _, _ = closed_form_degenerate_states(B, phi, g)
    return np.column_stack([chi1, chi2])


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenFrame:
    energies: np.ndarray
    states: np.ndarray  # columns are eigenvectors
    groups: tuple[tuple[int, ...], ...]

    def group_energy(self, k: int) -> float:
        return float(np.mean(self.energies[list(self.groups[k])]))

    def group_sizes(self) -> list[int]:
        return [len(grp) for grp in self.groups]

    def find_group(self, energy: float, atol: float = 1e-6) -> int:
        dist = [abs(self.group_energy(k) - energy) for k in range(len(self.groups))]
        k = int(np.argmin(dist))
        if dist[k] > atol:
            raise LookupError(f"no level near E = {energy}")
        return k

    def projector(self, k: int) -> np.ndarray:
        V = self.states[:, list(self.groups[k])]
        return V @ V.conj().T


def numeric_eigendecomposition(H: np.ndarray, tau_deg: float = DEFAULT_TAU_DEG,
                               reference: np.ndarray | None = None) -> EigenFrame:
    """Diagonalise ``H`` and group levels closer than ``tau_deg``.

    Gaps in ``[tau_deg, 10 * tau_deg)`` make the grouping ambiguous and raise
    ``ValueError``.  If ``reference`` (columns = reference vectors) is given,
    each degenerate group is rotated onto the references it contains, which
    fixes the otherwise arbitrary basis inside the group.
    """
    energies, vecs = np.linalg.eigh(H)
    groups: list[list[int]] = [[0]]
    for k in range(1, len(energies)):
        gap = energies[k] - energies[k - 1]
        if gap < tau_deg:
            groups[-1].append(k)
        elif gap < 10 * tau_deg:
            raise ValueError(f"ambiguous degeneracy: gap {gap:.3e} near tau_deg")
        else:
            groups.append([k])

    if reference is not None:
        vecs = vecs.copy()
        for grp in groups:
            if len(grp) > 1:
                vecs[:, grp] = _align_group(vecs[:, grp], reference)

    return EigenFrame(energies, vecs, tuple(tuple(grp) for grp in groups))


def _align_group(V: np.ndarray, reference: np.ndarray) -> np.ndarray:
    overlaps = V.conj().T @ reference
    weight = np.linalg.norm(overlaps, axis=0)
    picked = np.flatnonzero(weight > 0.5)
    m = V.shape[1]
    if len(picked) != m:
        # partial match: order by descending best overlap only
        order = np.argsort(-np.max(np.abs(overlaps), axis=1), kind="stable")
        return V[:, order]
    u, _, vh = np.linalg.svd(overlaps[:, picked])
    return V @ (u @ vh)


def eigenframe(p: SystemParams, tau_deg: float = DEFAULT_TAU_DEG) -> EigenFrame:
    """Numerical eigenframe of H(p), gauge-aligned to the closed-form states."""
    ref = np.column_stack(closed_form_degenerate_states(p.B, p.phi, p.g))
    return numeric_eigendecomposition(build_hamiltonian(p), tau_deg, reference=ref)


def level_gap(p: SystemParams) -> float:
    """Distance from the E=0 pair to the nearest other level."""
    others = np.concatenate([[-p.J], nondegenerate_energies(p)])
    return float(np.min(np.abs(others)))
