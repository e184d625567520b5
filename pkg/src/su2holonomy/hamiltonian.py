"""Three-qubit rotating-frame Hamiltonian and computational-basis bookkeeping.

Basis states are labelled |q3 q2 q1> and stored at index 4*q3 + 2*q2 + q1,
so qubit 3 (the coupler-side qubit) is the most significant bit.  Pauli Z
acts as +1 on bit value 0 and -1 on bit value 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DIM = 8

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)

PAULI = {"x": SX, "y": SY, "z": SZ}

for _m in (I2, SX, SY, SZ):
    _m.setflags(write=False)


@dataclass(frozen=True)
class SystemParams:
    """Couplings and drive for one Hamiltonian instance.

    Values are stored raw; internally everything is expressed in units of g.
    Construction never fails so that degenerate corner cases (g = 0, J = 0)
    can still be built and inspected.  Use :meth:`validate` before running
    anything adiabatic.
    """

    g: float
    J: float
    B: float = 0.0
    phi: float = 0.0

    @property
    def Bx(self) -> float:
        return self.B * np.cos(self.phi)

    @property
    def By(self) -> float:
        return self.B * np.sin(self.phi)

    def validate(self, allow_forbidden_field: bool = False) -> "SystemParams":
        """Raise ``ValueError`` unless the parameters keep the E=0 pair isolated."""
        if not np.isfinite([self.g, self.J, self.B, self.phi]).all():
            raise ValueError("parameters must be finite")
        if self.g <= 0:
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if self.J == 0:
            raise ValueError("J = 0 merges the E=0 and E=-J levels")
        if self.B < 0:
            raise ValueError(f"drive magnitude B must be >= 0, got {self.B}")
        if not allow_forbidden_field and is_forbidden_field(self.B, self.g):
            raise ValueError(f"B = 2g ({self.B}) is excluded from adiabatic loops")
        return self

    def scaled(self) -> "SystemParams":
        """Same instance expressed in units where g = 1."""
        return SystemParams(1.0, self.J / self.g, self.B / self.g, self.phi)


def is_forbidden_field(B: float, g: float, tol: float = 1e-12) -> bool:
    """True at B = 2g, where the rotation-axis quantity L vanishes."""
    return abs(B - 2.0 * g) <= tol * max(1.0, abs(g))


def basis_index(q3: int, q2: int, q1: int) -> int:
    for q in (q3, q2, q1):
        if q not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {(q3, q2, q1)}")
    return 4 * q3 + 2 * q2 + q1


def basis_bits(index: int) -> tuple[int, int, int]:
    """Inverse of :func:`basis_index`, returns (q3, q2, q1)."""
    if not 0 <= index < DIM:
        raise ValueError(f"index out of range: {index}")
    return (index >> 2) & 1, (index >> 1) & 1, index & 1


def ket(label: str) -> np.ndarray:
    """Basis vector for a label such as ``"011"`` written as q3 q2 q1."""
    if len(label) != 3 or set(label) - {"0", "1"}:
        raise ValueError(f"bad ket label {label!r}")
    v = np.zeros(DIM, dtype=np.complex128)
    v[basis_index(*(int(c) for c in label))] = 1.0
    return v


@lru_cache(maxsize=None)
def _embed(axis: str, qubit: int) -> np.ndarray:
    factors = [I2, I2, I2]
    factors[3 - qubit] = PAULI[axis]  # kron order is q3, q2, q1
    op = np.kron(np.kron(factors[0], factors[1]), factors[2])
    op.setflags(write=False)
    return op


def pauli_embed(axis: str, qubit: int) -> np.ndarray:
    """Pauli matrix ``axis`` acting on ``qubit`` (1, 2 or 3) of the register."""
    if axis not in PAULI:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    if qubit not in (1, 2, 3):
        raise ValueError(f"qubit must be 1, 2 or 3; got {qubit!r}")
    return _embed(axis, qubit)


def _xy_exchange(a: int, b: int) -> np.ndarray:
    return (pauli_embed("x", a) @ pauli_embed("x", b)
            + pauli_embed("y", a) @ pauli_embed("y", b))


@lru_cache(maxsize=None)
def _static_terms() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # (g-coupling, J-coupling, x-drive, y-drive), each without the 1/2 prefactor
    g_term = _xy_exchange(3, 2) + _xy_exchange(3, 1)
    j_term = _xy_exchange(2, 1)
    x_drive = pauli_embed("x", 1) + pauli_embed("x", 2)
    y_drive = pauli_embed("y", 1) + pauli_embed("y", 2)
    for m in (g_term, j_term, x_drive, y_drive):
        m.setflags(write=False)
    return g_term, j_term, x_drive, y_drive


def coupling_hamiltonian(g: float, J: float) -> np.ndarray:
    """Drive-independent part of H."""
    g_term, j_term, _, _ = _static_terms()
    return 0.5 * (g * g_term + J * j_term)


def drive_operators() -> tuple[np.ndarray, np.ndarray]:
    """(dH/dBx, dH/dBy); H is linear in the drive components."""
    _, _, x_drive, y_drive = _static_terms()
    return 0.5 * x_drive, 0.5 * y_drive


def build_hamiltonian(p: SystemParams) -> np.ndarray:
    dx, dy = drive_operators()
    return coupling_hamiltonian(p.g, p.J) + p.Bx * dx + p.By * dy


def is_hermitian(op: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(op - op.conj().T)) <= atol)


def is_unitary(op: np.ndarray, atol: float = 1e-10) -> bool:
    eye = np.eye(op.shape[0])
    return bool(np.max(np.abs(op.conj().T @ op - eye)) <= atol)
