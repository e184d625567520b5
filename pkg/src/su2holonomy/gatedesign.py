"""Single-turn gate synthesis on the geometric qubit.

A gate is realised by one precession at a chosen field B, read in a
computational basis rotated by an angle beta inside the E=0 pair:

    |down> =  cos(beta) chi1 + sin(beta) chi2
    |up>   = -sin(beta) chi1 + cos(beta) chi2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .hamiltonian import SX, SZ, is_forbidden_field
from .holonomy import (align_global_phase, gate_fidelity, precession_holonomy_U_XZ,
                       rotation_decomposition)
from .spectrum import aux_quantities

FIDELITY_THRESHOLD = 1 - 1e-8
HADAMARD = (SX + SZ) / np.sqrt(2)
NOT = SX.copy()
SQRT_I_NOT = (np.eye(2) + 1j * SX) / np.sqrt(2)  # principal root of i*X, trace > 0

TARGETS = ("hadamard", "not", "sqrt_inot", "phase")

# field range scanned when matching a rotation angle; A(B) -> -1/2 only as B -> inf
_B_MIN, _B_MAX = 1e-6, 1e3


class InfeasibleDesign(ValueError):
    """No single-turn design reaches the requested gate."""


def phase_gate(theta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * theta)])


def target_matrix(target: str, theta: float | None = None) -> np.ndarray:
    if target == "hadamard":
        return HADAMARD
    if target == "not":
        return NOT
    if target == "sqrt_inot":
        return SQRT_I_NOT
    if target == "phase":
        if theta is None:
            raise ValueError("phase target needs theta")
        return phase_gate(theta)
    raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")


@dataclass(frozen=True)
class GateDesign:
    target: str
    m1: int
    m2: int
    B_over_g: float
    beta: float
    n: int
    achieved_fidelity: float
    unitary: np.ndarray = field(repr=False, compare=False)
    theta: float | None = None

    @property
    def passed(self) -> bool:
        return self.achieved_fidelity >= FIDELITY_THRESHOLD

    def to_dict(self) -> dict:
        dec = rotation_decomposition(self.unitary)
        return {
            "target": self.target,
            "theta": self.theta,
            "m1": self.m1,
            "m2": self.m2,
            "B_over_g": self.B_over_g,
            "beta": self.beta,
            "n": self.n,
            "achieved_fidelity": self.achieved_fidelity,
            "passed": self.passed,
            "rotation_angle": dec.angle,
            "rotation_axis": [float(x) for x in dec.axis],
        }


def basis_rotation(beta: float) -> np.ndarray:
    """Columns are |down>, |up> expressed in the (chi1, chi2) frame."""
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rotated_holonomy(B: float, g: float, beta: float) -> np.ndarray:
    """One-turn precession holonomy in the beta-rotated basis, from its Pauli coefficients."""
    aux = aux_quantities(B, g)
    lk, rk = aux.axis_z, aux.axis_x
    c2, s2 = math.cos(2 * beta), math.sin(2 * beta)
    z = lk * c2 + rk * s2
    x = -(lk * s2 - rk * c2)
    angle = 2 * np.pi * aux.A
    return -math.cos(angle) * np.eye(2) - 1j * math.sin(angle) * (z * SZ + x * SX)


def solve_field(m1: int, g: float = 1.0) -> float:
    """Field magnitude where cos(2 pi A) = 0, i.e. A = (2 m1 + 1) / 4.

    Only m1 = 0, 1, 2 give a real positive root; for m1 >= 3 the inner
    radicand 39 - 4 m1 (m1 + 1) is negative.
    """
    if m1 not in (0, 1, 2):
        raise ValueError(f"m1 must be 0, 1 or 2, got {m1}")
    q = 4 * m1 * (m1 + 1)
    inner = -12 + math.sqrt((39 - q) * (1 + 2 * m1) ** 2)
    B = g * math.sqrt(2 * inner / (q - 3))
    residual = math.cos(2 * math.pi * aux_quantities(B, g).A)
    if abs(residual) > 1e-10:
        raise RuntimeError(f"root check failed: cos(2 pi A) = {residual:.2e}")
    return B


def hadamard_basis_angle(B: float, g: float = 1.0, m2: int = 0) -> float:
    L = aux_quantities(B, g).L
    if L == 0 or is_forbidden_field(B, g):
        raise ValueError("L vanishes at B = 2g; pick a different m1 root")
    r = 2 * g * B**3 / L
    # two-argument arctan keeps the branch continuous through r = 1
    return math.atan2(1 + r + math.sqrt(2 * (1 + r * r)), 1 - r) - m2 * math.pi / 2


def _aligned_beta(B: float, g: float, axis: str) -> float:
    """Basis angle putting the holonomy's rotation axis on +axis ('x' or 'z')."""
    aux = aux_quantities(B, g)
    rx = 2 * g * B**3
    if axis == "z":
        return 0.5 * math.atan2(rx, aux.L)
    return 0.5 * math.atan2(-aux.L, rx)


def _A_inverse(a: float, g: float) -> float | None:
    f = lambda B: aux_quantities(B, g).A - a  # noqa: E731
    lo, hi = f(_B_MIN), f(_B_MAX)
    if lo * hi > 0:
        return None
    return brentq(f, _B_MIN, _B_MAX, xtol=1e-14, rtol=1e-15)


def angle_matching_fields(axis: str, angle: float, g: float = 1.0) -> list[tuple[float, float]]:
    """All (B, beta) whose one-turn holonomy rotates by ``angle`` about +axis.

    With beta aligned to +axis the holonomy rotates by -4 pi A; a quarter-turn
    of beta flips the axis and gives +4 pi A.  A(B) decreases monotonically
    from 3/2 to -1/2, so each admissible A value has exactly one B.
    Sorted by decreasing B; B = 2g is dropped.
    """
    out = []
    for sign, shift in ((-1, 0.0), (+1, math.pi / 2)):
        # sign * 4 pi A = angle + 2 pi k
        for k in range(-4, 5):
            a = sign * (angle + 2 * math.pi * k) / (4 * math.pi)
            if not -0.5 < a < 1.5:
                continue
            B = _A_inverse(a, g)
            if B is None or is_forbidden_field(B, g, tol=1e-9):
                continue
            if any(abs(B - b) < 1e-9 for b, _ in out):
                continue  # angle 0 or pi: both orientations give the same field
            out.append((B, _aligned_beta(B, g, axis) + shift))
    out.sort(key=lambda t: -t[0])
    return out


def design_gate(target: str, m1: int = 0, g: float = 1.0, m2: int = 0,
                theta: float | None = None) -> GateDesign:
    """Choose (B, beta) so one precession realises ``target`` up to a phase.

    Hadamard and NOT use the quarter-period roots from :func:`solve_field`.
    Phase(theta) and sqrt(iNOT) align the rotation axis with z or x and
    root-solve for B; there ``m1`` indexes the matching fields from the
    largest B down and ``m2`` adds multiples of pi to beta.  A phase angle
    outside [0, 2 pi) is reported as :class:`InfeasibleDesign`.
    """
    U_target = target_matrix(target, theta)
    if target in ("hadamard", "not"):
        B = solve_field(m1, g)
        beta = hadamard_basis_angle(B, g, m2)
        if target == "not":
            beta -= math.pi / 8
    else:
        if target == "phase":
            if not 0 <= theta < 2 * math.pi:
                raise InfeasibleDesign(
                    f"phase angle {theta} lies outside the canonical range [0, 2 pi)")
            candidates = angle_matching_fields("z", theta, g)
        else:
            candidates = angle_matching_fields("x", -math.pi / 2, g)
        if m1 < 0 or m1 >= len(candidates):
            raise InfeasibleDesign(
                f"{len(candidates)} matching field(s) for {target}; m1={m1} out of range")
        B, beta = candidates[m1]
        beta += m2 * math.pi

    U = rotated_holonomy(B, g, beta)
    return GateDesign(target, m1, m2, B / g, beta, 1, gate_fidelity(U, U_target), U,
                      theta if target == "phase" else None)


def verify_with_dynamics(design: GateDesign, g: float = 1.0, J: float = 0.5,
                         T_total: float = 400.0) -> dict:
    """Run the design's precession through Schrodinger evolution.

    Returns the gate infidelity of the evolved holonomy (in the design basis)
    against the target, next to the adiabatic infidelity of the same
    evolution against the closed-form holonomy.
    """
    from .dynamics import extract_geometric_unitary
    from .holonomy import ControlPath

    B = design.B_over_g * g
    path = ControlPath.loop(B, B, g, design.n, J)
    ext = extract_geometric_unitary(path, T_total)
    R = basis_rotation(design.beta)
    U_gate = R.conj().T @ ext.U_geo @ R
    U_target = target_matrix(design.target, design.theta)
    return {
        "T": T_total,
        "J": J,
        "leakage": ext.leakage,
        "gate_infidelity": 1 - gate_fidelity(U_gate, U_target),
        "adiabatic_infidelity": 1 - gate_fidelity(
            ext.U_geo, precession_holonomy_U_XZ(B, g, design.n)),
        "aligned_gate": align_global_phase(U_gate, U_target),
    }
