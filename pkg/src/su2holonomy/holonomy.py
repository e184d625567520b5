"""Holonomies of the E=0 pair: path-ordered products and closed forms.

All 2x2 matrices act on amplitudes in the (chi1, chi2) frame.  For a loop the
frame is the one at the loop's start point (B0, phi = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np
from scipy.integrate import quad

from .connection import connection_coefficients, radial_strength
from .hamiltonian import SX, SY, SZ, is_forbidden_field
from .spectrum import aux_quantities

TWO_PI = 2 * np.pi


# ---------------------------------------------------------------------------
# control paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Radial:
    """Change the field magnitude at fixed angle."""

    B_start: float
    B_end: float
    phi: float = 0.0

    @property
    def length(self) -> float:
        return abs(self.B_end - self.B_start)

    def point(self, u):
        return self.B_start + (self.B_end - self.B_start) * np.asarray(u), np.full_like(
            np.asarray(u, float), self.phi)

    def velocity(self) -> tuple[float, float]:
        """(dB/du, dphi/du) for the segment parameter u in [0, 1]."""
        return self.B_end - self.B_start, 0.0

    @property
    def start(self):
        return self.B_start, self.phi

    @property
    def end(self):
        return self.B_end, self.phi


@dataclass(frozen=True)
class Precession:
    """``turns`` counter-clockwise revolutions of the field angle at fixed B."""

    B: float
    phi_start: float = 0.0
    turns: int = 1

    def __post_init__(self):
        if int(self.turns) != self.turns or self.turns < 1:
            raise ValueError(f"turns must be a positive integer, got {self.turns}")

    @property
    def length(self) -> float:
        return TWO_PI * self.turns

    def point(self, u):
        u = np.asarray(u, float)
        return np.full_like(u, self.B), self.phi_start + TWO_PI * self.turns * u

    def velocity(self) -> tuple[float, float]:
        return 0.0, TWO_PI * self.turns

    @property
    def start(self):
        return self.B, self.phi_start

    @property
    def end(self):
        return self.B, self.phi_start + TWO_PI * self.turns


Segment = Union[Radial, Precession]


def _same_point(a, b, tol=1e-12) -> bool:
    dphi = (a[1] - b[1] + np.pi) % TWO_PI - np.pi
    return abs(a[0] - b[0]) <= tol and abs(dphi) <= tol


@dataclass(frozen=True)
class ControlPath:
    """Piecewise curve in the (B, phi) plane together with the couplings.

    Every segment keeps B > 0 and stays clear of B = 2g; consecutive
    segments must join up.  ``J`` is only needed for time evolution.
    """

    segments: tuple[Segment, ...]
    g: float = 1.0
    J: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.g <= 0:
            raise ValueError("g must be positive")
        if self.J is not None and self.J == 0:
            raise ValueError("J = 0 merges the E=0 and E=-J levels")
        for seg in self.segments:
            lo, hi = (seg.B, seg.B) if isinstance(seg, Precession) else sorted(
                (seg.B_start, seg.B_end))
            if lo <= 0:
                raise ValueError(f"segment {seg} reaches B <= 0")
            if lo <= 2 * self.g <= hi or is_forbidden_field(lo, self.g) \
                    or is_forbidden_field(hi, self.g):
                raise ValueError(f"segment {seg} touches the forbidden field B = 2g")
        for a, b in zip(self.segments, self.segments[1:]):
            if not _same_point(a.end, b.start):
                raise ValueError(f"segments do not join: {a.end} -> {b.start}")

    @classmethod
    def loop(cls, B0: float, B1: float, g: float = 1.0, n: int = 1,
             J: float | None = None) -> "ControlPath":
        """Radial out B0 -> B1, n precessions at B1, radial back (all at phi = 0)."""
        segs: list[Segment] = []
        if B0 != B1:
            segs.append(Radial(B0, B1, 0.0))
        segs.append(Precession(B1, 0.0, n))
        if B0 != B1:
            segs.append(Radial(B1, B0, 0.0))
        return cls(tuple(segs), g, J)

    @property
    def start(self):
        return self.segments[0].start if self.segments else None

    @property
    def end(self):
        return self.segments[-1].end if self.segments else None

    @property
    def is_closed(self) -> bool:
        return not self.segments or _same_point(self.start, self.end)

    @property
    def length(self) -> float:
        return sum(seg.length for seg in self.segments)


@dataclass(frozen=True)
class HolonomyResult:
    U: np.ndarray
    path: ControlPath | None
    method: str  # "closed_form", "path_ordered" or "schrodinger"
    extras: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------------
# SU(2) helpers
# ---------------------------------------------------------------------------

def exp_pauli(v) -> np.ndarray:
    """exp(-i v . sigma) for vectors of shape (..., 3), exactly."""
    v = np.asarray(v, float)
    r = np.linalg.norm(v, axis=-1)
    sinc = np.sinc(r / np.pi)  # sin(r)/r, finite at r = 0
    c = np.cos(r)[..., None, None]
    s = (sinc[..., None] * v)
    out = c * np.eye(2) - 1j * (s[..., 0, None, None] * SX + s[..., 1, None, None] * SY
                                + s[..., 2, None, None] * SZ)
    return out


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """mats[-1] @ ... @ mats[1] @ mats[0], by pairwise batched reduction."""
    mats = np.asarray(mats)
    if len(mats) == 0:
        return np.eye(2, dtype=np.complex128)
    while len(mats) > 1:
        k = len(mats) // 2 * 2
        paired = mats[1:k:2] @ mats[0:k:2]
        mats = np.concatenate([paired, mats[k:]]) if k < len(mats) else paired
    return mats[0]


def _segment_nodes(n: int, spacing: str) -> np.ndarray:
    s = np.linspace(0.0, 1.0, n + 1)
    if spacing == "uniform":
        return s
    if spacing == "cosine":
        return 0.5 * (1 - np.cos(np.pi * s))
    raise ValueError(f"unknown spacing {spacing!r}")


def path_ordered_exponential(path: ControlPath, steps_per_unit: float = 10_000,
                             spacing: str = "uniform") -> HolonomyResult:
    """P exp(-integral A) along ``path`` with the exponential-midpoint rule.

    Each segment gets ``ceil(steps_per_unit * length)`` steps, where length
    is |dB| for radial and the swept angle in radians for precession
    segments.  ``spacing="cosine"`` clusters nodes at segment ends.
    """
    if steps_per_unit < 100:
        raise ValueError("steps_per_unit must be >= 100")
    factors = []
    for seg in path.segments:
        if seg.length == 0:
            continue
        n = max(1, math.ceil(steps_per_unit * seg.length))
        u = _segment_nodes(n, spacing)
        du = np.diff(u)
        B, phi = seg.point(0.5 * (u[1:] + u[:-1]))
        c_phi, c_B = connection_coefficients(B, phi, path.g)
        dB, dphi = seg.velocity()
        # exp(-A dlambda) with A = i c.sigma
        factors.append(exp_pauli((c_phi * dphi + c_B * dB) * du[:, None]))
    U = ordered_product(np.concatenate(factors)) if factors else np.eye(2, dtype=complex)
    return HolonomyResult(U, path, "path_ordered")


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def radial_angle(B0: float, B1: float, g: float, limit: int = 200,
                 tol: float = 1e-10) -> float:
    """theta(B0, B1) = 2 * integral_{B0}^{B1} 2 g B^2 A'/K dB."""
    if B0 <= 0 or B1 <= 0:
        raise ValueError("radial endpoints must be positive")
    if B0 == B1:
        return 0.0
    val, err = quad(lambda b: radial_strength(b, g), B0, B1,
                    epsabs=tol * 1e-2, epsrel=tol, limit=limit)
    if err > tol * max(1.0, abs(val)):
        raise RuntimeError(f"quadrature did not converge (error estimate {err:.2e})")
    return 2.0 * val


def radial_phase_U_Y(B0: float, B1: float, g: float, limit: int = 200):
    """Return (U_Y, theta) for a radial segment at phi = 0."""
    theta = radial_angle(B0, B1, g, limit=limit)
    return exp_pauli([0.0, theta / 2, 0.0]), theta


def precession_holonomy_U_XZ(B: float, g: float, n: int = 1) -> np.ndarray:
    """Holonomy of n precessions at fixed B, in the chi(B, phi=0) frame."""
    if B <= 0:
        raise ValueError("B must be positive")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    aux = aux_quantities(B, g)
    angle = 2 * np.pi * aux.A * n
    # exp(-3 i pi n sz) is (-1)^n times the identity
    sign = -1.0 if n % 2 else 1.0
    return sign * (np.cos(angle) * np.eye(2)
                   + 1j * np.sin(angle) * (aux.axis_x * SX + aux.axis_z * SZ))


def loop_holonomy(B0: float, B1: float, g: float = 1.0, n: int = 1,
                  J: float | None = None) -> HolonomyResult:
    """Radial out, n precessions, radial back: U_Y^-1 U_XZ U_Y."""
    path = ControlPath.loop(B0, B1, g, n, J)
    U_Y, theta = radial_phase_U_Y(B0, B1, g)
    U_XZ = precession_holonomy_U_XZ(B1, g, n)
    U = U_Y.conj().T @ U_XZ @ U_Y
    return HolonomyResult(U, path, "closed_form",
                          {"U_Y": U_Y, "U_XZ": U_XZ, "theta": theta})


def _frame_twist(phi: float) -> np.ndarray:
    # moving the start angle by phi conjugates the connection by exp(-3i phi sz/2)
    return exp_pauli([0.0, 0.0, 1.5 * phi])


def segment_holonomy(seg: Segment, g: float) -> np.ndarray:
    """Closed-form holonomy of one segment, from its start frame to its end frame."""
    if isinstance(seg, Radial):
        U, _ = radial_phase_U_Y(seg.B_start, seg.B_end, g)
        phi = seg.phi
    else:
        U = precession_holonomy_U_XZ(seg.B, g, seg.turns)
        phi = seg.phi_start
    if phi == 0:
        return U
    R = _frame_twist(phi)
    return R @ U @ R.conj().T


def closed_form_holonomy(path: ControlPath) -> HolonomyResult:
    """Compose closed-form segment holonomies in time order."""
    U = np.eye(2, dtype=complex)
    for seg in path.segments:
        U = segment_holonomy(seg, path.g) @ U
    return HolonomyResult(U, path, "closed_form")


def composition_shortcut_gap(B0: float, B1: float, g: float = 1.0, n: int = 1) -> dict:
    """Compare U_Y^-1 U_XZ U_Y with the shortcut U_XZ U_Y^2.

    The two agree only when U_XZ commutes with U_Y, so for a generic radial
    segment the gap is finite.  Returned for reporting, never relied upon.
    """
    res = loop_holonomy(B0, B1, g, n)
    U_Y, U_XZ = res.extras["U_Y"], res.extras["U_XZ"]
    shortcut = U_XZ @ U_Y @ U_Y
    return {"conjugated": res.U, "shortcut": shortcut,
            "max_abs_difference": float(np.max(np.abs(res.U - shortcut))),
            "theta": res.extras["theta"]}


# ---------------------------------------------------------------------------
# rotation angle / axis
# ---------------------------------------------------------------------------

def align_global_phase(U: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Multiply U by the unit phase making tr(target^dagger U) real and >= 0."""
    overlap = np.trace(target.conj().T @ U)
    if abs(overlap) == 0:
        return U
    return U * (abs(overlap) / overlap)


def gate_fidelity(U: np.ndarray, target: np.ndarray) -> float:
    """|tr(target^dagger U)| / d, insensitive to a global phase of either."""
    return float(abs(np.trace(target.conj().T @ U)) / target.shape[0])


class RotationDecomposition(NamedTuple):
    global_phase: float
    angle: float
    axis: np.ndarray
    axis_defined: bool


def rotation_decomposition(U: np.ndarray, atol: float = 1e-12) -> RotationDecomposition:
    """Write U = e^{i gamma} [cos(a/2) - i sin(a/2) n.sigma].

    gamma is half the determinant phase, in (-pi/2, pi/2]; then a lies in
    [0, 2 pi] with sin(a/2) >= 0.  For a = 0 the axis is undefined and
    (0, 0, 1) is returned with ``axis_defined=False``.
    """
    U = np.asarray(U, dtype=complex)
    gamma = float(np.angle(np.linalg.det(U))) / 2
    if gamma <= -np.pi / 2:
        gamma += np.pi
    V = U * np.exp(-1j * gamma)
    cos_half = float(np.clip(np.real(np.trace(V)) / 2, -1.0, 1.0))
    # V = c - i s n.sigma  =>  s n_k = Re(i tr(V sigma_k) / 2)
    sn = np.array([np.real(1j * np.trace(V @ P)) / 2 for P in (SX, SY, SZ)])
    sin_half = float(np.linalg.norm(sn))
    angle = 2 * math.atan2(sin_half, cos_half)
    if sin_half <= atol and cos_half < 0:
        # V = -1: same gate as the identity
        gamma = gamma + np.pi if gamma <= 0 else gamma - np.pi
        angle = 0.0
    if sin_half <= atol:
        return RotationDecomposition(gamma, angle, np.array([0.0, 0.0, 1.0]), False)
    return RotationDecomposition(gamma, angle, sn / sin_half, True)


def rotation_sweep(B_values, g: float = 1.0, n: int = 1) -> list[dict]:
    """Rotation angle and axis of the n-turn precession holonomy over a B grid.

    Rows at B = 2g are kept but carry ``skipped=True`` and no numbers.
    """
    rows = []
    for B in np.asarray(B_values, float):
        if B <= 0 or is_forbidden_field(B, g, tol=1e-9):
            rows.append({"B_over_g": B / g, "skipped": True})
            continue
        aux = aux_quantities(B, g)
        dec = rotation_decomposition(precession_holonomy_U_XZ(B, g, n))
        rows.append({
            "B_over_g": B / g,
            "alpha_canonical": dec.angle,
            "axis_angle_from_z": math.atan2(dec.axis[0], dec.axis[2]),
            "alpha_raw": 4 * np.pi * aux.A * n,
            "axis_angle_raw": math.atan2(aux.axis_x, aux.axis_z),
            "skipped": False,
        })
    return rows
