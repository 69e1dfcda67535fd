"""Quadratic n-particle Lagrangian data and derived quantities.

A system of n particles in R^d is described by coefficient matrices J1..J5
(single-particle kinetic/potential/gyroscopic blocks) and J3, J4 pair
couplings, plus linear terms J6, J7.  The solvers assume the constant-
coefficient regime with J1..J4 symmetric and J5 skew-symmetric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numkernel


class NonConservative(Exception):
    """Raised when an energy is requested from a system with J5 != 0."""


class SingularTransform(Exception):
    """Raised when an affine change of variables is numerically singular."""


class NoRealSolution(Exception):
    """Raised when the pair-coupling construction needs the root of a negative number."""


class SymmetryInfeasible(Exception):
    """Raised when no real coupling matrix satisfies the symmetry constraint."""


def _as_matrix(a, d: int, name: str) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.shape != (d, d):
        raise ValueError(f"{name} must be a {d}x{d} matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _as_vector(a, d: int, name: str) -> np.ndarray:
    v = np.asarray(a, dtype=float).ravel()
    if v.shape != (d,):
        raise ValueError(f"{name} must be a length-{d} vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


@dataclass(frozen=True)
class LagrangianSpec:
    """Dimensions (n, d) plus the coefficient matrices and vectors."""

    d: int
    n: int
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    J4: np.ndarray
    J5: np.ndarray = None
    J6: np.ndarray = None
    J7: np.ndarray = None

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise ValueError("d and n must be >= 1")
        for name in ("J1", "J2", "J3", "J4", "J5"):
            value = getattr(self, name)
            if value is None:
                value = np.zeros((self.d, self.d))
            object.__setattr__(self, name, _as_matrix(value, self.d, name))
        for name in ("J6", "J7"):
            value = getattr(self, name)
            if value is None:
                value = np.zeros(self.d)
            object.__setattr__(self, name, _as_vector(value, self.d, name))


@dataclass(frozen=True)
class ParticleState:
    """Positions and velocities of all particles, one row each."""

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        v = np.asarray(self.velocities, dtype=float)
        if p.ndim == 1:
            p = p[None, :]
        if v.ndim == 1:
            v = v[None, :]
        if p.shape != v.shape:
            raise ValueError("positions and velocities must have matching shapes")
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "velocities", v)


@dataclass(frozen=True)
class Violation:
    """One failed structural requirement on a coefficient matrix."""

    matrix: str
    magnitude: float

    def __str__(self) -> str:
        return f"{self.matrix}: asymmetry {self.magnitude:.3e}"


def validate_spec(spec: LagrangianSpec) -> list[Violation]:
    """Check J1..J4 symmetric and J5 skew-symmetric to 1e-12."""
    out = []
    for name in ("J1", "J2", "J3", "J4"):
        m = getattr(spec, name)
        mag = float(np.abs(m - m.T).max())
        if mag > 1e-12:
            out.append(Violation(name, mag))
    mag = float(np.abs(spec.J5 + spec.J5.T).max())
    if mag > 1e-12:
        out.append(Violation("J5", mag))
    return out


def energy(spec: LagrangianSpec, state: ParticleState) -> float:
    """Conserved energy of a J5 = 0 system at the given state.

    Single-particle terms 1/2 v·J1 v − 1/2 x·J2 x + J6·v − J7·x plus the
    pair terms v_j·J3 v_k − x_j·J4 x_k over ordered pairs j != k.
    """
    if np.abs(spec.J5).max() > 1e-12:
        raise NonConservative("energy is only a constant of motion when J5 = 0")
    x = state.positions
    v = state.velocities
    if x.shape != (spec.n, spec.d):
        raise ValueError(f"state shape {x.shape} does not match (n, d) = {(spec.n, spec.d)}")
    e = 0.0
    for j in range(spec.n):
        e += 0.5 * v[j] @ spec.J1 @ v[j] - 0.5 * x[j] @ spec.J2 @ x[j]
        e += spec.J6 @ v[j] - spec.J7 @ x[j]
    for j in range(spec.n):
        for k in range(spec.n):
            if j != k:
                e += v[j] @ spec.J3 @ v[k] - x[j] @ spec.J4 @ x[k]
    return float(e)


@dataclass(frozen=True)
class BlockForms:
    """Stacked nd x nd quadratic-form blocks with definiteness flags."""

    J8: np.ndarray
    J9: np.ndarray
    J10: np.ndarray
    j8_positive: bool
    j9_positive: bool


def _block_fill(diag: np.ndarray, off: np.ndarray, n: int) -> np.ndarray:
    d = diag.shape[0]
    out = np.kron(np.eye(n), diag) + np.kron(np.ones((n, n)) - np.eye(n), off)
    return out.reshape(n * d, n * d)


def _positive_definite(m: np.ndarray) -> bool:
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    radius = np.abs(w).max()
    if radius == 0:
        return False
    return bool(w.min() > 1e-12 * radius)


def assemble_blocks(spec: LagrangianSpec) -> BlockForms:
    """Block matrices with J1 (resp. J2) diagonal and 2*J3 (resp. 2*J4) off-diagonal."""
    j8 = _block_fill(spec.J1, 2.0 * spec.J3, spec.n)
    j9 = _block_fill(spec.J2, 2.0 * spec.J4, spec.n)
    j10 = np.kron(np.eye(spec.n), spec.J5)
    return BlockForms(j8, j9, j10, _positive_definite(j8), _positive_definite(j9))


def transform_affine(spec: LagrangianSpec, A, b) -> LagrangianSpec:
    """Coefficients of the system expressed in hatted variables x_hat = A x + b.

    Quadratic blocks transform by congruence with A^{-1}; the linear terms
    pick up the contributions of the shift b (additive constants dropped).
    Trajectories of the result are A x(t) + b for trajectories x(t) of spec.
    """
    A = _as_matrix(A, spec.d, "A")
    b = _as_vector(b, spec.d, "b")
    if np.linalg.cond(A) >= 1e12:
        raise SingularTransform("transform matrix condition number >= 1e12")
    ainv = np.linalg.inv(A)

    def cong(m):
        return ainv.T @ m @ ainv

    j1, j2, j3, j4, j5 = (cong(getattr(spec, k)) for k in ("J1", "J2", "J3", "J4", "J5"))
    j6 = ainv.T @ spec.J6 - j5.T @ b
    j7 = ainv.T @ spec.J7 - j2 @ b - 2.0 * (spec.n - 1) * (j4 @ b)
    return LagrangianSpec(spec.d, spec.n, j1, j2, j3, j4, j5, j6, j7)


def construct_j4(J1, J2, J3, omega1: float, omega2: float, j4_free: float) -> np.ndarray:
    """Pair-coupling matrix making the single-particle pencil spectrum {±i w1, ±i w2}.

    Only defined for d = 2.  Writes J4 = J2/2 + (J1 - 2 J3) K / 2 and solves
    for K = [[k1, k2], [k3, j4_free]] under trace(K) = w1^2 + w2^2,
    det(K) = w1^2 w2^2 and symmetry of (J1 - 2 J3) K.
    """
    S = np.asarray(J1, dtype=float) - 2.0 * np.asarray(J3, dtype=float)
    J2 = np.asarray(J2, dtype=float)
    if S.shape != (2, 2) or J2.shape != (2, 2):
        raise ValueError("construct_j4 is defined for d = 2 only")
    if abs(np.linalg.det(S)) < 1e-12 * max(1.0, np.abs(S).max() ** 2):
        raise ValueError("J1 - 2*J3 must be invertible")
    if omega1 <= 0 or omega2 <= 0:
        raise ValueError("target frequencies must be positive")

    trace = omega1**2 + omega2**2
    det = (omega1 * omega2) ** 2
    k1 = trace - j4_free
    k4 = j4_free
    excess = k1 * k4 - det  # required product of the off-diagonal entries
    s11, s12, s22 = S[0, 0], S[0, 1], S[1, 1]
    tiny = 1e-13 * max(1.0, np.abs(S).max())

    def _other_offdiagonal(known: float) -> float:
        # recover the partner entry from the determinant constraint
        if abs(known) > tiny:
            return excess / known
        if abs(excess) <= tiny * max(1.0, abs(det)):
            return 0.0
        raise SymmetryInfeasible("symmetry pins one off-diagonal entry to zero "
                                 "but the determinant constraint needs a product")

    if abs(s11) > tiny and abs(s22) > tiny:
        # s22 k3^2 + s12 (k1 - k4) k3 - s11 excess = 0
        disc = (s12 * (k1 - k4)) ** 2 + 4.0 * s22 * s11 * excess
        if disc < 0:
            raise NoRealSolution(
                f"off-diagonal equation has negative discriminant {disc:.3e}"
            )
        k3 = (-s12 * (k1 - k4) + math.sqrt(disc)) / (2.0 * s22)
        k2 = (s12 * (k1 - k4) + s22 * k3) / s11
    elif abs(s22) > tiny:
        # s11 = 0: the symmetry constraint pins k3 directly
        k3 = -s12 * (k1 - k4) / s22
        k2 = _other_offdiagonal(k3)
    elif abs(s11) > tiny:
        # s22 = 0: the symmetry constraint pins k2 directly
        k2 = s12 * (k1 - k4) / s11
        k3 = _other_offdiagonal(k2)
    else:
        # S is anti-diagonal: symmetry forces k1 = k4
        if abs(k1 - k4) > 1e-10 * max(1.0, abs(trace)):
            raise SymmetryInfeasible("anti-diagonal J1 - 2*J3 requires equal K diagonal")
        if excess >= 0:
            k2 = k3 = math.sqrt(excess)
        else:
            k2 = math.sqrt(-excess)
            k3 = -k2
    K = np.array([[k1, k2], [k3, k4]])
    j4 = 0.5 * J2 + 0.5 * (S @ K)
    return 0.5 * (j4 + j4.T)
