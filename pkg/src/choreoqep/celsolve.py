"""Pseudo-periodic solutions of the continuous equations of motion.

Solutions are synthesized as u0 + sum_l e^{lam_l t} u_l: the summed variable
x_s carries the nu = n pencil phases, and each particle adds nu = 0 phases on
top of (1/n) x_s.  The homogeneous parts are constrained to sum to zero over
particles, which is resolved by eliminating the last particle's amplitudes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel, pencil
from .model import LagrangianSpec
from .numkernel import RootSet


class AssumptionViolation(Exception):
    """Raised when the standing pencil assumptions fail for a solve."""


class KernelFailure(Exception):
    """Raised when a pencil kernel direction cannot be extracted."""


class SingularBoundarySystem(Exception):
    """Raised when endpoint data does not determine the amplitudes."""


@dataclass(frozen=True)
class ModeExpansion:
    """Finite exponential sum u(t) = u0 + sum_l e^{lam_l t} u_l."""

    u0: np.ndarray
    lambdas: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        u0 = np.asarray(self.u0, dtype=complex).ravel()
        lam = np.asarray(self.lambdas, dtype=complex).ravel()
        vec = np.asarray(self.vectors, dtype=complex)
        if vec.size == 0:
            vec = np.zeros((0, len(u0)), dtype=complex)
        if vec.ndim == 1:
            vec = vec[None, :]
        if vec.shape != (len(lam), len(u0)):
            raise ValueError("vectors must be (K, d) matching lambdas and u0")
        if len(lam) >= 2:
            diff = np.abs(lam[:, None] - lam[None, :])
            if diff[~np.eye(len(lam), dtype=bool)].min() <= 1e-10:
                raise ValueError("mode phases must be pairwise distinct")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "vectors", vec)

    @property
    def d(self) -> int:
        return len(self.u0)

    def value(self, t):
        """Evaluate at scalar or array times; returns (..., d)."""
        t = np.asarray(t, dtype=float)
        if len(self.lambdas) == 0:
            return np.broadcast_to(self.u0, t.shape + (self.d,)).copy()
        phases = np.exp(t[..., None] * self.lambdas)
        return self.u0 + phases @ self.vectors

    __call__ = value

    def derivative(self, t, order: int = 1):
        """Exact derivative of the expansion (order >= 1 drops u0)."""
        t = np.asarray(t, dtype=float)
        if len(self.lambdas) == 0:
            return np.zeros(t.shape + (self.d,), dtype=complex)
        phases = np.exp(t[..., None] * self.lambdas) * self.lambdas**order
        return phases @ self.vectors


@dataclass(frozen=True)
class SystemSolution:
    """One expansion for the particle sum and one per particle."""

    xs: ModeExpansion
    particles: tuple

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))

    @property
    def n(self) -> int:
        return len(self.particles)

    def sum_mismatch(self, times=None) -> float:
        """max_t |sum_j x_j(t) - x_s(t)| / scale over 32 fixed pseudo-random times."""
        if times is None:
            times = np.random.default_rng(20240913).uniform(-3.0, 3.0, size=32)
        total = sum(p.value(times) for p in self.particles)
        ref = self.xs.value(times)
        scale = max(1.0, float(np.abs(ref).max()))
        return float(np.abs(total - ref).max()) / scale


def _mode_basis(p: pencil.ClassicalPencil, roots: RootSet) -> np.ndarray:
    """Unit kernel direction of the pencil at every root (rows)."""
    try:
        return np.array([numkernel.kernel_vector(pencil.classical_eval(p, lam))
                         for lam in roots.roots])
    except (numkernel.NotRankDeficient, numkernel.KernelNotOneDimensional) as exc:
        raise KernelFailure(str(exc)) from exc


def _require_cel_assumptions(spec: LagrangianSpec, n: int) -> pencil.CelAssumptions:
    try:
        rep = pencil.check_cel_assumptions(spec, n)
    except (pencil.LeadingSingular, numkernel.NumericalFailure) as exc:
        raise AssumptionViolation(str(exc)) from exc
    if n == 1:
        # single particle: the nu=0 modes are eliminated by the sum constraint,
        # so only the x_s pencil conditions matter
        if not (rep.count_n_ok and rep.det_pn0_nonzero):
            raise AssumptionViolation("x_s pencil assumptions fail for n = 1")
        return rep
    if not rep.all_hold:
        raise AssumptionViolation(
            f"pencil assumptions fail: counts ({rep.count_n_ok}, {rep.count_0_ok}), "
            f"disjoint {rep.disjoint}, det at 0 ({rep.det_pn0_nonzero}, {rep.det_p00_nonzero})")
    return rep


def _xs_constant(spec: LagrangianSpec, n: int, pn: pencil.ClassicalPencil) -> np.ndarray:
    res = numkernel.solve_square(pencil.classical_eval(pn, 0.0), spec.J7)
    return n * res.x


def general_solution_cel(spec: LagrangianSpec, n: int, xs_amplitudes,
                         particle_amplitudes=None) -> SystemSolution:
    """Assemble the solution with the given complex amplitude per mode.

    xs_amplitudes has one entry per nu=n root (sorted order);
    particle_amplitudes is (n-1, 2d) over nu=0 roots, the last particle's
    homogeneous amplitudes being fixed by the zero-sum constraint.
    """
    rep = _require_cel_assumptions(spec, n)
    pn = pencil.classical_pencil(spec, n)
    p0 = pencil.classical_pencil(spec, 0)
    q_n, q_0 = rep.q_n, rep.q_0

    xs_amplitudes = np.asarray(xs_amplitudes, dtype=complex).ravel()
    if len(xs_amplitudes) != len(q_n):
        raise ValueError(f"expected {len(q_n)} x_s amplitudes")
    if particle_amplitudes is None:
        particle_amplitudes = np.zeros((max(n - 1, 0), len(q_0)), dtype=complex)
    particle_amplitudes = np.asarray(particle_amplitudes, dtype=complex)
    if particle_amplitudes.shape != (n - 1, len(q_0)):
        raise ValueError(f"expected ({n - 1}, {len(q_0)}) particle amplitudes")

    w_n = _mode_basis(pn, q_n)
    xs0 = _xs_constant(spec, n, pn)
    xs = ModeExpansion(xs0, q_n.roots, xs_amplitudes[:, None] * w_n)

    shared = xs_amplitudes[:, None] * w_n / n
    if n == 1:
        # the zero-sum constraint kills all nu=0 modes: x_1 = x_s exactly
        return SystemSolution(xs, (ModeExpansion(xs0, q_n.roots, shared),))

    w_0 = _mode_basis(p0, q_0)
    coeffs = np.vstack([particle_amplitudes,
                        -particle_amplitudes.sum(axis=0)[None, :]])
    particles = []
    for j in range(n):
        extras = coeffs[j][:, None] * w_0
        particles.append(ModeExpansion(
            xs0 / n,
            np.concatenate([q_n.roots, q_0.roots]),
            np.vstack([shared, extras])))
    return SystemSolution(xs, tuple(particles))


@dataclass(frozen=True)
class DirichletReport:
    """Condition numbers of the uncoupled endpoint systems."""

    xs_cond: float
    particle_conds: tuple


def _endpoint_solve(roots: np.ndarray, basis: np.ndarray, t0: float, tf: float,
                    rhs0: np.ndarray, rhsf: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve for amplitudes from values at the two endpoints."""
    # rows: d components at t0 then d at tf; one column per mode
    cols0 = np.exp(roots * t0)[:, None] * basis
    colsf = np.exp(roots * tf)[:, None] * basis
    mat = np.vstack([cols0.T, colsf.T])
    rhs = np.concatenate([rhs0, rhsf])
    try:
        res = numkernel.solve_square(mat, rhs)
    except numkernel.Singular as exc:
        raise SingularBoundarySystem(str(exc)) from exc
    return res.x, res.cond


def dirichlet_cel(spec: LagrangianSpec, n: int, t0: float, tf: float,
                  x_t0, x_tf) -> tuple[SystemSolution, DirichletReport]:
    """Solve the two-point boundary problem from positions at t0 and tf.

    x_t0 and x_tf hold one row per particle.  The solve decouples into one
    square system for the summed variable and one per particle.
    """
    rep = _require_cel_assumptions(spec, n)
    pn = pencil.classical_pencil(spec, n)
    p0 = pencil.classical_pencil(spec, 0)
    q_n, q_0 = rep.q_n, rep.q_0

    x_t0 = np.asarray(x_t0, dtype=complex).reshape(n, spec.d)
    x_tf = np.asarray(x_tf, dtype=complex).reshape(n, spec.d)
    xs0 = _xs_constant(spec, n, pn)
    w_n = _mode_basis(pn, q_n)

    amps_xs, cond_xs = _endpoint_solve(
        q_n.roots, w_n, t0, tf,
        x_t0.sum(axis=0) - xs0, x_tf.sum(axis=0) - xs0)
    xs = ModeExpansion(xs0, q_n.roots, amps_xs[:, None] * w_n)

    particle_amps = np.zeros((max(n - 1, 0), len(q_0)), dtype=complex)
    conds = []
    if n > 1:
        w_0 = _mode_basis(p0, q_0)
        xs_at0 = xs.value(t0)
        xs_atf = xs.value(tf)
        for j in range(n - 1):
            amps_j, cond_j = _endpoint_solve(
                q_0.roots, w_0, t0, tf,
                x_t0[j] - xs_at0 / n, x_tf[j] - xs_atf / n)
            particle_amps[j] = amps_j
            conds.append(cond_j)
    sol = general_solution_cel(spec, n, amps_xs, particle_amps)
    return sol, DirichletReport(cond_xs, tuple(conds))


@dataclass(frozen=True)
class CelResidual:
    """Left-minus-right of the equations of motion at one time."""

    xs: np.ndarray
    particles: np.ndarray


def residual_cel(spec: LagrangianSpec, n: int, sol: SystemSolution,
                 t: float) -> CelResidual:
    """Exact residuals of the summed and per-particle equations at time t.

    Uses analytic derivatives of the expansions.  For the summed variable the
    equation is A_n x_s'' - 2 J5 x_s' - C_n x_s = n J7; for each particle
    A_0 x_j'' - 2 J5 x_j' - C_0 x_j = -2 J3 x_s'' + 2 J4 x_s + J7.
    """
    a_n, c_n = pencil.coefficient_matrices(spec, n)
    a_0, c_0 = pencil.coefficient_matrices(spec, 0)
    xs = sol.xs.value(t)
    dxs = sol.xs.derivative(t, 1)
    ddxs = sol.xs.derivative(t, 2)
    r_xs = a_n @ ddxs - 2.0 * spec.J5 @ dxs - c_n @ xs - n * spec.J7
    rhs = -2.0 * spec.J3 @ ddxs + 2.0 * spec.J4 @ xs + spec.J7
    rows = []
    for p in sol.particles:
        x = p.value(t)
        dx = p.derivative(t, 1)
        ddx = p.derivative(t, 2)
        rows.append(a_0 @ ddx - 2.0 * spec.J5 @ dx - c_0 @ x - rhs)
    return CelResidual(r_xs, np.array(rows))
