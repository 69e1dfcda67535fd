"""Pseudo-periodic solutions of the discrete equations of motion.

Discrete solutions live on the uniform grid t0 + m*eps and are exact there;
the same exponential expansions extend them off-grid.  The governing
recurrences only hold where every window factor equals one, i.e. for
t in [t0 + 2N eps, tf - 2N eps]; residuals outside that window are
generically nonzero and document the boundary layer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel, pencil, scaleop
from .celsolve import AssumptionViolation, KernelFailure, ModeExpansion, \
    SingularBoundarySystem
from .model import LagrangianSpec
from .scaleop import GridFunction, OutOfRange, ScaleOperator


class LeadingBlockSingular(Exception):
    """Raised when the most-advanced recurrence block cannot be inverted."""


class WindowExceeded(Exception):
    """Raised when marching would need nodes outside the valid window."""


@dataclass(frozen=True)
class TrajectoryGrid:
    """Grid samples of all particles: values[j, m] is particle j at node m."""

    t0: float
    epsilon: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3:
            raise ValueError("values must be (n, M+1, d)")
        if not np.all(np.isfinite(v)):
            raise ValueError("trajectory has non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def M(self) -> int:
        return self.values.shape[1] - 1

    @property
    def d(self) -> int:
        return self.values.shape[2]

    def times(self) -> np.ndarray:
        return self.t0 + self.epsilon * np.arange(self.M + 1)


@dataclass(frozen=True)
class DelSolution:
    """Discrete solution: summed expansion, per-particle expansions, operator."""

    xs: ModeExpansion
    particles: tuple
    op: ScaleOperator
    t0: float
    tf: float

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))

    @property
    def n(self) -> int:
        return len(self.particles)

    @property
    def M(self) -> int:
        return int(round((self.tf - self.t0) / self.op.epsilon))

    @property
    def window(self) -> tuple[float, float]:
        w = 2 * self.op.N * self.op.epsilon
        return (self.t0 + w, self.tf - w)

    def interior_nodes(self) -> range:
        return range(2 * self.op.N, self.M - 2 * self.op.N + 1)

    def sample(self) -> tuple[TrajectoryGrid, np.ndarray]:
        """Evaluate on the grid; returns (particle grid, summed values)."""
        times = self.t0 + self.op.epsilon * np.arange(self.M + 1)
        vals = np.array([p.value(times) for p in self.particles])
        return TrajectoryGrid(self.t0, self.op.epsilon, vals), self.xs.value(times)

    def sum_mismatch(self, times=None) -> float:
        if times is None:
            times = np.random.default_rng(20240913).uniform(self.t0, self.tf, size=32)
        total = sum(p.value(times) for p in self.particles)
        ref = self.xs.value(times)
        scale = max(1.0, float(np.abs(ref).max()))
        return float(np.abs(total - ref).max()) / scale


def _require_del_assumptions(spec: LagrangianSpec, op: ScaleOperator,
                             n: int) -> pencil.DelAssumptions:
    rep = pencil.check_del_assumptions(spec, op, n)
    if not rep.precondition_ok:
        raise AssumptionViolation(f"discrete pencil precondition fails: {rep.note}")
    if n == 1:
        if not (rep.count_n_ok and rep.det_pn0_nonzero):
            raise AssumptionViolation("summed-variable pencil assumptions fail for n = 1")
        return rep
    if not rep.all_hold:
        raise AssumptionViolation(
            f"discrete pencil assumptions fail: counts ({rep.count_n_ok}, {rep.count_0_ok}), "
            f"disjoint {rep.disjoint}, det at 0 ({rep.det_pn0_nonzero}, {rep.det_p00_nonzero})")
    return rep


def _kernel_basis(p: pencil.TranscendentalPencil,
                  zeta_roots: np.ndarray) -> np.ndarray:
    try:
        return np.array([numkernel.kernel_vector(pencil.transcendental_eval(p, z))
                         for z in zeta_roots])
    except (numkernel.NotRankDeficient, numkernel.KernelNotOneDimensional) as exc:
        raise KernelFailure(str(exc)) from exc


def _xs_constant_del(spec: LagrangianSpec, op: ScaleOperator, n: int) -> np.ndarray:
    p_n = pencil.transcendental_pencil(spec, op, n)
    sbar0 = complex(op.gamma.sum()) / op.epsilon  # interior value of the adjoint on 1
    rhs = spec.J7 + sbar0 * spec.J6
    return n * numkernel.solve_square(pencil.transcendental_eval(p_n, 1.0), rhs).x


def _assemble(spec: LagrangianSpec, op: ScaleOperator, n: int,
              rep: pencil.DelAssumptions, xs_amplitudes, particle_amplitudes,
              t0: float, M: int) -> DelSolution:
    if M < 4 * op.N:
        raise WindowExceeded(f"M = {M} leaves no interior window (need M >= 4N)")
    sp_n, sp_0 = rep.spectrum_n, rep.spectrum_0
    xs_amplitudes = np.asarray(xs_amplitudes, dtype=complex).ravel()
    if len(xs_amplitudes) != len(sp_n.lam):
        raise ValueError(f"expected {len(sp_n.lam)} summed-variable amplitudes")

    p_n = pencil.transcendental_pencil(spec, op, n)
    w_n = _kernel_basis(p_n, sp_n.zeta.roots)
    xs0 = _xs_constant_del(spec, op, n)
    xs = ModeExpansion(xs0, sp_n.lam.roots, xs_amplitudes[:, None] * w_n)
    tf = t0 + M * op.epsilon

    shared = xs_amplitudes[:, None] * w_n / n
    if n == 1:
        return DelSolution(xs, (ModeExpansion(xs0, sp_n.lam.roots, shared),),
                           op, t0, tf)

    if particle_amplitudes is None:
        particle_amplitudes = np.zeros((n - 1, len(sp_0.lam)), dtype=complex)
    particle_amplitudes = np.asarray(particle_amplitudes, dtype=complex)
    if particle_amplitudes.shape != (n - 1, len(sp_0.lam)):
        raise ValueError(f"expected ({n - 1}, {len(sp_0.lam)}) particle amplitudes")
    p_0 = pencil.transcendental_pencil(spec, op, 0)
    w_0 = _kernel_basis(p_0, sp_0.zeta.roots)
    coeffs = np.vstack([particle_amplitudes, -particle_amplitudes.sum(axis=0)[None, :]])
    particles = []
    for j in range(n):
        particles.append(ModeExpansion(
            xs0 / n,
            np.concatenate([sp_n.lam.roots, sp_0.lam.roots]),
            np.vstack([shared, coeffs[j][:, None] * w_0])))
    return DelSolution(xs, tuple(particles), op, t0, tf)


def general_solution_del(spec: LagrangianSpec, op: ScaleOperator, n: int,
                         xs_amplitudes, particle_amplitudes=None,
                         t0: float = 0.0, M: int = None) -> DelSolution:
    """Assemble the discrete solution from per-mode amplitudes.

    Amplitude layout mirrors the continuous solver: one entry per sorted
    discrete phase, the last particle's homogeneous amplitudes resolved by
    the zero-sum constraint.
    """
    if M is None:
        raise ValueError("M (node count) is required")
    rep = _require_del_assumptions(spec, op, n)
    return _assemble(spec, op, n, rep, xs_amplitudes, particle_amplitudes, t0, M)


@dataclass(frozen=True)
class DelDirichletReport:
    xs_cond: float
    particle_conds: tuple


def _window_solve(roots: np.ndarray, basis: np.ndarray, times: np.ndarray,
                  rhs: np.ndarray) -> tuple[np.ndarray, float]:
    """Amplitudes from values at the end-window nodes (rhs is (len(times), d))."""
    E = np.exp(np.outer(times, roots))  # (T, K)
    mat = (E[:, :, None] * basis[None, :, :]).transpose(0, 2, 1).reshape(-1, len(roots))
    try:
        res = numkernel.solve_square(mat, rhs.reshape(-1))
    except numkernel.Singular as exc:
        raise SingularBoundarySystem(str(exc)) from exc
    return res.x, res.cond


def dirichlet_del(spec: LagrangianSpec, op: ScaleOperator, n: int, t0: float,
                  M: int, head, tail) -> tuple[DelSolution, DelDirichletReport]:
    """Solve from positions at the first 2N and last 2N grid nodes.

    head and tail are (n, 2N, d) arrays; together they supply 4Nd scalar
    constraints per uncoupled system, matching the 4Nd amplitudes.
    """
    N = op.N
    rep = _require_del_assumptions(spec, op, n)
    if M < 4 * N:
        raise WindowExceeded(f"M = {M} leaves no interior window (need M >= 4N)")
    head = np.asarray(head, dtype=complex).reshape(n, 2 * N, spec.d)
    tail = np.asarray(tail, dtype=complex).reshape(n, 2 * N, spec.d)
    nodes = np.concatenate([np.arange(2 * N), np.arange(M - 2 * N + 1, M + 1)])
    times = t0 + op.epsilon * nodes
    data = np.concatenate([head, tail], axis=1)  # (n, 4N, d)

    sp_n = rep.spectrum_n
    p_n = pencil.transcendental_pencil(spec, op, n)
    w_n = _kernel_basis(p_n, sp_n.zeta.roots)
    xs0 = _xs_constant_del(spec, op, n)
    amps_xs, cond_xs = _window_solve(sp_n.lam.roots, w_n, times,
                                     data.sum(axis=0) - xs0)
    xs = ModeExpansion(xs0, sp_n.lam.roots, amps_xs[:, None] * w_n)

    particle_amps = None
    conds = []
    if n > 1:
        sp_0 = rep.spectrum_0
        p_0 = pencil.transcendental_pencil(spec, op, 0)
        w_0 = _kernel_basis(p_0, sp_0.zeta.roots)
        xs_at = xs.value(times)  # (4N, d)
        particle_amps = np.zeros((n - 1, len(sp_0.lam)), dtype=complex)
        for j in range(n - 1):
            amps_j, cond_j = _window_solve(sp_0.lam.roots, w_0, times,
                                           data[j] - xs_at / n)
            particle_amps[j] = amps_j
            conds.append(cond_j)
    sol = _assemble(spec, op, n, rep, amps_xs, particle_amps, t0, M)
    return sol, DelDirichletReport(cond_xs, tuple(conds))


def _stencil_matrices(spec: LagrangianSpec, op: ScaleOperator,
                      nu: float) -> list[np.ndarray]:
    """Interior-window coefficient of x(t + k eps) for k = -2N..2N."""
    a_nu, c_nu = pencil.coefficient_matrices(spec, nu)
    g = scaleop.theta_coefficients(op)
    a1 = scaleop.sigma1_coefficients(op)
    eps = op.epsilon
    N = op.N
    mats = []
    for k in range(-2 * N, 2 * N + 1):
        m = (g[k + 2 * N] / eps**2) * a_nu.astype(complex)
        if abs(k) <= N:
            m = m + (a1[k + N] / eps) * spec.J5
        if k == 0:
            m = m + c_nu
        mats.append(m)
    return mats


def recurrence_march(spec: LagrangianSpec, op: ScaleOperator, n: int,
                     xs_seed, particle_seeds, M: int,
                     t0: float = 0.0) -> tuple[TrajectoryGrid, np.ndarray]:
    """March the interior-window recurrences forward from 4N seed nodes.

    xs_seed is (4N, d) and particle_seeds (n, 4N, d), holding nodes 0..4N-1.
    The summed variable marches first, then each particle with it as source.
    Marching uses only equations centered in the interior window, so nodes
    4N..M are produced; an M < 4N grid has no such window.
    """
    N = op.N
    d = spec.d
    eps = op.epsilon
    if M < 4 * N:
        raise WindowExceeded(f"M = {M} < 4N = {4 * N}: no interior equations")
    xs_seed = np.asarray(xs_seed, dtype=complex).reshape(4 * N, d)
    particle_seeds = np.asarray(particle_seeds, dtype=complex).reshape(n, 4 * N, d)

    g = scaleop.theta_coefficients(op)
    mats_n = _stencil_matrices(spec, op, n)
    mats_0 = _stencil_matrices(spec, op, 0)
    sbar0 = complex(op.gamma.sum()) / eps
    const_n = n * (sbar0 * spec.J6 + spec.J7)
    src_const = sbar0 * spec.J6 + spec.J7

    def _factor(lead):
        try:
            return numkernel.solve_square(lead, np.eye(d, dtype=complex)).x
        except numkernel.Singular as exc:
            raise LeadingBlockSingular(str(exc)) from exc

    inv_n = _factor(mats_n[-1])
    inv_0 = _factor(mats_0[-1])

    xs = np.zeros((M + 1, d), dtype=complex)
    xs[:4 * N] = xs_seed
    for c in range(2 * N, M - 2 * N + 1):
        rhs = const_n.astype(complex).copy()
        for k in range(-2 * N, 2 * N):
            rhs += mats_n[k + 2 * N] @ xs[c + k]
        xs[c + 2 * N] = -(inv_n @ rhs)

    traj = np.zeros((n, M + 1, d), dtype=complex)
    traj[:, :4 * N] = particle_seeds
    for j in range(n):
        for c in range(2 * N, M - 2 * N + 1):
            boxbox_xs = np.zeros(d, dtype=complex)
            for k in range(-2 * N, 2 * N + 1):
                boxbox_xs += (g[k + 2 * N] / eps**2) * xs[c + k]
            rhs = (2.0 * spec.J3 @ boxbox_xs + 2.0 * spec.J4 @ xs[c] + src_const) \
                .astype(complex)
            for k in range(-2 * N, 2 * N):
                rhs += mats_0[k + 2 * N] @ traj[j, c + k]
            traj[j, c + 2 * N] = -(inv_0 @ rhs)
    return TrajectoryGrid(t0, eps, traj), xs


@dataclass(frozen=True)
class DelResidual:
    """Left-minus-right of the discrete equations at one node."""

    xs: np.ndarray
    particles: np.ndarray


def _grid_arrays(traj, xs_values) -> tuple[np.ndarray, np.ndarray, float, float, float]:
    if isinstance(traj, DelSolution):
        grid, xs_vals = traj.sample()
        return grid.values, xs_vals, grid.t0, grid.t0 + grid.M * grid.epsilon, grid.epsilon
    if xs_values is None:
        raise ValueError("xs_values is required alongside a TrajectoryGrid")
    tf = traj.t0 + traj.M * traj.epsilon
    return traj.values, np.asarray(xs_values, dtype=complex), traj.t0, tf, traj.epsilon


def residual_del(spec: LagrangianSpec, op: ScaleOperator, n: int, traj, m: int,
                 xs_values=None) -> DelResidual:
    """Exact windowed residuals of the discrete equations at node m.

    Evaluates the governing recurrences with their true window factors, so it
    is meaningful near the interval ends, where pseudo-periodic extensions
    generically fail to solve the equations.
    """
    vals, xs_vals, t0, tf, eps = _grid_arrays(traj, xs_values)
    M = vals.shape[1] - 1
    if m < 0 or m > M:
        raise OutOfRange(f"node {m} outside 0..{M}")

    a_n, c_n = pencil.coefficient_matrices(spec, n)
    a_0, c_0 = pencil.coefficient_matrices(spec, 0)
    xs_grid = GridFunction(t0, eps, xs_vals)

    bb_xs = scaleop.boxbox_apply(op, xs_grid, m, t0, tf)
    sg_xs = scaleop.box_apply(op, xs_grid, m, t0, tf) \
        - scaleop.adjoint_box_apply(op, xs_grid, m, t0, tf)
    box1 = sum(op.gamma_at(j) / eps * scaleop.chi(op, j, t0 + m * eps, t0, tf)
               for j in range(-op.N, op.N + 1))

    r_xs = (-a_n @ bb_xs - spec.J5 @ sg_xs - c_n @ xs_vals[m]
            - n * (box1 * spec.J6 + spec.J7))
    source = 2.0 * spec.J3 @ bb_xs + 2.0 * spec.J4 @ xs_vals[m] \
        + box1 * spec.J6 + spec.J7
    rows = []
    for j in range(vals.shape[0]):
        f = GridFunction(t0, eps, vals[j])
        bb = scaleop.boxbox_apply(op, f, m, t0, tf)
        sg = scaleop.box_apply(op, f, m, t0, tf) \
            - scaleop.adjoint_box_apply(op, f, m, t0, tf)
        rows.append(-a_0 @ bb - spec.J5 @ sg - c_0 @ vals[j, m] - source)
    return DelResidual(r_xs, np.array(rows))
