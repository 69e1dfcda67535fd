"""Command-line front end: JSON configs in, CSV/SVG artifacts out.

Subcommands: validate, spectrum, solve, error-surface, converge, choreo.
Exit codes: 0 success, 2 config error, 3 assumption violation, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import celsolve, convergence, delsolve, model, numkernel, pencil, \
    periodic, scaleop
from .model import LagrangianSpec
from .scaleop import ScaleOperator


class ConfigParse(Exception):
    """Raised when the configuration file cannot be interpreted."""


class DimensionMismatch(Exception):
    """Raised when config fields disagree about dimensions."""


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSUMPTION = 3
EXIT_NUMERICAL = 4

_ASSUMPTION_ERRORS = (celsolve.AssumptionViolation, periodic.NotChoreographic,
                      periodic.DelayResonant, pencil.LeadingSingular,
                      pencil.DegenerateRoots)
_NUMERICAL_ERRORS = (numkernel.NumericalFailure, numkernel.Singular,
                     numkernel.InterpolationInconsistent,
                     numkernel.NotRankDeficient, numkernel.KernelNotOneDimensional,
                     celsolve.KernelFailure, celsolve.SingularBoundarySystem,
                     delsolve.LeadingBlockSingular, delsolve.WindowExceeded,
                     scaleop.OutOfRange, model.NoRealSolution,
                     model.SymmetryInfeasible, model.SingularTransform,
                     convergence.EmptySet)


def _matrix(raw, d: int, name: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.shape == (d * d,):
        arr = arr.reshape(d, d)  # row-major flat form
    if arr.shape != (d, d):
        raise DimensionMismatch(f"{name} must be {d}x{d} (or flat length {d * d})")
    return arr


def _vector(raw, d: int, name: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=float).ravel()
    if arr.shape != (d,):
        raise DimensionMismatch(f"{name} must have length {d}")
    return arr


def _complex_block(block: dict, name: str, shape: tuple) -> np.ndarray:
    """Read name / name_re / name_im fields into a complex array of shape."""
    re = block.get(f"{name}_re", block.get(name))
    if re is None:
        raise ConfigParse(f"missing field {name}")
    out = np.asarray(re, dtype=float).astype(complex)
    im = block.get(f"{name}_im")
    if im is not None:
        out = out + 1j * np.asarray(im, dtype=float)
    if out.shape != shape:
        raise DimensionMismatch(f"{name} must have shape {shape}, got {out.shape}")
    return out


@dataclass
class ExperimentConfig:
    """Parsed configuration: system, operator, grid, and optional data blocks."""

    spec: LagrangianSpec
    t0: float
    tf: float
    M: int
    operator_raw: dict
    targets: dict | None = None
    boundary: dict | None = None
    amplitudes: dict | None = None
    choreo: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    @property
    def epsilon(self) -> float:
        return (self.tf - self.t0) / self.M

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def d(self) -> int:
        return self.spec.d

    def operator(self, epsilon: float = None) -> ScaleOperator:
        return _build_operator(self.operator_raw, self.epsilon if epsilon is None
                               else epsilon)

    def operator_family(self):
        return lambda eps: _build_operator(self.operator_raw, eps)


def _build_operator(raw: dict, epsilon: float) -> ScaleOperator:
    family = raw.get("family")
    if family == "k_family":
        return scaleop.k_family(epsilon, float(raw.get("k", 0.0)))
    if family == "central":
        return scaleop.central_difference(epsilon)
    if family is not None:
        raise ConfigParse(f"unknown operator family {family!r}")
    if "N" not in raw or "gamma_re" not in raw:
        raise ConfigParse("operator needs a family or N with gamma_re/gamma_im")
    N = int(raw["N"])
    gamma = np.asarray(raw["gamma_re"], dtype=float).astype(complex)
    if "gamma_im" in raw:
        gamma = gamma + 1j * np.asarray(raw["gamma_im"], dtype=float)
    if gamma.shape != (2 * N + 1,):
        raise DimensionMismatch(f"gamma must have length 2N+1 = {2 * N + 1}")
    return ScaleOperator(gamma, epsilon)


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    try:
        d = int(raw["d"])
        n = int(raw["n"])
        time = raw["time"]
        t0 = float(time["t0"])
        tf = float(time["tf"])
        M = int(time["M"])
        op_raw = dict(raw["operator"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParse(f"missing or malformed required field: {exc}") from exc
    if not tf > t0:
        raise ConfigParse("time block needs tf > t0")
    if M < 1:
        raise ConfigParse("time block needs M >= 1")

    try:
        j1 = _matrix(raw["J1"], d, "J1")
        j2 = _matrix(raw["J2"], d, "J2")
        j3 = _matrix(raw.get("J3", np.zeros(d * d)), d, "J3")
    except KeyError as exc:
        raise ConfigParse(f"missing matrix {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigParse(f"malformed matrix: {exc}") from exc

    targets = raw.get("targets")
    if "J4" in raw:
        j4 = _matrix(raw["J4"], d, "J4")
    elif targets is not None and d == 2 and "j4_free" in targets:
        omega = [float(w) for w in targets["omega"]]
        if len(omega) != 2:
            raise DimensionMismatch("targets.omega must list 2 frequencies for d = 2")
        j4 = model.construct_j4(j1, j2, j3, omega[0], omega[1],
                                float(targets["j4_free"]))
    else:
        raise ConfigParse("J4 must be given directly, or via targets with "
                          "j4_free for d = 2")
    j5 = _matrix(raw.get("J5", np.zeros(d * d)), d, "J5")
    j6 = _vector(raw.get("J6", np.zeros(d)), d, "J6")
    j7 = _vector(raw.get("J7", np.zeros(d)), d, "J7")
    try:
        spec = LagrangianSpec(d, n, j1, j2, j3, j4, j5, j6, j7)
    except ValueError as exc:
        raise ConfigParse(str(exc)) from exc

    cfg = ExperimentConfig(spec, t0, tf, M, op_raw, targets,
                           raw.get("boundary"), raw.get("amplitudes"),
                           raw.get("choreo", {}), raw.get("sweep", {}))
    cfg.operator()  # fail fast on malformed operator blocks
    return cfg


# ---------------------------------------------------------------------------
# artifact writers


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float, np.floating))
                              else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd",
            "#ff7f0e", "#8c564b", "#17becf", "#e377c2"]


def write_svg(path, traj: np.ndarray, times: np.ndarray = None) -> None:
    """One polyline per particle over the first two coordinates (real parts).

    For d = 1 the abscissa is time.  The viewBox is autoscaled to the data
    with a 1% margin; output bytes are deterministic for fixed input.
    """
    traj = np.asarray(traj)
    n, count, d = traj.shape
    if d >= 2:
        xs = traj[:, :, 0].real
        ys = -traj[:, :, 1].real  # svg y grows downward
    else:
        if times is None:
            times = np.arange(count, dtype=float)
        xs = np.broadcast_to(times, (n, count))
        ys = -traj[:, :, 0].real
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    w = (x1 - x0) or 1.0
    h = (y1 - y0) or 1.0
    mx, my = 0.01 * w, 0.01 * h
    stroke = 0.004 * max(w, h)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{x0 - mx:.6g} {y0 - my:.6g} {w + 2 * mx:.6g} {h + 2 * my:.6g}">',
    ]
    for j in range(n):
        pts = " ".join(f"{xs[j, m]:.6g},{ys[j, m]:.6g}" for m in range(count))
        color = _PALETTE[j % len(_PALETTE)]
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="{stroke:.6g}" points="{pts}"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", newline="\n")


def _trajectory_rows(times: np.ndarray, values: np.ndarray):
    """Rows (t, particle, c0_re, c0_im, ..., c{d-1}_re, c{d-1}_im)."""
    n, count, d = values.shape
    for m in range(count):
        for j in range(n):
            row = [times[m], j]
            for c in range(d):
                row.extend([values[j, m, c].real, values[j, m, c].imag])
            yield row


def _traj_header(d: int) -> list[str]:
    cols = ["t", "particle"]
    for c in range(d):
        cols.extend([f"c{c}_re", f"c{c}_im"])
    return cols


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of the trajectory CSV writer; returns (times, values (n,M+1,d))."""
    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    d = (len(header) - 2) // 2
    cells = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    n = int(cells[:, 1].max()) + 1
    count = len(cells) // n
    times = cells[::n, 0]
    values = np.zeros((n, count, d), dtype=complex)
    for idx, row in enumerate(cells):
        m, j = idx // n, int(row[1])
        values[j, m] = row[2::2] + 1j * row[3::2]
    return times, values


# ---------------------------------------------------------------------------
# solution assembly helpers


def _sample_times(cfg: ExperimentConfig) -> np.ndarray:
    return cfg.t0 + cfg.epsilon * np.arange(cfg.M + 1)


def _parse_amplitudes(block: dict, size_xs: int, n: int, size_p: int, seed: int):
    if block.get("random"):
        rng = np.random.default_rng(seed)
        scale = float(block.get("scale", 1.0))
        xs = scale * (rng.standard_normal(size_xs) + 1j * rng.standard_normal(size_xs))
        ps = scale * (rng.standard_normal((max(n - 1, 0), size_p))
                      + 1j * rng.standard_normal((max(n - 1, 0), size_p)))
        return xs, ps
    xs = _complex_block(block, "xs", (size_xs,))
    if "particles_re" in block or "particles" in block:
        ps = _complex_block(block, "particles", (n - 1, size_p))
    else:
        ps = np.zeros((max(n - 1, 0), size_p), dtype=complex)
    return xs, ps


def _cel_solution(cfg: ExperimentConfig, seed: int) -> celsolve.SystemSolution:
    spec, n = cfg.spec, cfg.n
    if cfg.boundary and "x_t0" in cfg.boundary or cfg.boundary and "x_t0_re" in cfg.boundary:
        x0 = _complex_block(cfg.boundary, "x_t0", (n, spec.d))
        xf = _complex_block(cfg.boundary, "x_tf", (n, spec.d))
        sol, _ = celsolve.dirichlet_cel(spec, n, cfg.t0, cfg.tf, x0, xf)
        return sol
    if cfg.amplitudes:
        xs, ps = _parse_amplitudes(cfg.amplitudes, 2 * spec.d, n, 2 * spec.d, seed)
        return celsolve.general_solution_cel(spec, n, xs, ps)
    raise ConfigParse("solve needs a boundary or amplitudes block")


def _matched_del_data(cfg: ExperimentConfig, op: ScaleOperator,
                      cel: celsolve.SystemSolution):
    """DEL end-window data sampled from the continuous solution."""
    N = op.N
    head_t = cfg.t0 + op.epsilon * np.arange(2 * N)
    tail_t = cfg.t0 + op.epsilon * np.arange(cfg.M - 2 * N + 1, cfg.M + 1)
    head = np.array([p.value(head_t) for p in cel.particles])
    tail = np.array([p.value(tail_t) for p in cel.particles])
    return head, tail


def _del_solution(cfg: ExperimentConfig, seed: int) -> delsolve.DelSolution:
    spec, n, op = cfg.spec, cfg.n, cfg.operator()
    N = op.N
    if cfg.boundary and "head" in cfg.boundary or cfg.boundary and "head_re" in cfg.boundary:
        head = _complex_block(cfg.boundary, "head", (n, 2 * N, spec.d))
        tail = _complex_block(cfg.boundary, "tail", (n, 2 * N, spec.d))
        sol, _ = delsolve.dirichlet_del(spec, op, n, cfg.t0, cfg.M, head, tail)
        return sol
    if cfg.boundary:  # two-point boundary: match the continuous solution
        cel = _cel_solution(cfg, seed)
        head, tail = _matched_del_data(cfg, op, cel)
        sol, _ = delsolve.dirichlet_del(spec, op, n, cfg.t0, cfg.M, head, tail)
        return sol
    if cfg.amplitudes:
        size = 4 * N * spec.d
        xs, ps = _parse_amplitudes(cfg.amplitudes, size, n, size, seed)
        return delsolve.general_solution_del(spec, op, n, xs, ps, cfg.t0, cfg.M)
    raise ConfigParse("solve needs a boundary or amplitudes block")


def _window_error(cfg: ExperimentConfig, op: ScaleOperator,
                  cel: celsolve.SystemSolution) -> float:
    """Euclidean norm of (continuous - discrete) over the window nodes."""
    head, tail = _matched_del_data(cfg, op, cel)
    sol, _ = delsolve.dirichlet_del(cfg.spec, op, cfg.n, cfg.t0, cfg.M, head, tail)
    N = op.N
    nodes = np.arange(2 * N, cfg.M - 2 * N + 1)
    times = cfg.t0 + op.epsilon * nodes
    diff = np.array([p.value(times) for p in cel.particles]) \
        - np.array([p.value(times) for p in sol.particles])
    return float(np.linalg.norm(diff.ravel()))


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(cfg: ExperimentConfig, out_dir: Path) -> dict:
    spec, n = cfg.spec, cfg.n
    op = cfg.operator()
    report: dict = {}
    report["violations"] = [str(v) for v in model.validate_spec(spec)]
    conds = scaleop.check_operator_conditions(op)
    report["operator_conditions"] = {"sum_zero": conds.sum_zero,
                                     "derivative_normalized": conds.derivative_normalized}
    cel = pencil.check_cel_assumptions(spec, n)
    report["cel_assumptions"] = cel.all_hold
    del_rep = pencil.check_del_assumptions(spec, op, n)
    report["del_assumptions"] = del_rep.all_hold

    s = spec.J1 - 2.0 * spec.J3
    c = spec.J2 - 2.0 * spec.J4
    try:
        rho = float(np.abs(np.linalg.eigvals(np.linalg.solve(s, c))).max())
    except np.linalg.LinAlgError:
        rho = math.inf
    edge = abs(op.gamma_at(-op.N) * op.gamma_at(op.N))
    bound = math.inf if edge == 0 else \
        10.0 * (cfg.tf - cfg.t0) ** 2 * rho / edge
    report["resolution_warning"] = bool(cfg.M**2 < bound)

    if cfg.targets and "omega" in cfg.targets:
        omega = np.sort(np.abs(np.asarray(cfg.targets["omega"], dtype=float)))
        if cfg.targets.get("discrete"):
            sp = pencil.transcendental_spectrum(
                pencil.transcendental_pencil(spec, op, 0))
            kept = convergence.filter_to_window(sp.lam, 2 * omega.max() + 1.0)
            measured = np.sort(kept.roots.imag[kept.roots.imag > 0])
        else:
            q0 = pencil.classical_spectrum(pencil.classical_pencil(spec, 0))
            measured = np.sort(q0.roots.imag[q0.roots.imag > 0])
        if len(measured) == len(omega):
            dev = float(np.abs(measured - omega).max())
        else:
            dev = math.inf
        tol = float(cfg.targets.get("tol", 1e-6))
        report["targets_deviation"] = dev
        report["targets_ok"] = dev <= tol

    for v in report["violations"]:
        print(f"violation: {v}")
    print(f"operator conditions: sum_zero={conds.sum_zero} "
          f"derivative_normalized={conds.derivative_normalized}")
    print(f"continuous assumptions hold: {report['cel_assumptions']}")
    print(f"discrete assumptions hold: {report['del_assumptions']}")
    if report["resolution_warning"]:
        print(f"warning: grid too coarse, M^2 = {cfg.M**2} < {bound:.6g} "
              "(raise M for a meaningful discrete approximation)")
    if "targets_ok" in report:
        print(f"target spectrum deviation: {report['targets_deviation']:.3e} "
              f"(ok={report['targets_ok']})")
    return report


def cmd_spectrum(cfg: ExperimentConfig, which: str, out_dir: Path) -> list[Path]:
    spec = cfg.spec
    header = ["re", "im", "residual", "convergent_flag"]
    paths = []
    if which == "cel":
        for nu, tag in ((0, "nu0"), (cfg.n, "nun")):
            roots = pencil.classical_spectrum(pencil.classical_pencil(spec, nu))
            rows = [[z.real, z.imag, r, 1]
                    for z, r in zip(roots.roots, roots.residuals)]
            path = out_dir / f"spectrum_cel_{tag}.csv"
            write_csv(path, header, rows)
            paths.append(path)
    else:
        op = cfg.operator()
        for nu, tag in ((0, "nu0"), (cfg.n, "nun")):
            q_cls = pencil.classical_spectrum(pencil.classical_pencil(spec, nu))
            radius = 2.0 * float(np.abs(q_cls.roots).max()) + 1.0
            sp = pencil.transcendental_spectrum(
                pencil.transcendental_pencil(spec, op, nu))
            kept = set(np.flatnonzero(np.abs(sp.lam.roots) <= radius).tolist())
            rows = [[z.real, z.imag, r, int(i in kept)]
                    for i, (z, r) in enumerate(zip(sp.lam.roots, sp.lam.residuals))]
            path = out_dir / f"spectrum_del_{tag}.csv"
            write_csv(path, header, rows)
            paths.append(path)
    for p in paths:
        print(f"wrote {p}")
    return paths


def cmd_solve(cfg: ExperimentConfig, which: str, out_dir: Path, seed: int) -> list[Path]:
    times = _sample_times(cfg)
    if which == "cel":
        sol = _cel_solution(cfg, seed)
        values = np.array([p.value(times) for p in sol.particles])
    else:
        sol = _del_solution(cfg, seed)
        grid, _ = sol.sample()
        values = grid.values
    csv_path = out_dir / f"traj_{which}.csv"
    svg_path = out_dir / f"traj_{which}.svg"
    write_csv(csv_path, _traj_header(cfg.d), _trajectory_rows(times, values))
    write_svg(svg_path, values, times)
    print(f"wrote {csv_path}")
    print(f"wrote {svg_path}")
    return [csv_path, svg_path]


def _gamma_cell(cfg: ExperimentConfig, cel, a: float, b: float) -> float:
    cap = 3.0 * cfg.M
    try:
        op = ScaleOperator(np.array([a, -(a + b), b], dtype=complex), cfg.epsilon)
        err = _window_error(cfg, op, cel)
    except (_ASSUMPTION_ERRORS + _NUMERICAL_ERRORS + (ValueError,)):
        err = cap
    return -math.log(min(max(err, 1e-300), cap))


def cmd_error_surface(cfg: ExperimentConfig, grid: str, out_dir: Path,
                      workers: int, seed: int) -> Path:
    if grid == "gamma":
        block = cfg.sweep.get("gamma_grid", {})
        lo = float(block.get("min", -1.0))
        hi = float(block.get("max", 1.0))
        points = int(block.get("points", 41))
        axis = np.linspace(lo, hi, points)
        cel = _cel_solution(cfg, seed)
        cells = [(a, b) for a in axis for b in axis]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                metrics = list(pool.map(lambda ab: _gamma_cell(cfg, cel, *ab), cells))
        else:
            metrics = [_gamma_cell(cfg, cel, a, b) for a, b in cells]
        rows = [[a, b, m] for (a, b), m in zip(cells, metrics)]
        path = out_dir / "error_surface_gamma.csv"
        write_csv(path, ["gamma_m1_re", "gamma_1_re", "metric"], rows)
    else:
        block = cfg.sweep.get("k_grid", {})
        ks = [float(k) for k in block.get("ks", [-1.0, -0.5, 0.0, 0.5, 1.0])]
        Ms = [int(m) for m in block.get("Ms", [cfg.M])]
        rows = []
        for M in Ms:
            sub = ExperimentConfig(cfg.spec, cfg.t0, cfg.tf, M, cfg.operator_raw,
                                   cfg.targets, cfg.boundary, cfg.amplitudes,
                                   cfg.choreo, cfg.sweep)
            cel = _cel_solution(sub, seed)
            for k in ks:
                cap = 3.0 * M
                try:
                    op = scaleop.k_family(sub.epsilon, k)
                    err = _window_error(sub, op, cel)
                except (_ASSUMPTION_ERRORS + _NUMERICAL_ERRORS):
                    err = cap
                rows.append([k, M, err])
        path = out_dir / "error_surface_k.csv"
        write_csv(path, ["k", "M", "error"], rows)
    print(f"wrote {path}")
    return path


def cmd_converge(cfg: ExperimentConfig, out_dir: Path) -> Path:
    block = cfg.sweep
    if "epsilons" not in block:
        raise ConfigParse("converge needs sweep.epsilons")
    epsilons = [float(e) for e in block["epsilons"]]
    nu = float(block.get("nu", 0.0))
    result = convergence.epsilon_sweep(cfg.spec, cfg.operator_family(), nu, epsilons)
    rows = []
    for eps, dist, perr, note in zip(result.epsilons, result.distances,
                                     result.pencil_errors, result.notes):
        rows.append([eps, dist, perr, note or ""])
    path = out_dir / "converge.csv"
    write_csv(path, ["epsilon", "hausdorff", "pencil_error", "note"], rows)
    print(f"estimated order: {result.estimated_order:.4f}")
    print(f"wrote {path}")
    return path


def cmd_choreo(cfg: ExperimentConfig, out_dir: Path, seed: int) -> list[Path]:
    spec, n = cfg.spec, cfg.n
    which = cfg.choreo.get("which", ["cel", "del"])
    if isinstance(which, str):
        which = [which]
    times = _sample_times(cfg)
    written = []
    for kind in which:
        size = 2 * spec.d if kind == "cel" else 4 * cfg.operator().N * spec.d
        if "amplitudes_re" in cfg.choreo:
            amps = _complex_block(cfg.choreo, "amplitudes", (size,))
        else:
            amps = np.ones(size, dtype=complex)
        if kind == "cel":
            ch, sol = periodic.build_choreography_cel(spec, n, amps)
        else:
            ch, sol = periodic.build_choreography_del(spec, cfg.operator(), n,
                                                      amps, cfg.t0, cfg.M)
        rep = periodic.verify_choreography(ch, sol, spec)
        print(f"{kind}: period T = {ch.T:.12g}, delay T/n = {ch.delay:.12g}, "
              f"checks ok = {rep.all_ok}")
        values = np.array([p.value(times) for p in sol.particles])
        csv_path = out_dir / f"choreo_{kind}.csv"
        svg_path = out_dir / f"choreo_{kind}.svg"
        write_csv(csv_path, _traj_header(cfg.d), _trajectory_rows(times, values))
        write_svg(svg_path, values, times)
        written.extend([csv_path, svg_path])
    for p in written:
        print(f"wrote {p}")
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choreoqep",
        description="Quadratic n-particle systems: solve, classify, export.")
    parser.add_argument("command",
                        choices=["validate", "spectrum", "solve",
                                 "error-surface", "converge", "choreo"])
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default=".")
    parser.add_argument("--which", choices=["cel", "del"], default="cel")
    parser.add_argument("--grid", choices=["gamma", "k"], default="gamma")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out)
    try:
        cfg = load_config(args.config)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "validate":
            cmd_validate(cfg, out_dir)
        elif args.command == "spectrum":
            cmd_spectrum(cfg, args.which, out_dir)
        elif args.command == "solve":
            cmd_solve(cfg, args.which, out_dir, args.seed)
        elif args.command == "error-surface":
            cmd_error_surface(cfg, args.grid, out_dir, args.workers, args.seed)
        elif args.command == "converge":
            cmd_converge(cfg, out_dir)
        elif args.command == "choreo":
            cmd_choreo(cfg, out_dir, args.seed)
    except (ConfigParse, DimensionMismatch) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _ASSUMPTION_ERRORS as exc:
        print(f"assumption violation: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
