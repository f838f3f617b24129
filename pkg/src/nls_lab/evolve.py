"""Time evolution and run monitoring.

Two independent integrators are provided:

  * Strang split-step: half a nonlinear phase rotation, one exact free
    flight in Fourier space, half a nonlinear rotation.  Both substeps are
    L^2 isometries, so mass is conserved to roundoff; the scheme is second
    order in dt.
  * Picard sweeps on the Duhamel integral form, with the time integral
    discretized by composite trapezoid over a fixed node grid.  Divergence
    of the sweep distances is a reported outcome, not a crash.

Runs are monitored for Sobolev-norm blow-up and for mass reaching the
boundary shell of the periodic box (the validity condition for treating
the box as free space).  A per-point history integral of s*|psi(x,s)|^2
is accumulated alongside the state with the trapezoid rule; it starts at
exactly zero and feeds the time-weighted diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import grid as _grid
from .errors import PicardDiverged
from .field import Field, Params, sobolev_norm
from .grid import Grid


@dataclass(frozen=True)
class StepperConfig:
    """Integration and monitoring controls for a single run."""

    method: str = "splitstep"  # "splitstep" | "picard"
    dt: float = 1e-3
    t_final: float = 1.0
    picard_iters: int = 25
    picard_tol: float = 1e-10
    quadrature_nodes: int = 17
    blowup_threshold: float = 1e6
    tail_tol: float = 1e-6
    tail_fraction: float = 0.125
    snapshot_stride: int | None = None
    monitor_stride: int = 1

    def __post_init__(self):
        if self.method not in ("splitstep", "picard"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > self.t_final:
            raise ValueError("dt must not exceed t_final")
        if self.picard_iters < 1 or self.quadrature_nodes < 2:
            raise ValueError("picard_iters >= 1 and quadrature_nodes >= 2 required")
        if not self.picard_tol > 0:
            raise ValueError("picard_tol must be positive")
        if not 0 < self.tail_fraction < 0.5:
            raise ValueError("tail_fraction must lie in (0, 1/2)")


@dataclass(frozen=True)
class RunStatus:
    """Terminal state of a run: kind plus the time it was flagged at."""

    kind: str  # "completed" | "blow_up" | "tail_mass" | "picard_diverged"
    time: float

    @property
    def completed(self) -> bool:
        return self.kind == "completed"


@dataclass
class Trajectory:
    """Ordered snapshots of a run plus the accumulated history integral.

    h_snapshots[i] is the per-point integral of s*|psi(x,s)|^2 ds up to
    snapshots[i].time; it is identically zero at t = 0.
    """

    snapshots: list[Field]
    h_snapshots: list[np.ndarray]
    status: RunStatus
    params: Params
    config: StepperConfig
    hq_tail: list[tuple[float, float]] = dataclass_field(default_factory=list)

    @property
    def grid(self) -> Grid:
        return self.snapshots[0].grid

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])

    def __post_init__(self):
        times = self.times
        if len(times) != len(self.h_snapshots):
            raise ValueError("snapshot and history lists must align")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("snapshot times must be strictly increasing")


def tail_mass(f: Field, fraction: float = 0.125) -> float:
    """Mass fraction in the boundary shell of the box.

    The shell is the set of points within fraction*L_d of the boundary in
    any dimension.  Returns shell mass / total mass (0 for a zero field).
    """
    density = f.density()
    total = float(np.sum(density))
    if total == 0.0:
        return 0.0
    mask = np.zeros(f.grid.points, dtype=bool)
    for d in range(f.grid.dims):
        x = np.abs(f.grid.axis_coordinates(d))
        cut = (0.5 - fraction) * f.grid.extent[d]
        shape = [1] * f.grid.dims
        shape[d] = f.grid.points[d]
        mask |= (x >= cut).reshape(shape)
    return float(np.sum(density[mask])) / total


def free_propagator(f: Field, t: float) -> Field:
    """Exact free flight: spectrum multiplied by exp(-i t |xi|^2).

    Unitary for every t (the L^2 norm is preserved to roundoff); t = 0 is
    the identity.  The snapshot time stamp is left untouched; callers own
    time bookkeeping.
    """
    if t == 0.0:
        return f
    spectrum = _grid.fft(f.values)
    return f.with_values(_grid.ifft(np.exp(-1j * t * f.grid.k_sq) * spectrum))


def _nonlinear_phase(values: np.ndarray, tau: float, params: Params) -> np.ndarray:
    # exact flow of i psi_t = lam |psi|^(2 eta) psi: modulus is pointwise
    # constant, so this is a pure phase rotation
    if params.lam == 0.0 or tau == 0.0:
        return values
    return values * np.exp(-1j * tau * params.lam * np.abs(values) ** (2 * params.eta))


def _splitstep_raw(values: np.ndarray, dt: float, grid: Grid, params: Params,
                   lin_multiplier: np.ndarray | None = None) -> np.ndarray:
    if lin_multiplier is None:
        lin_multiplier = np.exp(-1j * dt * grid.k_sq)
    values = _nonlinear_phase(values, 0.5 * dt, params)
    values = _grid.ifft(lin_multiplier * _grid.fft(values))
    return _nonlinear_phase(values, 0.5 * dt, params)


def splitstep_step(f: Field, dt: float, params: Params) -> Field:
    """One Strang step; reduces exactly to the free flight when lam = 0."""
    return f.with_values(
        _splitstep_raw(f.values, dt, f.grid, params), time=f.time + dt
    )


@dataclass
class PicardReport:
    """Convergence record of one fixed-point solve."""

    distances: list[float]
    ratios: list[float]
    contraction_factor: float | None
    converged: bool
    iterations: int


def picard_solve(psi0: Field, T: float, cfg: StepperConfig, params: Params):
    """Iterate the integral form of the equation on [0, T].

    Returns (field at time psi0.time + T, PicardReport).  The time integral
    uses composite trapezoid over cfg.quadrature_nodes equispaced nodes;
    iteration stops when successive sweeps differ by less than
    cfg.picard_tol in the sup-over-nodes Sobolev norm.  Three consecutive
    distance increases raise PicardDiverged.
    """
    g = psi0.grid
    M = cfg.quadrature_nodes
    delta = T / (M - 1)
    q = params.sobolev_index

    # free-flight multipliers for every node lag, reused across sweeps
    lag = [np.exp(-1j * (l * delta) * g.k_sq) for l in range(M)]
    psi0_hat = _grid.fft(psi0.values)
    free = [_grid.ifft(lag[j] * psi0_hat) for j in range(M)]

    def sweep(nodes: list[np.ndarray]) -> list[np.ndarray]:
        source_hat = [
            _grid.fft(params.lam * np.abs(u) ** (2 * params.eta) * u) for u in nodes
        ]
        out = [nodes[0]]
        for j in range(1, M):
            acc = 0.5 * lag[j] * source_hat[0] + 0.5 * source_hat[j]
            for i in range(1, j):
                acc = acc + lag[j - i] * source_hat[i]
            out.append(free[j] - 1j * delta * _grid.ifft(acc))
        return out

    def distance(a: list[np.ndarray], b: list[np.ndarray]) -> float:
        return max(
            sobolev_norm(Field(g, u - v, 0.0), q) for u, v in zip(a, b)
        )

    nodes = list(free)
    distances: list[float] = []
    converged = False
    increases = 0
    iterations = 0
    for _ in range(cfg.picard_iters):
        new_nodes = sweep(nodes)
        iterations += 1
        d = distance(new_nodes, nodes)
        if distances and d > distances[-1]:
            increases += 1
            if increases >= 3:
                raise PicardDiverged(
                    f"sweep distances grew {increases} times in a row at d={d:.3e}",
                    distances + [d],
                )
        else:
            increases = 0
        distances.append(d)
        nodes = new_nodes
        if d < cfg.picard_tol:
            converged = True
            break

    ratios = [
        distances[k + 1] / distances[k]
        for k in range(len(distances) - 1)
        if distances[k] > 0.0
    ]
    report = PicardReport(
        distances=distances,
        ratios=ratios,
        contraction_factor=ratios[0] if ratios else None,
        converged=converged,
        iterations=iterations,
    )
    result = Field(g, nodes[-1], psi0.time + T)
    return result, report


def evolve(psi0: Field, cfg: StepperConfig, params: Params,
           initial_h: np.ndarray | None = None) -> Trajectory:
    """March psi0 to cfg.t_final, or to a monitored stop.

    cfg.t_final is an absolute time; restarting from the last snapshot of
    a trajectory (passing its history field as initial_h) and evolving
    further reproduces a single longer run to integrator accuracy.
    """
    g = psi0.grid
    if psi0.grid.dims != params.dims:
        raise ValueError("params.dims does not match the grid dimension")
    t0 = psi0.time
    span = cfg.t_final - t0
    if span <= 0:
        raise ValueError(f"t_final={cfg.t_final} is not ahead of psi0.time={t0}")

    nsteps = int(round(span / cfg.dt))
    if abs(nsteps * cfg.dt - span) > 1e-9 * max(1.0, span):
        nsteps = int(np.ceil(span / cfg.dt - 1e-12))
    stride = cfg.snapshot_stride or max(1, int(np.ceil(nsteps / 200)))

    state = np.array(psi0.values, copy=True)
    if initial_h is None:
        h_accum = np.zeros(g.points)
    else:
        h_accum = np.array(initial_h, copy=True)
        if h_accum.shape != g.points:
            raise ValueError("initial_h shape does not match the grid")

    snapshots = [Field(g, state, t0)]
    h_snapshots = [h_accum.copy()]
    hq_tail: list[tuple[float, float]] = [(t0, sobolev_norm(psi0, params.sobolev_index))]
    status = RunStatus("completed", cfg.t_final)

    if tail_mass(psi0, cfg.tail_fraction) > cfg.tail_tol:
        raise ValueError("initial data already exceeds the boundary-shell ceiling")

    lin_multiplier = np.exp(-1j * cfg.dt * g.k_sq)

    def record(t: float):
        snapshots.append(Field(g, state, t))
        h_snapshots.append(h_accum.copy())

    t_prev = t0
    for step in range(1, nsteps + 1):
        if step < nsteps:
            dt = cfg.dt
            t_next = t0 + step * cfg.dt
        else:
            t_next = cfg.t_final
            dt = t_next - t_prev
        if dt <= 0:
            break
        old_weighted = t_prev * np.abs(state) ** 2

        if cfg.method == "splitstep":
            mult = lin_multiplier if dt == cfg.dt else None
            state = _splitstep_raw(state, dt, g, params, mult)
        else:
            try:
                stepped, _ = picard_solve(Field(g, state, t_prev), dt, cfg, params)
            except PicardDiverged:
                status = RunStatus("picard_diverged", t_prev)
                break
            state = np.array(stepped.values)

        h_accum += 0.5 * dt * (old_weighted + t_next * np.abs(state) ** 2)
        t_prev = t_next

        monitored = step % cfg.monitor_stride == 0 or step == nsteps
        stop = None
        if monitored:
            current = Field(g, state, t_next)
            hq = sobolev_norm(current, params.sobolev_index)
            hq_tail.append((t_next, hq))
            if len(hq_tail) > 10:
                hq_tail.pop(0)
            if hq > cfg.blowup_threshold:
                stop = RunStatus("blow_up", t_next)
            elif tail_mass(current, cfg.tail_fraction) > cfg.tail_tol:
                stop = RunStatus("tail_mass", t_next)

        if stop is not None:
            status = stop
            record(t_next)
            break
        if step % stride == 0 or step == nsteps:
            record(t_next)

    return Trajectory(
        snapshots=snapshots,
        h_snapshots=h_snapshots,
        status=status,
        params=params,
        config=cfg,
        hq_tail=hq_tail,
    )


@dataclass
class ContinuousDependenceReport:
    """Growth of the gap between a run and its perturbed twins."""

    epsilons: list[float]
    times: np.ndarray
    errors: dict[float, np.ndarray]       # e(t) = Hq distance per snapshot
    ratios: dict[float, np.ndarray]       # e(t) / eps
    fitted_growth_rate: dict[float, float | None]

    def to_dict(self) -> dict:
        return {
            "epsilons": list(self.epsilons),
            "times": self.times.tolist(),
            "errors": {str(k): v.tolist() for k, v in self.errors.items()},
            "ratios": {str(k): v.tolist() for k, v in self.ratios.items()},
            "fitted_growth_rate": {
                str(k): v for k, v in self.fitted_growth_rate.items()
            },
        }


def perturbation_bump(grid: Grid, q: float) -> Field:
    """Fixed unit-Sobolev-norm Gaussian used for perturbation experiments."""
    r2 = grid.radius_sq
    raw = Field(grid, np.exp(-r2 / 2.0), 0.0)
    return raw.with_values(raw.values / sobolev_norm(raw, q))


def continuous_dependence_experiment(
    psi0: Field,
    perturbation_sizes: list[float],
    T: float,
    cfg: StepperConfig,
    params: Params,
) -> ContinuousDependenceReport:
    """Evolve psi0 and perturbed copies, recording the Sobolev-norm gap.

    The gap e(t) is fitted against eps * exp(C t); as eps shrinks, the
    ratio curves e(t)/eps converge to an eps-independent limit.
    """
    run_cfg = StepperConfig(
        method=cfg.method, dt=cfg.dt, t_final=psi0.time + T,
        picard_iters=cfg.picard_iters, picard_tol=cfg.picard_tol,
        quadrature_nodes=cfg.quadrature_nodes,
        blowup_threshold=cfg.blowup_threshold, tail_tol=cfg.tail_tol,
        tail_fraction=cfg.tail_fraction, snapshot_stride=cfg.snapshot_stride,
        monitor_stride=cfg.monitor_stride,
    )
    base = evolve(psi0, run_cfg, params)
    if not base.status.completed:
        raise RuntimeError(f"base run stopped early: {base.status}")
    bump = perturbation_bump(psi0.grid, params.sobolev_index)

    q = params.sobolev_index
    times = base.times
    errors: dict[float, np.ndarray] = {}
    ratios: dict[float, np.ndarray] = {}
    rates: dict[float, float | None] = {}
    for eps in perturbation_sizes:
        perturbed0 = psi0.with_values(psi0.values + eps * bump.values)
        run = evolve(perturbed0, run_cfg, params)
        if not run.status.completed:
            raise RuntimeError(f"perturbed run (eps={eps}) stopped early: {run.status}")
        e = np.array([
            sobolev_norm(a.with_values(a.values - b.values), q)
            for a, b in zip(run.snapshots, base.snapshots)
        ])
        errors[eps] = e
        ratios[eps] = e / eps if eps != 0 else np.zeros_like(e)
        positive = (e > 0) & (times > times[0])
        if eps != 0 and np.count_nonzero(positive) >= 2:
            slope = np.polyfit(times[positive], np.log(e[positive]), 1)[0]
            rates[eps] = float(slope)
        else:
            rates[eps] = None
    return ContinuousDependenceReport(
        epsilons=list(perturbation_sizes),
        times=times,
        errors=errors,
        ratios=ratios,
        fitted_growth_rate=rates,
    )
