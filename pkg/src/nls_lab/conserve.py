"""Global conserved quantities and local conservation-law residuals.

Time derivatives in the local residuals come from central differences of
adjacent snapshots, never from re-evaluating the equation's right-hand
side; the residual therefore measures how faithfully the *solver* honors
the conservation law instead of restating the equation.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import grid as _grid
from .evolve import Trajectory, tail_mass
from .field import Field, Params, lp_norm, sobolev_norm
from .grid import integrate


def mass(f: Field) -> float:
    """Integral of |psi|^2."""
    return integrate(f.grid, f.density())


def energy(f: Field, params: Params) -> float:
    """(1/2) integral |grad psi|^2 + lam/(2 eta + 2) integral |psi|^(2 eta + 2)."""
    grads = _grid.gradient(f.grid, f.values)
    kinetic = 0.5 * sum(integrate(f.grid, np.abs(g) ** 2) for g in grads)
    potential = params.lam / (2.0 * params.eta + 2.0) * integrate(
        f.grid, np.abs(f.values) ** (2 * params.eta + 2)
    )
    return kinetic + potential


def momentum(f: Field) -> np.ndarray:
    """Im integral conj(psi) grad psi, one component per dimension."""
    grads = _grid.gradient(f.grid, f.values)
    return np.array(
        [integrate(f.grid, np.imag(np.conj(f.values) * g)) for g in grads]
    )


def current(f: Field) -> list[np.ndarray]:
    """Probability flux components Im(conj(psi) grad_m psi), pointwise."""
    grads = _grid.gradient(f.grid, f.values)
    return [np.imag(np.conj(f.values) * g) for g in grads]


def lagrangian_density(f: Field, params: Params) -> np.ndarray:
    """-1/2 div(grad |psi|^2) + lam*eta/(eta+1) |psi|^(2 eta + 2), pointwise."""
    density = f.density()
    lap = np.real(_grid.laplacian(f.grid, density))
    power = params.lam * params.eta / (params.eta + 1.0)
    return -0.5 * lap + power * np.abs(f.values) ** (2 * params.eta + 2)


def symmetric_tensor(f: Field, m: int, n: int) -> np.ndarray:
    """2 Re(grad_m psi * grad_n conj(psi)), pointwise."""
    if not (0 <= m < f.grid.dims and 0 <= n < f.grid.dims):
        raise IndexError(f"tensor indices ({m}, {n}) out of range for N={f.grid.dims}")
    dm = _grid.partial_derivative(f.grid, f.values, m)
    dn = _grid.partial_derivative(f.grid, f.values, n)
    return 2.0 * np.real(dm * np.conj(dn))


def _central_time_derivative(traj: Trajectory, i: int, extract) -> np.ndarray:
    if not 0 < i < len(traj.snapshots) - 1:
        raise IndexError(
            f"central difference needs an interior snapshot, got {i} "
            f"of {len(traj.snapshots)}"
        )
    before, after = traj.snapshots[i - 1], traj.snapshots[i + 1]
    return (extract(after) - extract(before)) / (after.time - before.time)


def local_mass_residual(traj: Trajectory, i: int) -> np.ndarray:
    """d|psi|^2/dt (central difference) + 2 div(current) at snapshot i."""
    f = traj.snapshots[i]
    ddt = _central_time_derivative(traj, i, lambda s: s.density())
    div_q = np.real(_grid.divergence(f.grid, current(f)))
    return ddt + 2.0 * div_q


def local_momentum_residual(traj: Trajectory, i: int, m: int, params: Params) -> np.ndarray:
    """dQ_m/dt + sum_n grad_n(delta_mn L + S_mn) at snapshot i."""
    f = traj.snapshots[i]
    if not 0 <= m < f.grid.dims:
        raise IndexError(f"component {m} out of range for N={f.grid.dims}")
    ddt = _central_time_derivative(traj, i, lambda s: current(s)[m])
    lagr = lagrangian_density(f, params)
    flux = []
    for n in range(f.grid.dims):
        term = symmetric_tensor(f, m, n)
        if m == n:
            term = term + lagr
        flux.append(term)
    return ddt + np.real(_grid.divergence(f.grid, flux))


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-snapshot values of the monitored functionals."""

    time: float
    mass: float
    energy: float
    momentum: tuple[float, ...]
    hq_norm: float
    linf_norm: float
    tail_mass: float
    mass_residual_norm: float | None = None
    momentum_residual_norm: float | None = None

    def __post_init__(self):
        scalars = [self.time, self.mass, self.energy, self.hq_norm,
                   self.linf_norm, self.tail_mass, *self.momentum]
        if not all(np.isfinite(s) for s in scalars):
            raise ValueError("diagnostics record contains non-finite entries")
        if self.mass < 0:
            raise ValueError("mass cannot be negative")


def diagnostics(traj: Trajectory, params: Params,
                local_residuals: bool = False) -> list[DiagnosticsRecord]:
    """Compute one record per snapshot (residuals on interior snapshots)."""
    records = []
    last = len(traj.snapshots) - 1
    for i, f in enumerate(traj.snapshots):
        mass_res = mom_res = None
        if local_residuals and 0 < i < last:
            res = local_mass_residual(traj, i)
            mass_res = lp_norm(f.with_values(res.astype(complex)), 2)
            mom = [
                lp_norm(
                    f.with_values(
                        local_momentum_residual(traj, i, m, params).astype(complex)
                    ),
                    2,
                )
                for m in range(f.grid.dims)
            ]
            mom_res = float(np.max(mom))
        records.append(
            DiagnosticsRecord(
                time=f.time,
                mass=mass(f),
                energy=energy(f, params),
                momentum=tuple(momentum(f)),
                hq_norm=sobolev_norm(f, params.sobolev_index),
                linf_norm=lp_norm(f, np.inf),
                tail_mass=tail_mass(f, traj.config.tail_fraction),
                mass_residual_norm=mass_res,
                momentum_residual_norm=mom_res,
            )
        )
    return records


_AXES = ("x", "y", "z")


def diagnostics_csv(records: list[DiagnosticsRecord]) -> str:
    """Render records as CSV with 17-significant-digit floats.

    Header: t,mass,energy,px[,py[,pz]],hq,linf,tail plus residual columns
    when any record carries them.
    """
    if not records:
        return ""
    dims = len(records[0].momentum)
    with_res = any(r.mass_residual_norm is not None for r in records)
    cols = ["t", "mass", "energy"]
    cols += [f"p{_AXES[d]}" for d in range(dims)]
    cols += ["hq", "linf", "tail"]
    if with_res:
        cols += ["mass_residual", "momentum_residual"]
    out = io.StringIO()
    out.write(",".join(cols) + "\n")

    def fmt(v) -> str:
        return "" if v is None else format(float(v), ".17g")

    for r in records:
        row = [fmt(r.time), fmt(r.mass), fmt(r.energy)]
        row += [fmt(p) for p in r.momentum]
        row += [fmt(r.hq_norm), fmt(r.linf_norm), fmt(r.tail_mass)]
        if with_res:
            row += [fmt(r.mass_residual_norm), fmt(r.momentum_residual_norm)]
        out.write(",".join(row) + "\n")
    return out.getvalue()
