"""Named initial-condition families.

Boost velocities are restricted to the wavenumber lattice (v/2 must be a
grid wavenumber) so that boosted data stay exactly periodic; plane-wave
modes are specified as integer mode numbers for the same reason.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .field import Field, load_field
from .grid import Grid


def _as_tuple(value, dims: int, name: str) -> tuple[float, ...]:
    if np.isscalar(value):
        return (float(value),) * dims
    out = tuple(float(v) for v in value)
    if len(out) != dims:
        raise ConfigError(f"{name} must have one entry per dimension, got {out}")
    return out


def _check_boost(grid: Grid, v: tuple[float, ...]):
    for d, vd in enumerate(v):
        if vd == 0.0:
            continue
        unit = 2.0 * np.pi / grid.extent[d]
        mode = vd / 2.0 / unit
        if abs(mode - round(mode)) > 1e-9:
            raise ConfigError(
                f"boost velocity v[{d}]={vd} is off the wavenumber lattice; "
                f"v/2 must be a multiple of 2*pi/L = {unit:.6g}"
            )


def gaussian(
    grid: Grid,
    amplitude: float = 1.0,
    sigma: float = 1.0,
    center=0.0,
    velocity=0.0,
) -> Field:
    """A * exp(-|x-x0|^2 / (2 sigma^2)) * exp(i v.x / 2)."""
    x0 = _as_tuple(center, grid.dims, "center")
    v = _as_tuple(velocity, grid.dims, "velocity")
    _check_boost(grid, v)
    if sigma <= 0:
        raise ConfigError(f"gaussian width must be positive, got {sigma}")
    r2 = sum((x - c) ** 2 for x, c in zip(grid.coordinates, x0))
    phase = sum(0.5 * vd * x for vd, x in zip(v, grid.coordinates))
    values = amplitude * np.exp(-r2 / (2.0 * sigma**2)) * np.exp(1j * phase)
    return Field(grid, values, 0.0)


def soliton(grid: Grid, amplitude: float = 1.0, center: float = 0.0, velocity: float = 0.0) -> Field:
    """1D profile A * sech(A (x - x0)) * exp(i v x / 2).

    With lam = -2, eta = 1 this profile evolves as a stationary soliton
    (modulus constant in time).
    """
    if grid.dims != 1:
        raise ConfigError("soliton initial data is one-dimensional")
    _check_boost(grid, (velocity,))
    x = grid.coordinates[0]
    values = amplitude / np.cosh(amplitude * (x - center)) * np.exp(0.5j * velocity * x)
    return Field(grid, values, 0.0)


def plane_wave(grid: Grid, amplitude: complex = 1.0, modes=1) -> Field:
    """a * exp(i k.x) with k = 2*pi*m/L for integer mode numbers m."""
    if np.isscalar(modes):
        modes = (int(modes),) * grid.dims
    modes = tuple(int(m) for m in modes)
    if len(modes) != grid.dims:
        raise ConfigError("plane_wave modes must have one entry per dimension")
    phase = sum(
        (2.0 * np.pi * m / L) * x
        for m, L, x in zip(modes, grid.extent, grid.coordinates)
    )
    return Field(grid, amplitude * np.exp(1j * phase), 0.0)


def from_file(path) -> Field:
    """Load a stored snapshot as initial data (time reset to 0)."""
    f = load_field(path)
    return Field(f.grid, f.values, 0.0)


def make_initial(grid: Grid, family: str, params: dict) -> Field:
    """Build initial data from a config-style (family, parameters) pair."""
    builders = {
        "gaussian": lambda: gaussian(
            grid,
            amplitude=params.get("amplitude", 1.0),
            sigma=params.get("sigma", 1.0),
            center=params.get("center", 0.0),
            velocity=params.get("velocity", 0.0),
        ),
        "soliton": lambda: soliton(
            grid,
            amplitude=params.get("amplitude", 1.0),
            center=params.get("center", 0.0),
            velocity=params.get("velocity", 0.0),
        ),
        "plane_wave": lambda: plane_wave(
            grid,
            amplitude=params.get("amplitude", 1.0),
            modes=params.get("modes", 1),
        ),
        "file": lambda: from_file(params["path"]),
    }
    if family not in builders:
        raise ConfigError(
            f"unknown initial-condition family {family!r}; "
            f"expected one of {sorted(builders)}"
        )
    try:
        return builders[family]()
    except KeyError as exc:
        raise ConfigError(f"missing initial-condition parameter: {exc}") from exc
