"""Periodic spectral grid and Fourier-multiplier operators.

The box in dimension d is [-L_d/2, L_d/2) sampled at n_d evenly spaced
points, so every operator below is exact on band-limited fields.  All
derivatives are realized as Fourier multipliers: i*xi_m for the gradient,
-|xi|^2 for the Laplacian and |xi|^(2s) for its fractional powers.
Quadrature is the trapezoid rule, which on a periodic box integrates
trigonometric polynomials below the Nyquist frequency exactly.

Conventions:
  - forward FFT unnormalized, inverse divided by the point count
    (numpy's default);
  - the Nyquist column is zeroed in odd-order multipliers (i*xi) so real
    fields stay real, and kept in even-order ones;
  - |0|^(2s) = 0 for s > 0; for s < 0 the mean mode must vanish.

Everything here is a pure function of immutable inputs; cached wavenumber
tables are computed once per grid and never mutated afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NegativePowerZeroMode

#: modes with |mean| / max|f| above this are treated as having nonzero mean
_MEAN_MODE_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the box prod_d [-L_d/2, L_d/2).

    Parameters
    ----------
    extent : tuple of float
        Box side lengths L_d.
    points : tuple of int
        Points per dimension n_d; each must be even and >= 8.
    """

    extent: tuple[float, ...]
    points: tuple[int, ...]

    def __post_init__(self):
        extent = tuple(float(L) for L in self.extent)
        points = tuple(int(n) for n in self.points)
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "points", points)
        if len(extent) != len(points):
            raise ValueError("extent and points must have the same length")
        if not 1 <= len(points) <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {len(points)}")
        for L in extent:
            if not (L > 0 and np.isfinite(L)):
                raise ValueError(f"box extent must be positive and finite, got {L}")
        for n in points:
            if n < 8 or n % 2 != 0:
                raise ValueError(f"points per dimension must be even and >= 8, got {n}")

    @property
    def dims(self) -> int:
        return len(self.points)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.extent, self.points))

    @property
    def num_points(self) -> int:
        return int(np.prod(self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """1D sample positions along `axis`, box-centered: -L/2 + j*h."""
        n = self.points[axis]
        h = self.spacing[axis]
        return -0.5 * self.extent[axis] + h * np.arange(n)

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Broadcastable coordinate arrays (x_1, ..., x_N), each of full shape."""
        axes = [self.axis_coordinates(d) for d in range(self.dims)]
        mesh = np.meshgrid(*axes, indexing="ij")
        for m in mesh:
            m.flags.writeable = False
        return tuple(mesh)

    @cached_property
    def radius_sq(self) -> np.ndarray:
        """|x|^2 relative to the box center."""
        r2 = sum(x**2 for x in self.coordinates)
        r2.flags.writeable = False
        return r2

    def axis_wavenumbers(self, axis: int) -> np.ndarray:
        """FFT-ordered wavenumbers 2*pi*k/L along one axis."""
        n = self.points[axis]
        return 2.0 * np.pi * np.fft.fftfreq(n, d=self.spacing[axis])

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Broadcastable wavevector components (xi_1, ..., xi_N)."""
        axes = [self.axis_wavenumbers(d) for d in range(self.dims)]
        mesh = np.meshgrid(*axes, indexing="ij")
        for m in mesh:
            m.flags.writeable = False
        return tuple(mesh)

    @cached_property
    def k_sq(self) -> np.ndarray:
        """|xi|^2 on the full spectral grid."""
        k2 = sum(k**2 for k in self.wavenumbers)
        k2.flags.writeable = False
        return k2

    @cached_property
    def k_sq_bracket(self) -> np.ndarray:
        """<xi>^2 = 1 + |xi|^2."""
        kb = 1.0 + self.k_sq
        kb.flags.writeable = False
        return kb

    @cached_property
    def _grad_multipliers(self) -> tuple[np.ndarray, ...]:
        # i*xi_m with the Nyquist plane zeroed (odd-order multiplier hygiene)
        out = []
        for d in range(self.dims):
            k1 = self.axis_wavenumbers(d).copy()
            k1[self.points[d] // 2] = 0.0
            shape = [1] * self.dims
            shape[d] = self.points[d]
            m = 1j * k1.reshape(shape)
            m.flags.writeable = False
            out.append(m)
        return tuple(out)


def fft(values: np.ndarray) -> np.ndarray:
    """Unnormalized forward transform over all axes."""
    return np.fft.fftn(values)


def ifft(spectrum: np.ndarray) -> np.ndarray:
    """Inverse transform (divides by the total point count)."""
    return np.fft.ifftn(spectrum)


def gradient(grid: Grid, values: np.ndarray) -> list[np.ndarray]:
    """Spectral gradient; returns one array per dimension."""
    spectrum = fft(values)
    return [ifft(m * spectrum) for m in grid._grad_multipliers]


def partial_derivative(grid: Grid, values: np.ndarray, axis: int) -> np.ndarray:
    """Single spectral partial derivative along `axis`."""
    return ifft(grid._grad_multipliers[axis] * fft(values))


def divergence(grid: Grid, components: list[np.ndarray]) -> np.ndarray:
    """Spectral divergence of a vector field given per-dimension components."""
    if len(components) != grid.dims:
        raise ValueError("component count must match grid dimension")
    spectra = sum(m * fft(c) for m, c in zip(grid._grad_multipliers, components))
    return ifft(spectra)


def laplacian(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Spectral Laplacian (multiplier -|xi|^2)."""
    return ifft(-grid.k_sq * fft(values))


def _check_zero_mean(values: np.ndarray):
    mean = abs(np.mean(values))
    scale = max(1.0, float(np.max(np.abs(values)) if values.size else 0.0))
    if mean > _MEAN_MODE_RTOL * scale:
        raise NegativePowerZeroMode(
            "negative fractional power needs a zero-mean field on a periodic box; "
            f"relative mean mode is {mean / scale:.3e}"
        )


def fractional_laplacian(grid: Grid, values: np.ndarray, s: float) -> np.ndarray:
    """Fractional power (-Laplacian)^s via the |xi|^(2s) multiplier.

    s may be any real; s = 1 coincides with -laplacian, s = 0 with the
    identity.  For s < 0 the input must have zero mean (the inverse of the
    mean mode does not exist on a periodic box).
    """
    if s == 0:
        return np.array(values, copy=True)
    if s < 0:
        _check_zero_mean(values)
    k2 = grid.k_sq
    multiplier = np.zeros_like(k2)
    nonzero = k2 > 0.0
    multiplier[nonzero] = k2[nonzero] ** float(s)
    return ifft(multiplier * fft(values))


def integrate(grid: Grid, values: np.ndarray) -> float:
    """Trapezoid quadrature (prod h_d) * sum f over the periodic box."""
    return grid.cell_volume * float(np.sum(np.real(values)))
