"""Complex state on a grid, model parameters, and every norm we monitor.

Norms are normalized so that the q = 0 Sobolev norm coincides exactly with
the L^2 quadrature norm; conserved-quantity diagnostics then compare like
with like and no transform constants leak into reported ratios.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _scipy_integrate

from . import grid as _grid
from .errors import DivergentIntegral, NegativePowerZeroMode
from .grid import Grid

_SNAPSHOT_MAGIC = b"NLSF"
_SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class Field:
    """Immutable complex-valued state psi on a grid at one time instant."""

    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != self.grid.points:
            raise ValueError(
                f"values shape {values.shape} does not match grid {self.grid.points}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values contain NaN or Inf")
        if not (np.isfinite(self.time) and self.time >= 0.0):
            raise ValueError(f"time must be finite and >= 0, got {self.time}")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "time", float(self.time))

    def with_values(self, values: np.ndarray, time: float | None = None) -> "Field":
        return Field(self.grid, values, self.time if time is None else time)

    def density(self) -> np.ndarray:
        """Pointwise |psi|^2."""
        return np.abs(self.values) ** 2


@dataclass(frozen=True)
class Params:
    """Model parameters: nonlinearity strength, power, dimension, Sobolev index.

    lam < 0 is the focusing regime, lam > 0 defocusing.  The index
    constraints sobolev_index > dims/2 and sobolev_index >= eta are the
    hypotheses under which local existence holds, and are enforced here.
    """

    lam: float
    eta: int
    dims: int
    sobolev_index: int

    def __post_init__(self):
        if self.eta < 1 or int(self.eta) != self.eta:
            raise ValueError(f"eta must be a positive integer, got {self.eta}")
        if self.dims not in (1, 2, 3):
            raise ValueError(f"dims must be 1, 2 or 3, got {self.dims}")
        q = self.sobolev_index
        if int(q) != q or q <= self.dims / 2 or q < self.eta:
            raise ValueError(
                "sobolev_index must be an integer with q > dims/2 and q >= eta; "
                f"got q={q}, dims={self.dims}, eta={self.eta}"
            )
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "eta", int(self.eta))
        object.__setattr__(self, "dims", int(self.dims))
        object.__setattr__(self, "sobolev_index", int(self.sobolev_index))


def lp_norm(f: Field, p: float) -> float:
    """L^p quadrature norm; p = inf returns the max modulus."""
    if p == np.inf:
        return float(np.max(np.abs(f.values)))
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return _grid.integrate(f.grid, np.abs(f.values) ** p) ** (1.0 / p)


def _spectral_norm(f: Field, weight: np.ndarray) -> float:
    # Vol/Ntot^2 * sum w(xi) |F(xi)|^2 reduces to the L^2 quadrature norm
    # for w == 1 (discrete Parseval).
    spectrum = _grid.fft(f.values)
    g = f.grid
    total = np.sum(weight * np.abs(spectrum) ** 2)
    return float(np.sqrt(g.volume * total)) / g.num_points


def sobolev_norm(f: Field, q: float) -> float:
    """Inhomogeneous Sobolev norm with <xi>^(2q) spectral weight.

    Normalized so sobolev_norm(f, 0) == lp_norm(f, 2) exactly; q may be
    any real >= 0.
    """
    if q == 0:
        return lp_norm(f, 2)
    return _spectral_norm(f, f.grid.k_sq_bracket ** float(q))


def homogeneous_sobolev_norm(f: Field, s: float) -> float:
    """Homogeneous norm with |xi|^(2s) weight; s < 0 needs zero-mean input."""
    if s == 0:
        return lp_norm(f, 2)
    if s < 0:
        mean = abs(np.mean(f.values))
        scale = max(1.0, float(np.max(np.abs(f.values))))
        if mean > 1e-12 * scale:
            raise NegativePowerZeroMode(
                "homogeneous norm with s < 0 requires a zero-mean field"
            )
    k2 = f.grid.k_sq
    weight = np.zeros_like(k2)
    nonzero = k2 > 0.0
    weight[nonzero] = k2[nonzero] ** float(s)
    return _spectral_norm(f, weight)


def sobolev_embedding_constant(dims: int, q: float) -> float:
    """Constant (integral of <xi>^(-2q) over R^N)^(1/2), by radial quadrature.

    This is the constant in the sup-norm bound ||f||_inf <= C ||f||_{H^q};
    it is finite exactly when 2q > N.
    """
    if 2 * q <= dims:
        raise DivergentIntegral(
            f"embedding constant diverges for 2q <= N (q={q}, N={dims})"
        )
    if dims == 1:
        surface = 2.0
    else:
        from scipy.special import gamma

        surface = 2.0 * np.pi ** (dims / 2.0) / gamma(dims / 2.0)

    def radial(r):
        return r ** (dims - 1) * (1.0 + r * r) ** (-q)

    value, _ = _scipy_integrate.quad(radial, 0.0, np.inf, epsrel=1e-10, limit=200)
    return float(np.sqrt(surface * value))


def embedding_check(f: Field, q: float) -> float:
    """Ratio ||f||_inf / ||f||_{H^q}; bounded by the embedding constant."""
    if 2 * q <= f.grid.dims:
        raise DivergentIntegral(f"embedding needs 2q > N (q={q}, N={f.grid.dims})")
    return lp_norm(f, np.inf) / sobolev_norm(f, q)


def save_field(f: Field, path) -> None:
    """Write a binary snapshot: NLSF header + interleaved re/im float64.

    Layout (little-endian): magic "NLSF", version u32, N u32, n_d as N x u32,
    L_d as N x f64, time f64, then re/im per point in row-major order.
    Round-trips bit-exactly.
    """
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_SNAPSHOT_MAGIC)
        fh.write(struct.pack("<II", _SNAPSHOT_VERSION, g.dims))
        fh.write(struct.pack(f"<{g.dims}I", *g.points))
        fh.write(struct.pack(f"<{g.dims}d", *g.extent))
        fh.write(struct.pack("<d", f.time))
        interleaved = np.empty(g.num_points * 2, dtype="<f8")
        flat = np.ascontiguousarray(f.values).reshape(-1)
        interleaved[0::2] = flat.real
        interleaved[1::2] = flat.imag
        fh.write(interleaved.tobytes())


def load_field(path) -> Field:
    """Read a snapshot written by save_field."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _SNAPSHOT_MAGIC:
            raise ValueError(f"not a field snapshot file: bad magic {magic!r}")
        version, dims = struct.unpack("<II", fh.read(8))
        if version != _SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        points = struct.unpack(f"<{dims}I", fh.read(4 * dims))
        extent = struct.unpack(f"<{dims}d", fh.read(8 * dims))
        (time,) = struct.unpack("<d", fh.read(8))
        count = int(np.prod(points)) * 2
        raw = np.frombuffer(fh.read(count * 8), dtype="<f8")
        if raw.size != count:
            raise ValueError("snapshot file truncated")
    values = (raw[0::2] + 1j * raw[1::2]).reshape(points)
    return Field(Grid(extent=extent, points=points), values, time)
