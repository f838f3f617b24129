"""Virial and Morawetz functionals, the modified pseudo-conformal quantity,
and the inequality checks built on them.

Weight functions come in three flavors: the quadratic |x|^2 (whose Hessian
is 2*identity), the pair distance |x-y| (gradient is the unit separation
vector, Hessian is the projection off it, positive semidefinite), and a
smooth radial bump (1 inside radius R, 0 beyond 2R).

Pair integrals with the 1/|x-y| kernel are evaluated two ways: an explicit
pair loop at desk scale, and an FFT circular convolution against the
minimum-image kernel for large grids.  The diagonal cell x = y contributes
zero by convention (the excluded volume is O(h)); a configurable
regularization |x-y| -> max(|x-y|, h/2) is available for sensitivity
studies.

The pseudo-conformal quantity is computed in expanded form,

    P(t) = int |x psi|^2 + 4 t^2 int |grad psi|^2 - 4 t int x . flux
           + (4 lam t^2/(eta+1)) int |psi|^(2 eta + 2)
           - 2 N int div(grad H) dx,

whose time derivative along solutions is
-4 lam (N eta - 2)/(eta + 1) * t * int |psi|^(2 eta + 2); it is conserved
exactly when N*eta = 2.  The sign and coefficient of the nonlinear term
follow the energy-conservation expansion (they make the quantity actually
conserved); the N = 2 and N = 1 coefficient specializations (4 - 4 eta)
and (4 - 2 eta) are both reported where the estimate check uses them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma

from . import grid as _grid
from .conserve import current, energy, mass
from .errors import (
    CoincidentPoints,
    HypothesisViolation,
    InsufficientData,
    NegativeEnergy,
)
from .evolve import Trajectory
from .field import Field, Params, lp_norm
from .grid import Grid, integrate


# ---------------------------------------------------------------------------
# weight functions
# ---------------------------------------------------------------------------

class QuadraticAbsX:
    """Weight |x|^2: gradient 2x, Hessian 2*identity, Laplacian 2N."""

    kind = "quadratic_abs_x"

    def value(self, coords):
        return sum(c**2 for c in coords)

    def gradient(self, coords):
        return [2.0 * c for c in coords]

    def hessian(self, coords, m: int, n: int):
        shape = np.broadcast(*coords).shape if len(coords) > 1 else np.shape(coords[0])
        return np.full(shape, 2.0) if m == n else np.zeros(shape)

    def hessian_trace(self, coords):
        shape = np.broadcast(*coords).shape if len(coords) > 1 else np.shape(coords[0])
        return np.full(shape, 2.0 * len(coords))


class PairDistance:
    """Weight |r| of a separation vector r (r = x - y; one-variable use y=0).

    gradient is r/|r|, the x-x Hessian is (id - rr^T/|r|^2)/|r| and the
    mixed x-y Hessian is its negative.  All entries are left as 0 at r = 0
    (the diagonal-cell convention).
    """

    kind = "pair_distance"

    def value(self, coords):
        return np.sqrt(sum(c**2 for c in coords))

    def _safe_inv_norm(self, coords):
        r = self.value(coords)
        inv = np.zeros_like(r)
        nz = r > 0
        inv[nz] = 1.0 / r[nz]
        return inv

    def gradient(self, coords):
        inv = self._safe_inv_norm(coords)
        return [c * inv for c in coords]

    def hessian(self, coords, m: int, n: int):
        inv = self._safe_inv_norm(coords)
        unit = [c * inv for c in coords]
        kron = 1.0 if m == n else 0.0
        return inv * (kron - unit[m] * unit[n])

    def mixed_hessian(self, coords, m: int, n: int):
        """d/dy_m d/dx_n |x-y| = -(x-x Hessian)."""
        return -self.hessian(coords, m, n)

    def hessian_trace(self, coords):
        """(N-1)/|r|, left as 0 on the diagonal cell."""
        inv = self._safe_inv_norm(coords)
        return (len(coords) - 1) * inv


class RadialBump:
    """Smooth radial plateau: 1 for |x| <= R, 0 for |x| >= 2R.

    The transition uses the standard C-infinity gluing
    exp(-1/s) / (exp(-1/s) + exp(-1/(1-s))) profile, so value, gradient
    and Hessian trace are all exact closed forms.
    """

    kind = "radial_bump"

    def __init__(self, radius: float):
        if radius <= 0:
            raise ValueError("bump radius must be positive")
        self.radius = float(radius)

    @staticmethod
    def _h(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    @staticmethod
    def _h1(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos]) / s[pos] ** 2
        return out

    @staticmethod
    def _h2(s):
        out = np.zeros_like(s)
        pos = s > 0
        sp = s[pos]
        out[pos] = np.exp(-1.0 / sp) * (1.0 - 2.0 * sp) / sp**4
        return out

    def _profile(self, u):
        u = np.asarray(u, dtype=float)
        a = self._h(2.0 - u)
        b = self._h(u - 1.0)
        total = a + b
        total[total == 0.0] = 1.0  # unreachable for u in (1, 2); guards the ends
        phi = np.where(u <= 1.0, 1.0, np.where(u >= 2.0, 0.0, a / total))
        return phi

    def _profile_d1(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u > 1.0) & (u < 2.0)
        out = np.zeros_like(u)
        ui = u[inside]
        a, b = self._h(2.0 - ui), self._h(ui - 1.0)
        a1, b1 = -self._h1(2.0 - ui), self._h1(ui - 1.0)
        out[inside] = (a1 * b - a * b1) / (a + b) ** 2
        return out

    def _profile_d2(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u > 1.0) & (u < 2.0)
        out = np.zeros_like(u)
        ui = u[inside]
        a, b = self._h(2.0 - ui), self._h(ui - 1.0)
        a1, b1 = -self._h1(2.0 - ui), self._h1(ui - 1.0)
        a2, b2 = self._h2(2.0 - ui), self._h2(ui - 1.0)
        s = a + b
        out[inside] = ((a2 * b - a * b2) * s - 2.0 * (a1 * b - a * b1) * (a1 + b1)) / s**3
        return out

    def value(self, coords):
        r = np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in coords))
        return self._profile(r / self.radius)

    def gradient(self, coords):
        r = np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in coords))
        u = r / self.radius
        d1 = self._profile_d1(u)
        inv_r = np.zeros_like(r)
        nz = r > 0
        inv_r[nz] = 1.0 / r[nz]
        factor = d1 * inv_r / self.radius
        return [factor * np.asarray(c, dtype=float) for c in coords]

    def hessian_trace(self, coords):
        r = np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in coords))
        u = r / self.radius
        d1, d2 = self._profile_d1(u), self._profile_d2(u)
        inv_r = np.zeros_like(r)
        nz = r > 0
        inv_r[nz] = 1.0 / r[nz]
        dims = len(coords)
        return d2 / self.radius**2 + (dims - 1) * d1 * inv_r / self.radius


@dataclass(frozen=True)
class Constants:
    """Dimension-dependent constants used by the inequality checks.

    c_n_pi is 4 pi^(3/2) Gamma(1/2) / Gamma((N-1)/2) (finite and positive
    for N in {2, 3}); kernel_to_spectral is the constant k_N in the exact
    identity  int (K * f) g = k_N <(-Lap)^((3-N)/4) f, (-Lap)^((3-N)/4) g>
    for the kernel K = 1/|x|, namely 2^(N-1) pi^(N/2) Gamma((N-1)/2) /
    Gamma(1/2).  Both are reported by the stability check; the second is
    the one under which the checked inequality is provable.
    """

    dims: int
    c_n_pi: float
    kernel_to_spectral: float

    @classmethod
    def for_dimension(cls, dims: int) -> "Constants":
        if dims < 2:
            raise ValueError("pair-kernel constants are defined for N > 1")
        c_n_pi = 4.0 * np.pi**1.5 * _gamma(0.5) / _gamma((dims - 1) / 2.0)
        kts = 2.0 ** (dims - 1) * np.pi ** (dims / 2.0) * _gamma((dims - 1) / 2.0) / _gamma(0.5)
        return cls(dims=dims, c_n_pi=float(c_n_pi), kernel_to_spectral=float(kts))


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

def morawetz_11(f: Field, weight) -> float:
    """One-field action: integral of grad(weight) . flux over the box."""
    grads = weight.gradient(f.grid.coordinates)
    q = current(f)
    total = sum(g * qm for g, qm in zip(grads, q))
    return integrate(f.grid, total)


def _pair_terms(f: Field, weight: PairDistance) -> np.ndarray:
    """Pairwise integrand |psi(y)|^2 grad_x w(x-y) . flux(x), flattened.

    Raw coordinate differences (no wrap) with zero diagonal; O(n^(2N))
    memory and time, intended for desk-scale grids.
    """
    g = f.grid
    coords = np.stack([c.reshape(-1) for c in g.coordinates], axis=1)
    density = f.density().reshape(-1)
    flux = np.stack([qm.reshape(-1) for qm in current(f)], axis=1)
    sep = coords[:, None, :] - coords[None, :, :]        # [x, y, component]
    grads = weight.gradient([sep[..., d] for d in range(g.dims)])
    dot = sum(grads[d] * flux[:, None, d] for d in range(g.dims))
    return dot * density[None, :]


def morawetz_22(f: Field, weight: PairDistance | None = None) -> float:
    """Two-field action: double integral of |psi(y)|^2 grad_x w(x-y).flux(x)."""
    if weight is None:
        weight = PairDistance()
    terms = _pair_terms(f, weight)
    return float(f.grid.cell_volume**2 * np.sum(terms))


def virial_moment(f: Field) -> float:
    """Second moment integral |x|^2 |psi|^2 (box-centered coordinates)."""
    return integrate(f.grid, f.grid.radius_sq * f.density())


def virial_consistency(traj: Trajectory) -> dict:
    """Central-difference d/dt of the second moment against twice the
    quadratic-weight action, per interior snapshot."""
    if len(traj.snapshots) < 3:
        raise InsufficientData("need at least 3 snapshots for the virial check")
    weight = QuadraticAbsX()
    times = traj.times
    moments = np.array([virial_moment(s) for s in traj.snapshots])
    rates = np.array([2.0 * morawetz_11(s, weight) for s in traj.snapshots])
    fd = (moments[2:] - moments[:-2]) / (times[2:] - times[:-2])
    interior = rates[1:-1]
    mismatch = np.abs(fd - interior)
    scale = max(float(np.max(np.abs(interior))), float(np.max(np.abs(fd))))
    return {
        "times": times[1:-1],
        "fd_rate": fd,
        "action_rate": interior,
        "max_abs_mismatch": float(np.max(mismatch)) if mismatch.size else 0.0,
        "max_rel_mismatch": float(np.max(mismatch) / scale) if scale > 0 else 0.0,
    }


# ---------------------------------------------------------------------------
# pseudo-conformal quantity
# ---------------------------------------------------------------------------

def pseudo_conformal_terms(traj: Trajectory, i: int, params: Params) -> dict:
    """All components of the pseudo-conformal quantity at snapshot i."""
    f = traj.snapshots[i]
    g = f.grid
    t = f.time
    density = f.density()
    grads = _grid.gradient(g, f.values)
    kinetic = sum(integrate(g, np.abs(gr) ** 2) for gr in grads)
    cross = sum(
        integrate(g, x * qm) for x, qm in zip(g.coordinates, current(f))
    )
    moment = integrate(g, g.radius_sq * density)
    potential = integrate(g, np.abs(f.values) ** (2 * params.eta + 2))

    hist = traj.h_snapshots[i]
    hist_div = integrate(
        g, np.real(_grid.divergence(g, _grid.gradient(g, hist.astype(complex))))
    )
    hist_term = -2.0 * g.dims * hist_div

    nonlinear = 4.0 * params.lam * t * t / (params.eta + 1.0) * potential
    value = moment + 4.0 * t * t * kinetic - 4.0 * t * cross + nonlinear + hist_term
    return {
        "value": value,
        "moment": moment,
        "kinetic_term": 4.0 * t * t * kinetic,
        "cross_term": -4.0 * t * cross,
        "nonlinear_term": nonlinear,
        "history_divergence_term": hist_term,
        "potential_integral": potential,
        "time": t,
    }


def pseudo_conformal(traj: Trajectory, i: int, params: Params) -> float:
    """The modified pseudo-conformal quantity at snapshot i.

    Conserved along solutions exactly when N*eta = 2; at t = 0 it equals
    the squared second-moment norm of the initial data.
    """
    return pseudo_conformal_terms(traj, i, params)["value"]


def pseudo_conformal_series(traj: Trajectory, params: Params) -> np.ndarray:
    return np.array(
        [pseudo_conformal(traj, i, params) for i in range(len(traj.snapshots))]
    )


def morawetz_estimate_check(traj: Trajectory, params: Params) -> dict:
    """Space-time estimate: int t |psi|^(2 eta + 2) dx dt vs sup_t P(t).

    Valid for N = 1, 1 <= eta < 2.  Both coefficient specializations of
    dP/dt, (4 - 4 eta) and (4 - 2 eta), are reported against the measured
    increment of P.
    """
    if params.dims != 1:
        raise HypothesisViolation("the space-time estimate is one-dimensional")
    if not 1 <= params.eta < 2:
        raise HypothesisViolation(f"estimate needs 1 <= eta < 2, got {params.eta}")

    times = traj.times
    power = 2 * params.eta + 2
    weighted = np.array(
        [s.time * integrate(s.grid, np.abs(s.values) ** power) for s in traj.snapshots]
    )
    potential = np.array(
        [integrate(s.grid, np.abs(s.values) ** power) for s in traj.snapshots]
    )
    lhs = float(np.trapz(weighted, times))
    p_values = pseudo_conformal_series(traj, params)
    rhs = float(np.max(p_values))
    ratio = 0.0 if rhs == 0.0 else lhs / rhs

    base = 2.0 * params.lam / (params.eta + 1.0) * times * potential
    measured_increment = float(p_values[-1] - p_values[0])
    variants = {
        "4_minus_4eta": float(np.trapz((4.0 - 4.0 * params.eta) * base, times)),
        "4_minus_2eta": float(np.trapz((4.0 - 2.0 * params.eta) * base, times)),
    }
    return {
        "lhs": lhs,
        "rhs": rhs,
        "ratio": ratio,
        "pseudo_conformal": p_values,
        "measured_increment": measured_increment,
        "predicted_increment": variants,
        "times": times,
    }


def decay_fit(traj: Trajectory, params: Params, t_min: float | None = None) -> dict:
    """Least-squares fit of log ||psi||_(2 eta + 2) against log t.

    Snapshots with t < t_min are excluded (default: a tenth of the run);
    fewer than 5 usable snapshots raise InsufficientData.
    """
    times = traj.times
    if t_min is None:
        t_min = 0.1 * times[-1]
    power = 2 * params.eta + 2
    usable = times >= max(t_min, 0.0)
    usable &= times > 0
    if np.count_nonzero(usable) < 5:
        raise InsufficientData(
            f"only {np.count_nonzero(usable)} snapshots at t >= {t_min}"
        )
    norms = np.array([lp_norm(s, power) for s in traj.snapshots])[usable]
    ts = times[usable]
    slope, intercept = np.polyfit(np.log(ts), np.log(norms), 1)
    return {
        "exponent": float(slope),
        "prefactor": float(np.exp(intercept)),
        "times": ts,
        "norms": norms,
    }


# ---------------------------------------------------------------------------
# pair-kernel machinery (FFT route for large grids)
# ---------------------------------------------------------------------------

def _minimum_image_lags(grid: Grid) -> list[np.ndarray]:
    axes = []
    for d in range(grid.dims):
        n, h, L = grid.points[d], grid.spacing[d], grid.extent[d]
        lag = h * np.arange(n)
        lag[lag > L / 2.0] -= L
        axes.append(lag)
    return [m for m in np.meshgrid(*axes, indexing="ij")]


def pair_kernel(grid: Grid, regularize: bool = False) -> np.ndarray:
    """Minimum-image 1/|r| kernel in FFT lag layout.

    The zero-lag cell is 0 by convention; with regularize=True the
    distance is floored at half the smallest spacing instead.
    """
    lags = _minimum_image_lags(grid)
    r = np.sqrt(sum(l**2 for l in lags))
    if regularize:
        floor = 0.5 * min(grid.spacing)
        return 1.0 / np.maximum(r, floor)
    out = np.zeros_like(r)
    nz = r > 0
    out[nz] = 1.0 / r[nz]
    return out


def _kernel_convolve(grid: Grid, kernel_hat: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Circular convolution (K * values) * cell volume (the y-integral)."""
    return np.real(_grid.ifft(kernel_hat * _grid.fft(values))) * grid.cell_volume


def interaction_integral(f: Field, weight_density: np.ndarray,
                         kernel_hat: np.ndarray | None = None) -> float:
    """Double integral of |psi(y)|^2 w(x) / |x-y| over the box squared."""
    g = f.grid
    if kernel_hat is None:
        kernel_hat = _grid.fft(pair_kernel(g))
    conv = _kernel_convolve(g, kernel_hat, f.density())
    return integrate(g, weight_density * conv)


def flux_against_unit_separation(f: Field) -> np.ndarray:
    """For every y: integral of (x-y)/|x-y| . flux(x) dx, via correlations.

    Uses the minimum-image unit separation field; the zero-lag direction
    is 0 by the diagonal convention.
    """
    g = f.grid
    lags = _minimum_image_lags(g)
    r = np.sqrt(sum(l**2 for l in lags))
    inv = np.zeros_like(r)
    nz = r > 0
    inv[nz] = 1.0 / r[nz]
    total = np.zeros(g.points)
    for l, qm in zip(lags, current(f)):
        unit_hat = _grid.fft(l * inv)
        total += np.real(_grid.ifft(_grid.fft(qm) * np.conj(unit_hat)))
    return total * g.cell_volume


# ---------------------------------------------------------------------------
# inequality checks
# ---------------------------------------------------------------------------

def stability_check(traj: Trajectory, params: Params, tol: float = 0.05,
                    regularize: bool = False) -> dict:
    """Space-time inequality with the pair-distance weight.

    lhs_frac is the direct kernel evaluation
    (N-1)/2 * int dt (double integral of |psi(y)|^2 (-Lap|psi|^2)(x)/|x-y|),
    which the action derivation actually bounds; the spectral forms under
    the two dimension constants are reported alongside.  For N = 1 both
    left-hand terms vanish identically and the check reports trivial
    satisfaction.
    """
    g = traj.grid
    dims = params.dims
    times = traj.times
    q_list = traj.snapshots
    mass0 = mass(q_list[0])

    flux_sup_series = np.array(
        [float(np.max(np.abs(flux_against_unit_separation(s)))) for s in q_list]
    )
    rhs_sup = float(np.max(flux_sup_series))
    rhs = mass0 * rhs_sup

    cs_bound = np.array(
        [
            np.sqrt(mass(s))
            * np.sqrt(sum(integrate(g, np.abs(gr) ** 2)
                          for gr in _grid.gradient(g, s.values)))
            for s in q_list
        ]
    )

    if dims == 1:
        return {
            "lhs_frac": 0.0,
            "lhs_frac_spectral_exact": 0.0,
            "lhs_frac_spectral_paper": 0.0,
            "lhs_interaction": 0.0,
            "rhs": rhs,
            "flux_sup_series": flux_sup_series,
            "flux_cauchy_schwarz_bound": cs_bound,
            "satisfied": True,
            "trivial": True,
        }

    consts = Constants.for_dimension(dims)
    kernel_hat = _grid.fft(pair_kernel(g, regularize=regularize))
    s_exp = (3.0 - dims) / 4.0

    frac_direct = np.empty(len(q_list))
    frac_spectral = np.empty(len(q_list))
    inter = np.empty(len(q_list))
    for i, snap in enumerate(q_list):
        density = snap.density()
        neg_lap = -np.real(_grid.laplacian(g, density))
        conv = _kernel_convolve(g, kernel_hat, density)
        frac_direct[i] = integrate(g, conv * neg_lap)
        half_frac = _grid.fractional_laplacian(g, density, s_exp)
        frac_spectral[i] = integrate(g, np.abs(half_frac) ** 2)
        inter[i] = integrate(
            g, np.abs(snap.values) ** (2 * params.eta + 2) * conv
        )

    pref = (dims - 1) / 2.0
    lhs_frac = pref * float(np.trapz(frac_direct, times))
    spectral_time_integral = float(np.trapz(frac_spectral, times))
    lhs_frac_exact = pref * consts.kernel_to_spectral * spectral_time_integral
    lhs_frac_paper = pref * consts.c_n_pi * spectral_time_integral
    lhs_interaction = (
        params.lam * params.eta * (dims - 1) / (params.eta + 1.0)
        * float(np.trapz(inter, times))
    )

    lhs = lhs_frac + lhs_interaction
    return {
        "lhs_frac": lhs_frac,
        "lhs_frac_spectral_exact": lhs_frac_exact,
        "lhs_frac_spectral_paper": lhs_frac_paper,
        "lhs_interaction": lhs_interaction,
        "rhs": rhs,
        "flux_sup_series": flux_sup_series,
        "flux_cauchy_schwarz_bound": cs_bound,
        "satisfied": bool(lhs <= rhs * (1.0 + tol)),
        "trivial": False,
    }


def sharpened_bound_check(traj: Trajectory, params: Params,
                          calibrated_constant: float = 1.0,
                          tol: float = 0.0) -> dict:
    """Space-time norm of the fractional density against mass and energy.

    ratio = ||(-Lap)^((3-N)/4) |psi|^2||_{L2 L2} / (T0^(3/4) E0^(1/4)) with
    T0 the initial mass and E0 the initial energy.  The 1/4 energy
    exponent is the one the two-step derivation (flux bound under a square
    root, then Cauchy-Schwarz) yields, and the one that makes the ratio
    amplitude-stable; the variant with a 1/2 exponent is reported as
    ratio_sqrt_energy.  satisfied compares against the calibrated
    constant.
    """
    g = traj.grid
    e0 = energy(traj.snapshots[0], params)
    if e0 < 0:
        raise NegativeEnergy(f"initial energy {e0} is negative")
    t0_mass = mass(traj.snapshots[0])
    s_exp = (3.0 - params.dims) / 4.0
    times = traj.times
    series = np.array(
        [
            integrate(g, np.abs(_grid.fractional_laplacian(g, s.density(), s_exp)) ** 2)
            for s in traj.snapshots
        ]
    )
    lhs = float(np.sqrt(np.trapz(series, times)))
    if lhs == 0.0 and t0_mass == 0.0:
        return {"lhs": 0.0, "rhs": 0.0, "ratio": 0.0,
                "ratio_sqrt_energy": 0.0, "satisfied": True}
    denom = t0_mass**0.75 * e0**0.25
    denom_sqrt = t0_mass**0.75 * np.sqrt(e0)
    ratio = lhs / denom if denom > 0 else np.inf
    return {
        "lhs": lhs,
        "rhs": calibrated_constant * denom,
        "ratio": float(ratio),
        "ratio_sqrt_energy": float(lhs / denom_sqrt) if denom_sqrt > 0 else np.inf,
        "satisfied": bool(lhs <= calibrated_constant * denom * (1.0 + tol)),
    }


# ---------------------------------------------------------------------------
# pointwise Hessian positivity
# ---------------------------------------------------------------------------

def hessian_pd_check(x, y, v) -> float:
    """Quadratic form of the pair-distance Hessian at (x, y) applied to v.

    Closed form (|v|^2 - ((x-y).v)^2/|x-y|^2) / |x-y|, nonnegative by
    Cauchy-Schwarz; zero exactly when v is parallel to x - y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    sep = x - y
    dist = float(np.linalg.norm(sep))
    if dist < 1e-14 * max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(y))):
        raise CoincidentPoints("pair-distance Hessian undefined at x == y")
    proj = float(np.dot(sep, v)) / dist
    return (float(np.dot(v, v)) - proj * proj) / dist


def hessian_pd_check_fd(x, y, v, step: float | None = None) -> float:
    """Same quadratic form by a directional second difference of |x - y|."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    dist = float(np.linalg.norm(x - y))
    if dist < 1e-14 * max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(y))):
        raise CoincidentPoints("pair-distance Hessian undefined at x == y")
    vnorm = float(np.linalg.norm(v))
    if vnorm == 0.0:
        return 0.0
    if step is None:
        step = 1e-5 * dist / vnorm
    plus = float(np.linalg.norm(x + step * v - y))
    minus = float(np.linalg.norm(x - step * v - y))
    return (plus - 2.0 * dist + minus) / step**2
