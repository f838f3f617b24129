"""Power nonlinearity lam*|psi|^(2*eta)*psi and its structural checks.

Besides the pointwise nonlinearity itself this module carries the two
empirical ratio probes used to certify the Lipschitz-type structure of the
source term, and an interpolation-exponent solver plus the corresponding
ratio check for derivative interpolation inequalities.  Derivative orders
in the interpolation check are realized spectrally (|xi|^order), which for
integer orders in 1D coincides with classical derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid as _grid
from .errors import DegenerateDenominator, InadmissibleExponents
from .field import Field, Params, lp_norm

_COND_TOL = 1e-12


def apply_nonlinearity(f: Field, params: Params) -> Field:
    """Pointwise lam*|psi|^(2*eta)*psi, preserving grid and time stamp."""
    amp = np.abs(f.values) ** (2 * params.eta)
    return f.with_values(params.lam * amp * f.values)


def _source(z: complex, params: Params) -> complex:
    return params.lam * abs(z) ** (2 * params.eta) * z


def h1_ratio(a: complex, b: complex, params: Params) -> float:
    """|F(a)-F(b)| / (|a-b| (|a|^2eta + |b|^2eta)).

    Bounded above by a finite constant over the complex plane; the sharp
    value for a given eta is found empirically by sweeping pairs.
    """
    if a == b:
        raise ValueError("h1_ratio needs two distinct sample points")
    if abs(a) == 0.0 and abs(b) == 0.0:
        raise DegenerateDenominator("both sample points vanish")
    num = abs(_source(a, params) - _source(b, params))
    den = abs(a - b) * (abs(a) ** (2 * params.eta) + abs(b) ** (2 * params.eta))
    return num / den


def _radial_derivative(r: float, sigma: int, params: Params) -> float:
    """sigma-th derivative of the radial profile g(r) = lam * r^(2*eta+1)."""
    power = 2 * params.eta + 1
    if sigma > power:
        return 0.0
    coeff = math.factorial(power) / math.factorial(power - sigma)
    return params.lam * coeff * r ** (power - sigma)


def h2_ratio(a: complex, b: complex, sigma: int, params: Params) -> float:
    """Ratio for the sigma-th radial derivative of the source profile.

    The derivative is taken on g(r) = lam*r^(2*eta+1) evaluated at |a|, |b|
    (phase carried separately; only magnitudes enter the bound), against
    the denominator |a-b| (|a|^(2*eta-sigma) + |b|^(2*eta-sigma)).
    """
    if a == b:
        raise ValueError("h2_ratio needs two distinct sample points")
    if abs(a) == 0.0 and abs(b) == 0.0:
        raise DegenerateDenominator("both sample points vanish")
    if sigma < 0:
        raise ValueError("sigma must be a nonnegative integer")
    num = abs(_radial_derivative(abs(a), sigma, params) - _radial_derivative(abs(b), sigma, params))
    power = 2 * params.eta - sigma
    den = abs(a - b) * (abs(a) ** power + abs(b) ** power)
    return num / den


@dataclass(frozen=True)
class GNExponents:
    """Admissible exponent tuple for the derivative interpolation check.

    Satisfies 1/p = beta/N + (1/r - gamma/N)*nu + (1-nu)/s with
    beta/gamma <= nu <= 1.  r, s and p may be inf.
    """

    beta: int
    gamma: int
    p: float
    r: float
    s: float
    nu: float
    dims: int

    def balance_residual(self) -> float:
        lhs = _inv(self.p)
        rhs = (
            self.beta / self.dims
            + (_inv(self.r) - self.gamma / self.dims) * self.nu
            + (1.0 - self.nu) * _inv(self.s)
        )
        return abs(lhs - rhs)

    def __post_init__(self):
        if not self.beta / self.gamma - _COND_TOL <= self.nu <= 1.0 + _COND_TOL:
            raise InadmissibleExponents(
                f"nu={self.nu} outside [beta/gamma, 1] = [{self.beta / self.gamma}, 1]"
            )
        if self.balance_residual() > _COND_TOL:
            raise InadmissibleExponents(
                f"exponent balance violated by {self.balance_residual():.3e}"
            )


def _inv(p: float) -> float:
    return 0.0 if p == np.inf else 1.0 / p


def gn_solve(beta: int, gamma: int, dims: int, r: float, s: float) -> GNExponents:
    """Pick the interpolation weight and target exponent for given orders.

    Uses nu = beta/gamma (the equality end of the admissible range, which
    is the choice the higher-derivative estimates need); if the implied
    1/p falls outside [0, 1] the weight is advanced to the smallest
    admissible value, and failing that the exponents are rejected.
    """
    if gamma < 1 or beta < 0 or beta > gamma:
        raise InadmissibleExponents(
            f"need 0 <= beta <= gamma with gamma >= 1, got beta={beta}, gamma={gamma}"
        )

    def inv_p(nu: float) -> float:
        return beta / dims + (_inv(r) - gamma / dims) * nu + (1.0 - nu) * _inv(s)

    nu = beta / gamma
    if not -_COND_TOL <= inv_p(nu) <= 1.0 + _COND_TOL:
        # 1/p is affine in nu; look for the admissible end of the interval
        lo, hi = beta / gamma, 1.0
        candidates = sorted((inv_p(lo), inv_p(hi)))
        if candidates[1] < 0.0 or candidates[0] > 1.0:
            raise InadmissibleExponents(
                f"no nu in [{lo}, {hi}] yields a Lebesgue exponent in [1, inf]"
            )
        slope = inv_p(hi) - inv_p(lo)
        if abs(slope) < _COND_TOL:
            raise InadmissibleExponents("degenerate balance: 1/p constant and out of range")
        target = np.clip(inv_p(lo), 0.0, 1.0)
        nu = lo + (target - inv_p(lo)) / slope
    ip = inv_p(nu)
    p = np.inf if abs(ip) <= _COND_TOL else 1.0 / ip
    return GNExponents(beta=beta, gamma=gamma, p=p, r=r, s=s, nu=float(nu), dims=dims)


def _spectral_order_norm(f: Field, order: int, p: float) -> float:
    """L^p norm of the |xi|^order multiplier applied to f."""
    if order == 0:
        return lp_norm(f, p)
    g = f.grid
    k2 = g.k_sq
    mult = np.zeros_like(k2)
    nonzero = k2 > 0.0
    mult[nonzero] = k2[nonzero] ** (order / 2.0)
    derived = _grid.ifft(mult * _grid.fft(f.values))
    return lp_norm(f.with_values(derived), p)


def gn_check(f: Field, e: GNExponents) -> float:
    """Interpolation ratio ||D^beta f||_p / (||D^gamma f||_r^nu ||f||_s^(1-nu)).

    Scale-invariant in f by construction; bounded over field suites when
    the exponents are admissible.
    """
    if f.grid.dims != e.dims:
        raise ValueError("exponent tuple was built for a different dimension")
    num = _spectral_order_norm(f, e.beta, e.p)
    den_grad = _spectral_order_norm(f, e.gamma, e.r) ** e.nu
    den_f = lp_norm(f, e.s) ** (1.0 - e.nu)
    den = den_grad * den_f
    if den == 0.0:
        raise DegenerateDenominator("interpolation denominator vanished")
    return num / den
