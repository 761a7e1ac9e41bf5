"""Choosing the number of row and column groups from graphon smoothness.

The top singular triplet of the adjacency matrix is read as a factorization
of the scaled, discretely sampled graphon. Sorting each singular vector and
fitting a line over the central window yields slope and midpoint-value
estimates per side; these combine into directional max-gradient estimates,
the anisotropy factor, and the closed-form optimal group counts.

The sorted-vector residuals are strongly autocorrelated (order statistics),
so the slope/midpoint variance estimates use Newey-West (Bartlett) weighting
rather than plain OLS variances; plain OLS is anti-conservative by an order
of magnitude for the anisotropy z-test.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .network import BipartiteNetwork, density
from .spectral import truncated_svd

# Bartlett lag window as a fraction of the fitted-window length.
_HAC_LAG_FRACTION = 0.25


@dataclass
class SideFit:
    """Linear fit of one sorted singular vector over the central window."""

    slope: float
    midpoint_value: float
    var_slope: float
    var_midpoint: float
    cov: float
    n_window: int


@dataclass
class GradientEstimates:
    nu: float
    x: SideFit
    y: SideFit
    window: float
    m: int
    l: int
    rho_hat: float

    @property
    def p_x(self):
        return self.x.slope

    @property
    def b_x(self):
        return self.x.midpoint_value

    @property
    def p_y(self):
        return self.y.slope

    @property
    def b_y(self):
        return self.y.midpoint_value


@dataclass
class BandwidthEstimate:
    M_x_hat: float
    M_y_hat: float
    M_tilde_sq: float
    gamma_hat: float
    k_x: int
    k_y: int
    k_x_raw: float
    k_y_raw: float
    tau_sq_hat: float
    z: float
    p_value: float
    anisotropy_rejected: bool
    h_x: float
    h_y: float
    rho_hat: float
    gradients: GradientEstimates

    def to_json(self) -> str:
        g = self.gradients
        doc = {
            "nu": g.nu,
            "rho_hat": self.rho_hat,
            "window": g.window,
            "p_x": g.p_x,
            "b_x": g.b_x,
            "p_y": g.p_y,
            "b_y": g.b_y,
            "var_p_x": g.x.var_slope,
            "var_b_x": g.x.var_midpoint,
            "cov_bp_x": g.x.cov,
            "var_p_y": g.y.var_slope,
            "var_b_y": g.y.var_midpoint,
            "cov_bp_y": g.y.cov,
            "M_x_hat": self.M_x_hat,
            "M_y_hat": self.M_y_hat,
            "M_tilde_sq": self.M_tilde_sq,
            "gamma_hat": self.gamma_hat,
            "tau_sq_hat": self.tau_sq_hat,
            "z": self.z,
            "p_value": self.p_value,
            "anisotropy_rejected": self.anisotropy_rejected,
            "k_x": self.k_x,
            "k_y": self.k_y,
            "k_x_raw": self.k_x_raw,
            "k_y_raw": self.k_y_raw,
            "h_x": self.h_x,
            "h_y": self.h_y,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def fit_sorted_vector(values: np.ndarray, window: float = 0.5) -> SideFit:
    """Sort ascending and fit value ~ index over the central window.

    The regressor is the raw 1-based position; `midpoint_value` is the fitted
    value at position (n+1)/2. Variances and the slope/midpoint covariance
    come from a Newey-West covariance of the two-parameter fit.
    """
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    if n < 10:
        raise ValueError("insufficient data for gradient fit (need >= 10 nodes)")
    if not 0 < window <= 1:
        raise ValueError("window must lie in (0, 1]")
    mid = (n + 1) / 2.0
    half = window * n / 2.0
    lo = max(int(math.floor(mid - half)), 1)
    hi = min(int(math.ceil(mid + half)), n)
    x = np.arange(lo, hi + 1, dtype=float)
    y = v[lo - 1 : hi]
    nw = x.size
    xbar = x.mean()
    xc = x - xbar
    sxx = float((xc**2).sum())
    slope = float((xc * (y - y.mean())).sum() / sxx)
    intercept = float(y.mean())  # at xbar
    resid = y - (intercept + slope * xc)

    design = np.column_stack([np.ones(nw), xc])
    bread = np.linalg.inv(design.T @ design)
    scores = resid[:, None] * design
    meat = scores.T @ scores
    lags = max(int(_HAC_LAG_FRACTION * nw), 1)
    for lag in range(1, lags + 1):
        w = 1.0 - lag / (lags + 1.0)
        gamma = scores[lag:].T @ scores[:-lag]
        meat += w * (gamma + gamma.T)
    cov = bread @ meat @ bread  # cov of (intercept@xbar, slope)

    shift = mid - xbar
    var_slope = float(cov[1, 1])
    var_mid = float(cov[0, 0] + 2 * shift * cov[0, 1] + shift**2 * cov[1, 1])
    cov_mid_slope = float(cov[0, 1] + shift * cov[1, 1])
    mid_value = float(intercept + slope * shift)
    return SideFit(
        slope=slope,
        midpoint_value=mid_value,
        var_slope=var_slope,
        var_midpoint=var_mid,
        cov=cov_mid_slope,
        n_window=nw,
    )


def estimate_gradients(net: BipartiteNetwork, window: float = 0.5) -> GradientEstimates:
    """Top singular triplet of the adjacency matrix plus per-side sorted fits.

    Note this decomposes A itself, not the co-Laplacian. Signs are fixed so
    the leading left vector has nonnegative entry sum.
    """
    if net.m < 10 or net.l < 10:
        raise ValueError("insufficient data for gradient fit (need >= 10 nodes per side)")
    if net.d_pp == 0:
        raise ValueError("empty network")
    decomp = truncated_svd(net.adjacency.astype(float), k=1, seed=7)
    nu = float(decomp.singular_values[0])
    u = decomp.left_vectors[:, 0]
    v = decomp.right_vectors[:, 0]
    return GradientEstimates(
        nu=nu,
        x=fit_sorted_vector(u, window),
        y=fit_sorted_vector(v, window),
        window=window,
        m=net.m,
        l=net.l,
        rho_hat=density(net),
    )


def anisotropy_test(g: GradientEstimates):
    """Test H0: gamma = 1 via gamma^2 ~ N(1, tau^2).

    gamma^2 = (b_x p_y l) / (p_x b_y m); tau^2 sums the four relative
    variances of the fits plus the two within-side slope/midpoint covariance
    terms. Returns (gamma_sq, tau_sq, z, p_value, reject).
    """
    for name, val in (("p_x", g.p_x), ("b_x", g.b_x), ("p_y", g.p_y), ("b_y", g.b_y)):
        if val <= 0:
            raise ValueError(f"anisotropy test needs positive fits; {name} = {val}")
    gamma_sq = (g.b_x * g.p_y * g.l) / (g.p_x * g.b_y * g.m)
    tau_sq = (
        g.x.var_midpoint / g.b_x**2
        + g.y.var_slope / g.p_y**2
        + g.x.var_slope / g.p_x**2
        + g.y.var_midpoint / g.b_y**2
        + 2 * g.x.cov / (g.b_x * g.p_x)
        + 2 * g.y.cov / (g.b_y * g.p_y)
    )
    if tau_sq <= 0:
        raise ValueError("degenerate variance estimate")
    z = (gamma_sq - 1.0) / math.sqrt(tau_sq)
    p = 2.0 * float(norm.sf(abs(z)))
    return gamma_sq, tau_sq, z, p, p < 0.05


def k_from_bandwidth(m: int, l: int, rho: float, m_tilde_sq: float, gamma: float):
    """Closed-form optimal group counts, unrounded: (k_x, k_y)."""
    base = (m * l) ** 0.25 * (2.0 * rho * m_tilde_sq) ** 0.25
    return gamma * base, base / gamma


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def select_k(net: BipartiteNetwork, window: float = 0.5, alpha: float = 0.05) -> BandwidthEstimate:
    """Estimate gradients, test anisotropy, and choose (k_x, k_y).

    Directional gradients: M_x = (nu/rho) p_x b_y m, M_y = (nu/rho) b_x p_y l.
    If the anisotropy test fails to reject, gamma is set to 1 and a shared k
    is used. Rounding is half-away-from-zero; the result is clamped to
    [2, floor(min(m, l)/3)].
    """
    g = estimate_gradients(net, window)
    rho = g.rho_hat
    if rho == 0:
        raise ValueError("empty network")
    m_x = (g.nu / rho) * abs(g.p_x) * abs(g.b_y) * g.m
    m_y = (g.nu / rho) * abs(g.b_x) * abs(g.p_y) * g.l
    if m_x <= 0 or m_y <= 0:
        raise ValueError(
            "flat gradient direction (M_x or M_y is not positive); "
            "pass k_x/k_y manually instead of selecting them"
        )
    gamma_sq, tau_sq, z, p, reject = anisotropy_test(g)
    gamma = math.sqrt(gamma_sq)
    m_tilde_sq = gamma_sq * m_x**2 + m_y**2 / gamma_sq
    k_x_raw, k_y_raw = k_from_bandwidth(g.m, g.l, rho, m_tilde_sq, gamma)
    if not reject:
        gamma = 1.0
        m_tilde_sq = m_x**2 + m_y**2
        shared, _ = k_from_bandwidth(g.m, g.l, rho, m_tilde_sq, 1.0)
        kx_unclamped = ky_unclamped = shared
    else:
        kx_unclamped, ky_unclamped = k_x_raw, k_y_raw

    ceiling = max(int(min(g.m, g.l) / 3), 2)
    k_x = min(max(_round_half_away(kx_unclamped), 2), ceiling)
    k_y = min(max(_round_half_away(ky_unclamped), 2), ceiling)
    return BandwidthEstimate(
        M_x_hat=m_x,
        M_y_hat=m_y,
        M_tilde_sq=m_tilde_sq,
        gamma_hat=gamma,
        k_x=k_x,
        k_y=k_y,
        k_x_raw=k_x_raw,
        k_y_raw=k_y_raw,
        tau_sq_hat=tau_sq,
        z=z,
        p_value=p,
        anisotropy_rejected=reject,
        h_x=g.m / k_x,
        h_y=g.l / k_y,
        rho_hat=rho,
        gradients=g,
    )
