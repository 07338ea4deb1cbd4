"""Closed-form price of the European call on the maximum of two assets, and a
Monte Carlo oracle for it.

The bivariate normal CDF follows Drezner & Wesolowsky's single-integral
reduction as refined by Genz (2004), evaluated with 20-point Gauss-Legendre
quadrature in both the moderate- and the high-correlation branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .model import ModelParams

_TWOPI = 2.0 * np.pi
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
DISCOUNT_VARIANTS = ("standard", "printed")


def _bvn_upper(h, k, r):
    """P(X > h, Y > k) for standard normals with correlation r, |r| < 1."""
    h, k, r = np.broadcast_arrays(np.asarray(h, float), np.asarray(k, float), np.asarray(r, float))
    out = np.empty(h.shape)
    mid = np.abs(r) < 0.925

    if np.any(mid):
        hm, km, rm = h[mid], k[mid], r[mid]
        hk = hm * km
        hs = 0.5 * (hm * hm + km * km)
        asr = np.arcsin(rm)
        sn = np.sin(asr[:, None] * (_GL_X + 1.0) / 2.0)
        s = np.exp((sn * hk[:, None] - hs[:, None]) / (1.0 - sn * sn)) @ _GL_W
        out[mid] = s * asr / (2.0 * _TWOPI) + ndtr(-hm) * ndtr(-km)

    hi = ~mid
    if np.any(hi):
        hh, rh = h[hi], r[hi]
        kh = np.where(rh < 0, -k[hi], k[hi])
        hk = hh * kh
        as_ = (1.0 - rh) * (1.0 + rh)
        a = np.sqrt(as_)
        bs = (hh - kh) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        bvn = a * np.exp(-(bs / as_ + hk) / 2.0) * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0)
        b = np.sqrt(bs)
        tail = np.exp(-hk / 2.0) * np.sqrt(_TWOPI) * ndtr(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
        bvn = bvn - np.where(hk > -160.0, tail, 0.0)
        half = a / 2.0
        xs = (half[:, None] * (_GL_X + 1.0)) ** 2
        rs = np.sqrt(1.0 - xs)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            e1 = np.exp(-bs[:, None] / (2.0 * xs) - hk[:, None] / (1.0 + rs)) / rs
            e2 = np.exp(-(bs[:, None] / xs + hk[:, None]) / 2.0) * (1.0 + c[:, None] * xs * (1.0 + d[:, None] * xs))
        terms = np.nan_to_num(e1 - e2, nan=0.0, posinf=0.0, neginf=0.0)
        bvn = -(bvn + half * (terms @ _GL_W)) / _TWOPI
        pos = bvn + ndtr(-np.maximum(hh, kh))
        neg = -bvn + np.maximum(0.0, ndtr(-hh) - ndtr(-kh))
        out[hi] = np.where(rh > 0, pos, neg)
    return out


def bvn_cdf(a, b, rho):
    """Standard bivariate normal CDF M(a, b; rho) = P(X <= a, Y <= b).

    Vectorized; infinite bounds and rho = +-1 are handled as limits.
    """
    a, b, rho = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(rho, float))
    if np.any(np.abs(rho) > 1):
        raise ValueError("|rho| must not exceed 1")
    out = np.empty(a.shape)
    inf_a, inf_b = np.isposinf(a), np.isposinf(b)
    zero = np.isneginf(a) | np.isneginf(b)
    out[inf_a & inf_b] = 1.0
    only_a = inf_a & ~inf_b & ~zero
    only_b = inf_b & ~inf_a & ~zero
    out[only_a] = ndtr(b[only_a])
    out[only_b] = ndtr(a[only_b])
    out[zero] = 0.0
    rest = ~(inf_a | inf_b | zero)
    up = rest & (rho >= 1)
    dn = rest & (rho <= -1)
    out[up] = ndtr(np.minimum(a[up], b[up]))
    out[dn] = np.maximum(0.0, ndtr(a[dn]) + ndtr(b[dn]) - 1.0)
    gen = rest & (np.abs(rho) < 1)
    if np.any(gen):
        out[gen] = _bvn_upper(-a[gen], -b[gen], rho[gen])
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def bs_call(s, strike, r, sigma, t):
    """Black-Scholes price of a European call (no dividends)."""
    s = np.asarray(s, float)
    with np.errstate(divide="ignore"):
        vol = sigma * np.sqrt(t)
        d1 = (np.log(s / strike) + (r + 0.5 * sigma**2) * t) / vol
    d2 = d1 - vol
    val = s * ndtr(d1) - strike * np.exp(-r * t) * ndtr(d2)
    return np.where(s > 0, val, 0.0)


def payoff(x, y, strike):
    """max(max(x, y) - K, 0)."""
    return np.maximum(np.maximum(x, y) - strike, 0.0)


@dataclass(frozen=True)
class AnalyticInputs:
    x: np.ndarray
    y: np.ndarray
    params: ModelParams
    tau: float

    @property
    def sigma(self) -> float:
        p = self.params
        return float(np.sqrt(p.sigma1**2 + p.sigma2**2 - 2.0 * p.rho * p.sigma1 * p.sigma2))


def rainbow_max_call(x, y, params: ModelParams, tau: float | None = None, variant: str = "standard"):
    """Price of the call on max(x, y) with strike K and time to maturity ``tau``.

    Cost of carry equals r for both assets.  ``variant='printed'`` multiplies
    the two asset legs by exp(-r tau) as well, the form that appears in some
    references; it disagrees with Monte Carlo and exists only for comparison.
    On the axes the price reduces to a single-asset Black-Scholes call.
    """
    if variant not in DISCOUNT_VARIANTS:
        raise ValueError(f"variant must be one of {DISCOUNT_VARIANTS}, got {variant!r}")
    t = params.maturity if tau is None else float(tau)
    if not t > 0:
        raise ValueError(f"time to maturity must be positive, got {t!r}")
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    s1, s2, rho, r, k = params.sigma1, params.sigma2, params.rho, params.r, params.strike
    sig = np.sqrt(s1**2 + s2**2 - 2.0 * rho * s1 * s2)
    st = np.sqrt(t)
    rho1 = (s1 - rho * s2) / sig
    rho2 = (s2 - rho * s1) / sig

    out = np.zeros(x.shape)
    both = (x > 0) & (y > 0)
    if np.any(both):
        xb, yb = x[both], y[both]
        d = (np.log(xb / yb) + 0.5 * sig**2 * t) / (sig * st)
        y1 = (np.log(xb / k) + (r + 0.5 * s1**2) * t) / (s1 * st)
        y2 = (np.log(yb / k) + (r + 0.5 * s2**2) * t) / (s2 * st)
        legs = xb * bvn_cdf(y1, d, rho1) + yb * bvn_cdf(y2, -d + sig * st, rho2)
        if variant == "printed":
            legs = legs * np.exp(-r * t)
        cash = k * np.exp(-r * t) * (1.0 - bvn_cdf(-y1 + s1 * st, -y2 + s2 * st, rho))
        out[both] = legs - cash
    only_x = (x > 0) & ~(y > 0)
    only_y = (y > 0) & ~(x > 0)
    out[only_x] = bs_call(x[only_x], k, r, s1, t)
    out[only_y] = bs_call(y[only_y], k, r, s2, t)
    return out if out.ndim else float(out)


def exact_boundary(params: ModelParams, variant: str = "standard"):
    """Boundary provider: the closed form at time level tau (the payoff at tau = 0)."""

    def provider(x, y, tau):
        if tau <= 0:
            return payoff(np.asarray(x, float), np.asarray(y, float), params.strike)
        return rainbow_max_call(x, y, params, tau, variant)

    return provider


def zero_axis_boundary(params: ModelParams, variant: str = "standard"):
    """Provider with U = 0 on the axes x = 0, y = 0 and the closed form elsewhere."""
    exact = exact_boundary(params, variant)

    def provider(x, y, tau):
        val = np.asarray(exact(x, y, tau), float)
        return np.where((np.asarray(x) == 0) | (np.asarray(y) == 0), 0.0, val)

    return provider


def mc_price(params: ModelParams, x: float, y: float, n_paths: int = 1_000_000, seed: int = 0,
             tau: float | None = None, chunk: int = 250_000) -> tuple[float, float]:
    """Monte Carlo price and standard error from exact terminal lognormal sampling.

    Paths are drawn in fixed-size chunks from one ``numpy.random.default_rng(seed)``
    stream, so the result depends only on (params, x, y, n_paths, seed).
    """
    if n_paths < 1000:
        raise ValueError("n_paths must be at least 1000")
    t = params.maturity if tau is None else float(tau)
    rng = np.random.default_rng(seed)
    s1, s2, rho, r = params.sigma1, params.sigma2, params.rho, params.r
    lr = np.sqrt(1.0 - rho * rho)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_paths:
        m = min(chunk, n_paths - done)
        z = rng.standard_normal((2, m))
        z2 = rho * z[0] + lr * z[1]
        xt = x * np.exp((r - 0.5 * s1**2) * t + s1 * np.sqrt(t) * z[0])
        yt = y * np.exp((r - 0.5 * s2**2) * t + s2 * np.sqrt(t) * z2)
        pay = payoff(xt, yt, params.strike)
        total += float(np.sum(pay))
        total_sq += float(np.sum(pay * pay))
        done += m
    mean = total / n_paths
    var = max(total_sq / n_paths - mean * mean, 0.0) * n_paths / (n_paths - 1)
    disc = np.exp(-r * t)
    return float(disc * mean), float(disc * np.sqrt(var / n_paths))
