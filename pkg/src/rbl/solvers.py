"""Saddle-point engines for bundle pricing against two-point product adversaries.

Both orders of play are solved on grids with golden-section polish. The inner
tail P(sum >= p) goes through the binomial survival function rather than the
explicit m+1 point law, so m = 1e4 stays quick; alpha grids are geometric in
1 - alpha down to 1e-12 because the damaging adversaries sit next to alpha = 1.
Every report carries a certificate pair: an analytic lower chain and an upper
bound that the computed value can be checked against.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom

from .ambiguity import MeanMadSpec, make_two_point
from .bundling import best_bundle_price, guaranteed_sale_price
from .concentration import concentration_constant
from .errors import NegativePrice
from .optimize import golden_max, golden_min
from .sum_law import product_sum

ALPHA_GRID = 2048
PRICE_GRID = 1024
EPS_GRID = 512
# Smallest 1 - alpha the grids reach.
U_FLOOR = 1e-12
BRACKET_TOL = 1e-10
# Best-response scan keeps the full k range up to this m, then windows.
_FULL_RANGE_CAP = 2048
_WINDOW_SIGMAS = 40.0


@dataclass(frozen=True)
class SaddleReport:
    """One solved game: per-item value, the argmax price, the argmin alpha,
    and a (lower, upper) certificate the value must sit between."""

    m: int
    value: float
    price: float
    alpha: float
    certificate: tuple[float, float]


def _u_grid(spec: MeanMadSpec, n: int) -> np.ndarray:
    return np.geomspace(1.0 - spec.alpha_min, U_FLOOR, n)


def _tails(spec: MeanMadSpec, m: int, p: float, u: np.ndarray) -> np.ndarray:
    """P(sum >= p) for each u = 1 - alpha, sum of m i.i.d. two-point values.

    The sum hits m*x + k*(y-x) when k of the m draws come up high, so the tail
    is a Binomial(m, u) survival at the crossing index; the ceil is nudged so
    the inclusive boundary holds exactly in floats.
    """
    alpha = 1.0 - u
    x = spec.mu - spec.d / (2.0 * alpha)
    y = spec.mu + spec.d / (2.0 * u)
    gap = y - x
    k = np.clip(np.ceil((p - m * x) / gap), 0.0, m + 1.0)
    for _ in range(2):
        k = np.where((k > 0) & (m * x + (k - 1.0) * gap >= p), k - 1.0, k)
    for _ in range(2):
        k = np.where((k <= m) & (m * x + k * gap < p), k + 1.0, k)
    return binom.sf(k - 1.0, m, u)


def iid_tail(spec: MeanMadSpec, m: int, p: float, alpha: float) -> float:
    """P(sum of m i.i.d. two-point values >= p) at a single alpha."""
    return float(_tails(spec, m, p, np.array([1.0 - alpha]))[0])


def worst_case_alpha(spec: MeanMadSpec, m: int, p: float,
                     grid: int = ALPHA_GRID) -> tuple[float, float]:
    """Adversary's best two-point parameter against a fixed bundle price p.

    Returns (alpha, value) with value = p * P(sum >= p) / m minimized over a
    geometric 1-alpha grid followed by golden-section polish on the winning
    bracket (to width 1e-10). The result is the best point seen; it is global
    only up to grid density, since the objective jumps where support points
    cross p.
    """
    if p < 0:
        raise NegativePrice(f"price must be nonnegative, got {p!r}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if p == 0.0:
        return spec.alpha_min, 0.0
    u = _u_grid(spec, grid)
    vals = p * _tails(spec, m, p, u) / m
    i = int(np.argmin(vals))
    lo = float(u[min(i + 1, grid - 1)])  # u is descending
    hi = float(u[max(i - 1, 0)])

    def f(uu: float) -> float:
        return float(p * _tails(spec, m, p, np.array([uu]))[0] / m)

    u_best, v_best = golden_min(f, lo, hi, tol=BRACKET_TOL)
    if vals[i] <= v_best:
        u_best, v_best = float(u[i]), float(vals[i])
    return 1.0 - u_best, float(v_best)


def _chain_lower_at(spec: MeanMadSpec, m: int, eps: float) -> float:
    return guaranteed_sale_price(spec, m, eps) / m \
        * (1.0 - concentration_constant(spec, eps).f / m)


def maximin_certificate_lower(spec: MeanMadSpec, m: int,
                              grid: int = EPS_GRID) -> float:
    """Best guaranteed-sale chain bound: max over eps of
    p*(eps)/m * (1 - f(mu,d,eps)/m), clipped at zero."""
    hi = 1.0 - spec.alpha_min
    eps = np.linspace(hi * 1e-6, hi * (1.0 - 1e-6), grid)
    vals = np.array([_chain_lower_at(spec, m, e) for e in eps])
    i = int(np.argmax(vals))
    _, v_best = golden_max(
        lambda e: _chain_lower_at(spec, m, e),
        float(eps[max(i - 1, 0)]),
        float(eps[min(i + 1, grid - 1)]),
        tol=1e-12,
    )
    return max(0.0, float(max(v_best, vals[i])))


def maximin_bundling_value(spec: MeanMadSpec, m: int,
                           price_grid: int = PRICE_GRID,
                           alpha_grid: int = ALPHA_GRID) -> SaddleReport:
    """Price maximizing the adversarially worst bundle revenue per item.

    Outer maximization over p in [0, m*mu] by grid plus golden-section polish,
    inner minimization by worst_case_alpha. The certificate pairs the
    guaranteed-sale chain bound with the analytic ceiling mu - d/2.
    """
    ps = np.linspace(0.0, m * spec.mu, price_grid)
    vals = np.array([worst_case_alpha(spec, m, p, grid=alpha_grid)[1] for p in ps])
    j = int(np.argmax(vals))
    p_best, v_best = golden_max(
        lambda p: worst_case_alpha(spec, m, p, grid=alpha_grid)[1],
        float(ps[max(j - 1, 0)]),
        float(ps[min(j + 1, price_grid - 1)]),
        tol=BRACKET_TOL * max(1.0, m * spec.mu),
    )
    if vals[j] >= v_best:
        p_best, v_best = float(ps[j]), float(vals[j])
    alpha_best = worst_case_alpha(spec, m, p_best, grid=alpha_grid)[0]
    return SaddleReport(
        m=m,
        value=float(v_best),
        price=float(p_best),
        alpha=float(alpha_best),
        certificate=(maximin_certificate_lower(spec, m), spec.mu - spec.d / 2.0),
    )


def _best_response(spec: MeanMadSpec, m: int, u: float) -> tuple[float, float]:
    """Seller's best bundle price and per-item revenue when highs are Binomial(m, u).

    Only sum support points can be optimal. Past _FULL_RANGE_CAP the scan windows
    k to 40 sigma around m*u (plus k=0, the guaranteed sale) and re-adds the
    survival mass beyond the window, so large m costs a few hundred terms.
    """
    alpha = 1.0 - u
    x = spec.mu - spec.d / (2.0 * alpha)
    y = spec.mu + spec.d / (2.0 * u)
    gap = y - x
    if m <= _FULL_RANGE_CAP:
        ks = np.arange(m + 1)
        sf_beyond = 0.0
    else:
        sig = np.sqrt(m * u * (1.0 - u))
        lo = max(int(np.floor(m * u - _WINDOW_SIGMAS * sig)), 0)
        hi = min(int(np.ceil(m * u + _WINDOW_SIGMAS * sig)), m)
        ks = np.arange(lo, hi + 1)
        sf_beyond = float(binom.sf(hi, m, u))
    logc = gammaln(m + 1.0) - gammaln(ks + 1.0) - gammaln(m - ks + 1.0)
    pmf = np.exp(logc + (m - ks) * np.log1p(-u) + ks * np.log(u))
    sf = np.cumsum(pmf[::-1])[::-1] + sf_beyond
    s = m * x + ks * gap
    revs = s * sf
    j = int(np.argmax(revs))
    best_price, best_rev = float(s[j]), float(revs[j])
    if ks[0] > 0 and m * x > best_rev:
        best_price, best_rev = m * x, m * x  # all-low point sells surely
    return best_price, best_rev / m


def minimax_bundling_value(spec: MeanMadSpec, m: int,
                           alpha_grid: int = ALPHA_GRID) -> SaddleReport:
    """Two-point i.i.d. parameter minimizing the seller's best-response revenue.

    Grid plus golden-section polish over alpha; reports the argmin alpha and the
    best-response price there. certificate.lower reuses the guaranteed-sale
    chain (the other play order can only do worse for the adversary) and
    certificate.upper is the raw grid minimum, valid since every evaluated
    alpha upper-bounds the infimum.
    """
    u = _u_grid(spec, alpha_grid)
    vals = np.array([_best_response(spec, m, float(uu))[1] for uu in u])
    i = int(np.argmin(vals))
    raw_min = float(vals[i])
    u_best, v_best = golden_min(
        lambda z: _best_response(spec, m, z)[1],
        float(u[min(i + 1, alpha_grid - 1)]),
        float(u[max(i - 1, 0)]),
        tol=BRACKET_TOL,
    )
    if raw_min <= v_best:
        u_best, v_best = float(u[i]), raw_min
    price = _best_response(spec, m, u_best)[0]
    return SaddleReport(
        m=m,
        value=float(v_best),
        price=float(price),
        alpha=1.0 - u_best,
        certificate=(maximin_certificate_lower(spec, m), raw_min),
    )


def heterogeneous_probe_values(spec: MeanMadSpec, m: int, n_probes: int = 16,
                               seed: int = 0) -> np.ndarray:
    """Best-response per-item revenues against random non-identical two-point
    products (exact convolution, so m is capped at 20).

    Companion evidence for minimax_bundling_value; no ordering against the
    i.i.d. value is asserted anywhere, since none is known at finite m.
    """
    rng = np.random.default_rng(seed)
    a0 = spec.alpha_min
    out = np.empty(n_probes)
    for i in range(n_probes):
        alphas = np.clip(a0 + (1.0 - a0) * rng.random(m), a0, 1.0 - 1e-12)
        law = product_sum([make_two_point(spec, float(a)) for a in alphas])
        out[i] = best_bundle_price(law).revenue / m
    return out


def extreme_adversary_alpha(m: int) -> float:
    """log(1 - alpha) for the near-degenerate adversary 1 - alpha = m^-(m+1) e^-m.

    Kept in the log domain: the quantity underflows to zero as a plain float
    from about m = 130 on, while the log is exact in doubles up to m = 1e4.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    return -(m + 1.0) * float(np.log(m)) - m


def extreme_adversary_logs(m: int) -> tuple[float, float]:
    """(log alpha^m, log alpha^(m-1)(1-alpha)) for the same adversary.

    Once 1 - alpha is below double rounding, log alpha is -(1 - alpha) to full
    precision, and m log alpha = -exp(log m + log(1-alpha)) keeps the product
    inside the exponent instead of multiplying an underflowed zero.
    """
    log1m = extreme_adversary_alpha(m)
    if log1m > -50.0:
        log_alpha = float(np.log1p(-np.exp(log1m)))
        m_log_alpha = m * log_alpha
    else:
        log_alpha = -float(np.exp(log1m))
        m_log_alpha = -float(np.exp(np.log(m) + log1m))
    return m_log_alpha, m_log_alpha - log_alpha + log1m


def extreme_adversary_second_point_revenue(spec: MeanMadSpec, m: int) -> float:
    """Per-item revenue of pricing at the second sum support point under the
    extreme adversary; tends to d/2 and never overflows, any m.

    The member only belongs to the family once 1 - alpha <= 1 - alpha_min,
    which holds for all but the smallest m; the formula is evaluated as stated
    either way. With z = 1 - alpha and t = m z, the survival 1 - alpha^m is
    r * t where r = -expm1(-t)/t, and the diverging upper point y enters only
    through y z = mu z + d/2, so everything stays finite.
    """
    log1m = extreme_adversary_alpha(m)
    if log1m > -50.0:
        z = float(np.exp(log1m))
        alpha = 1.0 - z
        x = spec.mu - spec.d / (2.0 * alpha)
        y = spec.mu + spec.d / (2.0 * z)
        survive = -float(np.expm1(m * np.log1p(-z)))
        return ((m - 1) * x + y) * survive / m
    x = spec.mu - spec.d / 2.0  # alpha is 1 up to rounding
    z = float(np.exp(log1m))
    t = float(np.exp(np.log(m) + log1m))
    r = -float(np.expm1(-t)) / t if t > 0.0 else 1.0
    return ((m - 1) * x + spec.mu) * r * z + spec.d / 2.0 * r


def append_saddle_csv(path: str, spec: MeanMadSpec, objective: str,
                      report: SaddleReport) -> None:
    """Append one study row, writing the header on first touch."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    lo, hi = report.certificate
    row = ",".join([
        f"{spec.mu:.17g}", f"{spec.d:.17g}", str(report.m), objective,
        f"{report.value:.17g}", f"{report.price:.17g}", f"{report.alpha:.17g}",
        f"{lo:.17g}", f"{hi:.17g}",
    ])
    with open(path, "a") as fh:
        if fresh:
            fh.write("mu,d,m,objective,value,price,alpha,lower,upper\n")
        fh.write(row + "\n")
