"""Closed-form limits and finite-m bound chains for ratio and regret pricing.

The large-m story is three constants: bundle pricing guarantees mu - d/2 per
item, the revenue share of the first-best approaches 1 - d/(2 mu), and the
per-item regret approaches d/2. This module evaluates the finite-m chains that
sandwich those limits, the positive gap xi separating the dispersed regime
d > mu from mu - d/2, and empirical objective values where the first-best term
is either solved exactly (m <= 3) or replaced by its m*mu ceiling.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ambiguity import MeanMadSpec, make_two_point
from .bundling import (
    guaranteed_sale_price,
    second_point_revenue,
    separate_sale_revenue,
)
from .concentration import concentration_constant
from .errors import LambdaOutOfRange, ParamOutOfRange, RangeError
from .opt_oracle import opt_deterministic
from .optimize import golden_max, golden_min
from .solvers import iid_tail, maximin_bundling_value
from .sum_law import iid_two_point_sum, tail_prob

_XI_GRID = 10_000
_XI_LAMBDA_MAX = 1e6
_GAMMA_GRID = 8192
_EMP_GRID = 256
# Exact first-best oracle is affordable this far.
_ORACLE_CAP = 3
_U_FLOOR = 1e-12


@dataclass(frozen=True)
class AsymptoticTargets:
    """The four closed-form large-m constants for one (mu, d) pair."""

    spec: MeanMadSpec
    maximin_limit: float
    ratio_limit: float
    regret_limit: float
    minimax_upper: float


def asymptotic_targets(spec: MeanMadSpec) -> AsymptoticTargets:
    maximin = spec.mu - spec.d / 2.0
    regret = spec.d / 2.0
    # ratio_limit derived from maximin_limit so the ratio identity is exact in floats
    return AsymptoticTargets(
        spec=spec,
        maximin_limit=maximin,
        ratio_limit=maximin / spec.mu,
        regret_limit=regret,
        minimax_upper=max(maximin, regret),
    )


def schedule_eps_gamma(m: int) -> float:
    """Joint scale eps = gamma = m^(-1/4) used by the convergence studies."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    return float(m) ** -0.25


def _g(spec: MeanMadSpec, lam) -> np.ndarray:
    return -np.expm1(-1.0 / lam) * (spec.mu + (lam - 1.0) * spec.d / 2.0)


def second_point_limit(spec: MeanMadSpec, lam: float) -> float:
    """Limiting revenue of the second-support price when the expected number of
    high draws tends to lam: (1 - e^(-1/lam)) (mu + (lam - 1) d/2).

    Rises from mu - d/2 (lam -> 0) to d/2 (lam -> infinity); expm1 keeps the
    large-lam end from cancelling.
    """
    if not lam > 0.0:
        raise LambdaOutOfRange(f"need lambda > 0, got {lam!r}")
    return float(_g(spec, lam))


def xi_gap(spec: MeanMadSpec) -> dict:
    """Certified positive gap between the dispersed-regime value and mu - d/2.

    Returns {gamma, tau0, xi0, xi1, xi}: gamma and tau0 are the largest values
    satisfying 0.99 (1-gamma) mu >= d/2 and 1 - (d/(2 gamma mu))^2 tau0 >= 0.99
    with equality; xi0 = d - mu; xi1 is the minimum of
    second_point_limit - (mu - d/2) over a log grid on [tau0, 1e6], floored by a
    first-order bound past the grid end; xi = min(xi0, xi1).

    Only one valid concrete choice is produced, not a maximal gap. The 0.99
    constant in the construction needs d < 1.98 mu, so the top slice of the
    d-range is rejected outright rather than fed a negative gamma.
    """
    mu, d = spec.mu, spec.d
    if not (mu < d < 2.0 * mu):
        raise RangeError(f"need mu < d < 2*mu, got mu={mu!r}, d={d!r}")
    if d >= 1.98 * mu:
        raise RangeError(
            f"the 0.99 headroom constant caps the range at d < 1.98*mu; "
            f"got d={d!r}, mu={mu!r}"
        )
    gamma = 1.0 - d / (1.98 * mu)
    tau0 = 0.01 * (2.0 * gamma * mu / d) ** 2
    xi0 = d - mu
    base = mu - d / 2.0
    lam = np.geomspace(tau0, _XI_LAMBDA_MAX, _XI_GRID)
    grid_min = float(np.min(_g(spec, lam) - base))
    # past the grid the gap climbs back toward xi0 = d - mu
    tail_floor = (d - mu) - d / (4.0 * _XI_LAMBDA_MAX)
    xi1 = min(grid_min, tail_floor)
    return {"gamma": gamma, "tau0": tau0, "xi0": xi0, "xi1": xi1,
            "xi": min(xi0, xi1)}


def variance_boundary_member(spec: MeanMadSpec) -> float:
    """Variance of the two-point member whose low point sits at zero:
    (d/(2mu)) mu^2 + (1 - d/(2mu)) (d mu / (2mu - d))^2."""
    a = spec.alpha_min
    dev = spec.d * spec.mu / (2.0 * spec.mu - spec.d)
    return a * spec.mu ** 2 + (1.0 - a) * dev ** 2


def ratio_bound_chain(spec: MeanMadSpec, m: int, eps: float) -> dict:
    """Finite-m sandwich for the revenue share of the first-best.

    Returns {lower, upper, g}. lower divides the guaranteed-sale revenue floor
    by the m*mu ceiling and is reported raw (it goes negative when f >= m).
    upper optimizes (2mu-d)/(2mu) / ((1-gamma)(1 - g/((gamma mu)^2 m))) over a
    log gamma-grid with golden polish; +inf until m clears the bracket.
    """
    cert = concentration_constant(spec, eps)
    lower = guaranteed_sale_price(spec, m, eps) * (1.0 - cert.f / m) / (m * spec.mu)
    g = variance_boundary_member(spec)
    head = (2.0 * spec.mu - spec.d) / (2.0 * spec.mu)

    def upper_at(gam: float) -> float:
        bracket = 1.0 - g / ((gam * spec.mu) ** 2 * m)
        if gam <= 0.0 or gam >= 1.0 or bracket <= 0.0:
            return float("inf")
        return head / ((1.0 - gam) * bracket)

    gam = np.geomspace(1e-8, 1.0 - 1e-8, _GAMMA_GRID)
    bracket = 1.0 - g / ((gam * spec.mu) ** 2 * m)
    vals = np.full(gam.size, np.inf)
    ok = bracket > 0.0
    vals[ok] = head / ((1.0 - gam[ok]) * bracket[ok])
    i = int(np.argmin(vals))
    if np.isinf(vals[i]):
        upper = float("inf")
    else:
        _, refined = golden_min(
            upper_at,
            float(gam[max(i - 1, 0)]),
            float(gam[min(i + 1, _GAMMA_GRID - 1)]),
            tol=1e-12,
        )
        upper = float(min(refined, vals[i]))
    return {"lower": float(lower), "upper": upper, "g": g}


def regret_bound_chain(spec: MeanMadSpec, m: int, eps: float,
                       gamma: float) -> dict:
    """Finite-m sandwich for per-item regret, {upper, lower}.

    upper = mu - (guaranteed-sale revenue floor)/m; lower is the case minimum
    of the Chebyshev-corrected separate-sale shortfall against the analytic cap
    max(mu - d/2, d/2). Both tend to d/2 as (m, 1/eps, 1/gamma) grow together.
    """
    if not (0.0 < gamma < 1.0):
        raise ParamOutOfRange(f"need 0 < gamma < 1, got {gamma!r}")
    cert = concentration_constant(spec, eps)
    upper = spec.mu - guaranteed_sale_price(spec, m, eps) / m * (1.0 - cert.f / m)
    g = variance_boundary_member(spec)
    corrected = (1.0 - gamma) * spec.mu \
        * (1.0 - g / ((gamma * spec.mu) ** 2 * m)) - (spec.mu - spec.d / 2.0)
    cap = max(spec.mu - spec.d / 2.0, spec.d / 2.0)
    return {"upper": float(upper), "lower": float(min(corrected, cap))}


@dataclass(frozen=True)
class EmpiricalReport:
    """Finite-m objective value with the first-best handling mode on record."""

    objective: str
    m: int
    value: float
    mode: str
    price: float
    alpha: float
    opt_lower: Optional[float] = None


def _oracle_curves(spec: MeanMadSpec, m: int, grid: int):
    u = np.geomspace(1.0 - spec.alpha_min, _U_FLOOR, grid)
    laws = []
    opts = np.empty(grid)
    for i, uu in enumerate(u):
        dist = make_two_point(spec, max(1.0 - float(uu), spec.alpha_min))
        laws.append(iid_two_point_sum(dist, m))
        opts[i] = opt_deterministic([dist], m, symmetric=True).revenue
    return u, laws, opts


def _constructive_opt_lower(spec: MeanMadSpec, m: int, alpha: float) -> float:
    """Best of three explicit mechanisms at this adversary (diagnostic only):
    the second-support bundle price, separate sales, and the bundle priced at
    (1-gamma) m mu on the m^(-1/4) schedule."""
    alpha = min(max(alpha, spec.alpha_min), 1.0 - _U_FLOOR)
    dist = make_two_point(spec, alpha)
    second = m * second_point_revenue(spec, alpha, m)
    separate = separate_sale_revenue(dist, m)
    p = (1.0 - schedule_eps_gamma(m)) * m * spec.mu
    bundle = p * iid_tail(spec, m, p, alpha)
    return max(second, separate, bundle)


def ratio_empirical(spec: MeanMadSpec, m: int, grid: int = _EMP_GRID) -> EmpiricalReport:
    """Best guaranteed share of the first-best under two-point i.i.d. nature.

    m <= 3 solves sup_p min_alpha p P(sum >= p) / OPT(alpha) on grids with the
    exact menu oracle in the denominator (mode "oracle"). Larger m replaces
    OPT by its m*mu ceiling, which turns the objective into maximin value / mu
    (mode "mu_upper", a conservative share) and records a constructive OPT
    floor for scale.
    """
    if m <= _ORACLE_CAP:
        u, laws, opts = _oracle_curves(spec, m, grid)

        def val(p: float) -> float:
            tails = np.array([tail_prob(law, p) for law in laws])
            return float(np.min(p * tails / opts))

        ps = np.linspace(0.0, m * spec.mu, grid)
        vals = np.array([val(p) for p in ps])
        j = int(np.argmax(vals))
        p_best, v_best = golden_max(
            val, float(ps[max(j - 1, 0)]), float(ps[min(j + 1, grid - 1)]),
            tol=1e-10 * max(1.0, m * spec.mu))
        if vals[j] >= v_best:
            p_best, v_best = float(ps[j]), float(vals[j])
        tails = np.array([tail_prob(law, p_best) for law in laws])
        i = int(np.argmin(p_best * tails / opts))
        return EmpiricalReport(objective="ratio", m=m, value=float(v_best),
                               mode="oracle", price=float(p_best),
                               alpha=1.0 - float(u[i]))
    rep = maximin_bundling_value(spec, m)
    return EmpiricalReport(objective="ratio", m=m, value=rep.value / spec.mu,
                           mode="mu_upper", price=rep.price, alpha=rep.alpha,
                           opt_lower=_constructive_opt_lower(spec, m, rep.alpha))


def regret_empirical(spec: MeanMadSpec, m: int, grid: int = _EMP_GRID) -> EmpiricalReport:
    """Smallest per-item shortfall against the first-best, same two modes.

    m <= 3: inf_p max_alpha [OPT(alpha) - p P(sum >= p)] / m with the exact
    oracle. Larger m: mu - maximin value, i.e. the shortfall against the m*mu
    ceiling (mode "mu_upper", a conservative regret).
    """
    if m <= _ORACLE_CAP:
        u, laws, opts = _oracle_curves(spec, m, grid)

        def val(p: float) -> float:
            tails = np.array([tail_prob(law, p) for law in laws])
            return float(np.max(opts - p * tails)) / m

        ps = np.linspace(0.0, m * spec.mu, grid)
        vals = np.array([val(p) for p in ps])
        j = int(np.argmin(vals))
        p_best, v_best = golden_min(
            val, float(ps[max(j - 1, 0)]), float(ps[min(j + 1, grid - 1)]),
            tol=1e-10 * max(1.0, m * spec.mu))
        if vals[j] <= v_best:
            p_best, v_best = float(ps[j]), float(vals[j])
        tails = np.array([tail_prob(law, p_best) for law in laws])
        i = int(np.argmax(opts - p_best * tails))
        return EmpiricalReport(objective="regret", m=m, value=float(v_best),
                               mode="oracle", price=float(p_best),
                               alpha=1.0 - float(u[i]))
    rep = maximin_bundling_value(spec, m)
    return EmpiricalReport(objective="regret", m=m, value=spec.mu - rep.value,
                           mode="mu_upper", price=rep.price, alpha=rep.alpha,
                           opt_lower=_constructive_opt_lower(spec, m, rep.alpha))


def append_study_csv(path: str, spec: MeanMadSpec, m: int, eps: float,
                     gamma: float, objective: str, mode: str, value: float,
                     lower: float, upper: float) -> None:
    """Append one study row, writing the header on first touch."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    row = ",".join([
        f"{spec.mu:.17g}", f"{spec.d:.17g}", str(m), f"{eps:.17g}",
        f"{gamma:.17g}", objective, mode, f"{value:.17g}", f"{lower:.17g}",
        f"{upper:.17g}",
    ])
    with open(path, "a") as fh:
        if fresh:
            fh.write("mu,d,m,eps,gamma,objective,mode,value,lower,upper\n")
        fh.write(row + "\n")
