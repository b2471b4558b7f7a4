"""Lower-tail concentration for sums of independent mean/MAD-constrained values.

The sum of m independent values with mean mu and mean absolute deviation d lands
above the guaranteed-sale price with probability at least 1 - f/m, where the
failure coefficient f depends only on (mu, d, eps). The route is truncation at a
level t, a conditional-mean floor, and Chebyshev on the truncated sum; each step
is exposed on its own so the chain can be audited piece by piece.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .ambiguity import (
    MeanMadSpec,
    MemberDist,
    TwoPointDist,
    make_two_point,
    verify_membership,
)
from .bundling import guaranteed_sale_price
from .errors import (
    EpsOutOfRange,
    GammaOutOfRange,
    MembershipViolation,
    ParamOutOfRange,
    TruncationTooLow,
)
from .optimize import golden_min
from .sum_law import sample_sum

# Monte Carlo checks below this sample count are too noisy to be meaningful.
MC_MIN_SAMPLES = 10_000
# Moment tolerance for admitting a member into an MC check.
MEMBERSHIP_TOL = 1e-6
_T_GRID = 512


@dataclass(frozen=True)
class ConcentrationCertificate:
    """Failure coefficient f with its truncation level and, once m is known,
    the sale threshold and the tail bound max(0, 1 - f/m)."""

    mu: float
    d: float
    eps: float
    t: float
    f: float
    m: Optional[int] = None
    threshold: Optional[float] = None
    bound: Optional[float] = None

    def with_m(self, m: int) -> "ConcentrationCertificate":
        if m < 1:
            raise ValueError(f"need m >= 1, got {m}")
        spec = MeanMadSpec(mu=self.mu, d=self.d)
        return replace(
            self,
            m=m,
            threshold=guaranteed_sale_price(spec, m, self.eps),
            bound=max(0.0, 1.0 - self.f / m),
        )


def tail_truncation_sup(spec: MeanMadSpec, t: float) -> float:
    """Largest E[X 1{X >= t}] over the family, as a function of the cut t.

    The free optimum puts mass d/(2(t-mu)) on the upper point, worth
    d mu/(2(t-mu)) + d/2. When t is low that mass exceeds what a nonnegative
    member can carry; the boundary member (lower point at zero) then attains
    exactly mu, so the supremum caps there.
    """
    lo = spec.mu + spec.d / 2.0
    if t < lo:
        raise TruncationTooLow(f"need t >= {lo!r}, got {t!r}")
    raw = spec.d * spec.mu / (2.0 * (t - spec.mu)) + spec.d / 2.0
    return min(raw, spec.mu)


def tail_truncation_argmax(spec: MeanMadSpec, t: float) -> TwoPointDist:
    """Two-point member attaining tail_truncation_sup at this cut."""
    lo = spec.mu + spec.d / 2.0
    if t < lo:
        raise TruncationTooLow(f"need t >= {lo!r}, got {t!r}")
    alpha = max(spec.alpha_min, 1.0 - spec.d / (2.0 * (t - spec.mu)))
    return make_two_point(spec, alpha)


def chebyshev_lower_tail(mu: float, sigma2: float, m: int, gamma: float) -> float:
    """Chebyshev bound P(Y <= (1-gamma) m mu) <= sigma2 / ((gamma mu)^2 m).

    Returned uncapped; callers clip at 1 when they need a probability.
    """
    if not (0.0 < gamma < 1.0):
        raise GammaOutOfRange(f"need 0 < gamma < 1, got {gamma!r}")
    if sigma2 < 0:
        raise ValueError(f"need sigma2 >= 0, got {sigma2!r}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    return sigma2 / ((gamma * mu) ** 2 * m)


def _f_at(spec: MeanMadSpec, eps: float, t: float) -> float:
    # conditional-mean floor (1 - d/(2(t-mu))) mu - d/2, variance cap t^2/4
    floor = (1.0 - spec.d / (2.0 * (t - spec.mu))) * spec.mu - spec.d / 2.0
    return t * t / (4.0 * (eps * floor) ** 2)


def concentration_constant(
    spec: MeanMadSpec, eps: float, optimize_t: bool = False
) -> ConcentrationCertificate:
    """Failure coefficient f(mu, d, eps); m left unset until with_m.

    Default t = mu + d/(2 eps) is the lowest cut keeping the truncated mean
    within eps of mu, giving f = t^2 / (4 (eps ((1-eps) mu - d/2))^2) verbatim.
    optimize_t=True instead minimizes f over t >= that cut (grid plus
    golden-section polish); raising t loosens the variance cap t^2/4 but lifts
    the conditional-mean floor, and the trade-off is not always won at the end.
    """
    hi = 1.0 - spec.alpha_min
    if not (0.0 < eps < hi):
        raise EpsOutOfRange(f"need 0 < eps < {hi!r}, got {eps!r}")
    t_min = spec.mu + spec.d / (2.0 * eps)
    if not optimize_t:
        f = t_min ** 2 / (4.0 * (eps * ((1.0 - eps) * spec.mu - spec.d / 2.0)) ** 2)
        return ConcentrationCertificate(mu=spec.mu, d=spec.d, eps=eps, t=t_min, f=f)

    grid = np.geomspace(t_min, t_min * 1e3, _T_GRID)
    vals = np.array([_f_at(spec, eps, t) for t in grid])
    i = int(np.argmin(vals))
    t_best, f_best = golden_min(
        lambda t: _f_at(spec, eps, t),
        float(grid[max(i - 1, 0)]),
        float(grid[min(i + 1, _T_GRID - 1)]),
        tol=1e-9 * t_min,
    )
    if vals[i] < f_best:
        t_best, f_best = float(grid[i]), float(vals[i])
    return ConcentrationCertificate(mu=spec.mu, d=spec.d, eps=eps,
                                    t=float(t_best), f=float(f_best))


@dataclass(frozen=True)
class McReport:
    """Monte Carlo check of the tail bound at one (members, m, eps) setting."""

    empirical: float
    bound: float
    std_err: float
    passed: bool
    threshold: float
    m: int
    eps: float
    n: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def concentration_check_mc(
    members: Sequence[MemberDist],
    m: int,
    eps: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> McReport:
    """Empirical P(sum >= threshold) against the certified bound.

    Members must share one (mu, d) spec and pass a moment check; fewer than m
    members are cycled across the slots. Passing means the empirical tail is no
    more than three binomial standard errors below the bound.
    """
    members = list(members)
    if not members:
        raise ValueError("need at least one member")
    if n < MC_MIN_SAMPLES:
        raise ParamOutOfRange(f"need n >= {MC_MIN_SAMPLES}, got {n}")
    spec = members[0].spec
    for dist in members:
        if dist.spec != spec:
            raise ValueError("all members must share one mean/MAD spec")
        rep = verify_membership(dist, spec, tol=MEMBERSHIP_TOL)
        if not rep.ok:
            raise MembershipViolation(
                f"member moments off by mean {rep.mean_error!r}, mad {rep.mad_error!r}"
            )
    cert = concentration_constant(spec, eps).with_m(m)
    slots = members
    if len(members) not in (1, m):
        slots = [members[i % len(members)] for i in range(m)]
    sums = sample_sum(slots, m, seed=seed, n=n, workers=workers)
    emp = float(np.mean(sums >= cert.threshold))
    se = float(np.sqrt(emp * (1.0 - emp) / n))
    return McReport(
        empirical=emp,
        bound=cert.bound,
        std_err=se,
        passed=emp >= cert.bound - 3.0 * se,
        threshold=cert.threshold,
        m=m,
        eps=eps,
        n=n,
        seed=seed,
    )
