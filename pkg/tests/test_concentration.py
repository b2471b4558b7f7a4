import numpy as np
import pytest

from rbl.ambiguity import (
    MeanMadSpec,
    make_pareto_member,
    make_three_point,
    make_two_point,
)
from rbl.bundling import guaranteed_sale_price
from rbl.concentration import (
    chebyshev_lower_tail,
    concentration_check_mc,
    concentration_constant,
    tail_truncation_argmax,
    tail_truncation_sup,
)
from rbl.errors import (
    EpsOutOfRange,
    GammaOutOfRange,
    MembershipViolation,
    ParamOutOfRange,
    TruncationTooLow,
)
from rbl.sum_law import iid_two_point_sum, tail_prob


def test_truncated_tail_sup_shape(half_spec):
    mu, d = half_spec.mu, half_spec.d
    with pytest.raises(TruncationTooLow):
        tail_truncation_sup(half_spec, mu + d / 2.0 - 1e-6)
    # flat at mu while a zero-low-point member can still clear the cut
    strip_end = mu + d * mu / (2.0 * mu - d)
    assert tail_truncation_sup(half_spec, mu + d / 2.0 + 1e-9) == pytest.approx(mu)
    assert tail_truncation_sup(half_spec, strip_end - 1e-9) == pytest.approx(mu)
    # beyond the strip: d mu / (2(t - mu)) + d/2, decreasing toward d/2
    ts = np.linspace(strip_end + 1e-6, 50.0, 300)
    vals = np.array([tail_truncation_sup(half_spec, float(t)) for t in ts])
    assert np.all(np.diff(vals) < 0.0)
    assert np.all(vals > d / 2.0)
    assert vals[0] <= mu + 1e-12
    t = 3.0
    assert tail_truncation_sup(half_spec, t) == pytest.approx(
        d * mu / (2.0 * (t - mu)) + d / 2.0, rel=1e-15)


def test_truncated_tail_argmax_attains_sup(half_spec):
    for t in (1.3, 1.5, 2.0, 5.0, 9.0):
        dist = tail_truncation_argmax(half_spec, t)
        got = (1.0 - dist.alpha) * dist.y if dist.y >= t else 0.0
        assert got == pytest.approx(tail_truncation_sup(half_spec, t), rel=1e-9)


def test_truncated_tail_sup_dominates_member_grid(half_spec):
    # every feasible two-point member stays below the closed form
    t = 2.5
    sup = tail_truncation_sup(half_spec, t)
    for alpha in np.linspace(half_spec.alpha_min, 1.0 - 1e-12, 400):
        dist = make_two_point(half_spec, float(alpha))
        val = (1.0 - dist.alpha) * dist.y if dist.y >= t else 0.0
        assert val <= sup + 1e-12


def test_chebyshev_lower_tail():
    assert chebyshev_lower_tail(1.0, 0.5, 100, 0.2) == pytest.approx(
        0.5 / (0.04 * 100), rel=1e-15)
    with pytest.raises(GammaOutOfRange):
        chebyshev_lower_tail(1.0, 0.5, 100, 0.0)
    with pytest.raises(GammaOutOfRange):
        chebyshev_lower_tail(1.0, 0.5, 100, 1.0)
    with pytest.raises(ValueError):
        chebyshev_lower_tail(1.0, -0.1, 100, 0.5)


def test_concentration_constant_frozen(half_spec):
    cert = concentration_constant(half_spec, 0.2)
    assert cert.t == pytest.approx(2.25, rel=1e-15)
    assert cert.f == pytest.approx(104.59710743801653, rel=1e-12)
    cert2 = concentration_constant(half_spec, 0.1)
    assert cert2.f == pytest.approx(724.85207100591716, rel=1e-12)
    with pytest.raises(EpsOutOfRange):
        concentration_constant(half_spec, 0.75)
    with pytest.raises(EpsOutOfRange):
        concentration_constant(half_spec, 0.0)


def test_concentration_constant_optimized_cut(half_spec):
    base = concentration_constant(half_spec, 0.2)
    opt = concentration_constant(half_spec, 0.2, optimize_t=True)
    assert opt.f <= base.f + 1e-9


def test_certificate_with_m(half_spec):
    cert = concentration_constant(half_spec, 0.2).with_m(10_000)
    assert cert.threshold == pytest.approx(
        guaranteed_sale_price(half_spec, 10_000, 0.2), rel=1e-15)
    assert cert.bound == pytest.approx(1.0 - cert.f / 10_000, rel=1e-12)
    bounds = [concentration_constant(half_spec, 0.2).with_m(m).bound
              for m in (200, 1000, 10_000, 10 ** 6)]
    assert bounds == sorted(bounds)
    assert bounds[-1] > 0.999
    # below f the bound clips to zero instead of going negative
    assert concentration_constant(half_spec, 0.2).with_m(50).bound == 0.0


@pytest.mark.parametrize("m", [300, 2000])
def test_bound_holds_on_exact_two_point_laws(half_spec, m):
    # exact convolution tail never drops below 1 - f/m, any member
    cert = concentration_constant(half_spec, 0.2).with_m(m)
    for alpha in np.linspace(half_spec.alpha_min, 0.99999, 60):
        law = iid_two_point_sum(make_two_point(half_spec, float(alpha)), m)
        assert tail_prob(law, cert.threshold) >= cert.bound - 1e-12


def test_mc_check_two_point(half_spec):
    rep = concentration_check_mc([make_two_point(half_spec, 0.5)],
                                 m=500, eps=0.2, n=10_000, seed=1)
    assert rep.passed
    assert rep.empirical >= rep.bound - 3.0 * rep.std_err
    assert rep.m == 500 and rep.n == 10_000 and rep.seed == 1
    d = rep.to_dict()
    assert set(d) >= {"empirical", "bound", "std_err", "passed", "threshold",
                      "m", "eps", "n", "seed"}


def test_mc_check_is_seed_stable(half_spec):
    a = concentration_check_mc([make_pareto_member(half_spec, 2.0)],
                               m=200, eps=0.2, n=10_000, seed=42)
    b = concentration_check_mc([make_pareto_member(half_spec, 2.0)],
                               m=200, eps=0.2, n=10_000, seed=42)
    assert a.empirical == b.empirical


def test_mc_check_cycles_mixed_members(half_spec):
    members = [make_two_point(half_spec, 0.5),
               make_three_point(half_spec, (0.0, 1.0, 2.0), (0.25, 0.5, 0.25))]
    rep = concentration_check_mc(members, m=301, eps=0.2, n=10_000, seed=2)
    assert rep.passed


def test_mc_check_guards(half_spec):
    good = make_two_point(half_spec, 0.5)
    with pytest.raises(ParamOutOfRange):
        concentration_check_mc([good], m=100, eps=0.2, n=9_999, seed=0)
    # moments that do not match the claimed spec (mad 0.6 against d = 0.5)
    drifted = make_three_point(half_spec, (0.0, 1.0, 2.0), (0.3, 0.4, 0.3))
    with pytest.raises(MembershipViolation):
        concentration_check_mc([drifted], m=100, eps=0.2, n=10_000, seed=0)
    with pytest.raises(ValueError):
        concentration_check_mc([], m=100, eps=0.2, n=10_000, seed=0)
    other = make_two_point(MeanMadSpec(1.0, 0.8), 0.5)
    with pytest.raises(ValueError):
        concentration_check_mc([good, other], m=2, eps=0.2, n=10_000, seed=0)


def test_mc_check_workers_equal(half_spec):
    a = concentration_check_mc([make_two_point(half_spec, 0.5)],
                               m=128, eps=0.2, n=10_000, seed=8, workers=1)
    b = concentration_check_mc([make_two_point(half_spec, 0.5)],
                               m=128, eps=0.2, n=10_000, seed=8, workers=3)
    assert a.empirical == b.empirical
