import numpy as np
import pytest

from rbl.ambiguity import MeanMadSpec, make_two_point
from rbl.bundling import best_bundle_price
from rbl.errors import NegativePrice
from rbl.solvers import (
    append_saddle_csv,
    extreme_adversary_alpha,
    extreme_adversary_logs,
    extreme_adversary_second_point_revenue,
    heterogeneous_probe_values,
    iid_tail,
    maximin_bundling_value,
    maximin_certificate_lower,
    minimax_bundling_value,
    worst_case_alpha,
)
from rbl.sum_law import iid_two_point_sum, tail_prob


@pytest.mark.parametrize("m", [1, 2, 5, 10])
def test_iid_tail_agrees_with_exact_law(half_spec, m):
    # binomial-survival route vs the explicit convolution; atoms are probed
    # with a +-1e-12 relative margin because the tail is discontinuous there
    # and the two routes build the support with different last-ulp rounding
    for alpha in (0.26, 0.5, 0.8):
        dist = make_two_point(half_spec, alpha)
        law = iid_two_point_sum(dist, m)
        probes = [0.0, float(law.support[-1]) + 1.0]
        probes += list(0.5 * (law.support[:-1] + law.support[1:]))
        for a in law.support:
            probes += [float(a) * (1.0 - 1e-12), float(a) * (1.0 + 1e-12)]
        if alpha in (0.5, 0.8):
            # dyadic points make every atom exact: on-atom pricing must
            # include the atom in both routes
            probes += [float(a) for a in law.support]
        for p in probes:
            want = tail_prob(law, float(p))
            got = iid_tail(half_spec, m, float(p), alpha)
            assert got == pytest.approx(want, abs=1e-12)


def test_worst_case_alpha_against_dense_grid(half_spec):
    # m=1, p=0.5: revenue is 0.5*(1-alpha) until x(alpha) reaches the price
    # at alpha=0.5, so the infimum 0.25 is approached from the left
    alpha, val = worst_case_alpha(half_spec, 1, 0.5)
    alphas = np.linspace(half_spec.alpha_min, 1.0 - 1e-9, 1_000_000)
    x = half_spec.mu - half_spec.d / (2.0 * alphas)
    rev = np.where(x >= 0.5, 0.5, 0.5 * (1.0 - alphas))
    assert val <= float(rev.min()) + 1e-9
    assert val == pytest.approx(0.25, abs=1e-6)
    assert alpha == pytest.approx(0.5, abs=1e-5)


def test_worst_case_alpha_guards(half_spec):
    with pytest.raises(NegativePrice):
        worst_case_alpha(half_spec, 1, -0.5)
    assert worst_case_alpha(half_spec, 1, 0.0) == (half_spec.alpha_min, 0.0)


def test_maximin_m1_frozen(half_spec):
    rep = maximin_bundling_value(half_spec, 1)
    assert rep.value == pytest.approx(0.25, abs=1e-6)
    assert rep.certificate[1] == 0.75


@pytest.mark.parametrize("m", [1, 2, 4, 16])
def test_maximin_respects_ceiling_and_certificate(half_spec, m):
    rep = maximin_bundling_value(half_spec, m)
    lo, hi = rep.certificate
    assert lo <= rep.value <= hi + 1e-12
    assert rep.value <= half_spec.mu - half_spec.d / 2.0
    assert 0.0 <= rep.price <= m * half_spec.mu


def test_maximin_monotone_in_m(half_spec):
    vals = [maximin_bundling_value(half_spec, m).value for m in (1, 2, 4, 8)]
    assert vals == sorted(vals)


def test_maximin_price_survives_random_adversaries(half_spec, rng):
    # the reported value is a guarantee: no member may undercut it
    m = 64
    rep = maximin_bundling_value(half_spec, m)
    alphas = half_spec.alpha_min + (1.0 - half_spec.alpha_min - 1e-9) * rng.random(128)
    for a in alphas:
        rev = rep.price * iid_tail(half_spec, m, rep.price, float(a)) / m
        assert rev >= rep.value - 1e-9


def test_minimax_m1_frozen(half_spec):
    # alpha* = (1+sqrt(17))/8 balances selling low against skimming high
    rep = minimax_bundling_value(half_spec, 1)
    assert rep.value == pytest.approx(0.60961179679779, abs=1e-9)
    assert rep.alpha == pytest.approx((1.0 + np.sqrt(17.0)) / 8.0, abs=1e-9)


def test_minimax_alpha_resists_random_prices(half_spec, rng):
    # at the reported member no price does better than the reported value
    m = 32
    rep = minimax_bundling_value(half_spec, m)
    for p in m * half_spec.mu * rng.random(128):
        rev = p * iid_tail(half_spec, m, float(p), rep.alpha) / m
        assert rev <= rep.value + 1e-9


@pytest.mark.parametrize("m", [1, 3, 9, 33])
def test_best_response_agrees_with_law_route(half_spec, m):
    # windowed binomial search vs brute best price on the exact convolution
    from rbl import solvers

    for alpha in (0.3, 0.55, 0.97):
        dist = make_two_point(half_spec, alpha)
        law = iid_two_point_sum(dist, m)
        want = best_bundle_price(law).revenue / m
        _, got_v = solvers._best_response(half_spec, m, 1.0 - alpha)
        assert got_v == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 4, 16, 64])
def test_weak_duality_small_m(half_spec, m):
    lo = maximin_bundling_value(half_spec, m).value
    hi = minimax_bundling_value(half_spec, m).value
    assert hi >= lo - 1e-12


def test_minimax_climbs_toward_limit(half_spec):
    # d < mu: bundling helps, so the game value rises toward mu - d/2
    vals = [minimax_bundling_value(half_spec, m).value for m in (1, 4, 16)]
    limit = half_spec.mu - half_spec.d / 2.0
    assert vals[0] < vals[1] < vals[2] <= limit + 1e-9


def test_certificate_lower_is_sound(half_spec):
    for m in (64, 256, 1024):
        lo = maximin_certificate_lower(half_spec, m)
        val = maximin_bundling_value(half_spec, m).value
        assert lo <= val + 1e-12
    assert maximin_certificate_lower(half_spec, 10_000) >= 0.5


def test_heterogeneous_probes_report_only(half_spec):
    out = heterogeneous_probe_values(half_spec, m=8, n_probes=12, seed=4)
    assert out.shape == (12,)
    assert np.all(np.isfinite(out))
    assert np.all(out > 0.0)
    # deterministic under the seed
    again = heterogeneous_probe_values(half_spec, m=8, n_probes=12, seed=4)
    assert np.array_equal(out, again)


def test_extreme_adversary_log_values():
    assert extreme_adversary_alpha(1) == pytest.approx(-1.0, rel=1e-15)
    assert extreme_adversary_alpha(10) == pytest.approx(-11.0 * np.log(10.0) - 10.0)
    with pytest.raises(ValueError):
        extreme_adversary_alpha(0)
    # log alpha^m stays finite and tiny even where 1-alpha underflows; at
    # large m the product m*(1-alpha) itself underflows to -0.0, which is
    # the closest double to the true value
    for m in (10, 1_000, 100_000):
        m_log_alpha, log_second = extreme_adversary_logs(m)
        assert -1e-3 < m_log_alpha <= 0.0
        # (m-1) log alpha is below double resolution at this scale, so the
        # second-point log can only match log(1-alpha), never exceed it
        assert log_second <= extreme_adversary_alpha(m)
        assert np.isfinite(log_second)


def test_extreme_adversary_revenue_tends_to_half_d(half_spec):
    # small m (where 1-alpha is still a comfortable double) matches the
    # member-and-law route; large m approaches d/2 and never overflows
    for m in (3, 5):
        log1m = extreme_adversary_alpha(m)
        alpha = 1.0 - float(np.exp(log1m))
        dist = make_two_point(half_spec, alpha)
        law = iid_two_point_sum(dist, m)
        p = (m - 1) * dist.x + dist.y
        want = p * tail_prob(law, p) / m
        assert extreme_adversary_second_point_revenue(half_spec, m) == \
            pytest.approx(want, rel=1e-9)
    vals = [extreme_adversary_second_point_revenue(half_spec, m)
            for m in (10, 100, 10_000, 10 ** 6, 10 ** 8)]
    assert np.all(np.isfinite(vals))
    gaps = [abs(v - half_spec.d / 2.0) for v in vals]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-6


def test_saddle_csv_append(half_spec, tmp_path):
    path = tmp_path / "saddle.csv"
    rep = maximin_bundling_value(half_spec, 2)
    append_saddle_csv(str(path), half_spec, "maximin", rep)
    append_saddle_csv(str(path), half_spec, "maximin", rep)
    lines = path.read_text().splitlines()
    assert lines[0] == "mu,d,m,objective,value,price,alpha,lower,upper"
    assert len(lines) == 3
    assert lines[1] == lines[2]
    assert lines[1].split(",")[3] == "maximin"
