#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "conclab/bounds.hpp"
#include "conclab/rng.hpp"

using namespace conclab;

namespace {

LipschitzProfile random_profile(CounterRng& rng, bool with_p = false, bool with_q = false) {
  const std::size_t n = 1 + rng.below(12);
  LipschitzProfile profile;
  profile.c.resize(n);
  profile.d.resize(n);
  profile.gamma.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    profile.c[k] = 3.0 * rng.next_unit();
    profile.d[k] = profile.c[k] + 5.0 * rng.next_unit();
    profile.gamma[k] = (1.0 + rng.below(16)) / 16.0;
  }
  if (with_p) {
    std::vector<double> p(n);
    for (auto& x : p) x = rng.next_unit();
    profile.p = p;
  }
  if (with_q) {
    std::vector<double> q(n);
    for (auto& x : q) x = (1.0 + rng.below(16)) / 16.0;
    profile.q = q;
  }
  return profile;
}

}  // namespace

TEST_CASE("phi: values and guard") {
  CHECK(phi(0.0) == 0.0);
  CHECK(phi(std::exp(1.0) - 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(phi(1.0) == doctest::Approx(0.3862943611198906).epsilon(1e-13));
  // series / closed form agree around the switch point
  for (double x : {1e-6, 1e-5, 9.9e-5, 1.1e-4, 1e-3}) {
    const double series = x * x * (0.5 + x * (-1.0 / 6.0 + x / 12.0));
    CHECK(phi(x) == doctest::Approx(series).epsilon(1e-10));
  }
  CHECK_THROWS_AS(phi(-0.1), std::invalid_argument);
}

TEST_CASE("bdi_bound: plug-in values") {
  const std::size_t n = 9;
  auto profile = LipschitzProfile::uniform(n, 1.0, 1.0, 1.0);
  auto b = bdi_bound(profile, std::sqrt(static_cast<double>(n)));
  CHECK(b.exponent == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(b.value == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  CHECK(bdi_bound(profile, 0.0).value == 1.0);

  LipschitzProfile p2;
  p2.c = {1, 2, 3, 4};
  p2.d = {1, 2, 3, 4};
  p2.gamma = {1, 1, 1, 1};
  CHECK(bdi_bound(p2, 10.0).exponent == doctest::Approx(200.0 / 30.0).epsilon(1e-14));

  // constant function: deviation impossible
  auto zero = LipschitzProfile::uniform(3, 0.0, 0.0, 1.0);
  CHECK(bdi_bound(zero, 1.0).value == 0.0);
  CHECK(std::isinf(bdi_bound(zero, 1.0).exponent));

  CHECK_THROWS_AS(bdi_bound(profile, -1.0), std::invalid_argument);
}

TEST_CASE("tbdi_bound: worked example and degenerate cases") {
  LipschitzProfile profile;
  profile.c = {1, 1};
  profile.d = {3, 5};
  profile.gamma = {0.5, 0.25};
  auto b = tbdi_bound(profile, 4.0);
  CHECK(b.error_terms[0] == doctest::Approx(1.0));
  CHECK(b.error_terms[1] == doctest::Approx(1.0));
  CHECK(b.exponent == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  auto zero = LipschitzProfile::uniform(4, 0.0, 0.0, 0.5);
  CHECK(tbdi_bound(zero, 2.0).value == 0.0);
  CHECK(tbdi_bound(zero, 0.0).value == 1.0);
}

TEST_CASE("tbdi_bound: reduction to bdi and the exact factor-4 relation") {
  CounterRng rng({2024, 0, 1});
  for (int trial = 0; trial < 50; ++trial) {
    auto profile = random_profile(rng);
    profile.d = profile.c;  // e = 0
    const double t = 10.0 * rng.next_unit();
    auto two_valued = tbdi_bound(profile, t, std::nullopt, true);
    auto base = bdi_bound(profile, t);
    if (std::isinf(base.exponent)) {
      CHECK(std::isinf(two_valued.exponent));
    } else if (base.exponent > 0.0) {
      CHECK(two_valued.exponent == doctest::Approx(base.exponent).epsilon(1e-12));
    }

    auto generic = random_profile(rng);
    auto plain = tbdi_bound(generic, t);
    auto boosted = tbdi_bound(generic, t, std::nullopt, true);
    if (!std::isinf(plain.exponent)) CHECK(boosted.exponent == 4.0 * plain.exponent);
  }
}

TEST_CASE("tbdi_bound: bad budget is linear before the clamp") {
  LipschitzProfile profile;
  profile.c = {1, 2, 0.5};
  profile.d = {2, 2, 4};
  profile.gamma = {0.5, 0.25, 1.0};
  const double gf = 1e-5;
  auto b1 = tbdi_bound(profile, 1.0, gf);
  auto b2 = tbdi_bound(profile, 1.0, 2.0 * gf);
  CHECK(b2.bad_budget == 2.0 * b1.bad_budget);

  auto halved = profile;
  for (auto& g : halved.gamma) g *= 0.5;
  auto b3 = tbdi_bound(halved, 1.0, gf);
  CHECK(b3.bad_budget == 2.0 * b1.bad_budget);

  // clamp at 1
  auto b4 = tbdi_bound(profile, 1.0, 1.0);
  CHECK(b4.bad_budget == 1.0);
}

TEST_CASE("tbdi_bound: triangle-count setup keeps the error term negligible") {
  // c_k = Delta, d_k = n, gamma_k = 1/n
  const double n = 100.0;
  const double delta = 2.0;
  auto profile = LipschitzProfile::uniform(50, delta, n, 1.0 / n);
  auto e = profile.error_terms();
  for (double ek : e) {
    CHECK(ek < 1.0);
    CHECK(ek < delta);
  }
}

TEST_CASE("tbdi_bernoulli_bound: sum of coins matches the Bernstein form") {
  const std::size_t n = 30;
  const double p = 0.3;
  auto profile = LipschitzProfile::uniform(n, 1.0, 1.0, 1.0);
  profile.p = std::vector<double>(n, p);
  for (double t : {0.5, 2.0, 7.0}) {
    auto b = tbdi_bernoulli_bound(profile, t);
    const double v = n * p * (1.0 - p);
    CHECK(b.variance_term == doctest::Approx(v).epsilon(1e-13));
    CHECK(b.max_term == 1.0);
    CHECK(b.exponent ==
          doctest::Approx(t * t / (2.0 * v + 2.0 * t / 3.0)).epsilon(1e-13));
  }
}

TEST_CASE("tbdi_bernoulli_bound: degenerate variance leaves the linear term") {
  auto profile = LipschitzProfile::uniform(5, 1.0, 1.0, 1.0);
  profile.p = std::vector<double>{0, 1, 0, 1, 0};
  auto b = tbdi_bernoulli_bound(profile, 4.0);
  CHECK(b.variance_term == 0.0);
  CHECK(b.exponent == doctest::Approx(3.0 * 4.0 / 2.0).epsilon(1e-13));
}

TEST_CASE("tbdi_bernoulli_bound: Bennett dominates Bernstein") {
  // frozen point: V = 1, C = 1, t = 10
  auto profile = LipschitzProfile::uniform(1, 1.0, 1.0, 1.0);
  profile.p = std::vector<double>{0.5};
  // direct check of the two exponent formulas at V=1, C=1
  CHECK(phi(10.0) == doctest::Approx(16.376848000782077).epsilon(1e-13));
  CHECK(phi(10.0) >= 100.0 / (2.0 + 20.0 / 3.0));

  CounterRng rng({77, 0, 2});
  for (int trial = 0; trial < 200; ++trial) {
    auto prof = random_profile(rng, /*with_p=*/true);
    const double t = 20.0 * rng.next_unit();
    auto bennett = tbdi_bernoulli_bound(prof, t, {.bennett = true});
    auto bernstein = tbdi_bernoulli_bound(prof, t);
    CHECK(bennett.value <= bernstein.value * (1.0 + 1e-12));
    if (!std::isinf(bennett.exponent) && bernstein.variance_term > 0.0 &&
        bernstein.max_term * t / bernstein.variance_term > 1e-2) {
      CHECK(bennett.exponent > bernstein.exponent);
    }
  }
}

TEST_CASE("tbdi_bernoulli_bound: option validation") {
  auto profile = LipschitzProfile::uniform(3, 1.0, 2.0, 0.5);
  CHECK_THROWS_AS(tbdi_bernoulli_bound(profile, 1.0), std::invalid_argument);

  profile.p = std::vector<double>{0.5, 1.0, 0.5};
  CHECK_THROWS_AS(tbdi_bernoulli_bound(profile, 1.0, {.asymmetric = true}),
                  std::invalid_argument);
  CHECK_NOTHROW(tbdi_bernoulli_bound(profile, 1.0));

  profile.p = std::vector<double>{0.5, 0.5, 0.5};
  BernoulliOptions bad;
  bad.monotone_bad_prob = 1.0;
  CHECK_THROWS_AS(tbdi_bernoulli_bound(profile, 1.0, bad), std::invalid_argument);

  BernoulliOptions mon;
  mon.monotone_bad_prob = 0.5;
  auto plain = tbdi_bernoulli_bound(profile, 1.0);
  auto boosted = tbdi_bernoulli_bound(profile, 1.0, mon);
  CHECK(boosted.value == doctest::Approx(std::min(1.0, plain.value / 0.5)).epsilon(1e-13));
}

TEST_CASE("two_sided_error: identities and the reverse-process bound") {
  LipschitzProfile profile;
  profile.c = {1, 1};
  profile.d = {1, 1};
  profile.gamma = {0.5, 0.5};
  profile.q = std::vector<double>{0.25, 0.5};
  auto e = two_sided_error(profile);
  CHECK(e[0] == 0.0);
  CHECK(e[1] == 0.0);

  // gamma_k = q_k / 2 and d_k - c_k = 1 gives e_k = 1
  profile.d = {2, 2};
  profile.gamma = {0.125, 0.25};
  auto e2 = two_sided_error(profile);
  CHECK(e2[0] == doctest::Approx(1.0));
  CHECK(e2[1] == doctest::Approx(1.0));

  // reverse-process regime: d = n^2, q = n^-2, gamma = n^-4 gives e_k <= 2
  const double n = 60.0;
  LipschitzProfile rev = LipschitzProfile::uniform(4, 3.0, n * n, std::pow(n, -4.0));
  rev.q = std::vector<double>(4, std::pow(n, -2.0));
  for (double ek : two_sided_error(rev)) CHECK(ek <= 2.0 + 1e-12);

  LipschitzProfile no_q = LipschitzProfile::uniform(2, 1.0, 2.0, 0.5);
  CHECK_THROWS_AS(two_sided_error(no_q), std::invalid_argument);
}

TEST_CASE("two_sided_error: ratio to the one-sided term is 2/q_k") {
  CounterRng rng({5150, 0, 3});
  for (int trial = 0; trial < 50; ++trial) {
    auto profile = random_profile(rng, false, true);
    auto one_sided = profile.error_terms();
    auto two_sided = two_sided_error(profile);
    for (std::size_t k = 0; k < profile.size(); ++k) {
      if (profile.d[k] > profile.c[k] + 1e-12) {
        const double ratio = two_sided[k] / one_sided[k];
        CHECK(ratio == doctest::Approx(2.0 / (*profile.q)[k]).epsilon(1e-12));
        CHECK(ratio >= 2.0);
      }
    }
  }
}

TEST_CASE("truncation_bound: threshold shift") {
  auto profile = LipschitzProfile::uniform(6, 1.0, 3.0, 0.5);
  auto plain = tbdi_bound(profile, 2.0, 0.0);
  auto b0 = truncation_bound(profile, 2.0, 50.0, 0.0, false);
  CHECK(b0.threshold_shift == 0.0);
  CHECK(b0.exponent == plain.exponent);

  auto bm = truncation_bound(profile, 2.0, 50.0, 0.25, true);
  CHECK(bm.threshold_shift == 0.0);

  auto bs = truncation_bound(profile, 2.0, 100.0, 1e-3, false);
  CHECK(bs.threshold_shift == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("dynamic_aggregate_bound: max-substituted formulas") {
  QueryAggregate agg;
  agg.sq_sums = {4.0, 9.0};
  auto b = dynamic_aggregate_bound(agg, 3.0, BoundVariant::tbdi);
  CHECK(b.exponent == doctest::Approx(0.5).epsilon(1e-14));

  // single full query set reproduces the base bound
  LipschitzProfile profile;
  profile.c = {1, 2};
  profile.d = {1, 2};
  profile.gamma = {1, 1};
  QueryAggregate full;
  double s = 0.0;
  for (double c : profile.c) s += c * c;
  full.sq_sums = {s};
  CHECK(dynamic_aggregate_bound(full, 2.0, BoundVariant::bdi).exponent ==
        doctest::Approx(bdi_bound(profile, 2.0).exponent).epsilon(1e-14));
  CHECK(dynamic_aggregate_bound(full, 2.0, BoundVariant::tbdi).exponent ==
        doctest::Approx(tbdi_bound(profile, 2.0).exponent).epsilon(1e-14));

  // all-equal sums equal the base bound with that sum
  QueryAggregate equal;
  equal.sq_sums = {s, s, s};
  CHECK(dynamic_aggregate_bound(equal, 2.0, BoundVariant::tbdi).exponent ==
        dynamic_aggregate_bound(full, 2.0, BoundVariant::tbdi).exponent);

  QueryAggregate empty;
  CHECK_THROWS_AS(dynamic_aggregate_bound(empty, 1.0, BoundVariant::tbdi),
                  std::invalid_argument);

  QueryAggregate bern;
  bern.var_sums = {1.0, 2.0};
  bern.maxima = {1.0, 0.5};
  auto bb = dynamic_aggregate_bound(bern, 3.0, BoundVariant::tbdi_bernoulli);
  CHECK(bb.exponent == doctest::Approx(9.0 / (4.0 + 2.0)).epsilon(1e-14));
}

TEST_CASE("janson_zero_bound") {
  CHECK(janson_zero_bound(3.0, 0.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  CHECK(janson_zero_bound(0.0, 5.0) == 1.0);
  CHECK(janson_zero_bound(4.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(janson_zero_bound(-1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(janson_zero_bound(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("all bounds: value is non-increasing in t and 1 at t = 0") {
  CounterRng rng({31337, 0, 4});
  for (int trial = 0; trial < 30; ++trial) {
    auto profile = random_profile(rng, true, true);
    auto e2 = two_sided_error(profile);
    double prev_bdi = 2.0, prev_tbdi = 2.0, prev_bern = 2.0, prev_two = 2.0;
    bool first = true;
    for (double t = 0.0; t <= 12.0; t += 0.75) {
      const double vb = bdi_bound(profile, t).value;
      const double vt = tbdi_bound(profile, t).value;
      const double vn = tbdi_bernoulli_bound(profile, t).value;
      const double v2 = tbdi_bound_with_errors(profile, e2, t).value;
      if (first) {
        CHECK(vb == 1.0);
        CHECK(vt == 1.0);
        CHECK(vn == 1.0);
        CHECK(v2 == 1.0);
        first = false;
      }
      CHECK(vb <= prev_bdi + 1e-15);
      CHECK(vt <= prev_tbdi + 1e-15);
      CHECK(vn <= prev_bern + 1e-15);
      CHECK(v2 <= prev_two + 1e-15);
      prev_bdi = vb;
      prev_tbdi = vt;
      prev_bern = vn;
      prev_two = v2;
    }
  }
}

TEST_CASE("profile validation") {
  LipschitzProfile bad;
  bad.c = {2.0};
  bad.d = {1.0};  // c > d
  bad.gamma = {0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  LipschitzProfile zero_gamma = LipschitzProfile::uniform(2, 1.0, 2.0, 0.5);
  zero_gamma.gamma[1] = 0.0;
  CHECK_THROWS_AS(zero_gamma.validate(), std::invalid_argument);

  LipschitzProfile mismatched = LipschitzProfile::uniform(2, 1.0, 2.0, 0.5);
  mismatched.d.pop_back();
  CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);
}
