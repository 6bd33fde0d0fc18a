#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "conclab/product_space.hpp"

using namespace conclab;

namespace {

FiniteProductSpace fair_bits(int n) {
  FiniteProductSpace s;
  s.sizes.assign(n, 2);
  s.weights.assign(n, {0.5, 0.5});
  s.gamma.assign(n, 1.0);
  const std::size_t total = std::size_t{1} << n;
  s.f.resize(total);
  s.in_gamma.assign(total, 1);
  for (std::size_t i = 0; i < total; ++i) {
    double sum = 0.0;
    for (int v : s.outcome_of(i)) sum += v;
    s.f[i] = sum;
  }
  return s;
}

// Direct-definition oracle for E(f | first k coordinates): enumerate every
// extension of the prefix. Independent of the suffix-sum DP under test.
double naive_conditional_mean(const FiniteProductSpace& s, const std::vector<int>& prefix) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.total_points(); ++i) {
    const auto o = s.outcome_of(i);
    bool match = true;
    for (std::size_t k = 0; k < prefix.size(); ++k)
      if (o[k] != prefix[k]) match = false;
    if (!match) continue;
    double w = 1.0;
    for (int k = 0; k < s.coordinates(); ++k) w *= s.weights[k][o[k]];
    num += w * s.f[i];
    den += w;
  }
  return num / den;
}

}  // namespace

TEST_CASE("doob_trace: two fair bits, f = X1 + X2, Gamma = everything") {
  auto s = fair_bits(2);
  for (int x0 = 0; x0 < 2; ++x0) {
    for (int x1 = 0; x1 < 2; ++x1) {
      auto t = doob_trace(s, {x0, x1});
      REQUIRE(t.y.size() == 3);
      CHECK(t.y[0] == doctest::Approx(1.0));
      CHECK(t.y[1] == doctest::Approx(x0 + 0.5));
      CHECK(t.y[2] == doctest::Approx(x0 + x1));
      CHECK(t.stop == 2);
      CHECK_FALSE(t.bad_at.has_value());
    }
  }
}

TEST_CASE("doob_trace: constant f stays flat") {
  auto s = fair_bits(3);
  std::fill(s.f.begin(), s.f.end(), 2.5);
  auto t = doob_trace(s, {1, 0, 1});
  for (double y : t.y) CHECK(y == doctest::Approx(2.5));
}

TEST_CASE("doob_trace: majority of three fair bits at (1,1,0)") {
  auto s = fair_bits(3);
  for (std::size_t i = 0; i < s.f.size(); ++i) {
    int sum = 0;
    for (int v : s.outcome_of(i)) sum += v;
    s.f[i] = sum >= 2 ? 1.0 : 0.0;
  }
  auto t = doob_trace(s, {1, 1, 0});
  CHECK(t.y[0] == doctest::Approx(0.5));
  CHECK(t.y[1] == doctest::Approx(0.75));
  CHECK(t.y[2] == doctest::Approx(1.0));
  CHECK(t.y[3] == doctest::Approx(1.0));
}

TEST_CASE("doob_trace: conditional failure above gamma stops immediately") {
  auto s = fair_bits(2);
  s.in_gamma = {1, 1, 0, 0};  // Gamma = {x0 == 0}
  s.gamma = {0.25, 0.25};     // P(not Gamma) = 1/2 > 1/4
  auto t = doob_trace(s, {0, 1});
  CHECK(t.stop == 0);
  REQUIRE(t.bad_at.has_value());
  CHECK(*t.bad_at == 1);

  SpaceAnalysis analysis(s);
  CHECK(analysis.p_bad() == doctest::Approx(1.0));
  auto path = analysis.stopped_path(s.index_of({0, 1}));
  for (double m : path) CHECK(m == doctest::Approx(analysis.mean()));
}

TEST_CASE("conditional expectations agree with the naive oracle") {
  for (std::uint64_t inst = 0; inst < 8; ++inst) {
    const auto s = random_space({321, inst, streams::kSpaceGenerator});
    SpaceAnalysis analysis(s);
    CounterRng rng({99, inst, 1});
    for (int rep = 0; rep < 4; ++rep) {
      const std::size_t idx = rng.below(s.total_points());
      const auto outcome = s.outcome_of(idx);
      const auto t = analysis.trace(idx);
      for (int k = 0; k <= s.coordinates(); ++k) {
        const std::vector<int> prefix(outcome.begin(), outcome.begin() + k);
        CHECK(t.y[k] == doctest::Approx(naive_conditional_mean(s, prefix)).epsilon(1e-10));
      }
    }
    // tower property: weighted mean of f equals Y_0
    double mean = 0.0;
    for (std::size_t i = 0; i < s.total_points(); ++i)
      mean += analysis.point_weight(i) * s.f[i];
    CHECK(mean == doctest::Approx(analysis.mean()).epsilon(1e-10));
    // one-step martingale property at every prefix of a few outcomes
    for (int rep = 0; rep < 3; ++rep) {
      const std::size_t idx = rng.below(s.total_points());
      for (int k = 0; k < s.coordinates(); ++k) {
        const std::size_t prefix = analysis.prefix_of(idx, k);
        double avg = 0.0;
        for (int a = 0; a < s.sizes[k]; ++a)
          avg += s.weights[k][a] *
                 analysis.level_mean(k + 1, prefix * static_cast<std::size_t>(s.sizes[k]) + a);
        CHECK(avg == doctest::Approx(analysis.level_mean(k, prefix)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("minimal_lipschitz: known coefficients") {
  auto bits = fair_bits(4);
  auto coeff = minimal_lipschitz(bits, false);
  for (int k = 0; k < 4; ++k) {
    CHECK(coeff.c[k] == doctest::Approx(1.0));
    CHECK(coeff.d[k] == doctest::Approx(1.0));
  }

  // f = 3 x1 x2 x3 x4 + sum(x); Gamma = {at most 2 ones}
  auto s = fair_bits(4);
  for (std::size_t i = 0; i < s.f.size(); ++i) {
    const auto o = s.outcome_of(i);
    int sum = 0, prod = 1;
    for (int v : o) {
      sum += v;
      prod *= v;
    }
    s.f[i] = 3.0 * prod + sum;
    s.in_gamma[i] = sum <= 2 ? 1 : 0;
  }
  auto c4 = minimal_lipschitz(s, false);
  CHECK(c4.c[3] == doctest::Approx(1.0));
  CHECK(c4.d[3] == doctest::Approx(4.0));
}

TEST_CASE("minimal_lipschitz: two-sided never exceeds one-sided") {
  for (std::uint64_t inst = 0; inst < 10; ++inst) {
    const auto s = random_space({55, inst, streams::kSpaceGenerator});
    auto one = minimal_lipschitz(s, false);
    auto two = minimal_lipschitz(s, true);
    for (int k = 0; k < s.coordinates(); ++k) {
      CHECK(two.c[k] <= one.c[k] + 1e-12);
      CHECK(one.c[k] <= one.d[k] + 1e-12);
    }
  }
}

TEST_CASE("exact_tbdi_check: degenerate Gamma cases") {
  auto full = fair_bits(4);
  auto r = exact_tbdi_check(full, 1.0);
  CHECK(r.p_bad == 0.0);
  CHECK(r.p_not_gamma == 0.0);
  CHECK(r.ok);

  auto none = fair_bits(4);
  std::fill(none.in_gamma.begin(), none.in_gamma.end(), 0);
  auto r2 = exact_tbdi_check(none, 0.5);
  CHECK(r2.exact == 0.0);  // not-B is empty
  CHECK(r2.p_bad == doctest::Approx(1.0));
  CHECK(r2.ok);
}

TEST_CASE("martingale_lemma_check: sum of eight fair bits") {
  auto s = fair_bits(8);
  auto r = martingale_lemma_check(s, 4.0);
  CHECK(r.s_cap == doctest::Approx(8.0));
  CHECK(r.v_cap == doctest::Approx(2.0));
  CHECK(r.c_cap == doctest::Approx(0.5));
  CHECK(r.exact_azuma_event == doctest::Approx(1.0 / 256.0));
  CHECK(r.azuma_rhs == doctest::Approx(std::exp(-4.0)));
  CHECK(r.pathwise_v_le_s_quarter);
  CHECK(r.ok);

  std::fill(s.f.begin(), s.f.end(), 1.0);
  auto rc = martingale_lemma_check(s, 0.5);
  CHECK(rc.exact_azuma_event == 0.0);
  CHECK(rc.exact_freedman_event == 0.0);
  CHECK(rc.ok);
}

TEST_CASE("randomized suites: no violations") {
  SpaceGenOptions opts;
  opts.max_coordinates = 6;
  opts.max_alphabet = 3;
  auto spaces = run_product_space_suite(20250810, 60, opts, 1);
  CHECK(spaces.instances == 60);
  CHECK(spaces.violations == 0);
  CHECK(spaces.checks > 60 * 10);

  auto mart = run_martingale_suite(20250810, 40, opts, 1);
  CHECK(mart.violations == 0);
}

TEST_CASE("suites: serial and parallel execution agree") {
  SpaceGenOptions opts;
  opts.max_coordinates = 5;
  auto a = run_product_space_suite(7, 20, opts, 1);
  auto b = run_product_space_suite(7, 20, opts, 4);
  CHECK(a.checks == b.checks);
  CHECK(a.violations == b.violations);
}

TEST_CASE("serialization: replay record round trip") {
  const auto s = random_space({12345, 6, streams::kSpaceGenerator});
  const auto text = s.to_json();
  const auto back = FiniteProductSpace::from_json(text);
  CHECK(back.sizes == s.sizes);
  CHECK(back.weights == s.weights);
  CHECK(back.gamma == s.gamma);
  CHECK(back.f == s.f);
  CHECK(back.in_gamma == s.in_gamma);
}

TEST_CASE("generator: deterministic per seed") {
  const auto a = random_space({9, 4, streams::kSpaceGenerator});
  const auto b = random_space({9, 4, streams::kSpaceGenerator});
  CHECK(a.f == b.f);
  CHECK(a.in_gamma == b.in_gamma);
  const auto c = random_space({9, 5, streams::kSpaceGenerator});
  CHECK(a.f != c.f);
}

TEST_CASE("enumeration cap is enforced up front") {
  FiniteProductSpace s;
  s.sizes.assign(21, 2);  // 2^21 points
  s.weights.assign(21, {0.5, 0.5});
  s.gamma.assign(21, 1.0);
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("exceeds cap"),
                       std::invalid_argument);
}
