#include "conclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace conclab {

TailEstimate clopper_pearson(long trials, long hits, double confidence) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (hits < 0 || hits > trials) throw std::invalid_argument("hits out of range");
  if (confidence <= 0.0 || confidence >= 1.0)
    throw std::invalid_argument("confidence must lie in (0,1)");
  TailEstimate e;
  e.trials = trials;
  e.hits = hits;
  e.point = static_cast<double>(hits) / static_cast<double>(trials);
  const double alpha = 1.0 - confidence;
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(hits);
  e.ci_low = hits == 0
                 ? 0.0
                 : boost::math::quantile(boost::math::beta_distribution<>(k, n - k + 1),
                                         alpha / 2.0);
  e.ci_high = hits == trials
                  ? 1.0
                  : boost::math::quantile(boost::math::beta_distribution<>(k + 1, n - k),
                                          1.0 - alpha / 2.0);
  return e;
}

double chi2_sf(double x, int df) {
  if (x < 0.0 || df < 1) throw std::invalid_argument("chi2_sf needs x >= 0, df >= 1");
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

Chi2Result chi2_two_sample(const std::map<long, long>& a, const std::map<long, long>& b,
                           double min_expected) {
  std::set<long> values;
  for (const auto& [v, c] : a) values.insert(v);
  for (const auto& [v, c] : b) values.insert(v);

  struct Cell {
    double a = 0.0, b = 0.0;
  };
  std::vector<Cell> cells;
  for (long v : values) {
    Cell c;
    if (auto it = a.find(v); it != a.end()) c.a = static_cast<double>(it->second);
    if (auto it = b.find(v); it != b.end()) c.b = static_cast<double>(it->second);
    cells.push_back(c);
  }
  double total_a = 0.0, total_b = 0.0;
  for (const Cell& c : cells) {
    total_a += c.a;
    total_b += c.b;
  }
  if (total_a <= 0.0 || total_b <= 0.0)
    throw std::invalid_argument("both samples must be non-empty");
  const double total = total_a + total_b;

  // Pool adjacent value bins (left to right) until every expected count is
  // at least min_expected.
  std::vector<Cell> pooled;
  Cell acc;
  auto expected_ok = [&](const Cell& c) {
    const double col = c.a + c.b;
    return col * total_a / total >= min_expected && col * total_b / total >= min_expected;
  };
  for (const Cell& c : cells) {
    acc.a += c.a;
    acc.b += c.b;
    if (expected_ok(acc)) {
      pooled.push_back(acc);
      acc = Cell{};
    }
  }
  if (acc.a + acc.b > 0.0) {
    if (!pooled.empty()) {
      pooled.back().a += acc.a;
      pooled.back().b += acc.b;
    } else {
      pooled.push_back(acc);
    }
  }

  Chi2Result r;
  r.df = static_cast<int>(pooled.size()) - 1;
  if (r.df < 1) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  double stat = 0.0;
  for (const Cell& c : pooled) {
    const double col = c.a + c.b;
    const double ea = col * total_a / total;
    const double eb = col * total_b / total;
    stat += (c.a - ea) * (c.a - ea) / ea;
    stat += (c.b - eb) * (c.b - eb) / eb;
  }
  r.statistic = stat;
  r.p_value = chi2_sf(stat, r.df);
  return r;
}

ExponentFit fit_log_log(std::span<const std::pair<double, double>> n_and_mean) {
  if (n_and_mean.size() < 3)
    throw std::invalid_argument("exponent fit needs at least 3 points");
  ExponentFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, mean] : n_and_mean) {
    if (n <= 0.0 || mean <= 0.0)
      throw std::invalid_argument("exponent fit needs positive values");
    const double x = std::log(n);
    const double y = std::log(mean);
    fit.points.push_back({x, y});
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(n_and_mean.size());
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("exponent fit needs distinct n values");
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;

  double ss_res = 0.0, ss_tot = 0.0;
  const double y_bar = sy / m;
  for (const auto& [x, y] : fit.points) {
    const double pred = fit.intercept + fit.slope * x;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - y_bar) * (y - y_bar);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : std::max(0.0, 1.0 - ss_res / ss_tot);
  return fit;
}

}  // namespace conclab
