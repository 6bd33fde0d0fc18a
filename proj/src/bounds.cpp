#include "conclab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

TailBound from_exponent(double exponent) {
  TailBound b;
  b.exponent = exponent;
  b.value = std::isinf(exponent) ? 0.0 : std::min(1.0, std::exp(-exponent));
  return b;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double bad_budget(const std::vector<double>& gamma, double gamma_fail) {
  require(gamma_fail >= 0.0 && gamma_fail <= 1.0, "gamma_fail must lie in [0,1]");
  double sum = 0.0;
  for (double g : gamma) sum += gamma_fail / g;
  return clamp01(sum);
}

void check_t(double t) { require(t >= 0.0 && !std::isnan(t), "t must be non-negative"); }

}  // namespace

void LipschitzProfile::validate() const {
  const std::size_t n = c.size();
  require(n > 0, "profile must have at least one coordinate");
  require(d.size() == n && gamma.size() == n, "profile sequences must all have length N");
  if (p) require(p->size() == n, "p must have length N");
  if (q) require(q->size() == n, "q must have length N");
  for (std::size_t k = 0; k < n; ++k) {
    require(c[k] >= 0.0, "c_k must be non-negative");
    require(d[k] >= c[k], "c_k <= d_k is required");
    require(gamma[k] > 0.0 && gamma[k] <= 1.0, "gamma_k must lie in (0,1]");
    if (p) require((*p)[k] >= 0.0 && (*p)[k] <= 1.0, "p_k must lie in [0,1]");
    if (q) require((*q)[k] > 0.0 && (*q)[k] <= 1.0, "q_k must lie in (0,1]");
  }
}

std::vector<double> LipschitzProfile::error_terms() const {
  std::vector<double> e(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) e[k] = gamma[k] * (d[k] - c[k]);
  return e;
}

LipschitzProfile LipschitzProfile::uniform(std::size_t n, double c_value, double d_value,
                                           double gamma_value) {
  LipschitzProfile profile;
  profile.c.assign(n, c_value);
  profile.d.assign(n, d_value);
  profile.gamma.assign(n, gamma_value);
  return profile;
}

double phi(double x) {
  require(x >= 0.0 && !std::isnan(x), "phi requires x >= 0");
  if (x < 1e-4) {
    // (1+x)ln(1+x)-x = x^2/2 - x^3/6 + x^4/12 - ...; truncation error < x^5.
    return x * x * (0.5 + x * (-1.0 / 6.0 + x * (1.0 / 12.0)));
  }
  return (1.0 + x) * std::log1p(x) - x;
}

TailBound bdi_bound(const LipschitzProfile& profile, double t) {
  profile.validate();
  check_t(t);
  double sum_sq = 0.0;
  for (double ck : profile.c) sum_sq += ck * ck;
  if (t == 0.0) return from_exponent(0.0);
  if (sum_sq == 0.0) return from_exponent(kInf);  // constant function, no deviation
  return from_exponent(2.0 * t * t / sum_sq);
}

TailBound tbdi_bound_with_errors(const LipschitzProfile& profile,
                                 const std::vector<double>& error_terms, double t,
                                 std::optional<double> gamma_fail, bool two_valued) {
  profile.validate();
  check_t(t);
  require(error_terms.size() == profile.size(), "error terms must have length N");
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    require(error_terms[k] >= 0.0, "e_k must be non-negative");
    const double s = profile.c[k] + error_terms[k];
    sum_sq += s * s;
  }
  TailBound b;
  if (t == 0.0) {
    b = from_exponent(0.0);
  } else if (sum_sq == 0.0) {
    b = from_exponent(kInf);
  } else {
    double exponent = t * t / (2.0 * sum_sq);
    if (two_valued) exponent *= 4.0;
    b = from_exponent(exponent);
  }
  b.error_terms = error_terms;
  if (gamma_fail) b.bad_budget = bad_budget(profile.gamma, *gamma_fail);
  return b;
}

TailBound tbdi_bound(const LipschitzProfile& profile, double t,
                     std::optional<double> gamma_fail, bool two_valued) {
  profile.validate();
  return tbdi_bound_with_errors(profile, profile.error_terms(), t, gamma_fail, two_valued);
}

TailBound tbdi_bernoulli_bound(const LipschitzProfile& profile, double t,
                               const BernoulliOptions& options) {
  profile.validate();
  check_t(t);
  require(profile.p.has_value(), "Bernoulli bound requires success probabilities p");
  const auto& p = *profile.p;
  std::vector<double> e =
      options.error_terms ? *options.error_terms : profile.error_terms();
  require(e.size() == profile.size(), "error terms must have length N");

  double variance = 0.0;
  double max_term = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const double s = profile.c[k] + e[k];
    max_term = std::max(max_term, s);
    if (options.asymmetric) {
      require(p[k] < 1.0, "asymmetric variant divides by 1-p_k; p_k = 1 rejected");
      const double s_tilde = profile.c[k] + e[k] / (1.0 - p[k]);
      variance += p[k] * s_tilde * s_tilde;
    } else {
      variance += (1.0 - p[k]) * p[k] * s * s;
    }
  }

  TailBound b;
  if (t == 0.0) {
    b = from_exponent(0.0);
  } else if (variance == 0.0 && max_term == 0.0) {
    b = from_exponent(kInf);
  } else if (options.bennett) {
    // V/C^2 * phi(Ct/V); the V -> 0 limit is an impossible deviation.
    if (variance == 0.0) {
      b = from_exponent(kInf);
    } else {
      const double x = max_term * t / variance;
      b = from_exponent(variance / (max_term * max_term) * phi(x));
    }
  } else {
    b = from_exponent(t * t / (2.0 * variance + 2.0 * max_term * t / 3.0));
  }

  if (options.monotone_bad_prob) {
    const double pb = *options.monotone_bad_prob;
    require(pb >= 0.0 && pb < 1.0, "monotone bad probability must lie in [0,1)");
    // Dividing the value by 1-P(B) is an exponent shift, keeping
    // value == min(1, exp(-exponent)); a boosted value above 1 clamps to 1.
    b = from_exponent(std::max(0.0, b.exponent + std::log1p(-pb)));
  }

  b.variance_term = variance;
  b.max_term = max_term;
  b.error_terms = std::move(e);
  if (options.gamma_fail) b.bad_budget = bad_budget(profile.gamma, *options.gamma_fail);
  return b;
}

std::vector<double> two_sided_error(const LipschitzProfile& profile) {
  profile.validate();
  require(profile.q.has_value(), "two-sided error terms require q");
  const auto& q = *profile.q;
  std::vector<double> e(profile.size());
  for (std::size_t k = 0; k < profile.size(); ++k) {
    e[k] = 2.0 * profile.gamma[k] * (profile.d[k] - profile.c[k]) / q[k];
  }
  return e;
}

TailBound truncation_bound(const LipschitzProfile& profile, double t, double s,
                           double gamma_fail, bool monotone) {
  require(s >= 0.0, "s must be non-negative");
  TailBound b = tbdi_bound(profile, t, gamma_fail, false);
  b.threshold_shift = monotone ? 0.0 : s * gamma_fail;
  return b;
}

TailBound dynamic_aggregate_bound(const QueryAggregate& aggregate, double t,
                                  BoundVariant variant) {
  check_t(t);
  const auto max_of = [](const std::vector<double>& xs, const char* what) {
    if (xs.empty()) throw std::invalid_argument(what);
    double m = 0.0;
    for (double x : xs) {
      if (x < 0.0) throw std::invalid_argument("aggregate entries must be non-negative");
      m = std::max(m, x);
    }
    return m;
  };

  if (variant == BoundVariant::tbdi_bernoulli) {
    const double v = max_of(aggregate.var_sums, "empty query family (var_sums)");
    const double c = max_of(aggregate.maxima, "empty query family (maxima)");
    if (t == 0.0) return from_exponent(0.0);
    if (v == 0.0 && c == 0.0) return from_exponent(kInf);
    TailBound b = from_exponent(t * t / (2.0 * v + 2.0 * c * t / 3.0));
    b.variance_term = v;
    b.max_term = c;
    return b;
  }

  const double s = max_of(aggregate.sq_sums, "empty query family (sq_sums)");
  if (t == 0.0) return from_exponent(0.0);
  if (s == 0.0) return from_exponent(kInf);
  const double exponent =
      variant == BoundVariant::bdi ? 2.0 * t * t / s : t * t / (2.0 * s);
  return from_exponent(exponent);
}

double janson_zero_bound(double mu, double delta) {
  require(mu >= 0.0 && !std::isnan(mu), "mu must be non-negative");
  require(delta >= 0.0 && !std::isnan(delta), "delta must be non-negative");
  if (mu == 0.0) return 1.0;
  return std::exp(-mu * mu / (mu + 2.0 * delta));
}

}  // namespace conclab
