#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace conclab {

// Per-coordinate inputs shared by the whole family of tail bounds.
// c_k: typical Lipschitz coefficients, d_k: worst-case coefficients
// (c_k <= d_k), gamma_k in (0,1]: compensation factors. p is only needed
// by the Bernoulli variants, q only by the two-sided error terms.
struct LipschitzProfile {
  std::vector<double> c;
  std::vector<double> d;
  std::vector<double> gamma;
  std::optional<std::vector<double>> p;
  std::optional<std::vector<double>> q;

  std::size_t size() const { return c.size(); }

  // Throws std::invalid_argument when any invariant fails.
  void validate() const;

  // e_k = gamma_k * (d_k - c_k)
  std::vector<double> error_terms() const;

  static LipschitzProfile uniform(std::size_t n, double c_value, double d_value,
                                  double gamma_value);
};

// A tail probability bound together with the quantities it was built from.
// value == min(1, exp(-exponent)); exponent == +inf encodes an impossible
// deviation (bound exactly zero). Comparisons in tests use the exponent so
// nothing underflows.
struct TailBound {
  double value = 1.0;
  double exponent = 0.0;
  double variance_term = 0.0;            // V, Bernoulli variants
  double max_term = 0.0;                 // C, Bernoulli variants
  std::vector<double> error_terms;       // e_k
  double bad_budget = 0.0;               // min(1, sum_k gamma_k^{-1} * P(X not in Gamma))
  double threshold_shift = 0.0;          // Delta, truncation variant only
};

// phi(x) = (1+x) ln(1+x) - x, evaluated with a series near 0 to avoid
// cancellation. Requires x >= 0.
double phi(double x);

// Worst-case bounded differences: exp(-2 t^2 / sum(c_k^2)).
TailBound bdi_bound(const LipschitzProfile& profile, double t);

// Typical bounded differences: exp(-t^2 / (2 sum((c_k+e_k)^2))) on the event
// excluding the bad set B. two_valued multiplies the exponent by 4 (valid
// when every coordinate takes only two values). gamma_fail = P(X not in
// Gamma) feeds the bad-event budget.
TailBound tbdi_bound(const LipschitzProfile& profile, double t,
                     std::optional<double> gamma_fail = std::nullopt,
                     bool two_valued = false);

// Same but with externally substituted error terms (two-sided condition).
TailBound tbdi_bound_with_errors(const LipschitzProfile& profile,
                                 const std::vector<double>& error_terms, double t,
                                 std::optional<double> gamma_fail = std::nullopt,
                                 bool two_valued = false);

struct BernoulliOptions {
  bool bennett = false;
  bool asymmetric = false;
  std::optional<double> monotone_bad_prob;  // P(B), monotone boost divides by 1-P(B)
  std::optional<double> gamma_fail;
  std::optional<std::vector<double>> error_terms;  // two-sided substitution
};

// Bernoulli refinement: V = sum (1-p_k) p_k (c_k+e_k)^2, C = max(c_k+e_k),
// exponent t^2/(2V + 2Ct/3); `bennett` sharpens it to V/C^2 * phi(Ct/V);
// `asymmetric` deletes (1-p_k) and replaces c_k+e_k by c_k + e_k/(1-p_k).
TailBound tbdi_bernoulli_bound(const LipschitzProfile& profile, double t,
                               const BernoulliOptions& options = {});

// Two-sided condition error terms e_k = 2 gamma_k (d_k - c_k) / q_k, to be
// substituted into tbdi_bound / tbdi_bernoulli_bound.
std::vector<double> two_sided_error(const LipschitzProfile& profile);

// Truncation variant: the tbdi exponent plus the additive threshold shift
// Delta = s * gamma_fail (0 when monotone). Callers test {f >= mu + t + Delta}.
TailBound truncation_bound(const LipschitzProfile& profile, double t, double s,
                           double gamma_fail, bool monotone);

// Precomputed per-query-set aggregates over the query family Q.
struct QueryAggregate {
  std::vector<double> sq_sums;   // per Q: sum_{k in Q} (c_k+e_k)^2
  std::vector<double> var_sums;  // per Q: sum_{k in Q} (1-p_k) p_k (c_k+e_k)^2
  std::vector<double> maxima;    // per Q: max_{k in Q} (c_k+e_k)
};

enum class BoundVariant { bdi, tbdi, tbdi_bernoulli };

// Dynamic-exposure aggregation: the base formula with sums/maxima replaced by
// their maxima over the query family.
TailBound dynamic_aggregate_bound(const QueryAggregate& aggregate, double t,
                                  BoundVariant variant);

// exp(-mu^2 / (mu + 2 delta)), the closed-form upper bound on P(count = 0);
// returns 1 when mu = 0.
double janson_zero_bound(double mu, double delta);

}  // namespace conclab
