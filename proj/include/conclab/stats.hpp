#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace conclab {

// A Monte Carlo frequency with its exact (Clopper-Pearson) confidence bounds.
struct TailEstimate {
  long trials = 0;
  long hits = 0;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

// Two-sided Clopper-Pearson interval; conservative by construction.
TailEstimate clopper_pearson(long trials, long hits, double confidence = 0.95);

// Upper tail of the chi-squared distribution with df degrees of freedom.
double chi2_sf(double x, int df);

struct Chi2Result {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Two-sample chi-squared homogeneity test over integer-valued outcomes.
// Adjacent value bins are pooled until every expected count reaches
// min_expected (the usual small-cell safeguard).
Chi2Result chi2_two_sample(const std::map<long, long>& a, const std::map<long, long>& b,
                           double min_expected = 5.0);

// Least-squares fit of log(mean) against log(n).
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  std::vector<std::array<double, 2>> points;  // (log n, log mean)
};
ExponentFit fit_log_log(std::span<const std::pair<double, double>> n_and_mean);

}  // namespace conclab
