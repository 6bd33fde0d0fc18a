#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conclab/bounds.hpp"
#include "conclab/rng.hpp"

namespace conclab {

// An exhaustively enumerable product probability space together with a
// function f, a good event Gamma and compensation factors gamma_k. f and
// Gamma are stored as tables indexed in mixed radix with coordinate 0 most
// significant, so a length-k prefix owns a contiguous block of points.
struct FiniteProductSpace {
  static constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

  std::vector<int> sizes;                    // |Lambda_k|, each >= 1
  std::vector<std::vector<double>> weights;  // per-coordinate, each sums to 1
  std::vector<double> f;                     // one value per point
  std::vector<std::uint8_t> in_gamma;        // Gamma indicator per point
  std::vector<double> gamma;                 // gamma_k in (0,1]

  int coordinates() const { return static_cast<int>(sizes.size()); }
  std::size_t total_points() const;

  // Throws std::invalid_argument on malformed data and when the enumeration
  // size exceeds the cap (the message names the required size).
  void validate(std::size_t cap = kDefaultEnumerationCap) const;

  std::size_t index_of(const std::vector<int>& outcome) const;
  std::vector<int> outcome_of(std::size_t index) const;

  std::string to_json() const;  // replayable record
  static FiniteProductSpace from_json(const std::string& text);
};

// One outcome's Doob path: y[k] = E(f | first k coordinates), the stopping
// index, and the first k whose conditional Gamma-failure exceeds gamma_k.
struct MartingaleTrace {
  std::vector<double> y;      // length N+1
  int stop = 0;               // T in [0, N]
  std::optional<int> bad_at;  // first k in [1, N] with B_{k-1}
};

// Exact conditional expectations / bad events / stopped martingales for one
// space, built once by suffix-sum dynamic programming over prefix blocks.
class SpaceAnalysis {
 public:
  explicit SpaceAnalysis(const FiniteProductSpace& space,
                         std::size_t cap = FiniteProductSpace::kDefaultEnumerationCap);

  const FiniteProductSpace& space() const { return *space_; }
  double mean() const { return cond_mean_[0][0]; }
  double f_min() const { return f_min_; }
  double f_max() const { return f_max_; }
  double p_not_gamma() const { return cond_fail_[0][0]; }

  double point_weight(std::size_t index) const { return point_weight_[index]; }
  std::size_t prefix_of(std::size_t index, int level) const { return index / suffix_[level]; }

  // Conditional values at a length-`level` prefix id.
  double level_mean(int level, std::size_t prefix) const { return cond_mean_[level][prefix]; }
  double level_fail(int level, std::size_t prefix) const { return cond_fail_[level][prefix]; }

  // B = (not Gamma) union {some prefix has conditional failure > gamma_k}.
  bool in_bad_event(std::size_t index) const { return bad_[index] != 0; }
  double p_bad() const { return p_bad_; }
  int stopping_index(std::size_t index) const { return stop_[index]; }

  MartingaleTrace trace(std::size_t index) const;

  // Exact P(f >= threshold and not B) / P(f >= threshold).
  double upper_tail_not_bad(double threshold) const;
  double upper_tail(double threshold) const;

  // Stopped Doob martingale M_k = Y_{k and T} along the path of `index`.
  std::vector<double> stopped_path(std::size_t index) const;

 private:
  const FiniteProductSpace* space_;
  std::vector<std::size_t> suffix_;             // suffix block sizes, length N+1
  std::vector<std::vector<double>> cond_mean_;  // per level
  std::vector<std::vector<double>> cond_fail_;  // per level
  std::vector<double> point_weight_;
  std::vector<std::uint8_t> bad_;
  std::vector<int> stop_;
  double f_min_ = 0.0;
  double f_max_ = 0.0;
  double p_bad_ = 0.0;
};

MartingaleTrace doob_trace(const FiniteProductSpace& space, const std::vector<int>& outcome);

// Tightest coefficients satisfying the per-coordinate Lipschitz conditions:
// d_k is the unconditional maximum over single-coordinate changes, c_k
// restricts to pairs with an endpoint in Gamma (one-sided) or both endpoints
// in Gamma (two-sided).
struct LipschitzCoefficients {
  std::vector<double> c;
  std::vector<double> d;
};
LipschitzCoefficients minimal_lipschitz(const FiniteProductSpace& space, bool two_sided);

// Coefficients for the truncation variant: pairs restricted to the product
// of per-coordinate projections of Gamma, plus the global range bound s.
struct TruncationCoefficients {
  std::vector<double> c;
  std::vector<double> d;
  double s = 0.0;
};
TruncationCoefficients truncation_coefficients(const FiniteProductSpace& space);

// Exact verification of the typical bounded differences bound on one space:
// compares P(f >= mu + t and not B) against the evaluated bound with minimal
// one-sided coefficients, and P(B) against the bad-event budget.
struct ExactCheckReport {
  double mu = 0.0;
  double f_range = 0.0;
  double t = 0.0;
  double exact = 0.0;
  double p_not_gamma = 0.0;
  double p_bad = 0.0;
  TailBound bound;
  bool not_bad_subset_gamma = false;
  bool exact_le_bound = false;
  bool bad_le_budget = false;
  bool ok = false;
};
ExactCheckReport exact_tbdi_check(const FiniteProductSpace& space, double t,
                                  double tolerance = 1e-10);

// Exact verification of the two martingale inequalities on the stopped Doob
// martingale of a space, with L_k / U_k the exact conditional increment
// extremes. When s/v/c are omitted the pathwise maxima are used, making the
// side conditions vacuous.
struct MartingaleCheckReport {
  double t = 0.0;
  double s_cap = 0.0, v_cap = 0.0, c_cap = 0.0;
  double exact_azuma_event = 0.0;     // P(exists k: M_k >= M_0 + t, S_k <= S)
  double exact_freedman_event = 0.0;  // ... with V_k <= V and C_k <= C instead
  double azuma_rhs = 0.0;             // exp(-2 t^2 / S)
  double bennett_rhs = 0.0;           // exp(-V/C^2 phi(Ct/V))
  double bernstein_rhs = 0.0;         // exp(-t^2/(2V + 2Ct/3))
  bool pathwise_v_le_s_quarter = false;
  bool ok = false;
};
MartingaleCheckReport martingale_lemma_check(const FiniteProductSpace& space, double t,
                                             std::optional<double> s_cap = std::nullopt,
                                             std::optional<double> v_cap = std::nullopt,
                                             std::optional<double> c_cap = std::nullopt,
                                             double tolerance = 1e-10);

// Randomized-instance generator. The distribution is fixed here so fuzzing
// is reproducible: coordinate count uniform in [2, max_coordinates], alphabet
// sizes uniform in [2, max_alphabet], weights dyadic (positive multiples of
// 1/8), gamma_k dyadic multiples of 1/16, f one of {random table, linear,
// monotone} with dyadic values, Gamma one of {full, iid keep-probability in
// {1/2, 3/4, 7/8, 15/16}, sum-threshold up/down sets}. Dyadic data keeps
// every enumerated probability exactly representable.
struct SpaceGenOptions {
  int max_coordinates = 8;
  int max_alphabet = 3;
  bool force_binary = false;
};
FiniteProductSpace random_space(const SeedTuple& seed, const SpaceGenOptions& options = {});

// Batch suites used by `verify` and the acceptance gate. Each instance is
// checked against every theorem variant that applies to it; a violation is
// reported with a replayable serialization of the offending space.
struct SuiteReport {
  int instances = 0;
  long checks = 0;
  long violations = 0;
  std::vector<std::string> failure_notes;  // first few, human readable
  std::string first_counterexample_json;   // empty when none
};
SuiteReport run_product_space_suite(std::uint64_t master_seed, int instances,
                                    const SpaceGenOptions& options, int threads);
SuiteReport run_martingale_suite(std::uint64_t master_seed, int instances,
                                 const SpaceGenOptions& options, int threads);

// The full check set of both suites on one space; used to replay serialized
// counterexample candidates.
SuiteReport verify_space(const FiniteProductSpace& space);

}  // namespace conclab
