#include "conclab/product_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "conclab/parallel.hpp"

namespace conclab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

std::vector<std::size_t> suffix_sizes(const std::vector<int>& sizes) {
  std::vector<std::size_t> suffix(sizes.size() + 1, 1);
  for (int k = static_cast<int>(sizes.size()) - 1; k >= 0; --k)
    suffix[k] = suffix[k + 1] * static_cast<std::size_t>(sizes[k]);
  return suffix;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteProductSpace

std::size_t FiniteProductSpace::total_points() const {
  std::size_t total = 1;
  for (int s : sizes) total *= static_cast<std::size_t>(s);
  return total;
}

void FiniteProductSpace::validate(std::size_t cap) const {
  const int n = coordinates();
  require(n >= 1, "space needs at least one coordinate");
  require(static_cast<int>(weights.size()) == n, "weights must match coordinate count");
  require(static_cast<int>(gamma.size()) == n, "gamma must match coordinate count");
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    require(sizes[k] >= 1, "alphabet sizes must be positive");
    require(static_cast<int>(weights[k].size()) == sizes[k],
            "weight vector length must match alphabet size");
    double sum = 0.0;
    for (double w : weights[k]) {
      require(w >= 0.0, "weights must be non-negative");
      sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "weights must sum to 1");
    require(gamma[k] > 0.0 && gamma[k] <= 1.0, "gamma_k must lie in (0,1]");
    require(total <= cap / static_cast<std::size_t>(sizes[k]),
            "enumeration size exceeds cap " + std::to_string(cap) +
                " (needs at least " +
                std::to_string(total * static_cast<std::size_t>(sizes[k])) + ")");
    total *= static_cast<std::size_t>(sizes[k]);
  }
  require(f.size() == total, "f table must have one value per point");
  require(in_gamma.size() == total, "Gamma table must have one value per point");
}

std::size_t FiniteProductSpace::index_of(const std::vector<int>& outcome) const {
  require(outcome.size() == sizes.size(), "outcome length must be N");
  std::size_t idx = 0;
  for (int k = 0; k < coordinates(); ++k) {
    require(outcome[k] >= 0 && outcome[k] < sizes[k], "outcome value out of range");
    idx = idx * static_cast<std::size_t>(sizes[k]) + static_cast<std::size_t>(outcome[k]);
  }
  return idx;
}

std::vector<int> FiniteProductSpace::outcome_of(std::size_t index) const {
  std::vector<int> outcome(sizes.size());
  for (int k = coordinates() - 1; k >= 0; --k) {
    outcome[k] = static_cast<int>(index % static_cast<std::size_t>(sizes[k]));
    index /= static_cast<std::size_t>(sizes[k]);
  }
  return outcome;
}

std::string FiniteProductSpace::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["sizes"] = sizes;
  j["weights"] = weights;
  j["gamma"] = gamma;
  j["f"] = f;
  j["in_gamma"] = std::vector<int>(in_gamma.begin(), in_gamma.end());
  return j.dump();
}

FiniteProductSpace FiniteProductSpace::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  FiniteProductSpace s;
  s.sizes = j.at("sizes").get<std::vector<int>>();
  s.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  s.gamma = j.at("gamma").get<std::vector<double>>();
  s.f = j.at("f").get<std::vector<double>>();
  auto g = j.at("in_gamma").get<std::vector<int>>();
  s.in_gamma.assign(g.begin(), g.end());
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// SpaceAnalysis

SpaceAnalysis::SpaceAnalysis(const FiniteProductSpace& space, std::size_t cap)
    : space_(&space) {
  space.validate(cap);
  const int n = space.coordinates();
  suffix_ = suffix_sizes(space.sizes);
  const std::size_t total = suffix_[0];

  // Suffix-sum DP: level k holds E(f | first k coordinates) and
  // P(X not in Gamma | first k coordinates) for every prefix.
  cond_mean_.resize(n + 1);
  cond_fail_.resize(n + 1);
  cond_mean_[n] = space.f;
  cond_fail_[n].resize(total);
  for (std::size_t i = 0; i < total; ++i) cond_fail_[n][i] = space.in_gamma[i] ? 0.0 : 1.0;
  for (int k = n - 1; k >= 0; --k) {
    const std::size_t count = total / suffix_[k];
    const int s = space.sizes[k];
    cond_mean_[k].resize(count);
    cond_fail_[k].resize(count);
    for (std::size_t p = 0; p < count; ++p) {
      double mean = 0.0, fail = 0.0;
      for (int a = 0; a < s; ++a) {
        const double w = space.weights[k][a];
        mean += w * cond_mean_[k + 1][p * s + a];
        fail += w * cond_fail_[k + 1][p * s + a];
      }
      cond_mean_[k][p] = mean;
      cond_fail_[k][p] = fail;
    }
  }

  // Point weights: forward product along prefixes.
  {
    std::vector<double> level{1.0};
    for (int k = 0; k < n; ++k) {
      std::vector<double> next(total / suffix_[k + 1]);
      for (std::size_t p = 0; p < level.size(); ++p)
        for (int a = 0; a < space.sizes[k]; ++a)
          next[p * space.sizes[k] + a] = level[p] * space.weights[k][a];
      level = std::move(next);
    }
    point_weight_ = std::move(level);
  }

  // Stopping time and bad event per point.
  bad_.assign(total, 0);
  stop_.assign(total, n);
  f_min_ = std::numeric_limits<double>::infinity();
  f_max_ = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < total; ++i) {
    f_min_ = std::min(f_min_, space.f[i]);
    f_max_ = std::max(f_max_, space.f[i]);
    int stop = n;
    for (int k = 0; k < n; ++k) {
      if (cond_fail_[k][i / suffix_[k]] > space.gamma[k]) {
        stop = k;
        break;
      }
    }
    stop_[i] = stop;
    bad_[i] = (!space.in_gamma[i] || stop < n) ? 1 : 0;
    if (bad_[i]) p_bad_ += point_weight_[i];
  }
}

MartingaleTrace SpaceAnalysis::trace(std::size_t index) const {
  const int n = space_->coordinates();
  MartingaleTrace t;
  t.y.resize(n + 1);
  for (int k = 0; k <= n; ++k) t.y[k] = cond_mean_[k][index / suffix_[k]];
  t.stop = stop_[index];
  if (t.stop < n) t.bad_at = t.stop + 1;
  return t;
}

double SpaceAnalysis::upper_tail_not_bad(double threshold) const {
  double p = 0.0;
  for (std::size_t i = 0; i < space_->f.size(); ++i)
    if (!bad_[i] && space_->f[i] >= threshold) p += point_weight_[i];
  return p;
}

double SpaceAnalysis::upper_tail(double threshold) const {
  double p = 0.0;
  for (std::size_t i = 0; i < space_->f.size(); ++i)
    if (space_->f[i] >= threshold) p += point_weight_[i];
  return p;
}

std::vector<double> SpaceAnalysis::stopped_path(std::size_t index) const {
  const MartingaleTrace t = trace(index);
  const int n = space_->coordinates();
  std::vector<double> m(n + 1);
  for (int k = 0; k <= n; ++k) m[k] = t.y[std::min(k, t.stop)];
  return m;
}

MartingaleTrace doob_trace(const FiniteProductSpace& space, const std::vector<int>& outcome) {
  SpaceAnalysis analysis(space);
  return analysis.trace(space.index_of(outcome));
}

// ---------------------------------------------------------------------------
// Lipschitz coefficient extraction

namespace {

// Enumerates all point pairs differing only in coordinate k.
template <typename Pair>
void for_each_coordinate_pair(const FiniteProductSpace& space, int k, Pair&& pair) {
  const auto suffix = suffix_sizes(space.sizes);
  const std::size_t hi_count = suffix[0] / suffix[k];
  const std::size_t lo_count = suffix[k + 1];
  const int s = space.sizes[k];
  for (std::size_t hi = 0; hi < hi_count; ++hi) {
    const std::size_t base = hi * suffix[k];
    for (std::size_t lo = 0; lo < lo_count; ++lo)
      for (int a = 0; a < s; ++a)
        for (int b = a + 1; b < s; ++b)
          pair(base + static_cast<std::size_t>(a) * lo_count + lo,
               base + static_cast<std::size_t>(b) * lo_count + lo);
  }
}

}  // namespace

LipschitzCoefficients minimal_lipschitz(const FiniteProductSpace& space, bool two_sided) {
  space.validate();
  const int n = space.coordinates();
  LipschitzCoefficients out;
  out.c.assign(n, 0.0);
  out.d.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    for_each_coordinate_pair(space, k, [&](std::size_t i, std::size_t j) {
      const double diff = std::abs(space.f[i] - space.f[j]);
      out.d[k] = std::max(out.d[k], diff);
      const bool relevant = two_sided ? (space.in_gamma[i] && space.in_gamma[j])
                                      : (space.in_gamma[i] || space.in_gamma[j]);
      if (relevant) out.c[k] = std::max(out.c[k], diff);
    });
  }
  return out;
}

TruncationCoefficients truncation_coefficients(const FiniteProductSpace& space) {
  space.validate();
  const int n = space.coordinates();
  const std::size_t total = space.total_points();

  // Gamma_k = projection of Gamma onto coordinate k; a point is "local" when
  // every coordinate lies in its projection.
  std::vector<std::vector<std::uint8_t>> proj(n);
  for (int k = 0; k < n; ++k) proj[k].assign(space.sizes[k], 0);
  for (std::size_t i = 0; i < total; ++i) {
    if (!space.in_gamma[i]) continue;
    const auto outcome = space.outcome_of(i);
    for (int k = 0; k < n; ++k) proj[k][outcome[k]] = 1;
  }
  std::vector<std::uint8_t> local(total, 1);
  for (std::size_t i = 0; i < total; ++i) {
    const auto outcome = space.outcome_of(i);
    for (int k = 0; k < n; ++k) {
      if (!proj[k][outcome[k]]) {
        local[i] = 0;
        break;
      }
    }
  }

  TruncationCoefficients out;
  out.c.assign(n, 0.0);
  out.d.assign(n, 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < total; ++i) {
    lo = std::min(lo, space.f[i]);
    hi = std::max(hi, space.f[i]);
  }
  out.s = hi - lo;
  for (int k = 0; k < n; ++k) {
    for_each_coordinate_pair(space, k, [&](std::size_t i, std::size_t j) {
      if (!local[i] || !local[j]) return;
      const double diff = std::abs(space.f[i] - space.f[j]);
      out.d[k] = std::max(out.d[k], diff);
      if (space.in_gamma[i] || space.in_gamma[j]) out.c[k] = std::max(out.c[k], diff);
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact theorem checks

ExactCheckReport exact_tbdi_check(const FiniteProductSpace& space, double t,
                                  double tolerance) {
  require(t >= 0.0, "t must be non-negative");
  SpaceAnalysis analysis(space);
  const auto coeff = minimal_lipschitz(space, /*two_sided=*/false);

  LipschitzProfile profile;
  profile.c = coeff.c;
  profile.d = coeff.d;
  profile.gamma = space.gamma;

  ExactCheckReport r;
  r.mu = analysis.mean();
  r.f_range = analysis.f_max() - analysis.f_min();
  r.t = t;
  r.p_not_gamma = analysis.p_not_gamma();
  r.p_bad = analysis.p_bad();
  r.bound = tbdi_bound(profile, t, r.p_not_gamma);
  r.exact = analysis.upper_tail_not_bad(r.mu + t);

  r.not_bad_subset_gamma = true;
  for (std::size_t i = 0; i < space.f.size(); ++i) {
    if (!analysis.in_bad_event(i) && !space.in_gamma[i]) {
      r.not_bad_subset_gamma = false;
      break;
    }
  }
  r.exact_le_bound = r.exact <= r.bound.value + tolerance;
  r.bad_le_budget = r.p_bad <= r.bound.bad_budget + tolerance;
  r.ok = r.exact_le_bound && r.bad_le_budget && r.not_bad_subset_gamma;
  return r;
}

MartingaleCheckReport martingale_lemma_check(const FiniteProductSpace& space, double t,
                                             std::optional<double> s_cap,
                                             std::optional<double> v_cap,
                                             std::optional<double> c_cap,
                                             double tolerance) {
  require(t >= 0.0, "t must be non-negative");
  SpaceAnalysis analysis(space);
  const int n = space.coordinates();
  const std::size_t total = space.total_points();

  MartingaleCheckReport r;
  r.t = t;
  r.pathwise_v_le_s_quarter = true;

  // Pathwise walk of the stopped martingale: per step the exact conditional
  // increment extremes L_k, U_k and variance, accumulated into S_k, V_k, C_k.
  // `step` runs once per (point, k) with the running statistics.
  const double m0 = analysis.mean();
  auto walk = [&](std::size_t i, auto&& step) {
    double s_acc = 0.0, v_acc = 0.0, c_acc = 0.0;
    bool stopped = false;
    double m_k = m0;
    for (int k = 1; k <= n; ++k) {
      if (analysis.stopping_index(i) <= k - 1) stopped = true;
      if (!stopped) {
        const std::size_t parent = analysis.prefix_of(i, k - 1);
        const int s = space.sizes[k - 1];
        const double cur = analysis.level_mean(k - 1, parent);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        double var = 0.0;
        for (int a = 0; a < s; ++a) {
          const double delta =
              analysis.level_mean(k, parent * static_cast<std::size_t>(s) + a) - cur;
          lo = std::min(lo, delta);
          hi = std::max(hi, delta);
          var += space.weights[k - 1][a] * delta * delta;
        }
        s_acc += (hi - lo) * (hi - lo);
        v_acc += var;
        c_acc = std::max(c_acc, hi);
        m_k = analysis.level_mean(k, analysis.prefix_of(i, k));
      }
      step(m_k, s_acc, v_acc, c_acc);
    }
  };

  // First pass: pathwise maxima (defaults for the caps) and V_k <= S_k / 4.
  double max_s = 0.0, max_v = 0.0, max_c = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    walk(i, [&](double, double s_acc, double v_acc, double c_acc) {
      if (v_acc > s_acc / 4.0 + tolerance) r.pathwise_v_le_s_quarter = false;
      max_s = std::max(max_s, s_acc);
      max_v = std::max(max_v, v_acc);
      max_c = std::max(max_c, c_acc);
    });
  }
  r.s_cap = s_cap.value_or(max_s);
  r.v_cap = v_cap.value_or(max_v);
  r.c_cap = c_cap.value_or(max_c);

  // Second pass: exact probabilities of the two stopped events.
  for (std::size_t i = 0; i < total; ++i) {
    bool azuma_hit = false, freedman_hit = false;
    walk(i, [&](double m_k, double s_acc, double v_acc, double c_acc) {
      if (m_k >= m0 + t) {
        if (s_acc <= r.s_cap + tolerance) azuma_hit = true;
        if (v_acc <= r.v_cap + tolerance && c_acc <= r.c_cap + tolerance)
          freedman_hit = true;
      }
    });
    if (azuma_hit) r.exact_azuma_event += analysis.point_weight(i);
    if (freedman_hit) r.exact_freedman_event += analysis.point_weight(i);
  }

  if (t == 0.0) {
    r.azuma_rhs = r.bennett_rhs = r.bernstein_rhs = 1.0;
  } else {
    r.azuma_rhs = r.s_cap > 0.0 ? std::exp(-2.0 * t * t / r.s_cap) : 0.0;
    if (r.v_cap > 0.0 && r.c_cap > 0.0) {
      const double x = r.c_cap * t / r.v_cap;
      r.bennett_rhs = std::exp(-r.v_cap / (r.c_cap * r.c_cap) * phi(x));
      r.bernstein_rhs = std::exp(-t * t / (2.0 * r.v_cap + 2.0 * r.c_cap * t / 3.0));
    } else if (r.c_cap > 0.0) {
      r.bennett_rhs = 0.0;
      r.bernstein_rhs = std::exp(-3.0 * t / (2.0 * r.c_cap));
    } else {
      // increments never positive: the events are impossible for t > 0
      r.bennett_rhs = 0.0;
      r.bernstein_rhs = 0.0;
    }
  }

  r.ok = r.pathwise_v_le_s_quarter && r.exact_azuma_event <= r.azuma_rhs + tolerance &&
         r.exact_freedman_event <= r.bennett_rhs + tolerance &&
         r.bennett_rhs <= r.bernstein_rhs + tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Randomized instances

FiniteProductSpace random_space(const SeedTuple& seed, const SpaceGenOptions& options) {
  CounterRng rng(seed);
  FiniteProductSpace s;
  const int n = 2 + static_cast<int>(rng.below(options.max_coordinates - 1));
  s.sizes.resize(n);
  s.weights.resize(n);
  s.gamma.resize(n);
  int max_sum = 0;
  for (int k = 0; k < n; ++k) {
    s.sizes[k] =
        options.force_binary ? 2 : 2 + static_cast<int>(rng.below(options.max_alphabet - 1));
    max_sum += s.sizes[k] - 1;
    // dyadic weights: distribute 8 units, one guaranteed per outcome
    std::vector<int> units(s.sizes[k], 1);
    for (int extra = s.sizes[k]; extra < 8; ++extra) ++units[rng.below(s.sizes[k])];
    s.weights[k].resize(s.sizes[k]);
    for (int a = 0; a < s.sizes[k]; ++a) s.weights[k][a] = units[a] / 8.0;
    s.gamma[k] = (1.0 + rng.below(16)) / 16.0;
  }

  const std::size_t total = s.total_points();
  s.f.resize(total);
  s.in_gamma.assign(total, 1);

  const int f_mode = static_cast<int>(rng.below(3));
  std::vector<double> linear(n);
  double bump = 0.0;
  int bump_threshold = 0;
  if (f_mode != 0) {
    for (int k = 0; k < n; ++k) {
      linear[k] = f_mode == 2 ? rng.below(17) / 8.0
                              : (static_cast<double>(rng.below(33)) - 16.0) / 8.0;
    }
    bump = rng.below(17) / 8.0;
    bump_threshold = static_cast<int>(rng.below(max_sum + 1));
  }

  const int gamma_mode = static_cast<int>(rng.below(4));
  static constexpr int kKeepGrid[] = {8, 12, 14, 15};  // of 16
  const int keep = kKeepGrid[rng.below(4)];
  const int gamma_threshold = static_cast<int>(rng.below(max_sum + 1));

  for (std::size_t i = 0; i < total; ++i) {
    const auto outcome = s.outcome_of(i);
    int sum = 0;
    for (int x : outcome) sum += x;
    switch (f_mode) {
      case 0:
        s.f[i] = (static_cast<double>(rng.below(65)) - 32.0) / 8.0;
        break;
      default: {
        double v = 0.0;
        for (int k = 0; k < n; ++k) v += linear[k] * outcome[k];
        if (f_mode == 2 && sum >= bump_threshold) v += bump;
        s.f[i] = v;
        break;
      }
    }
    switch (gamma_mode) {
      case 0:
        s.in_gamma[i] = 1;
        break;
      case 1:
        s.in_gamma[i] = rng.below(16) < static_cast<std::uint64_t>(keep) ? 1 : 0;
        break;
      case 2:
        s.in_gamma[i] = sum <= gamma_threshold ? 1 : 0;
        break;
      default:
        s.in_gamma[i] = sum >= gamma_threshold ? 1 : 0;
        break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

struct InstanceResult {
  long checks = 0;
  std::vector<std::string> notes;
  std::string counterexample;
};

void expect(InstanceResult& result, const FiniteProductSpace& space, bool ok,
            const std::string& label) {
  ++result.checks;
  if (ok) return;
  result.notes.push_back(label);
  if (result.counterexample.empty()) result.counterexample = space.to_json();
}

// All theorem variants that apply to one instance, each compared against the
// exact enumerated probability. tol matches the double-precision slack used
// throughout (the generator keeps arithmetic exactly representable anyway).
InstanceResult check_product_space_instance(const FiniteProductSpace& space) {
  constexpr double tol = 1e-10;
  InstanceResult result;
  SpaceAnalysis analysis(space);

  const double mu = analysis.mean();
  const double range = analysis.f_max() - analysis.f_min();
  const double p_fail = analysis.p_not_gamma();
  const double p_bad = analysis.p_bad();

  const bool binary =
      std::all_of(space.sizes.begin(), space.sizes.end(), [](int s) { return s == 2; });

  const auto one_sided = minimal_lipschitz(space, false);
  const auto two_sided = minimal_lipschitz(space, true);
  const auto trunc = truncation_coefficients(space);

  // monotonicity of f and Gamma in the product partial order (per-coordinate
  // outcome indices), for the Harris-boost check
  bool f_inc = true, f_dec = true, g_inc = true, g_dec = true;
  for (int k = 0; k < space.coordinates(); ++k) {
    for_each_coordinate_pair(space, k, [&](std::size_t lo, std::size_t hi) {
      if (space.f[hi] < space.f[lo]) f_inc = false;
      if (space.f[hi] > space.f[lo]) f_dec = false;
      if (space.in_gamma[hi] < space.in_gamma[lo]) g_inc = false;
      if (space.in_gamma[hi] > space.in_gamma[lo]) g_dec = false;
    });
  }
  const bool monotone_aligned = (f_inc && g_inc) || (f_dec && g_dec);

  LipschitzProfile prof1;
  prof1.c = one_sided.c;
  prof1.d = one_sided.d;
  prof1.gamma = space.gamma;

  LipschitzProfile prof2 = prof1;
  prof2.c = two_sided.c;
  prof2.d = two_sided.d;
  std::vector<double> q(space.coordinates());
  for (int k = 0; k < space.coordinates(); ++k)
    q[k] = *std::min_element(space.weights[k].begin(), space.weights[k].end());
  const bool q_positive = std::all_of(q.begin(), q.end(), [](double x) { return x > 0.0; });
  if (q_positive) prof2.q = q;

  LipschitzProfile prof_trunc = prof1;
  prof_trunc.c = trunc.c;
  prof_trunc.d = trunc.d;

  if (binary) {
    std::vector<double> p(space.coordinates());
    for (int k = 0; k < space.coordinates(); ++k) p[k] = space.weights[k][1];
    prof1.p = p;
    prof2.p = p;
  }

  // not-B subset of Gamma, and the budget, once per instance
  bool subset = true;
  for (std::size_t i = 0; i < space.f.size(); ++i)
    if (!analysis.in_bad_event(i) && !space.in_gamma[i]) subset = false;
  expect(result, space, subset, "not-B must be contained in Gamma");
  {
    const auto budget_bound = tbdi_bound(prof1, 1.0, p_fail);
    expect(result, space, p_bad <= budget_bound.bad_budget + tol,
           "P(B) exceeds the bad-event budget");
  }

  // asymmetric-alphabet variant: p_k = P(X_k is not its most likely value)
  LipschitzProfile prof_asym = prof1;
  {
    std::vector<double> p(space.coordinates());
    for (int k = 0; k < space.coordinates(); ++k)
      p[k] = 1.0 - *std::max_element(space.weights[k].begin(), space.weights[k].end());
    prof_asym.p = p;
  }

  for (double factor : {0.125, 0.25, 0.5}) {
    const double t = factor * range;
    const double exact = analysis.upper_tail_not_bad(mu + t);

    expect(result, space, exact <= tbdi_bound(prof1, t).value + tol,
           "typical bounded differences bound violated");
    {
      BernoulliOptions asym;
      asym.asymmetric = true;
      expect(result, space, exact <= tbdi_bernoulli_bound(prof_asym, t, asym).value + tol,
             "asymmetric-alphabet bound violated");
    }
    if (monotone_aligned) {
      // Harris: the full tail is at most the restricted one over 1 - P(B)
      const double full_tail = analysis.upper_tail(mu + t);
      expect(result, space, full_tail * (1.0 - p_bad) <= exact + tol,
             "monotone boost (Harris) violated");
    }
    if (binary) {
      expect(result, space, exact <= tbdi_bound(prof1, t, std::nullopt, true).value + tol,
             "factor-4 binary bound violated");
      expect(result, space, exact <= tbdi_bernoulli_bound(prof1, t).value + tol,
             "Bernoulli Bernstein-form bound violated");
      BernoulliOptions bennett;
      bennett.bennett = true;
      expect(result, space, exact <= tbdi_bernoulli_bound(prof1, t, bennett).value + tol,
             "Bernoulli Bennett-form bound violated");
    }
    if (q_positive) {
      const auto e2 = two_sided_error(prof2);
      expect(result, space, exact <= tbdi_bound_with_errors(prof2, e2, t).value + tol,
             "two-sided condition bound violated");
      if (binary) {
        expect(result, space,
               exact <= tbdi_bound_with_errors(prof2, e2, t, std::nullopt, true).value + tol,
               "two-sided factor-4 bound violated");
        BernoulliOptions opt;
        opt.error_terms = e2;
        expect(result, space, exact <= tbdi_bernoulli_bound(prof2, t, opt).value + tol,
               "two-sided Bernoulli bound violated");
      }
    }
    {
      const auto b = truncation_bound(prof_trunc, t, trunc.s, p_fail, false);
      const double exact_shifted = analysis.upper_tail_not_bad(mu + t + b.threshold_shift);
      expect(result, space, exact_shifted <= b.value + tol,
             "truncation bound with threshold shift violated");
    }
  }
  return result;
}

InstanceResult check_martingale_instance(const FiniteProductSpace& space) {
  constexpr double tol = 1e-10;
  InstanceResult result;
  SpaceAnalysis analysis(space);
  const double range = analysis.f_max() - analysis.f_min();

  for (double factor : {0.125, 0.25, 0.5}) {
    const double t = factor * range;
    const auto full = martingale_lemma_check(space, t);
    ++result.checks;
    if (!full.ok) {
      result.notes.push_back("martingale inequality violated (pathwise caps)");
      if (result.counterexample.empty()) result.counterexample = space.to_json();
    }
    // restricted caps exercise the S_k <= S / V_k <= V / C_k <= C clauses
    const auto restricted = martingale_lemma_check(
        space, t, full.s_cap * 0.7, full.v_cap * 0.7, full.c_cap * 0.9, tol);
    ++result.checks;
    if (!restricted.ok) {
      result.notes.push_back("martingale inequality violated (restricted caps)");
      if (result.counterexample.empty()) result.counterexample = space.to_json();
    }
  }
  return result;
}

template <typename Check>
SuiteReport run_suite(std::uint64_t master_seed, int instances,
                      const SpaceGenOptions& options, int threads, Check&& check) {
  std::vector<InstanceResult> results(instances);
  for_each_index(static_cast<std::size_t>(instances), threads, [&](std::size_t i) {
    SpaceGenOptions opts = options;
    // alternate plain/binary instances so the binary-only theorems get half
    if (!opts.force_binary) opts.force_binary = (i % 2 == 0);
    const FiniteProductSpace space =
        random_space({master_seed, i, streams::kSpaceGenerator}, opts);
    results[i] = check(space);
  });

  SuiteReport report;
  report.instances = instances;
  for (const auto& r : results) {
    report.checks += r.checks;
    report.violations += static_cast<long>(r.notes.size());
    for (const auto& note : r.notes)
      if (report.failure_notes.size() < 8) report.failure_notes.push_back(note);
    if (report.first_counterexample_json.empty() && !r.counterexample.empty())
      report.first_counterexample_json = r.counterexample;
  }
  return report;
}

}  // namespace

SuiteReport run_product_space_suite(std::uint64_t master_seed, int instances,
                                    const SpaceGenOptions& options, int threads) {
  return run_suite(master_seed, instances, options, threads, check_product_space_instance);
}

SuiteReport run_martingale_suite(std::uint64_t master_seed, int instances,
                                 const SpaceGenOptions& options, int threads) {
  return run_suite(master_seed, instances, options, threads, check_martingale_instance);
}

SuiteReport verify_space(const FiniteProductSpace& space) {
  SuiteReport report;
  report.instances = 1;
  for (const auto& result : {check_product_space_instance(space), check_martingale_instance(space)}) {
    report.checks += result.checks;
    report.violations += static_cast<long>(result.notes.size());
    for (const auto& note : result.notes) report.failure_notes.push_back(note);
    if (report.first_counterexample_json.empty() && !result.counterexample.empty())
      report.first_counterexample_json = result.counterexample;
  }
  return report;
}

}  // namespace conclab
