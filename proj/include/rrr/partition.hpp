#pragma once

// Log-partition estimation: exact enumeration (with analytic sum-out over
// hidden units for RBMs), annealed importance sampling, the rrr-low lower
// bound and importance sampling with the width-2 rounding distribution as
// proposal.

#include "rrr/gibbs.hpp"
#include "rrr/rounding.hpp"

#include <chrono>
#include <map>
#include <numbers>
#include <set>

namespace rrr {

enum class Estimator { Exact, AIS, RrrLow, RrrIS };

inline std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::Exact: return "exact";
    case Estimator::AIS: return "ais";
    case Estimator::RrrLow: return "rrr-low";
    case Estimator::RrrIS: return "rrr-is";
  }
  return "?";
}

struct EstimateBudget {
  std::size_t samples = 0;
  std::size_t temperatures = 0;
  std::size_t sweeps = 0;
};

struct EstimateReport {
  Estimator estimator = Estimator::Exact;
  double log_z = 0.0;
  EstimateBudget budget;
  std::uint64_t seed = 0;
  double wall_clock = 0.0;
  /// Estimator-specific diagnostics (weight spread, distinct samples, ...).
  std::map<std::string, double> extras;
};

namespace detail {
class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct WeightStats {
  double log_mean = 0.0;
  double log_std = 0.0;
  /// Standard error of the weight mean, relative to the mean.
  double relative_se = 0.0;
};

inline WeightStats weight_stats(std::span<const double> log_w) {
  WeightStats s;
  s.log_mean = log_mean_exp(log_w);
  const double hi = *std::max_element(log_w.begin(), log_w.end());
  double mean = 0.0, sq = 0.0, lmean = 0.0, lsq = 0.0;
  for (double lw : log_w) {
    const double w = std::exp(lw - hi);
    mean += w;
    sq += w * w;
    lmean += lw;
    lsq += lw * lw;
  }
  const double n = static_cast<double>(log_w.size());
  mean /= n;
  const double var = std::max(0.0, sq / n - mean * mean);
  s.relative_se = n > 1 ? std::sqrt(var / (n - 1)) / mean : 0.0;
  lmean /= n;
  s.log_std = std::sqrt(std::max(0.0, lsq / n - lmean * lmean));
  return s;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Exact

/// log Σ_x exp(x'Ax) over all 2^n corners of the instance's own domain.
inline double exact_logz_mrf(const MrfParams& params, std::size_t cap = kDefaultEnumerationCap) {
  check_enumeration_cap(params.n(), cap);
  if (params.domain() == Domain::ZeroOne) {
    // Fold into a pm1 instance with an auxiliary variable; its sign symmetry
    // doubles every term.
    auto [hyp, red] = bits_to_hyp(params);
    return exact_logz_mrf(fold_linear_hyp(hyp, red), cap + 1) - std::numbers::ln2 + red.c;
  }
  CornerEnumerator it(params);
  LogSumExpAccumulator acc;
  do {
    acc.add(it.current_score());
  } while (it.next());
  return acc.value();
}

/// log Z of an RBM with the hidden layer summed out analytically:
/// pm1:  log Σ_v exp(a'v) Π_j 2cosh(v'W·ⱼ + bⱼ)
/// 01:   log Σ_v exp(a'v) Π_j (1 + exp(v'W·ⱼ + bⱼ))
/// Visible configurations are enumerated with incremental updates of W'v + b.
inline double exact_logz_rbm(const RbmParams& params, std::size_t cap = kDefaultEnumerationCap) {
  check_enumeration_cap(params.m(), cap);
  const bool pm1 = params.domain() == Domain::PlusMinusOne;
  const std::int8_t lo = pm1 ? -1 : 0;
  const std::size_t m = params.m(), p = params.p();
  const Matrix& W = params.W();

  std::vector<std::int8_t> v(m, lo);
  Vector act = params.b();
  double linear = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    act += static_cast<double>(lo) * W.row(static_cast<Eigen::Index>(i)).transpose();
    linear += lo * params.a()[static_cast<Eigen::Index>(i)];
  }
  auto flip = [&](std::size_t i) {
    const std::int8_t next = v[i] == 1 ? lo : std::int8_t{1};
    const double delta = static_cast<double>(next - v[i]);
    act += delta * W.row(static_cast<Eigen::Index>(i)).transpose();
    linear += delta * params.a()[static_cast<Eigen::Index>(i)];
    v[i] = next;
  };
  auto resync = [&] {
    act = params.b();
    linear = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      act += static_cast<double>(v[i]) * W.row(static_cast<Eigen::Index>(i)).transpose();
      linear += v[i] * params.a()[static_cast<Eigen::Index>(i)];
    }
  };

  LogSumExpAccumulator acc;
  std::uint64_t steps = 0;
  while (true) {
    double term = linear;
    for (std::size_t j = 0; j < p; ++j) term += pm1 ? log_two_cosh(act[static_cast<Eigen::Index>(j)])
                                                    : softplus(act[static_cast<Eigen::Index>(j)]);
    acc.add(term);
    std::size_t i = m;
    while (i > 0 && v[i - 1] == 1) flip(--i);
    if (i == 0) break;
    flip(i - 1);
    if ((++steps & 0x3FF) == 0) resync();
  }
  return acc.value();
}

inline EstimateReport exact_report(double log_z, std::size_t terms, double seconds) {
  EstimateReport r;
  r.estimator = Estimator::Exact;
  r.log_z = log_z;
  r.budget.samples = terms;
  r.wall_clock = seconds;
  return r;
}

// ---------------------------------------------------------------------------
// Annealed importance sampling

/// AIS over p_β ∝ exp(β·score) with β linear on [0, 1], starting from the
/// uniform distribution (log Z₀ = (m + p) log 2). Each run accumulates
/// Σ (β_{t+1} - β_t)·score(x_t) and applies one block-Gibbs sweep at β_{t+1}
/// between weight updates. The estimate is log Z₀ plus the log-mean-exp of
/// the run weights, reduced in run order.
inline EstimateReport ais_logz(const RbmParams& params, std::size_t num_temps, std::size_t num_runs,
                               std::uint64_t seed) {
  if (num_temps < 2) throw OptionsError("AIS needs at least two temperatures");
  if (num_runs < 1) throw OptionsError("AIS needs at least one run");
  detail::Stopwatch clock;
  const std::size_t m = params.m(), p = params.p();
  const Domain dom = params.domain();
  const std::int8_t lo = dom == Domain::PlusMinusOne ? -1 : 0;
  const double steps = static_cast<double>(num_temps - 1);

  std::vector<double> log_w(num_runs, 0.0);
  for (std::size_t r = 0; r < num_runs; ++r) {
    Rng rng(derive_seed(seed, r));
    std::bernoulli_distribution coin(0.5);
    std::vector<std::int8_t> v0(m), h0(p);
    for (auto& x : v0) x = coin(rng) ? std::int8_t{1} : lo;
    for (auto& x : h0) x = coin(rng) ? std::int8_t{1} : lo;
    Assignment v(dom, std::move(v0)), h(dom, std::move(h0));

    double w = 0.0;
    for (std::size_t t = 0; t + 1 < num_temps; ++t) {
      const double beta_next = static_cast<double>(t + 1) / steps;
      w += (beta_next - static_cast<double>(t) / steps) * rbm_score(params, v, h);
      if (t + 2 < num_temps) std::tie(v, h) = block_gibbs_rbm_sweep(params, v, h, 1.0 / beta_next, rng);
    }
    log_w[r] = w;
  }

  const auto stats = detail::weight_stats(log_w);
  EstimateReport report;
  report.estimator = Estimator::AIS;
  report.log_z = static_cast<double>(m + p) * std::numbers::ln2 + stats.log_mean;
  report.budget = {num_runs, num_temps, num_runs * (num_temps - 2)};
  report.seed = seed;
  report.extras["log_weight_std"] = stats.log_std;
  report.wall_clock = clock.seconds();
  return report;
}

// ---------------------------------------------------------------------------
// Relax-and-round estimators

/// log Σ exp(score) over the distinct assignments of the batch. Duplicates
/// are removed first; the result is a lower bound on log Z.
inline EstimateReport rrr_low(const MrfParams& params, const SampleBatch& batch) {
  if (batch.samples.empty()) throw OptionsError("rrr_low requires a non-empty batch");
  if (batch.samples.size() != batch.scores.size()) throw DimensionError("batch samples and scores differ in length");
  detail::Stopwatch clock;
  std::set<Assignment> seen;
  std::vector<double> terms;
  for (std::size_t t = 0; t < batch.samples.size(); ++t) {
    if (batch.samples[t].size() != params.n()) throw DimensionError("sample length does not match n");
    if (seen.insert(batch.samples[t]).second) terms.push_back(batch.scores[t]);
  }
  EstimateReport report;
  report.estimator = Estimator::RrrLow;
  report.log_z = log_sum_exp(terms);
  report.budget.samples = batch.samples.size();
  report.seed = batch.seed;
  report.extras["distinct"] = static_cast<double>(terms.size());
  report.wall_clock = clock.seconds();
  return report;
}

/// log Σ_{x in support} exp(x'Ax): the exact expectation of the importance
/// sampling estimator of Z under the width-2 rounding distribution.
inline double rrr_is_exact_support(const MrfParams& params, const Matrix& X) {
  const auto dist = build_px_k2(X);
  LogSumExpAccumulator acc;
  for (const auto& pt : enumerate_support_k2(dist, X)) acc.add(score(params, pt.x));
  return acc.value();
}

/// Importance sampling of Z with rounded samples of a width-2 X as the
/// proposal: log of the empirical mean of exp(score(x)) / p_X(x).
inline EstimateReport rrr_is(const MrfParams& params, const Matrix& X, std::size_t T, std::uint64_t seed) {
  if (X.cols() != 2) throw OptionsError("rrr_is requires width k = 2");
  detail::Stopwatch clock;
  const auto dist = build_px_k2(X);
  const SampleBatch batch = rrr_map_sample(params, X, T, seed);
  std::vector<double> log_w(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double px = px_query(dist, X, batch.samples[t]);
    if (!(px > 0.0)) throw std::logic_error("rounded sample has zero probability under its own distribution");
    log_w[t] = batch.scores[t] - std::log(px);
  }
  const auto stats = detail::weight_stats(log_w);
  EstimateReport report;
  report.estimator = Estimator::RrrIS;
  report.log_z = stats.log_mean;
  report.budget.samples = T;
  report.seed = seed;
  report.extras["log_weight_std"] = stats.log_std;
  report.extras["log_standard_error"] = stats.relative_se;
  report.extras["exact_support_log_z"] = rrr_is_exact_support(params, X);
  report.wall_clock = clock.seconds();
  return report;
}

}  // namespace rrr
