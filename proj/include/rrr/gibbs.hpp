#pragma once

// Gibbs-family samplers: systematic-scan single-site Gibbs on binary MRFs,
// block Gibbs on RBMs, annealed Gibbs on a linear temperature schedule and
// annealed Gibbs started from relax-and-round samples (rrr-AG).

#include "rrr/rounding.hpp"

#include <optional>
#include <sstream>

namespace rrr {

/// Temperatures visited by annealed Gibbs, one sweep each.
class AnnealSchedule {
 public:
  AnnealSchedule() = default;
  explicit AnnealSchedule(std::vector<double> temperatures) : temperatures_(std::move(temperatures)) {
    for (std::size_t s = 0; s < temperatures_.size(); ++s) {
      if (!(temperatures_[s] > 0.0)) throw OptionsError("temperatures must be positive");
      if (s > 0 && temperatures_[s] > temperatures_[s - 1]) throw OptionsError("temperatures must be non-increasing");
    }
  }

  /// `steps` temperatures interpolated linearly from t_high down to 1.
  static AnnealSchedule linear(double t_high, std::size_t steps) {
    if (!(t_high >= 1.0)) throw OptionsError("t_high must be at least 1");
    std::vector<double> temps(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      temps[s] = steps == 1 ? 1.0 : t_high + (1.0 - t_high) * static_cast<double>(s) / static_cast<double>(steps - 1);
    }
    if (steps > 0) temps.back() = 1.0;
    return AnnealSchedule(std::move(temps));
  }

  static AnnealSchedule constant(std::size_t steps, double temperature = 1.0) {
    return AnnealSchedule(std::vector<double>(steps, temperature));
  }

  const std::vector<double>& temperatures() const noexcept { return temperatures_; }
  std::size_t size() const noexcept { return temperatures_.size(); }
  bool empty() const noexcept { return temperatures_.empty(); }

 private:
  std::vector<double> temperatures_;
};

struct ChainState {
  Assignment x;
  double score = 0.0;
  std::size_t sweep_count = 0;
  std::vector<double> score_trace;
  std::vector<double> temperature_trace;
  /// Highest-scoring state visited, including the initial one.
  Assignment best_x;
  double best_score = 0.0;

  static ChainState start(const MrfParams& params, Assignment init) {
    ChainState s;
    s.score = rrr::score(params, init);
    s.best_x = init;
    s.best_score = s.score;
    s.x = std::move(init);
    return s;
  }
};

/// P(xᵢ = +1 | x₋ᵢ) at the given temperature. Only the cross terms
/// 2xᵢΣ_{j≠i}Aᵢⱼxⱼ depend on xᵢ, so the log-odds are 4Σ_{j≠i}Aᵢⱼxⱼ / T.
inline double gibbs_conditional(const MrfParams& params, const Assignment& x, std::size_t i, double temperature) {
  if (params.domain() != Domain::PlusMinusOne) throw DomainError("gibbs_conditional requires a pm1 instance");
  if (i >= params.n()) throw DimensionError("coordinate index out of range");
  if (x.size() != params.n()) throw DimensionError("assignment length does not match n");
  if (!(temperature > 0.0)) throw OptionsError("temperature must be positive");
  const Matrix& A = params.A();
  double field = 0.0;
  for (std::size_t j = 0; j < params.n(); ++j) {
    if (j != i) field += A(i, j) * x[j];
  }
  return logistic(4.0 * field / temperature);
}

/// Resamples every coordinate once in ascending order, skipping `clamped`.
inline void resample_sweep(const MrfParams& params, Assignment& x, double temperature, Rng& rng,
                           std::optional<std::size_t> clamped = std::nullopt) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < params.n(); ++i) {
    if (clamped && *clamped == i) continue;
    const double p_plus = gibbs_conditional(params, x, i, temperature);
    x.set(i, unif(rng) < p_plus ? std::int8_t{1} : std::int8_t{-1});
  }
}

inline void gibbs_sweep(const MrfParams& params, ChainState& state, double temperature, Rng& rng,
                        std::optional<std::size_t> clamped = std::nullopt) {
  resample_sweep(params, state.x, temperature, rng, clamped);
  state.score = score(params, state.x);
  ++state.sweep_count;
  state.score_trace.push_back(state.score);
  state.temperature_trace.push_back(temperature);
  if (state.score > state.best_score) {
    state.best_score = state.score;
    state.best_x = state.x;
  }
}

/// Samples h | v jointly, then v | h. In the ±1 domain flipping hⱼ changes the
/// score by 2(vᵀW·ⱼ + bⱼ); in the {0,1} domain by (vᵀW·ⱼ + bⱼ).
inline std::pair<Assignment, Assignment> block_gibbs_rbm_sweep(const RbmParams& params, const Assignment& v,
                                                               const Assignment& h, double temperature, Rng& rng) {
  if (v.size() != params.m() || h.size() != params.p()) throw DimensionError("block Gibbs: wrong assignment length");
  if (v.domain() != params.domain() || h.domain() != params.domain())
    throw DomainError("block Gibbs: assignment domain does not match parameters");
  if (!(temperature > 0.0)) throw OptionsError("temperature must be positive");
  const bool pm1 = params.domain() == Domain::PlusMinusOne;
  const double scale = (pm1 ? 2.0 : 1.0) / temperature;
  const std::int8_t off = pm1 ? -1 : 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Matrix& W = params.W();

  std::vector<std::int8_t> hv(params.p()), vv(params.m());
  for (std::size_t j = 0; j < params.p(); ++j) {
    double act = params.b()[static_cast<Eigen::Index>(j)];
    for (std::size_t i = 0; i < params.m(); ++i)
      if (v[i] != 0) act += v[i] * W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    hv[j] = unif(rng) < logistic(scale * act) ? std::int8_t{1} : off;
  }
  for (std::size_t i = 0; i < params.m(); ++i) {
    double act = params.a()[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < params.p(); ++j)
      if (hv[j] != 0) act += hv[j] * W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    vv[i] = unif(rng) < logistic(scale * act) ? std::int8_t{1} : off;
  }
  return {Assignment(params.domain(), std::move(vv)), Assignment(params.domain(), std::move(hv))};
}

/// One sweep per scheduled temperature, from `init`.
inline ChainState annealed_gibbs(const MrfParams& params, const AnnealSchedule& schedule, const Assignment& init,
                                 std::uint64_t seed, std::optional<std::size_t> clamped = std::nullopt) {
  Rng rng(seed);
  ChainState state = ChainState::start(params, init);
  state.score_trace.reserve(schedule.size());
  for (double t : schedule.temperatures()) gibbs_sweep(params, state, t, rng, clamped);
  return state;
}

/// Uniform random start, with the clamped coordinate (if any) at +1.
inline Assignment random_assignment(std::size_t n, Rng& rng, std::optional<std::size_t> clamped = std::nullopt) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::int8_t> x(n);
  for (auto& v : x) v = coin(rng) ? std::int8_t{1} : std::int8_t{-1};
  if (clamped) x.at(*clamped) = 1;
  return Assignment(Domain::PlusMinusOne, std::move(x));
}

/// Every chain of rrr-AG: `chains` rounded samples of X, each annealed under
/// `schedule`. With `clamped` set, samples are first flipped so that
/// coordinate is +1, and it stays fixed during the sweeps.
inline std::vector<ChainState> rrr_ag_chains(const MrfParams& params, const Matrix& X, const AnnealSchedule& schedule,
                                             std::size_t chains, std::uint64_t seed,
                                             std::optional<std::size_t> clamped = std::nullopt) {
  if (chains < 1) throw OptionsError("rrr_ag requires at least one chain");
  const SampleBatch batch = rrr_map_sample(params, X, chains, derive_seed(seed, 0));
  std::vector<ChainState> out;
  out.reserve(chains);
  for (std::size_t c = 0; c < chains; ++c) {
    const Assignment init = clamped ? canonicalize_aux(batch.samples[c], *clamped) : batch.samples[c];
    out.push_back(annealed_gibbs(params, schedule, init, derive_seed(seed, c + 1), clamped));
  }
  return out;
}

/// The rrr-AG chain with the best final score (earliest chain on ties).
inline ChainState rrr_ag(const MrfParams& params, const Matrix& X, const AnnealSchedule& schedule, std::size_t chains,
                         std::uint64_t seed, std::optional<std::size_t> clamped = std::nullopt) {
  auto all = rrr_ag_chains(params, X, schedule, chains, seed, clamped);
  std::size_t best = 0;
  for (std::size_t c = 1; c < all.size(); ++c)
    if (all[c].score > all[best].score) best = c;
  return std::move(all[best]);
}

inline std::string chain_trace_csv(const ChainState& state) {
  std::ostringstream os;
  os << "sweep,temperature,score\n";
  for (std::size_t s = 0; s < state.score_trace.size(); ++s)
    os << s + 1 << ',' << format_real(state.temperature_trace[s]) << ',' << format_real(state.score_trace[s]) << '\n';
  return os.str();
}

}  // namespace rrr
