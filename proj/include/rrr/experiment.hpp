#pragma once

// Benchmark harness behind the CLI: MAP comparisons (rrr, annealed Gibbs,
// rrr-AG, brute force) and log-partition comparisons (exact, AIS, rrr-low,
// rrr-IS) on instance files, with JSON/CSV reports.
//
// Every instance is mapped onto a ±1 MRF before relaxation. RBMs are embedded
// with a leading auxiliary variable; {0,1} instances are rewritten over ±1 and
// their linear terms folded through the same auxiliary variable. The
// auxiliary coordinate is clamped to +1 during Gibbs sweeps and samples are
// flipped to match before they are scored in the original parameters.

#include "rrr/io.hpp"
#include "rrr/partition.hpp"
#include "rrr/relaxation.hpp"

#include <nlohmann/json.hpp>

#include <functional>

namespace rrr {

struct WorkingProblem {
  MrfParams mrf;
  std::optional<std::size_t> aux;
  /// log Z(original) = log Z(mrf restricted to aux = +1) + offset.
  double offset = 0.0;
  /// Variable count of the original instance.
  std::size_t original_n = 0;
};

inline WorkingProblem working_problem(const Instance& inst) {
  if (const auto* rbm = std::get_if<RbmParams>(&inst)) {
    if (rbm->domain() == Domain::PlusMinusOne) return {rbm_to_mrf(*rbm), 0, 0.0, rbm->m() + rbm->p()};
    auto [hyp, c] = rbm_bits_to_hyp(*rbm);
    return {rbm_to_mrf(hyp), 0, c, rbm->m() + rbm->p()};
  }
  const auto& mrf = std::get<MrfParams>(inst);
  if (mrf.domain() == Domain::PlusMinusOne) return {mrf, std::nullopt, 0.0, mrf.n()};
  auto [hyp, red] = bits_to_hyp(mrf);
  return {fold_linear_hyp(hyp, red), 0, red.c, mrf.n()};
}

/// Maps a working-problem assignment back to the original instance and
/// scores it there.
struct OriginalPoint {
  nlohmann::json assignment;
  double score = 0.0;
};

inline OriginalPoint to_original(const Instance& inst, const WorkingProblem& wp, const Assignment& x) {
  const Assignment canon = wp.aux ? canonicalize_aux(x, *wp.aux) : x;
  auto values = canon.values();
  const std::size_t skip = wp.aux ? 1 : 0;
  auto convert = [&](std::size_t from, std::size_t count, Domain dom) {
    std::vector<std::int8_t> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::int8_t s = values[skip + from + i];
      out[i] = dom == Domain::PlusMinusOne ? s : static_cast<std::int8_t>(s == 1 ? 1 : 0);
    }
    return Assignment(dom, std::move(out));
  };
  auto as_json = [](const Assignment& a) {
    std::vector<int> out(a.values().begin(), a.values().end());
    return nlohmann::json(out);
  };
  if (const auto* rbm = std::get_if<RbmParams>(&inst)) {
    const Assignment v = convert(0, rbm->m(), rbm->domain()), h = convert(rbm->m(), rbm->p(), rbm->domain());
    return {{{"v", as_json(v)}, {"h", as_json(h)}}, rbm_score(*rbm, v, h)};
  }
  const auto& mrf = std::get<MrfParams>(inst);
  const Assignment y = convert(0, mrf.n(), mrf.domain());
  return {{{"x", as_json(y)}}, score(mrf, y)};
}

inline nlohmann::json describe_instance(const Instance& inst) {
  if (const auto* rbm = std::get_if<RbmParams>(&inst))
    return {{"kind", "rbm"}, {"domain", domain_tag(rbm->domain())}, {"m", rbm->m()}, {"p", rbm->p()}};
  const auto& mrf = std::get<MrfParams>(inst);
  return {{"kind", "mrf"}, {"domain", domain_tag(mrf.domain())}, {"n", mrf.n()}};
}

// ---------------------------------------------------------------------------
// MAP

struct MapConfig {
  std::string instance_path;
  std::vector<std::string> methods{"rrr", "ag", "rrr-ag"};
  std::uint64_t seed = 0;
  std::size_t k = 2;
  std::size_t restarts = 8;
  std::size_t max_iters = 10000;
  std::size_t samples = 1000;
  std::size_t sweeps = 200;
  std::size_t chains = 10;
  double t_high = 10.0;
  std::size_t brute_cap = kDefaultEnumerationCap;
  std::string format = "json";
  bool timing = false;
};

inline nlohmann::json to_json(const MapConfig& c) {
  return {{"instance", c.instance_path}, {"methods", c.methods}, {"seed", c.seed},           {"k", c.k},
          {"restarts", c.restarts},     {"max_iters", c.max_iters}, {"samples", c.samples}, {"sweeps", c.sweeps},
          {"chains", c.chains},         {"t_high", c.t_high},   {"brute_cap", c.brute_cap}};
}

struct MethodResult {
  std::string method;
  OriginalPoint best;
  /// Sweep-equivalents: one n x n matrix-vector product each.
  std::size_t cost = 0;
  nlohmann::json details = nlohmann::json::object();
  double seconds = 0.0;
};

struct MapReport {
  MapConfig config;
  nlohmann::json instance;
  std::vector<MethodResult> results;
  std::string winner;
  /// CSV side outputs keyed by file name (traces, per-sample scores).
  std::map<std::string, std::string> traces;
};

inline void validate(const MapConfig& c) {
  static const std::set<std::string> known{"rrr", "ag", "rrr-ag", "brute"};
  if (c.methods.empty()) throw OptionsError("at least one method is required");
  for (const auto& m : c.methods)
    if (!known.contains(m)) throw OptionsError("unknown MAP method \"" + m + "\"");
  if (c.k < 1 || c.restarts < 1 || c.max_iters < 1 || c.samples < 1 || c.chains < 1)
    throw OptionsError("budgets must be positive");
  if (!(c.t_high >= 1.0)) throw OptionsError("t_high must be at least 1");
}

inline MapReport run_map(const Instance& inst, const MapConfig& cfg) {
  validate(cfg);
  const WorkingProblem wp = working_problem(inst);
  const auto wants = [&](std::string_view m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end(); };
  if (wants("brute")) check_enumeration_cap(wp.original_n, cfg.brute_cap);
  if (cfg.k > wp.mrf.n()) throw OptionsError("width k exceeds the number of variables");

  MapReport report;
  report.config = cfg;
  report.instance = describe_instance(inst);

  std::optional<RelaxedSolution> relaxed;
  double lrp_seconds = 0.0;
  if (wants("rrr") || wants("rrr-ag")) {
    detail::Stopwatch clock;
    LrpOptions opts;
    opts.k = cfg.k;
    opts.restarts = cfg.restarts;
    opts.max_iters = cfg.max_iters;
    opts.seed = derive_seed(cfg.seed, 100);
    relaxed = solve_lrp(wp.mrf, opts);
    lrp_seconds = clock.seconds();
    report.traces["lrp_trace.csv"] = trace_csv(*relaxed);
  }
  const std::size_t lrp_cost = relaxed ? relaxed->matvecs : 0;
  const std::size_t rrr_ag_cost = lrp_cost + cfg.chains * (1 + cfg.sweeps);

  for (const auto& method : cfg.methods) {
    detail::Stopwatch clock;
    MethodResult res;
    res.method = method;
    if (method == "rrr") {
      const SampleBatch batch = rrr_map_sample(wp.mrf, relaxed->X, cfg.samples, derive_seed(cfg.seed, 200));
      const auto best = std::max_element(batch.scores.begin(), batch.scores.end()) - batch.scores.begin();
      res.best = to_original(inst, wp, batch.samples[static_cast<std::size_t>(best)]);
      res.cost = lrp_cost + cfg.samples;
      res.details = {{"relaxed_objective", relaxed->objective}, {"lrp_iterations", relaxed->iterations},
                     {"lrp_restart", relaxed->restart}};
      report.traces["rrr_samples.csv"] = samples_csv(batch);
    } else if (method == "ag") {
      // Extra sweeps per chain so AG spends what rrr-AG spends, relaxation included.
      const std::size_t extra = relaxed ? (lrp_cost + cfg.chains + cfg.chains - 1) / cfg.chains : 0;
      const auto schedule = AnnealSchedule::linear(cfg.t_high, cfg.sweeps + extra);
      Rng init_rng(derive_seed(cfg.seed, 300));
      std::optional<ChainState> best;
      for (std::size_t c = 0; c < cfg.chains; ++c) {
        auto state = annealed_gibbs(wp.mrf, schedule, random_assignment(wp.mrf.n(), init_rng, wp.aux),
                                    derive_seed(cfg.seed, 301 + c), wp.aux);
        if (!best || state.best_score > best->best_score) best = std::move(state);
      }
      res.best = to_original(inst, wp, best->best_x);
      res.cost = cfg.chains * schedule.size();
      res.details = {{"sweeps_per_chain", schedule.size()}, {"chains", cfg.chains}};
      report.traces["ag_trace.csv"] = chain_trace_csv(*best);
    } else if (method == "rrr-ag") {
      const auto schedule = AnnealSchedule::linear(cfg.t_high, cfg.sweeps);
      auto chains = rrr_ag_chains(wp.mrf, relaxed->X, schedule, cfg.chains, derive_seed(cfg.seed, 400), wp.aux);
      std::size_t best = 0;
      for (std::size_t c = 1; c < chains.size(); ++c)
        if (chains[c].best_score > chains[best].best_score) best = c;
      res.best = to_original(inst, wp, chains[best].best_x);
      res.cost = rrr_ag_cost;
      res.details = {{"sweeps_per_chain", schedule.size()}, {"chains", cfg.chains}};
      report.traces["rrr_ag_trace.csv"] = chain_trace_csv(chains[best]);
    } else if (method == "brute") {
      const MapResult exact = brute_force_map(wp.mrf, cfg.brute_cap + (wp.aux ? 1 : 0));
      res.best = to_original(inst, wp, exact.x);
      res.cost = std::size_t{1} << wp.mrf.n();
    }
    res.seconds = clock.seconds() + (method == "rrr" || method == "rrr-ag" ? lrp_seconds : 0.0);
    report.results.push_back(std::move(res));
  }
  std::size_t win = 0;
  for (std::size_t r = 1; r < report.results.size(); ++r)
    if (report.results[r].best.score > report.results[win].best.score) win = r;
  report.winner = report.results[win].method;
  return report;
}

inline std::string render(const MapReport& report) {
  if (report.config.format == "csv") {
    std::ostringstream os;
    os << "method,score,cost_sweeps\n";
    for (const auto& r : report.results) os << r.method << ',' << format_real(r.best.score) << ',' << r.cost << '\n';
    return os.str();
  }
  nlohmann::json j;
  j["command"] = "map";
  j["config"] = to_json(report.config);
  j["instance"] = report.instance;
  j["methods"] = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json m = {{"method", r.method}, {"score", r.best.score}, {"assignment", r.best.assignment},
                        {"cost_sweeps", r.cost}, {"details", r.details}};
    if (report.config.timing) m["wall_clock_seconds"] = r.seconds;
    j["methods"].push_back(std::move(m));
  }
  j["winner"] = report.winner;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Log-partition

struct LogZConfig {
  std::string instance_path;
  std::vector<std::string> methods{"exact", "ais", "rrr-low", "rrr-is"};
  std::uint64_t seed = 0;
  std::size_t k = 2;
  std::size_t restarts = 8;
  std::size_t max_iters = 10000;
  std::size_t samples = 10000;
  std::size_t num_temps = 1000;
  std::size_t num_runs = 100;
  std::size_t exact_cap = kDefaultEnumerationCap;
  std::string format = "json";
  bool timing = false;
};

inline nlohmann::json to_json(const LogZConfig& c) {
  return {{"instance", c.instance_path}, {"methods", c.methods},     {"seed", c.seed},
          {"k", c.k},                    {"restarts", c.restarts},   {"max_iters", c.max_iters},
          {"samples", c.samples},        {"num_temps", c.num_temps}, {"num_runs", c.num_runs},
          {"exact_cap", c.exact_cap}};
}

struct LogZReport {
  LogZConfig config;
  nlohmann::json instance;
  std::vector<EstimateReport> estimates;
};

inline void validate(const LogZConfig& c) {
  static const std::set<std::string> known{"exact", "ais", "rrr-low", "rrr-is"};
  if (c.methods.empty()) throw OptionsError("at least one method is required");
  for (const auto& m : c.methods)
    if (!known.contains(m)) throw OptionsError("unknown log-partition method \"" + m + "\"");
  if (c.restarts < 1 || c.max_iters < 1 || c.samples < 1 || c.num_runs < 1 || c.num_temps < 2)
    throw OptionsError("budgets must be positive (num_temps >= 2)");
  if (std::find(c.methods.begin(), c.methods.end(), "rrr-is") != c.methods.end() && c.k != 2)
    throw OptionsError("rrr-is requires width k = 2");
}

inline LogZReport run_logz(const Instance& inst, const LogZConfig& cfg) {
  validate(cfg);
  const WorkingProblem wp = working_problem(inst);
  const auto* rbm = std::get_if<RbmParams>(&inst);
  const auto wants = [&](std::string_view m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end(); };
  if (wants("exact")) check_enumeration_cap(rbm ? rbm->m() : std::get<MrfParams>(inst).n(), cfg.exact_cap);
  if (wants("ais") && !rbm) throw OptionsError("ais requires an RBM instance");
  if (cfg.k > wp.mrf.n()) throw OptionsError("width k exceeds the number of variables");

  LogZReport report;
  report.config = cfg;
  report.instance = describe_instance(inst);

  std::optional<RelaxedSolution> relaxed;
  if (wants("rrr-low") || wants("rrr-is")) {
    LrpOptions opts;
    opts.k = cfg.k;
    opts.restarts = cfg.restarts;
    opts.max_iters = cfg.max_iters;
    opts.seed = derive_seed(cfg.seed, 100);
    relaxed = solve_lrp(wp.mrf, opts);
  }
  // With an auxiliary variable every term appears twice (x and -x).
  const double aux_shift = wp.aux ? std::numbers::ln2 : 0.0;

  for (const auto& method : cfg.methods) {
    if (method == "exact") {
      detail::Stopwatch clock;
      const double lz = rbm ? exact_logz_rbm(*rbm, cfg.exact_cap) : exact_logz_mrf(std::get<MrfParams>(inst), cfg.exact_cap);
      const std::size_t terms = std::size_t{1} << (rbm ? rbm->m() : std::get<MrfParams>(inst).n());
      report.estimates.push_back(exact_report(lz, terms, clock.seconds()));
    } else if (method == "ais") {
      report.estimates.push_back(ais_logz(*rbm, cfg.num_temps, cfg.num_runs, derive_seed(cfg.seed, 500)));
    } else if (method == "rrr-low") {
      SampleBatch batch = rrr_map_sample(wp.mrf, relaxed->X, cfg.samples, derive_seed(cfg.seed, 600));
      if (wp.aux)
        for (auto& x : batch.samples) x = canonicalize_aux(x, *wp.aux);
      EstimateReport r = rrr_low(wp.mrf, batch);
      r.log_z += wp.offset;
      report.estimates.push_back(std::move(r));
    } else if (method == "rrr-is") {
      EstimateReport r = rrr_is(wp.mrf, relaxed->X, cfg.samples, derive_seed(cfg.seed, 700));
      r.log_z += wp.offset - aux_shift;
      r.extras["exact_support_log_z"] += wp.offset - aux_shift;
      report.estimates.push_back(std::move(r));
    }
  }
  return report;
}

inline nlohmann::json to_json(const EstimateReport& r, bool timing) {
  nlohmann::json j = {{"estimator", estimator_name(r.estimator)},
                      {"log_z", r.log_z},
                      {"budget", {{"samples", r.budget.samples}, {"temperatures", r.budget.temperatures}, {"sweeps", r.budget.sweeps}}},
                      {"seed", r.seed},
                      {"extras", r.extras}};
  if (timing) j["wall_clock_seconds"] = r.wall_clock;
  return j;
}

inline std::string render(const LogZReport& report) {
  std::map<std::string, double> table;
  for (const auto& e : report.estimates) table[std::string(estimator_name(e.estimator))] = e.log_z;
  if (report.config.format == "csv") {
    std::ostringstream os;
    os << "instance,true,ais,rrr-low,rrr-is\n" << report.config.instance_path;
    for (const char* col : {"exact", "ais", "rrr-low", "rrr-is"}) {
      os << ',';
      if (auto it = table.find(col); it != table.end()) os << format_real(it->second);
    }
    os << '\n';
    return os.str();
  }
  nlohmann::json j;
  j["command"] = "logz";
  j["config"] = to_json(report.config);
  j["instance"] = report.instance;
  j["estimates"] = nlohmann::json::array();
  for (const auto& e : report.estimates) j["estimates"].push_back(to_json(e, report.config.timing));
  nlohmann::json row = nlohmann::json::object();
  for (const auto& [k, v] : table) row[k == "exact" ? "true" : k] = v;
  j["table"] = std::move(row);
  return j.dump(2) + "\n";
}

}  // namespace rrr
