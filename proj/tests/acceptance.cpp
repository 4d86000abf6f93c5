// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "rrr/rrr.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace rrr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

Assignment from_corner(const oracle::Corner& c, Domain d = Domain::PlusMinusOne) {
  return Assignment(d, std::vector<std::int8_t>(c.begin(), c.end()));
}

Matrix lrp_k2(const MrfParams& p, std::uint64_t seed) {
  LrpOptions o;
  o.k = 2;
  o.seed = seed;
  return solve_lrp(p, o).X;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// 1 -------------------------------------------------------------------------
Outcome exact_logz_oracle() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t m = 1 + seed % 5, p = 1 + (seed / 5 + seed) % 5;
    const RbmParams r = gen_random_rbm(m, p, 1000 + seed);
    worst = std::max(worst, rel_err(exact_logz_rbm(r), oracle::logz_rbm_full(r.W(), r.a(), r.b())));
    const RbmParams bits(r.W(), r.a(), r.b(), Domain::ZeroOne);
    worst = std::max(worst, rel_err(exact_logz_rbm(bits), oracle::logz_rbm_full(r.W(), r.a(), r.b(), 0)));
  }
  return {worst <= 1e-9, "max relative error " + fmt("%.2e", worst)};
}

// 2 -------------------------------------------------------------------------
Outcome reduction_identities() {
  double worst = 0.0;
  auto check = [&](long double got, long double want) {
    worst = std::max(worst, rel_err(static_cast<double>(got), static_cast<double>(want)));
  };
  auto linear = [](const Vector& b, const oracle::Corner& x) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(b[static_cast<Eigen::Index>(i)]) * x[i];
    return s;
  };
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 6;
    const Matrix raw = oracle::random_matrix(n, n, 2000 + seed);
    const Matrix A = 0.5 * (raw + raw.transpose());

    const auto [hyp, to_hyp] = bits_to_hyp(MrfParams(raw, Domain::ZeroOne));
    const MrfParams aug = fold_linear_hyp(hyp, to_hyp);
    for (const auto& y : oracle::corners(n, 0, 1)) {
      oracle::Corner x(n), ax{1};
      for (std::size_t i = 0; i < n; ++i) x[i] = 2 * y[i] - 1;
      ax.insert(ax.end(), x.begin(), x.end());
      const long double original = oracle::quad_form(A, y);
      check(oracle::quad_form(to_hyp.Aprime, x) + linear(to_hyp.b, x) + to_hyp.c, original);
      check(oracle::quad_form(aug.A(), ax) + to_hyp.c, original);
    }

    const auto [bits, to_bits] = hyp_to_bits(MrfParams(raw, Domain::PlusMinusOne));
    const MrfParams diag = fold_linear_bits(bits, to_bits);
    for (const auto& x : oracle::corners(n)) {
      oracle::Corner y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = (x[i] + 1) / 2;
      const long double original = oracle::quad_form(A, x);
      check(oracle::quad_form(to_bits.Aprime, y) + linear(to_bits.b, y) + to_bits.c, original);
      check(oracle::quad_form(diag.A(), y) + to_bits.c, original);
    }
  }
  return {worst <= 1e-12, "100 instances, max relative error " + fmt("%.2e", worst)};
}

// 3 -------------------------------------------------------------------------
Outcome rounding_distribution() {
  double worst_sum = 0.0, worst_query = 0.0;
  int chi_fail = 0, outside = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed % 9;
    const MrfParams p(oracle::random_symmetric(n, 3000 + seed), Domain::PlusMinusOne);
    const Matrix X = lrp_k2(p, seed);
    const auto dist = build_px_k2(X);
    const auto support = enumerate_support_k2(dist, X);
    double total = 0.0;
    std::map<Assignment, std::size_t> index;
    for (std::size_t s = 0; s < support.size(); ++s) {
      total += support[s].probability;
      worst_query = std::max(worst_query, std::abs(px_query(dist, X, support[s].x) - support[s].probability));
      index[support[s].x] = s;
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));

    const std::size_t T = 100000;
    const auto batch = rrr_map_sample(p, X, T, 3100 + seed);
    std::vector<double> counts(support.size(), 0.0), probs;
    for (const auto& x : batch.samples) {
      auto it = index.find(x);
      if (it == index.end()) {
        ++outside;
        continue;
      }
      counts[it->second] += 1.0;
    }
    for (const auto& s : support) probs.push_back(s.probability);
    chi_fail += !oracle::chi_square(counts, probs, static_cast<double>(T)).passes(0.99);
  }
  std::ostringstream os;
  os << "50 solutions, |sum-1| " << fmt("%.1e", worst_sum) << ", query mismatch " << fmt("%.1e", worst_query)
     << ", samples outside support " << outside << ", chi-square rejections at 99% " << chi_fail << "/50";
  return {worst_sum <= 1e-12 && worst_query <= 1e-12 && outside == 0 && chi_fail == 0, os.str()};
}

// 4 -------------------------------------------------------------------------
Outcome two_over_pi() {
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 11 + seed;
    const MrfParams p(oracle::random_psd(n, 1 + seed % 5, 4000 + seed), Domain::PlusMinusOne);
    LrpOptions o;
    o.k = 2;
    o.seed = seed;
    const auto sol = solve_lrp(p, o);
    long double expectation = 0.0L;
    for (const auto& s : enumerate_support_k2(build_px_k2(sol.X), sol.X))
      expectation += s.probability * oracle::quad_form(p.A(), {s.x.values().begin(), s.x.values().end()});
    const double bound = 2.0 / std::numbers::pi * lrp_objective(p.A(), sol.X);
    worst = std::min(worst, static_cast<double>(expectation) - bound);
  }
  return {worst >= -1e-9, "20 PSD instances n=11..30, min E[score] - (2/pi)*relaxed " + fmt("%.3g", worst)};
}

// 5 -------------------------------------------------------------------------
Outcome relaxation_dominance() {
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 8;
    const MrfParams p(oracle::random_symmetric(n, 5000 + seed), Domain::PlusMinusOne);
    LrpOptions o;
    o.k = n;
    o.restarts = 20;
    o.seed = seed;
    double brute = -std::numeric_limits<double>::infinity();
    for (const auto& c : oracle::corners(n)) brute = std::max(brute, static_cast<double>(oracle::quad_form(p.A(), c)));
    worst = std::min(worst, solve_lrp(p, o).objective - brute);
  }
  return {worst >= -1e-6, "20 instances n=3..10, min relaxed - integer optimum " + fmt("%.3g", worst)};
}

// 6 -------------------------------------------------------------------------
Outcome gibbs_stationarity() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t n = 6 + seed;
    const MrfParams p(oracle::random_symmetric(n, 6000 + seed, 0.3), Domain::PlusMinusOne);
    const auto exact = oracle::gibbs_distribution(p.A());
    Rng rng(6100 + seed);
    Assignment x = random_assignment(n, rng);
    for (int b = 0; b < 1000; ++b) resample_sweep(p, x, 1.0, rng);
    std::vector<double> hist(exact.size(), 0.0);
    const std::size_t sweeps = 1000000;
    for (std::size_t s = 0; s < sweeps; ++s) {
      resample_sweep(p, x, 1.0, rng);
      std::size_t idx = 0;
      for (std::size_t i = 0; i < n; ++i) idx = 2 * idx + (x[i] == 1);
      hist[idx] += 1.0;
    }
    double tv = 0.0;
    for (std::size_t c = 0; c < exact.size(); ++c) tv += std::abs(hist[c] / sweeps - exact[c]);
    worst = std::max(worst, 0.5 * tv);
  }
  return {worst <= 0.02, "5 instances n=6..10, 1e6 sweeps, max total variation " + fmt("%.4f", worst)};
}

// 7 -------------------------------------------------------------------------
Outcome ais_accuracy() {
  int close = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RbmParams r = gen_random_rbm(8, 6, 7000 + seed);
    const double err = std::abs(ais_logz(r, 1000, 100, 7100 + seed).log_z - exact_logz_rbm(r));
    worst = std::max(worst, err);
    close += err <= 0.2;
  }
  return {close >= 18, std::to_string(close) + "/20 within 0.2 nat, worst error " + fmt("%.3f", worst)};
}

// 8 -------------------------------------------------------------------------
Outcome hard_separation() {
  const std::size_t m = 10, p = 10, chains = 10, sweeps = 200;
  const HardRbmOptions opts{3, 50.0, 5.0};
  std::vector<double> ag_scores, rag_scores;
  int ag_miss = 0, rag_close = 0;
  std::size_t ag_cost = 0, rag_cost = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RbmParams r = gen_hard_rbm(m, p, opts, 8000 + seed);
    const MrfParams emb = rbm_to_mrf(r);
    const double map = brute_force_map(emb, 21).score;

    LrpOptions o;
    o.k = 2;
    o.seed = derive_seed(seed, 1);
    const auto sol = solve_lrp(emb, o);
    const auto schedule = AnnealSchedule::linear(10.0, sweeps);
    double rag = -std::numeric_limits<double>::infinity();
    for (const auto& c : rrr_ag_chains(emb, sol.X, schedule, chains, derive_seed(seed, 2), 0))
      rag = std::max(rag, c.best_score);
    rag_cost = sol.matvecs + chains * (1 + sweeps);

    // Same total sweep-equivalents, spread over the same number of chains.
    const auto ag_schedule = AnnealSchedule::linear(10.0, (rag_cost + chains - 1) / chains);
    ag_cost = chains * ag_schedule.size();
    const auto planted = hard_rbm_pairs(m, p, opts.pairs, 8000 + seed);
    Rng init(derive_seed(seed, 3));
    double ag = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < chains; ++c) {
      Assignment x = random_assignment(1 + m + p, init, 0);
      for (const auto& [i, j] : planted) {
        x.set(1 + i, -1);
        x.set(1 + m + j, -1);
      }
      ag = std::max(ag, annealed_gibbs(emb, ag_schedule, x, derive_seed(seed, 4 + c), 0).best_score);
    }

    ag_scores.push_back(ag);
    rag_scores.push_back(rag);
    ag_miss += ag < map - 1e-9;
    rag_close += rag >= map - 0.01 * std::abs(map);
  }
  const double med_ag = median(ag_scores), med_rag = median(rag_scores);
  std::ostringstream os;
  os << "median rrr-AG " << fmt("%.2f", med_rag) << " vs AG " << fmt("%.2f", med_ag) << ", AG misses MAP " << ag_miss
     << "/20, rrr-AG within 1% " << rag_close << "/20, cost " << rag_cost << " vs " << ag_cost << " sweeps";
  return {med_rag >= med_ag && ag_miss >= 16 && rag_close >= 10 && ag_cost >= rag_cost, os.str()};
}

// 9 -------------------------------------------------------------------------
Outcome bound_properties() {
  double worst_low = -std::numeric_limits<double>::infinity(), worst_is = worst_low;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 11;
    const MrfParams p(oracle::random_symmetric(n, 9000 + seed, seed % 2 ? 1.0 : 0.3), Domain::PlusMinusOne);
    const double exact = oracle::logz_full(p.A());
    const Matrix X = lrp_k2(p, seed);
    const auto batch = rrr_map_sample(p, X, 5000, 9100 + seed);
    worst_low = std::max(worst_low, rrr_low(p, batch).log_z - exact);
    worst_is = std::max(worst_is, rrr_is_exact_support(p, X) - exact);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RbmParams r = gen_random_rbm(5, 4, 9200 + seed);
    LogZConfig cfg;
    cfg.methods = {"exact", "rrr-low", "rrr-is"};
    cfg.seed = seed;
    cfg.samples = 5000;
    const auto rep = run_logz(Instance{r}, cfg);
    const double exact = oracle::logz_rbm_full(r.W(), r.a(), r.b());
    for (const auto& e : rep.estimates) {
      if (e.estimator == Estimator::RrrLow) worst_low = std::max(worst_low, e.log_z - exact);
      if (e.estimator == Estimator::RrrIS) worst_is = std::max(worst_is, e.extras.at("exact_support_log_z") - exact);
    }
  }
  double single = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MrfParams p(oracle::random_symmetric(1, 9300 + seed), Domain::PlusMinusOne);
    single = std::max(single, std::abs(rrr_is_exact_support(p, oracle::random_matrix(1, 2, 9400 + seed)) -
                                       oracle::logz_full(p.A())));
  }
  std::ostringstream os;
  os << "35 instances, max rrr-low - exact " << fmt("%.3g", worst_low) << ", max rrr-IS support - exact "
     << fmt("%.3g", worst_is) << ", n=1 equality error " << fmt("%.1e", single);
  return {worst_low <= 1e-9 && worst_is <= 1e-9 && single <= 1e-12, os.str()};
}

// 10 ------------------------------------------------------------------------
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "rrr_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& args, const std::string& out) {
    const std::string cmd = std::string(RRR_CLI_PATH) + " " + args + " > " + (dir / out).string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string rnd = (dir / "random.json").string(), hard = (dir / "hard.json").string();
  const std::vector<std::string> commands{
      "gen --kind random --m 12 --p 9 --seed 7",
      "gen --kind hard --m 12 --p 9 --pairs 3 --couple 50 --bias 5 --seed 7",
      "gen --kind random --m 6 --p 4 --seed 3 --domain 01",
      "map --instance " + rnd + " --seed 5 --samples 300 --sweeps 60 --chains 4 --trace-dir " + (dir / "tr").string(),
      "map --instance " + hard + " --seed 5 --methods rrr,ag,rrr-ag,brute --samples 300 --sweeps 60 --format csv",
      "logz --instance " + rnd + " --seed 9 --samples 3000 --num-temps 200 --num-runs 20",
      "logz --instance " + hard + " --seed 9 --samples 3000 --num-temps 200 --num-runs 20 --format csv"};
  if (run(commands[0], "random.json") != 0 || run(commands[1], "hard.json") != 0)
    return {false, "instance generation failed"};
  int identical = 0;
  std::string bad;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string first, second, trace_first;
    bool ok = run(commands[c], "a.out") == 0;
    first = read_text_file(dir / "a.out");
    if (fs::exists(dir / "tr")) {
      for (const auto& e : std::set<fs::path>(fs::directory_iterator(dir / "tr"), {})) trace_first += read_text_file(e);
      fs::remove_all(dir / "tr");
    }
    ok = ok && run(commands[c], "b.out") == 0;
    second = read_text_file(dir / "b.out");
    std::string trace_second;
    if (fs::exists(dir / "tr")) {
      for (const auto& e : std::set<fs::path>(fs::directory_iterator(dir / "tr"), {})) trace_second += read_text_file(e);
      fs::remove_all(dir / "tr");
    }
    if (ok && !first.empty() && first == second && trace_first == trace_second) {
      ++identical;
    } else {
      bad += " [" + commands[c] + "]";
    }
  }
  fs::remove_all(dir);
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical" + bad};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "exact log Z equals full enumeration", 10, exact_logz_oracle},
      {2, "reduction corner identities", 5, reduction_identities},
      {3, "width-2 rounding distribution is exact", 30, rounding_distribution},
      {4, "2/pi rounding guarantee on PSD instances", 10, two_over_pi},
      {5, "relaxation dominates the integer optimum", 60, relaxation_dominance},
      {6, "single-site Gibbs stationarity", 120, gibbs_stationarity},
      {7, "AIS accuracy on 8x6 RBMs", 120, ais_accuracy},
      {8, "hard-instance separation", 300, hard_separation},
      {9, "lower-bound properties", 10, bound_properties},
      {10, "seeded CLI runs are byte-identical", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0 || secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("%s  %2d  %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
