// rrr: instance generation, MAP benchmarks and log-partition benchmarks.
//
//   rrr gen  --kind random|hard --m M --p P [--pairs --couple --bias] [--seed S] [--out FILE]
//   rrr map  --instance FILE --seed S [--methods rrr,ag,rrr-ag,brute] [budgets] [--out FILE]
//   rrr logz --instance FILE --seed S [--methods exact,ais,rrr-low,rrr-is] [budgets] [--out FILE]
//
// Exit codes: 0 success, 1 usage error, 2 input-format error, 3 cap violation.

#include "rrr/rrr.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kFormat = 2, kCap = 3 };

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    rrr::write_file_atomic(out_path, content);
  }
}

rrr::Instance load(const std::string& path) {
  std::string text;
  try {
    text = rrr::read_text_file(path);
  } catch (const std::exception& e) {
    throw rrr::FormatError(e.what());
  }
  return rrr::parse_instance(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized relax-and-round inference for binary MRFs and RBMs"};
  app.require_subcommand(1);

  // gen
  std::string kind, domain = "pm1", gen_out;
  std::size_t m = 0, p = 0;
  std::uint64_t gen_seed = 0;
  rrr::HardRbmOptions hard;
  auto* gen = app.add_subcommand("gen", "Generate a random or hard RBM instance");
  gen->add_option("--kind", kind, "Instance family")->required()->check(CLI::IsMember({"random", "hard"}));
  gen->add_option("--m", m, "Visible units")->required()->check(CLI::PositiveNumber);
  gen->add_option("--p", p, "Hidden units")->required()->check(CLI::PositiveNumber);
  gen->add_option("--pairs", hard.pairs, "Planted pairs (hard)")->capture_default_str();
  gen->add_option("--couple", hard.couple, "Planted coupling (hard)")->capture_default_str();
  gen->add_option("--bias", hard.bias, "Planted bias (hard)")->capture_default_str();
  gen->add_option("--domain", domain, "Domain tag written to the file")->check(CLI::IsMember({"pm1", "01"}))->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (default: stdout)");

  // map
  rrr::MapConfig map_cfg;
  std::string map_methods = "rrr,ag,rrr-ag", map_out, trace_dir;
  auto* map = app.add_subcommand("map", "Compare MAP methods on an instance");
  map->add_option("--instance", map_cfg.instance_path, "Instance file")->required();
  map->add_option("--seed", map_cfg.seed, "Seed")->required();
  map->add_option("--methods", map_methods, "Comma-separated subset of rrr,ag,rrr-ag,brute")->capture_default_str();
  map->add_option("--k", map_cfg.k, "Relaxation width")->capture_default_str();
  map->add_option("--restarts", map_cfg.restarts, "Relaxation restarts")->capture_default_str();
  map->add_option("--max-iters", map_cfg.max_iters, "Relaxation iteration cap")->capture_default_str();
  map->add_option("--samples", map_cfg.samples, "Rounded samples for rrr")->capture_default_str();
  map->add_option("--sweeps", map_cfg.sweeps, "Annealing sweeps per chain")->capture_default_str();
  map->add_option("--chains", map_cfg.chains, "Annealed chains")->capture_default_str();
  map->add_option("--t-high", map_cfg.t_high, "Initial annealing temperature")->capture_default_str();
  map->add_option("--brute-cap", map_cfg.brute_cap, "Largest n for brute force")->capture_default_str();
  map->add_option("--format", map_cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  map->add_option("--out", map_out, "Report file (default: stdout)");
  map->add_option("--trace-dir", trace_dir, "Directory for CSV traces and per-sample scores");
  map->add_flag("--timing", map_cfg.timing, "Include wall-clock seconds in the report");

  // logz
  rrr::LogZConfig logz_cfg;
  std::string logz_methods = "exact,ais,rrr-low,rrr-is", logz_out;
  auto* logz = app.add_subcommand("logz", "Compare log-partition estimators on an instance");
  logz->add_option("--instance", logz_cfg.instance_path, "Instance file")->required();
  logz->add_option("--seed", logz_cfg.seed, "Seed")->required();
  logz->add_option("--methods", logz_methods, "Comma-separated subset of exact,ais,rrr-low,rrr-is")->capture_default_str();
  logz->add_option("--k", logz_cfg.k, "Relaxation width")->capture_default_str();
  logz->add_option("--restarts", logz_cfg.restarts, "Relaxation restarts")->capture_default_str();
  logz->add_option("--max-iters", logz_cfg.max_iters, "Relaxation iteration cap")->capture_default_str();
  logz->add_option("--samples", logz_cfg.samples, "Rounded samples for rrr-low and rrr-is")->capture_default_str();
  logz->add_option("--num-temps", logz_cfg.num_temps, "AIS temperatures")->capture_default_str();
  logz->add_option("--num-runs", logz_cfg.num_runs, "AIS runs")->capture_default_str();
  logz->add_option("--exact-cap", logz_cfg.exact_cap, "Largest enumerated layer for exact")->capture_default_str();
  logz->add_option("--format", logz_cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  logz->add_option("--out", logz_out, "Report file (default: stdout)");
  logz->add_flag("--timing", logz_cfg.timing, "Include wall-clock seconds in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) out.push_back(item);
    return out;
  };

  try {
    if (*gen) {
      rrr::RbmParams params = kind == "random" ? rrr::gen_random_rbm(m, p, gen_seed) : rrr::gen_hard_rbm(m, p, hard, gen_seed);
      if (domain == "01") params = rrr::RbmParams(params.W(), params.a(), params.b(), rrr::Domain::ZeroOne);
      emit(gen_out, rrr::serialize_instance(params));
    } else if (*map) {
      map_cfg.methods = split(map_methods);
      const auto report = rrr::run_map(load(map_cfg.instance_path), map_cfg);
      emit(map_out, rrr::render(report));
      if (!trace_dir.empty()) {
        std::filesystem::create_directories(trace_dir);
        for (const auto& [name, csv] : report.traces) rrr::write_file_atomic(std::filesystem::path(trace_dir) / name, csv);
      }
    } else if (*logz) {
      logz_cfg.methods = split(logz_methods);
      emit(logz_out, rrr::render(rrr::run_logz(load(logz_cfg.instance_path), logz_cfg)));
    }
  } catch (const rrr::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const rrr::CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
