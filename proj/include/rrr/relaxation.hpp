#pragma once

// Low-rank relaxation LRP(k): maximize tr(X'AX) over n x k matrices whose
// rows lie in the unit ball, by projected gradient ascent. k = 1 is the box
// QP and k = n is the factored SDP.

#include "rrr/model.hpp"

#include <sstream>

namespace rrr {

enum class StepRule { FixedInverseLipschitz, Backtracking };

struct LrpOptions {
  std::size_t k = 2;
  std::size_t max_iters = 10000;
  /// Stop once |f_t - f_{t-window}| <= rel_tol * max(1, |f_t|).
  double rel_tol = 1e-8;
  std::size_t window = 5;
  StepRule step_rule = StepRule::FixedInverseLipschitz;
  std::size_t restarts = 8;
  std::uint64_t seed = 0;
};

struct RelaxedSolution {
  Matrix X;
  double objective = 0.0;
  std::size_t iterations = 0;
  /// Objective after each iteration of the winning restart; entry 0 is the initialization.
  std::vector<double> trace;
  std::size_t restart = 0;
  /// Matrix-vector products spent over all restarts.
  std::size_t matvecs = 0;
};

inline double lrp_objective(const Matrix& A, const Matrix& X) {
  if (A.rows() != A.cols() || A.cols() != X.rows()) throw DimensionError("lrp_objective: A must be n x n and X n x k");
  return X.cwiseProduct(A * X).sum();
}

/// Row-wise Euclidean projection onto the unit ball.
inline Matrix project_rows(Matrix X) {
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double norm = X.row(i).norm();
    if (norm > 1.0) X.row(i) /= norm;
  }
  return X;
}

/// Upper estimate of the gradient's Lipschitz constant 2‖A‖₂: power iteration
/// (50 iterations, tolerance 1e-6) from a fixed pseudo-random start, inflated by 1%.
inline double estimate_lipschitz(const Matrix& A) {
  if (A.rows() != A.cols()) throw DimensionError("estimate_lipschitz: A must be square");
  Rng rng(0x5eedULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(A.rows());
  for (auto& x : v) x = normal(rng);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    Vector w = A * v;
    const double next = w.norm();
    if (next == 0.0) {
      lambda = 0.0;
      break;
    }
    v = w / next;
    const bool done = std::abs(next - lambda) <= 1e-6 * next;
    lambda = next;
    if (done) break;
  }
  return 2.0 * lambda * 1.01;
}

namespace detail {

inline Matrix uniform_ball_rows(std::size_t n, std::size_t k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = normal(rng);
      norm = X.row(i).norm();
    } while (norm < 1e-12);
    const double radius = std::pow(unif(rng), 1.0 / static_cast<double>(k));
    X.row(i) *= radius / norm;
  }
  return X;
}

struct LrpRun {
  Matrix best_X;
  double best_objective;
  std::size_t iterations = 0;
  std::vector<double> trace;
  std::size_t matvecs = 0;
};

inline bool converged(const std::vector<double>& trace, const LrpOptions& opts) {
  const std::size_t t = trace.size() - 1;
  if (t < opts.window) return false;
  const double now = trace[t];
  return std::abs(now - trace[t - opts.window]) <= opts.rel_tol * std::max(1.0, std::abs(now));
}

inline LrpRun run_lrp(const Matrix& A, Matrix X, double lipschitz, const LrpOptions& opts) {
  const double k = static_cast<double>(X.cols());
  const double base_step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  Matrix AX = A * X;
  double f = X.cwiseProduct(AX).sum();
  LrpRun run{X, f, 0, {f}, static_cast<std::size_t>(k)};
  double step = base_step;

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const Matrix grad = 2.0 * AX;
    if (opts.step_rule == StepRule::FixedInverseLipschitz) {
      X = project_rows(X + base_step * grad);
      AX = A * X;
      f = X.cwiseProduct(AX).sum();
      run.matvecs += static_cast<std::size_t>(k);
    } else {
      // Armijo on the ascent objective, halving up to 30 times; a rejected
      // step leaves X in place so the trace never decreases.
      double trial = std::min(2.0 * step, 1e3 * base_step);
      bool accepted = false;
      for (int halving = 0; halving <= 30; ++halving, trial *= 0.5) {
        Matrix cand = project_rows(X + trial * grad);
        Matrix cand_AX = A * cand;
        const double cand_f = cand.cwiseProduct(cand_AX).sum();
        run.matvecs += static_cast<std::size_t>(k);
        if (cand_f >= f + 1e-4 * grad.cwiseProduct(cand - X).sum()) {
          X = std::move(cand);
          AX = std::move(cand_AX);
          f = cand_f;
          step = trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) step = base_step;
    }
    run.trace.push_back(f);
    run.iterations = it;
    if (f > run.best_objective) {
      run.best_objective = f;
      run.best_X = X;
    }
    if (converged(run.trace, opts)) break;
  }
  return run;
}

}  // namespace detail

inline void validate(const LrpOptions& opts, std::size_t n) {
  if (opts.k < 1 || opts.k > n) throw OptionsError("width k must satisfy 1 <= k <= n");
  if (!(opts.rel_tol > 0.0)) throw OptionsError("rel_tol must be positive");
  if (opts.restarts < 1) throw OptionsError("restarts must be at least 1");
  if (opts.max_iters < 1) throw OptionsError("max_iters must be at least 1");
  if (opts.window < 1) throw OptionsError("window must be at least 1");
}

/// Best of `opts.restarts` projected-gradient runs. Restart r draws its
/// initialization from derive_seed(opts.seed, r), rows uniform in the unit ball.
inline RelaxedSolution solve_lrp(const MrfParams& params, const LrpOptions& opts) {
  if (params.domain() != Domain::PlusMinusOne) throw DomainError("solve_lrp requires a pm1 instance");
  validate(opts, params.n());
  const Matrix& A = params.A();
  const double lipschitz = estimate_lipschitz(A);

  RelaxedSolution best;
  bool have = false;
  std::size_t matvecs = 0;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    Rng rng(derive_seed(opts.seed, r));
    auto run = detail::run_lrp(A, detail::uniform_ball_rows(params.n(), opts.k, rng), lipschitz, opts);
    matvecs += run.matvecs;
    if (!have || run.best_objective > best.objective) {
      best.X = std::move(run.best_X);
      best.objective = run.best_objective;
      best.iterations = run.iterations;
      best.trace = std::move(run.trace);
      best.restart = r;
      have = true;
    }
  }
  best.objective = lrp_objective(A, best.X);
  best.matvecs = matvecs;
  return best;
}

inline std::string trace_csv(const RelaxedSolution& sol) {
  std::ostringstream os;
  os << "iteration,objective\n";
  for (std::size_t i = 0; i < sol.trace.size(); ++i) os << i << ',' << format_real(sol.trace[i]) << '\n';
  return os.str();
}

}  // namespace rrr
