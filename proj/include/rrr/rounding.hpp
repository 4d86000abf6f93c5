#pragma once

// Randomized hyperplane rounding and the exact rounding distribution at width 2.
//
// For k = 2, row i with direction θᵢ rounds to +1 exactly when the hyperplane
// normal g = (cos γ, sin γ) has γ within π/2 of θᵢ. Each non-degenerate row
// therefore splits the circle at θᵢ ± π/2, and the sign pattern is constant on
// every arc between consecutive boundaries.

#include "rrr/model.hpp"

#include <numbers>
#include <sstream>

namespace rrr {

/// Rows with Euclidean norm below this carry no direction; they round to +1
/// and are unconstrained in probability queries.
inline constexpr double kDegenerateRowNorm = 1e-12;

struct SampleBatch {
  std::vector<Assignment> samples;
  std::vector<double> scores;
  std::uint64_t seed = 0;
};

/// Uniform direction on the unit sphere in R^k (normalized Gaussian).
inline Vector random_unit_vector(std::size_t k, Rng& rng) {
  if (k < 1) throw DimensionError("random_unit_vector requires k >= 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector g(static_cast<Eigen::Index>(k));
  double norm = 0.0;
  do {
    for (auto& v : g) v = normal(rng);
    norm = g.norm();
  } while (norm < 1e-12);
  return g / norm;
}

/// xᵢ = sign(Xᵢ·g) with sign(0) = +1; degenerate rows give +1.
inline Assignment round_once(const Matrix& X, const Vector& g) {
  if (g.size() != X.cols()) throw DimensionError("round_once: g must have length k");
  std::vector<std::int8_t> x(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    x[static_cast<std::size_t>(i)] = row.norm() < kDegenerateRowNorm ? std::int8_t{1} : sign_of(row.dot(g));
  }
  return Assignment(Domain::PlusMinusOne, std::move(x));
}

/// T independent roundings of X, scored under params; deterministic in seed.
inline SampleBatch rrr_map_sample(const MrfParams& params, const Matrix& X, std::size_t T, std::uint64_t seed) {
  if (T < 1) throw OptionsError("rrr_map_sample requires T >= 1");
  if (static_cast<std::size_t>(X.rows()) != params.n()) throw DimensionError("X must have n rows");
  if (params.domain() != Domain::PlusMinusOne) throw DomainError("rrr_map_sample requires a pm1 instance");
  Rng rng(seed);
  SampleBatch batch;
  batch.seed = seed;
  batch.samples.reserve(T);
  batch.scores.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto x = round_once(X, random_unit_vector(static_cast<std::size_t>(X.cols()), rng));
    batch.scores.push_back(score(params, x));
    batch.samples.push_back(std::move(x));
  }
  return batch;
}

/// Monte-Carlo estimate of the rounding probability of x, for any width.
inline double px_monte_carlo(const Matrix& X, const Assignment& x, std::size_t draws, std::uint64_t seed) {
  if (x.size() != static_cast<std::size_t>(X.rows())) throw DimensionError("assignment length must equal rows of X");
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < draws; ++t) {
    if (round_once(X, random_unit_vector(static_cast<std::size_t>(X.cols()), rng)) == x) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

inline std::string samples_csv(const SampleBatch& batch) {
  std::ostringstream os;
  os << "sample,score\n";
  for (std::size_t t = 0; t < batch.scores.size(); ++t) os << t << ',' << format_real(batch.scores[t]) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Exact distribution at width 2

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  return a;
}

struct RoundingDistributionK2 {
  std::size_t n = 0;
  /// Distinct boundary angles in [0, 2π), strictly ascending.
  std::vector<double> angles;
  /// Rows whose sign changes at angles[b]; size is the boundary's multiplicity.
  std::vector<std::vector<std::size_t>> boundary_rows;
  /// Non-degenerate rows sorted by line angle αᵢ = θᵢ mod π.
  std::vector<std::size_t> row_order;
  /// Per row: αᵢ in [0, π) and whether θᵢ = αᵢ + π.
  std::vector<double> line_angle;
  std::vector<bool> reversed;
  std::vector<std::size_t> degenerate_rows;
  std::vector<bool> degenerate;
};

/// Sorts row directions and the 2n boundary angles; O(n log n).
inline RoundingDistributionK2 build_px_k2(const Matrix& X) {
  if (X.cols() != 2) throw DimensionError("build_px_k2 requires width k = 2");
  constexpr double pi = std::numbers::pi;
  RoundingDistributionK2 dist;
  dist.n = static_cast<std::size_t>(X.rows());
  dist.line_angle.assign(dist.n, 0.0);
  dist.reversed.assign(dist.n, false);
  dist.degenerate.assign(dist.n, false);

  std::vector<std::pair<double, std::size_t>> bounds;
  for (std::size_t i = 0; i < dist.n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (X.row(r).norm() < kDegenerateRowNorm) {
      dist.degenerate[i] = true;
      dist.degenerate_rows.push_back(i);
      continue;
    }
    const double theta = wrap_angle(std::atan2(X(r, 1), X(r, 0)));
    double alpha = theta;
    if (alpha >= pi) {
      alpha -= pi;
      dist.reversed[i] = true;
    }
    dist.line_angle[i] = alpha;
    dist.row_order.push_back(i);
    bounds.emplace_back(wrap_angle(theta + 0.5 * pi), i);
    bounds.emplace_back(wrap_angle(theta - 0.5 * pi), i);
  }
  std::sort(dist.row_order.begin(), dist.row_order.end(), [&](std::size_t a, std::size_t b) {
    return dist.line_angle[a] < dist.line_angle[b] || (dist.line_angle[a] == dist.line_angle[b] && a < b);
  });
  std::sort(bounds.begin(), bounds.end());
  for (const auto& [angle, row] : bounds) {
    if (dist.angles.empty() || angle != dist.angles.back()) {
      dist.angles.push_back(angle);
      dist.boundary_rows.emplace_back();
    }
    dist.boundary_rows.back().push_back(row);
  }
  return dist;
}

/// Probability that rounding produces x. The signed rows xᵢXᵢ must all fit in
/// a half-plane; the admissible normals then form an arc of length
/// (largest circular gap between signed directions) - π. Walking rows in
/// line-angle order, unflipped directions land in [0, π) and flipped ones in
/// [π, 2π), so both halves come out already sorted and the query is O(n).
inline double px_query(const RoundingDistributionK2& dist, const Matrix& X, const Assignment& x) {
  if (static_cast<std::size_t>(X.rows()) != dist.n || x.size() != dist.n)
    throw DimensionError("px_query: dimensions do not match the distribution");
  if (x.domain() != Domain::PlusMinusOne) throw DomainError("px_query requires a pm1 assignment");
  constexpr double pi = std::numbers::pi;
  if (dist.row_order.empty()) return 1.0;

  bool have = false;
  double first = 0.0, prev = 0.0, max_gap = 0.0;
  auto visit = [&](double dir) {
    if (!have) {
      first = prev = dir;
      have = true;
      return;
    }
    max_gap = std::max(max_gap, dir - prev);
    prev = dir;
  };
  for (int half = 0; half < 2; ++half) {
    for (std::size_t i : dist.row_order) {
      // Signed direction is αᵢ when xᵢ agrees with the orientation of row i.
      const bool upper = (x[i] == 1) == dist.reversed[i];
      if (upper == (half == 1)) visit(dist.line_angle[i] + (upper ? pi : 0.0));
    }
  }
  max_gap = std::max(max_gap, first + 2.0 * pi - prev);
  return std::max(0.0, max_gap - pi) / (2.0 * pi);
}

struct SupportPoint {
  Assignment x;
  double probability = 0.0;
};

/// Every realizable sign pattern with its arc probability, by sweeping γ
/// across the sorted boundaries and flipping the rows attached to each one.
/// Degenerate rows are reported as +1.
inline std::vector<SupportPoint> enumerate_support_k2(const RoundingDistributionK2& dist, const Matrix& X) {
  if (X.cols() != 2 || static_cast<std::size_t>(X.rows()) != dist.n)
    throw DimensionError("enumerate_support_k2: X does not match the distribution");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t arcs = dist.angles.size();
  if (arcs == 0) return {{Assignment::filled(Domain::PlusMinusOne, dist.n, 1), 1.0}};

  // Arc b runs from angles[b] to angles[b + 1] (wrapping).
  auto arc_length = [&](std::size_t b) {
    return b + 1 < arcs ? dist.angles[b + 1] - dist.angles[b] : dist.angles[0] + two_pi - dist.angles[b];
  };
  std::size_t start = 0;
  for (std::size_t b = 1; b < arcs; ++b)
    if (arc_length(b) > arc_length(start)) start = b;

  // Evaluate the pattern once, at the middle of the longest arc.
  const double mid = dist.angles[start] + 0.5 * arc_length(start);
  Vector g(2);
  g << std::cos(mid), std::sin(mid);
  Assignment x = round_once(X, g);

  std::vector<SupportPoint> out;
  out.reserve(arcs);
  for (std::size_t step = 0; step < arcs; ++step) {
    const std::size_t b = (start + step) % arcs;
    const double len = arc_length(b);
    if (len > 0.0) out.push_back({x, len / two_pi});
    for (std::size_t row : dist.boundary_rows[(b + 1) % arcs]) x.flip(row);
  }
  return out;
}

}  // namespace rrr
