#pragma once

// Model parameters for binary pairwise MRFs and RBMs, score evaluation,
// domain reductions, brute-force oracles and instance generators.

#include "rrr/core.hpp"

#include <numeric>
#include <optional>
#include <utility>

namespace rrr {

/// Binary pairwise MRF with score x'Ax. The stored matrix is always symmetric.
class MrfParams {
 public:
  MrfParams(Matrix A, Domain domain) : A_(std::move(A)), domain_(domain) {
    if (A_.rows() != A_.cols()) throw DimensionError("coupling matrix must be square");
    if (A_.rows() < 1) throw DimensionError("coupling matrix must be non-empty");
    if (!A_.allFinite()) throw std::invalid_argument("coupling matrix has non-finite entries");
    Matrix sym = 0.5 * (A_ + A_.transpose());
    A_ = std::move(sym);
  }

  std::size_t n() const noexcept { return static_cast<std::size_t>(A_.rows()); }
  const Matrix& A() const noexcept { return A_; }
  Domain domain() const noexcept { return domain_; }

 private:
  Matrix A_;
  Domain domain_;
};

/// RBM with score v'Wh + a'v + b'h; W is m x p.
class RbmParams {
 public:
  RbmParams(Matrix W, Vector a, Vector b, Domain domain)
      : W_(std::move(W)), a_(std::move(a)), b_(std::move(b)), domain_(domain) {
    if (W_.rows() < 1 || W_.cols() < 1) throw DimensionError("weight matrix must be non-empty");
    if (a_.size() != W_.rows()) throw DimensionError("visible bias length must equal W rows");
    if (b_.size() != W_.cols()) throw DimensionError("hidden bias length must equal W cols");
    if (!W_.allFinite() || !a_.allFinite() || !b_.allFinite())
      throw std::invalid_argument("RBM parameters have non-finite entries");
  }

  std::size_t m() const noexcept { return static_cast<std::size_t>(W_.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(W_.cols()); }
  const Matrix& W() const noexcept { return W_; }
  const Vector& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  Domain domain() const noexcept { return domain_; }

 private:
  Matrix W_;
  Vector a_;
  Vector b_;
  Domain domain_;
};

/// Cross terms produced by a change of hypercube domain:
/// old score = x'·Aprime·x + b'x + c in the new variables.
struct LinearReduction {
  Matrix Aprime;
  Vector b;
  double c = 0.0;
};

// ---------------------------------------------------------------------------
// Scores

namespace detail {
inline void check_assignment(const MrfParams& params, const Assignment& x) {
  if (x.size() != params.n()) throw DimensionError("assignment length does not match n");
  if (x.domain() != params.domain()) throw DomainError("assignment domain does not match parameters");
}
}  // namespace detail

/// x'Ax as the full double sum in row-major order.
inline double score(const MrfParams& params, const Assignment& x) {
  detail::check_assignment(params, x);
  const Matrix& A = params.A();
  const std::size_t n = params.n();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    for (std::size_t j = 0; j < n; ++j) total += A(i, j) * (xi * x[j]);
  }
  return total;
}

inline double rbm_score(const RbmParams& params, const Assignment& v, const Assignment& h) {
  if (v.size() != params.m() || h.size() != params.p()) throw DimensionError("RBM assignment has wrong length");
  if (v.domain() != params.domain() || h.domain() != params.domain())
    throw DomainError("RBM assignment domain does not match parameters");
  const Matrix& W = params.W();
  double total = 0.0;
  for (std::size_t i = 0; i < params.m(); ++i) {
    if (v[i] == 0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < params.p(); ++j) row += W(i, j) * h[j];
    total += v[i] * row;
  }
  for (std::size_t i = 0; i < params.m(); ++i) total += params.a()[i] * v[i];
  for (std::size_t j = 0; j < params.p(); ++j) total += params.b()[j] * h[j];
  return total;
}

// ---------------------------------------------------------------------------
// Reductions

/// Embeds a ±1 RBM as an MRF over (aux, v, h) with the auxiliary variable first.
inline MrfParams rbm_to_mrf(const RbmParams& params) {
  if (params.domain() != Domain::PlusMinusOne) throw DomainError("rbm_to_mrf requires a pm1 RBM");
  const std::size_t m = params.m(), p = params.p(), n = 1 + m + p;
  Matrix A = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    A(0, 1 + i) = A(1 + i, 0) = 0.5 * params.a()[i];
  }
  for (std::size_t j = 0; j < p; ++j) {
    A(0, 1 + m + j) = A(1 + m + j, 0) = 0.5 * params.b()[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      A(1 + i, 1 + m + j) = A(1 + m + j, 1 + i) = 0.5 * params.W()(i, j);
    }
  }
  return MrfParams(std::move(A), Domain::PlusMinusOne);
}

/// {0,1} -> {±1}: x = (x̃ + 1)/2 gives Aprime = A/4, b = (A'1 + A1)/4, c = 1'A1/4.
inline std::pair<MrfParams, LinearReduction> bits_to_hyp(const MrfParams& params) {
  if (params.domain() != Domain::ZeroOne) throw DomainError("bits_to_hyp requires a 01 instance");
  const Matrix& A = params.A();
  const Vector ones = Vector::Ones(A.rows());
  LinearReduction red;
  red.Aprime = 0.25 * A;
  red.b = 0.25 * (A.transpose() * ones + A * ones);
  red.c = 0.25 * ones.dot(A * ones);
  return {MrfParams(red.Aprime, Domain::PlusMinusOne), std::move(red)};
}

/// {±1} -> {0,1}: x̃ = 2x - 1 gives Aprime = 4A, b = -2(A'1 + A1), c = 1'A1.
inline std::pair<MrfParams, LinearReduction> hyp_to_bits(const MrfParams& params) {
  if (params.domain() != Domain::PlusMinusOne) throw DomainError("hyp_to_bits requires a pm1 instance");
  const Matrix& A = params.A();
  const Vector ones = Vector::Ones(A.rows());
  LinearReduction red;
  red.Aprime = 4.0 * A;
  red.b = -2.0 * (A.transpose() * ones + A * ones);
  red.c = ones.dot(A * ones);
  return {MrfParams(red.Aprime, Domain::ZeroOne), std::move(red)};
}

/// Folds b into a ±1 instance through a leading auxiliary variable:
/// (1, x)'A_aug(1, x) = x'Ax + b'x.
inline MrfParams fold_linear_hyp(const MrfParams& params, const LinearReduction& red) {
  if (params.domain() != Domain::PlusMinusOne) throw DomainError("fold_linear_hyp requires a pm1 instance");
  const auto n = static_cast<Eigen::Index>(params.n());
  if (red.b.size() != n) throw DimensionError("linear term length does not match n");
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.block(1, 1, n, n) = params.A();
  aug.block(0, 1, 1, n) = 0.5 * red.b.transpose();
  aug.block(1, 0, n, 1) = 0.5 * red.b;
  return MrfParams(std::move(aug), Domain::PlusMinusOne);
}

/// Folds b onto the diagonal of a {0,1} instance, using x_i^2 = x_i.
inline MrfParams fold_linear_bits(const MrfParams& params, const LinearReduction& red) {
  if (params.domain() != Domain::ZeroOne) throw DomainError("fold_linear_bits requires a 01 instance");
  if (red.b.size() != static_cast<Eigen::Index>(params.n())) throw DimensionError("linear term length does not match n");
  Matrix A = params.A();
  A.diagonal() += red.b;
  return MrfParams(std::move(A), Domain::ZeroOne);
}

/// Rewrites a {0,1} RBM over ±1 units. Returns the ±1 RBM and the constant c
/// with old score(v, h) = new score(2v-1, 2h-1) + c.
inline std::pair<RbmParams, double> rbm_bits_to_hyp(const RbmParams& params) {
  if (params.domain() != Domain::ZeroOne) throw DomainError("rbm_bits_to_hyp requires a 01 RBM");
  const Matrix& W = params.W();
  Vector a = 0.5 * params.a() + 0.25 * W.rowwise().sum();
  Vector b = 0.5 * params.b() + 0.25 * W.colwise().sum().transpose();
  const double c = 0.25 * W.sum() + 0.5 * (params.a().sum() + params.b().sum());
  return {RbmParams(0.25 * W, std::move(a), std::move(b), Domain::PlusMinusOne), c};
}

/// Flips the whole vector so that coordinate `aux` is +1. Lossless for a
/// pure quadratic form over ±1.
inline Assignment canonicalize_aux(const Assignment& x, std::size_t aux = 0) {
  if (aux >= x.size()) throw DimensionError("auxiliary index out of range");
  return x[aux] == 1 ? x : x.negated();
}

/// Splits a canonicalized (aux, v, h) assignment of rbm_to_mrf into (v, h).
inline std::pair<Assignment, Assignment> split_rbm_assignment(const Assignment& x, std::size_t m, std::size_t p) {
  if (x.size() != 1 + m + p) throw DimensionError("embedded assignment has wrong length");
  const Assignment c = canonicalize_aux(x, 0);
  auto vals = c.values();
  return {Assignment(Domain::PlusMinusOne, {vals.begin() + 1, vals.begin() + 1 + static_cast<std::ptrdiff_t>(m)}),
          Assignment(Domain::PlusMinusOne, {vals.begin() + 1 + static_cast<std::ptrdiff_t>(m), vals.end()})};
}

inline Assignment join_rbm_assignment(const Assignment& v, const Assignment& h) {
  std::vector<std::int8_t> vals;
  vals.reserve(1 + v.size() + h.size());
  vals.push_back(1);
  vals.insert(vals.end(), v.values().begin(), v.values().end());
  vals.insert(vals.end(), h.values().begin(), h.values().end());
  return Assignment(Domain::PlusMinusOne, std::move(vals));
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

inline constexpr std::size_t kDefaultEnumerationCap = 24;

/// Visits every ±1 corner in lexicographic order (-1 < +1, coordinate 0 most
/// significant), maintaining the score incrementally. Each step flips the
/// trailing run of coordinates, so the amortized cost is O(n) per corner.
/// Scores are resynchronized with an exact evaluation periodically.
class CornerEnumerator {
 public:
  explicit CornerEnumerator(const MrfParams& params)
      : params_(params), x_(Assignment::filled(Domain::PlusMinusOne, params.n(), -1)) {
    if (params.domain() != Domain::PlusMinusOne) throw DomainError("corner enumeration requires a pm1 instance");
    resync();
  }

  const Assignment& current() const noexcept { return x_; }
  double current_score() const noexcept { return score_; }

  /// Advances to the next corner; returns false after the last one.
  bool next() {
    const std::size_t n = params_.n();
    std::size_t i = n;
    while (i > 0 && x_[i - 1] == 1) {
      flip(i - 1);
      --i;
    }
    if (i == 0) return false;
    flip(i - 1);
    if ((++steps_ & 0xFFF) == 0) resync();
    return true;
  }

 private:
  void flip(std::size_t i) {
    const Matrix& A = params_.A();
    const double xi = x_[i];
    score_ -= 4.0 * xi * (field_[i] - A(i, i) * xi);
    for (std::size_t j = 0; j < params_.n(); ++j) field_[j] -= 2.0 * xi * A(j, i);
    x_.flip(i);
  }

  void resync() {
    const std::size_t n = params_.n();
    field_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) field_[i] += params_.A()(i, j) * x_[j];
    score_ = score(params_, x_);
  }

  const MrfParams& params_;
  Assignment x_;
  std::vector<double> field_;
  double score_ = 0.0;
  std::uint64_t steps_ = 0;
};

struct MapResult {
  Assignment x;
  double score = 0.0;
};

inline void check_enumeration_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw CapExceeded("n = " + std::to_string(n) + " exceeds the enumeration cap of " + std::to_string(cap));
}

/// Exact maximizer of x'Ax over all corners. Ties go to the lexicographically
/// smallest assignment with -1 ordered before +1. A {0,1} instance is
/// enumerated in its own domain (0 before 1).
inline MapResult brute_force_map(const MrfParams& params, std::size_t cap = kDefaultEnumerationCap) {
  check_enumeration_cap(params.n(), cap);
  if (params.domain() == Domain::ZeroOne) {
    auto [hyp, red] = bits_to_hyp(params);
    const MrfParams folded = fold_linear_hyp(hyp, red);
    check_enumeration_cap(folded.n(), cap + 1);
    // Lexicographic order over the trailing coordinates of the folded
    // problem matches 0 < 1 once the auxiliary coordinate is fixed at +1.
    CornerEnumerator it(folded);
    while (it.current()[0] != 1) it.next();
    std::optional<MapResult> best;
    const double tol = 1e-9 * (1.0 + params.A().cwiseAbs().sum());
    do {
      if (!best || it.current_score() >= best->score - tol) {
        std::vector<std::int8_t> bits(params.n());
        for (std::size_t i = 0; i < params.n(); ++i) bits[i] = it.current()[i + 1] == 1 ? 1 : 0;
        Assignment x(Domain::ZeroOne, std::move(bits));
        const double s = score(params, x);
        if (!best || s > best->score) best = MapResult{std::move(x), s};
      }
    } while (it.next());
    return *best;
  }

  CornerEnumerator it(params);
  std::optional<MapResult> best;
  const double tol = 1e-9 * (1.0 + params.A().cwiseAbs().sum());
  do {
    if (!best || it.current_score() >= best->score - tol) {
      const double s = score(params, it.current());
      if (!best || s > best->score) best = MapResult{it.current(), s};
    }
  } while (it.next());
  return *best;
}

// ---------------------------------------------------------------------------
// Instance generators

/// Standard-Gaussian W (row-major), then a, then b.
inline RbmParams gen_random_rbm(std::size_t m, std::size_t p, std::uint64_t seed) {
  if (m < 1 || p < 1) throw DimensionError("RBM dimensions must be positive");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix W(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = normal(rng);
  Vector a(static_cast<Eigen::Index>(m)), b(static_cast<Eigen::Index>(p));
  for (auto& v : a) v = normal(rng);
  for (auto& v : b) v = normal(rng);
  return RbmParams(std::move(W), std::move(a), std::move(b), Domain::PlusMinusOne);
}

struct HardRbmOptions {
  std::size_t pairs = 3;
  double couple = 5000.0;
  double bias = 500.0;
};

struct PlantedPair {
  std::size_t visible;
  std::size_t hidden;
};

/// Planted (visible, hidden) pairs of a hard instance, in planting order.
inline std::vector<PlantedPair> hard_rbm_pairs(std::size_t m, std::size_t p, std::size_t pairs, std::uint64_t seed) {
  if (pairs > std::min(m, p)) throw OptionsError("more planted pairs than min(m, p)");
  Rng rng(derive_seed(seed, 1));
  std::vector<std::size_t> vis(m), hid(p);
  std::iota(vis.begin(), vis.end(), 0);
  std::iota(hid.begin(), hid.end(), 0);
  std::shuffle(vis.begin(), vis.end(), rng);
  std::shuffle(hid.begin(), hid.end(), rng);
  std::vector<PlantedPair> out;
  for (std::size_t k = 0; k < pairs; ++k) out.push_back({vis[k], hid[k]});
  return out;
}

/// Random RBM with `pairs` disjoint planted pairs: W[i][j] = couple and
/// a[i] = b[j] = bias. A pair initialized at (-1, -1) traps Gibbs samplers.
inline RbmParams gen_hard_rbm(std::size_t m, std::size_t p, const HardRbmOptions& opts, std::uint64_t seed) {
  const RbmParams base = gen_random_rbm(m, p, seed);
  const auto planted = hard_rbm_pairs(m, p, opts.pairs, seed);
  Matrix W = base.W();
  Vector a = base.a(), b = base.b();
  for (const auto& [i, j] : planted) {
    W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = opts.couple;
    a[static_cast<Eigen::Index>(i)] = opts.bias;
    b[static_cast<Eigen::Index>(j)] = opts.bias;
  }
  return RbmParams(std::move(W), std::move(a), std::move(b), Domain::PlusMinusOne);
}

}  // namespace rrr
