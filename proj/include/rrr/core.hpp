#pragma once

// Shared vocabulary for the rrr library: dense matrices, binary domains,
// assignments, error types, seeded generators and log-domain arithmetic.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rrr {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class Domain { PlusMinusOne, ZeroOne };

inline std::string_view domain_tag(Domain d) { return d == Domain::PlusMinusOne ? "pm1" : "01"; }

// ---------------------------------------------------------------------------
// Errors. The CLI maps each family onto a distinct exit code.

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OptionsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
/// Enumeration-based routines refuse instances above their size cap.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------

/// A point of the hypercube, tagged with the domain its entries live in.
/// Entries are stored as int8 and are always exactly one of the two domain values.
class Assignment {
 public:
  Assignment() = default;
  Assignment(Domain domain, std::vector<std::int8_t> values) : domain_(domain), values_(std::move(values)) {
    for (auto v : values_) {
      if (!is_valid(v)) throw DomainError("assignment entry outside its domain");
    }
  }

  static Assignment filled(Domain domain, std::size_t n, std::int8_t value) {
    return Assignment(domain, std::vector<std::int8_t>(n, value));
  }

  Domain domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::int8_t operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::int8_t> values() const noexcept { return values_; }

  void set(std::size_t i, std::int8_t v) {
    if (!is_valid(v)) throw DomainError("assignment entry outside its domain");
    values_[i] = v;
  }
  /// ±1 domain only.
  void flip(std::size_t i) { values_[i] = static_cast<std::int8_t>(-values_[i]); }

  Assignment negated() const {
    if (domain_ != Domain::PlusMinusOne) throw DomainError("negation requires the pm1 domain");
    Assignment out = *this;
    for (auto& v : out.values_) v = static_cast<std::int8_t>(-v);
    return out;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment& l, const Assignment& r) { return l.values_ <=> r.values_; }

 private:
  bool is_valid(std::int8_t v) const noexcept {
    return domain_ == Domain::PlusMinusOne ? (v == 1 || v == -1) : (v == 0 || v == 1);
  }

  Domain domain_ = Domain::PlusMinusOne;
  std::vector<std::int8_t> values_;
};

/// Round-trippable decimal form of a double (17 significant digits).
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::int8_t sign_of(double v) noexcept { return v >= 0.0 ? std::int8_t{1} : std::int8_t{-1}; }

// ---------------------------------------------------------------------------
// Seeds

/// splitmix64 finalizer; used to derive independent per-stream seeds.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// ---------------------------------------------------------------------------
// Log-domain helpers. All paths are max-shifted.

inline double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> xs) noexcept {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

inline double log_mean_exp(std::span<const double> xs) noexcept {
  return log_sum_exp(xs) - std::log(static_cast<double>(xs.size()));
}

/// Running log-sum-exp that rescales when a new maximum arrives.
class LogSumExpAccumulator {
 public:
  void add(double x) noexcept {
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const noexcept {
    return sum_ == 0.0 ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

inline double logistic(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// log(2 cosh u) without overflow.
inline double log_two_cosh(double u) noexcept {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a));
}

/// log(1 + e^u) without overflow.
inline double softplus(double u) noexcept {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

}  // namespace rrr
