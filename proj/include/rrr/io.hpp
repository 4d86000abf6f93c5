#pragma once

// Instance files (JSON, UTF-8) and atomic file output.
//
//   {"kind": "mrf", "domain": "pm1", "n": 3, "A": [[...], ...]}
//   {"kind": "rbm", "domain": "01", "m": 2, "p": 3, "W": [[...], ...], "a": [...], "b": [...]}
//
// Numbers are written with 17 significant digits; the reader rejects
// non-finite values.

#include "rrr/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>

namespace rrr {

using Instance = std::variant<MrfParams, RbmParams>;

namespace detail {

inline void write_row(std::ostringstream& os, const auto& row) {
  os << '[';
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j) os << ',';
    os << format_real(row(j));
  }
  os << ']';
}

inline void write_matrix(std::ostringstream& os, const Matrix& M) {
  os << '[';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (i) os << ',';
    write_row(os, M.row(i));
  }
  os << ']';
}

inline Domain parse_domain(const nlohmann::json& j) {
  if (!j.contains("domain") || !j["domain"].is_string()) throw FormatError("missing string field \"domain\"");
  const auto& d = j["domain"].get_ref<const std::string&>();
  if (d == "pm1") return Domain::PlusMinusOne;
  if (d == "01") return Domain::ZeroOne;
  throw FormatError("unknown domain \"" + d + "\"");
}

inline std::size_t parse_dim(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1)
    throw FormatError(std::string("field \"") + key + "\" must be a positive integer");
  return j[key].get<std::size_t>();
}

inline double parse_real(const nlohmann::json& v) {
  if (!v.is_number()) throw FormatError("expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw FormatError("non-finite number in instance");
  return x;
}

inline Vector parse_vector(const nlohmann::json& j, const char* key, std::size_t len) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != len)
    throw FormatError(std::string("field \"") + key + "\" must be an array of length " + std::to_string(len));
  Vector out(static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < len; ++i) out[static_cast<Eigen::Index>(i)] = parse_real(j[key][i]);
  return out;
}

inline Matrix parse_matrix(const nlohmann::json& j, const char* key, std::size_t rows, std::size_t cols) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != rows)
    throw FormatError(std::string("field \"") + key + "\" must have " + std::to_string(rows) + " rows");
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = j[key][i];
    if (!row.is_array() || row.size() != cols)
      throw FormatError(std::string("row ") + std::to_string(i) + " of \"" + key + "\" must have " +
                        std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = parse_real(row[c]);
  }
  return out;
}

}  // namespace detail

inline std::string serialize_instance(const MrfParams& params) {
  std::ostringstream os;
  os << "{\"kind\":\"mrf\",\"domain\":\"" << domain_tag(params.domain()) << "\",\"n\":" << params.n() << ",\"A\":";
  detail::write_matrix(os, params.A());
  os << "}\n";
  return os.str();
}

inline std::string serialize_instance(const RbmParams& params) {
  std::ostringstream os;
  os << "{\"kind\":\"rbm\",\"domain\":\"" << domain_tag(params.domain()) << "\",\"m\":" << params.m()
     << ",\"p\":" << params.p() << ",\"W\":";
  detail::write_matrix(os, params.W());
  os << ",\"a\":";
  detail::write_row(os, params.a());
  os << ",\"b\":";
  detail::write_row(os, params.b());
  os << "}\n";
  return os.str();
}

inline std::string serialize_instance(const Instance& inst) {
  return std::visit([](const auto& p) { return serialize_instance(p); }, inst);
}

inline Instance parse_instance(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("instance must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw FormatError("missing string field \"kind\"");
  const auto& kind = j["kind"].get_ref<const std::string&>();
  const Domain domain = detail::parse_domain(j);
  try {
    if (kind == "mrf") {
      const std::size_t n = detail::parse_dim(j, "n");
      return MrfParams(detail::parse_matrix(j, "A", n, n), domain);
    }
    if (kind == "rbm") {
      const std::size_t m = detail::parse_dim(j, "m"), p = detail::parse_dim(j, "p");
      return RbmParams(detail::parse_matrix(j, "W", m, p), detail::parse_vector(j, "a", m),
                       detail::parse_vector(j, "b", p), domain);
    }
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  throw FormatError("unknown kind \"" + kind + "\"");
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Instance load_instance(const std::filesystem::path& path) { return parse_instance(read_text_file(path)); }

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rrr
