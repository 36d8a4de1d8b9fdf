#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cudir/empirical.hpp"
#include "cudir/linalg.hpp"
#include "cudir/model.hpp"
#include "cudir/moments.hpp"
#include "cudir/optimize.hpp"

namespace cudir::io {

/// Shortest decimal that round-trips to the same double.
[[nodiscard]] std::string format_number(double v);

[[nodiscard]] nlohmann::json to_json(std::span<const double> v);
[[nodiscard]] nlohmann::json to_json(const Matrix& m);
/// {"md": [...], "mrl": x, "cov_chi": [[...]] | null}
[[nodiscard]] nlohmann::json to_json(const MomentSummary& s);
/// {"theta": [...], "value": x, "multiplicity": k, "variance_only": b}
[[nodiscard]] nlohmann::json to_json(const OptimizationResult& r);
[[nodiscard]] nlohmann::json to_json(const DescriptiveStats& s);
[[nodiscard]] nlohmann::json to_json(const ComponentStats& s);
/// Everything except the projected series, which goes to CSV.
[[nodiscard]] nlohmann::json to_json(const WindowReport& r);

/// Comma, semicolon or whitespace separated numbers. Throws ParseError.
[[nodiscard]] std::vector<double> parse_number_list(std::string_view text);
/// "@path" reads the list from a file, anything else is parsed inline.
[[nodiscard]] std::vector<double> read_number_list(std::string_view arg);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories as needed. Throws Error on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// FNV-1a, 64 bit.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;
/// "fnv1a64:<16 hex digits>" of the compact dump of a JSON value. nlohmann
/// sorts object keys, so the dump is canonical.
[[nodiscard]] std::string checksum(const nlohmann::json& value);

/// The bundled ten-asset parameter set: mean vector, covariance matrix and
/// the volatility-scaling diagonal used for the perturbed covariance.
struct ParameterFixture {
  int version = 0;
  std::vector<double> mu10;
  Matrix sigma10;
  std::vector<double> prime_scale;

  /// diag(s) Sigma10 diag(s)
  [[nodiscard]] Matrix sigma10_prime() const;
  /// Leading three components.
  [[nodiscard]] std::vector<double> mu3() const;
  [[nodiscard]] Matrix sigma3() const;
};

/// Reads the fixture and verifies its checksum. Throws ParseError on a
/// malformed file or a checksum mismatch.
[[nodiscard]] ParameterFixture load_parameter_fixture(const std::filesystem::path& path);
[[nodiscard]] ParameterFixture parse_parameter_fixture(const nlohmann::json& doc);

}  // namespace cudir::io
