#include "cudir/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cudir/error.hpp"

namespace cudir::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(std::span<const double> v) { return nlohmann::json(std::vector<double>(v.begin(), v.end())); }

nlohmann::json to_json(const Matrix& m) {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_json(m.row(i)));
  return out;
}

nlohmann::json to_json(const MomentSummary& s) {
  return {{"md", to_json(s.md.coords())},
          {"mrl", s.mrl},
          {"cov_chi", s.cov_chi ? to_json(*s.cov_chi) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const OptimizationResult& r) {
  return {{"theta", to_json(r.theta_star.coords())},
          {"value", r.value},
          {"multiplicity", r.multiplicity},
          {"variance_only", r.variance_only}};
}

nlohmann::json to_json(const DescriptiveStats& s) {
  return {{"count", s.count},   {"mean", s.mean}, {"sd", s.sd},         {"skewness", s.skewness},
          {"kurtosis", s.kurtosis}, {"min", s.min},   {"q1", s.q1},         {"median", s.median},
          {"q3", s.q3},         {"max", s.max}};
}

nlohmann::json to_json(const ComponentStats& s) {
  return {{"median", s.median},
          {"skewness", s.skewness},
          {"kurtosis", s.kurtosis},
          {"positive", s.positive},
          {"negative", s.negative}};
}

nlohmann::json to_json(const WindowReport& r) {
  return {{"label", r.label},
          {"sample_size", r.projected_series.size()},
          {"md", to_json(r.summary.md.coords())},
          {"mrl", r.summary.mrl},
          {"scatter_eigenvalues", to_json(std::span<const double>(r.scatter_eigenvalues))},
          {"iota", to_json(r.iota.coords())},
          {"projected_stats", to_json(r.projected_stats)},
          {"md_components", to_json(r.md_components)}};
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || c == ';' || std::isspace(static_cast<unsigned char>(c)); };
  while (i < text.size()) {
    while (i < text.size() && is_sep(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !is_sep(text[j])) ++j;
    std::string_view token = text.substr(i, j - i);
    const char* first = token.data();
    if (token.front() == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v))
      throw ParseError("not a finite number: '" + std::string(token) + "'");
    out.push_back(v);
    i = j;
  }
  if (out.empty()) throw ParseError("empty number list");
  return out;
}

std::vector<double> read_number_list(std::string_view arg) {
  if (!arg.empty() && arg.front() == '@') return parse_number_list(read_text_file(std::string(arg.substr(1))));
  return parse_number_list(arg);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("cannot write " + path.string());
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string checksum(const nlohmann::json& value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(value.dump())));
  return std::string("fnv1a64:") + buf;
}

Matrix ParameterFixture::sigma10_prime() const {
  Matrix out = sigma10;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= prime_scale[i] * prime_scale[j];
  return out;
}

std::vector<double> ParameterFixture::mu3() const { return {mu10.begin(), mu10.begin() + 3}; }

Matrix ParameterFixture::sigma3() const {
  Matrix out(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out(i, j) = sigma10(i, j);
  return out;
}

ParameterFixture parse_parameter_fixture(const nlohmann::json& doc) {
  try {
    const auto& params = doc.at("parameters");
    const std::string expected = doc.at("checksum").get<std::string>();
    const std::string actual = checksum(params);
    if (expected != actual) throw ParseError("parameter fixture checksum mismatch: " + actual + " != " + expected);

    ParameterFixture fx;
    fx.version = doc.at("version").get<int>();
    const double scale = params.at("scale").get<double>();
    fx.mu10 = params.at("mu").get<std::vector<double>>();
    const auto upper = params.at("sigma_upper").get<std::vector<std::vector<double>>>();
    fx.prime_scale = params.at("prime_scale").get<std::vector<double>>();
    const std::size_t n = fx.mu10.size();
    if (n < 3 || upper.size() != n || fx.prime_scale.size() != n)
      throw ParseError("parameter fixture has inconsistent dimensions");
    for (double& v : fx.mu10) v *= scale;
    fx.sigma10 = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (upper[i].size() != n - i) throw ParseError("sigma_upper row " + std::to_string(i) + " has the wrong length");
      for (std::size_t k = 0; k < upper[i].size(); ++k) {
        fx.sigma10(i, i + k) = upper[i][k] * scale;
        fx.sigma10(i + k, i) = upper[i][k] * scale;
      }
    }
    return fx;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed parameter fixture: ") + e.what());
  }
}

ParameterFixture load_parameter_fixture(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_parameter_fixture(doc);
}

}  // namespace cudir::io
