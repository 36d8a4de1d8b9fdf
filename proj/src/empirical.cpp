#include "cudir/empirical.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "cudir/error.hpp"

namespace cudir {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double parse_cell(std::string_view text, std::size_t line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ParseError(where(line) + "not a number: '" + std::string(text) + "'");
  if (!std::isfinite(v)) throw ParseError(where(line) + "non-finite value '" + std::string(text) + "'");
  return v;
}

int parse_digits(std::string_view s) {
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return -1;
    v = v * 10 + (c - '0');
  }
  return v;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct OffDiagonal {
  double mean = 0.0;
  double sd = 0.0;
};

// Off-diagonal summary of the correlation matrix of the given columns.
OffDiagonal correlation_offdiag(const std::vector<std::vector<double>>& columns, const char* what) {
  const std::size_t n = columns.size();
  std::vector<std::vector<double>> centered(n);
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& c = columns[j];
    const double m = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
    centered[j].resize(c.size());
    // compare extremes: the mean of a constant column is not exact, so ss is not 0
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    if (!(*lo < *hi)) throw DegenerateInputError(std::string("zero-variance column in ") + what);
    double ss = 0.0;
    for (std::size_t t = 0; t < c.size(); ++t) {
      centered[j][t] = c[t] - m;
      ss += centered[j][t] * centered[j][t];
    }
    norms[j] = std::sqrt(ss);
  }
  std::vector<double> corr;
  corr.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) corr.push_back(dot(centered[i], centered[j]) / (norms[i] * norms[j]));
  OffDiagonal out;
  out.mean = std::accumulate(corr.begin(), corr.end(), 0.0) / static_cast<double>(corr.size());
  if (corr.size() > 1) {
    double ss = 0.0;
    for (double c : corr) ss += (c - out.mean) * (c - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(corr.size() - 1));
  }
  return out;
}

}  // namespace

Date parse_iso_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw ParseError("bad date '" + std::string(text) + "'");
  const int y = parse_digits(text.substr(0, 4));
  const int m = parse_digits(text.substr(5, 2));
  const int d = parse_digits(text.substr(8, 2));
  const Date date{std::chrono::year(y), std::chrono::month(static_cast<unsigned>(std::max(m, 0))),
                  std::chrono::day(static_cast<unsigned>(std::max(d, 0)))};
  if (y < 0 || m < 0 || d < 0 || !date.ok()) throw ParseError("bad date '" + std::string(text) + "'");
  return date;
}

std::string format_iso_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

ReturnPanel::ReturnPanel(std::vector<Date> dates, std::vector<std::string> tickers, Matrix returns,
                         std::vector<std::uint8_t> missing_mask)
    : dates_(std::move(dates)), tickers_(std::move(tickers)), returns_(std::move(returns)), mask_(std::move(missing_mask)) {
  if (dates_.size() != returns_.rows() || tickers_.size() != returns_.cols() ||
      mask_.size() != returns_.rows() * returns_.cols())
    throw DimensionError("panel shape mismatch");
  for (std::size_t t = 1; t < dates_.size(); ++t)
    if (!(dates_[t - 1] < dates_[t]))
      throw ParseError("dates not strictly increasing at " + format_iso_date(dates_[t]));
  for (double v : returns_.data())
    if (!std::isfinite(v)) throw DomainError("panel contains a non-finite return");
}

LoadedPanel read_panel(std::istream& in, MissingPolicy policy) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> tickers;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ParseError("empty panel");
  const auto header = split_csv(line);
  if (header.size() < 2) throw ParseError(where(line_no) + "header needs a date column and at least one ticker");
  if (unquote(header[0]) != "date") throw ParseError(where(line_no) + "first header field must be 'date'");
  for (std::size_t j = 1; j < header.size(); ++j) {
    const auto name = unquote(header[j]);
    if (name.empty()) throw ParseError(where(line_no) + "empty ticker name in header");
    tickers.emplace_back(name);
  }
  const std::size_t width = tickers.size();

  std::vector<Date> dates;
  std::vector<double> values;  // NaN marks a missing cell while parsing
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != width + 1)
      throw ParseError(where(line_no) + "expected " + std::to_string(width + 1) + " fields, got " +
                       std::to_string(cells.size()));
    try {
      dates.push_back(parse_iso_date(unquote(cells[0])));
    } catch (const ParseError& e) {
      throw ParseError(where(line_no) + e.what());
    }
    for (std::size_t j = 1; j <= width; ++j)
      values.push_back(cells[j].empty() ? std::nan("") : parse_cell(cells[j], line_no));
  }
  const std::size_t rows = dates.size();
  if (rows < 2) throw DegenerateInputError("panel has fewer than 2 rows");

  PanelLoadReport report;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < width; ++j) {
    std::size_t missing = 0;
    for (std::size_t t = 0; t < rows; ++t) missing += std::isnan(values[t * width + j]) ? 1 : 0;
    if (static_cast<double>(missing) > kMaxMissingFraction * static_cast<double>(rows))
      report.dropped_tickers.push_back(tickers[j]);
    else
      keep.push_back(j);
  }
  if (keep.size() < 2) throw DegenerateInputError("fewer than 2 columns survive the missing-value filter");

  std::vector<Date> kept_dates;
  std::vector<double> kept_values;
  std::vector<std::uint8_t> mask;
  for (std::size_t t = 0; t < rows; ++t) {
    double sum = 0.0;
    std::size_t observed = 0;
    for (std::size_t j : keep) {
      const double v = values[t * width + j];
      if (!std::isnan(v)) {
        sum += v;
        ++observed;
      }
    }
    const bool complete = observed == keep.size();
    if (observed == 0 || (policy == MissingPolicy::drop_row && !complete)) {
      ++report.dropped_rows;
      continue;
    }
    const double fill = sum / static_cast<double>(observed);
    kept_dates.push_back(dates[t]);
    for (std::size_t j : keep) {
      const double v = values[t * width + j];
      const bool absent = std::isnan(v);
      kept_values.push_back(absent ? fill : v);
      mask.push_back(absent ? 1 : 0);
      report.filled_cells += absent ? 1 : 0;
    }
  }
  if (kept_dates.size() < 2) throw DegenerateInputError("fewer than 2 rows survive the missing-value policy");

  std::vector<std::string> kept_tickers;
  for (std::size_t j : keep) kept_tickers.push_back(tickers[j]);
  Matrix returns(kept_dates.size(), keep.size());
  std::copy(kept_values.begin(), kept_values.end(), returns.data().begin());
  return {ReturnPanel(std::move(kept_dates), std::move(kept_tickers), std::move(returns), std::move(mask)),
          std::move(report)};
}

LoadedPanel load_panel(const std::filesystem::path& path, MissingPolicy policy) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open panel file " + path.string());
  return read_panel(in, policy);
}

StandardizedPanel standardize_panel(const ReturnPanel& panel) {
  const auto& z = panel.returns();
  std::vector<std::size_t> rows;
  std::vector<double> coords;
  coords.reserve(z.rows() * z.cols());
  std::size_t degenerate = 0;
  for (std::size_t t = 0; t < z.rows(); ++t) {
    try {
      const auto x = standardize(z.row(t));
      coords.insert(coords.end(), x.coords().begin(), x.coords().end());
      rows.push_back(t);
    } catch (const DegenerateInputError&) {
      ++degenerate;
    }
  }
  if (rows.empty()) throw DegenerateInputError("every panel row is constant");
  Matrix points(rows.size(), z.cols());
  std::copy(coords.begin(), coords.end(), points.data().begin());
  return {DirectionalSample(std::move(points)), std::move(rows), degenerate};
}

Window full_window(const ReturnPanel& panel) { return {"full", 0, panel.rows()}; }

std::vector<Window> yearly_windows(const ReturnPanel& panel, std::size_t min_rows) {
  std::vector<Window> out;
  const auto& dates = panel.dates();
  std::size_t start = 0;
  while (start < dates.size()) {
    std::size_t end = start;
    while (end < dates.size() && dates[end].year() == dates[start].year()) ++end;
    if (end - start >= min_rows) out.push_back({std::to_string(static_cast<int>(dates[start].year())), start, end});
    start = end;
  }
  return out;
}

Window date_range_window(const ReturnPanel& panel, Date from, Date to) {
  if (to < from) throw DomainError("date range ends before it starts");
  const auto& dates = panel.dates();
  const auto first = std::lower_bound(dates.begin(), dates.end(), from);
  const auto last = std::upper_bound(dates.begin(), dates.end(), to);
  return {format_iso_date(from) + ":" + format_iso_date(to), static_cast<std::size_t>(first - dates.begin()),
          static_cast<std::size_t>(last - dates.begin())};
}

DirectionalSample window_sample(const StandardizedPanel& standardized, const Window& window) {
  const auto& rows = standardized.panel_rows;
  const auto lo = std::lower_bound(rows.begin(), rows.end(), window.first_row);
  const auto hi = std::lower_bound(rows.begin(), rows.end(), window.end_row);
  if (hi - lo < 1) throw DimensionError("window '" + window.label + "' holds no usable rows");
  std::vector<std::size_t> picks(static_cast<std::size_t>(hi - lo));
  std::iota(picks.begin(), picks.end(), static_cast<std::size_t>(lo - rows.begin()));
  return standardized.sample.subset(picks);
}

DescriptiveStats describe(std::span<const double> values) {
  if (values.empty()) throw DimensionError("describe needs at least one value");
  DescriptiveStats s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  s.sd = values.size() > 1 ? std::sqrt(m2 / (n - 1.0)) : std::nan("");
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : std::nan("");
  s.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : std::nan("");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  return s;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DimensionError("correlation needs two series of equal length >= 2");
  auto constant = [](std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return !(*lo < *hi);
  };
  if (constant(a) || constant(b)) throw DegenerateInputError("correlation of a constant series");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

WindowReport window_report(const DirectionalSample& sample, std::string label, const std::optional<UnitDirection>& iota) {
  if (sample.size() < 2) throw DimensionError("window '" + label + "' needs at least 2 points");
  if (iota && iota->dim() != sample.dim()) throw DimensionError("projection direction has the wrong dimension");
  MomentSummary summary = estimate_md_mrl(sample);

  auto eig = symmetric_eigen(scatter_matrix(sample));
  std::vector<double> eigenvalues(eig.values.rbegin(), eig.values.rend());

  const UnitDirection theta = iota ? *iota : summary.md;
  std::vector<double> series(sample.size());
  for (std::size_t t = 0; t < sample.size(); ++t) series[t] = dot(theta.coords(), sample.point(t));
  const DescriptiveStats projected = describe(series);

  const auto md = summary.md.coords();
  const DescriptiveStats comp = describe(md);
  ComponentStats components{comp.median, comp.skewness, comp.kurtosis,
                            static_cast<std::size_t>(std::count_if(md.begin(), md.end(), [](double v) { return v > 0.0; })),
                            static_cast<std::size_t>(std::count_if(md.begin(), md.end(), [](double v) { return v < 0.0; }))};

  return {std::move(label), std::move(summary), std::move(eigenvalues), theta, std::move(series), projected, components};
}

CorrelationSummary correlation_summary(const ReturnPanel& panel, const StandardizedPanel& standardized) {
  const std::size_t n = panel.cols();
  const std::size_t count = standardized.panel_rows.size();
  if (count < 2) throw DimensionError("correlations need at least 2 rows");
  std::vector<std::vector<double>> z(n, std::vector<double>(count));
  std::vector<std::vector<double>> x(n, std::vector<double>(count));
  for (std::size_t k = 0; k < count; ++k) {
    const auto zr = panel.returns().row(standardized.panel_rows[k]);
    const auto xr = standardized.sample.point(k);
    for (std::size_t j = 0; j < n; ++j) {
      z[j][k] = zr[j];
      x[j][k] = xr[j];
    }
  }
  const auto cz = correlation_offdiag(z, "raw returns");
  const auto cx = correlation_offdiag(x, "standardized returns");
  return {cz.mean, cz.sd, cx.mean, cx.sd};
}

std::vector<RollingPoint> rolling_mrl_cssd(const ReturnPanel& panel, std::size_t window) {
  const std::size_t rows = panel.rows();
  const std::size_t n = panel.cols();
  if (window == 0 || window > rows)
    throw DimensionError("rolling window of " + std::to_string(window) + " rows does not fit a panel of " +
                         std::to_string(rows) + " rows");
  const auto& z = panel.returns();
  std::vector<std::optional<UnitDirection>> x(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    try {
      x[t] = standardize(z.row(t));
    } catch (const DegenerateInputError&) {
    }
  }

  std::vector<RollingPoint> out;
  out.reserve(rows - window + 1);
  std::vector<double> xsum(n), zsum(n);
  for (std::size_t t = window - 1; t < rows; ++t) {
    // Resummed per window so roundoff does not drift along the series.
    std::fill(xsum.begin(), xsum.end(), 0.0);
    std::fill(zsum.begin(), zsum.end(), 0.0);
    std::size_t valid = 0;
    for (std::size_t s = t + 1 - window; s <= t; ++s) {
      const auto zr = z.row(s);
      for (std::size_t j = 0; j < n; ++j) zsum[j] += zr[j];
      if (x[s]) {
        ++valid;
        for (std::size_t j = 0; j < n; ++j) xsum[j] += (*x[s])[j];
      }
    }
    RollingPoint p{panel.dates()[t], std::nullopt, 0.0};
    if (valid > 0) p.mrl = norm(xsum) / static_cast<double>(valid);
    for (double& v : zsum) v /= static_cast<double>(window);
    p.cssd = norm(center(zsum)) / std::sqrt(static_cast<double>(n));
    out.push_back(p);
  }
  return out;
}

}  // namespace cudir
