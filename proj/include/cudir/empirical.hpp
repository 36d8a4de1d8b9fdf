#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cudir/linalg.hpp"
#include "cudir/moments.hpp"
#include "cudir/montecarlo.hpp"
#include "cudir/sphere.hpp"

namespace cudir {

using Date = std::chrono::year_month_day;

/// Strict YYYY-MM-DD. Throws ParseError.
[[nodiscard]] Date parse_iso_date(std::string_view text);
[[nodiscard]] std::string format_iso_date(Date d);

/// Dated cross-sectional returns, one row per date and one column per ticker.
class ReturnPanel {
 public:
  /// missing_mask marks cells that were absent in the source (and have been
  /// filled). Throws ParseError when dates are not strictly increasing and
  /// DimensionError on inconsistent shapes.
  ReturnPanel(std::vector<Date> dates, std::vector<std::string> tickers, Matrix returns,
              std::vector<std::uint8_t> missing_mask);

  [[nodiscard]] std::size_t rows() const noexcept { return returns_.rows(); }
  [[nodiscard]] std::size_t cols() const noexcept { return returns_.cols(); }
  [[nodiscard]] const std::vector<Date>& dates() const noexcept { return dates_; }
  [[nodiscard]] const std::vector<std::string>& tickers() const noexcept { return tickers_; }
  [[nodiscard]] const Matrix& returns() const noexcept { return returns_; }
  [[nodiscard]] bool missing(std::size_t row, std::size_t col) const noexcept { return mask_[row * cols() + col] != 0; }

 private:
  std::vector<Date> dates_;
  std::vector<std::string> tickers_;
  Matrix returns_;
  std::vector<std::uint8_t> mask_;
};

enum class MissingPolicy {
  cross_mean,  ///< fill with the row's cross-sectional mean (standardized value 0)
  drop_row,    ///< drop every row that still has a missing cell
};

/// Columns with more than this fraction of missing cells are dropped.
inline constexpr double kMaxMissingFraction = 0.10;

struct PanelLoadReport {
  std::vector<std::string> dropped_tickers;
  std::size_t filled_cells = 0;
  std::size_t dropped_rows = 0;
};

struct LoadedPanel {
  ReturnPanel panel;
  PanelLoadReport report;
};

/// Reads `date,<ticker1>,<ticker2>,...` CSV with ISO dates, decimal returns
/// and empty cells for missing values. Throws ParseError on malformed input
/// and DegenerateInputError when fewer than 2 columns or rows survive.
[[nodiscard]] LoadedPanel read_panel(std::istream& in, MissingPolicy policy);
[[nodiscard]] LoadedPanel load_panel(const std::filesystem::path& path, MissingPolicy policy);

/// The rows of a panel mapped onto the constrained sphere.
struct StandardizedPanel {
  DirectionalSample sample;
  std::vector<std::size_t> panel_rows;  ///< panel row of each sample point
  std::size_t degenerate_rows = 0;      ///< constant rows that were dropped
};

/// Throws DegenerateInputError when every row is constant.
[[nodiscard]] StandardizedPanel standardize_panel(const ReturnPanel& panel);

/// A half-open range [first_row, end_row) of panel rows.
struct Window {
  std::string label;
  std::size_t first_row = 0;
  std::size_t end_row = 0;
};

inline constexpr std::size_t kMinYearRows = 30;

[[nodiscard]] Window full_window(const ReturnPanel& panel);
/// One window per calendar year holding at least min_rows rows.
[[nodiscard]] std::vector<Window> yearly_windows(const ReturnPanel& panel, std::size_t min_rows = kMinYearRows);
/// Dates from..to inclusive.
[[nodiscard]] Window date_range_window(const ReturnPanel& panel, Date from, Date to);
/// Sample points whose panel row lies in the window.
[[nodiscard]] DirectionalSample window_sample(const StandardizedPanel& standardized, const Window& window);

struct DescriptiveStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;        ///< N-1 divisor
  double skewness = 0.0;  ///< m3 / m2^{3/2}, population moments
  double kurtosis = 0.0;  ///< m4 / m2^2, non-excess
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quartiles use linear interpolation between order statistics.
/// Throws DimensionError on empty input.
[[nodiscard]] DescriptiveStats describe(std::span<const double> values);

/// Pearson correlation; throws DegenerateInputError when either side is constant.
[[nodiscard]] double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Cross-sectional description of a mean direction's components.
struct ComponentStats {
  double median = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

struct WindowReport {
  std::string label;
  MomentSummary summary;
  std::vector<double> scatter_eigenvalues;  ///< descending
  UnitDirection iota;
  std::vector<double> projected_series;  ///< iota^T x_t
  DescriptiveStats projected_stats;
  ComponentStats md_components;
};

/// iota = nullopt projects on the window's own mean direction, in which
/// case the projected mean equals the sample MRL. Throws DimensionError for
/// fewer than 2 points and UndefinedDirectionError for a zero resultant.
[[nodiscard]] WindowReport window_report(const DirectionalSample& sample, std::string label,
                                         const std::optional<UnitDirection>& iota = std::nullopt);

struct CorrelationSummary {
  double mean_corr_z = 0.0;
  double sd_corr_z = 0.0;
  double mean_corr_x = 0.0;
  double sd_corr_x = 0.0;
};

/// Mean and standard deviation of the off-diagonal sample correlations of
/// the raw returns z and of the standardized x, over the standardized rows.
[[nodiscard]] CorrelationSummary correlation_summary(const ReturnPanel& panel, const StandardizedPanel& standardized);

struct RollingPoint {
  Date date;
  std::optional<double> mrl;  ///< empty when every row of the window is constant
  double cssd = 0.0;
};

inline constexpr std::size_t kDefaultRollingWindow = 20;

/// For each date with a full trailing window: the norm of the mean of the
/// standardized rows (constant rows are skipped) and
/// CSSD = ||P zbar|| / sqrt(n) of the window's mean return row.
/// Throws DimensionError when the window is 0 or longer than the panel.
[[nodiscard]] std::vector<RollingPoint> rolling_mrl_cssd(const ReturnPanel& panel,
                                                         std::size_t window = kDefaultRollingWindow);

}  // namespace cudir
