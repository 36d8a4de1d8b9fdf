#include "cudir/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "cudir/empirical.hpp"
#include "cudir/error.hpp"
#include "cudir/io.hpp"

namespace cudir {

namespace {

std::vector<Date> weekday_dates(int first_year, std::size_t years, std::size_t per_year) {
  using namespace std::chrono;
  std::vector<Date> out;
  for (std::size_t y = 0; y < years; ++y) {
    sys_days day{year(first_year + static_cast<int>(y)) / January / 1};
    std::size_t taken = 0;
    while (taken < per_year) {
      const weekday wd{day};
      if (wd != Saturday && wd != Sunday) {
        const Date d{day};
        if (static_cast<int>(d.year()) != first_year + static_cast<int>(y))
          throw DomainError("rows_per_year exceeds the weekdays in a year");
        out.push_back(d);
        ++taken;
      }
      day += days{1};
    }
  }
  return out;
}

}  // namespace

std::string synthetic_panel_csv(const SyntheticPanelSpec& spec) {
  if (spec.cols < 2 || spec.years == 0 || spec.rows_per_year == 0) throw DimensionError("synthetic panel too small");
  if (spec.sparse_cols > spec.cols) throw DimensionError("more sparse columns than columns");
  const auto dates = weekday_dates(spec.first_year, spec.years, spec.rows_per_year);
  const std::size_t n = spec.cols;

  RandomStream setup(spec.stream);
  std::vector<double> beta(n), pattern(n);
  for (auto& b : beta) b = 1.0 + spec.beta_sd * setup.next_normal();
  double mean = 0.0;
  for (auto& a : pattern) {
    a = setup.next_normal();
    mean += a;
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (auto& a : pattern) {
    a -= mean;
    ss += a * a;
  }
  const double scale = std::sqrt(static_cast<double>(n) / ss);  // unit cross-sectional sd
  for (auto& a : pattern) a *= scale;

  RandomStream draws(spec.stream.derive(1));
  RandomStream holes(spec.stream.derive(2));
  std::string out = "date";
  char name[32];
  for (std::size_t j = 0; j < n; ++j) {
    std::snprintf(name, sizeof name, ",S%03zu", j + 1);
    out += name;
  }
  out += '\n';
  for (std::size_t t = 0; t < dates.size(); ++t) {
    const double f = spec.factor_sd * draws.next_normal();
    const double s = (t / spec.regime_length) % 2 == 1 ? spec.regime_strength : 0.0;
    out += format_iso_date(dates[t]);
    for (std::size_t j = 0; j < n; ++j) {
      const double z = beta[j] * f + s * pattern[j] + spec.noise_sd * draws.next_normal();
      const double p_missing = j < spec.sparse_cols ? spec.sparse_missing : spec.scattered_missing;
      out += ',';
      if (!(p_missing > 0.0 && holes.next_uniform() < p_missing)) out += io::format_number(z);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cudir
