#pragma once

#include <cstddef>
#include <string>

#include "cudir/random.hpp"

namespace cudir {

/// Synthetic daily return panels for tests and demos.
///
/// z_it = b_i f_t + s_t a_i + e_it with b_i ~ 1 + beta_sd N(0,1), f_t ~
/// N(0, factor_sd^2), e_it ~ N(0, noise_sd^2) and a fixed standardized
/// pattern a. The regime strength s_t alternates between 0 and
/// regime_strength every regime_length rows, so a larger s_t raises the
/// cross-sectional dispersion and aligns the standardized rows together.
struct SyntheticPanelSpec {
  std::size_t years = 5;
  std::size_t rows_per_year = 244;  ///< first weekdays of each year
  int first_year = 2014;
  std::size_t cols = 200;

  double factor_sd = 0.02;
  double noise_sd = 0.01;
  double beta_sd = 0.0;
  double regime_strength = 0.0;
  std::size_t regime_length = 60;

  std::size_t sparse_cols = 0;       ///< columns missing with probability sparse_missing
  double sparse_missing = 0.2;
  double scattered_missing = 0.0;    ///< missing probability in the other columns

  SeededStream stream{};
};

/// CSV text in the panel input format; missing cells are empty.
[[nodiscard]] std::string synthetic_panel_csv(const SyntheticPanelSpec& spec);

}  // namespace cudir
