#pragma once

#include <tschief/core.hpp>
#include <tschief/rng.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tschief {

  inline constexpr std::size_t min_interval_length = 16;
  inline constexpr std::size_t max_lag = 100;

  struct Interval {
    std::size_t start = 0;
    std::size_t length = min_interval_length;

    friend bool operator==(const Interval&, const Interval&) = default;
  };

  enum class TransformKind : std::uint8_t { Acf, Pacf, Ar, Ps };

  inline constexpr std::array<TransformKind, 4> all_transform_kinds{
    TransformKind::Acf, TransformKind::Pacf, TransformKind::Ar, TransformKind::Ps};

  std::string_view to_string(TransformKind kind);

  /// Length m uniform in [16, length], start uniform in [0, length - m].
  Interval sample_interval(Rng& rng, std::size_t series_length);

  /// ACF/PACF lag count and AR order for a subseries of length m: min(m / 4, 100).
  std::size_t lag_cap(std::size_t m);

  /// Autocorrelation at lags 1..max_lag; all zeros for a constant subseries.
  std::vector<double> acf(std::span<const double> x, std::size_t max_lag);

  /** Partial autocorrelation from autocorrelations at lags 1..L (Durbin-Levinson).
   *  Entries past a non-positive prediction error variance are 0. */
  std::vector<double> pacf(std::span<const double> acf_values);

  /// Yule-Walker AR(order) coefficients solved by Durbin-Levinson; zeros for a constant subseries.
  std::vector<double> ar_coefficients(std::span<const double> x, std::size_t order);

  /// |DFT_k|^2 for k = 1..floor(m/2).
  std::vector<double> power_spectrum(std::span<const double> x);

  /// Size of transform_interval's output for a subseries of length m.
  std::size_t transformed_length(std::size_t m, TransformKind kind);

  /// Applies `kind` to series[start, start + length).
  std::vector<double> transform_interval(std::span<const double> series, const Interval& interval, TransformKind kind);

} // namespace tschief
