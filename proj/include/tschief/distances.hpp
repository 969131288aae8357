#pragma once

#include <tschief/core.hpp>
#include <tschief/rng.hpp>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tschief {

  enum class MeasureKind : std::uint8_t {
    Euclidean,
    DtwFull,
    DtwWindow,
    DdtwFull,
    DdtwWindow,
    Wdtw,
    Wddtw,
    Lcss,
    Erp,
    Msm,
    Twe,
  };

  inline constexpr std::size_t measure_kind_count = 11;

  inline constexpr std::array<MeasureKind, measure_kind_count> all_measure_kinds{
    MeasureKind::Euclidean, MeasureKind::DtwFull, MeasureKind::DtwWindow, MeasureKind::DdtwFull,
    MeasureKind::DdtwWindow, MeasureKind::Wdtw, MeasureKind::Wddtw, MeasureKind::Lcss,
    MeasureKind::Erp, MeasureKind::Msm, MeasureKind::Twe,
  };

  std::string_view to_string(MeasureKind kind);

  /// True for the measures computed on the derivative of their inputs (DDTW, WDDTW).
  bool uses_derivative(MeasureKind kind);

  /** One of the elastic measures together with its sampled parameters.
   *  Only the fields the kind needs are set. */
  struct ParameterizedMeasure {
    MeasureKind kind = MeasureKind::Euclidean;
    std::optional<std::size_t> window;  ///< Sakoe-Chiba band radius
    std::optional<double> g;            ///< WDTW weight steepness
    std::optional<double> epsilon;      ///< LCSS match threshold
    std::optional<double> gap_value;    ///< ERP gap value
    std::optional<double> cost;         ///< MSM split/merge cost
    std::optional<double> nu;           ///< TWE stiffness
    std::optional<double> lambda;       ///< TWE deletion penalty

    friend bool operator==(const ParameterizedMeasure&, const ParameterizedMeasure&) = default;
  };

  /// MSM costs: 100 exponentially spaced values over [0.01, 100].
  const std::array<double, 100>& msm_cost_grid();
  /// TWE stiffness values.
  inline constexpr std::array<double, 10> twe_nu_grid{1e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1, 0.5, 1.0};
  /// TWE penalties: 10 evenly spaced values over [0, 0.1].
  const std::array<double, 10>& twe_lambda_grid();

  /// Measure with a uniformly drawn kind and parameters drawn for that kind.
  ParameterizedMeasure sample_measure(Rng& rng, const DatasetStats& stats);

  /// Parameters drawn for a fixed kind.
  ParameterizedMeasure sample_measure(Rng& rng, const DatasetStats& stats, MeasureKind kind);

  /** Keogh-Pazzani derivative estimate, same length as the input.
   *  Throws Error("series too short for derivative") below 3 points. */
  std::vector<double> derivative(std::span<const double> values);
  TimeSeries derivative(const TimeSeries& series);

  inline constexpr double no_cutoff = std::numeric_limits<double>::infinity();

  /** Distance between two equal-length series under `measure`.
   *  With a finite cutoff the computation may stop early and return +inf once the
   *  distance provably exceeds it; any distance <= cutoff is returned exactly.
   *  Throws Error("length mismatch") on unequal lengths. */
  double distance(const ParameterizedMeasure& measure, std::span<const double> a, std::span<const double> b,
                  double cutoff = no_cutoff);

  /// As distance(), but DDTW/WDDTW inputs are taken to be derivatives already.
  double distance_prepared(const ParameterizedMeasure& measure, std::span<const double> a, std::span<const double> b,
                           double cutoff = no_cutoff);

  /// Individual measures. Band radii >= length mean an unconstrained alignment.
  namespace measures {
    double squared_euclidean(std::span<const double> a, std::span<const double> b, double cutoff = no_cutoff);
    double dtw(std::span<const double> a, std::span<const double> b, std::size_t window, double cutoff = no_cutoff);
    double wdtw(std::span<const double> a, std::span<const double> b, double g, std::size_t window,
                double cutoff = no_cutoff);
    double lcss(std::span<const double> a, std::span<const double> b, double epsilon, std::size_t window);
    double erp(std::span<const double> a, std::span<const double> b, double gap_value, std::size_t window,
               double cutoff = no_cutoff);
    double msm(std::span<const double> a, std::span<const double> b, double cost, double cutoff = no_cutoff);
    double twe(std::span<const double> a, std::span<const double> b, double nu, double lambda,
               double cutoff = no_cutoff);

    /// WDTW weight for a warp amount of k cells on series of length `length`.
    double wdtw_weight(double g, std::size_t k, std::size_t length);
  }

} // namespace tschief
