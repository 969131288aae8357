#include <tschief/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tschief {

  namespace {

    // Prediction error variances at or below this are treated as exhausted.
    constexpr double min_error_variance = 1e-12;

    struct LevinsonResult {
      std::vector<double> partial;       // phi_kk, k = 1..L
      std::vector<double> coefficients;  // phi_{K,1..K} of the last order reached, zero padded to L
    };

    LevinsonResult durbin_levinson(std::span<const double> rho) {
      const std::size_t lags = rho.size();
      LevinsonResult out{std::vector<double>(lags, 0.0), std::vector<double>(lags, 0.0)};
      std::vector<double> phi;
      std::vector<double> next;
      phi.reserve(lags);
      double v = 1.0;
      for (std::size_t k = 1; k <= lags; ++k) {
        if (v <= min_error_variance) { break; }
        double num = rho[k - 1];
        for (std::size_t j = 1; j < k; ++j) { num -= phi[j - 1] * rho[k - j - 1]; }
        const double a = num / v;
        next.assign(k, 0.0);
        for (std::size_t j = 1; j < k; ++j) { next[j - 1] = phi[j - 1] - a * phi[k - j - 1]; }
        next[k - 1] = a;
        phi.swap(next);
        out.partial[k - 1] = a;
        v *= (1.0 - a * a);
      }
      std::copy(phi.begin(), phi.end(), out.coefficients.begin());
      return out;
    }

  } // namespace

  std::string_view to_string(TransformKind kind) {
    switch (kind) {
      case TransformKind::Acf: return "acf";
      case TransformKind::Pacf: return "pacf";
      case TransformKind::Ar: return "ar";
      case TransformKind::Ps: return "ps";
    }
    return "unknown";
  }

  Interval sample_interval(Rng& rng, std::size_t series_length) {
    if (series_length < min_interval_length) { throw Error("series shorter than m_min"); }
    Interval iv;
    iv.length = uniform_between(rng, min_interval_length, series_length);
    iv.start = uniform_between(rng, 0, series_length - iv.length);
    return iv;
  }

  std::size_t lag_cap(std::size_t m) { return std::min(m / 4, max_lag); }

  std::vector<double> acf(std::span<const double> x, std::size_t lags) {
    const std::size_t m = x.size();
    if (m < 2) { throw Error("ACF needs at least 2 values"); }
    if (lags >= m) { throw Error("ACF lag must be below the subseries length"); }
    double mean = 0.0;
    for (double v : x) { mean += v; }
    mean /= static_cast<double>(m);
    std::vector<double> centred(m);
    double denom = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      centred[i] = x[i] - mean;
      denom += centred[i] * centred[i];
    }
    std::vector<double> rho(lags, 0.0);
    if (denom / static_cast<double>(m) < 1e-16) { return rho; }
    for (std::size_t tau = 1; tau <= lags; ++tau) {
      double num = 0.0;
      for (std::size_t i = 0; i + tau < m; ++i) { num += centred[i] * centred[i + tau]; }
      rho[tau - 1] = num / denom;
    }
    return rho;
  }

  std::vector<double> pacf(std::span<const double> acf_values) {
    if (acf_values.empty()) { throw Error("PACF needs at least one autocorrelation"); }
    return durbin_levinson(acf_values).partial;
  }

  std::vector<double> ar_coefficients(std::span<const double> x, std::size_t order) {
    if (order >= x.size()) { throw Error("AR order must be below the subseries length"); }
    if (order == 0) { return {}; }
    const auto rho = acf(x, order);
    return durbin_levinson(rho).coefficients;
  }

  std::vector<double> power_spectrum(std::span<const double> x) {
    const std::size_t m = x.size();
    if (m < 2) { throw Error("power spectrum needs at least 2 values"); }
    std::vector<double> cos_table(m);
    std::vector<double> sin_table(m);
    for (std::size_t r = 0; r < m; ++r) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m);
      cos_table[r] = std::cos(angle);
      sin_table[r] = std::sin(angle);
    }
    std::vector<double> ps(m / 2);
    for (std::size_t k = 1; k <= m / 2; ++k) {
      double re = 0.0;
      double im = 0.0;
      std::size_t r = 0;
      for (std::size_t t = 0; t < m; ++t) {
        re += x[t] * cos_table[r];
        im -= x[t] * sin_table[r];
        r += k;
        if (r >= m) { r -= m; }
      }
      ps[k - 1] = re * re + im * im;
    }
    return ps;
  }

  std::size_t transformed_length(std::size_t m, TransformKind kind) {
    switch (kind) {
      case TransformKind::Acf:
      case TransformKind::Pacf: return std::min(lag_cap(m), m - 1);
      case TransformKind::Ar: return lag_cap(m);
      case TransformKind::Ps: return m / 2;
    }
    return 0;
  }

  std::vector<double> transform_interval(std::span<const double> series, const Interval& iv, TransformKind kind) {
    if (iv.length < min_interval_length || iv.start + iv.length > series.size()) {
      throw Error("interval [" + std::to_string(iv.start) + ", +" + std::to_string(iv.length)
                  + ") is not valid for a series of length " + std::to_string(series.size()));
    }
    const auto sub = series.subspan(iv.start, iv.length);
    const std::size_t lags = transformed_length(iv.length, kind);
    switch (kind) {
      case TransformKind::Acf: return acf(sub, lags);
      case TransformKind::Pacf: return pacf(acf(sub, lags));
      case TransformKind::Ar: return ar_coefficients(sub, lags);
      case TransformKind::Ps: return power_spectrum(sub);
    }
    throw Error("unknown transform kind");
  }

} // namespace tschief
