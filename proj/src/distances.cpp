#include <tschief/distances.hpp>

#include <algorithm>
#include <cmath>

namespace tschief {

  namespace {
    constexpr double inf = std::numeric_limits<double>::infinity();

    inline double sq(double x) { return x * x; }

    inline double min3(double a, double b, double c) { return std::min(a, std::min(b, c)); }

    /** Banded DTW recurrence over cost(i, j), i indexing a and j indexing b (0-based).
     *  Cells outside |i - j| <= window are unreachable. */
    template<typename Cost>
    double banded_dtw(std::size_t n, std::size_t m, std::size_t window, double cutoff, Cost&& cost) {
      std::vector<double> prev(m + 1, inf);
      std::vector<double> curr(m + 1, inf);
      prev[0] = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        const std::size_t lo = i > window ? std::max<std::size_t>(1, i - window) : 1;
        const std::size_t hi = std::min(m, i + window);
        if (lo > hi) { return inf; }
        curr[lo - 1] = inf;
        double row_min = inf;
        for (std::size_t j = lo; j <= hi; ++j) {
          const double v = cost(i - 1, j - 1) + min3(prev[j - 1], prev[j], curr[j - 1]);
          curr[j] = v;
          row_min = std::min(row_min, v);
        }
        if (hi < m) { curr[hi + 1] = inf; }
        if (row_min > cutoff) { return inf; }
        std::swap(prev, curr);
      }
      return prev[m];
    }

    double required(const std::optional<double>& v, MeasureKind kind, const char* name) {
      if (!v) { throw Error(std::string(to_string(kind)) + " measure is missing parameter " + name); }
      return *v;
    }

    std::size_t required(const std::optional<std::size_t>& v, MeasureKind kind) {
      if (!v) { throw Error(std::string(to_string(kind)) + " measure is missing parameter window"); }
      return *v;
    }
  } // namespace

  std::string_view to_string(MeasureKind kind) {
    switch (kind) {
      case MeasureKind::Euclidean: return "euclidean";
      case MeasureKind::DtwFull: return "dtw_full";
      case MeasureKind::DtwWindow: return "dtw_window";
      case MeasureKind::DdtwFull: return "ddtw_full";
      case MeasureKind::DdtwWindow: return "ddtw_window";
      case MeasureKind::Wdtw: return "wdtw";
      case MeasureKind::Wddtw: return "wddtw";
      case MeasureKind::Lcss: return "lcss";
      case MeasureKind::Erp: return "erp";
      case MeasureKind::Msm: return "msm";
      case MeasureKind::Twe: return "twe";
    }
    return "unknown";
  }

  bool uses_derivative(MeasureKind kind) {
    return kind == MeasureKind::DdtwFull || kind == MeasureKind::DdtwWindow || kind == MeasureKind::Wddtw;
  }

  const std::array<double, 100>& msm_cost_grid() {
    static const std::array<double, 100> grid = [] {
      std::array<double, 100> g{};
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(i) / 99.0);
      }
      return g;
    }();
    return grid;
  }

  const std::array<double, 10>& twe_lambda_grid() {
    static const std::array<double, 10> grid = [] {
      std::array<double, 10> g{};
      for (std::size_t i = 0; i < g.size(); ++i) { g[i] = 0.1 * static_cast<double>(i) / 9.0; }
      return g;
    }();
    return grid;
  }

  ParameterizedMeasure sample_measure(Rng& rng, const DatasetStats& stats) {
    const auto kind = all_measure_kinds[uniform_index(rng, measure_kind_count)];
    return sample_measure(rng, stats, kind);
  }

  ParameterizedMeasure sample_measure(Rng& rng, const DatasetStats& stats, MeasureKind kind) {
    ParameterizedMeasure m;
    m.kind = kind;
    const std::size_t quarter = stats.length / 4;
    const double sigma = stats.stddev;
    switch (kind) {
      case MeasureKind::Euclidean: break;
      case MeasureKind::DtwFull:
      case MeasureKind::DdtwFull: m.window = stats.length; break;
      case MeasureKind::DtwWindow:
      case MeasureKind::DdtwWindow: m.window = uniform_between(rng, 0, quarter); break;
      case MeasureKind::Wdtw:
      case MeasureKind::Wddtw: m.g = uniform_real(rng, 0.0, 1.0); break;
      case MeasureKind::Lcss:
        m.epsilon = uniform_real(rng, sigma / 5.0, sigma);
        m.window = uniform_between(rng, 0, quarter);
        break;
      case MeasureKind::Erp:
        m.gap_value = uniform_real(rng, sigma / 5.0, sigma);
        m.window = uniform_between(rng, 0, quarter);
        break;
      case MeasureKind::Msm: m.cost = msm_cost_grid()[uniform_index(rng, msm_cost_grid().size())]; break;
      case MeasureKind::Twe:
        m.nu = twe_nu_grid[uniform_index(rng, twe_nu_grid.size())];
        m.lambda = twe_lambda_grid()[uniform_index(rng, twe_lambda_grid().size())];
        break;
    }
    return m;
  }

  std::vector<double> derivative(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 3) { throw Error("series too short for derivative"); }
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      d[i] = ((v[i] - v[i - 1]) + (v[i + 1] - v[i - 1]) / 2.0) / 2.0;
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    return d;
  }

  TimeSeries derivative(const TimeSeries& series) { return TimeSeries(derivative(series.values())); }

  namespace measures {

    double squared_euclidean(std::span<const double> a, std::span<const double> b, double cutoff) {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        sum += sq(a[i] - b[i]);
        if (sum > cutoff) { return inf; }
      }
      return sum;
    }

    double dtw(std::span<const double> a, std::span<const double> b, std::size_t window, double cutoff) {
      return banded_dtw(a.size(), b.size(), window, cutoff,
                        [&](std::size_t i, std::size_t j) { return sq(a[i] - b[j]); });
    }

    double wdtw_weight(double g, std::size_t k, std::size_t length) {
      return 1.0 / (1.0 + std::exp(-g * (static_cast<double>(k) - static_cast<double>(length) / 2.0)));
    }

    double wdtw(std::span<const double> a, std::span<const double> b, double g, std::size_t window, double cutoff) {
      const std::size_t len = std::max(a.size(), b.size());
      std::vector<double> weights(len);
      for (std::size_t k = 0; k < len; ++k) { weights[k] = wdtw_weight(g, k, len); }
      return banded_dtw(a.size(), b.size(), window, cutoff, [&](std::size_t i, std::size_t j) {
        const std::size_t k = i > j ? i - j : j - i;
        return weights[k] * sq(a[i] - b[j]);
      });
    }

    double lcss(std::span<const double> a, std::span<const double> b, double epsilon, std::size_t window) {
      const std::size_t n = a.size();
      const std::size_t m = b.size();
      std::vector<std::size_t> prev(m + 1, 0);
      std::vector<std::size_t> curr(m + 1, 0);
      for (std::size_t i = 1; i <= n; ++i) {
        std::fill(curr.begin(), curr.end(), 0);
        const std::size_t lo = i > window ? std::max<std::size_t>(1, i - window) : 1;
        const std::size_t hi = std::min(m, i + window);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (std::abs(a[i - 1] - b[j - 1]) <= epsilon) {
            curr[j] = prev[j - 1] + 1;
          } else {
            curr[j] = std::max(prev[j], curr[j - 1]);
          }
        }
        std::swap(prev, curr);
      }
      const std::size_t best = *std::max_element(prev.begin(), prev.end());
      return 1.0 - static_cast<double>(best) / static_cast<double>(std::min(n, m));
    }

    double erp(std::span<const double> a, std::span<const double> b, double gap_value, std::size_t window,
               double cutoff) {
      const std::size_t n = a.size();
      const std::size_t m = b.size();
      std::vector<double> prev(m + 1, inf);
      std::vector<double> curr(m + 1, inf);
      prev[0] = 0.0;
      for (std::size_t j = 1; j <= std::min(m, window); ++j) { prev[j] = prev[j - 1] + sq(b[j - 1] - gap_value); }
      for (std::size_t i = 1; i <= n; ++i) {
        std::fill(curr.begin(), curr.end(), inf);
        if (i <= window) { curr[0] = prev[0] + sq(a[i - 1] - gap_value); }
        double row_min = curr[0];
        const std::size_t lo = i > window ? std::max<std::size_t>(1, i - window) : 1;
        const std::size_t hi = std::min(m, i + window);
        for (std::size_t j = lo; j <= hi; ++j) {
          const double match = prev[j - 1] + sq(a[i - 1] - b[j - 1]);
          const double gap_a = prev[j] + sq(a[i - 1] - gap_value);
          const double gap_b = curr[j - 1] + sq(b[j - 1] - gap_value);
          curr[j] = min3(match, gap_a, gap_b);
          row_min = std::min(row_min, curr[j]);
        }
        if (row_min > cutoff) { return inf; }
        std::swap(prev, curr);
      }
      return prev[m];
    }

    namespace {
      /// Split/merge cost of moving to `next` from `prev` when the other series sits at `other`.
      inline double msm_cost(double next, double prev, double other, double c) {
        if ((prev <= next && next <= other) || (prev >= next && next >= other)) { return c; }
        return c + std::min(std::abs(next - prev), std::abs(next - other));
      }
    }

    double msm(std::span<const double> a, std::span<const double> b, double c, double cutoff) {
      const std::size_t n = a.size();
      const std::size_t m = b.size();
      std::vector<double> prev(m);
      std::vector<double> curr(m);
      prev[0] = std::abs(a[0] - b[0]);
      for (std::size_t j = 1; j < m; ++j) { prev[j] = prev[j - 1] + msm_cost(b[j], a[0], b[j - 1], c); }
      if (*std::min_element(prev.begin(), prev.end()) > cutoff) { return inf; }
      for (std::size_t i = 1; i < n; ++i) {
        curr[0] = prev[0] + msm_cost(a[i], a[i - 1], b[0], c);
        double row_min = curr[0];
        for (std::size_t j = 1; j < m; ++j) {
          const double move = prev[j - 1] + std::abs(a[i] - b[j]);
          const double split_a = prev[j] + msm_cost(a[i], a[i - 1], b[j], c);
          const double split_b = curr[j - 1] + msm_cost(b[j], a[i], b[j - 1], c);
          curr[j] = min3(move, split_a, split_b);
          row_min = std::min(row_min, curr[j]);
        }
        if (row_min > cutoff) { return inf; }
        std::swap(prev, curr);
      }
      return prev[m - 1];
    }

    double twe(std::span<const double> a, std::span<const double> b, double nu, double lambda, double cutoff) {
      const std::size_t n = a.size();
      const std::size_t m = b.size();
      // 1-based views padded with a leading zero sample at time 0
      auto av = [&](std::size_t i) { return i == 0 ? 0.0 : a[i - 1]; };
      auto bv = [&](std::size_t j) { return j == 0 ? 0.0 : b[j - 1]; };
      const double delete_time = nu + lambda;
      std::vector<double> prev(m + 1, inf);
      std::vector<double> curr(m + 1, inf);
      prev[0] = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        curr[0] = inf;
        double row_min = inf;
        for (std::size_t j = 1; j <= m; ++j) {
          const double gap = static_cast<double>(i > j ? i - j : j - i);
          const double match = prev[j - 1] + std::abs(av(i) - bv(j)) + std::abs(av(i - 1) - bv(j - 1))
                               + 2.0 * nu * gap;
          const double del_a = prev[j] + std::abs(av(i) - av(i - 1)) + delete_time;
          const double del_b = curr[j - 1] + std::abs(bv(j) - bv(j - 1)) + delete_time;
          curr[j] = min3(match, del_a, del_b);
          row_min = std::min(row_min, curr[j]);
        }
        if (row_min > cutoff) { return inf; }
        std::swap(prev, curr);
      }
      return prev[m];
    }

  } // namespace measures

  double distance_prepared(const ParameterizedMeasure& m, std::span<const double> a, std::span<const double> b,
                           double cutoff) {
    if (a.size() != b.size()) { throw Error("length mismatch"); }
    const std::size_t len = a.size();
    switch (m.kind) {
      case MeasureKind::Euclidean: return measures::squared_euclidean(a, b, cutoff);
      case MeasureKind::DtwFull:
      case MeasureKind::DdtwFull: return measures::dtw(a, b, m.window.value_or(len), cutoff);
      case MeasureKind::DtwWindow:
      case MeasureKind::DdtwWindow: return measures::dtw(a, b, required(m.window, m.kind), cutoff);
      case MeasureKind::Wdtw:
      case MeasureKind::Wddtw:
        return measures::wdtw(a, b, required(m.g, m.kind, "g"), m.window.value_or(len), cutoff);
      case MeasureKind::Lcss:
        return measures::lcss(a, b, required(m.epsilon, m.kind, "epsilon"), required(m.window, m.kind));
      case MeasureKind::Erp:
        return measures::erp(a, b, required(m.gap_value, m.kind, "gap_value"), required(m.window, m.kind), cutoff);
      case MeasureKind::Msm: return measures::msm(a, b, required(m.cost, m.kind, "cost"), cutoff);
      case MeasureKind::Twe:
        return measures::twe(a, b, required(m.nu, m.kind, "nu"), required(m.lambda, m.kind, "lambda"), cutoff);
    }
    throw Error("unknown measure kind");
  }

  double distance(const ParameterizedMeasure& m, std::span<const double> a, std::span<const double> b, double cutoff) {
    if (a.size() != b.size()) { throw Error("length mismatch"); }
    if (uses_derivative(m.kind)) {
      const auto da = derivative(a);
      const auto db = derivative(b);
      return distance_prepared(m, da, db, cutoff);
    }
    return distance_prepared(m, a, b, cutoff);
  }

} // namespace tschief
