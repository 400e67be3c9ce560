#pragma once

// Resonance detection in two-tone spectroscopy traces.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "jjchain/error.hpp"

namespace jjchain {

enum class ResponseUnit { linear, db };

inline const char* to_string(ResponseUnit u) { return u == ResponseUnit::db ? "db" : "linear"; }

/// Probe response recorded while sweeping the pump frequency.
class TwoToneTrace {
 public:
  TwoToneTrace(std::vector<double> pump_frequency, std::vector<double> response, ResponseUnit unit)
      : pump_(std::move(pump_frequency)), response_(std::move(response)), unit_(unit) {
    detail::require(pump_.size() == response_.size(), "trace columns differ in length");
    detail::require(pump_.size() >= 16, "trace needs at least 16 samples");
    for (std::size_t i = 0; i < pump_.size(); ++i) {
      detail::require(std::isfinite(pump_[i]) && std::isfinite(response_[i]),
                      "trace contains non-finite values");
      if (i > 0) detail::require(pump_[i] > pump_[i - 1], "pump frequencies must strictly increase");
    }
  }

  const std::vector<double>& pump_frequency() const noexcept { return pump_; }
  const std::vector<double>& response() const noexcept { return response_; }
  ResponseUnit unit() const noexcept { return unit_; }

  /// Magnitude response; dB traces are read as 20 log10 |S11|.
  std::vector<double> linear_response() const {
    if (unit_ == ResponseUnit::linear) return response_;
    std::vector<double> out(response_.size());
    std::transform(response_.begin(), response_.end(), out.begin(),
                   [](double db) { return std::pow(10.0, db / 20.0); });
    return out;
  }

 private:
  std::vector<double> pump_;
  std::vector<double> response_;
  ResponseUnit unit_;
};

struct PeakList {
  std::vector<double> peak_frequencies;  // Hz, increasing
  std::vector<double> prominences;       // linear response units
  std::optional<int> assigned_index_start;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

inline double median_abs_deviation(const std::vector<double>& v) {
  const double med = median(v);
  std::vector<double> dev(v.size());
  std::transform(v.begin(), v.end(), dev.begin(), [med](double x) { return std::abs(x - med); });
  return median(dev);
}

// Local maxima (interior only). A flat top counts once, at its middle sample.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  std::size_t i = 1;
  while (i + 1 < y.size()) {
    if (y[i] > y[i - 1]) {
      std::size_t j = i;
      while (j + 1 < y.size() && y[j + 1] == y[i]) ++j;
      if (j + 1 < y.size() && y[j + 1] < y[i]) {
        out.push_back((i + j) / 2);
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

// Topographic prominence: height above the higher of the two lowest points
// reached on the way to a strictly higher sample (or the trace end).
inline double prominence(const std::vector<double>& y, std::size_t k) {
  const double h = y[k];
  double left_min = h;
  for (std::size_t i = k; i-- > 0;) {
    if (y[i] > h) break;
    left_min = std::min(left_min, y[i]);
  }
  double right_min = h;
  for (std::size_t i = k + 1; i < y.size(); ++i) {
    if (y[i] > h) break;
    right_min = std::min(right_min, y[i]);
  }
  return h - std::max(left_min, right_min);
}

// Vertex of the parabola through three (x, y) samples.
inline double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature < 0.0)) return x1;
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
  return std::clamp(vertex, x0, x2);
}

inline std::vector<double> differences(const std::vector<double>& y) {
  std::vector<double> d;
  d.reserve(y.size());
  for (std::size_t i = 1; i < y.size(); ++i) d.push_back(y[i] - y[i - 1]);
  return d;
}

}  // namespace detail

/// Robust noise scale: median absolute deviation of the first-differenced
/// linear response, converted to a Gaussian standard deviation of one sample.
inline double trace_noise_sigma(const TwoToneTrace& trace) {
  const double mad = detail::median_abs_deviation(detail::differences(trace.linear_response()));
  return 1.4826 * mad / std::sqrt(2.0);
}

/// Automatic prominence threshold. Never below 5 x MAD of the differenced
/// response; raised to the expected peak-to-trough range of pure Gaussian
/// noise over the trace length, 2 sigma sqrt(2 ln n).
inline double auto_prominence_threshold(const TwoToneTrace& trace) {
  const auto lin = trace.linear_response();
  const double mad = detail::median_abs_deviation(detail::differences(lin));
  const double sigma = 1.4826 * mad / std::sqrt(2.0);
  const double n = static_cast<double>(lin.size());
  return std::max(5.0 * mad, 2.0 * sigma * std::sqrt(2.0 * std::log(n)));
}

/// Twice the median frequency step.
inline double default_min_separation(const TwoToneTrace& trace) {
  return 2.0 * detail::median(detail::differences(trace.pump_frequency()));
}

/// Finds peaks whose prominence exceeds the threshold (auto when absent),
/// keeping the most prominent of any group closer than `min_separation`
/// (default: two median bins). Positions are refined by three-point
/// parabolic interpolation of the linear response.
inline PeakList detect_peaks(const TwoToneTrace& trace,
                             std::optional<double> prominence_threshold = std::nullopt,
                             std::optional<double> min_separation = std::nullopt) {
  const double threshold = prominence_threshold.value_or(auto_prominence_threshold(trace));
  const double separation = min_separation.value_or(default_min_separation(trace));
  detail::require(threshold > 0.0 || !prominence_threshold, "prominence threshold must be positive");
  detail::require(separation >= 0.0, "minimum separation must be >= 0");

  const auto& f = trace.pump_frequency();
  std::vector<double> y = trace.linear_response();
  const double baseline = detail::median(y);
  for (double& v : y) v -= baseline;

  struct Candidate {
    std::size_t index;
    double position;
    double prominence;
  };
  std::vector<Candidate> candidates;
  for (std::size_t k : detail::local_maxima(y)) {
    const double p = detail::prominence(y, k);
    if (!(p > threshold)) continue;
    const double pos =
        detail::parabola_vertex(f[k - 1], y[k - 1], f[k], y[k], f[k + 1], y[k + 1]);
    candidates.push_back({k, pos, p});
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.prominence > b.prominence;
  });
  std::vector<Candidate> kept;
  for (const Candidate& c : candidates) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return std::abs(k.position - c.position) < separation;
    });
    if (clear) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return a.position < b.position; });

  PeakList out;
  for (const Candidate& c : kept) {
    // Guarantee strictly increasing output even if two vertices coincide.
    if (!out.peak_frequencies.empty() && !(c.position > out.peak_frequencies.back())) continue;
    out.peak_frequencies.push_back(c.position);
    out.prominences.push_back(c.prominence);
  }
  return out;
}

}  // namespace jjchain
