#pragma once

// Seeded synthetic data: reflection traces, two-tone traces and peak lists.
// Every generator takes an explicit seed; there is no global RNG.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "jjchain/constants.hpp"
#include "jjchain/extraction/s11.hpp"
#include "jjchain/peaks.hpp"
#include "jjchain/spectrum.hpp"

namespace jjchain::synth {

/// Model trace on a uniform grid with Gaussian noise of `noise_sigma` added
/// independently to the real and imaginary parts.
inline std::vector<S11Point> s11_trace(const ResonanceParams& p, double f_lo, double f_hi,
                                       int points, double noise_sigma, std::uint64_t seed) {
  detail::require(points >= 2 && f_hi > f_lo, "invalid synthetic S11 grid");
  detail::require(noise_sigma >= 0.0, "noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<S11Point> out;
  out.reserve(points);
  for (int k = 0; k < points; ++k) {
    const double f = f_lo + (f_hi - f_lo) * k / (points - 1);
    Complex s = s11_model(p, constants::two_pi * f);
    if (noise_sigma > 0.0) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      s += noise_sigma * Complex(re, im);
    }
    out.push_back({f, s});
  }
  return out;
}

struct LorentzianLine {
  double center;  // Hz
  double fwhm;    // Hz
  double amplitude;
};

/// Sum of Lorentzian lines on a constant baseline plus Gaussian noise, in
/// linear units.
inline TwoToneTrace two_tone_trace(const std::vector<LorentzianLine>& lines, double f_lo,
                                   double f_hi, int points, double baseline, double noise_sigma,
                                   std::uint64_t seed) {
  detail::require(points >= 16 && f_hi > f_lo, "invalid synthetic two-tone grid");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> f(points);
  std::vector<double> y(points);
  for (int k = 0; k < points; ++k) {
    f[k] = f_lo + (f_hi - f_lo) * k / (points - 1);
    double v = baseline;
    for (const auto& l : lines) {
      const double x = 2.0 * (f[k] - l.center) / l.fwhm;
      v += l.amplitude / (1.0 + x * x);
    }
    y[k] = v + noise_sigma * gauss(rng);
  }
  return TwoToneTrace(std::move(f), std::move(y), ResponseUnit::linear);
}

/// Closed-form mode frequencies (Hz) for m = first ... last, each scaled by
/// (1 + rel_noise * g) with g standard normal, returned in increasing order.
inline PeakList mode_peaks(double omega_p, double omega_g, int big_n, int first, int last,
                           double rel_noise, std::uint64_t seed) {
  detail::require(first >= 1 && last >= first && last < big_n, "invalid mode range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PeakList out;
  for (int m = first; m <= last; ++m) {
    double w = mode_frequency(omega_p, omega_g, m, big_n);
    if (rel_noise > 0.0) w *= 1.0 + rel_noise * gauss(rng);
    out.peak_frequencies.push_back(w / constants::two_pi);
    out.prominences.push_back(1.0);
  }
  // Noise can swap neighbours; a peak list is always increasing.
  std::sort(out.peak_frequencies.begin(), out.peak_frequencies.end());
  return out;
}

}  // namespace jjchain::synth
