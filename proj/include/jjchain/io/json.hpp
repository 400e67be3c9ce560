#pragma once

// JSON records for results and the envelope wrapping every CLI payload.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

#include "jjchain/constants.hpp"
#include "jjchain/design.hpp"
#include "jjchain/extraction/dc.hpp"
#include "jjchain/extraction/dispersion_fit.hpp"
#include "jjchain/extraction/impedance.hpp"
#include "jjchain/extraction/s11.hpp"
#include "jjchain/geometry.hpp"
#include "jjchain/peaks.hpp"
#include "jjchain/spectrum.hpp"

namespace jjchain::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view schema_version = "jjchain.result/1";

/// 64-bit FNV-1a, hex encoded.
class Digest {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

/// Non-finite values become null.
inline Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const ChainParams& c) {
  return {{"n", c.n()}, {"N", c.big_n()}, {"l_j_h", c.l_j()}, {"c_j_f", c.c_j()}, {"c_g_f", c.c_g()}};
}

inline Json to_json(const DerivedScales& s) {
  return {{"omega_p_rad_s", s.omega_p}, {"omega_g_rad_s", s.omega_g}, {"z_c_ohm", s.z_c},
          {"l_tot_h", s.l_tot}, {"c_stray_f", s.c_stray}};
}

inline Json to_json(const PeakList& p) {
  Json peaks = Json::array();
  for (std::size_t k = 0; k < p.peak_frequencies.size(); ++k) {
    peaks.push_back({{"freq_hz", p.peak_frequencies[k]}, {"prominence", p.prominences[k]}});
  }
  Json out{{"count", p.peak_frequencies.size()}, {"peaks", peaks}};
  out["assigned_index_start"] = p.assigned_index_start ? Json(*p.assigned_index_start) : Json(nullptr);
  return out;
}

inline Json to_json(const DcFit& f) {
  return {{"slope_ohm_per_stack", f.slope},
          {"slope_stderr_ohm_per_stack", number(f.slope_stderr)},
          {"per_junction_resistance_ohm", f.per_junction_resistance},
          {"l_j_h", f.l_j},
          {"residual_rms_ohm", f.residual_rms}};
}

inline Json to_json(const DispersionFit& f) {
  Json missing = Json::array();
  for (std::size_t k = 0; k < f.predicted_missing_modes.size(); ++k) {
    missing.push_back({{"m", k + 1},
                       {"omega_rad_s", f.predicted_missing_modes[k]},
                       {"freq_hz", f.predicted_missing_modes[k] / constants::two_pi}});
  }
  Json candidates = Json::array();
  for (const auto& c : f.candidates) {
    candidates.push_back({{"offset", c.offset}, {"residual_rms", number(c.residual_rms)},
                          {"converged", c.converged}});
  }
  return {{"omega_p_rad_s", f.omega_p},
          {"omega_g_rad_s", f.omega_g},
          {"f_p_hz", f.omega_p / constants::two_pi},
          {"omega_p_stderr_rad_s", number(f.omega_p_stderr())},
          {"omega_g_stderr_rad_s", number(f.omega_g_stderr())},
          {"covariance", {{number(f.covariance(0, 0)), number(f.covariance(0, 1))},
                          {number(f.covariance(1, 0)), number(f.covariance(1, 1))}}},
          {"index_offset", f.index_offset},
          {"N", f.big_n},
          {"residual_rms", f.residual_rms},
          {"iterations", f.iterations},
          {"f_1_hz", f.model(1) / constants::two_pi},
          {"predicted_missing_modes", missing},
          {"offset_candidates", candidates}};
}

inline Json to_json(const ImpedanceEstimate& e) {
  return {{"route", to_string(e.route)}, {"z_c_ohm", e.z_c}, {"l_tot_h", e.l_tot},
          {"l_j_h", e.l_j}, {"c_g_f", e.c_g}, {"c_j_f", e.c_j}};
}

inline Json to_json(const ResonanceFit& f) {
  Json warnings = Json::array();
  for (const auto& w : f.warnings) warnings.push_back(w);
  return {{"omega_0_rad_s", f.omega_0},
          {"f_0_hz", f.omega_0 / constants::two_pi},
          {"kappa_c_rad_s", f.kappa_c},
          {"kappa_i_rad_s", f.kappa_i},
          {"phi_0_rad", f.phi_0},
          {"q_tot", f.q_tot},
          {"q_c", f.q_c},
          {"q_i", f.q_i ? Json(*f.q_i) : Json(nullptr)},
          {"q_i_lower_bound", f.q_i_lower_bound},
          {"fano_caveat", f.fano_caveat},
          {"residual_rms", f.residual_rms},
          {"circle_deviation", f.circle_deviation},
          {"noise_floor", f.noise_floor},
          {"iterations", f.iterations},
          {"warnings", warnings}};
}

inline Json to_json(const InhomogeneityReport& r) {
  Json layers = Json::array();
  for (std::size_t k = 0; k < r.layers.areas.size(); ++k) {
    layers.push_back({{"k", k}, {"area_m2", r.layers.areas[k]}, {"l_j_h", r.layers.inductances[k]}});
  }
  return {{"layers", layers}, {"total_l_h", r.total_l}, {"spread", r.spread}};
}

inline Json to_json(const DesignProposal& p) {
  const auto w1 = p.omega_1();
  return {{"n", p.n},
          {"N", p.big_n},
          {"l_j_h", p.l_j},
          {"c_j_f", p.c_j},
          {"c_g_f", p.c_g},
          {"achieved_z_c_ohm", p.achieved_z_c()},
          {"achieved_l_tot_h", p.achieved_l_tot()},
          {"omega_1_rad_s", w1 ? Json(*w1) : Json(nullptr)},
          {"f_1_hz", w1 ? Json(*w1 / constants::two_pi) : Json(nullptr)},
          {"max_linear_impedance_ohm", p.max_linear_impedance()},
          {"ej_over_ec", p.ej_over_ec()},
          {"strategy", to_string(p.strategy)}};
}

/// Envelope around a command payload. Only `payload` is required to be
/// byte-identical across re-runs; every field here is deterministic anyway.
inline Json envelope(std::string_view command, const std::string& inputs_digest,
                     Json parameters, Json payload) {
  return {{"schema_version", schema_version},
          {"command", command},
          {"inputs_digest", inputs_digest},
          {"parameters", std::move(parameters)},
          {"payload", std::move(payload)}};
}

}  // namespace jjchain::io
