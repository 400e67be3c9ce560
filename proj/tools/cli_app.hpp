#pragma once

// Batch command-line front end. `run` is a plain function so tests can drive
// it in-process; main() only forwards argv.

#include <algorithm>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jjchain.hpp"
#include "jjchain/io/csv.hpp"
#include "jjchain/io/json.hpp"
#include "jjchain/io/svg.hpp"

namespace jjchain::cli {

using io::Json;

enum ExitCode { ok = 0, parse_or_io = 1, precondition = 2, non_convergence = 3 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Io:
      return parse_or_io;
    case ErrorKind::NonConvergence:
    case ErrorKind::NumericalFailure:
    case ErrorKind::AmbiguousOffset:
      return non_convergence;
    default:
      return precondition;
  }
}

struct Output {
  std::string path;  // empty: stdout
  std::string format = "json";
};

/// Result of one subcommand before serialization.
struct CommandResult {
  std::string command;
  Json parameters = Json::object();
  Json payload = Json::object();
  std::string csv;  // tabular form, used with --format csv
  std::vector<std::string> digest_inputs;
  std::optional<io::Plot> plot;
  std::string plot_path;
};

namespace detail {

inline std::string hz_to_ghz_label(double hz) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", hz / 1e9);
  return buf;
}

inline std::pair<int, int> parse_offset_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(s);
      return {v, v};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "offset must be an integer or a range a..b");
  }
}

inline void require_seed(double noise, const std::optional<std::uint64_t>& seed) {
  if (noise > 0.0 && !seed) {
    throw Error(ErrorKind::InvalidParameter, "--seed is required when noise is requested");
  }
}

inline Json error_record(const std::string& kind, const std::string& message, int code) {
  return {{"error", kind}, {"message", message}, {"exit_code", code}};
}

using jjchain::detail::require;

}  // namespace detail

// ---------------------------------------------------------------- spectrum --

struct SpectrumArgs {
  int n = 0;
  int big_n = 0;
  double l_j = 0.0;
  std::optional<double> c_j;
  std::optional<double> f_p;
  std::optional<double> c_g;
  std::optional<double> z_c;
  std::optional<int> modes;
  std::string plot;
};

inline CommandResult run_spectrum(const SpectrumArgs& a) {
  if (a.c_j.has_value() == a.f_p.has_value()) {
    throw Error(ErrorKind::InvalidParameter, "give exactly one of --cj or --fp");
  }
  if (a.c_g.has_value() == a.z_c.has_value()) {
    throw Error(ErrorKind::InvalidParameter, "give exactly one of --cg or --zc");
  }
  detail::require(a.l_j > 0.0, "--lj must be positive");
  const double c_j = a.c_j ? *a.c_j : 1.0 / (a.l_j * std::pow(constants::two_pi * *a.f_p, 2));
  const double c_g = a.c_g ? *a.c_g : a.n * a.l_j / (*a.z_c * *a.z_c);
  const ChainParams chain(a.n, a.big_n, JunctionParams(a.l_j, c_j), c_g);
  const DerivedScales s = derive_scales(chain);

  const ModeSpectrum closed = mode_frequencies(chain);
  const bool with_oracle = chain.big_n() <= 2000;
  std::optional<ModeSpectrum> oracle;
  if (with_oracle) oracle = oracle_modes(chain);

  const int shown = std::min(a.modes.value_or(chain.big_n() - 1), chain.big_n() - 1);
  detail::require(shown >= 1, "--modes must be >= 1");

  CommandResult r;
  r.command = "spectrum";
  r.parameters = {{"n", a.n}, {"N", a.big_n}, {"lj", a.l_j}, {"cj", c_j}, {"cg", c_g},
                  {"fp", a.f_p ? Json(*a.f_p) : Json(nullptr)},
                  {"zc", a.z_c ? Json(*a.z_c) : Json(nullptr)},
                  {"modes", shown}, {"oracle", with_oracle}};

  Json modes = Json::array();
  double max_dev = 0.0;
  r.csv = "m,theta_rad,freq_hz,oracle_freq_hz,oracle_rel_dev,linear_approx_hz\n";
  for (int m = 1; m <= shown; ++m) {
    const double w = closed.frequencies[m - 1];
    Json row{{"m", m}, {"theta_rad", closed.bloch_phases[m - 1]}, {"omega_rad_s", w},
             {"freq_hz", w / constants::two_pi}};
    std::string oracle_hz = "", dev_s = "";
    if (oracle) {
      const double wo = oracle->frequencies[m - 1];
      const double dev = std::abs(wo - w) / w;
      max_dev = std::max(max_dev, dev);
      row["oracle_freq_hz"] = wo / constants::two_pi;
      row["oracle_rel_dev"] = dev;
      oracle_hz = io::format_double(wo / constants::two_pi);
      dev_s = io::format_double(dev);
    } else {
      row["oracle_freq_hz"] = nullptr;
      row["oracle_rel_dev"] = nullptr;
    }
    const double lin = linear_dispersion_approx(chain, m) / constants::two_pi;
    row["linear_approx_hz"] = lin;
    modes.push_back(row);
    r.csv += std::to_string(m) + ',' + io::format_double(closed.bloch_phases[m - 1]) + ',' +
             io::format_double(w / constants::two_pi) + ',' + oracle_hz + ',' + dev_s + ',' +
             io::format_double(lin) + '\n';
  }
  if (oracle) {
    for (std::size_t k = shown; k < closed.frequencies.size(); ++k) {
      max_dev = std::max(max_dev, std::abs(oracle->frequencies[k] - closed.frequencies[k]) /
                                      closed.frequencies[k]);
    }
  }

  r.payload = {{"chain", io::to_json(chain)},
               {"scales", io::to_json(s)},
               {"band_edge_rad_s", band_edge(chain)},
               {"high_index_asymptote_rad_s", high_index_asymptote(chain)},
               {"max_linear_impedance_ohm", max_linear_impedance(chain)},
               {"max_oracle_rel_dev", oracle ? Json(max_dev) : Json(nullptr)},
               {"modes", modes}};

  if (!a.plot.empty()) {
    io::Series model{"closed form", {}, {}, io::Marker::line};
    io::Series orc{"oracle", {}, {}, io::Marker::dot, "#d62728"};
    for (int m = 1; m < chain.big_n(); ++m) {
      model.x.push_back(m);
      model.y.push_back(closed.frequencies[m - 1] / constants::two_pi / 1e9);
      if (oracle) {
        orc.x.push_back(m);
        orc.y.push_back(oracle->frequencies[m - 1] / constants::two_pi / 1e9);
      }
    }
    io::Plot p{"Chain mode spectrum", "mode index m", "frequency (GHz)", {model}};
    if (oracle) p.series.push_back(orc);
    r.plot = p;
    r.plot_path = a.plot;
  }
  return r;
}

// --------------------------------------------------------------- fit-modes --

struct FitModesArgs {
  std::string input;
  int big_n = 0;
  int n = 1;
  std::string offset = "0..5";
  std::optional<double> anchor_lj;
  std::optional<double> anchor_cg;
  std::optional<double> f_p_max;
  std::string plot;
};

inline CommandResult run_fit_modes(const FitModesArgs& a) {
  const std::string text = io::read_file(a.input);
  PeakList peaks = io::parse_peaks_csv(text);
  const auto [lo, hi] = detail::parse_offset_range(a.offset);
  DispersionFitOptions opt;
  opt.offset_min = lo;
  opt.offset_max = hi;
  if (a.f_p_max) opt.omega_p_max = constants::two_pi * *a.f_p_max;

  CommandResult r;
  r.command = "fit-modes";
  r.digest_inputs.push_back(text);
  r.parameters = {{"input", a.input}, {"N", a.big_n}, {"n", a.n},
                  {"offset_min", lo}, {"offset_max", hi},
                  {"anchor_lj", a.anchor_lj ? Json(*a.anchor_lj) : Json(nullptr)},
                  {"anchor_cg", a.anchor_cg ? Json(*a.anchor_cg) : Json(nullptr)},
                  {"fp_max", a.f_p_max ? Json(*a.f_p_max) : Json(nullptr)},
                  {"max_iterations", opt.solver.max_iterations},
                  {"step_tolerance", opt.solver.step_tolerance}};

  const DispersionFit fit = fit_dispersion(peaks, a.big_n, opt);
  peaks.assigned_index_start = fit.index_offset + 1;

  Json impedance = Json::array();
  std::optional<double> z_l, z_c;
  if (a.anchor_lj) {
    const auto e = impedance_from_fit(fit, a.n, a.big_n, InductanceAnchor{*a.anchor_lj});
    z_l = e.z_c;
    impedance.push_back(io::to_json(e));
  }
  if (a.anchor_cg) {
    const auto e = impedance_from_fit(fit, a.n, a.big_n, CapacitanceAnchor{*a.anchor_cg});
    z_c = e.z_c;
    impedance.push_back(io::to_json(e));
  }
  r.payload = {{"dispersion", io::to_json(fit)},
               {"assigned_index_start", *peaks.assigned_index_start},
               {"impedance", impedance}};
  r.payload["route_consistency_rel_delta"] =
      (z_l && z_c) ? Json((*z_l - *z_c) / *z_c) : Json(nullptr);

  r.csv = "m,observed_freq_hz,model_freq_hz,rel_residual\n";
  for (int m = 1; m <= fit.index_offset; ++m) {
    r.csv += std::to_string(m) + ",," + io::format_double(fit.model(m) / constants::two_pi) + ",\n";
  }
  for (std::size_t k = 0; k < peaks.peak_frequencies.size(); ++k) {
    const int m = fit.index_offset + static_cast<int>(k) + 1;
    const double model = fit.model(m) / constants::two_pi;
    const double obs = peaks.peak_frequencies[k];
    r.csv += std::to_string(m) + ',' + io::format_double(obs) + ',' + io::format_double(model) +
             ',' + io::format_double((model - obs) / obs) + '\n';
  }

  if (!a.plot.empty()) {
    io::Series data{"peaks", {}, {}, io::Marker::dot, "#1f77b4"};
    io::Series missing{"inferred missing modes", {}, {}, io::Marker::hollow_star, "#ff7f0e"};
    io::Series model{"fit", {}, {}, io::Marker::line, "#2ca02c"};
    for (std::size_t k = 0; k < peaks.peak_frequencies.size(); ++k) {
      data.x.push_back(peaks.peak_frequencies[k] / 1e9);
      data.y.push_back(fit.index_offset + static_cast<double>(k) + 1);
    }
    for (int m = 1; m <= fit.index_offset; ++m) {
      missing.x.push_back(fit.model(m) / constants::two_pi / 1e9);
      missing.y.push_back(m);
    }
    const int top = std::min(a.big_n - 1, fit.index_offset + static_cast<int>(peaks.peak_frequencies.size()) + 5);
    for (int m = 1; m <= top; ++m) {
      model.x.push_back(fit.model(m) / constants::two_pi / 1e9);
      model.y.push_back(m);
    }
    r.plot = io::Plot{"Dispersion fit", "frequency (GHz)", "mode index m", {model, data, missing}};
    r.plot_path = a.plot;
  }
  return r;
}

// ----------------------------------------------------------------- fit-s11 --

struct FitS11Args {
  std::string input;
  std::string device = "device";
  std::optional<int> mode;
  std::optional<double> f0_init;
  std::string plot;
};

inline CommandResult run_fit_s11(const FitS11Args& a) {
  const std::string text = io::read_file(a.input);
  const auto trace = io::parse_s11_csv(text);
  ResonanceInit init;
  if (a.f0_init) init.omega_0 = constants::two_pi * *a.f0_init;
  const ResonanceFit fit = fit_s11(trace, init);
  const QFactors q = q_factors(fit);

  CommandResult r;
  r.command = "fit-s11";
  r.digest_inputs.push_back(text);
  const LmOptions lm;
  r.parameters = {{"input", a.input}, {"device", a.device},
                  {"mode", a.mode ? Json(*a.mode) : Json(nullptr)},
                  {"f0_init", a.f0_init ? Json(*a.f0_init) : Json(nullptr)},
                  {"max_iterations", lm.max_iterations}, {"step_tolerance", lm.step_tolerance},
                  {"fano_phi_threshold_rad", 0.1}, {"fano_circle_noise_multiple", 5.0}};
  Json row{{"device", a.device}, {"mode", a.mode ? Json(*a.mode) : Json(nullptr)},
           {"freq_ghz", fit.omega_0 / constants::two_pi / 1e9}, {"q_tot", q.q_tot},
           {"q_c", q.q_c}, {"q_i_lower_bound", q.q_i_lower_bound},
           {"q_c_q_i_reliable", q.individually_reliable}};
  r.payload = {{"resonance", io::to_json(fit)}, {"q_table", Json::array({row})}};
  r.csv = "device,mode,freq_ghz,q_tot,q_c,q_i_lower_bound,fano_caveat\n" + a.device + ',' +
          (a.mode ? std::to_string(*a.mode) : std::string()) + ',' +
          io::format_double(fit.omega_0 / constants::two_pi / 1e9) + ',' +
          io::format_double(q.q_tot) + ',' + io::format_double(q.q_c) + ',' +
          io::format_double(q.q_i_lower_bound) + ',' + (fit.fano_caveat ? "true" : "false") + '\n';

  if (!a.plot.empty()) {
    io::Series data{"data", {}, {}, io::Marker::dot, "#1f77b4"};
    io::Series model{"fit", {}, {}, io::Marker::line, "#d62728"};
    for (const auto& p : trace) {
      data.x.push_back(p.s11.real());
      data.y.push_back(p.s11.imag());
    }
    const double f_lo = trace.front().frequency, f_hi = trace.back().frequency;
    for (int k = 0; k <= 400; ++k) {
      const double f = f_lo + (f_hi - f_lo) * k / 400.0;
      const Complex s = s11_model(fit.params(), constants::two_pi * f);
      model.x.push_back(s.real());
      model.y.push_back(s.imag());
    }
    io::Plot p{"S11 in the complex plane", "Re S11", "Im S11", {data, model}};
    p.equal_aspect = true;
    r.plot = p;
    r.plot_path = a.plot;
  }
  return r;
}

// ------------------------------------------------------------------ dc-fit --

struct DcFitArgs {
  std::string input;
  int jcts_per_stack = 0;
  double delta_ev = 180e-6;
  double ab_factor = SuperconductorGap::default_correction;
  std::string plot;
};

inline CommandResult run_dc_fit(const DcFitArgs& a) {
  const std::string text = io::read_file(a.input);
  const auto points = io::parse_resistance_csv(text);
  const SuperconductorGap gap{a.delta_ev * constants::electron_volt, a.ab_factor};
  const DcFit fit = dc_linear_fit(points, a.jcts_per_stack, gap);

  CommandResult r;
  r.command = "dc-fit";
  r.digest_inputs.push_back(text);
  r.parameters = {{"input", a.input}, {"jcts_per_stack", a.jcts_per_stack},
                  {"delta_ev", a.delta_ev}, {"ab_factor", a.ab_factor}};
  r.payload = {{"dc_fit", io::to_json(fit)}, {"points", points.size()}};
  r.csv = "slope_ohm_per_stack,slope_stderr_ohm_per_stack,per_junction_resistance_ohm,l_j_h\n" +
          io::format_double(fit.slope) + ',' + io::format_double(fit.slope_stderr) + ',' +
          io::format_double(fit.per_junction_resistance) + ',' + io::format_double(fit.l_j) + '\n';

  if (!a.plot.empty()) {
    io::Series data{"measured", {}, {}, io::Marker::dot};
    io::Series line{"fit through origin", {0.0}, {0.0}, io::Marker::line, "#d62728"};
    int top = 0;
    for (const auto& p : points) {
      data.x.push_back(p.stack_count);
      data.y.push_back(p.resistance / 1e3);
      top = std::max(top, p.stack_count);
    }
    line.x.push_back(top);
    line.y.push_back(fit.slope * top / 1e3);
    r.plot = io::Plot{"Room-temperature resistance", "number of stacks", "R (kOhm)", {data, line}};
    r.plot_path = a.plot;
  }
  return r;
}

// ------------------------------------------------------------------- peaks --

struct PeaksArgs {
  std::string input;
  std::string prominence = "auto";
  std::optional<double> min_sep;
  std::string plot;
};

inline CommandResult run_peaks(const PeaksArgs& a) {
  const std::string text = io::read_file(a.input);
  const TwoToneTrace trace = io::parse_two_tone_csv(text);
  std::optional<double> threshold;
  if (a.prominence != "auto") {
    try {
      std::size_t used = 0;
      threshold = std::stod(a.prominence, &used);
      if (used != a.prominence.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "--prominence must be 'auto' or a number");
    }
    detail::require(*threshold > 0.0, "--prominence must be positive");
  }
  const double eff_threshold = threshold.value_or(auto_prominence_threshold(trace));
  const double eff_sep = a.min_sep.value_or(default_min_separation(trace));
  const PeakList peaks = detect_peaks(trace, eff_threshold, eff_sep);

  CommandResult r;
  r.command = "peaks";
  r.digest_inputs.push_back(text);
  r.parameters = {{"input", a.input}, {"prominence_mode", threshold ? "explicit" : "auto"},
                  {"prominence", eff_threshold}, {"min_sep_hz", eff_sep},
                  {"unit", to_string(trace.unit())}};
  r.payload = io::to_json(peaks);
  r.csv = io::write_peaks_csv(peaks);

  if (!a.plot.empty()) {
    io::Series resp{"response", {}, {}, io::Marker::line};
    const auto lin = trace.linear_response();
    for (std::size_t k = 0; k < lin.size(); ++k) {
      resp.x.push_back(trace.pump_frequency()[k] / 1e9);
      resp.y.push_back(lin[k]);
    }
    io::Series marks{"peaks", {}, {}, io::Marker::dot, "#d62728"};
    for (double f : peaks.peak_frequencies) {
      const auto it = std::lower_bound(trace.pump_frequency().begin(), trace.pump_frequency().end(), f);
      const auto idx = static_cast<std::size_t>(it - trace.pump_frequency().begin());
      marks.x.push_back(f / 1e9);
      marks.y.push_back(lin[std::min(idx, lin.size() - 1)]);
    }
    r.plot = io::Plot{"Two-tone peaks", "pump frequency (GHz)", "|S11| (linear)", {resp, marks}};
    r.plot_path = a.plot;
  }
  return r;
}

// ---------------------------------------------------------------- geometry --

struct GeometryArgs {
  double side = 0.0;
  double pitch = 0.0;
  int layers = 0;
  double angle_deg = 12.8;
  double l_const_nh_um2 = 4.0;
};

inline CommandResult run_geometry(const GeometryArgs& a) {
  const double angle = a.angle_deg * std::numbers::pi / 180.0;
  const double l_const = a.l_const_nh_um2 * 1e-9 * 1e-12;
  const PyramidStack stack(a.side, a.pitch, a.layers, angle);
  const InhomogeneityReport rep = inhomogeneity_report(stack, l_const);
  const double top_height = (a.layers - 1) * a.pitch;

  CommandResult r;
  r.command = "geometry";
  r.parameters = {{"side_m", a.side}, {"pitch_m", a.pitch}, {"layers", a.layers},
                  {"angle_deg", a.angle_deg}, {"angle_rad", angle},
                  {"l_const_nh_um2", a.l_const_nh_um2}, {"top_layer_height_m", top_height}};
  r.payload = io::to_json(rep);
  r.payload["base_to_top_area_reduction_m2"] = area_reduction(a.side, top_height, angle);
  r.payload["base_l_j_h"] = rep.layers.inductances.front();
  r.csv = "k,height_m,area_m2,l_j_h\n";
  for (std::size_t k = 0; k < rep.layers.areas.size(); ++k) {
    r.csv += std::to_string(k) + ',' + io::format_double(k * a.pitch) + ',' +
             io::format_double(rep.layers.areas[k]) + ',' +
             io::format_double(rep.layers.inductances[k]) + '\n';
  }
  return r;
}

// ------------------------------------------------------------------ design --

struct DesignArgs {
  double target_zc = 0.0;
  double target_ltot = 0.0;
  std::optional<double> anchor_lj;
  std::optional<double> anchor_cg;
  int n_min = 1, n_max = 500, big_n_min = 2, big_n_max = 100000;
  std::optional<double> lj_min, lj_max, cg_min, cg_max;
  std::optional<double> c_j;
  double f_p = 15e9;
  double tolerance = 0.10;
  int top = 10;
};

inline CommandResult run_design(const DesignArgs& a) {
  if (a.anchor_lj.has_value() == a.anchor_cg.has_value()) {
    throw Error(ErrorKind::MissingAnchor, "give exactly one of --anchor-lj or --anchor-cg");
  }
  detail::require(a.top >= 1, "--top must be >= 1");
  DesignTarget t{a.target_zc, a.target_ltot};
  t.constraints.n = {a.n_min, a.n_max};
  t.constraints.big_n = {a.big_n_min, a.big_n_max};
  auto range = [](std::optional<double> lo, std::optional<double> hi) -> std::optional<RealRange> {
    if (!lo && !hi) return std::nullopt;
    return RealRange{lo.value_or(0.0 + std::numeric_limits<double>::min()),
                     hi.value_or(std::numeric_limits<double>::max())};
  };
  t.constraints.l_j = range(a.lj_min, a.lj_max);
  t.constraints.c_g = range(a.cg_min, a.cg_max);
  t.c_j = a.c_j;
  t.omega_p = constants::two_pi * a.f_p;
  t.tolerance = a.tolerance;
  const ImpedanceAnchor anchor = a.anchor_lj ? ImpedanceAnchor{InductanceAnchor{*a.anchor_lj}}
                                             : ImpedanceAnchor{CapacitanceAnchor{*a.anchor_cg}};
  const auto proposals = solve_design(t, anchor);

  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  CommandResult r;
  r.command = "design";
  r.parameters = {{"target_zc", a.target_zc}, {"target_ltot", a.target_ltot},
                  {"anchor_lj", opt(a.anchor_lj)}, {"anchor_cg", opt(a.anchor_cg)},
                  {"n_min", a.n_min}, {"n_max", a.n_max}, {"N_min", a.big_n_min},
                  {"N_max", a.big_n_max}, {"lj_min", opt(a.lj_min)}, {"lj_max", opt(a.lj_max)},
                  {"cg_min", opt(a.cg_min)}, {"cg_max", opt(a.cg_max)}, {"cj", opt(a.c_j)},
                  {"fp", a.f_p}, {"tolerance", a.tolerance}, {"top", a.top}};
  Json list = Json::array();
  r.csv = "rank,n,N,l_j_h,c_j_f,c_g_f,z_c_ohm,l_tot_h,f_1_hz,max_linear_impedance_ohm,ej_over_ec,strategy\n";
  const std::size_t shown = std::min<std::size_t>(a.top, proposals.size());
  for (std::size_t k = 0; k < shown; ++k) {
    const auto& p = proposals[k];
    Json j = io::to_json(p);
    j["rank"] = k + 1;
    list.push_back(j);
    const auto w1 = p.omega_1();
    r.csv += std::to_string(k + 1) + ',' + std::to_string(p.n) + ',' + std::to_string(p.big_n) +
             ',' + io::format_double(p.l_j) + ',' + io::format_double(p.c_j) + ',' +
             io::format_double(p.c_g) + ',' + io::format_double(p.achieved_z_c()) + ',' +
             io::format_double(p.achieved_l_tot()) + ',' +
             (w1 ? io::format_double(*w1 / constants::two_pi) : std::string()) + ',' +
             io::format_double(p.max_linear_impedance()) + ',' + io::format_double(p.ej_over_ec()) +
             ',' + to_string(p.strategy) + '\n';
  }
  r.payload = {{"feasible_count", proposals.size()}, {"proposals", list}};
  return r;
}

// ------------------------------------------------------------------- synth --

struct SynthS11Args {
  double f0 = 0.0, q_c = 0.0, q_i = 0.0, phi0 = 0.0;
  int points = 401;
  double span_linewidths = 10.0;
  double noise = 0.0;
};

struct SynthTwoToneArgs {
  int n = 0, big_n = 0;
  double l_j = 0.0, c_j = 0.0, c_g = 0.0;
  double f_lo = 0.0, f_hi = 0.0;
  int points = 4001;
  double fwhm = 0.0, amplitude = 1.0, baseline = 0.1;
  double noise = 0.0;
};

struct SynthPeaksArgs {
  double f_p = 0.0, f_1 = 0.0;
  int big_n = 0, first = 1, last = 0;
  double noise = 0.0;
};

// --------------------------------------------------------------- dispatch --

inline void emit(const CommandResult& r, const Output& o, std::ostream& out, std::ostream& err) {
  io::Digest digest;
  for (const auto& in : r.digest_inputs) digest.update(in);
  digest.update(r.parameters.dump());
  std::string text;
  if (o.format == "csv") {
    text = r.csv;
  } else {
    text = io::envelope(r.command, digest.hex(), r.parameters, r.payload).dump(2) + "\n";
  }
  if (o.path.empty()) {
    out << text;
  } else {
    io::write_file(o.path, text);
  }
  if (r.plot) {
    try {
      io::write_file(r.plot_path, io::render_svg(*r.plot));
    } catch (const std::exception& e) {
      err << Json{{"warning", "plot"}, {"message", e.what()}}.dump() << "\n";
    }
  }
}

/// Runs one CLI invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Josephson-junction stack chain modelling and parameter extraction", "jjchain"};
  app.require_subcommand(1);
  Output output;
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* sub, bool formats = true) {
    sub->add_option("-o,--output", output.path, "output file (default: stdout)");
    if (formats) {
      sub->add_option("--format", output.format, "json or csv")
          ->check(CLI::IsMember({"json", "csv"}))
          ->capture_default_str();
    }
  };

  SpectrumArgs spec;
  auto* s_spec = app.add_subcommand("spectrum", "closed-form mode table with oracle deviation");
  s_spec->add_option("--n", spec.n, "junctions per stack")->required();
  s_spec->add_option("--N", spec.big_n, "number of stacks")->required();
  s_spec->add_option("--lj", spec.l_j, "junction inductance (H)")->required();
  auto* cj = s_spec->add_option("--cj", spec.c_j, "junction capacitance (F)");
  auto* fp = s_spec->add_option("--fp", spec.f_p, "plasma frequency (Hz), sets C_J");
  cj->excludes(fp);
  auto* cg = s_spec->add_option("--cg", spec.c_g, "ground capacitance per stack (F)");
  auto* zc = s_spec->add_option("--zc", spec.z_c, "characteristic impedance (Ohm), sets C_g");
  cg->excludes(zc);
  s_spec->add_option("--modes", spec.modes, "number of modes to list");
  s_spec->add_option("--plot", spec.plot, "SVG output path");
  common(s_spec);

  FitModesArgs fm;
  auto* s_fm = app.add_subcommand("fit-modes", "fit the chain dispersion to a peak list");
  s_fm->add_option("peaks", fm.input, "peaks CSV")->required();
  s_fm->add_option("--N", fm.big_n, "number of stacks")->required();
  s_fm->add_option("--n", fm.n, "junctions per stack (impedance routes)")->capture_default_str();
  s_fm->add_option("--offset", fm.offset, "index offset or range a..b")->capture_default_str();
  s_fm->add_option("--anchor-lj", fm.anchor_lj, "known junction inductance (H)");
  s_fm->add_option("--anchor-cg", fm.anchor_cg, "known ground capacitance (F)");
  s_fm->add_option("--fp-max", fm.f_p_max, "upper bound on the plasma frequency (Hz)");
  s_fm->add_option("--plot", fm.plot, "SVG output path");
  common(s_fm);

  FitS11Args fs;
  auto* s_fs = app.add_subcommand("fit-s11", "fit a complex reflection resonance");
  s_fs->add_option("trace", fs.input, "S11 CSV")->required();
  s_fs->add_option("--device", fs.device, "device label for the Q table")->capture_default_str();
  s_fs->add_option("--mode", fs.mode, "mode number for the Q table");
  s_fs->add_option("--f0-init", fs.f0_init, "initial resonance frequency (Hz)");
  s_fs->add_option("--plot", fs.plot, "SVG output path");
  common(s_fs);

  DcFitArgs dc;
  auto* s_dc = app.add_subcommand("dc-fit", "resistance vs stack count through the origin");
  s_dc->add_option("resistances", dc.input, "resistance CSV")->required();
  s_dc->add_option("--jcts-per-stack", dc.jcts_per_stack, "junctions per stack")->required();
  s_dc->add_option("--delta-ev", dc.delta_ev, "superconducting gap (eV)")->capture_default_str();
  s_dc->add_option("--ab-factor", dc.ab_factor, "empirical gap correction")->capture_default_str();
  s_dc->add_option("--plot", dc.plot, "SVG output path");
  common(s_dc);

  PeaksArgs pk;
  auto* s_pk = app.add_subcommand("peaks", "detect resonance peaks in a two-tone trace");
  s_pk->add_option("two_tone", pk.input, "two-tone CSV")->required();
  s_pk->add_option("--prominence", pk.prominence, "auto or a threshold")->capture_default_str();
  s_pk->add_option("--min-sep", pk.min_sep, "minimum peak separation (Hz)");
  s_pk->add_option("--plot", pk.plot, "SVG output path");
  common(s_pk);

  GeometryArgs geo;
  auto* s_geo = app.add_subcommand("geometry", "per-layer areas of a clogged pyramid stack");
  s_geo->add_option("--side", geo.side, "aperture side (m)")->required();
  s_geo->add_option("--pitch", geo.pitch, "vertical junction spacing (m)")->required();
  s_geo->add_option("--layers", geo.layers, "number of junctions")->required();
  s_geo->add_option("--angle", geo.angle_deg, "clog angle (degrees)")->capture_default_str();
  s_geo->add_option("--l-const", geo.l_const_nh_um2, "L_J x area (nH um^2)")->capture_default_str();
  common(s_geo);

  DesignArgs des;
  auto* s_des = app.add_subcommand("design", "rank (n, N) chains for target Z_c and L_tot");
  s_des->add_option("--target-zc", des.target_zc, "target impedance (Ohm)")->required();
  s_des->add_option("--target-ltot", des.target_ltot, "target total inductance (H)")->required();
  auto* alj = s_des->add_option("--anchor-lj", des.anchor_lj, "fixed junction inductance (H)");
  auto* acg = s_des->add_option("--anchor-cg", des.anchor_cg, "fixed ground capacitance (F)");
  alj->excludes(acg);
  s_des->add_option("--n-min", des.n_min)->capture_default_str();
  s_des->add_option("--n-max", des.n_max)->capture_default_str();
  s_des->add_option("--N-min", des.big_n_min)->capture_default_str();
  s_des->add_option("--N-max", des.big_n_max)->capture_default_str();
  s_des->add_option("--lj-min", des.lj_min);
  s_des->add_option("--lj-max", des.lj_max);
  s_des->add_option("--cg-min", des.cg_min);
  s_des->add_option("--cg-max", des.cg_max);
  s_des->add_option("--cj", des.c_j, "junction capacitance (F); default from --fp");
  s_des->add_option("--fp", des.f_p, "plasma frequency (Hz)")->capture_default_str();
  s_des->add_option("--tolerance", des.tolerance, "relative tolerance on both targets")->capture_default_str();
  s_des->add_option("--top", des.top, "number of proposals to list")->capture_default_str();
  common(s_des);

  auto* s_syn = app.add_subcommand("synth", "write seeded synthetic input files");
  s_syn->require_subcommand(1);
  SynthS11Args ss;
  auto* s_ss = s_syn->add_subcommand("s11", "reflection trace of one resonance");
  s_ss->add_option("--f0", ss.f0, "resonance frequency (Hz)")->required();
  s_ss->add_option("--q-c", ss.q_c, "coupling quality factor")->required();
  s_ss->add_option("--q-i", ss.q_i, "internal quality factor")->required();
  s_ss->add_option("--phi0", ss.phi0, "mismatch angle (rad)")->capture_default_str();
  s_ss->add_option("--points", ss.points)->capture_default_str();
  s_ss->add_option("--span-linewidths", ss.span_linewidths)->capture_default_str();
  s_ss->add_option("--noise", ss.noise, "per-component noise sigma")->capture_default_str();
  s_ss->add_option("--seed", seed, "RNG seed");
  common(s_ss, false);
  SynthTwoToneArgs st;
  auto* s_st = s_syn->add_subcommand("two-tone", "Lorentzian peaks at the chain modes");
  s_st->add_option("--n", st.n)->required();
  s_st->add_option("--N", st.big_n)->required();
  s_st->add_option("--lj", st.l_j)->required();
  s_st->add_option("--cj", st.c_j)->required();
  s_st->add_option("--cg", st.c_g)->required();
  s_st->add_option("--f-lo", st.f_lo, "sweep start (Hz)")->required();
  s_st->add_option("--f-hi", st.f_hi, "sweep stop (Hz)")->required();
  s_st->add_option("--points", st.points)->capture_default_str();
  s_st->add_option("--fwhm", st.fwhm, "peak width (Hz)")->required();
  s_st->add_option("--amplitude", st.amplitude)->capture_default_str();
  s_st->add_option("--baseline", st.baseline)->capture_default_str();
  s_st->add_option("--noise", st.noise, "noise sigma (linear units)")->capture_default_str();
  s_st->add_option("--seed", seed, "RNG seed");
  common(s_st, false);
  SynthPeaksArgs sp;
  auto* s_sp = s_syn->add_subcommand("peaks", "closed-form mode frequencies as a peak list");
  s_sp->add_option("--fp", sp.f_p, "plasma frequency (Hz)")->required();
  s_sp->add_option("--f1", sp.f_1, "first mode frequency (Hz)")->required();
  s_sp->add_option("--N", sp.big_n)->required();
  s_sp->add_option("--first", sp.first, "first listed mode")->capture_default_str();
  s_sp->add_option("--last", sp.last, "last listed mode")->required();
  s_sp->add_option("--noise", sp.noise, "relative frequency noise")->capture_default_str();
  s_sp->add_option("--seed", seed, "RNG seed");
  common(s_sp, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << detail::error_record("Parse", e.what(), parse_or_io).dump() << "\n";
    return parse_or_io;
  }

  try {
    if (s_syn->parsed()) {
      std::string text;
      if (s_ss->parsed()) {
        detail::require_seed(ss.noise, seed);
        detail::require(ss.f0 > 0.0 && ss.q_c > 0.0 && ss.q_i > 0.0, "f0, q-c, q-i must be positive");
        const double w0 = constants::two_pi * ss.f0;
        const ResonanceParams p{w0, w0 / ss.q_c, w0 / ss.q_i, ss.phi0};
        const double kappa_hz = (p.kappa_c + p.kappa_i) / constants::two_pi;
        const double half = 0.5 * ss.span_linewidths * kappa_hz;
        text = io::write_s11_csv(synth::s11_trace(p, ss.f0 - half, ss.f0 + half, ss.points,
                                                  ss.noise, seed.value_or(0)));
      } else if (s_st->parsed()) {
        detail::require_seed(st.noise, seed);
        const ChainParams chain(st.n, st.big_n, JunctionParams(st.l_j, st.c_j), st.c_g);
        std::vector<synth::LorentzianLine> lines;
        for (double w : mode_frequencies(chain).frequencies) {
          const double f = w / constants::two_pi;
          if (f > st.f_lo && f < st.f_hi) lines.push_back({f, st.fwhm, st.amplitude});
        }
        text = io::write_two_tone_csv(synth::two_tone_trace(lines, st.f_lo, st.f_hi, st.points,
                                                            st.baseline, st.noise, seed.value_or(0)));
      } else {
        detail::require_seed(sp.noise, seed);
        const double wp = constants::two_pi * sp.f_p;
        const double wg = omega_g_from_mode(constants::two_pi * sp.f_1, 1, sp.big_n, wp);
        text = io::write_peaks_csv(
            synth::mode_peaks(wp, wg, sp.big_n, sp.first, sp.last, sp.noise, seed.value_or(0)));
      }
      if (output.path.empty()) {
        out << text;
      } else {
        io::write_file(output.path, text);
      }
      return ok;
    }

    CommandResult r;
    if (s_spec->parsed()) r = run_spectrum(spec);
    else if (s_fm->parsed()) r = run_fit_modes(fm);
    else if (s_fs->parsed()) r = run_fit_s11(fs);
    else if (s_dc->parsed()) r = run_dc_fit(dc);
    else if (s_pk->parsed()) r = run_peaks(pk);
    else if (s_geo->parsed()) r = run_geometry(geo);
    else r = run_design(des);
    emit(r, output, out, err);
    return ok;
  } catch (const AmbiguousOffsetError& e) {
    Json rec = detail::error_record(to_string(e.kind()), e.what(), non_convergence);
    rec["candidates"] = Json::array({io::to_json(e.best()), io::to_json(e.runner_up())});
    err << rec.dump() << "\n";
    return non_convergence;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    err << detail::error_record(to_string(e.kind()), e.what(), code).dump() << "\n";
    return code;
  } catch (const std::exception& e) {
    err << detail::error_record("Internal", e.what(), precondition).dump() << "\n";
    return precondition;
  }
}

}  // namespace jjchain::cli
