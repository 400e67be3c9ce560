// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "jjchain.hpp"

using namespace jjchain;
namespace fs = std::filesystem;

namespace {

constexpr double two_pi = 2 * M_PI;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

ChainParams random_chain(std::mt19937_64& rng, int n, int big_n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double l_j = (0.5 + 4.5 * u(rng)) * 1e-9;
  const double wp = two_pi * (10.0 + 15.0 * u(rng)) * 1e9;
  const double c_g = (0.1 + 4.9 * u(rng)) * 1e-15;
  return ChainParams(n, big_n, JunctionParams(l_j, 1.0 / (l_j * wp * wp)), c_g);
}

ChainParams chain_from_scales(int n, int big_n, double l_j, double wp, double wg) {
  return ChainParams(n, big_n, JunctionParams(l_j, 1.0 / (l_j * wp * wp)), 1.0 / (n * l_j * wg * wg));
}

Outcome c1_oracle() {
  std::mt19937_64 rng(2024);
  double worst = 0;
  for (int big_n : {2, 5, 50, 140}) {
    for (int n : {1, 4, 9}) {
      for (int draw = 0; draw < 3; ++draw) {
        const auto c = random_chain(rng, n, big_n);
        const auto closed = mode_frequencies(c).frequencies;
        const auto oracle = oracle_eigenproblem(c).modes.frequencies;
        if (closed.size() != static_cast<std::size_t>(big_n - 1) || oracle.size() != closed.size()) {
          return {false, "mode count mismatch"};
        }
        for (std::size_t k = 0; k < closed.size(); ++k) worst = std::max(worst, rel(closed[k], oracle[k]));
      }
    }
  }
  return {worst < 1e-8, fmt("max rel deviation %.2e (limit 1e-8)", worst)};
}

Outcome c2_two_stacks() {
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int n : {1, 2, 4, 9}) {
    for (int draw = 0; draw < 5; ++draw) {
      const auto c = random_chain(rng, n, 2);
      const double hand = std::sqrt(2.0 / (c.n() * c.l_j() * (c.c_g() + 2.0 * c.c_j() / c.n())));
      worst = std::max(worst, rel(mode_frequencies(c).frequencies[0], hand));
      worst = std::max(worst, rel(oracle_eigenproblem(c).modes.frequencies[0], hand));
    }
  }
  return {worst < 1e-10, fmt("max rel deviation %.2e (limit 1e-10)", worst)};
}

Outcome c3_za_chain() {
  const double l_tot = total_inductance(9, 138, 4.75e-9);
  const double z_c = 16200.0;
  const double f1 = M_PI * z_c / l_tot / two_pi;
  const double z_max = M_PI * z_c;
  const bool ok = rel(l_tot, 5.9e-6) <= 0.01 && rel(f1, 1.40e9) <= 0.03 && rel(z_max, 50e3) <= 0.03;
  return {ok, fmt("L_tot %.4g uH, f_1 %.4g GHz, pi Z_c %.4g kOhm", l_tot * 1e6, f1 * 1e-9, z_max * 1e-3)};
}

Outcome c4_impedance_routes() {
  // Reference: n = 1, N = 140, f_p 16.50 GHz, f_1 6.66 GHz, L_J 0.96 nH.
  const double wp_ref = two_pi * 16.50e9;
  const double wg_ref = omega_g_from_mode(two_pi * 6.66e9, 1, 140, wp_ref);
  const auto ref = impedance_from_scales(wp_ref, wg_ref, 1, 140, InductanceAnchor{0.96e-9});
  // MAM: n = 4, N = 140, f_p 18.18 GHz, f_1 3.79 GHz, L_J from 2.48 kOhm per stack.
  const std::vector<DcPoint> mam_dc{{2, 2 * 2480.0}, {4, 4 * 2480.0}, {6, 6 * 2480.0}};
  const double l_j_mam = dc_linear_fit(mam_dc, 4).l_j;
  const double wp_mam = two_pi * 18.18e9;
  const double wg_mam = omega_g_from_mode(two_pi * 3.79e9, 1, 140, wp_mam);
  const auto mam = impedance_from_scales(wp_mam, wg_mam, 4, 140, InductanceAnchor{l_j_mam});
  const bool ok = rel(ref.z_c, 1860.0) <= 0.10 && rel(mam.z_c, 4250.0) <= 0.15;
  return {ok, fmt("Z_ref %.0f Ohm (%.1f%%), Z_MAM %.0f Ohm (%.1f%%)", ref.z_c,
                  100 * (ref.z_c / 1860.0 - 1), mam.z_c, 100 * (mam.z_c / 4250.0 - 1))};
}

Outcome c5_sqrt_n() {
  const JunctionParams j(1.0e-9, 50e-15);
  const double c_g = 2e-15;
  const auto s4 = derive_scales(ChainParams(4, 140, j, c_g));
  const auto s1 = derive_scales(ChainParams(1, 560, j, c_g));
  const double ratio = s4.z_c / s1.z_c;
  const bool ok = std::abs(ratio - 2.0) <= 2e-12 && s4.l_tot == s1.l_tot;
  return {ok, fmt("Z_c(n=4)/Z_c(n=1) = %.15f; measured 4250/1860 = %.2f", ratio, 4250.0 / 1860.0)};
}

Outcome c6_dc() {
  auto collinear = [](double s) { return std::vector<DcPoint>{{2, 2 * s}, {4, 4 * s}, {6, 6 * s}}; };
  const double s1 = dc_linear_fit(collinear(670.0), 1).slope;
  const double s4 = dc_linear_fit(collinear(2480.0), 4).slope;
  double round_trip = 0;
  for (double r : {100.0, 620.0, 670.0, 2480.0, 1e5}) {
    round_trip = std::max(round_trip, rel(inductance_to_resistance(resistance_to_inductance(r)), r));
  }
  const double l670 = resistance_to_inductance(670.0);
  const bool ok = rel(s1, 670.0) <= 1e-12 && rel(s4, 2480.0) <= 1e-12 && rel(s4 / s1, 4.0) <= 0.10 &&
                  round_trip <= 1e-12 && rel(l670, 0.96e-9) <= 0.20;
  return {ok, fmt("ratio %.3f, AB round trip %.1e, L_J(670 Ohm) %.3f nH (%.1f%% vs 0.96)", s4 / s1,
                  round_trip, l670 * 1e9, 100 * (l670 / 0.96e-9 - 1))};
}

Outcome c7_dispersion() {
  const double wp = two_pi * 13.66e9;
  const double wg = omega_g_from_mode(two_pi * 1.40e9, 1, 138, wp);
  const auto clean = fit_dispersion(synth::mode_peaks(wp, wg, 138, 3, 40, 0.0, 0), 138);
  const auto noisy = fit_dispersion(synth::mode_peaks(wp, wg, 138, 3, 40, 0.002, 42), 138);
  const double e_clean = std::max(rel(clean.omega_p, wp), rel(clean.omega_g, wg));
  const double e_noisy = std::max(rel(noisy.omega_p, wp), rel(noisy.omega_g, wg));
  const bool ok = clean.index_offset == 2 && e_clean < 1e-4 && noisy.index_offset == 2 && e_noisy < 0.01;
  return {ok, fmt("noiseless err %.1e offset %.0f; 0.2%% noise err %.2e offset %.0f", e_clean,
                  clean.index_offset, e_noisy, noisy.index_offset)};
}

Outcome c8_s11() {
  double worst = 0;
  for (double phi : {0.05, -0.3, 0.6}) {
    const ResonanceParams p{two_pi * 5.2e9, two_pi * 0.8e6, two_pi * 0.5e6, phi};
    const double w = (p.kappa_c + p.kappa_i) / two_pi;
    const auto fit = fit_s11(synth::s11_trace(p, 5.2e9 - 8 * w, 5.2e9 + 8 * w, 401, 0.0, 0));
    worst = std::max({worst, rel(fit.omega_0, p.omega_0), rel(fit.kappa_c, p.kappa_c),
                      rel(fit.kappa_i, p.kappa_i), rel(fit.phi_0, p.phi_0)});
  }
  double q_noise = 0;
  {
    const double f0 = 6e9, q = 5000.0, kappa = two_pi * f0 / q;
    const ResonanceParams p{two_pi * f0, 0.5 * kappa, 0.5 * kappa, 0.0};
    const auto fit = fit_s11(synth::s11_trace(p, f0 - 6 * f0 / q, f0 + 6 * f0 / q, 401, 0.01, 11));
    q_noise = rel(fit.q_tot, q);
  }
  double q_table = 0;
  {
    const double f0 = 4.074e9, q = 3318.0, kappa = two_pi * f0 / q;
    const ResonanceParams p{two_pi * f0, 0.6 * kappa, 0.4 * kappa, 0.02};
    const auto fit = fit_s11(synth::s11_trace(p, f0 - 6 * f0 / q, f0 + 6 * f0 / q, 601, 0.01, 1234));
    q_table = rel(fit.q_tot, q);
  }
  const ResonanceParams any{two_pi * 5e9, 1e6, 3e5, 0.07};
  const ResonanceParams full{two_pi * 5e9, 1e6, 0.0, 0.0};
  const double a_inf = std::abs(s11_model(any, 1e30) - 1.0);
  const double a_res = std::abs(s11_model(full, full.omega_0) + 1.0);
  const bool ok = worst < 1e-6 && q_noise < 0.02 && q_table < 0.02 && a_inf <= 1e-12 && a_res <= 1e-12;
  return {ok, fmt("noiseless %.1e, 1%% noise q_tot %.2e, ZA mode 3 q_tot %.2e, anchors %.0e", worst,
                  q_noise, q_table, std::max(a_inf, a_res))};
}

Outcome c9_asymptotics() {
  const double l_j = 1e-9, wp = two_pi * 15e9;
  const int big_n = 400;
  const double wg = wp / (10.0 * M_PI);  // omega_p / omega_g = 10 pi >= 20 pi / N
  const auto lin = chain_from_scales(1, big_n, l_j, wp, wg);
  double e_lin = 0;
  for (int m = 1; m <= big_n / 20; ++m) {
    e_lin = std::max(e_lin, rel(linear_dispersion_approx(lin, m), mode_frequency(lin, m)));
  }
  const auto half = chain_from_scales(1, 200, l_j, wp, wp / 2);
  const double e_top = rel(mode_frequency(half, 199), high_index_asymptote(half));
  const auto fast = chain_from_scales(1, 200, l_j, wp, 100 * wp);
  const double e_fast = rel(high_index_asymptote(fast), wp);
  const bool ok = e_lin < 0.01 && e_top < 0.005 && e_fast < 1e-4;
  return {ok, fmt("linear %.2e, mode N-1 %.2e, omega_g = 100 omega_p %.2e", e_lin, e_top, e_fast)};
}

Outcome c10_geometry() {
  constexpr double um = 1e-6, nm = 1e-9;
  const double l07 = area_to_inductance(0.7 * um * um);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const double l = (0.2 + 2 * u(rng)) * um;
    const double theta = (1 + 40 * u(rng)) * M_PI / 180;
    const double tn = std::tan(theta);
    const double d = 0.45 * l / tn * u(rng) + 1 * nm;
    const double hand = 4 * l * d * tn - 4 * d * d * tn * tn;
    const PyramidStack s(l, d, 2, theta);
    worst = std::max({worst, rel(area_reduction(l, d, theta), hand),
                      rel(layer_area(s, 0) - layer_area(s, 1), hand)});
  }
  const double da = area_reduction(um, 180 * nm, default_clog_angle);
  const double gap = std::abs(da - 0.18 * um * um) / (0.18 * um * um);
  const bool ok = rel(l07, 5.7e-9) <= 0.01 && worst <= 1e-12 && gap > 0.10;
  return {ok, fmt("L(0.7 um^2) %.4f nH, identity %.1e, da %.4f um^2 vs 0.18 (%.1f%% off)", l07 * 1e9,
                  worst, da / (um * um), 100 * gap)};
}

Outcome c11_peaks() {
  const double f_lo = 2e9, f_hi = 14e9;
  const int points = 4801;
  const double bin = (f_hi - f_lo) / (points - 1);
  std::vector<synth::LorentzianLine> lines;
  for (int k = 0; k < 12; ++k) {
    lines.push_back({f_lo + (0.6 + 0.9 * k + 0.05 * (k % 3)) * 1e9 + 0.37 * bin, 2 * bin, 1.0});
  }
  const auto found = detect_peaks(synth::two_tone_trace(lines, f_lo, f_hi, points, 0.2, 0.1, 2024));
  if (found.peak_frequencies.size() != 12) {
    return {false, fmt("found %.0f peaks", static_cast<double>(found.peak_frequencies.size()))};
  }
  double worst = 0;
  for (int k = 0; k < 12; ++k) worst = std::max(worst, std::abs(found.peak_frequencies[k] - lines[k].center) / bin);
  return {worst < 0.5, fmt("12 peaks, worst miss %.3f bin", worst)};
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

Outcome c12_determinism() {
  const fs::path dir = fs::temp_directory_path() / "jjchain_acceptance";
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  std::vector<std::vector<std::string>> cmds = {
      {"synth", "peaks", "--fp", "13.66e9", "--f1", "1.40e9", "--N", "138", "--first", "3", "--last",
       "40", "--noise", "0.002", "--seed", "5"},
      {"synth", "s11", "--f0", "4.074e9", "--q-c", "5530", "--q-i", "8295", "--noise", "0.01", "--seed",
       "9"},
      {"synth", "two-tone", "--n", "9", "--N", "138", "--lj", "4.75e-9", "--cj", "2.86e-14", "--cg",
       "1.63e-16", "--f-lo", "3e9", "--f-hi", "9e9", "--points", "3001", "--fwhm", "4e6", "--noise",
       "0.05", "--seed", "3"},
  };
  // Inputs for the analysis commands.
  const std::vector<std::string> files = {p("peaks.csv"), p("s11.csv"), p("two_tone.csv")};
  for (std::size_t k = 0; k < cmds.size(); ++k) {
    auto args = cmds[k];
    args.insert(args.end(), {"-o", files[k]});
    if (cli(args).code != 0) return {false, "could not write synthetic input " + files[k]};
  }
  io::write_file(p("dc.csv"), "stack_count,resistance_ohm\n2,4950\n4,9930\n6,14870\n");

  cmds.push_back({"spectrum", "--n", "9", "--N", "138", "--lj", "4.75e-9", "--fp", "13.66e9", "--zc",
                  "16200", "--modes", "10", "--plot", p("spec.svg")});
  cmds.push_back({"fit-modes", files[0], "--N", "138", "--n", "9", "--anchor-lj", "4.75e-9",
                  "--anchor-cg", "1.63e-16", "--plot", p("fm.svg")});
  cmds.push_back({"fit-s11", files[1], "--device", "ZA", "--mode", "3", "--plot", p("s11.svg")});
  cmds.push_back({"dc-fit", p("dc.csv"), "--jcts-per-stack", "4"});
  cmds.push_back({"peaks", files[2], "--plot", p("pk.svg")});
  cmds.push_back({"geometry", "--side", "1e-6", "--pitch", "20e-9", "--layers", "9"});
  cmds.push_back({"design", "--target-zc", "16200", "--target-ltot", "5.9e-6", "--anchor-lj", "4.75e-9",
                  "--n-max", "9", "--fp", "13.66e9"});

  int checked = 0;
  for (const auto& args : cmds) {
    const CliRun a = cli(args);
    if (a.code != 0) return {false, args[0] + " exited with " + std::to_string(a.code)};
    std::string plot_a;
    const auto plot = std::find(args.begin(), args.end(), "--plot");
    if (plot != args.end()) plot_a = io::read_file(*(plot + 1));
    const CliRun b = cli(args);
    if (b.code != 0) return {false, args[0] + " exited with " + std::to_string(b.code)};
    if (a.out != b.out) return {false, args[0] + " output differs between runs"};
    if (plot != args.end() && io::read_file(*(plot + 1)) != plot_a) {
      return {false, args[0] + " plot differs between runs"};
    }
    ++checked;
  }
  fs::remove_all(dir);
  return {true, fmt("%.0f commands byte-identical across runs", checked)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", c1_oracle},
      {"N = 2 analytic mode", c2_two_stacks},
      {"ZA consistency chain", c3_za_chain},
      {"impedance route (i), Reference and MAM", c4_impedance_routes},
      {"sqrt(n) scaling", c5_sqrt_n},
      {"DC fits and Ambegaokar-Baratoff", c6_dc},
      {"dispersion-fit round trip", c7_dispersion},
      {"S11 fit", c8_s11},
      {"asymptotics", c9_asymptotics},
      {"geometry", c10_geometry},
      {"peak detection", c11_peaks},
      {"CLI determinism", c12_determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
