// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nanophot/architecture.hpp"
#include "nanophot/device.hpp"
#include "nanophot/explorer.hpp"
#include "nanophot/gates.hpp"
#include "nanophot/imaging.hpp"
#include "nanophot/stochastic.hpp"
#include "oracles.hpp"

using namespace nanophot;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string f(const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

DetuningCalibration bundled_calibration() {
  return fit_calibration(read_calibration_csv(std::string(NANOPHOT_DATA_DIR) +
                                              "/reference_detuning.csv"),
                         700.0, 1568.8);
}

// 1: NOT-gate ER at Q_S 2000
Outcome er_reconstruction(const DetuningCalibration& cal) {
  const double dl[] = {0.05, 0.1, 0.19, 0.35};
  const double published[] = {0.7, 1.7, 4.3, 6.9};
  constexpr double kTolDb = 0.5;
  Outcome o{true, "ER dB"};
  for (int k = 0; k < 4; ++k) {
    const NotGate g = make_not_gate(cal, 1542.0, 2000.0, dl[k], 2.0, 24.0, 0.1);
    const double er =
        gate_extinction_ratio(not_transmission(g, cal, 0), not_transmission(g, cal, 1));
    o.pass = o.pass && std::abs(er - published[k]) <= kTolDb;
    o.detail += " " + f("%.2f", er) + "/" + f("%.1f", published[k]);
  }
  return o;
}

// 2: NOT power table after the kappa anchor
Outcome not_power_table(const DetuningCalibration& cal, double kappa) {
  constexpr double kRel = 0.30;
  const NotPowerPoint p = not_power_point(cal, kappa, NoiseAnchor{}, 0.05, 0.1);
  const auto onset = not_valid_onset(cal, kappa, NoiseAnchor{}, 0.1);
  const bool pump_ok = std::abs(p.olp_p - 2.9) <= kRel * 2.9;
  const bool in_ok = std::abs(p.olp_input - 19.1) <= kRel * 19.1;
  const bool onset_ok = onset && *onset >= 0.15 && *onset <= 0.25;
  return {pump_ok && in_ok && onset_ok,
          "OLP_P " + f("%.2f", p.olp_p) + " uW (2.9), OLP_in " + f("%.2f", p.olp_input) +
              " uW (19.1), onset " + (onset ? f("%.3f", *onset) : std::string("none")) +
              " nm [0.15,0.25]"};
}

// 3: XOR optimum on the 100x100 sweep
Outcome xor_optimum(const DetuningCalibration& cal, double kappa) {
  ExplorerContext ctx;
  ctx.kappa = kappa;
  const SweepTable t = explore_xor(SweepGrid{{1.0, 10000.0, 100}, {0.0, 1.0, 100}, 0.1}, cal, ctx);
  const auto best = best_valid_by_power(t);
  if (!best) return {false, "no valid cell"};
  const SweepCell& c = t.cells[*best];
  const bool ok = c.q >= 8000.0 && c.x >= 0.10 && c.x <= 0.20 &&
                  std::abs(c.total_uw - 34.7) <= 0.30 * 34.7;
  return {ok, "Q " + f("%.0f", c.q) + ", split " + f("%.4f", c.x) + " nm, total " +
                  f("%.2f", c.total_uw) + " uW (34.7)"};
}

// 4: wavelength plan
Outcome wavelength_plan() {
  ArchitectureDesign d;
  d.wls = {0.215, 1.19, 4.35};
  d.q_s_mux = {10000.0, 1900.0, 500.0};
  d.olp_pump_mux = {32.0, 210.0, 670.0};
  const double expect[] = {1542.000, 1541.785, 1540.810, 1540.595,
                           1537.650, 1537.435, 1536.460, 1536.245};
  const auto l = assign_signal_wavelengths(d);
  double worst = 0.0;
  for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(l[i] - expect[i]));
  return {l.size() == 8 && worst <= 1e-3, "max deviation " + f("%.2e", worst) + " nm"};
}

// 5: MUX stage pumps
Outcome mux_pumps(const DetuningCalibration& cal, double kappa) {
  const ArchitectureDesign d = size_pumps(reference_design_a(kappa), cal);
  const double published[] = {32.0, 210.0, 670.0};
  Outcome o{true, "pumps uW"};
  for (std::size_t n = 0; n < 3; ++n) {
    const double r = d.olp_pump_mux[n] / published[n];
    o.pass = o.pass && r >= 0.5 && r <= 2.0;
    o.detail += " " + f("%.1f", d.olp_pump_mux[n]) + "/" + f("%.0f", published[n]);
  }
  return o;
}

double mean_psnr(const GrayImage& img, double ber_value, int bsl) {
  double s = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    s += process_image_ber(img, ber_value, bsl, seed).report.psnr_total;
  return s / 5.0;
}

// 6: application accuracy
Outcome application_accuracy() {
  const GrayImage card = synthetic_test_card(512, 512, 20210101);
  const double p512 = process_image_ber(card, 0.1, 512, 20210101).report.psnr_total;
  const double m256 = mean_psnr(card, 0.1, 256);
  const double m512 = mean_psnr(card, 0.1, 512);
  const double m1024 = mean_psnr(card, 0.1, 1024);
  const bool level = std::abs(p512 - 26.4) <= 2.0;
  const bool order = m256 < m512 && m512 < m1024;
  return {level && order, "PSNR " + f("%.2f", p512) + " dB (26.4 +- 2); 5-seed means " +
                              f("%.2f", m256) + " < " + f("%.2f", m512) + " < " +
                              f("%.2f", m1024) + (order ? " holds" : " broken")};
}

// 7: latency and energy
Outcome latency_energy(const DetuningCalibration& cal, double kappa) {
  const DesignPoint b = evaluate_design(reference_design_b(kappa), cal, 512);
  const bool time_ok = b.time_per_pixel_ns == 512.0;
  const double r = b.energy_per_pixel_nj / 8.5;
  return {time_ok && r >= 0.5 && r <= 2.0,
          "time " + f("%.0f", b.time_per_pixel_ns) + " ns, energy " +
              f("%.2f", b.energy_per_pixel_nj) + " nJ (8.5)"};
}

// 8: stochastic oracle equivalence
Outcome stochastic_oracle() {
  const Lfsr l = Lfsr::maximal8(1);
  std::vector<BitStream> s;
  for (std::uint32_t v = 0; v < 256; ++v) s.push_back(sng_generate(v, 255, l));
  long bad = 0;
  for (int a = 0; a < 256; ++a)
    for (int b = 0; b < 256; ++b) {
      const auto& sa = s[static_cast<std::size_t>(a)];
      const auto& sb = s[static_cast<std::size_t>(b)];
      const long diff = std::labs(static_cast<long>(sa.ones()) - static_cast<long>(sb.ones()));
      if (static_cast<long>(xor_streams(sa, sb).ones()) != diff) ++bad;
    }
  // Select constructed as 0 over one copy of each stream and 1 over a second copy.
  long mux_bad = 0;
  for (int a = 0; a < 256; a += 15)
    for (int b = 0; b < 256; b += 15) {
      const auto& sa = s[static_cast<std::size_t>(a)];
      const auto& sb = s[static_cast<std::size_t>(b)];
      const auto twice = [](const BitStream& x) {
        return BitStream::from_string(x.to_string() + x.to_string());
      };
      const BitStream sel =
          BitStream::from_string(std::string(255, '0') + std::string(255, '1'));
      // Exact in counts: ones(out)/510 == (ones(a) + ones(b))/(2*255).
      if (mux_streams(twice(sa), twice(sb), sel).ones() != sa.ones() + sb.ones()) ++mux_bad;
    }
  return {bad == 0 && mux_bad == 0, std::to_string(bad) + " XOR mismatches over 65536 pairs, " +
                                        std::to_string(mux_bad) + " MUX mismatches"};
}

// 9: erfc accuracy
Outcome erfc_accuracy() {
  double worst = 0.0;
  for (int k = -20000; k <= 20000; ++k) {
    const double s = k * 5e-4;
    worst = std::max(worst, std::abs(ber(s) - oracle::ber(s)));
  }
  return {worst <= 1e-6 && ber(0.0) == 0.5, "max |ber - oracle| " + f("%.2e", worst) +
                                                 ", ber(0) " + f("%.17g", ber(0.0))};
}

}  // namespace

int main() {
  const DetuningCalibration cal = bundled_calibration();
  const double kappa = calibrate_kappa(cal);
  std::printf("calibration: S %.4f, C %.2f uW, kappa %.4f per uW\n", cal.sat_scale,
              cal.power_scale, kappa);

  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "ER reconstruction", 1.0, [&] { return er_reconstruction(cal); }},
      {2, "NOT power table", 10.0, [&] { return not_power_table(cal, kappa); }},
      {3, "XOR optimum", 60.0, [&] { return xor_optimum(cal, kappa); }},
      {4, "wavelength plan", 1.0, [] { return wavelength_plan(); }},
      {5, "MUX pump sizing", 10.0, [&] { return mux_pumps(cal, kappa); }},
      {6, "application accuracy", 300.0, [] { return application_accuracy(); }},
      {7, "latency and energy", 1.0, [&] { return latency_energy(cal, kappa); }},
      {8, "stochastic oracle", 30.0, [] { return stochastic_oracle(); }},
      {9, "erfc accuracy", 1.0, [] { return erfc_accuracy(); }},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = c.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    failed += !pass;
    std::printf("[%s] %d %s: %s; %.3f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
