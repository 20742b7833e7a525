#include <doctest.h>

#include <cmath>
#include <vector>

#include "nanophot/error.hpp"
#include "nanophot/gates.hpp"

using namespace nanophot;

namespace {

DetuningCalibration cal() {
  DetuningCalibration c;
  c.sat_scale = 0.795;
  c.power_scale = 99.4;
  c.coeffs = {0.0, 0.0, 0.0};
  return c;
}

}  // namespace

TEST_CASE("NOT gate reproduces the 0.35 nm operating point") {
  const auto c = cal();
  const NotGate g = make_not_gate(c, 1542.0, 2000.0, 0.35);
  CHECK(g.cavity.lambda_s_rest == doctest::Approx(1542.35));
  const double hi = not_transmission(g, c, 0), lo = not_transmission(g, c, 1);
  CHECK(hi == doctest::Approx(0.507).epsilon(0.01));
  CHECK(lo == doctest::Approx(0.1).epsilon(0.05));
  CHECK(gate_extinction_ratio(hi, lo) == doctest::Approx(7.05).epsilon(0.3 / 7.05));
  const TruthTable t = not_truth_table(g, c);
  CHECK(t.consistent);
  CHECK(t.threshold == doctest::Approx(0.5 * (hi + lo)));
  CHECK_THROWS_AS(not_transmission(g, c, 2), InvalidParameter);
}

TEST_CASE("NOT gate beyond saturation is rejected") {
  CHECK_THROWS_AS(make_not_gate(cal(), 1542.0, 2000.0, 5.0), MiscalibratedGate);
  CHECK_THROWS_AS(make_not_gate(cal(), 1542.0, 2000.0, 0.0), InvalidParameter);
}

TEST_CASE("XOR gate truth table and operating point") {
  const auto c = cal();
  const XorGate g = make_xor_gate(c, 1542.0, 10000.0, 0.14, 2.0, 24.0, 0.1, 0.794);
  CHECK(g.cavity2.lambda_s_rest - g.cavity1.lambda_s_rest == doctest::Approx(0.14));
  CHECK(detuning(g.cavity1, c, 2 * g.pump_power_high * g.il) == doctest::Approx(0.14).epsilon(1e-9));
  const double t00 = xor_transmission(g, c, 0, 0);
  const double t01 = xor_transmission(g, c, 0, 1);
  const double t10 = xor_transmission(g, c, 1, 0);
  const double t11 = xor_transmission(g, c, 1, 1);
  CHECK(t01 == t10);
  CHECK(t01 > t00);
  CHECK(t01 > t11);
  // At rest the first resonance sits on the signal: floor times the tail of the second.
  CHECK(t00 == doctest::Approx(0.1 * through_transmission(g.cavity2, 1542.0, 0.0)));
  CHECK(t00 < 0.1 + 1e-12);
  CHECK(t11 < 0.1 + 1e-12);
  CHECK(xor_truth_table(g, c).consistent);
}

TEST_CASE("XOR symmetry holds for arbitrary gates") {
  const auto c = cal();
  for (double q : {2000.0, 5000.0, 9000.0})
    for (double dl : {0.05, 0.1, 0.2}) {
      const XorGate g = make_xor_gate(c, 1542.0, q, dl);
      CHECK(xor_transmission(g, c, 0, 1) == xor_transmission(g, c, 1, 0));
    }
}

TEST_CASE("XOR contrast rises with the split, then collapses near saturation") {
  const auto c = cal();
  std::vector<double> ref;
  for (double q : {2000.0, 5000.0, 8000.0}) {
    const Nanocavity probe{1542.0, 24.0, q, 2.0, 0.1};
    const double sat = max_detuning(probe, c);
    std::vector<double> er;
    for (int k = 1; k <= 20; ++k) {
      const XorGate g = make_xor_gate(c, 1542.0, q, sat * k / 21.0);
      er.push_back(10 * std::log10(xor_transmission(g, c, 0, 1) / xor_transmission(g, c, 1, 1)));
    }
    // A split well under a linewidth gives no contrast at all.
    CHECK(er[0] < 0.0);
    CHECK(er[2] < 0.0);
    for (std::size_t k = 3; k < 16; ++k) CHECK(er[k] > er[k - 1]);
    CHECK(er.back() < er[15]);
    // Q very nearly only rescales the wavelength axis.
    if (ref.empty()) ref = er;
    for (std::size_t k = 0; k < er.size(); ++k) CHECK(std::abs(er[k] - ref[k]) < 1e-2);
  }
}

TEST_CASE("XOR linearity flag reflects saturation") {
  const auto c = cal();
  const Nanocavity probe{1542.0, 24.0, 4000.0, 2.0, 0.1};
  const double sat = max_detuning(probe, c);
  CHECK(make_xor_gate(c, 1542.0, 4000.0, 0.05 * sat).linear_pumping);
  CHECK_FALSE(make_xor_gate(c, 1542.0, 4000.0, 0.9 * sat).linear_pumping);
}

TEST_CASE("XOR validation catches a wrong pump") {
  const auto c = cal();
  XorGate g = make_xor_gate(c, 1542.0, 8000.0, 0.14);
  g.validate(c);
  g.pump_power_high *= 1.5;
  CHECK_THROWS_AS(g.validate(c), MiscalibratedGate);
  XorGate h = make_xor_gate(c, 1542.0, 8000.0, 0.14);
  h.cavity2.q_s = 7000.0;
  CHECK_THROWS_AS(h.validate(c), InvalidParameter);
  CHECK_THROWS_AS(make_xor_gate(c, 1542.0, 8000.0, 0.0), InvalidParameter);
}

TEST_CASE("MUX gate selects between the two sets") {
  const auto c = cal();
  const double shift = 0.6;
  const MuxGate g = make_mux_gate(c, 1542.0, 2000.0, shift);
  CHECK(mux_transmission(g, c, 0, 1542.0) == doctest::Approx(0.1));
  CHECK(mux_transmission(g, c, 1, 1542.0 - shift) == doctest::Approx(0.1).epsilon(0.05));
  // A shift of 1.5 linewidths leaves the other set nearly untouched.
  const MuxGate wide = make_mux_gate(c, 1542.0, 5000.0, 1.5 * 1542.0 / 5000.0);
  CHECK(mux_transmission(wide, c, 0, 1542.0 - wide.shift) >= 0.9);
  const TruthTable t = mux_truth_table(g, c);
  CHECK(t.consistent);
  CHECK(t.expected == std::vector<int>{0, 1, 0, 1, 0, 0, 1, 1});
}

TEST_CASE("MUX response is a translated copy") {
  const auto c = cal();
  const MuxGate g = make_mux_gate(c, 1542.0, 3000.0, 0.4);
  for (double l = 1540.0; l < 1543.0; l += 0.05) {
    const double shifted = detuning(g.cavity, c, g.pump_power_high);
    CHECK(std::abs(mux_transmission(g, c, 0, l) - mux_transmission(g, c, 1, l - shifted)) < 1e-3);
  }
}

TEST_CASE("MUX pump is checked against the model") {
  const auto c = cal();
  MuxGate g = make_mux_gate(c, 1542.0, 3000.0, 0.4);
  g.pump_power_high *= 0.8;
  CHECK_THROWS_AS(g.validate(c), MiscalibratedGate);
  CHECK_THROWS_AS(make_mux_gate(c, 1542.0, 3000.0, -0.4), InvalidParameter);
  CHECK_THROWS_AS(make_mux_gate(c, 1542.0, 3000.0, 10.0), MiscalibratedGate);
}

TEST_CASE("extinction ratio arithmetic") {
  CHECK(gate_extinction_ratio(0.5, 0.5) == 0.0);
  CHECK(gate_extinction_ratio(0.507, 0.1) == doctest::Approx(7.05).epsilon(0.001));
  CHECK(gate_extinction_ratio(0.276, 0.1) == doctest::Approx(4.41).epsilon(0.002));
  CHECK(std::isinf(gate_extinction_ratio(0.5, 0.0)));
  CHECK_THROWS_AS(gate_extinction_ratio(0.1, 0.5), InvalidParameter);
}

TEST_CASE("truth table threshold and consistency") {
  const TruthTable t = make_truth_table({0.8, 0.2, 0.7, 0.1}, {1, 0, 1, 0});
  CHECK(t.consistent);
  CHECK(t.threshold == doctest::Approx(0.45));
  CHECK(t.er_db == doctest::Approx(10 * std::log10(3.5)));
  CHECK_FALSE(make_truth_table({0.3, 0.4}, {1, 0}).consistent);
  CHECK_THROWS_AS(make_truth_table({0.3}, {1, 0}), LengthMismatch);
}
