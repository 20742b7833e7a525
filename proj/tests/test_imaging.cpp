#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nanophot/error.hpp"
#include "nanophot/imaging.hpp"
#include "nanophot/stochastic.hpp"

using namespace nanophot;

namespace {

std::uint8_t px(const Window& w, int dr, int dc) {
  return w[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)];
}

// Gate-level evaluation of the 8-XOR / 7-MUX tree over one full LFSR period.
double tree_oracle(const Window& w, std::uint32_t seed) {
  const auto wiring = SobelWiring::default_wiring();
  const auto seq = lfsr8_period(seed);
  int ones = 0;
  for (std::uint32_t v : seq) {
    std::vector<int> rows;
    for (const auto& p : wiring.pairs) {
      const int a = v < px(w, p.ar, p.ac);
      const int b = v < px(w, p.br, p.bc);
      rows.push_back(a ^ b);
    }
    for (int n = 0; n < 3; ++n) {
      const int sel = (v >> n) & 1;
      std::vector<int> next;
      for (std::size_t k = 0; k + 1 < rows.size(); k += 2) next.push_back(sel ? rows[k] : rows[k + 1]);
      rows = next;
    }
    ones += rows[0];
  }
  return ones / 255.0;
}

Window random_window(std::mt19937_64& rng) {
  Window w{};
  for (auto& p : w) p = static_cast<std::uint8_t>(rng() & 255u);
  return w;
}

GrayImage crop(const GrayImage& img, int r0, int c0, int n) {
  GrayImage out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.at(r, c) = img.at(r0 + r, c0 + c);
  return out;
}

}  // namespace

TEST_CASE("reference output on simple windows") {
  const auto wiring = SobelWiring::default_wiring();
  Window flat{};
  flat.fill(77);
  CHECK(sobel_window(flat, wiring) == 0.0);
  const Window step{0, 255, 255, 0, 255, 255, 0, 255, 255};
  CHECK(sobel_window(step, wiring) == 0.5);
  GrayImage img(5, 5, 40);
  for (double y : sobel_reference(img, wiring)) CHECK(y == 0.0);
}

TEST_CASE("default wiring is well formed") {
  auto w = SobelWiring::default_wiring();
  w.validate();
  w.pairs[6].ac = 0;
  CHECK_THROWS_AS(w.validate(), InvalidParameter);
  w = SobelWiring::default_wiring();
  w.pairs[0].ar = 2;
  CHECK_THROWS_AS(w.validate(), InvalidParameter);
}

TEST_CASE("error-free streams equal the gate-level tree over one period") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Window w = random_window(rng);
    const int r = trial, c = 3 * trial + 1;
    const PixelResult p = simulate_pixel(w, 0.0, 255, 99, r, c);
    const auto seed = static_cast<std::uint32_t>(1 + pixel_seed(99, r, c) % 255);
    CHECK(p.y_prime == doctest::Approx(tree_oracle(w, seed)).epsilon(1e-15));
    CHECK(p.ed_trans == 0.0);
    CHECK(p.y_hat_hat == p.y_prime);
  }
}

TEST_CASE("error-free output repeats with the LFSR period and stays near the reference") {
  std::mt19937_64 rng(5);
  double sum = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Window w = random_window(rng);
    const PixelResult one = simulate_pixel(w, 0.0, 255, 3, trial, trial);
    const PixelResult many = simulate_pixel(w, 0.0, 255 * 40, 3, trial, trial);
    CHECK(many.y_prime == doctest::Approx(one.y_prime).epsilon(1e-12));
    // Select bits share the register with the comparators, so the MUX weights
    // are not exactly 1/8 per row; the residual stays within a few LSBs.
    CHECK(many.ed_bsl <= 4.0 / 255.0);
    sum += many.ed_bsl;
  }
  CHECK(sum / 50 < 2.0 / 255.0);
}

TEST_CASE("flip noise on a constant window") {
  Window flat{};
  flat.fill(128);
  double sum = 0.0;
  const int n = 400;
  for (int k = 0; k < n; ++k) {
    const PixelResult p = simulate_pixel(flat, 0.1, 512, 2024, k, 7);
    CHECK(p.y_prime == 0.0);
    sum += p.y_hat_hat;
  }
  // Mean of n binomial(512, 0.1)/512 draws: sd about 0.0007.
  CHECK(sum / n == doctest::Approx(0.1).epsilon(0.03));
}

TEST_CASE("pixel simulation is deterministic and bounded") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Window w = random_window(rng);
    const PixelResult a = simulate_pixel(w, 0.2, 256, 42, trial, 2);
    const PixelResult b = simulate_pixel(w, 0.2, 256, 42, trial, 2);
    CHECK(a.y_hat_hat == b.y_hat_hat);
    CHECK(std::abs(a.y_hat_hat - a.y) <= a.ed_total() + 1e-15);
    CHECK(a.y_hat_hat >= 0.0);
    CHECK(a.y_hat_hat <= 1.0);
  }
  Window w{};
  CHECK_THROWS_AS(simulate_pixel(w, 0.1, 0, 1, 1, 1), InvalidParameter);
  CHECK_THROWS_AS(simulate_pixel(w, 1.5, 8, 1, 1, 1), InvalidParameter);
}

TEST_CASE("processed image: border frame, determinism, report fields") {
  const GrayImage img = synthetic_test_card(40, 50, 8);
  const ImageResult a = process_image_ber(img, 0.05, 256, 17);
  const ImageResult b = process_image_ber(img, 0.05, 256, 17);
  CHECK(a.output == b.output);
  CHECK(a.report.mse_total == b.report.mse_total);
  for (int c = 0; c < img.cols; ++c) {
    CHECK(a.output.at(0, c) == 0);
    CHECK(a.output.at(img.rows - 1, c) == 0);
  }
  for (int r = 0; r < img.rows; ++r) {
    CHECK(a.output.at(r, 0) == 0);
    CHECK(a.output.at(r, img.cols - 1) == 0);
  }
  double sq = 0.0;
  for (double e : a.report.ed_total) sq += (255 * e) * (255 * e);
  CHECK(a.report.mse_total == doctest::Approx(sq / (40.0 * 50.0)));
  CHECK(a.report.psnr_total == doctest::Approx(psnr_from_mse(a.report.mse_total)));
  CHECK(a.report.time_per_pixel_ns == 256.0);
  CHECK_FALSE(process_image_ber(img, 0.05, 256, 18).output == a.output);
}

TEST_CASE("constant image with a clean channel is exact") {
  const GrayImage img(16, 16, 90);
  const ImageResult r = process_image_ber(img, 0.0, 256, 1);
  CHECK(r.report.mse_total == 0.0);
  CHECK(std::isinf(r.report.psnr_total));
  CHECK(std::isinf(psnr_from_mse(0.0)));
  CHECK(psnr_from_mse(255.0 * 255.0) == doctest::Approx(0.0));
}

TEST_CASE("image checks") {
  CHECK_THROWS_AS(process_image_ber(GrayImage(2, 5), 0.1, 16, 1), InvalidParameter);
  CHECK_THROWS_AS(synthetic_test_card(2, 2, 1), InvalidParameter);
  CHECK_THROWS_AS(synthetic_test_card(8, 8, 1, 2.0), InvalidParameter);
}

TEST_CASE("PSNR improves with stream length and with a cleaner channel") {
  const GrayImage card = synthetic_test_card(256, 256, 20210101);
  auto mean_psnr = [&](double ber_value, int bsl) {
    double s = 0.0;
    for (int seed = 1; seed <= 5; ++seed) {
      const GrayImage c = crop(card, 32 * seed, 16 * seed, 64);
      s += process_image_ber(c, ber_value, bsl, static_cast<std::uint64_t>(seed)).report.psnr_total;
    }
    return s / 5.0;
  };
  const double b256 = mean_psnr(0.1, 256), b512 = mean_psnr(0.1, 512), b1024 = mean_psnr(0.1, 1024);
  CHECK(b256 < b512);
  CHECK(b512 < b1024);
  const double e1 = mean_psnr(0.2, 512), e2 = mean_psnr(0.05, 512), e3 = mean_psnr(0.01, 512);
  CHECK(e1 < b512);
  CHECK(b512 < e2);
  CHECK(e2 < e3);
}

TEST_CASE("error heat map scales to the peak") {
  const GrayImage h = error_heatmap({0.0, 0.1, 0.2, 0.05}, 2, 2);
  CHECK(h.pixels == std::vector<std::uint8_t>{0, 128, 255, 64});
  CHECK(error_heatmap({0, 0, 0, 0}, 2, 2).pixels == std::vector<std::uint8_t>(4, 0));
  CHECK_THROWS_AS(error_heatmap({0.1}, 2, 2), LengthMismatch);
}

TEST_CASE("PGM parsing") {
  const std::string p5 = std::string("P5\n3 3\n255\n") + std::string(9, static_cast<char>(128));
  const GrayImage a = pgm_parse(p5);
  CHECK(a.rows == 3);
  CHECK(a.cols == 3);
  CHECK(a.pixels == std::vector<std::uint8_t>(9, 128));
  const GrayImage b = pgm_parse("P2\n# comment\n3 3\n255\n128 128 128\n128 128 128\n128 128 128\n");
  CHECK(a == b);
}

TEST_CASE("PGM round trip of a random image") {
  std::mt19937_64 rng(3);
  GrayImage img(512, 512);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 255u);
  const std::string bin = pgm_encode(img, PgmFormat::Binary);
  CHECK(pgm_encode(pgm_parse(bin), PgmFormat::Binary) == bin);
  CHECK(pgm_parse(pgm_encode(img, PgmFormat::Ascii)) == img);
  const std::string path = std::string(NANOPHOT_TEST_TMP) + "/random.pgm";
  pgm_write(path, img);
  CHECK(pgm_read(path) == img);
}

TEST_CASE("PGM errors report byte offsets") {
  auto offset_of = [](const std::string& bytes) -> long {
    try {
      pgm_parse(bytes);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1;
  };
  CHECK(offset_of("P6\n3 3\n255\n") == 0);
  CHECK(offset_of("P5\n3 3\n65535\n") == 7);
  CHECK(offset_of("P5\n3 3\n255\nabc") == 14);
  CHECK(offset_of("P2\n3 3\n255\n1 2 3 4") == 18);
  CHECK(offset_of("P2\n3 x\n255\n") == 5);
  CHECK(offset_of("P2\n3 3\n255\n1 2 300 4 5 6 7 8 9") == 15);
  CHECK_THROWS_AS(pgm_read(std::string(NANOPHOT_TEST_TMP) + "/absent.pgm"), InvalidParameter);
}
