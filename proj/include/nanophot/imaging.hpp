#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nanophot/explorer.hpp"

namespace nanophot {

struct GrayImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  GrayImage() = default;
  GrayImage(int rows, int cols, std::uint8_t fill = 0);
  std::uint8_t at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(c)];
  }
  std::uint8_t& at(int r, int c) {
    return pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(c)];
  }
  void validate() const;
  bool operator==(const GrayImage&) const = default;
};

// 3x3 neighbourhood, row-major, centre at index 4.
using Window = std::array<std::uint8_t, 9>;
Window window_at(const GrayImage& img, int r, int c);

// One XOR row: |p[ar,ac] - p[br,bc]| with offsets in {-1,0,1}.
struct PixelPair {
  int ar = 0, ac = 0, br = 0, bc = 0;
  bool operator==(const PixelPair&) const = default;
};

struct SobelWiring {
  std::array<PixelPair, 8> pairs;
  // Rows 0-3 carry weight 1, rows 4-5 are the centre pairs and rows 6-7 repeat them.
  static SobelWiring default_wiring();
  void validate() const;
};

// Ideal circuit output: mean absolute difference over the eight wired pairs.
double sobel_window(const Window& w, const SobelWiring& wiring);
std::vector<double> sobel_reference(const GrayImage& img, const SobelWiring& wiring);

struct PixelResult {
  double y = 0.0;          // error-free reference
  double y_prime = 0.0;    // stream output without transmission errors
  double y_hat_hat = 0.0;  // stream output with flips at the detector
  double ed_bsl = 0.0;
  double ed_trans = 0.0;
  double ed_total() const { return ed_bsl + ed_trans; }
};

std::uint64_t pixel_seed(std::uint64_t seed, int r, int c);

PixelResult simulate_pixel(const Window& w, double ber_value, int bsl, std::uint64_t seed, int r,
                           int c, const SobelWiring& wiring = SobelWiring::default_wiring());
PixelResult simulate_pixel(const Window& w, const DesignPoint& design, int bsl,
                           std::uint64_t seed, int r, int c,
                           const SobelWiring& wiring = SobelWiring::default_wiring());

struct AccuracyReport {
  int rows = 0;
  int cols = 0;
  int bsl = 0;
  std::uint64_t seed = 0;
  double ber_injected = 0.0;
  double ber_model = 0.0;  // computed by the transmission model for the design
  double mse_total = 0.0;
  double psnr_total = 0.0;  // +inf when mse is zero
  double mean_ed_bsl = 0.0;
  double mean_ed_trans = 0.0;
  double energy_per_pixel_nj = 0.0;
  double time_per_pixel_ns = 0.0;
  std::vector<double> ed_bsl;  // per pixel, [0,1] scale
  std::vector<double> ed_trans;
  std::vector<double> ed_total;
};

double psnr_from_mse(double mse);

struct ImageResult {
  GrayImage output;
  AccuracyReport report;
};

ImageResult process_image(const GrayImage& img, const DesignPoint& design, int bsl,
                          std::uint64_t seed,
                          const SobelWiring& wiring = SobelWiring::default_wiring());
// Same pipeline with an explicit injected BER.
ImageResult process_image_ber(const GrayImage& img, double ber_value, int bsl,
                              std::uint64_t seed,
                              const SobelWiring& wiring = SobelWiring::default_wiring());

// Heat map of a [0,1] error map scaled linearly to 0..255 by its maximum.
GrayImage error_heatmap(const std::vector<double>& map, int rows, int cols);

// Deterministic textured test card: multi-scale noise over smooth shading plus
// uniform per-pixel grain of the given peak-to-peak width (fraction of full scale).
inline constexpr double kTestCardGrain = 0.2;
GrayImage synthetic_test_card(int rows, int cols, std::uint64_t seed, double grain = kTestCardGrain);

enum class PgmFormat { Ascii, Binary };

GrayImage pgm_parse(const std::string& bytes);
std::string pgm_encode(const GrayImage& img, PgmFormat fmt = PgmFormat::Binary);
GrayImage pgm_read(const std::string& path);
void pgm_write(const std::string& path, const GrayImage& img, PgmFormat fmt = PgmFormat::Binary);

}  // namespace nanophot
