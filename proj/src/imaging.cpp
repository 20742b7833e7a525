#include "nanophot/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nanophot/error.hpp"
#include "nanophot/parallel.hpp"
#include "nanophot/stochastic.hpp"

namespace nanophot {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t flip_threshold(double p) {
  // P(draw < threshold) = p for a uniform 64-bit draw.
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

}  // namespace

GrayImage::GrayImage(int r, int c, std::uint8_t fill) : rows(r), cols(c) {
  if (r < 0 || c < 0) throw InvalidParameter("image dimensions must be non-negative");
  pixels.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill);
}

void GrayImage::validate() const {
  if (rows < 3 || cols < 3) throw InvalidParameter("image must be at least 3x3");
  if (pixels.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw InvalidParameter("pixel buffer does not match the dimensions");
}

Window window_at(const GrayImage& img, int r, int c) {
  Window w{};
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc)
      w[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)] = img.at(r + dr, c + dc);
  return w;
}

SobelWiring SobelWiring::default_wiring() {
  SobelWiring w;
  w.pairs = {{
      {-1, 1, -1, -1},  // Gx top row
      {1, 1, 1, -1},    // Gx bottom row
      {1, -1, -1, -1},  // Gy left column
      {1, 1, -1, 1},    // Gy right column
      {0, 1, 0, -1},    // Gx centre row
      {1, 0, -1, 0},    // Gy centre column
      {0, 1, 0, -1},
      {1, 0, -1, 0},
  }};
  return w;
}

void SobelWiring::validate() const {
  for (const auto& p : pairs)
    for (int v : {p.ar, p.ac, p.br, p.bc})
      if (v < -1 || v > 1) throw InvalidParameter("wiring offsets must lie in the 3x3 window");
  if (!(pairs[6] == pairs[4]) || !(pairs[7] == pairs[5]))
    throw InvalidParameter("wiring rows 7-8 must duplicate rows 5-6");
}

namespace {

std::uint8_t pick(const Window& w, int dr, int dc) {
  return w[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)];
}

}  // namespace

double sobel_window(const Window& w, const SobelWiring& wiring) {
  int sum = 0;
  for (const auto& p : wiring.pairs) sum += std::abs(pick(w, p.ar, p.ac) - pick(w, p.br, p.bc));
  return sum / (8.0 * 255.0);
}

std::vector<double> sobel_reference(const GrayImage& img, const SobelWiring& wiring) {
  img.validate();
  wiring.validate();
  std::vector<double> y(img.pixels.size(), 0.0);
  for (int r = 1; r < img.rows - 1; ++r)
    for (int c = 1; c < img.cols - 1; ++c)
      y[static_cast<std::size_t>(r) * static_cast<std::size_t>(img.cols) +
        static_cast<std::size_t>(c)] = sobel_window(window_at(img, r, c), wiring);
  return y;
}

std::uint64_t pixel_seed(std::uint64_t seed, int r, int c) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(r)));
  return splitmix(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)) << 32));
}

PixelResult simulate_pixel(const Window& w, double ber_value, int bsl, std::uint64_t seed, int r,
                           int c, const SobelWiring& wiring) {
  if (bsl < 1) throw InvalidParameter("bsl must be at least 1");
  if (!(ber_value >= 0.0 && ber_value <= 1.0)) throw InvalidParameter("BER must lie in [0,1]");
  // Comparator intervals: row k is '1' when the LFSR value lies in [lo_k, hi_k).
  std::array<std::uint32_t, 8> lo{}, hi{};
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& p = wiring.pairs[k];
    const std::uint32_t a = pick(w, p.ar, p.ac), b = pick(w, p.br, p.bc);
    lo[k] = std::min(a, b);
    hi[k] = std::max(a, b);
  }
  const std::uint64_t h = pixel_seed(seed, r, c);
  Lfsr l = Lfsr::maximal8(static_cast<std::uint32_t>(1 + h % 255));
  std::mt19937_64 rng(splitmix(h ^ 0x5bd1e995ULL));
  const std::uint64_t threshold = flip_threshold(ber_value);

  int ones_clean = 0, ones_noisy = 0;
  for (int t = 0; t < bsl; ++t) {
    const std::uint32_t v = l.advance();
    // MUX stage n passes its first input when register bit n is 1, so the row
    // reaching the detector is the bitwise complement of the low three bits.
    const std::size_t row = (~v) & 7u;
    const int bit = v >= lo[row] && v < hi[row];
    const int flip = threshold != 0 && rng() < threshold;
    ones_clean += bit;
    ones_noisy += bit ^ flip;
  }
  PixelResult res;
  res.y = sobel_window(w, wiring);
  res.y_prime = static_cast<double>(ones_clean) / bsl;
  res.y_hat_hat = static_cast<double>(ones_noisy) / bsl;
  res.ed_bsl = std::abs(res.y_prime - res.y);
  res.ed_trans = std::abs(res.y_hat_hat - res.y_prime);
  return res;
}

PixelResult simulate_pixel(const Window& w, const DesignPoint& design, int bsl,
                           std::uint64_t seed, int r, int c, const SobelWiring& wiring) {
  return simulate_pixel(w, design.output_ber(), bsl, seed, r, c, wiring);
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

ImageResult run_image(const GrayImage& img, double ber_value, int bsl, std::uint64_t seed,
                      const SobelWiring& wiring) {
  img.validate();
  wiring.validate();
  if (bsl < 1) throw InvalidParameter("bsl must be at least 1");
  ImageResult out;
  out.output = GrayImage(img.rows, img.cols, 0);
  AccuracyReport& rep = out.report;
  rep.rows = img.rows;
  rep.cols = img.cols;
  rep.bsl = bsl;
  rep.seed = seed;
  rep.ber_injected = ber_value;
  const std::size_t n = img.pixels.size();
  rep.ed_bsl.assign(n, 0.0);
  rep.ed_trans.assign(n, 0.0);
  rep.ed_total.assign(n, 0.0);

  parallel_for(static_cast<std::size_t>(img.rows - 2), [&](std::size_t k) {
    const int r = static_cast<int>(k) + 1;
    for (int c = 1; c < img.cols - 1; ++c) {
      const PixelResult p = simulate_pixel(window_at(img, r, c), ber_value, bsl, seed, r, c, wiring);
      const std::size_t idx =
          static_cast<std::size_t>(r) * static_cast<std::size_t>(img.cols) +
          static_cast<std::size_t>(c);
      out.output.pixels[idx] = static_cast<std::uint8_t>(std::lround(p.y_hat_hat * 255.0));
      rep.ed_bsl[idx] = p.ed_bsl;
      rep.ed_trans[idx] = p.ed_trans;
      rep.ed_total[idx] = p.ed_total();
    }
  });

  // Ordered reduction keeps the sums independent of scheduling.
  double sq = 0.0, sb = 0.0, st = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = rep.ed_total[i] * 255.0;
    sq += e * e;
    sb += rep.ed_bsl[i];
    st += rep.ed_trans[i];
  }
  rep.mse_total = sq / static_cast<double>(n);
  rep.psnr_total = psnr_from_mse(rep.mse_total);
  rep.mean_ed_bsl = sb / static_cast<double>(n);
  rep.mean_ed_trans = st / static_cast<double>(n);
  rep.time_per_pixel_ns = static_cast<double>(bsl);
  return out;
}

}  // namespace

ImageResult process_image(const GrayImage& img, const DesignPoint& design, int bsl,
                          std::uint64_t seed, const SobelWiring& wiring) {
  ImageResult r = run_image(img, design.output_ber(), bsl, seed, wiring);
  r.report.ber_model = design.stage_ber.empty() ? r.report.ber_injected : design.stage_ber.back();
  std::tie(r.report.energy_per_pixel_nj, r.report.time_per_pixel_ns) =
      energy_per_pixel(design, bsl);
  return r;
}

ImageResult process_image_ber(const GrayImage& img, double ber_value, int bsl,
                              std::uint64_t seed, const SobelWiring& wiring) {
  ImageResult r = run_image(img, ber_value, bsl, seed, wiring);
  r.report.ber_model = ber_value;
  return r;
}

GrayImage error_heatmap(const std::vector<double>& map, int rows, int cols) {
  if (map.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw LengthMismatch("map size does not match the dimensions");
  GrayImage img(rows, cols, 0);
  const double peak = map.empty() ? 0.0 : *std::max_element(map.begin(), map.end());
  if (peak <= 0.0) return img;
  for (std::size_t i = 0; i < map.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * map[i] / peak));
  return img;
}

GrayImage synthetic_test_card(int rows, int cols, std::uint64_t seed, double grain) {
  if (rows < 3 || cols < 3) throw InvalidParameter("test card must be at least 3x3");
  if (!(grain >= 0.0 && grain <= 1.0)) throw InvalidParameter("grain must lie in [0,1]");
  GrayImage img(rows, cols, 0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  // Value noise at a few octaves over a smooth diagonal shading.
  const int octaves = 3;
  const int cells[octaves] = {8, 32, 128};
  const double weights[octaves] = {0.5, 0.3, 0.2};
  std::vector<std::vector<double>> lattices(octaves);
  for (int o = 0; o < octaves; ++o) {
    lattices[static_cast<std::size_t>(o)].resize(
        static_cast<std::size_t>((cells[o] + 2) * (cells[o] + 2)));
    for (auto& v : lattices[static_cast<std::size_t>(o)]) v = gauss(rng);
  }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double v = 0.0;
      for (int o = 0; o < octaves; ++o) {
        const double fr = static_cast<double>(r) * cells[o] / rows;
        const double fc = static_cast<double>(c) * cells[o] / cols;
        const int ir = static_cast<int>(fr), ic = static_cast<int>(fc);
        const double tr = fr - ir, tc = fc - ic;
        const auto& lat = lattices[static_cast<std::size_t>(o)];
        const int stride = cells[o] + 2;
        auto g = [&](int a, int b) { return lat[static_cast<std::size_t>(a * stride + b)]; };
        const double top = g(ir, ic) * (1 - tc) + g(ir, ic + 1) * tc;
        const double bot = g(ir + 1, ic) * (1 - tc) + g(ir + 1, ic + 1) * tc;
        v += weights[o] * (top * (1 - tr) + bot * tr);
      }
      const double shade = 0.5 + 0.2 * (static_cast<double>(r + c) / (rows + cols) - 0.5);
      // Pixel-level grain keeps the edge detector busy everywhere, like a textured photo.
      const double x = shade + 0.25 * v + grain * unit(rng);
      img.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(x * 255.0), 0L, 255L));
    }
  return img;
}

}  // namespace nanophot
