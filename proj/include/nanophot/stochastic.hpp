#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nanophot {

// Fibonacci LFSR. Taps use 1-based positions counted from the output end, as in
// the usual polynomial notation x^8 + x^6 + x^5 + x^4 + 1.
class Lfsr {
public:
  Lfsr(int width, std::vector<int> taps, std::uint32_t seed);
  static Lfsr maximal8(std::uint32_t seed = 1);

  std::uint32_t value() const { return state_; }
  int width() const { return width_; }
  const std::vector<int>& taps() const { return taps_; }
  bool bit(int position) const { return (state_ >> position) & 1u; }

  // Current value and the register after one shift.
  [[nodiscard]] std::pair<std::uint32_t, Lfsr> next() const;
  // In-place form for hot loops.
  std::uint32_t advance();

private:
  int width_;
  std::vector<int> taps_;
  std::uint32_t mask_ = 0;  // xor of tapped bit positions
  std::uint32_t state_;
};

// Sequence of all register values in one full period, starting from `seed`.
std::vector<std::uint8_t> lfsr8_period(std::uint32_t seed);

class BitStream {
public:
  BitStream() = default;
  explicit BitStream(std::vector<std::uint8_t> bits);
  static BitStream from_string(const std::string& s);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t ones() const;
  double probability() const;
  std::string to_string() const;

  bool operator==(const BitStream&) const = default;

private:
  std::vector<std::uint8_t> bits_;
};

// Comparator SNG: bit t is 1 iff the t-th LFSR value is below a_v.
BitStream sng_generate(std::uint32_t a_v, std::size_t bsl, Lfsr l);
BitStream xor_streams(const BitStream& a, const BitStream& b);
BitStream mux_streams(const BitStream& a, const BitStream& b, const BitStream& sel);
BitStream select_bit_stream(Lfsr l, int bit_position, std::size_t bsl);

}  // namespace nanophot
