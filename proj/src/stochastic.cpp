#include "nanophot/stochastic.hpp"

#include <algorithm>
#include <bit>

#include "nanophot/error.hpp"

namespace nanophot {

Lfsr::Lfsr(int width, std::vector<int> taps, std::uint32_t seed)
    : width_(width), taps_(std::move(taps)), state_(seed) {
  if (width_ < 2 || width_ > 32) throw InvalidParameter("LFSR width must be in [2,32]");
  if (taps_.empty()) throw InvalidParameter("LFSR needs at least one tap");
  for (int t : taps_) {
    if (t < 1 || t > width_) throw InvalidParameter("LFSR tap out of range");
    // Tap k reads register bit (width - k) because the register shifts right.
    mask_ |= 1u << (width_ - t);
  }
  const std::uint32_t full = width_ == 32 ? 0xffffffffu : ((1u << width_) - 1u);
  if (seed == 0 || (seed & ~full) != 0) throw InvalidState("LFSR seed must be non-zero and fit the width");
}

Lfsr Lfsr::maximal8(std::uint32_t seed) { return Lfsr(8, {8, 6, 5, 4}, seed); }

std::uint32_t Lfsr::advance() {
  if (state_ == 0) throw InvalidState("LFSR in lock-up state");
  const std::uint32_t out = state_;
  const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(state_ & mask_)) & 1u;
  state_ = (state_ >> 1) | (fb << (width_ - 1));
  return out;
}

std::pair<std::uint32_t, Lfsr> Lfsr::next() const {
  Lfsr copy = *this;
  const std::uint32_t v = copy.advance();
  return {v, copy};
}

std::vector<std::uint8_t> lfsr8_period(std::uint32_t seed) {
  Lfsr l = Lfsr::maximal8(seed);
  std::vector<std::uint8_t> seq(255);
  for (auto& v : seq) v = static_cast<std::uint8_t>(l.advance());
  return seq;
}

BitStream::BitStream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) b = b ? 1 : 0;
}

BitStream BitStream::from_string(const std::string& s) {
  std::vector<std::uint8_t> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw InvalidParameter("bit strings contain only 0 and 1");
    bits.push_back(c == '1');
  }
  return BitStream(std::move(bits));
}

std::size_t BitStream::ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double BitStream::probability() const {
  if (bits_.empty()) return 0.0;
  return static_cast<double>(ones()) / static_cast<double>(bits_.size());
}

std::string BitStream::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

BitStream sng_generate(std::uint32_t a_v, std::size_t bsl, Lfsr l) {
  if (bsl == 0) throw InvalidParameter("bsl must be at least 1");
  std::vector<std::uint8_t> bits(bsl);
  for (auto& b : bits) b = l.advance() < a_v;
  return BitStream(std::move(bits));
}

BitStream xor_streams(const BitStream& a, const BitStream& b) {
  if (a.size() != b.size()) throw LengthMismatch("xor_streams: length mismatch");
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) out[t] = a[t] ^ b[t];
  return BitStream(std::move(out));
}

BitStream mux_streams(const BitStream& a, const BitStream& b, const BitStream& sel) {
  if (a.size() != b.size() || a.size() != sel.size())
    throw LengthMismatch("mux_streams: length mismatch");
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) out[t] = sel[t] ? b[t] : a[t];
  return BitStream(std::move(out));
}

BitStream select_bit_stream(Lfsr l, int bit_position, std::size_t bsl) {
  if (bit_position < 0 || bit_position >= l.width())
    throw InvalidParameter("bit position outside the register");
  if (bsl == 0) throw InvalidParameter("bsl must be at least 1");
  std::vector<std::uint8_t> bits(bsl);
  for (auto& b : bits) b = (l.advance() >> bit_position) & 1u;
  return BitStream(std::move(bits));
}

}  // namespace nanophot
