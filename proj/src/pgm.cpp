#include <cctype>
#include <fstream>
#include <sstream>

#include "nanophot/error.hpp"
#include "nanophot/imaging.hpp"

namespace nanophot {

namespace {

class Cursor {
public:
  explicit Cursor(const std::string& s) : s_(s) {}

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= s_.size(); }

  // Whitespace and '#' comments between header tokens.
  void skip_space() {
    while (pos_ < s_.size()) {
      const char ch = s_[pos_];
      if (ch == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long integer(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000000L) throw ParseError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      if (done()) throw ParseError(std::string("truncated data: expected ") + what, start);
      throw ParseError(std::string("expected ") + what, start);
    }
    return v;
  }

  char get() { return s_[pos_++]; }

private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage pgm_parse(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ParseError("not a P2/P5 PGM file", 0);
  const bool binary = bytes[1] == '5';
  Cursor cur(bytes);
  cur.get();
  cur.get();
  const long width = cur.integer("width");
  const long height = cur.integer("height");
  cur.skip_space();
  const std::size_t maxval_at = cur.pos();
  const long maxval = cur.integer("maxval");
  if (maxval != 255) throw ParseError("maxval must be 255", maxval_at);
  if (width < 1 || height < 1) throw ParseError("image dimensions must be positive", maxval_at);

  GrayImage img(static_cast<int>(height), static_cast<int>(width), 0);
  if (binary) {
    if (cur.done() || !std::isspace(static_cast<unsigned char>(bytes[cur.pos()])))
      throw ParseError("expected whitespace after maxval", cur.pos());
    const std::size_t start = cur.pos() + 1;
    const std::size_t need = img.pixels.size();
    if (bytes.size() < start + need) throw ParseError("truncated data", bytes.size());
    for (std::size_t i = 0; i < need; ++i)
      img.pixels[i] = static_cast<std::uint8_t>(bytes[start + i]);
  } else {
    for (auto& p : img.pixels) {
      cur.skip_space();
      const std::size_t at = cur.pos();
      const long v = cur.integer("pixel value");
      if (v > 255) throw ParseError("pixel value exceeds maxval", at);
      p = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

std::string pgm_encode(const GrayImage& img, PgmFormat fmt) {
  std::ostringstream out;
  out << (fmt == PgmFormat::Binary ? "P5" : "P2") << '\n'
      << img.cols << ' ' << img.rows << '\n'
      << 255 << '\n';
  if (fmt == PgmFormat::Binary) {
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
  } else {
    for (int r = 0; r < img.rows; ++r) {
      for (int c = 0; c < img.cols; ++c) out << (c ? " " : "") << static_cast<int>(img.at(r, c));
      out << '\n';
    }
  }
  return out.str();
}

GrayImage pgm_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open image: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return pgm_parse(buf.str());
}

void pgm_write(const std::string& path, const GrayImage& img, PgmFormat fmt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write image: " + path);
  const std::string bytes = pgm_encode(img, fmt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace nanophot
