#include "convtact/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "convtact/error.hpp"

namespace convtact {

namespace {

constexpr std::array<char, 4> kNdtMagic{'N', 'D', 'T', '1'};

template <typename U>
U decode_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

template <typename U>
void encode_le(U v, unsigned char* p) {
  for (std::size_t i = 0; i < sizeof(U); ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

// Reads exactly n bytes or throws with the offset where the stream ran dry.
void read_exact(std::istream& in, unsigned char* dst, std::size_t n, std::uint64_t& offset, const char* what) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  const auto got = static_cast<std::uint64_t>(in.gcount());
  if (got != n) throw FormatError(std::string("truncated ") + what, offset + got);
  offset += n;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

// PGM header tokenizer: skips whitespace and '#' comments.
class PgmHeader {
 public:
  explicit PgmHeader(std::istream& in) : in_(in) {}

  std::string magic() {
    std::string m(2, '\0');
    for (char& c : m) c = static_cast<char>(next());
    return m;
  }

  unsigned long number(const char* what) {
    int c = next();
    while (std::isspace(c) || c == '#') {
      if (c == '#') {
        while (c != '\n' && c != EOF) c = next();
      }
      c = next();
    }
    if (!std::isdigit(c)) throw FormatError(std::string("expected ") + what + " in PGM header", offset_ - 1);
    unsigned long v = 0;
    while (std::isdigit(c)) {
      v = v * 10 + static_cast<unsigned long>(c - '0');
      if (v > std::numeric_limits<std::uint32_t>::max()) throw FormatError("PGM header value too large", offset_);
      c = next();
    }
    // Exactly one whitespace byte separates maxval from the raster.
    if (!std::isspace(c)) throw FormatError("malformed PGM header", offset_ - 1);
    return v;
  }

  std::uint64_t offset() const { return offset_; }

 private:
  int next() {
    const int c = in_.get();
    if (c == EOF) throw FormatError("truncated PGM header", offset_);
    ++offset_;
    return c;
  }

  std::istream& in_;
  std::uint64_t offset_ = 0;
};

}  // namespace

Tensor read_ndt(std::istream& in) {
  std::uint64_t offset = 0;
  std::array<unsigned char, 8> buf{};
  read_exact(in, buf.data(), 4, offset, "NDT magic");
  if (std::memcmp(buf.data(), kNdtMagic.data(), 4) != 0) throw FormatError("bad NDT magic", 0);

  read_exact(in, buf.data(), 4, offset, "NDT rank");
  const auto ndim = decode_le<std::uint32_t>(buf.data());
  if (ndim == 0) throw FormatError("NDT rank must be >= 1", 4);
  if (ndim > 64) throw FormatError("NDT rank too large", 4);

  Dims dims(ndim);
  std::size_t count = 1;
  for (std::uint32_t a = 0; a < ndim; ++a) {
    const std::uint64_t at = offset;
    read_exact(in, buf.data(), 8, offset, "NDT extents");
    const auto e = decode_le<std::uint64_t>(buf.data());
    if (e == 0) throw FormatError("NDT extent must be >= 1", at);
    constexpr std::uint64_t kMaxElements = std::numeric_limits<std::size_t>::max() / sizeof(double);
    if (e > kMaxElements / count) throw FormatError("NDT extent overflow", at);
    dims[a] = static_cast<std::size_t>(e);
    count *= dims[a];
  }

  // Read in chunks so a bogus header cannot force a huge allocation up front.
  std::vector<double> data;
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<unsigned char> raw;
  while (data.size() < count) {
    const std::size_t n = std::min(kChunk, count - data.size());
    raw.resize(n * 8);
    read_exact(in, raw.data(), raw.size(), offset, "NDT payload");
    for (std::size_t i = 0; i < n; ++i) data.push_back(std::bit_cast<double>(decode_le<std::uint64_t>(&raw[i * 8])));
  }
  return Tensor(std::move(dims), std::move(data));
}

Tensor read_ndt(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_ndt(in);
}

void write_ndt(std::ostream& out, const Tensor& t) {
  std::vector<unsigned char> buf(8 + 8 * t.ndim() + 8 * t.size());
  std::memcpy(buf.data(), kNdtMagic.data(), 4);
  encode_le(static_cast<std::uint32_t>(t.ndim()), &buf[4]);
  unsigned char* p = &buf[8];
  for (std::size_t e : t.dims()) {
    encode_le(static_cast<std::uint64_t>(e), p);
    p += 8;
  }
  for (double v : t.data()) {
    encode_le(std::bit_cast<std::uint64_t>(v), p);
    p += 8;
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError("NDT write failed");
}

void write_ndt(const std::filesystem::path& path, const Tensor& t) {
  auto out = open_out(path);
  write_ndt(out, t);
}

Image read_pgm(std::istream& in) {
  PgmHeader header(in);
  const std::string magic = header.magic();
  if (magic == "P2") throw FormatError("ASCII PGM (P2) is not supported", 0);
  if (magic != "P5") throw FormatError("not a binary PGM", 0);
  const auto w = header.number("width");
  const auto h = header.number("height");
  const std::uint64_t maxval_at = header.offset();
  const auto maxval = header.number("maxval");
  if (w == 0 || h == 0) throw FormatError("PGM extents must be >= 1", maxval_at);
  if (maxval != 255 && maxval != 65535) throw FormatError("PGM maxval must be 255 or 65535", maxval_at);

  std::uint64_t offset = header.offset();
  const std::size_t bytes_per = maxval == 255 ? 1 : 2;
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * bytes_per);
  read_exact(in, raw.data(), raw.size(), offset, "PGM raster");

  Image img({static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const unsigned v = bytes_per == 1 ? raw[i] : (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1];
    img[i] = v * scale;
  }
  return img;
}

Image read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const Image& img, unsigned maxval) {
  require_image(img, "PGM image");
  if (maxval != 255 && maxval != 65535) throw FormatError("PGM maxval must be 255 or 65535", 0);
  out << "P5\n" << width(img) << ' ' << height(img) << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(img.size() * (maxval == 255 ? 1 : 2));
  for (double v : img.data()) {
    const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    const auto q = static_cast<unsigned>(std::lround(c * maxval));
    if (maxval == 255) {
      raw.push_back(static_cast<unsigned char>(q));
    } else {
      raw.push_back(static_cast<unsigned char>(q >> 8));
      raw.push_back(static_cast<unsigned char>(q & 0xff));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw InputError("PGM write failed");
}

void write_pgm(const std::filesystem::path& path, const Image& img, unsigned maxval) {
  auto out = open_out(path);
  write_pgm(out, img, maxval);
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pgm") return read_pgm(path);
  return read_ndt(path);
}

}  // namespace convtact
