#include "convtact/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "convtact/error.hpp"

namespace convtact::fft {

namespace {

// Column block width for transforms along non-contiguous axes. Keeps one
// block of every row (len * kBlock complex values) resident in L2.
constexpr std::size_t kBlock = 16;

std::vector<std::complex<double>> twiddles(std::size_t len, Direction dir) {
  const double sign = dir == Direction::Forward ? -1.0 : 1.0;
  std::vector<std::complex<double>> w(len / 2);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
    w[k] = {std::cos(angle), std::sin(angle)};
  }
  return w;
}

std::vector<std::size_t> bit_reversal(std::size_t len) {
  std::vector<std::size_t> rev(len, 0);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < len) ++bits;
  for (std::size_t i = 0; i < len; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
    rev[i] = r;
  }
  return rev;
}

// Radix-2 decimation-in-time over one contiguous line.
void line_fft(double* x, std::size_t len, const std::vector<std::complex<double>>& w,
              const std::vector<std::size_t>& rev) {
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t j = rev[i];
    if (i < j) {
      std::swap(x[2 * i], x[2 * j]);
      std::swap(x[2 * i + 1], x[2 * j + 1]);
    }
  }
  for (std::size_t size = 2; size <= len; size *= 2) {
    const std::size_t half = size / 2;
    const std::size_t step = len / size;
    for (std::size_t start = 0; start < len; start += size) {
      double* a = x + 2 * start;
      double* b = a + 2 * half;
      for (std::size_t k = 0; k < half; ++k) {
        const double wr = w[k * step].real(), wi = w[k * step].imag();
        const double br = b[2 * k], bi = b[2 * k + 1];
        const double tr = br * wr - bi * wi;
        const double ti = br * wi + bi * wr;
        b[2 * k] = a[2 * k] - tr;
        b[2 * k + 1] = a[2 * k + 1] - ti;
        a[2 * k] += tr;
        a[2 * k + 1] += ti;
      }
    }
  }
}

// Transform along an axis whose elements are `inner` complex values apart.
// Each butterfly acts on a block of up to kBlock adjacent columns at once.
void strided_fft(double* x, std::size_t len, std::size_t inner, const std::vector<std::complex<double>>& w,
                 const std::vector<std::size_t>& rev) {
  const std::size_t row = 2 * inner;
  for (std::size_t c0 = 0; c0 < inner; c0 += kBlock) {
    const std::size_t nb = 2 * std::min(kBlock, inner - c0);
    double* base = x + 2 * c0;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t j = rev[i];
      if (i < j) std::swap_ranges(base + i * row, base + i * row + nb, base + j * row);
    }
    for (std::size_t size = 2; size <= len; size *= 2) {
      const std::size_t half = size / 2;
      const std::size_t step = len / size;
      for (std::size_t start = 0; start < len; start += size) {
        for (std::size_t k = 0; k < half; ++k) {
          const double wr = w[k * step].real(), wi = w[k * step].imag();
          double* a = base + (start + k) * row;
          double* b = base + (start + k + half) * row;
          for (std::size_t t = 0; t < nb; t += 2) {
            const double br = b[t], bi = b[t + 1];
            const double tr = br * wr - bi * wi;
            const double ti = br * wi + bi * wr;
            b[t] = a[t] - tr;
            b[t + 1] = a[t + 1] - ti;
            a[t] += tr;
            a[t + 1] += ti;
          }
        }
      }
    }
  }
}

}  // namespace

bool is_pow2(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) {
    if (p > (std::size_t{1} << 62)) throw DimensionError("FFT length overflow");
    p <<= 1;
  }
  return p;
}

void transform(std::span<std::complex<double>> data, const Dims& dims, Direction dir) {
  if (data.size() != element_count(dims)) throw DimensionError("FFT buffer does not match extents");
  for (std::size_t e : dims) {
    if (!is_pow2(e)) throw DimensionError("FFT extents must be powers of two");
  }
  // std::complex<double> is layout-compatible with double[2].
  double* x = reinterpret_cast<double*>(data.data());
  std::size_t inner = 1;
  for (std::size_t axis = dims.size(); axis-- > 0;) {
    const std::size_t len = dims[axis];
    if (len > 1) {
      const auto w = twiddles(len, dir);
      const auto rev = bit_reversal(len);
      const std::size_t outer = data.size() / (len * inner);
      for (std::size_t o = 0; o < outer; ++o) {
        double* block = x + 2 * o * len * inner;
        if (inner == 1) {
          line_fft(block, len, w, rev);
        } else {
          strided_fft(block, len, inner, w, rev);
        }
      }
    }
    inner *= len;
  }
}

}  // namespace convtact::fft
