#include "convtact/conv.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "convtact/error.hpp"
#include "convtact/fft.hpp"

namespace convtact {

namespace {

// Where each output window starts, relative to signal index 0, and how much
// halo the signal needs on each side so no read leaves the padded buffer.
struct Anchor {
  std::vector<long long> offset;
  Dims pad_lo;
  Dims pad_hi;
  Dims out;
};

void validate(const Tensor& signal, const Tensor& kernel, ConvShape shape) {
  if (signal.ndim() != kernel.ndim()) {
    throw RankError("signal rank " + std::to_string(signal.ndim()) + " != kernel rank " +
                    std::to_string(kernel.ndim()));
  }
  if (shape == ConvShape::Valid) {
    for (std::size_t a = 0; a < signal.ndim(); ++a) {
      if (signal.extent(a) < kernel.extent(a)) throw ShapeError("VALID needs signal extents >= kernel extents");
    }
  }
}

Anchor anchor_for(const Dims& signal, const Dims& kernel, ConvShape shape) {
  Anchor an;
  an.out = output_dims(signal, kernel, shape);
  for (std::size_t a = 0; a < signal.size(); ++a) {
    const auto n = static_cast<long long>(kernel[a]);
    const auto m = static_cast<long long>(signal[a]);
    long long off = 0;
    switch (shape) {
      case ConvShape::Full: off = -(n - 1); break;
      case ConvShape::Same: off = -(n / 2); break;
      case ConvShape::Valid: off = 0; break;
    }
    an.offset.push_back(off);
    an.pad_lo.push_back(static_cast<std::size_t>(-off));
    const long long hi = off + static_cast<long long>(an.out[a]) + n - 1 - m;
    an.pad_hi.push_back(static_cast<std::size_t>(std::max(0LL, hi)));
  }
  return an;
}

// Calls fn(outer_index) for every multi-index over dims[0 .. dims.size()-2],
// i.e. once per contiguous row.
template <typename Fn>
void for_each_row(const Dims& dims, Fn&& fn) {
  const std::size_t outer_rank = dims.size() - 1;
  Dims idx(outer_rank, 0);
  std::size_t rows = 1;
  for (std::size_t a = 0; a < outer_rank; ++a) rows *= dims[a];
  for (std::size_t r = 0; r < rows; ++r) {
    fn(static_cast<const Dims&>(idx));
    for (std::size_t a = outer_rank; a-- > 0;) {
      if (++idx[a] < dims[a]) break;
      idx[a] = 0;
    }
  }
}

Tensor pad(const Tensor& src, const Dims& lo, const Dims& hi, Boundary boundary) {
  const std::size_t rank = src.ndim();
  Dims dims(rank);
  bool any = false;
  for (std::size_t a = 0; a < rank; ++a) {
    dims[a] = src.extent(a) + lo[a] + hi[a];
    any = any || lo[a] != 0 || hi[a] != 0;
  }
  if (!any) return src;

  Tensor out(dims, 0.0);
  const std::size_t w = src.extent(rank - 1);
  const std::size_t row_lo = lo[rank - 1];
  const std::size_t padded_w = dims[rank - 1];
  std::size_t out_row = 0;
  for_each_row(dims, [&](const Dims& idx) {
    double* dst = out.data().data() + out_row * padded_w;
    ++out_row;
    std::size_t src_flat = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      auto s = static_cast<long long>(idx[a]) - static_cast<long long>(lo[a]);
      const auto m = static_cast<long long>(src.extent(a));
      if (s < 0 || s >= m) {
        if (boundary == Boundary::Zero) return;
        s = std::clamp(s, 0LL, m - 1);
      }
      src_flat += static_cast<std::size_t>(s) * src.strides()[a];
    }
    const double* row = src.data().data() + src_flat;
    std::copy(row, row + w, dst + row_lo);
    if (boundary == Boundary::Replicate) {
      std::fill(dst, dst + row_lo, row[0]);
      std::fill(dst + row_lo + w, dst + padded_w, row[w - 1]);
    }
  });
  return out;
}

// out[x] += sum_t k[t] * in[x + t] for TAPS consecutive taps.
template <std::size_t Taps>
inline void accumulate_taps(double* __restrict out, const double* __restrict in, const double* k, std::size_t n) {
  if constexpr (Taps == 1) {
    const double k0 = k[0];
    for (std::size_t x = 0; x < n; ++x) out[x] += k0 * in[x];
  } else if constexpr (Taps == 2) {
    const double k0 = k[0], k1 = k[1];
    for (std::size_t x = 0; x < n; ++x) out[x] += k0 * in[x] + k1 * in[x + 1];
  } else if constexpr (Taps == 3) {
    const double k0 = k[0], k1 = k[1], k2 = k[2];
    for (std::size_t x = 0; x < n; ++x) out[x] += k0 * in[x] + k1 * in[x + 1] + k2 * in[x + 2];
  } else {
    const double k0 = k[0], k1 = k[1], k2 = k[2], k3 = k[3];
    for (std::size_t x = 0; x < n; ++x)
      out[x] += k0 * in[x] + k1 * in[x + 1] + k2 * in[x + 2] + k3 * in[x + 3];
  }
}

// One kernel row against one signal row: out[x] += sum_j k[j] * in[x + j].
inline void row_correlate(double* out, const double* in, const double* k, std::size_t taps, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= taps; j += 4) accumulate_taps<4>(out, in + j, k + j, n);
  switch (taps - j) {
    case 3: accumulate_taps<3>(out, in + j, k + j, n); break;
    case 2: accumulate_taps<2>(out, in + j, k + j, n); break;
    case 1: accumulate_taps<1>(out, in + j, k + j, n); break;
    default: break;
  }
}

void correlate_1d(const Tensor& in, const Tensor& k, Tensor& out) {
  row_correlate(out.data().data(), in.data().data(), k.data().data(), k.size(), out.size());
}

void correlate_2d(const Tensor& in, const Tensor& k, Tensor& out) {
  const std::size_t oh = out.extent(0), ow = out.extent(1);
  const std::size_t iw = in.extent(1);
  const std::size_t kh = k.extent(0), kw = k.extent(1);
  const double* src = in.data().data();
  const double* kern = k.data().data();
  double* dst = out.data().data();
  for (std::size_t y = 0; y < oh; ++y) {
    double* orow = dst + y * ow;
    for (std::size_t i = 0; i < kh; ++i) row_correlate(orow, src + (y + i) * iw, kern + i * kw, kw, ow);
  }
}

void correlate_3d(const Tensor& in, const Tensor& k, Tensor& out) {
  const std::size_t od = out.extent(0), oh = out.extent(1), ow = out.extent(2);
  const std::size_t ih = in.extent(1), iw = in.extent(2);
  const std::size_t kd = k.extent(0), kh = k.extent(1), kw = k.extent(2);
  const double* src = in.data().data();
  const double* kern = k.data().data();
  double* dst = out.data().data();
  for (std::size_t z = 0; z < od; ++z) {
    for (std::size_t y = 0; y < oh; ++y) {
      double* orow = dst + (z * oh + y) * ow;
      for (std::size_t dz = 0; dz < kd; ++dz) {
        for (std::size_t dy = 0; dy < kh; ++dy) {
          const double* irow = src + ((z + dz) * ih + (y + dy)) * iw;
          row_correlate(orow, irow, kern + (dz * kh + dy) * kw, kw, ow);
        }
      }
    }
  }
}

// Sum in both scales with the same order of magnitude, which keeps the
// packed two-for-one transform accurate when the inputs differ wildly in size.
double balance_factor(const Tensor& signal, const Tensor& kernel) {
  double s = 0.0, k = 0.0;
  for (double v : signal.data()) s += std::abs(v);
  for (double v : kernel.data()) k += std::abs(v);
  if (s == 0.0 || k == 0.0 || !std::isfinite(s) || !std::isfinite(k)) return 1.0;
  return std::exp2(std::round(std::log2(s / k)));
}

// Full linear convolution via one forward and one inverse complex transform:
// z = s + i*k, so S = (Z + conj Z(-f)) / 2 and K = (Z - conj Z(-f)) / 2i.
Tensor fft_full(const Tensor& signal, const Tensor& kernel) {
  const std::size_t rank = signal.ndim();
  Dims full(rank), padded(rank);
  for (std::size_t a = 0; a < rank; ++a) {
    full[a] = signal.extent(a) + kernel.extent(a) - 1;
    padded[a] = fft::next_pow2(full[a]);
  }
  const std::size_t total = element_count(padded);
  Dims pstride(rank, 1);
  for (std::size_t a = rank; a-- > 1;) pstride[a - 1] = pstride[a] * padded[a];

  // An all-zero operand gives an exactly zero product; skip the rounding noise.
  auto all_zero = [](const Tensor& t) {
    return std::all_of(t.data().begin(), t.data().end(), [](double v) { return v == 0.0; });
  };
  if (all_zero(signal) || all_zero(kernel)) return Tensor(full);

  const double beta = balance_factor(signal, kernel);
  std::vector<std::complex<double>> z(total);
  auto scatter = [&](const Tensor& t, bool imag, double scale) {
    const std::size_t w = t.extent(rank - 1);
    std::size_t row = 0;
    for_each_row(t.dims(), [&](const Dims& idx) {
      std::size_t base = 0;
      for (std::size_t a = 0; a < idx.size(); ++a) base += idx[a] * pstride[a];
      const double* src = t.data().data() + row * w;
      ++row;
      for (std::size_t x = 0; x < w; ++x) {
        if (imag) {
          z[base + x].imag(src[x] * scale);
        } else {
          z[base + x].real(src[x] * scale);
        }
      }
    });
  };
  scatter(signal, false, 1.0);
  scatter(kernel, true, beta);
  fft::transform(z, padded, fft::Direction::Forward);

  std::vector<std::complex<double>> prod(total);
  const std::size_t lw = padded[rank - 1];
  for_each_row(padded, [&](const Dims& idx) {
    std::size_t base = 0, mirror = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      base += idx[a] * pstride[a];
      mirror += ((padded[a] - idx[a]) % padded[a]) * pstride[a];
    }
    for (std::size_t x = 0; x < lw; ++x) {
      const std::complex<double> zf = z[base + x];
      const std::complex<double> zm = std::conj(z[mirror + (lw - x) % lw]);
      // (zf^2 - zm^2) / 4i, written out to avoid the slow checked complex multiply.
      const double ar = zf.real() * zf.real() - zf.imag() * zf.imag() - (zm.real() * zm.real() - zm.imag() * zm.imag());
      const double ai = 2.0 * (zf.real() * zf.imag() - zm.real() * zm.imag());
      prod[base + x] = {ai * 0.25, -ar * 0.25};
    }
  });
  z = {};
  fft::transform(prod, padded, fft::Direction::Inverse);

  const double norm = 1.0 / (static_cast<double>(total) * beta);
  Tensor out(full);
  std::size_t row = 0;
  const std::size_t fw = full[rank - 1];
  for_each_row(full, [&](const Dims& idx) {
    std::size_t base = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) base += idx[a] * pstride[a];
    double* dst = out.data().data() + row * fw;
    ++row;
    for (std::size_t x = 0; x < fw; ++x) dst[x] = prod[base + x].real() * norm;
  });
  return out;
}

Tensor crop(const Tensor& src, const Dims& start, const Dims& extents) {
  Tensor out(extents);
  const std::size_t rank = src.ndim();
  const std::size_t w = extents[rank - 1];
  std::size_t row = 0;
  for_each_row(extents, [&](const Dims& idx) {
    std::size_t base = start[rank - 1];
    for (std::size_t a = 0; a < idx.size(); ++a) base += (idx[a] + start[a]) * src.strides()[a];
    const double* s = src.data().data() + base;
    std::copy(s, s + w, out.data().data() + row * w);
    ++row;
  });
  return out;
}

Tensor correlate_direct(const Tensor& signal, const Tensor& kernel, ConvShape shape, Boundary boundary) {
  validate(signal, kernel, shape);
  const Anchor an = anchor_for(signal.dims(), kernel.dims(), shape);
  const Tensor padded = pad(signal, an.pad_lo, an.pad_hi, boundary);
  Tensor out(an.out, 0.0);
  detail::correlate_valid(padded, kernel, out);
  return out;
}

// FFT path for a kernel that is applied by true convolution.
Tensor convolve_fft(const Tensor& signal, const Tensor& kernel, ConvShape shape, Boundary boundary) {
  validate(signal, kernel, shape);
  const Anchor an = anchor_for(signal.dims(), kernel.dims(), shape);
  const std::size_t rank = signal.ndim();
  Dims start(rank);
  if (boundary == Boundary::Zero) {
    // Full(q) reads signal[q - (n-1) + j]; the window for output o starts at o + offset.
    for (std::size_t a = 0; a < rank; ++a)
      start[a] = static_cast<std::size_t>(an.offset[a] + static_cast<long long>(kernel.extent(a)) - 1);
    return crop(fft_full(signal, kernel), start, an.out);
  }
  const Tensor padded = pad(signal, an.pad_lo, an.pad_hi, boundary);
  for (std::size_t a = 0; a < rank; ++a) start[a] = kernel.extent(a) - 1;
  return crop(fft_full(padded, kernel), start, an.out);
}

}  // namespace

ConvShape parse_shape(std::string_view name) {
  if (name == "full") return ConvShape::Full;
  if (name == "same") return ConvShape::Same;
  if (name == "valid") return ConvShape::Valid;
  throw LookupError("unknown shape '" + std::string(name) + "'");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "zero") return Boundary::Zero;
  if (name == "replicate") return Boundary::Replicate;
  throw LookupError("unknown boundary '" + std::string(name) + "'");
}

ConvMethod::Kind parse_method(std::string_view name) {
  if (name == "auto") return ConvMethod::Kind::Auto;
  if (name == "direct") return ConvMethod::Kind::Direct;
  if (name == "fft") return ConvMethod::Kind::Fft;
  throw LookupError("unknown method '" + std::string(name) + "'");
}

std::string to_string(ConvShape shape) {
  switch (shape) {
    case ConvShape::Full: return "full";
    case ConvShape::Same: return "same";
    case ConvShape::Valid: return "valid";
  }
  return "?";
}

std::string to_string(Boundary boundary) { return boundary == Boundary::Zero ? "zero" : "replicate"; }

std::string to_string(Backend backend) { return backend == Backend::Direct ? "direct" : "fft"; }

Dims output_dims(const Dims& signal, const Dims& kernel, ConvShape shape) {
  if (signal.size() != kernel.size()) throw RankError("signal and kernel ranks differ");
  Dims out(signal.size());
  for (std::size_t a = 0; a < signal.size(); ++a) {
    const std::size_t m = signal[a], n = kernel[a];
    switch (shape) {
      case ConvShape::Full: out[a] = m + n - 1; break;
      case ConvShape::Same: out[a] = m; break;
      case ConvShape::Valid:
        if (m < n) throw ShapeError("VALID needs signal extents >= kernel extents");
        out[a] = m - n + 1;
        break;
    }
  }
  return out;
}

Tensor reflect(const Tensor& kernel) {
  Tensor out(kernel.dims());
  const std::size_t rank = kernel.ndim();
  for (std::size_t flat = 0; flat < kernel.size(); ++flat) {
    std::size_t rem = flat, mirrored = 0;
    for (std::size_t a = 0; a < rank; ++a) {
      const std::size_t i = rem / kernel.strides()[a];
      rem %= kernel.strides()[a];
      mirrored += (kernel.extent(a) - 1 - i) * kernel.strides()[a];
    }
    out[mirrored] = kernel[flat];
  }
  return out;
}

Tensor conv_direct(const Tensor& signal, const Tensor& kernel, ConvShape shape, Boundary boundary) {
  return correlate_direct(signal, reflect(kernel), shape, boundary);
}

Tensor xcorr_direct(const Tensor& signal, const Tensor& kernel, ConvShape shape, Boundary boundary) {
  return correlate_direct(signal, kernel, shape, boundary);
}

Tensor conv_fft(const Tensor& signal, const Tensor& kernel, ConvShape shape, Boundary boundary) {
  return convolve_fft(signal, kernel, shape, boundary);
}

Tensor xcorr_fft(const Tensor& signal, const Tensor& kernel, ConvShape shape, Boundary boundary) {
  return convolve_fft(signal, reflect(kernel), shape, boundary);
}

Backend choose_backend(const Dims& kernel, const ConvMethod& method) {
  switch (method.kind) {
    case ConvMethod::Kind::Direct: return Backend::Direct;
    case ConvMethod::Kind::Fft: return Backend::Fft;
    case ConvMethod::Kind::Auto: break;
  }
  if (method.threshold < 1) throw ConfigError("auto threshold must be >= 1");
  return element_count(kernel) < method.threshold ? Backend::Direct : Backend::Fft;
}

ConvResult conv_auto(const Tensor& signal, const Tensor& kernel, ConvShape shape, const ConvMethod& method,
                     Boundary boundary) {
  const Backend b = choose_backend(kernel.dims(), method);
  if (b == Backend::Direct) return {conv_direct(signal, kernel, shape, boundary), b};
  return {conv_fft(signal, kernel, shape, boundary), b};
}

ConvResult xcorr_auto(const Tensor& signal, const Tensor& kernel, ConvShape shape, const ConvMethod& method,
                      Boundary boundary) {
  const Backend b = choose_backend(kernel.dims(), method);
  if (b == Backend::Direct) return {xcorr_direct(signal, kernel, shape, boundary), b};
  return {xcorr_fft(signal, kernel, shape, boundary), b};
}

namespace detail {

void correlate_valid(const Tensor& padded, const Tensor& kernel, Tensor& out) {
  switch (padded.ndim()) {
    case 1: correlate_1d(padded, kernel, out); break;
    case 2: correlate_2d(padded, kernel, out); break;
    case 3: correlate_3d(padded, kernel, out); break;
    default: correlate_valid_generic(padded, kernel, out); break;
  }
}

// Odometer walk over (output row, kernel row) pairs for any rank.
void correlate_valid_generic(const Tensor& padded, const Tensor& kernel, Tensor& out) {
  const std::size_t rank = padded.ndim();
  const std::size_t ow = out.extent(rank - 1);
  const std::size_t kw = kernel.extent(rank - 1);
  std::size_t out_row = 0;
  for_each_row(out.dims(), [&](const Dims& oidx) {
    double* orow = out.data().data() + out_row * ow;
    ++out_row;
    std::size_t krow = 0;
    for_each_row(kernel.dims(), [&](const Dims& kidx) {
      std::size_t base = 0;
      for (std::size_t a = 0; a + 1 < rank; ++a) base += (oidx[a] + kidx[a]) * padded.strides()[a];
      row_correlate(orow, padded.data().data() + base, kernel.data().data() + krow * kw, kw, ow);
      ++krow;
    });
  });
}

}  // namespace detail

}  // namespace convtact
