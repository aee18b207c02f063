#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "convtact/tensor.hpp"

namespace convtact {

// Output extent per axis (m = signal, n = kernel):
//   Full  m + n - 1
//   Same  m, with Same(i) == Full(i + (n - 1) / 2)
//   Valid m - n + 1, requires m >= n
enum class ConvShape { Full, Same, Valid };

// How reads outside the signal are resolved.
enum class Boundary { Zero, Replicate };

enum class Backend { Direct, Fft };

// Kernel element count at which Auto switches from Direct to FFT.
inline constexpr std::size_t kDefaultAutoThreshold = 900;

struct ConvMethod {
  enum class Kind { Auto, Direct, Fft };
  Kind kind = Kind::Auto;
  std::size_t threshold = kDefaultAutoThreshold;
};

ConvShape parse_shape(std::string_view name);
Boundary parse_boundary(std::string_view name);
ConvMethod::Kind parse_method(std::string_view name);
std::string to_string(ConvShape shape);
std::string to_string(Boundary boundary);
std::string to_string(Backend backend);

Dims output_dims(const Dims& signal, const Dims& kernel, ConvShape shape);

// Kernel reversed along every axis.
Tensor reflect(const Tensor& kernel);

// True convolution: the kernel is reflected before the sliding product.
Tensor conv_direct(const Tensor& signal, const Tensor& kernel, ConvShape shape = ConvShape::Full,
                   Boundary boundary = Boundary::Zero);

// Sliding inner product without reflection. This is how edge kernels are
// applied: xcorr(s, k) == conv(s, reflect(k)).
Tensor xcorr_direct(const Tensor& signal, const Tensor& kernel, ConvShape shape = ConvShape::Full,
                    Boundary boundary = Boundary::Zero);

// Convolution through the frequency domain. Inputs are zero padded to a
// power of two per axis of at least m + n - 1.
Tensor conv_fft(const Tensor& signal, const Tensor& kernel, ConvShape shape = ConvShape::Full,
                Boundary boundary = Boundary::Zero);
Tensor xcorr_fft(const Tensor& signal, const Tensor& kernel, ConvShape shape = ConvShape::Full,
                 Boundary boundary = Boundary::Zero);

// Auto picks Direct iff the kernel has fewer than method.threshold elements.
Backend choose_backend(const Dims& kernel, const ConvMethod& method);

struct ConvResult {
  Tensor output;
  Backend backend;
};

ConvResult conv_auto(const Tensor& signal, const Tensor& kernel, ConvShape shape, const ConvMethod& method = {},
                     Boundary boundary = Boundary::Zero);
ConvResult xcorr_auto(const Tensor& signal, const Tensor& kernel, ConvShape shape, const ConvMethod& method = {},
                      Boundary boundary = Boundary::Zero);

namespace detail {

// out = VALID cross-correlation of an already padded signal. Exposed so the
// rank-specialized loops can be checked against the generic walker.
void correlate_valid(const Tensor& padded, const Tensor& kernel, Tensor& out);
void correlate_valid_generic(const Tensor& padded, const Tensor& kernel, Tensor& out);

}  // namespace detail

}  // namespace convtact
