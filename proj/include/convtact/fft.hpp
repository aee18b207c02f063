#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "convtact/tensor.hpp"

namespace convtact::fft {

enum class Direction { Forward, Inverse };

bool is_pow2(std::size_t n) noexcept;
std::size_t next_pow2(std::size_t n);

// In-place n-D complex transform over a row-major buffer. Every extent must
// be a power of two. The inverse is unnormalized; divide by the element
// count to invert a forward transform.
void transform(std::span<std::complex<double>> data, const Dims& dims, Direction dir);

}  // namespace convtact::fft
