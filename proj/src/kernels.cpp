#include "convtact/kernels.hpp"

#include <cmath>

#include "convtact/conv.hpp"
#include "convtact/error.hpp"

namespace convtact {

KernelName parse_kernel_name(std::string_view name) {
  if (name == "roberts") return KernelName::Roberts;
  if (name == "prewitt2") return KernelName::Prewitt2;
  if (name == "prewitt3") return KernelName::Prewitt3;
  if (name == "sobel") return KernelName::Sobel;
  throw LookupError("unknown kernel '" + std::string(name) + "'");
}

std::string to_string(KernelName name) {
  switch (name) {
    case KernelName::Roberts: return "roberts";
    case KernelName::Prewitt2: return "prewitt2";
    case KernelName::Prewitt3: return "prewitt3";
    case KernelName::Sobel: return "sobel";
  }
  return "?";
}

NamedKernel kernel_lookup(KernelName name) {
  switch (name) {
    case KernelName::Roberts:
      return {name, Tensor({2, 2}, {1, 0, 0, -1}), Tensor({2, 2}, {0, 1, -1, 0})};
    case KernelName::Prewitt2: {
      Tensor kx({2, 2}, {-0.5, 0.5, -0.5, 0.5});
      return {name, kx, transpose(kx)};
    }
    case KernelName::Prewitt3: {
      Tensor kx({3, 3}, {-1, 0, 1, -1, 0, 1, -1, 0, 1});
      return {name, kx, transpose(kx)};
    }
    case KernelName::Sobel: {
      Tensor kx({3, 3}, {-1, 0, 1, -2, 0, 2, -1, 0, 1});
      return {name, kx, transpose(kx)};
    }
  }
  throw LookupError("unknown kernel");
}

NamedKernel kernel_lookup(std::string_view name) { return kernel_lookup(parse_kernel_name(name)); }

GradientField gradient_from_components(Image ex, Image ey) {
  require_image(ex, "ex");
  if (ex.dims() != ey.dims()) throw ShapeError("ex and ey extents differ");
  Image mag(ex.dims()), dir(ex.dims());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    mag[i] = std::sqrt(ex[i] * ex[i] + ey[i] * ey[i]);
    // Signed zeros would otherwise give atan2(+-0, -0) == +-pi.
    dir[i] = (ex[i] == 0.0 && ey[i] == 0.0) ? 0.0 : std::atan2(ey[i], ex[i]);
  }
  return {std::move(ex), std::move(ey), std::move(mag), std::move(dir)};
}

GradientField gradient(const Image& img, const NamedKernel& kernel) {
  require_image(img, "gradient input");
  for (std::size_t a = 0; a < 2; ++a) {
    if (img.extent(a) < kernel.kx.extent(a) || img.extent(a) < 2) {
      throw ShapeError("image is smaller than the " + to_string(kernel.name) + " kernel");
    }
  }
  Image ex = xcorr_direct(img, kernel.kx, ConvShape::Same, Boundary::Replicate);
  Image ey = xcorr_direct(img, kernel.ky, ConvShape::Same, Boundary::Replicate);
  return gradient_from_components(std::move(ex), std::move(ey));
}

}  // namespace convtact
