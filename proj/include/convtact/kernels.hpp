#pragma once

#include <string>
#include <string_view>

#include "convtact/tensor.hpp"

namespace convtact {

enum class KernelName { Roberts, Prewitt2, Prewitt3, Sobel };

// A derivative kernel pair. For Roberts, kx and ky are the two diagonal masks.
struct NamedKernel {
  KernelName name;
  Tensor kx;
  Tensor ky;
};

KernelName parse_kernel_name(std::string_view name);
std::string to_string(KernelName name);

NamedKernel kernel_lookup(KernelName name);
NamedKernel kernel_lookup(std::string_view name);

struct GradientField {
  Image ex;
  Image ey;
  Image mag;  // sqrt(ex^2 + ey^2)
  Image dir;  // atan2(ey, ex) in [-pi, pi]; atan2(0, 0) == 0
};

// Applies kx and ky by cross-correlation (no flip), SAME extents, replicate
// boundary. Unnormalized: Sobel responds with 4 to a unit step.
GradientField gradient(const Image& img, const NamedKernel& kernel);

// Magnitude and direction from precomputed components.
GradientField gradient_from_components(Image ex, Image ey);

}  // namespace convtact
