#include "convtact/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "convtact/error.hpp"

namespace convtact {

namespace {

Dims row_major_strides(const Dims& dims) {
  Dims strides(dims.size(), 1);
  for (std::size_t a = dims.size(); a-- > 1;) strides[a - 1] = strides[a] * dims[a];
  return strides;
}

}  // namespace

std::size_t element_count(const Dims& dims) {
  if (dims.empty()) throw DimensionError("tensor needs at least one axis");
  std::size_t n = 1;
  for (std::size_t e : dims) {
    if (e == 0) throw DimensionError("tensor extents must be >= 1");
    if (n > std::numeric_limits<std::size_t>::max() / e) throw DimensionError("tensor extent product overflows");
    n *= e;
  }
  return n;
}

Tensor::Tensor(Dims dims, double fill)
    : dims_(std::move(dims)), strides_(row_major_strides(dims_)), data_(element_count(dims_), fill) {}

Tensor::Tensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), strides_(row_major_strides(dims_)), data_(std::move(data)) {
  if (data_.size() != element_count(dims_)) {
    throw DimensionError("data length " + std::to_string(data_.size()) + " does not match extents");
  }
}

Tensor Tensor::create(std::span<const long long> dims, double fill) {
  Dims d;
  d.reserve(dims.size());
  for (long long e : dims) {
    if (e < 1) throw DimensionError("tensor extents must be >= 1, got " + std::to_string(e));
    d.push_back(static_cast<std::size_t>(e));
  }
  return Tensor(std::move(d), fill);
}

std::size_t Tensor::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw RankError("index rank does not match tensor rank");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < index.size(); ++a) {
    if (index[a] >= dims_[a]) throw ShapeError("index out of range on axis " + std::to_string(a));
    flat += index[a] * strides_[a];
  }
  return flat;
}

Dims Tensor::multi_index(std::size_t flat) const {
  if (flat >= data_.size()) throw ShapeError("flat index out of range");
  Dims index(dims_.size());
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    index[a] = flat / strides_[a];
    flat %= strides_[a];
  }
  return index;
}

Tensor Tensor::plane(std::size_t i) const {
  if (ndim() < 2) throw RankError("plane() needs a tensor of rank >= 2");
  if (i >= dims_[0]) throw ShapeError("plane index out of range");
  Dims sub(dims_.begin() + 1, dims_.end());
  const std::size_t n = strides_[0];
  auto first = data_.begin() + static_cast<std::ptrdiff_t>(i * n);
  return Tensor(std::move(sub), std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)));
}

Tensor Tensor::stack(std::span<const Tensor> planes) {
  if (planes.empty()) throw DimensionError("cannot stack zero tensors");
  const Dims& inner = planes.front().dims();
  Dims dims{planes.size()};
  dims.insert(dims.end(), inner.begin(), inner.end());
  std::vector<double> data;
  data.reserve(element_count(dims));
  for (const Tensor& p : planes) {
    if (p.dims() != inner) throw ShapeError("stacked tensors must share extents");
    data.insert(data.end(), p.data_.begin(), p.data_.end());
  }
  return Tensor(std::move(dims), std::move(data));
}

void require_image(const Tensor& t, const char* what) {
  if (t.ndim() != 2) throw RankError(std::string(what) + " must be a 2-D image");
}

Image transpose(const Image& img) {
  require_image(img, "transpose input");
  const std::size_t h = height(img), w = width(img);
  Image out({w, h});
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) out[x * h + y] = img[y * w + x];
  return out;
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) throw ShapeError("max_abs_diff: extents differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace convtact
