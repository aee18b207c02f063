#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace convtact {

// Extents, outermost axis first. A video stack is {frames, height, width}.
using Dims = std::vector<std::size_t>;

// Dense row-major n-dimensional array of doubles (last index fastest).
// Every tensor has ndim >= 1 and every extent >= 1.
class Tensor {
 public:
  explicit Tensor(Dims dims, double fill = 0.0);
  Tensor(Dims dims, std::vector<double> data);

  // Signed-extent factory for callers that may hold negative values
  // (CLI, bindings); rejects anything < 1.
  static Tensor create(std::span<const long long> dims, double fill = 0.0);

  const Dims& dims() const noexcept { return dims_; }
  const Dims& strides() const noexcept { return strides_; }
  std::size_t ndim() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return dims_.at(axis); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double operator[](std::size_t flat) const noexcept { return data_[flat]; }
  double& operator[](std::size_t flat) noexcept { return data_[flat]; }

  std::size_t flat_index(std::span<const std::size_t> index) const;
  Dims multi_index(std::size_t flat) const;

  double at(std::span<const std::size_t> index) const { return data_[flat_index(index)]; }
  double& at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }
  double& at(std::initializer_list<std::size_t> index) {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  // Copy of the i-th hyperplane along the outermost axis; requires ndim >= 2.
  Tensor plane(std::size_t i) const;

  // Stacks equal-shaped tensors along a new outermost axis.
  static Tensor stack(std::span<const Tensor> planes);

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  Dims dims_;
  Dims strides_;
  std::vector<double> data_;
};

// Product of extents with overflow and zero-extent checks.
std::size_t element_count(const Dims& dims);

// A 2-D tensor; x is the column index, y the row index.
using Image = Tensor;

inline std::size_t height(const Image& img) { return img.extent(0); }
inline std::size_t width(const Image& img) { return img.extent(1); }

// Throws RankError unless t is 2-D.
void require_image(const Tensor& t, const char* what);

Image transpose(const Image& img);

double max_abs(std::span<const double> values);
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace convtact
