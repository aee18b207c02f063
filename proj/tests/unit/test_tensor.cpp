#include <doctest.h>

#include <array>

#include "convtact/error.hpp"
#include "convtact/tensor.hpp"

using namespace convtact;

TEST_CASE("fill constructors") {
  const Tensor a({3});
  CHECK(a.values() == std::vector<double>{0, 0, 0});
  CHECK(a.ndim() == 1);

  const Tensor b({2, 2}, 1.0);
  CHECK(b.values() == std::vector<double>{1, 1, 1, 1});

  const Tensor c({2, 3, 4});
  CHECK(c.size() == 24);
  CHECK(c.ndim() == 3);
  CHECK(max_abs(c.data()) == 0.0);
}

TEST_CASE("bad extents") {
  CHECK_THROWS_AS(Tensor(Dims{}), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
  const std::array<long long, 2> neg{3, -1};
  CHECK_THROWS_AS(Tensor::create(neg), DimensionError);
  const std::array<long long, 2> zero{0, 4};
  CHECK_THROWS_AS(Tensor::create(zero), DimensionError);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(element_count({std::size_t{1} << 40, std::size_t{1} << 40}), DimensionError);
}

TEST_CASE("row-major strides and lookup") {
  Tensor t({2, 3, 4});
  CHECK(t.strides() == Dims{12, 4, 1});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  CHECK(t.at({1, 2, 3}) == 23.0);
  CHECK(t.at({0, 1, 0}) == 4.0);
  CHECK(t.multi_index(17) == Dims{1, 1, 1});
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.flat_index(t.multi_index(i)) == i);
  CHECK_THROWS_AS(t.at({2, 0, 0}), ShapeError);
  CHECK_THROWS_AS(t.at({0, 0}), RankError);
}

TEST_CASE("plane and stack are inverse") {
  Tensor a({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  Tensor b({2, 3}, std::vector<double>{7, 8, 9, 10, 11, 12});
  const std::array<Tensor, 2> planes{a, b};
  const Tensor s = Tensor::stack(planes);
  CHECK(s.dims() == Dims{2, 2, 3});
  CHECK(s.plane(0) == a);
  CHECK(s.plane(1) == b);
  CHECK_THROWS_AS(s.plane(2), ShapeError);
  CHECK_THROWS_AS(Tensor({3}).plane(0), RankError);
  const std::array<Tensor, 2> mismatched{a, Tensor({3, 2})};
  CHECK_THROWS_AS(Tensor::stack(mismatched), ShapeError);
}

TEST_CASE("image helpers") {
  const Image img({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(height(img) == 2);
  CHECK(width(img) == 3);
  const Image t = transpose(img);
  CHECK(t.dims() == Dims{3, 2});
  CHECK(t.values() == std::vector<double>{1, 4, 2, 5, 3, 6});
  CHECK(transpose(t) == img);
  CHECK_THROWS_AS(require_image(Tensor({2, 2, 2}), "x"), RankError);
  CHECK(max_abs_diff(img, img) == 0.0);
  CHECK_THROWS_AS(max_abs_diff(img, t), ShapeError);
}
