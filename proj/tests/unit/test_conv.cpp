#include <doctest.h>

#include "convtact/conv.hpp"
#include "convtact/error.hpp"
#include "oracle.hpp"

using namespace convtact;

namespace {

Tensor vec(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor({n}, std::move(v));
}

const ConvShape kShapes[] = {ConvShape::Full, ConvShape::Same, ConvShape::Valid};
const Boundary kBoundaries[] = {Boundary::Zero, Boundary::Replicate};

}  // namespace

TEST_CASE("hand-computed convolutions") {
  CHECK(conv_direct(vec({1, 2, 3}), vec({1})).values() == std::vector<double>{1, 2, 3});
  CHECK(conv_direct(vec({1, 2, 3}), vec({1, 1})).values() == std::vector<double>{1, 3, 5, 3});
  const Tensor s({2, 2}, std::vector<double>{1, 2, 3, 4});
  const Tensor k({2, 2}, std::vector<double>{1, 0, 0, 1});
  const Tensor full = conv_direct(s, k);
  CHECK(full.dims() == Dims{3, 3});
  CHECK(full.values() == std::vector<double>{1, 2, 0, 3, 5, 2, 0, 3, 4});
  CHECK(xcorr_direct(vec({1, 2, 3}), vec({-1, 1}), ConvShape::Valid).values() == std::vector<double>{1, 1});
}

TEST_CASE("FFT path on the hand examples") {
  const Tensor r = conv_fft(vec({1, 2, 3}), vec({1, 1}));
  const std::vector<double> want{1, 3, 5, 3};
  for (std::size_t i = 0; i < 4; ++i) CHECK(r[i] == doctest::Approx(want[i]).epsilon(1e-10));

  Rng rng(8);
  const Tensor x = oracle::random_tensor({50}, rng);
  const Tensor same = conv_fft(x, vec({0, 1, 0}), ConvShape::Same);
  CHECK(max_abs_diff(same, x) < 1e-10);
}

TEST_CASE("output extents") {
  CHECK(output_dims({10, 7}, {3, 4}, ConvShape::Full) == Dims{12, 10});
  CHECK(output_dims({10, 7}, {3, 4}, ConvShape::Same) == Dims{10, 7});
  CHECK(output_dims({10, 7}, {3, 4}, ConvShape::Valid) == Dims{8, 4});
  CHECK_THROWS_AS(output_dims({2, 7}, {3, 4}, ConvShape::Valid), ShapeError);
  CHECK_THROWS_AS(output_dims({2, 7}, {3}, ConvShape::Full), RankError);
}

TEST_CASE("errors propagate through every backend") {
  const Tensor a({4, 4}), b({3}), big({5, 5});
  CHECK_THROWS_AS(conv_direct(a, b), RankError);
  CHECK_THROWS_AS(conv_fft(a, b), RankError);
  CHECK_THROWS_AS(xcorr_direct(a, big, ConvShape::Valid), ShapeError);
  CHECK_THROWS_AS(xcorr_fft(a, big, ConvShape::Valid), ShapeError);
  CHECK_THROWS_AS(conv_auto(a, b, ConvShape::Full), RankError);
}

TEST_CASE("zero kernel annihilates") {
  Rng rng(9);
  const Tensor x = oracle::random_tensor({6, 5}, rng);
  const Tensor z({3, 2});
  for (ConvShape shape : kShapes) {
    for (Boundary b : kBoundaries) {
      const Tensor d = conv_direct(x, z, shape, b);
      CHECK(d.dims() == output_dims(x.dims(), z.dims(), shape));
      CHECK(max_abs(d.data()) == 0.0);
      CHECK(max_abs(conv_fft(x, z, shape, b).data()) == 0.0);
    }
  }
}

TEST_CASE("direct matches the sliding-sum oracle in every mode") {
  Rng rng(10);
  for (std::size_t nd = 1; nd <= 5; ++nd) {
    for (int c = 0; c < 30; ++c) {
      const std::size_t max_extent = nd >= 4 ? 4 : 7;
      const Tensor x = oracle::random_tensor(oracle::random_dims(nd, max_extent, rng), rng);
      const Tensor k = oracle::random_tensor(oracle::random_dims(nd, max_extent, rng), rng);
      for (ConvShape shape : kShapes) {
        bool fits = true;
        for (std::size_t a = 0; a < nd; ++a) fits = fits && x.extent(a) >= k.extent(a);
        if (shape == ConvShape::Valid && !fits) continue;
        for (Boundary b : kBoundaries) {
          CHECK(max_abs_diff(conv_direct(x, k, shape, b), oracle::conv(x, k, shape, b)) < 1e-12);
          CHECK(max_abs_diff(xcorr_direct(x, k, shape, b), oracle::xcorr(x, k, shape, b)) < 1e-12);
          CHECK(oracle::rel_inf(conv_fft(x, k, shape, b), oracle::conv(x, k, shape, b)) < 1e-10);
          CHECK(oracle::rel_inf(xcorr_fft(x, k, shape, b), oracle::xcorr(x, k, shape, b)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("rank-specialized loops agree with the generic walker") {
  Rng rng(11);
  for (std::size_t nd = 1; nd <= 4; ++nd) {
    for (int c = 0; c < 20; ++c) {
      const Tensor k = oracle::random_tensor(oracle::random_dims(nd, 5, rng), rng);
      Dims pd = k.dims();
      for (auto& e : pd) e += rng.next() % 9;
      const Tensor padded = oracle::random_tensor(pd, rng);
      Tensor fast(output_dims(pd, k.dims(), ConvShape::Valid));
      Tensor slow = fast;
      detail::correlate_valid(padded, k, fast);
      detail::correlate_valid_generic(padded, k, slow);
      CHECK(max_abs_diff(fast, slow) < 1e-13);
    }
  }
}

TEST_CASE("correlation is convolution with the reflected kernel") {
  Rng rng(12);
  for (int c = 0; c < 10; ++c) {
    const Tensor x = oracle::random_tensor(oracle::random_dims(3, 6, rng), rng);
    const Tensor k = oracle::random_tensor(oracle::random_dims(3, 4, rng), rng);
    for (ConvShape shape : {ConvShape::Full, ConvShape::Same}) {
      CHECK(max_abs_diff(xcorr_direct(x, k, shape), conv_direct(x, reflect(k), shape)) < 1e-14);
    }
  }
  const Tensor box({3, 3}, 1.0 / 9);
  const Tensor x = oracle::random_tensor({8, 8}, rng);
  CHECK(xcorr_direct(x, box, ConvShape::Same) == conv_direct(x, box, ConvShape::Same));
  CHECK(reflect(vec({1, 2, 3})).values() == std::vector<double>{3, 2, 1});
}

TEST_CASE("even kernels anchor SAME at (n-1)/2") {
  // SAME(i) == FULL(i + (n-1)/2); for n = 4 that is FULL(i + 1).
  const Tensor x = vec({1, 2, 3, 4, 5});
  const Tensor k = vec({1, 10, 100, 1000});
  const Tensor full = conv_direct(x, k);
  const Tensor same = conv_direct(x, k, ConvShape::Same);
  for (std::size_t i = 0; i < 5; ++i) CHECK(same[i] == full[i + 1]);
}

TEST_CASE("replicate boundary clamps reads") {
  const Tensor x = vec({1, 2, 3});
  const Tensor r = xcorr_direct(x, vec({1, 1, 1}), ConvShape::Same, Boundary::Replicate);
  CHECK(r.values() == std::vector<double>{4, 6, 8});
  const Tensor z = xcorr_direct(x, vec({1, 1, 1}), ConvShape::Same, Boundary::Zero);
  CHECK(z.values() == std::vector<double>{3, 6, 5});
}

TEST_CASE("FFT agrees with direct on a 64x64 random case") {
  Rng rng(13);
  const Tensor x = oracle::random_tensor({64, 64}, rng);
  const Tensor k = oracle::random_tensor({5, 5}, rng);
  CHECK(oracle::rel_inf(conv_fft(x, k), conv_direct(x, k)) < 1e-8);
  // Wildly different magnitudes still resolve both inputs.
  Tensor tiny = k;
  for (double& v : tiny.data()) v *= 1e-9;
  CHECK(oracle::rel_inf(conv_fft(x, tiny), conv_direct(x, tiny)) < 1e-8);
}

TEST_CASE("names round trip") {
  for (ConvShape s : kShapes) CHECK(parse_shape(to_string(s)) == s);
  for (Boundary b : kBoundaries) CHECK(parse_boundary(to_string(b)) == b);
  CHECK(to_string(Backend::Direct) == "direct");
  CHECK(to_string(Backend::Fft) == "fft");
  CHECK(parse_method("auto") == ConvMethod::Kind::Auto);
  CHECK(parse_method("fft") == ConvMethod::Kind::Fft);
  CHECK_THROWS_AS(parse_shape("circular"), LookupError);
  CHECK_THROWS_AS(parse_boundary("mirror"), LookupError);
  CHECK_THROWS_AS(parse_method("winograd"), LookupError);
}

TEST_CASE("dispatch") {
  const ConvMethod autom;
  CHECK(choose_backend({3, 3}, autom) == Backend::Direct);
  CHECK(choose_backend({64, 64}, autom) == Backend::Fft);
  CHECK(choose_backend({29, 31}, autom) == Backend::Direct);
  CHECK(choose_backend({30, 30}, autom) == Backend::Fft);
  CHECK(choose_backend({64, 64}, ConvMethod{ConvMethod::Kind::Direct, 900}) == Backend::Direct);
  CHECK(choose_backend({1}, ConvMethod{ConvMethod::Kind::Fft, 900}) == Backend::Fft);
  CHECK(choose_backend({4}, ConvMethod{ConvMethod::Kind::Auto, 4}) == Backend::Fft);
  CHECK(choose_backend({3}, ConvMethod{ConvMethod::Kind::Auto, 4}) == Backend::Direct);
  CHECK_THROWS_AS(choose_backend({3}, ConvMethod{ConvMethod::Kind::Auto, 0}), ConfigError);

  Rng rng(14);
  const Tensor x = oracle::random_tensor({20, 20}, rng);
  const Tensor k = oracle::random_tensor({3, 3}, rng);
  const ConvResult d = conv_auto(x, k, ConvShape::Same);
  CHECK(d.backend == Backend::Direct);
  CHECK(d.output == conv_direct(x, k, ConvShape::Same));
  const ConvResult f = xcorr_auto(x, k, ConvShape::Same, ConvMethod{ConvMethod::Kind::Auto, 9});
  CHECK(f.backend == Backend::Fft);
  CHECK(f.output == xcorr_fft(x, k, ConvShape::Same));
}
