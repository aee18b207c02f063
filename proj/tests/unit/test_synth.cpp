#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "convtact/error.hpp"
#include "convtact/io.hpp"
#include "convtact/synth.hpp"

using namespace convtact;

namespace {

// Sub-pixel column of the brightest pixel in a row, by parabola fit.
double peak_column(const Image& img, std::size_t row, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t x = lo; x < hi; ++x)
    if (img.at({row, x}) > img.at({row, best})) best = x;
  const double l = img.at({row, best - 1}), c = img.at({row, best}), r = img.at({row, best + 1});
  return static_cast<double>(best) + 0.5 * (l - r) / (l - 2 * c + r);
}

}  // namespace

TEST_CASE("texture") {
  const Image a = make_texture(40, 30, 9), b = make_texture(40, 30, 9), c = make_texture(40, 30, 10);
  CHECK(a.dims() == Dims{30, 40});
  CHECK(a == b);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i] != c[i];
  CHECK(differ * 2 >= a.size());
  const auto [lo, hi] = std::minmax_element(a.data().begin(), a.data().end());
  CHECK(*lo == 0.0);
  CHECK(*hi == 1.0);
  CHECK_THROWS_AS(make_texture(15, 30, 1), ShapeError);
  CHECK_THROWS_AS(make_texture(30, 15, 1), ShapeError);
}

TEST_CASE("zoom identity and fixed point") {
  const Image tex = make_texture(32, 24, 2, 2);
  CHECK(max_abs_diff(zoom_frame(tex, 10.3, 7.9, 1.0), tex) < 1e-12);
  for (double mag : {1.1, 1.5, 3.0}) {
    CHECK(zoom_frame(tex, 12.0, 9.0, mag).at({9, 12}) == doctest::Approx(tex.at({9, 12})).epsilon(1e-12));
  }
  CHECK_THROWS_AS(zoom_frame(tex, 12, 9, 0.9), DomainError);
  CHECK_THROWS_AS(zoom_frame(tex, 12, 9, NAN), DomainError);
}

TEST_CASE("zoom separates points by the magnification") {
  Image blobs({40, 80});
  const double cx = 40.0, cy = 20.0;
  for (std::size_t y = 0; y < 40; ++y)
    for (std::size_t x = 0; x < 80; ++x) {
      const double dy = static_cast<double>(y) - cy;
      for (double bx : {cx - 10.0, cx + 10.0}) {
        const double dx = static_cast<double>(x) - bx;
        blobs.at({y, x}) += std::exp(-(dx * dx + dy * dy) / (2 * 2.5 * 2.5));
      }
    }
  for (double mag : {1.2, 1.5}) {
    const Image z = zoom_frame(blobs, cx, cy, mag);
    const double left = peak_column(z, 20, 5, 39), right = peak_column(z, 20, 41, 75);
    CHECK((right - left) / 20.0 == doctest::Approx(mag).epsilon(0.01));
  }
}

TEST_CASE("generated sequence") {
  SynthConfig cfg;
  cfg.width = 48;
  cfg.height = 32;
  cfg.frames = 5;
  cfg.t0 = 10;
  const SyntheticSequence s = generate(cfg);
  CHECK(s.frames.dims() == Dims{5, 32, 48});
  CHECK(s.frames.plane(0) == make_texture(48, 32, cfg.seed));
  REQUIRE(s.truth.size() == 5);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(s.truth[t].frame == t);
    CHECK(s.truth[t].ttc == 10.0 - static_cast<double>(t));
    CHECK(s.truth[t].foe_x == doctest::Approx(0.4 * 48));
    CHECK(s.truth[t].foe_y == doctest::Approx(0.55 * 32));
  }
  cfg.noise_sigma = 0.1;
  const SyntheticSequence n1 = generate(cfg), n2 = generate(cfg);
  CHECK(n1.frames == n2.frames);
  CHECK_FALSE(n1.frames == s.frames);
  for (double v : n1.frames.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("generator config errors") {
  SynthConfig cfg;
  cfg.frames = 100;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg = {};
  cfg.frames = 0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg = {};
  cfg.foe_x = 1.0;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg = {};
  cfg.noise_sigma = -1;
  CHECK_THROWS_AS(generate(cfg), ConfigError);
  cfg = {};
  cfg.width = 8;
  CHECK_THROWS_AS(generate(cfg), ShapeError);
}

TEST_CASE("written sequence") {
  const auto dir = std::filesystem::temp_directory_path() / "convtact_synth_test";
  std::filesystem::remove_all(dir);
  SynthConfig cfg;
  cfg.width = 20;
  cfg.height = 16;
  cfg.frames = 3;
  const SyntheticSequence s = generate(cfg);
  write_sequence(s, dir);
  CHECK(std::filesystem::exists(dir / "frame_000000.pgm"));
  CHECK(std::filesystem::exists(dir / "frame_000002.pgm"));
  CHECK(std::filesystem::exists(dir / "truth.csv"));
  CHECK(max_abs_diff(read_pgm(dir / "frame_000001.pgm"), s.frames.plane(1)) <= 0.5 / 65535 + 1e-12);
  const auto truth = read_truth_csv(dir / "truth.csv");
  REQUIRE(truth.size() == 3);
  CHECK(truth[2].ttc == s.truth[2].ttc);
  CHECK(truth[2].foe_x == s.truth[2].foe_x);
  std::filesystem::remove_all(dir);
}

TEST_CASE("MSE scoring") {
  std::vector<TruthRow> truth;
  std::vector<TraceRow> pred;
  for (std::size_t t = 0; t < 4; ++t) {
    truth.push_back({t, 50.0 - static_cast<double>(t), 1, 1});
    TraceRow r;
    r.frame = t;
    r.estimate.ttc = truth.back().ttc;
    pred.push_back(r);
  }
  CHECK(score_mse(pred, truth).mse == 0.0);
  for (auto& r : pred) r.estimate.ttc += 1.0;
  MseReport rep = score_mse(pred, truth);
  CHECK(rep.mse == 1.0);
  CHECK(rep.compared == 4);

  pred[1].estimate.ttc = INFINITY;
  pred[2].estimate.degenerate = true;
  rep = score_mse(pred, truth);
  CHECK(rep.compared == 2);
  CHECK(rep.excluded == 2);

  for (auto& r : pred) r.estimate.degenerate = true;
  CHECK_THROWS_AS(score_mse(pred, truth), ScoringError);
  TraceRow orphan;
  orphan.frame = 99;
  CHECK_THROWS_AS(score_mse({orphan}, truth), ScoringError);
}
