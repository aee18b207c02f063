#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "convtact/tensor.hpp"

namespace convtact {

// Time to contact and focus of expansion from a pair of frames, using the
// brightness constancy constraint A*Ex + B*Ey + C*G + Et = 0 with the radial
// gradient G = x*Ex + y*Ey. Coordinates are pixels about the image center,
// x to the right and y down.

struct TtcOptions {
  double c_min = 1e-9;             // |C| below this (1/frame) means no approach: ttc = +inf
  double pivot_tolerance = 1e-10;  // relative to the largest diagonal entry
  std::size_t border = 1;          // pixels excluded on each side of the sums
  double multiscale_margin = 1e-3; // relative |ttc| drop required to go one level deeper
};

struct FramePair {
  Image e0;
  Image e1;
  std::size_t frame_index = 0;
};

struct Derivatives {
  Image ex;
  Image ey;
  Image et;
};

struct NormalSystem {
  std::array<std::array<double, 3>, 3> m{};  // Gram matrix of [Ex, Ey, G]
  std::array<double, 3> rhs{};               // -sum([Ex, Ey, G] * Et)
  double et_squared = 0.0;                   // sum Et^2, the objective at A = B = C = 0
  std::size_t count = 0;                     // pixels summed
};

struct TtcEstimate {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double x0 = 0.0;  // FOE, original-image pixels about the center; NaN if undefined
  double y0 = 0.0;
  double ttc = 0.0; // frames; +inf when |c| < c_min or degenerate
  double residual = 0.0;  // least-squares objective / pixels summed
  int level = 0;
  bool degenerate = false;
};

// Cube-difference estimates over each 2x2x2 neighborhood of the stacked pair.
// Outputs are (h-1) x (w-1), located half a pixel right/down of the inputs.
Derivatives derivatives_3d(const Image& e0, const Image& e1);

Image radial_gradient(const Image& ex, const Image& ey);

NormalSystem build_normal_system(const Image& ex, const Image& ey, const Image& g, const Image& et,
                                 std::size_t border);

TtcEstimate solve_ttc(const NormalSystem& sys, const TtcOptions& opts = {});

// 3x3 binomial low-pass (replicate boundary) then 2x2 block average.
Image downsample(const Image& img);

// Smallest frame extent any level may reach.
inline constexpr std::size_t kMinLevelExtent = 4;

bool level_fits(std::size_t width, std::size_t height, int level);

TtcEstimate estimate_fixed(const Image& e0, const Image& e1, int level, const TtcOptions& opts = {});

// Greedy search over downsampling levels starting at 0. Goes one level
// deeper while |ttc| keeps shrinking by more than opts.multiscale_margin and
// returns the last estimate that did. Noise and aliasing both inflate |ttc|,
// so the first level where it stops shrinking is the best supported scale.
TtcEstimate estimate_multiscale(const Image& e0, const Image& e1, int max_level, const TtcOptions& opts = {});

struct SequenceMode {
  bool multiscale = false;
  int level = 0;  // fixed level, or the maximum level when multiscale
};

struct TraceRow {
  std::size_t frame = 0;
  TtcEstimate estimate;
  double foe_x = 0.0;  // absolute pixel coordinates (column, row) in the full frame
  double foe_y = 0.0;
};

// frames is {N, height, width}; one row per consecutive pair.
std::vector<TraceRow> run_sequence(const Tensor& frames, const SequenceMode& mode, const TtcOptions& opts = {});

inline constexpr const char* kTraceHeader = "frame,ttc,foe_x,foe_y,residual,level,degenerate";

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

// A directory of frame_NNNNNN.pgm files (sorted by number) or a 3-D NDT file.
Tensor load_frames(const std::filesystem::path& path);

}  // namespace convtact
