#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "convtact/tensor.hpp"
#include "convtact/ttc.hpp"

namespace convtact {

// Binomial smoothing passes applied to the white-noise texture. Enough to
// keep the texture spectrum well below Nyquist at the first few pyramid levels.
inline constexpr int kTexturePasses = 24;

struct SynthConfig {
  std::size_t width = 256;
  std::size_t height = 256;
  std::size_t frames = 60;
  double t0 = 100.0;     // TTC of frame 0, in frames
  double foe_x = 0.4;    // zoom center as a fraction of width
  double foe_y = 0.55;   // ... and of height
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;
  int texture_passes = kTexturePasses;
};

struct TruthRow {
  std::size_t frame = 0;
  double ttc = 0.0;
  double foe_x = 0.0;  // pixels
  double foe_y = 0.0;
};

struct SyntheticSequence {
  Tensor frames;  // {N, height, width}
  std::vector<TruthRow> truth;
};

// Seeded white noise, smoothed by `passes` 3x3 binomial passes, rescaled to [0,1].
Image make_texture(std::size_t width, std::size_t height, std::uint64_t seed, int passes = kTexturePasses);

// Output pixel p samples the texture at foe + (p - foe) / magnification with
// Catmull-Rom bicubic interpolation (a = -0.5) and replicate boundary.
Image zoom_frame(const Image& texture, double foe_x, double foe_y, double magnification);

// Frame t is the texture magnified by t0 / (t0 - t) about the FOE, plus
// Gaussian noise, clamped to [0,1]. Ground-truth TTC of frame t is t0 - t.
SyntheticSequence generate(const SynthConfig& cfg);

// frame_000000.pgm ... (16-bit) plus truth.csv.
void write_sequence(const SyntheticSequence& seq, const std::filesystem::path& dir);

inline constexpr const char* kTruthHeader = "frame,ttc,foe_x,foe_y";

void write_truth_csv(const std::filesystem::path& path, const std::vector<TruthRow>& rows);
std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path);

struct MseReport {
  double mse = 0.0;
  std::size_t compared = 0;
  std::size_t excluded = 0;  // degenerate or non-finite predictions
};

MseReport score_mse(const std::vector<TraceRow>& pred, const std::vector<TruthRow>& truth);
MseReport score_mse(const std::filesystem::path& pred_csv, const std::filesystem::path& truth_csv);

}  // namespace convtact
