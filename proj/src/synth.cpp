#include "convtact/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "convtact/conv.hpp"
#include "convtact/csv.hpp"
#include "convtact/error.hpp"
#include "convtact/io.hpp"
#include "convtact/rng.hpp"

namespace convtact {

namespace {

// Separates the texture stream from the noise stream of the same seed.
constexpr std::uint64_t kNoiseStream = 0x6a09e667f3bcc909ULL;

double catmull_rom(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// Four source indices (clamped) and weights for one output coordinate.
struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

Taps taps_for(double s, std::size_t extent) {
  const double base = std::floor(s);
  const double frac = s - base;
  Taps t{};
  const auto last = static_cast<long long>(extent) - 1;
  for (int k = 0; k < 4; ++k) {
    const auto i = static_cast<long long>(base) + k - 1;
    t.index[k] = static_cast<std::size_t>(std::clamp(i, 0LL, last));
    t.weight[k] = catmull_rom(frac - (k - 1));
  }
  return t;
}

}  // namespace

Image make_texture(std::size_t width, std::size_t height, std::uint64_t seed, int passes) {
  if (width < 16 || height < 16) throw ShapeError("texture extents must be >= 16");
  if (passes < 0) throw DomainError("texture smoothing passes must be >= 0");
  Rng rng(seed);
  Image tex({height, width});
  for (double& v : tex.data()) v = rng.uniform();
  static const Tensor binomial({3, 3}, {1.0 / 16, 2.0 / 16, 1.0 / 16, 2.0 / 16, 4.0 / 16, 2.0 / 16, 1.0 / 16,
                                        2.0 / 16, 1.0 / 16});
  for (int p = 0; p < passes; ++p) tex = xcorr_direct(tex, binomial, ConvShape::Same, Boundary::Replicate);
  const auto [lo, hi] = std::minmax_element(tex.data().begin(), tex.data().end());
  const double min = *lo, range = *hi - *lo;
  if (!(range > 0.0)) throw DomainError("texture has no contrast");
  for (double& v : tex.data()) v = (v - min) / range;
  return tex;
}

Image zoom_frame(const Image& texture, double foe_x, double foe_y, double magnification) {
  require_image(texture, "texture");
  if (!(magnification >= 1.0) || !std::isfinite(magnification)) throw DomainError("magnification must be >= 1");
  const std::size_t h = height(texture), w = width(texture);
  std::vector<Taps> cols(w), rows(h);
  for (std::size_t x = 0; x < w; ++x) cols[x] = taps_for(foe_x + (static_cast<double>(x) - foe_x) / magnification, w);
  for (std::size_t y = 0; y < h; ++y) rows[y] = taps_for(foe_y + (static_cast<double>(y) - foe_y) / magnification, h);

  Image out({h, w});
  const double* src = texture.data().data();
  for (std::size_t y = 0; y < h; ++y) {
    const Taps& ty = rows[y];
    for (std::size_t x = 0; x < w; ++x) {
      const Taps& tx = cols[x];
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) {
        const double* row = src + ty.index[j] * w;
        const double across = tx.weight[0] * row[tx.index[0]] + tx.weight[1] * row[tx.index[1]] +
                              tx.weight[2] * row[tx.index[2]] + tx.weight[3] * row[tx.index[3]];
        acc += ty.weight[j] * across;
      }
      out[y * w + x] = acc;
    }
  }
  return out;
}

SyntheticSequence generate(const SynthConfig& cfg) {
  if (cfg.frames < 1) throw ConfigError("need at least one frame");
  if (!(static_cast<double>(cfg.frames) < cfg.t0)) throw ConfigError("frame count must be below t0");
  if (!(cfg.foe_x > 0.0 && cfg.foe_x < 1.0 && cfg.foe_y > 0.0 && cfg.foe_y < 1.0)) {
    throw ConfigError("FOE fractions must lie in (0, 1)");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");

  const Image texture = make_texture(cfg.width, cfg.height, cfg.seed, cfg.texture_passes);
  const double fx = cfg.foe_x * static_cast<double>(cfg.width);
  const double fy = cfg.foe_y * static_cast<double>(cfg.height);
  Rng noise(cfg.seed ^ kNoiseStream);

  SyntheticSequence seq{Tensor({cfg.frames, cfg.height, cfg.width}), {}};
  const std::size_t plane = cfg.height * cfg.width;
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    const double td = static_cast<double>(t);
    Image frame = t == 0 ? texture : zoom_frame(texture, fx, fy, cfg.t0 / (cfg.t0 - td));
    double* dst = seq.frames.data().data() + t * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      double v = frame[i];
      if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * noise.normal();
      dst[i] = std::clamp(v, 0.0, 1.0);
    }
    seq.truth.push_back({t, cfg.t0 - td, fx, fy});
  }
  return seq;
}

void write_sequence(const SyntheticSequence& seq, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t t = 0; t < seq.frames.extent(0); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.pgm", t);
    write_pgm(dir / name, seq.frames.plane(t), 65535);
  }
  write_truth_csv(dir / "truth.csv", seq.truth);
}

void write_truth_csv(const std::filesystem::path& path, const std::vector<TruthRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << kTruthHeader << '\n';
  for (const TruthRow& r : rows) {
    out << r.frame << ',' << csv::format_real(r.ttc) << ',' << csv::format_real(r.foe_x) << ','
        << csv::format_real(r.foe_y) << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path) {
  std::vector<TruthRow> rows;
  for (const auto& f : csv::read(path, kTruthHeader)) {
    const long long frame = csv::parse_int(f[0]);
    if (frame < 0) throw FormatError("negative frame index in " + path.string(), 0);
    rows.push_back({static_cast<std::size_t>(frame), csv::parse_real(f[1]), csv::parse_real(f[2]),
                    csv::parse_real(f[3])});
  }
  return rows;
}

MseReport score_mse(const std::vector<TraceRow>& pred, const std::vector<TruthRow>& truth) {
  std::unordered_map<std::size_t, double> truth_ttc;
  for (const TruthRow& r : truth) truth_ttc[r.frame] = r.ttc;
  MseReport report;
  double sum = 0.0;
  for (const TraceRow& p : pred) {
    const auto it = truth_ttc.find(p.frame);
    if (it == truth_ttc.end()) throw ScoringError("no ground truth for frame " + std::to_string(p.frame));
    if (p.estimate.degenerate || !std::isfinite(p.estimate.ttc)) {
      ++report.excluded;
      continue;
    }
    const double e = p.estimate.ttc - it->second;
    sum += e * e;
    ++report.compared;
  }
  if (report.compared == 0) throw ScoringError("no comparable frames");
  report.mse = sum / static_cast<double>(report.compared);
  return report;
}

MseReport score_mse(const std::filesystem::path& pred_csv, const std::filesystem::path& truth_csv) {
  return score_mse(read_trace_csv(pred_csv), read_truth_csv(truth_csv));
}

}  // namespace convtact
