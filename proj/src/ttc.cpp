#include "convtact/ttc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <regex>

#include "convtact/conv.hpp"
#include "convtact/csv.hpp"
#include "convtact/error.hpp"
#include "convtact/io.hpp"

namespace convtact {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// 2x2x2 difference stencil along one axis of the {t, y, x} stack.
Tensor cube_stencil(std::size_t axis) {
  Tensor k({2, 2, 2});
  for (std::size_t flat = 0; flat < k.size(); ++flat) {
    const Dims idx = k.multi_index(flat);
    k[flat] = idx[axis] == 1 ? 0.25 : -0.25;
  }
  return k;
}

void require_same(const Image& a, const Image& b, const char* what) {
  require_image(a, what);
  require_image(b, what);
  if (a.dims() != b.dims()) throw ShapeError(std::string(what) + ": extents differ");
}

TtcEstimate estimate_from_level(const Image& e0, const Image& e1, int level, const TtcOptions& opts) {
  const Derivatives d = derivatives_3d(e0, e1);
  const Image g = radial_gradient(d.ex, d.ey);
  const NormalSystem sys = build_normal_system(d.ex, d.ey, g, d.et, opts.border);
  TtcEstimate est = solve_ttc(sys, opts);
  const double scale = std::ldexp(1.0, level);
  est.x0 *= scale;
  est.y0 *= scale;
  est.level = level;
  return est;
}

// |ttc| comparison for the multi-scale search; non-finite never improves.
bool improves(const TtcEstimate& next, const TtcEstimate& best, double margin) {
  if (next.degenerate || !std::isfinite(next.ttc)) return false;
  if (best.degenerate || !std::isfinite(best.ttc)) return true;
  return std::abs(next.ttc) < std::abs(best.ttc) * (1.0 - margin);
}

}  // namespace

Derivatives derivatives_3d(const Image& e0, const Image& e1) {
  require_same(e0, e1, "frame pair");
  if (height(e0) < 2 || width(e0) < 2) throw ShapeError("frames must be at least 2x2");
  const std::array<Tensor, 2> planes{e0, e1};
  const Tensor stack = Tensor::stack(planes);
  auto apply = [&](std::size_t axis) {
    return xcorr_direct(stack, cube_stencil(axis), ConvShape::Valid).plane(0);
  };
  return {apply(2), apply(1), apply(0)};
}

Image radial_gradient(const Image& ex, const Image& ey) {
  require_same(ex, ey, "radial_gradient");
  const std::size_t h = height(ex), w = width(ex);
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  Image g(ex.dims());
  for (std::size_t y = 0; y < h; ++y) {
    const double yc = static_cast<double>(y) - cy;
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      g[i] = (static_cast<double>(x) - cx) * ex[i] + yc * ey[i];
    }
  }
  return g;
}

NormalSystem build_normal_system(const Image& ex, const Image& ey, const Image& g, const Image& et,
                                 std::size_t border) {
  require_same(ex, ey, "normal system");
  require_same(ex, g, "normal system");
  require_same(ex, et, "normal system");
  const std::size_t h = height(ex), w = width(ex);
  if (2 * border >= h || 2 * border >= w) throw ShapeError("interior region is empty");

  NormalSystem sys;
  double sxx = 0, sxy = 0, sxg = 0, syy = 0, syg = 0, sgg = 0, sxt = 0, syt = 0, sgt = 0, stt = 0;
  for (std::size_t y = border; y < h - border; ++y) {
    for (std::size_t x = border; x < w - border; ++x) {
      const std::size_t i = y * w + x;
      const double vx = ex[i], vy = ey[i], vg = g[i], vt = et[i];
      sxx += vx * vx;
      sxy += vx * vy;
      sxg += vx * vg;
      syy += vy * vy;
      syg += vy * vg;
      sgg += vg * vg;
      sxt += vx * vt;
      syt += vy * vt;
      sgt += vg * vt;
      stt += vt * vt;
    }
  }
  sys.m = {{{sxx, sxy, sxg}, {sxy, syy, syg}, {sxg, syg, sgg}}};
  sys.rhs = {-sxt, -syt, -sgt};
  sys.et_squared = stt;
  sys.count = (h - 2 * border) * (w - 2 * border);
  return sys;
}

TtcEstimate solve_ttc(const NormalSystem& sys, const TtcOptions& opts) {
  const auto& m = sys.m;
  const double n = sys.count > 0 ? static_cast<double>(sys.count) : 1.0;

  TtcEstimate degenerate;
  degenerate.degenerate = true;
  degenerate.ttc = kInf;
  degenerate.x0 = degenerate.y0 = kNaN;
  degenerate.residual = std::max(0.0, sys.et_squared) / n;

  // LDL^T without pivoting; the matrix is a Gram matrix, so every pivot of a
  // well-posed system is positive.
  const double max_diag = std::max({m[0][0], m[1][1], m[2][2]});
  if (!(max_diag > 0.0) || !std::isfinite(max_diag)) return degenerate;
  const double floor = opts.pivot_tolerance * max_diag;

  const double d0 = m[0][0];
  if (!(d0 >= floor) || d0 <= 0.0) return degenerate;
  const double l10 = m[1][0] / d0;
  const double l20 = m[2][0] / d0;
  const double d1 = m[1][1] - l10 * l10 * d0;
  if (!(d1 >= floor) || d1 <= 0.0) return degenerate;
  const double l21 = (m[2][1] - l20 * l10 * d0) / d1;
  const double d2 = m[2][2] - l20 * l20 * d0 - l21 * l21 * d1;
  if (!(d2 >= floor) || d2 <= 0.0) return degenerate;

  const auto& r = sys.rhs;
  const double y0 = r[0];
  const double y1 = r[1] - l10 * y0;
  const double y2 = r[2] - l20 * y0 - l21 * y1;
  const double c = y2 / d2;
  const double b = y1 / d1 - l21 * c;
  const double a = y0 / d0 - l10 * b - l20 * c;

  TtcEstimate est;
  est.a = a;
  est.b = b;
  est.c = c;
  // Objective at the solution: sum Et^2 - theta . rhs.
  est.residual = std::max(0.0, sys.et_squared - (a * r[0] + b * r[1] + c * r[2])) / n;
  if (std::abs(c) < opts.c_min) {
    est.ttc = kInf;
    est.x0 = est.y0 = kNaN;
  } else {
    est.ttc = 1.0 / c;
    est.x0 = -a / c;
    est.y0 = -b / c;
  }
  return est;
}

Image downsample(const Image& img) {
  require_image(img, "downsample input");
  const std::size_t h = height(img), w = width(img);
  if (h < 2 || w < 2) throw ShapeError("downsample needs extents >= 2");
  static const Tensor binomial({3, 3}, {1.0 / 16, 2.0 / 16, 1.0 / 16, 2.0 / 16, 4.0 / 16, 2.0 / 16, 1.0 / 16,
                                        2.0 / 16, 1.0 / 16});
  const Image smooth = xcorr_direct(img, binomial, ConvShape::Same, Boundary::Replicate);
  const std::size_t oh = h / 2, ow = w / 2;
  Image out({oh, ow});
  for (std::size_t y = 0; y < oh; ++y) {
    const double* r0 = smooth.data().data() + (2 * y) * w;
    const double* r1 = r0 + w;
    for (std::size_t x = 0; x < ow; ++x) {
      out[y * ow + x] = 0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
    }
  }
  return out;
}

bool level_fits(std::size_t width, std::size_t height, int level) {
  if (level < 0 || level >= 63) return false;
  return (width >> level) >= kMinLevelExtent && (height >> level) >= kMinLevelExtent;
}

TtcEstimate estimate_fixed(const Image& e0, const Image& e1, int level, const TtcOptions& opts) {
  require_same(e0, e1, "frame pair");
  if (!level_fits(width(e0), height(e0), level)) {
    throw ScaleError("level " + std::to_string(level) + " leaves frames smaller than 4x4");
  }
  Image a = e0, b = e1;
  for (int l = 0; l < level; ++l) {
    a = downsample(a);
    b = downsample(b);
  }
  return estimate_from_level(a, b, level, opts);
}

TtcEstimate estimate_multiscale(const Image& e0, const Image& e1, int max_level, const TtcOptions& opts) {
  require_same(e0, e1, "frame pair");
  if (!level_fits(width(e0), height(e0), 0)) throw ScaleError("frames smaller than 4x4");
  TtcEstimate best = estimate_from_level(e0, e1, 0, opts);
  Image a = e0, b = e1;
  for (int level = 1; level <= max_level && level_fits(width(e0), height(e0), level); ++level) {
    a = downsample(a);
    b = downsample(b);
    TtcEstimate next = estimate_from_level(a, b, level, opts);
    if (!improves(next, best, opts.multiscale_margin)) break;
    best = next;
  }
  return best;
}

std::vector<TraceRow> run_sequence(const Tensor& frames, const SequenceMode& mode, const TtcOptions& opts) {
  if (frames.ndim() != 3) throw InputError("frame stack must be 3-D {frames, height, width}");
  const std::size_t n = frames.extent(0);
  if (n < 2) throw InputError("need at least two frames");
  const double cx = (static_cast<double>(frames.extent(2)) - 1.0) / 2.0;
  const double cy = (static_cast<double>(frames.extent(1)) - 1.0) / 2.0;

  std::vector<TraceRow> rows;
  rows.reserve(n - 1);
  Image prev = frames.plane(0);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    Image next = frames.plane(t + 1);
    TraceRow row;
    row.frame = t;
    row.estimate = mode.multiscale ? estimate_multiscale(prev, next, mode.level, opts)
                                   : estimate_fixed(prev, next, mode.level, opts);
    row.foe_x = row.estimate.x0 + cx;
    row.foe_y = row.estimate.y0 + cy;
    rows.push_back(row);
    prev = std::move(next);
  }
  return rows;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.frame << ',' << csv::format_real(r.estimate.ttc) << ',' << csv::format_real(r.foe_x) << ','
        << csv::format_real(r.foe_y) << ',' << csv::format_real(r.estimate.residual) << ',' << r.estimate.level
        << ',' << (r.estimate.degenerate ? 1 : 0) << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::vector<TraceRow> rows;
  for (const auto& f : csv::read(path, kTraceHeader)) {
    TraceRow r;
    const long long frame = csv::parse_int(f[0]);
    if (frame < 0) throw FormatError("negative frame index in " + path.string(), 0);
    r.frame = static_cast<std::size_t>(frame);
    r.estimate.ttc = csv::parse_real(f[1]);
    r.foe_x = csv::parse_real(f[2]);
    r.foe_y = csv::parse_real(f[3]);
    r.estimate.residual = csv::parse_real(f[4]);
    r.estimate.level = static_cast<int>(csv::parse_int(f[5]));
    r.estimate.degenerate = csv::parse_int(f[6]) != 0;
    r.estimate.x0 = kNaN;
    r.estimate.y0 = kNaN;
    r.estimate.a = r.estimate.b = r.estimate.c = kNaN;
    rows.push_back(r);
  }
  return rows;
}

Tensor load_frames(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) {
    Tensor t = read_ndt(path);
    if (t.ndim() != 3) throw InputError("frame tensor must be 3-D");
    return t;
  }
  static const std::regex pattern(R"(frame_(\d+)\.pgm)");
  std::map<long long, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    std::smatch match;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, match, pattern)) {
      files.emplace(std::stoll(match[1].str()), entry.path());
    }
  }
  if (files.empty()) throw InputError("no frame_*.pgm files in " + path.string());
  std::vector<Tensor> planes;
  planes.reserve(files.size());
  for (const auto& [index, file] : files) planes.push_back(read_pgm(file));
  return Tensor::stack(planes);
}

}  // namespace convtact
