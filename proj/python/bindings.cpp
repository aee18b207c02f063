#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "convtact/bench.hpp"
#include "convtact/conv.hpp"
#include "convtact/error.hpp"
#include "convtact/io.hpp"
#include "convtact/kernels.hpp"
#include "convtact/synth.hpp"
#include "convtact/ttc.hpp"

namespace py = pybind11;
using namespace convtact;

namespace {

using InArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const InArray& a) {
  if (a.ndim() < 1) throw DimensionError("arrays need at least one axis");
  std::vector<long long> dims(a.shape(), a.shape() + a.ndim());
  Tensor t = Tensor::create(dims);
  std::copy(a.data(), a.data() + a.size(), t.data().begin());
  return t;
}

py::array_t<double> to_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  py::array_t<double> out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

ConvMethod make_method(const std::string& method, std::size_t threshold) {
  return ConvMethod{parse_method(method), threshold};
}

py::dict estimate_dict(const TtcEstimate& e) {
  py::dict d;
  d["a"] = e.a;
  d["b"] = e.b;
  d["c"] = e.c;
  d["x0"] = e.x0;
  d["y0"] = e.y0;
  d["ttc"] = e.ttc;
  d["residual"] = e.residual;
  d["level"] = e.level;
  d["degenerate"] = e.degenerate;
  return d;
}

py::dict record_dict(const BenchRecord& r) {
  py::dict d;
  d["method"] = to_string(r.method);
  d["ndim"] = r.ndim;
  d["signal_extent"] = r.signal_extent;
  d["kernel_extent"] = r.kernel_extent;
  d["reps"] = r.reps;
  d["median_ns"] = r.median_ns;
  d["mean_ns"] = r.mean_ns;
  d["stddev_ns"] = r.stddev_ns;
  d["skipped"] = r.skipped;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "n-dimensional convolution, edge gradients and time-to-contact estimation";

  static py::exception<Error> base(m, "Error", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<RankError>(m, "RankError", base);
  py::register_exception<ShapeError>(m, "ShapeError", base);
  py::register_exception<LookupError>(m, "LookupError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<InputError>(m, "InputError", base);
  py::register_exception<ScaleError>(m, "ScaleError", base);
  py::register_exception<ScoringError>(m, "ScoringError", base);
  py::register_exception<FormatError>(m, "FormatError", base);

  m.attr("DEFAULT_AUTO_THRESHOLD") = kDefaultAutoThreshold;

  m.def(
      "conv",
      [](const InArray& signal, const InArray& kernel, const std::string& shape, const std::string& method,
         const std::string& boundary, std::size_t threshold) {
        const ConvResult r = conv_auto(to_tensor(signal), to_tensor(kernel), parse_shape(shape),
                                       make_method(method, threshold), parse_boundary(boundary));
        return py::make_tuple(to_array(r.output), to_string(r.backend));
      },
      py::arg("signal"), py::arg("kernel"), py::arg("shape") = "full", py::arg("method") = "auto",
      py::arg("boundary") = "zero", py::arg("threshold") = kDefaultAutoThreshold,
      "True convolution. Returns (output, backend name).");

  m.def(
      "xcorr",
      [](const InArray& signal, const InArray& kernel, const std::string& shape, const std::string& method,
         const std::string& boundary, std::size_t threshold) {
        const ConvResult r = xcorr_auto(to_tensor(signal), to_tensor(kernel), parse_shape(shape),
                                        make_method(method, threshold), parse_boundary(boundary));
        return py::make_tuple(to_array(r.output), to_string(r.backend));
      },
      py::arg("signal"), py::arg("kernel"), py::arg("shape") = "full", py::arg("method") = "auto",
      py::arg("boundary") = "zero", py::arg("threshold") = kDefaultAutoThreshold,
      "Cross-correlation (no kernel flip). Returns (output, backend name).");

  m.def(
      "kernel",
      [](const std::string& name) {
        const NamedKernel k = kernel_lookup(name);
        return py::make_tuple(to_array(k.kx), to_array(k.ky));
      },
      py::arg("name"), "(kx, ky) for roberts, prewitt2, prewitt3 or sobel.");

  m.def(
      "gradient",
      [](const InArray& image, const std::string& kernel) {
        const GradientField g = gradient(to_tensor(image), kernel_lookup(kernel));
        py::dict d;
        d["ex"] = to_array(g.ex);
        d["ey"] = to_array(g.ey);
        d["mag"] = to_array(g.mag);
        d["dir"] = to_array(g.dir);
        return d;
      },
      py::arg("image"), py::arg("kernel") = "sobel");

  m.def(
      "estimate_ttc",
      [](const InArray& e0, const InArray& e1, int level, bool multiscale) {
        const Image a = to_tensor(e0), b = to_tensor(e1);
        return estimate_dict(multiscale ? estimate_multiscale(a, b, level) : estimate_fixed(a, b, level));
      },
      py::arg("e0"), py::arg("e1"), py::arg("level") = 0, py::arg("multiscale") = false,
      "TTC and FOE for one frame pair. With multiscale, level is the deepest level searched.");

  m.def(
      "ttc_sequence",
      [](const InArray& frames, int level, bool multiscale) {
        py::list rows;
        for (const TraceRow& r : run_sequence(to_tensor(frames), SequenceMode{multiscale, level})) {
          py::dict d = estimate_dict(r.estimate);
          d["frame"] = r.frame;
          d["foe_x"] = r.foe_x;
          d["foe_y"] = r.foe_y;
          rows.append(d);
        }
        return rows;
      },
      py::arg("frames"), py::arg("level") = 0, py::arg("multiscale") = false);

  m.def(
      "synth",
      [](std::size_t width, std::size_t height, std::size_t frames, double t0, double foe_x, double foe_y,
         std::uint64_t seed, double noise) {
        SynthConfig cfg;
        cfg.width = width;
        cfg.height = height;
        cfg.frames = frames;
        cfg.t0 = t0;
        cfg.foe_x = foe_x;
        cfg.foe_y = foe_y;
        cfg.seed = seed;
        cfg.noise_sigma = noise;
        const SyntheticSequence s = generate(cfg);
        py::list truth;
        for (const TruthRow& r : s.truth) {
          truth.append(py::dict(py::arg("frame") = r.frame, py::arg("ttc") = r.ttc, py::arg("foe_x") = r.foe_x,
                                py::arg("foe_y") = r.foe_y));
        }
        return py::make_tuple(to_array(s.frames), truth);
      },
      py::arg("width") = 256, py::arg("height") = 256, py::arg("frames") = 60, py::arg("t0") = 100.0,
      py::arg("foe_x") = 0.4, py::arg("foe_y") = 0.55, py::arg("seed") = 1, py::arg("noise") = 0.0,
      "Synthetic zoom sequence. Returns (frames {N, H, W}, truth rows).");

  m.def(
      "score_mse", [](const std::string& pred, const std::string& truth) {
        const MseReport r = score_mse(std::filesystem::path(pred), std::filesystem::path(truth));
        return py::dict(py::arg("mse") = r.mse, py::arg("compared") = r.compared, py::arg("excluded") = r.excluded);
      },
      py::arg("pred_csv"), py::arg("truth_csv"));

  m.def(
      "bench_sweep",
      [](std::size_t signal_extent, const std::vector<std::size_t>& kernel_extents, std::size_t ndim,
         std::size_t reps, std::uint64_t seed) {
        BenchOptions opts;
        opts.reps = reps;
        opts.seed = seed;
        py::list out;
        for (const BenchRecord& r : bench_sweep(signal_extent, kernel_extents, ndim, opts)) out.append(record_dict(r));
        return out;
      },
      py::arg("signal_extent"), py::arg("kernel_extents"), py::arg("ndim") = 2, py::arg("reps") = kMinBenchReps,
      py::arg("seed") = 1);

  m.def("read_ndt", [](const std::string& path) { return to_array(read_ndt(std::filesystem::path(path))); });
  m.def("write_ndt", [](const std::string& path, const InArray& a) {
    write_ndt(std::filesystem::path(path), to_tensor(a));
  });
  m.def("read_pgm", [](const std::string& path) { return to_array(read_pgm(std::filesystem::path(path))); });
  m.def(
      "write_pgm",
      [](const std::string& path, const InArray& a, unsigned maxval) {
        write_pgm(std::filesystem::path(path), to_tensor(a), maxval);
      },
      py::arg("path"), py::arg("image"), py::arg("maxval") = 255);
}
