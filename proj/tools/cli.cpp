#include "cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <charconv>
#include <iostream>
#include <optional>
#include <string>

#include "convtact/bench.hpp"
#include "convtact/conv.hpp"
#include "convtact/csv.hpp"
#include "convtact/error.hpp"
#include "convtact/io.hpp"
#include "convtact/kernels.hpp"
#include "convtact/synth.hpp"
#include "convtact/ttc.hpp"

namespace convtact {

namespace {

// Bad flag values found after CLI11 has parsed; reported as usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t parse_size(std::string_view text, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError(std::string("bad ") + what + ": '" + std::string(text) + "'");
  }
  return v;
}

// "WxH"
std::pair<std::size_t, std::size_t> parse_wxh(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError("--size expects WxH, got '" + text + "'");
  return {parse_size(std::string_view(text).substr(0, x), "width"),
          parse_size(std::string_view(text).substr(x + 1), "height")};
}

// "A..B"
std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageError("expected A..B, got '" + text + "'");
  const auto lo = parse_size(std::string_view(text).substr(0, dots), "range start");
  const auto hi = parse_size(std::string_view(text).substr(dots + 2), "range end");
  if (lo < 1 || hi < lo) throw UsageError("empty or invalid range '" + text + "'");
  return {lo, hi};
}

std::pair<double, double> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--foe expects FX,FY, got '" + text + "'");
  try {
    return {csv::parse_real(std::string_view(text).substr(0, comma)),
            csv::parse_real(std::string_view(text).substr(comma + 1))};
  } catch (const FormatError&) {
    throw UsageError("--foe expects FX,FY, got '" + text + "'");
  }
}

void write_output(const std::filesystem::path& path, const Tensor& t) {
  if (path.extension() == ".pgm") {
    write_pgm(path, t);
  } else {
    write_ndt(path, t);
  }
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"n-dimensional convolution and time-to-contact tools", "convtact"};
  app.require_subcommand(1);

  // conv
  std::string conv_input, conv_kernel, conv_out, conv_method = "auto", conv_shape = "full",
                                                 conv_boundary = "zero", config_path = kConfigFile;
  auto* conv = app.add_subcommand("conv", "Convolve a tensor with a kernel");
  conv->add_option("--input", conv_input, "Signal (.ndt or .pgm)")->required();
  conv->add_option("--kernel", conv_kernel, "Kernel (.ndt or .pgm)")->required();
  conv->add_option("--method", conv_method)->check(CLI::IsMember({"auto", "direct", "fft"}));
  conv->add_option("--shape", conv_shape)->check(CLI::IsMember({"full", "same", "valid"}));
  conv->add_option("--boundary", conv_boundary)->check(CLI::IsMember({"zero", "replicate"}));
  conv->add_option("--out", conv_out, "Output (.pgm writes an image, anything else NDT)")->required();
  conv->add_option("--config", config_path, "Settings file holding auto_threshold");

  // gradient
  std::string grad_input, grad_kernel, grad_prefix;
  auto* grad = app.add_subcommand("gradient", "Edge gradients of an image");
  grad->add_option("--input", grad_input)->required();
  grad->add_option("--kernel", grad_kernel)
      ->required()
      ->check(CLI::IsMember({"roberts", "prewitt2", "prewitt3", "sobel"}));
  grad->add_option("--out-prefix", grad_prefix, "Writes PREFIX_{ex,ey,mag,dir}.ndt")->required();

  // ttc
  std::string ttc_frames, ttc_csv;
  int ttc_level = 0, ttc_max_level = 5;
  bool ttc_multiscale = false;
  auto* ttc = app.add_subcommand("ttc", "Time to contact over a frame sequence");
  ttc->add_option("--frames", ttc_frames, "Directory of frame_N.pgm or a 3-D .ndt")->required();
  auto* level_opt = ttc->add_option("--level", ttc_level)->check(CLI::NonNegativeNumber);
  auto* ms_opt = ttc->add_flag("--multiscale", ttc_multiscale);
  auto* max_opt = ttc->add_option("--max-level", ttc_max_level)->check(CLI::NonNegativeNumber);
  level_opt->excludes(ms_opt);
  max_opt->needs(ms_opt);
  ttc->add_option("--csv", ttc_csv)->required();

  // synth
  SynthConfig synth_cfg;
  std::string synth_size = "256x256", synth_foe = "0.4,0.55", synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic zoom sequence");
  synth->add_option("--size", synth_size, "WxH");
  synth->add_option("--frames", synth_cfg.frames);
  synth->add_option("--t0", synth_cfg.t0);
  synth->add_option("--foe", synth_foe, "FX,FY as fractions of the frame");
  synth->add_option("--seed", synth_cfg.seed);
  synth->add_option("--noise", synth_cfg.noise_sigma);
  synth->add_option("--texture-passes", synth_cfg.texture_passes);
  synth->add_option("--out", synth_out)->required();

  // bench
  std::size_t bench_ndim = 2, bench_extent = 1000;
  std::string bench_range = "3..3", bench_csv;
  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Time direct and FFT convolution");
  bench->add_option("--ndim", bench_ndim);
  bench->add_option("--signal-extent", bench_extent);
  bench->add_option("--kernel-extents", bench_range, "A..B");
  bench->add_option("--reps", bench_opts.reps);
  bench->add_option("--seed", bench_opts.seed);
  bench->add_option("--csv", bench_csv)->required();

  // calibrate
  std::size_t cal_ndim = 2, cal_extent = 1000;
  std::string cal_range = "2..64", cal_csv;
  CalibrateOptions cal_opts;
  auto* cal = app.add_subcommand("calibrate", "Find the direct/FFT crossover and store it");
  cal->add_option("--ndim", cal_ndim);
  cal->add_option("--signal-extent", cal_extent);
  cal->add_option("--kernel-extents", cal_range, "A..B");
  cal->add_option("--reps", cal_opts.bench.reps);
  cal->add_option("--seed", cal_opts.bench.seed);
  cal->add_option("--csv", cal_csv, "Also write the sweep records");
  cal->add_option("--config", config_path);

  // eval
  std::string eval_pred, eval_truth;
  auto* eval = app.add_subcommand("eval", "Mean squared TTC error against ground truth");
  eval->add_option("--pred", eval_pred)->required();
  eval->add_option("--truth", eval_truth)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (conv->parsed()) {
      const Tensor signal = read_tensor_file(conv_input);
      const Tensor kernel = read_tensor_file(conv_kernel);
      ConvMethod method;
      method.kind = parse_method(conv_method);
      method.threshold = load_config(config_path).auto_threshold;
      const ConvResult r =
          conv_auto(signal, kernel, parse_shape(conv_shape), method, parse_boundary(conv_boundary));
      write_output(conv_out, r.output);
      err << "conv: " << to_string(r.backend) << " backend\n";
      out << "backend=" << to_string(r.backend) << '\n';
    } else if (grad->parsed()) {
      const Tensor img = read_tensor_file(grad_input);
      require_image(img, "gradient input");
      const GradientField g = gradient(img, kernel_lookup(grad_kernel));
      write_ndt(grad_prefix + "_ex.ndt", g.ex);
      write_ndt(grad_prefix + "_ey.ndt", g.ey);
      write_ndt(grad_prefix + "_mag.ndt", g.mag);
      write_ndt(grad_prefix + "_dir.ndt", g.dir);
    } else if (ttc->parsed()) {
      const Tensor frames = load_frames(ttc_frames);
      SequenceMode mode{ttc_multiscale, ttc_multiscale ? ttc_max_level : ttc_level};
      const auto rows = run_sequence(frames, mode);
      write_trace_csv(ttc_csv, rows);
      out << "pairs=" << rows.size() << '\n';
    } else if (synth->parsed()) {
      std::tie(synth_cfg.width, synth_cfg.height) = parse_wxh(synth_size);
      std::tie(synth_cfg.foe_x, synth_cfg.foe_y) = parse_pair(synth_foe);
      const SyntheticSequence seq = generate(synth_cfg);
      write_sequence(seq, synth_out);
      out << "frames=" << seq.truth.size() << '\n';
    } else if (bench->parsed()) {
      const auto [lo, hi] = parse_range(bench_range);
      std::vector<std::size_t> extents;
      for (std::size_t k = lo; k <= hi; ++k) extents.push_back(k);
      const auto records = bench_sweep(bench_extent, extents, bench_ndim, bench_opts);
      write_bench_csv(bench_csv, records);
      for (const BenchRecord& r : records) {
        out << to_string(r.method) << " k=" << r.kernel_extent << " median_ns="
            << (r.skipped ? std::string("skipped") : csv::format_real(r.median_ns)) << '\n';
      }
    } else if (cal->parsed()) {
      std::tie(cal_opts.first_extent, cal_opts.last_extent) = parse_range(cal_range);
      const CrossoverReport report = calibrate(cal_ndim, cal_extent, cal_opts);
      if (!cal_csv.empty()) write_bench_csv(cal_csv, report.records);
      Config cfg = load_config(config_path);
      if (report.crossover_extent) {
        cfg.auto_threshold = report.recommended_threshold;
        out << "crossover_extent=" << *report.crossover_extent << '\n';
      } else {
        cfg.auto_threshold = kDefaultAutoThreshold;
        out << "no crossover in " << cal_range << "; keeping the default threshold\n";
      }
      save_config(config_path, cfg);
      out << "auto_threshold=" << cfg.auto_threshold << '\n';
    } else if (eval->parsed()) {
      const MseReport r = score_mse(std::filesystem::path(eval_pred), std::filesystem::path(eval_truth));
      out << "mse=" << csv::format_real(r.mse) << " compared=" << r.compared << " excluded=" << r.excluded
          << '\n';
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 1;
  } catch (const std::exception& e) {
    // Library errors, unreadable files and filesystem failures are data errors.
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cli_dispatch(int argc, const char* const* argv) { return cli_dispatch(argc, argv, std::cout, std::cerr); }

}  // namespace convtact
