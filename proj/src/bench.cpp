#include "convtact/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <new>

#include "convtact/csv.hpp"
#include "convtact/error.hpp"
#include "convtact/fft.hpp"
#include "convtact/rng.hpp"

namespace convtact {

namespace {

Tensor random_tensor(const Dims& dims, Rng& rng) {
  Tensor t(dims);
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

// Bytes the FFT path would allocate for its two complex work buffers.
double fft_bytes(std::size_t signal_extent, std::size_t kernel_extent, std::size_t ndim) {
  const double per_axis = static_cast<double>(fft::next_pow2(signal_extent + kernel_extent - 1));
  return 2.0 * 16.0 * std::pow(per_axis, static_cast<double>(ndim));
}

volatile double g_sink = 0.0;

template <typename Fn>
TimingStats time_runs(Fn&& fn, std::size_t reps) {
  using clock = std::chrono::steady_clock;
  g_sink = g_sink + fn()[0];  // warmup
  std::vector<double> samples;
  samples.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto start = clock::now();
    const Tensor out = fn();
    const auto stop = clock::now();
    g_sink = g_sink + out[0];
    samples.push_back(std::chrono::duration<double, std::nano>(stop - start).count());
  }
  return summarize(std::move(samples));
}

std::string method_name(Backend b) { return to_string(b); }

}  // namespace

TimingStats summarize(std::vector<double> samples_ns) {
  if (samples_ns.empty()) throw DomainError("no timing samples");
  std::sort(samples_ns.begin(), samples_ns.end());
  const std::size_t n = samples_ns.size();
  TimingStats s;
  s.median_ns = n % 2 == 1 ? samples_ns[n / 2] : 0.5 * (samples_ns[n / 2 - 1] + samples_ns[n / 2]);
  double sum = 0.0;
  for (double v : samples_ns) sum += v;
  s.mean_ns = sum / static_cast<double>(n);
  double var = 0.0;
  for (double v : samples_ns) var += (v - s.mean_ns) * (v - s.mean_ns);
  s.stddev_ns = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
  return s;
}

std::vector<BenchRecord> bench_sweep(std::size_t signal_extent, std::span<const std::size_t> kernel_extents,
                                     std::size_t ndim, const BenchOptions& opts) {
  if (ndim < 1) throw DimensionError("ndim must be >= 1");
  if (signal_extent < 1) throw DimensionError("signal extent must be >= 1");
  if (opts.reps < kMinBenchReps) throw ConfigError("benchmarks need at least 5 repetitions");

  Rng rng(opts.seed);
  const Tensor signal = random_tensor(Dims(ndim, signal_extent), rng);
  std::vector<BenchRecord> records;
  for (std::size_t k : kernel_extents) {
    if (k < 1) throw DimensionError("kernel extent must be >= 1");
    const Tensor kernel = random_tensor(Dims(ndim, k), rng);
    BenchRecord base{Backend::Direct, ndim, signal_extent, k, opts.reps, 0, 0, 0, false};

    BenchRecord direct = base;
    const TimingStats d = time_runs([&] { return conv_direct(signal, kernel, ConvShape::Full); }, opts.reps);
    direct.median_ns = d.median_ns;
    direct.mean_ns = d.mean_ns;
    direct.stddev_ns = d.stddev_ns;
    records.push_back(direct);

    BenchRecord fft = base;
    fft.method = Backend::Fft;
    if (fft_bytes(signal_extent, k, ndim) > static_cast<double>(opts.fft_memory_limit)) {
      fft.skipped = true;
    } else {
      try {
        const TimingStats f = time_runs([&] { return conv_fft(signal, kernel, ConvShape::Full); }, opts.reps);
        fft.median_ns = f.median_ns;
        fft.mean_ns = f.mean_ns;
        fft.stddev_ns = f.stddev_ns;
      } catch (const std::bad_alloc&) {
        fft.skipped = true;
      }
    }
    if (fft.skipped) {
      fft.median_ns = fft.mean_ns = fft.stddev_ns = std::numeric_limits<double>::quiet_NaN();
    }
    records.push_back(fft);
  }
  return records;
}

CrossoverReport calibrate(std::size_t ndim, std::size_t signal_extent, const CalibrateOptions& opts) {
  if (opts.first_extent < 1 || opts.last_extent < opts.first_extent) throw ConfigError("bad kernel extent range");
  if (opts.confirm < 1) throw ConfigError("confirm count must be >= 1");
  CrossoverReport report;
  std::size_t run_start = 0, run_length = 0;
  for (std::size_t k = opts.first_extent; k <= opts.last_extent; ++k) {
    const std::array<std::size_t, 1> one{k};
    BenchOptions bench = opts.bench;
    bench.seed = opts.bench.seed + k;
    auto recs = bench_sweep(signal_extent, one, ndim, bench);
    const BenchRecord& direct = recs[0];
    const BenchRecord& fft = recs[1];
    report.records.insert(report.records.end(), recs.begin(), recs.end());
    const bool fft_wins = !fft.skipped && fft.median_ns < direct.median_ns;
    if (fft_wins) {
      if (run_length == 0) run_start = k;
      if (++run_length >= opts.confirm) break;
    } else {
      run_length = 0;
    }
  }
  if (run_length > 0) {
    report.crossover_extent = run_start;
    double threshold = std::pow(static_cast<double>(run_start), static_cast<double>(ndim));
    report.recommended_threshold = static_cast<std::size_t>(
        std::min(threshold, static_cast<double>(std::numeric_limits<std::size_t>::max() / 2)));
  }
  return report;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << kBenchHeader << '\n';
  for (const BenchRecord& r : records) {
    out << method_name(r.method) << ',' << r.ndim << ',' << r.signal_extent << ',' << r.kernel_extent << ','
        << r.reps << ',' << csv::format_real(r.median_ns) << ',' << csv::format_real(r.mean_ns) << ','
        << csv::format_real(r.stddev_ns) << ',' << (r.skipped ? "skipped" : "ok") << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path) {
  std::vector<BenchRecord> records;
  auto count = [](const std::string& s) {
    const long long v = csv::parse_int(s);
    if (v < 0) throw FormatError("negative count in bench CSV", 0);
    return static_cast<std::size_t>(v);
  };
  for (const auto& f : csv::read(path, kBenchHeader)) {
    BenchRecord r;
    if (f[0] == "direct") {
      r.method = Backend::Direct;
    } else if (f[0] == "fft") {
      r.method = Backend::Fft;
    } else {
      throw FormatError("unknown method '" + f[0] + "' in bench CSV", 0);
    }
    r.ndim = count(f[1]);
    r.signal_extent = count(f[2]);
    r.kernel_extent = count(f[3]);
    r.reps = count(f[4]);
    r.median_ns = csv::parse_real(f[5]);
    r.mean_ns = csv::parse_real(f[6]);
    r.stddev_ns = csv::parse_real(f[7]);
    if (f[8] != "ok" && f[8] != "skipped") throw FormatError("unknown status '" + f[8] + "' in bench CSV", 0);
    r.skipped = f[8] == "skipped";
    records.push_back(r);
  }
  return records;
}

Config load_config(const std::filesystem::path& path) {
  Config cfg;
  std::ifstream in(path);
  if (!in) return cfg;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t at = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("expected key=value in " + path.string(), at);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "auto_threshold") {
      const long long v = csv::parse_int(value);
      if (v < 1) throw ConfigError("auto_threshold must be >= 1");
      cfg.auto_threshold = static_cast<std::size_t>(v);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

void save_config(const std::filesystem::path& path, const Config& cfg) {
  if (cfg.auto_threshold < 1) throw ConfigError("auto_threshold must be >= 1");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << "auto_threshold=" << cfg.auto_threshold << '\n';
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace convtact
