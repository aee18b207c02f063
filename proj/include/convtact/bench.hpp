#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "convtact/conv.hpp"

namespace convtact {

struct BenchRecord {
  Backend method = Backend::Direct;
  std::size_t ndim = 0;
  std::size_t signal_extent = 0;
  std::size_t kernel_extent = 0;
  std::size_t reps = 0;
  double median_ns = 0.0;
  double mean_ns = 0.0;
  double stddev_ns = 0.0;
  bool skipped = false;  // FFT padding would exceed the memory limit
};

inline constexpr std::size_t kMinBenchReps = 5;

struct BenchOptions {
  std::size_t reps = kMinBenchReps;
  std::uint64_t seed = 1;
  std::size_t fft_memory_limit = std::size_t{1} << 30;  // bytes
};

struct TimingStats {
  double median_ns = 0.0;
  double mean_ns = 0.0;
  double stddev_ns = 0.0;
};

// Sample statistics of repeated timings; median of an even count averages
// the two middle values.
TimingStats summarize(std::vector<double> samples_ns);

// Times conv_direct and conv_fft (FULL, zero boundary) on the same seeded
// inputs for each kernel extent, one warmup run then `reps` timed runs.
// Records come in (direct, fft) pairs in kernel_extents order.
std::vector<BenchRecord> bench_sweep(std::size_t signal_extent, std::span<const std::size_t> kernel_extents,
                                     std::size_t ndim, const BenchOptions& opts = {});

struct CrossoverReport {
  std::vector<BenchRecord> records;
  std::optional<std::size_t> crossover_extent;
  std::size_t recommended_threshold = kDefaultAutoThreshold;
};

struct CalibrateOptions {
  std::size_t first_extent = 2;
  std::size_t last_extent = 64;
  // Consecutive FFT wins that confirm a crossover and end the sweep early.
  std::size_t confirm = 3;
  BenchOptions bench;
};

// Contiguous sweep of kernel extents. The crossover is the first extent of
// the first run of `confirm` consecutive extents where the FFT median beats
// the direct median (a run cut short by the end of the sweep also counts).
CrossoverReport calibrate(std::size_t ndim, std::size_t signal_extent, const CalibrateOptions& opts = {});

inline constexpr const char* kBenchHeader =
    "method,ndim,signal_extent,kernel_extent,reps,median_ns,mean_ns,stddev_ns,status";

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path);

// key=value settings file (convtact.cfg).
struct Config {
  std::size_t auto_threshold = kDefaultAutoThreshold;
};

inline constexpr const char* kConfigFile = "convtact.cfg";

// A missing file yields the defaults.
Config load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const Config& cfg);

}  // namespace convtact
