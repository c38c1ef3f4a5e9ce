#pragma once

#include <functional>
#include <span>

#include "pmklc/pipeline.hpp"

namespace pmklc {

/// bits per base: compressed_bytes * 8 / source_bytes
double compression_ratio(uint64_t compressed_bytes, uint64_t source_bytes);

/// bytes per second over the combined compress+decompress time
double throughput(uint64_t source_bytes, double ct_s, double dt_s);

/// Coefficient of variation of a set of compression ratios, in percent.
/// Uses the n-1 denominator; a single value has no spread and returns 0.
double robustness(std::span<const double> crs);

struct DatasetResult {
  std::string name;
  uint64_t source_bytes = 0;
  uint64_t compressed_bytes = 0;
  double ct_s = 0, dt_s = 0;
  double cr = 0, thp = 0;
  bool verified = false;
};

struct MetricsReport {
  std::vector<DatasetResult> rows;
  double mean_cr = 0;
  double crp_percent = 0;
  uint64_t peak_mem_bytes = 0;
};

struct BenchOptions {
  CompressConfig cfg;
  std::string csv_path;                 // empty = no file written
  std::function<void(ByteVec&)> fault;  // container mutation hook for tests
};

/// Compress, decompress and verify each dataset in order; aggregate metrics
/// cover the rows that verified. Also writes the CSV when a path is set.
MetricsReport run_benchmark(const std::vector<std::string>& datasets, const BenchOptions& opt);

std::string to_csv(const MetricsReport& report);

/// Peak resident set, sampled from /proc at a 100 ms cadence on a background
/// thread while running.
class MemorySampler {
public:
  ~MemorySampler();
  void start();
  uint64_t stop(); // joins and returns the peak in bytes

private:
  struct State;
  std::shared_ptr<State> state_;
};

} // namespace pmklc
