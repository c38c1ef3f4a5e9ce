#include "pmklc/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

#include "pmklc/error.hpp"
#include "pmklc/io.hpp"

namespace pmklc {

double compression_ratio(uint64_t compressed_bytes, uint64_t source_bytes) {
  if (source_bytes == 0) raise(errc::empty_source, "ratio of an empty source");
  return double(compressed_bytes) / double(source_bytes) * 8.0;
}

double throughput(uint64_t source_bytes, double ct_s, double dt_s) {
  const double total = ct_s + dt_s;
  if (!(total > 0.0)) raise(errc::zero_time, "throughput needs a positive duration");
  return double(source_bytes) / total;
}

double robustness(std::span<const double> crs) {
  if (crs.empty()) raise(errc::empty_list, "robustness of an empty list");
  if (crs.size() == 1) return 0.0;
  double mean = 0;
  for (double c : crs) mean += c;
  mean /= double(crs.size());
  double ss = 0;
  for (double c : crs) ss += (c - mean) * (c - mean);
  const double sd = std::sqrt(ss / double(crs.size() - 1));
  return 100.0 * sd / mean;
}

namespace {
std::string base_name(const std::string& path) {
  const size_t cut = path.find_last_of('/');
  return cut == std::string::npos ? path : path.substr(cut + 1);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
} // namespace

std::string to_csv(const MetricsReport& report) {
  std::string out = "dataset,source_bytes,compressed_bytes,ct_s,dt_s,cr_bits_per_base,"
                    "thp_bytes_per_s,verified\n";
  char line[512];
  for (const DatasetResult& r : report.rows) {
    std::snprintf(line, sizeof line, "%s,%llu,%llu,%.6f,%.6f,%.6f,%.3f,%s\n", r.name.c_str(),
                  (unsigned long long)r.source_bytes, (unsigned long long)r.compressed_bytes,
                  r.ct_s, r.dt_s, r.cr, r.thp, r.verified ? "true" : "false");
    out += line;
  }
  if (!report.rows.empty()) {
    std::snprintf(line, sizeof line, "AGGREGATE,-,-,-,-,%.6f,%.6f,%llu\n", report.mean_cr,
                  report.crp_percent, (unsigned long long)report.peak_mem_bytes);
    out += line;
  }
  return out;
}

MetricsReport run_benchmark(const std::vector<std::string>& datasets, const BenchOptions& opt) {
  MetricsReport report;
  MemorySampler sampler;
  sampler.start();

  for (const std::string& path : datasets) {
    const ByteVec raw = read_file(path);
    DatasetResult row;
    row.name = base_name(path);
    row.source_bytes = raw.size();

    auto t0 = std::chrono::steady_clock::now();
    ByteVec container = compress(raw, opt.cfg);
    row.ct_s = seconds_since(t0);
    row.compressed_bytes = container.size();

    if (opt.fault) opt.fault(container);

    t0 = std::chrono::steady_clock::now();
    try {
      const ByteVec back = decompress(container, opt.cfg.pub_model_path, opt.cfg.workers);
      row.dt_s = seconds_since(t0);
      row.verified = back.size() == raw.size() && std::memcmp(back.data(), raw.data(), raw.size()) == 0;
    } catch (const error&) {
      row.dt_s = seconds_since(t0);
      row.verified = false;
    }
    if (row.source_bytes > 0) row.cr = compression_ratio(row.compressed_bytes, row.source_bytes);
    if (row.ct_s + row.dt_s > 0) row.thp = throughput(row.source_bytes, row.ct_s, row.dt_s);
    report.rows.push_back(std::move(row));
  }

  report.peak_mem_bytes = sampler.stop();
  std::vector<double> crs;
  for (const DatasetResult& r : report.rows)
    if (r.verified && r.source_bytes > 0) crs.push_back(r.cr);
  if (!crs.empty()) {
    for (double c : crs) report.mean_cr += c;
    report.mean_cr /= double(crs.size());
    report.crp_percent = robustness(crs);
  }

  if (!opt.csv_path.empty()) {
    const std::string csv = to_csv(report);
    write_file(opt.csv_path, ByteSpan(reinterpret_cast<const uint8_t*>(csv.data()), csv.size()));
  }
  return report;
}

// ---- MemorySampler ----

struct MemorySampler::State {
  std::thread th;
  std::atomic<bool> done{false};
  std::atomic<uint64_t> peak{0};
};

namespace {
uint64_t current_rss_bytes() {
  std::FILE* f = std::fopen("/proc/self/status", "r");
  if (!f) return 0;
  char line[256];
  uint64_t kb = 0;
  while (std::fgets(line, sizeof line, f))
    if (std::strncmp(line, "VmRSS:", 6) == 0) {
      std::sscanf(line + 6, "%llu", (unsigned long long*)&kb);
      break;
    }
  std::fclose(f);
  return kb * 1024;
}
} // namespace

MemorySampler::~MemorySampler() {
  if (state_ && state_->th.joinable()) stop();
}

void MemorySampler::start() {
  state_ = std::make_shared<State>();
  auto st = state_;
  st->peak = current_rss_bytes();
  st->th = std::thread([st] {
    while (!st->done.load()) {
      const uint64_t rss = current_rss_bytes();
      uint64_t seen = st->peak.load();
      while (rss > seen && !st->peak.compare_exchange_weak(seen, rss)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
}

uint64_t MemorySampler::stop() {
  if (!state_) return 0;
  state_->done = true;
  if (state_->th.joinable()) state_->th.join();
  return state_->peak.load();
}

} // namespace pmklc
