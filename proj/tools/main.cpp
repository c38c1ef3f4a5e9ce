// pmklc: compress / decompress / verify / pretrain-spum / bench in one binary.
// Exit codes: 0 success, 1 usage, 2 io, 3 format or checksum, 4 verification.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmklc/bench.hpp"
#include "pmklc/io.hpp"
#include "pmklc/models.hpp"
#include "pmklc/pipeline.hpp"
#include "pmklc/training.hpp"

using namespace pmklc;
using nlohmann::json;

namespace {

int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::config_invalid:
      return 1;
    case errc::io_error:
      return 2;
    case errc::verification_failed:
      return 4;
    default:
      return 3; // format, checksum, or model mismatch
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CompressFlags {
  std::string input, output, spum;
  int s = 3, k = 3;
  uint32_t t = 32, bs = 320, workers = 1, scale = 4;
  uint64_t threshold = 500'000'000, seed = 42;
  float smp = 0.05f;
  bool as_json = false;

  CompressConfig config() const {
    CompressConfig cfg;
    cfg.sk = SkParams{uint8_t(s), uint8_t(k)};
    cfg.t = t;
    cfg.bs = bs;
    cfg.workers = workers;
    cfg.selector_threshold = threshold;
    cfg.smp_fraction = smp;
    cfg.seed = seed;
    cfg.scale = scale;
    cfg.pub_model_path = spum;
    return cfg;
  }
};

void add_compress_flags(CLI::App* cmd, CompressFlags& f, bool needs_output) {
  cmd->add_option("-i,--input", f.input, "file to compress")->required();
  if (needs_output) cmd->add_option("-o,--output", f.output, "container to write")->required();
  cmd->add_option("--s", f.s, "window step in bases")->capture_default_str();
  cmd->add_option("--k", f.k, "window length in bases")->capture_default_str();
  cmd->add_option("--t", f.t, "context length in tokens")->capture_default_str();
  cmd->add_option("--bs", f.bs, "substreams coded per batch step")->capture_default_str();
  cmd->add_option("--workers", f.workers, "parallel chunk workers")->capture_default_str();
  cmd->add_option("--spum", f.spum, "shared pre-trained model file");
  cmd->add_option("--selector-threshold", f.threshold,
                  "size in bytes separating the small- and large-input model choices")
      ->capture_default_str();
  cmd->add_option("--smp-fraction", f.smp,
                  "fraction of a chunk's batch steps before its state snapshot (0 = off)")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "master seed for every derived initialization")
      ->capture_default_str();
  cmd->add_option("--scale-factor", f.scale, "divides every model width; 1 = full-size")
      ->capture_default_str();
  cmd->add_flag("--json", f.as_json, "machine-readable summary on stdout");
}

int cmd_compress(const CompressFlags& f) {
  const ByteVec raw = read_file(f.input);
  const auto t0 = std::chrono::steady_clock::now();
  const ByteVec packed = compress(raw, f.config());
  const double elapsed = seconds_since(t0);
  write_file(f.output, packed);

  const double cr = raw.empty() ? 0.0 : compression_ratio(packed.size(), raw.size());
  if (f.as_json) {
    json j{{"source_bytes", raw.size()},
           {"compressed_bytes", packed.size()},
           {"cr_bits_per_base", cr},
           {"elapsed_s", elapsed}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("source      %zu bytes\n", raw.size());
    std::printf("compressed  %zu bytes\n", packed.size());
    std::printf("cr          %.4f bits/base\n", cr);
    std::printf("elapsed     %.3f s\n", elapsed);
  }
  return 0;
}

struct DecompressFlags {
  std::string input, output, spum;
  uint32_t workers = 1;
  bool as_json = false;
};

int cmd_decompress(const DecompressFlags& f) {
  const ByteVec packed = read_file(f.input);
  const auto t0 = std::chrono::steady_clock::now();
  const ByteVec raw = decompress(packed, f.spum, f.workers);
  const double elapsed = seconds_since(t0);
  write_file(f.output, raw);

  if (f.as_json) {
    json j{{"container_bytes", packed.size()},
           {"restored_bytes", raw.size()},
           {"elapsed_s", elapsed}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("container   %zu bytes\n", packed.size());
    std::printf("restored    %zu bytes\n", raw.size());
    std::printf("elapsed     %.3f s\n", elapsed);
  }
  return 0;
}

int cmd_verify(const CompressFlags& f) {
  const ByteVec raw = read_file(f.input);
  const ByteVec packed = compress(raw, f.config());

  // the round trip goes through a real file, like a consumer would
  const auto tmp = std::filesystem::temp_directory_path() /
                   ("pmklc_verify_" + std::to_string(uint64_t(::getpid())) + ".tmp");
  write_file(tmp.string(), packed);
  ByteVec back;
  try {
    back = decompress(read_file(tmp.string()), f.spum, f.workers);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  std::error_code ec;
  std::filesystem::remove(tmp, ec);

  const bool ok = back == raw;
  if (f.as_json) {
    json j{{"source_bytes", raw.size()},
           {"compressed_bytes", packed.size()},
           {"verified", ok}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("%s: %s (%zu bytes -> %zu compressed)\n", f.input.c_str(),
                ok ? "verified" : "MISMATCH", raw.size(), packed.size());
  }
  return ok ? 0 : 4;
}

struct PretrainFlags {
  std::vector<std::string> inputs;
  std::string output;
  int s = 3, k = 3;
  uint32_t t = 32, batch = 64, epochs = 2, scale = 4;
  uint64_t seed = 1;
  bool as_json = false;
};

int cmd_pretrain(const PretrainFlags& f) {
  std::vector<ByteVec> corpus;
  for (const std::string& path : f.inputs) corpus.push_back(read_file(path));

  TrainConfig tc;
  tc.sk = SkParams{uint8_t(f.s), uint8_t(f.k)};
  tc.t = f.t;
  tc.batch = f.batch;
  tc.epochs = f.epochs;
  tc.scale = f.scale;

  const auto t0 = std::chrono::steady_clock::now();
  const auto model = pretrain_public(corpus, tc, f.seed);
  const double elapsed = seconds_since(t0);
  const ByteVec blob = serialize_model(*model);
  write_file(f.output, blob);

  if (f.as_json) {
    json j{{"corpus_files", f.inputs.size()},
           {"model_bytes", blob.size()},
           {"fingerprint", model->fingerprint()},
           {"elapsed_s", elapsed}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("trained on  %zu files\n", f.inputs.size());
    std::printf("model       %zu bytes -> %s\n", blob.size(), f.output.c_str());
    std::printf("fingerprint %016llx\n", (unsigned long long)model->fingerprint());
    std::printf("elapsed     %.3f s\n", elapsed);
  }
  return 0;
}

struct BenchFlags {
  CompressFlags base;
  std::vector<std::string> inputs;
  std::string csv;
};

int cmd_bench(const BenchFlags& f) {
  BenchOptions opt;
  opt.cfg = f.base.config();
  opt.csv_path = f.csv;
  const MetricsReport rep = run_benchmark(f.inputs, opt);

  bool all_ok = true;
  if (f.base.as_json) {
    json rows = json::array();
    for (const DatasetResult& r : rep.rows) {
      rows.push_back({{"dataset", r.name},
                      {"source_bytes", r.source_bytes},
                      {"compressed_bytes", r.compressed_bytes},
                      {"ct_s", r.ct_s},
                      {"dt_s", r.dt_s},
                      {"cr_bits_per_base", r.cr},
                      {"thp_bytes_per_s", r.thp},
                      {"verified", r.verified}});
      all_ok = all_ok && r.verified;
    }
    json j{{"rows", rows},
           {"mean_cr", rep.mean_cr},
           {"robustness_percent", rep.crp_percent},
           {"peak_mem_bytes", rep.peak_mem_bytes}};
    std::printf("%s\n", j.dump().c_str());
  } else {
    std::printf("%-24s %12s %12s %9s %9s %8s %12s %s\n", "dataset", "source", "compressed",
                "ct_s", "dt_s", "cr", "thp", "ok");
    for (const DatasetResult& r : rep.rows) {
      std::printf("%-24s %12llu %12llu %9.3f %9.3f %8.4f %12.0f %s\n", r.name.c_str(),
                  (unsigned long long)r.source_bytes, (unsigned long long)r.compressed_bytes,
                  r.ct_s, r.dt_s, r.cr, r.thp, r.verified ? "yes" : "NO");
      all_ok = all_ok && r.verified;
    }
    std::printf("mean cr %.4f bits/base, robustness %.4f%%, peak rss %llu bytes\n", rep.mean_cr,
                rep.crp_percent, (unsigned long long)rep.peak_mem_bytes);
  }
  return all_ok ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"learned lossless compressor for nucleotide sequence files"};
  app.require_subcommand(1);

  CompressFlags cf;
  CLI::App* compress_cmd = app.add_subcommand("compress", "compress a file into a container");
  add_compress_flags(compress_cmd, cf, true);

  DecompressFlags df;
  CLI::App* decompress_cmd = app.add_subcommand("decompress", "restore a container");
  decompress_cmd->add_option("-i,--input", df.input, "container to read")->required();
  decompress_cmd->add_option("-o,--output", df.output, "file to restore")->required();
  decompress_cmd->add_option("--spum", df.spum, "shared pre-trained model file");
  decompress_cmd->add_option("--workers", df.workers, "parallel chunk workers")
      ->capture_default_str();
  decompress_cmd->add_flag("--json", df.as_json, "machine-readable summary on stdout");

  CompressFlags vf;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "compress, decompress and compare, without keeping output");
  add_compress_flags(verify_cmd, vf, false);

  PretrainFlags pf;
  CLI::App* pretrain_cmd =
      app.add_subcommand("pretrain-spum", "train a shared model on a corpus of files");
  pretrain_cmd->add_option("-i,--input", pf.inputs, "corpus files")->required()->expected(-1);
  pretrain_cmd->add_option("-o,--output", pf.output, "model file to write")->required();
  pretrain_cmd->add_option("--s", pf.s, "window step in bases")->capture_default_str();
  pretrain_cmd->add_option("--k", pf.k, "window length in bases")->capture_default_str();
  pretrain_cmd->add_option("--t", pf.t, "context length in tokens")->capture_default_str();
  pretrain_cmd->add_option("--batch", pf.batch, "training batch size")->capture_default_str();
  pretrain_cmd->add_option("--epochs", pf.epochs, "passes over the corpus")->capture_default_str();
  pretrain_cmd->add_option("--scale-factor", pf.scale, "divides every model width")
      ->capture_default_str();
  pretrain_cmd->add_option("--seed", pf.seed, "initialization seed")->capture_default_str();
  pretrain_cmd->add_flag("--json", pf.as_json, "machine-readable summary on stdout");

  BenchFlags bf;
  CLI::App* bench_cmd = app.add_subcommand("bench", "measure and verify over a list of files");
  bench_cmd->add_option("-i,--input", bf.inputs, "dataset files")->required()->expected(-1);
  bench_cmd->add_option("--csv", bf.csv, "also write the per-dataset table as CSV");
  bench_cmd->add_option("--s", bf.base.s, "window step in bases")->capture_default_str();
  bench_cmd->add_option("--k", bf.base.k, "window length in bases")->capture_default_str();
  bench_cmd->add_option("--t", bf.base.t, "context length in tokens")->capture_default_str();
  bench_cmd->add_option("--bs", bf.base.bs, "substreams coded per batch step")
      ->capture_default_str();
  bench_cmd->add_option("--workers", bf.base.workers, "parallel chunk workers")
      ->capture_default_str();
  bench_cmd->add_option("--spum", bf.base.spum, "shared pre-trained model file");
  bench_cmd->add_option("--selector-threshold", bf.base.threshold,
                        "size in bytes separating the model choices")
      ->capture_default_str();
  bench_cmd->add_option("--smp-fraction", bf.base.smp, "snapshot handoff fraction")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bf.base.seed, "master seed")->capture_default_str();
  bench_cmd->add_option("--scale-factor", bf.base.scale, "divides every model width")
      ->capture_default_str();
  bench_cmd->add_flag("--json", bf.base.as_json, "machine-readable summary on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (compress_cmd->parsed()) return cmd_compress(cf);
    if (decompress_cmd->parsed()) return cmd_decompress(df);
    if (verify_cmd->parsed()) return cmd_verify(vf);
    if (pretrain_cmd->parsed()) return cmd_pretrain(pf);
    if (bench_cmd->parsed()) return cmd_bench(bf);
  } catch (const error& e) {
    std::fprintf(stderr, "pmklc: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pmklc: %s\n", e.what());
    return 2;
  }
  return 1;
}
