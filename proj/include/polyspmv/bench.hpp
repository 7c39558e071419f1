#pragma once

// Corpus sweeps, the benchmark CSV schema, and speedup / distribution reports.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polyspmv/autotune.hpp"
#include "polyspmv/dataflow.hpp"
#include "polyspmv/matrix_io.hpp"

namespace polyspmv::bench {

enum class Status { Ok, FillExceeded, Unsupported, Error };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);

/// One CSV row. Numeric timing fields are empty unless status is Ok.
struct BenchRecord {
  std::string matrix_id;
  std::optional<std::size_t> nrows, ncols, nnz;
  Format format = Format::Csr;
  KernelVersion version = KernelVersion::Plain;
  std::size_t iters = 0;
  std::size_t reps = 0;
  std::optional<double> median_seconds;
  std::optional<double> gflops;
  std::optional<std::uint64_t> est_cycles;  // dataflow model, COO rows only
  Status status = Status::Ok;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline constexpr const char* kCsvHeader =
    "matrix_id,nrows,ncols,nnz,format,version,iters,reps,median_seconds,gflops,est_cycles,status";

/// Rounds to the 9 fractional digits the CSV stores, so in-memory records and
/// re-read records compare equal.
double round_seconds(double seconds);

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);
/// Throws ParseError.
std::vector<BenchRecord> read_csv(std::istream& in);

struct RunOptions {
  std::vector<Format> formats{Format::Coo, Format::Csr, Format::Dia};
  std::vector<KernelVersion> versions{KernelVersion::Plain, KernelVersion::Vla};
  std::size_t iters = 100;
  std::size_t reps = 10;
  LaneConfig lanes = LaneConfig::from_env();
  DiaFillPolicy dia_policy{};
  dataflow::DataflowConfig dataflow{};
  std::size_t jobs = 1;
};

/// One record per (matrix, format, version), in manifest x formats x
/// versions order. Failures become non-Ok rows; the sweep never aborts.
/// `jobs` > 1 measures different matrices concurrently, so `timer` must then
/// be thread-safe.
std::vector<BenchRecord> run_corpus(const std::vector<io::CorpusEntry>& corpus,
                                    const RunOptions& opts, autotune::Timer& timer,
                                    const KernelRegistry<double>& registry = default_registry<double>(),
                                    std::ostream* log = nullptr);

/// Exit codes: 0 if at least one Ok row, 1 if none, 2 when the manifest is
/// unreadable or empty.
int cmd_run(const std::filesystem::path& manifest, const RunOptions& opts,
            const std::filesystem::path& output, autotune::Timer& timer, std::ostream& err,
            const KernelRegistry<double>& registry = default_registry<double>());

struct MatrixRatio {
  std::string matrix_id;
  std::size_t nnz = 0;
  double ratio = 0.0;  // baseline / candidate
};

struct ConfigSummary {
  autotune::Candidate config;
  std::vector<MatrixRatio> ratios;
  double geomean = 0.0;   // 0 when no matrix had both rows
  std::size_t missing = 0;
};

struct Report {
  autotune::Candidate baseline;
  std::vector<ConfigSummary> configs;  // excludes the baseline
  std::vector<autotune::Distribution> distribution;
  std::vector<std::string> warnings;
};

/// Speedup of every configuration over `baseline`: ratio = baseline median /
/// candidate median, so a ratio above 1 is a speedup; the mean is geometric.
/// Throws MissingBaseline when a matrix has no Ok baseline row.
Report build_report(const std::vector<BenchRecord>& records, autotune::Candidate baseline);

/// Best Ok record per (matrix, version), with the tuner's tie-break.
std::vector<autotune::TuneChoice> optimal_choices(const std::vector<BenchRecord>& records);

std::string render_report(const Report& report);
/// Scatter of speedup against nnz (log-log) with one mean line per configuration.
std::string render_svg(const Report& report);

}  // namespace polyspmv::bench
