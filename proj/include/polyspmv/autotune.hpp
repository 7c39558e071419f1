#pragma once

// Run-first format selection: convert once, time each (format, version)
// candidate directly and keep the fastest.

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "polyspmv/convert.hpp"
#include "polyspmv/core.hpp"
#include "polyspmv/spmv.hpp"

namespace polyspmv::autotune {

/// What a timer is asked to time. Lets injected timers script durations per
/// matrix or configuration.
struct TimingContext {
  std::string_view matrix_id;
  Format format = Format::Csr;
  KernelVersion version = KernelVersion::Plain;
  std::size_t rep = 0;
};

/// Times one sample. Implementations must invoke `work` exactly once and
/// return a duration in seconds.
class Timer {
 public:
  virtual ~Timer() = default;
  virtual double time(const TimingContext& ctx, const std::function<void()>& work) = 0;
};

/// Monotonic wall clock.
class WallTimer final : public Timer {
 public:
  double time(const TimingContext& ctx, const std::function<void()>& work) override;
};

struct Candidate {
  Format format = Format::Csr;
  KernelVersion version = KernelVersion::Plain;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// All three formats for one version, in CSR, COO, DIA order.
std::vector<Candidate> formats_for(KernelVersion version);
/// All six (format, version) pairs.
std::vector<Candidate> all_candidates();

struct MeasureOptions {
  std::size_t iters = 100;
  std::size_t reps = 10;
  LaneConfig lanes{};
  DiaFillPolicy dia_policy{};
  bool warmup = true;
};

struct Measurement {
  std::string matrix_id;
  Format format = Format::Csr;
  KernelVersion version = KernelVersion::Plain;
  std::size_t nnz = 0;
  std::size_t iterations = 0;
  std::vector<double> samples;  // seconds per sample of `iterations` SpMVs
  double median_seconds = 0.0;
  double gflops = 0.0;          // 2 * nnz * iterations / median_seconds / 1e9
};

double median(std::vector<double> samples);

/// 2 flops per stored entry per SpMV.
double gflops(std::size_t nnz, std::size_t iterations, double seconds);

/// Converts `A` to `format` (untimed), runs one untimed warm-up SpMV, then
/// `reps` samples of `iters` back-to-back SpMVs.
/// Throws FillRatioExceeded, UnsupportedCombination.
template <class T>
Measurement measure(const DynamicMatrix<T>& A, std::string_view matrix_id, Format format,
                    KernelVersion version, const MeasureOptions& opts, Timer& timer,
                    const KernelRegistry<T>& registry = default_registry<T>());

struct TuneChoice {
  Format format = Format::Csr;
  KernelVersion version = KernelVersion::Plain;
  double median_seconds = 0.0;
};

/// Strict "a is preferred over b": lower median, then CSR > COO > DIA, then
/// Plain > Vla.
bool preferred(const TuneChoice& a, const TuneChoice& b);

/// Fastest candidate that did not fail. Failed candidates are skipped.
/// Throws AllCandidatesFailed (or std::invalid_argument on an empty list).
/// When `measurements` is given, every successful measurement is appended.
template <class T>
TuneChoice tune(const DynamicMatrix<T>& A, std::string_view matrix_id,
                const std::vector<Candidate>& candidates, const MeasureOptions& opts,
                Timer& timer, const KernelRegistry<T>& registry = default_registry<T>(),
                std::vector<Measurement>* measurements = nullptr);

/// Share of matrices (percent) for which each format was optimal, for one version.
struct Distribution {
  KernelVersion version = KernelVersion::Plain;
  std::size_t matrices = 0;
  std::array<double, 3> percent{};  // indexed by Format

  double share(Format f) const { return percent[static_cast<std::size_t>(f)]; }
};

/// One histogram per version present in `choices`, in Plain, Vla order.
/// Throws EmptyInput.
std::vector<Distribution> distribution_report(const std::vector<TuneChoice>& choices);

}  // namespace polyspmv::autotune
