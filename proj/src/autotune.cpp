#include "polyspmv/autotune.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <stdexcept>

#include "polyspmv/error.hpp"

namespace polyspmv::autotune {

double WallTimer::time(const TimingContext&, const std::function<void()>& work) {
  const auto start = std::chrono::steady_clock::now();
  work();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

std::vector<Candidate> formats_for(KernelVersion version) {
  return {{Format::Csr, version}, {Format::Coo, version}, {Format::Dia, version}};
}

std::vector<Candidate> all_candidates() {
  std::vector<Candidate> out;
  for (KernelVersion v : kAllVersions) {
    const auto part = formats_for(v);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

double median(std::vector<double> samples) {
  if (samples.empty()) throw EmptyInput("median of no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

double gflops(std::size_t nnz, std::size_t iterations, double seconds) {
  if (!(seconds > 0.0)) return 0.0;
  return 2.0 * static_cast<double>(nnz) * static_cast<double>(iterations) / seconds / 1e9;
}

template <class T>
Measurement measure(const DynamicMatrix<T>& A, std::string_view matrix_id, Format format,
                    KernelVersion version, const MeasureOptions& opts, Timer& timer,
                    const KernelRegistry<T>& registry) {
  if (opts.iters == 0 || opts.reps == 0)
    throw std::invalid_argument("measure: iters and reps must be >= 1");
  if (!registry.contains(format, version))
    throw UnsupportedCombination("no SpMV kernel registered for (" +
                                 std::string(to_string(format)) + ", " +
                                 std::string(to_string(version)) + ")");
  const DynamicMatrix<T> M = convert(A, format, opts.dia_policy);
  const auto& shape = M.shape();
  const std::vector<T> x(shape.ncols, T(1));
  std::vector<T> y(shape.nrows);

  auto spmv = [&] { registry.run(M, x, y, version, opts.lanes); };
  if (opts.warmup) spmv();

  Measurement m;
  m.matrix_id = std::string(matrix_id);
  m.format = format;
  m.version = version;
  m.nnz = shape.nnz;
  m.iterations = opts.iters;
  m.samples.reserve(opts.reps);
  for (std::size_t rep = 0; rep < opts.reps; ++rep) {
    const TimingContext ctx{matrix_id, format, version, rep};
    m.samples.push_back(timer.time(ctx, [&] {
      for (std::size_t it = 0; it < opts.iters; ++it) spmv();
    }));
  }
  m.median_seconds = median(m.samples);
  m.gflops = gflops(m.nnz, m.iterations, m.median_seconds);
  return m;
}

namespace {

int format_rank(Format f) {
  switch (f) {
    case Format::Csr: return 0;
    case Format::Coo: return 1;
    case Format::Dia: return 2;
  }
  return 3;
}

}  // namespace

bool preferred(const TuneChoice& a, const TuneChoice& b) {
  if (a.median_seconds != b.median_seconds) return a.median_seconds < b.median_seconds;
  if (a.format != b.format) return format_rank(a.format) < format_rank(b.format);
  return a.version == KernelVersion::Plain && b.version == KernelVersion::Vla;
}

template <class T>
TuneChoice tune(const DynamicMatrix<T>& A, std::string_view matrix_id,
                const std::vector<Candidate>& candidates, const MeasureOptions& opts,
                Timer& timer, const KernelRegistry<T>& registry,
                std::vector<Measurement>* measurements) {
  if (candidates.empty()) throw std::invalid_argument("tune: no candidates");
  std::optional<TuneChoice> best;
  std::string failures;
  for (const Candidate& c : candidates) {
    try {
      Measurement m = measure(A, matrix_id, c.format, c.version, opts, timer, registry);
      const TuneChoice choice{c.format, c.version, m.median_seconds};
      if (!best || preferred(choice, *best)) best = choice;
      if (measurements) measurements->push_back(std::move(m));
    } catch (const FillRatioExceeded& e) {
      failures += std::string(" ") + e.what() + ";";
    } catch (const UnsupportedCombination& e) {
      failures += std::string(" ") + e.what() + ";";
    }
  }
  if (!best)
    throw AllCandidatesFailed("no candidate could be measured for '" + std::string(matrix_id) +
                              "':" + failures);
  return *best;
}

std::vector<Distribution> distribution_report(const std::vector<TuneChoice>& choices) {
  if (choices.empty()) throw EmptyInput("distribution_report: no tuning results");
  std::vector<Distribution> out;
  for (KernelVersion v : kAllVersions) {
    std::array<std::size_t, 3> counts{};
    std::size_t total = 0;
    for (const auto& c : choices) {
      if (c.version != v) continue;
      ++counts[static_cast<std::size_t>(c.format)];
      ++total;
    }
    if (total == 0) continue;
    Distribution d;
    d.version = v;
    d.matrices = total;
    for (std::size_t f = 0; f < 3; ++f)
      d.percent[f] = 100.0 * static_cast<double>(counts[f]) / static_cast<double>(total);
    out.push_back(d);
  }
  return out;
}

#define POLYSPMV_INSTANTIATE(T)                                                           \
  template Measurement measure(const DynamicMatrix<T>&, std::string_view, Format,         \
                               KernelVersion, const MeasureOptions&, Timer&,              \
                               const KernelRegistry<T>&);                                 \
  template TuneChoice tune(const DynamicMatrix<T>&, std::string_view,                     \
                           const std::vector<Candidate>&, const MeasureOptions&, Timer&,  \
                           const KernelRegistry<T>&, std::vector<Measurement>*);

POLYSPMV_INSTANTIATE(float)
POLYSPMV_INSTANTIATE(double)

}  // namespace polyspmv::autotune
