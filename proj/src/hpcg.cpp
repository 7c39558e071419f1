#include "polyspmv/hpcg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "polyspmv/error.hpp"

namespace polyspmv::hpcg {

void ProblemSpec::check() const {
  if (local.x == 0 || local.y == 0 || local.z == 0)
    throw std::invalid_argument("local grid dimensions must be >= 1");
  if (procs.x == 0 || procs.y == 0 || procs.z == 0)
    throw std::invalid_argument("process grid dimensions must be >= 1");
}

namespace {

struct Layout {
  ProblemSpec spec;
  Grid3 global;

  std::size_t global_index(std::size_t gx, std::size_t gy, std::size_t gz) const {
    return gx + global.x * (gy + global.y * gz);
  }
  std::size_t owner(std::size_t gx, std::size_t gy, std::size_t gz) const {
    return gx / spec.local.x + spec.procs.x * (gy / spec.local.y + spec.procs.y * (gz / spec.local.z));
  }
  Index owner_index(std::size_t gx, std::size_t gy, std::size_t gz) const {
    const auto& l = spec.local;
    return static_cast<Index>(gx % l.x + l.x * (gy % l.y + l.y * (gz % l.z)));
  }
};

double dot(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  // Partial sums per rank, then a reduction in rank order.
  double total = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    double part = 0.0;
    for (std::size_t i = 0; i < a[r].size(); ++i) part += a[r][i] * b[r][i];
    total += part;
  }
  return total;
}

}  // namespace

Problem build_problem(const ProblemSpec& spec) {
  spec.check();
  const Layout layout{spec, spec.global()};
  const Grid3& g = layout.global;
  const Grid3& l = spec.local;
  constexpr auto kMax = static_cast<double>(std::numeric_limits<Index>::max());
  if (static_cast<double>(g.x) * g.y * g.z > kMax ||
      (3.0 * g.x - 2) * (3.0 * g.y - 2) * (3.0 * g.z - 2) > kMax)
    throw Overflow("global problem exceeds the 32-bit index range");

  Problem problem;
  problem.spec = spec;
  problem.global_rows = g.count();
  const std::size_t nranks = spec.procs.count();
  problem.ranks.resize(nranks);

  for (std::size_t r = 0; r < nranks; ++r) {
    RankSystem& rank = problem.ranks[r];
    rank.rank = r;
    rank.coords = {r % spec.procs.x, (r / spec.procs.x) % spec.procs.y,
                   r / (spec.procs.x * spec.procs.y)};
    const std::size_t ox = rank.coords.x * l.x, oy = rank.coords.y * l.y, oz = rank.coords.z * l.z;
    const std::size_t nrows = l.count();

    // Remote entries keep their global column until the halo is compacted.
    CsrMatrix<double> local, remote;
    local.shape = {nrows, nrows, 0};
    remote.shape = {nrows, 0, 0};
    local.row_pointers.assign(1, 0);
    remote.row_pointers.assign(1, 0);
    rank.global_rows.reserve(nrows);
    rank.b.reserve(nrows);

    for (std::size_t lz = 0; lz < l.z; ++lz) {
      for (std::size_t ly = 0; ly < l.y; ++ly) {
        for (std::size_t lx = 0; lx < l.x; ++lx) {
          const std::size_t gx = ox + lx, gy = oy + ly, gz = oz + lz;
          const std::size_t row = layout.global_index(gx, gy, gz);
          rank.global_rows.push_back(static_cast<Index>(row));
          double row_sum = 0.0;
          for (int dz = -1; dz <= 1; ++dz) {
            if ((gz == 0 && dz < 0) || (gz + 1 == g.z && dz > 0)) continue;
            for (int dy = -1; dy <= 1; ++dy) {
              if ((gy == 0 && dy < 0) || (gy + 1 == g.y && dy > 0)) continue;
              for (int dx = -1; dx <= 1; ++dx) {
                if ((gx == 0 && dx < 0) || (gx + 1 == g.x && dx > 0)) continue;
                const std::size_t cx = gx + dx, cy = gy + dy, cz = gz + dz;
                const std::size_t col = layout.global_index(cx, cy, cz);
                const double value = col == row ? 26.0 : -1.0;
                row_sum += value;
                if (layout.owner(cx, cy, cz) == r) {
                  local.col_indices.push_back(layout.owner_index(cx, cy, cz));
                  local.values.push_back(value);
                } else {
                  remote.col_indices.push_back(static_cast<Index>(col));
                  remote.values.push_back(value);
                }
              }
            }
          }
          local.row_pointers.push_back(static_cast<Index>(local.col_indices.size()));
          remote.row_pointers.push_back(static_cast<Index>(remote.col_indices.size()));
          rank.b.push_back(row_sum);
        }
      }
    }

    rank.halo_columns = remote.col_indices;
    std::sort(rank.halo_columns.begin(), rank.halo_columns.end());
    rank.halo_columns.erase(std::unique(rank.halo_columns.begin(), rank.halo_columns.end()),
                            rank.halo_columns.end());
    for (Index& c : remote.col_indices) {
      c = static_cast<Index>(std::lower_bound(rank.halo_columns.begin(), rank.halo_columns.end(), c) -
                             rank.halo_columns.begin());
    }
    for (Index col : rank.halo_columns) {
      const std::size_t cx = col % g.x, cy = (col / g.x) % g.y, cz = col / (g.x * g.y);
      rank.halo_map.push_back({layout.owner(cx, cy, cz), layout.owner_index(cx, cy, cz)});
    }

    local.shape.nnz = local.values.size();
    remote.shape.ncols = rank.halo_columns.size();
    remote.shape.nnz = remote.values.size();
    problem.global_nnz += local.shape.nnz + remote.shape.nnz;
    rank.local = DynamicMatrix<double>(std::move(local));
    rank.remote = DynamicMatrix<double>(std::move(remote));
    rank.x_local.assign(nrows, 0.0);
    rank.halo.assign(rank.halo_columns.size(), 0.0);
  }
  return problem;
}

void halo_exchange(std::vector<RankSystem>& ranks) {
  for (RankSystem& rank : ranks) {
    for (std::size_t k = 0; k < rank.halo_map.size(); ++k) {
      const HaloSource& src = rank.halo_map[k];
      rank.halo[k] = ranks[src.owner].x_local[src.owner_index];
    }
  }
}

std::vector<std::vector<double>> distributed_spmv(const std::vector<RankSystem>& ranks,
                                                  KernelVersion version, const LaneConfig& cfg,
                                                  const KernelRegistry<double>& registry) {
  std::vector<std::vector<double>> y(ranks.size());
  std::vector<double> remote_part;
  for (std::size_t r = 0; r < ranks.size(); ++r) {
    const RankSystem& rank = ranks[r];
    y[r].assign(rank.local.shape().nrows, 0.0);
    registry.run(rank.local, rank.x_local, y[r], version, cfg);
    if (rank.remote.shape().nnz == 0) continue;
    remote_part.assign(rank.remote.shape().nrows, 0.0);
    registry.run(rank.remote, rank.halo, remote_part, version, cfg);
    for (std::size_t i = 0; i < remote_part.size(); ++i) y[r][i] += remote_part[i];
  }
  return y;
}

std::vector<double> gather_global(const std::vector<RankSystem>& ranks,
                                  const std::vector<std::vector<double>>& per_rank) {
  std::size_t n = 0;
  for (const auto& rank : ranks) n += rank.global_rows.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < ranks.size(); ++r)
    for (std::size_t i = 0; i < ranks[r].global_rows.size(); ++i)
      out[ranks[r].global_rows[i]] = per_rank[r][i];
  return out;
}

void set_formats(RankSystem& rank, Format local, Format remote, const DiaFillPolicy& policy) {
  DynamicMatrix<double> new_local = convert(rank.local, local, policy);
  DynamicMatrix<double> new_remote = convert(rank.remote, remote, policy);
  rank.local = std::move(new_local);
  rank.remote = std::move(new_remote);
}

CgState cg_solve(std::vector<RankSystem>& ranks, const CgOptions& opts,
                 const KernelRegistry<double>& registry) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("cg_solve: tol must be positive");
  const std::size_t nranks = ranks.size();
  CgState state;
  std::vector<std::vector<double>> r(nranks), p(nranks), b(nranks);
  state.x.resize(nranks);
  for (std::size_t k = 0; k < nranks; ++k) {
    b[k] = ranks[k].b;
    state.x[k].assign(b[k].size(), 0.0);
    r[k] = b[k];  // r0 = b - A * 0
    p[k] = r[k];
  }

  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    state.residual_history.push_back(0.0);
    state.converged = true;
    return state;
  }
  double rr = dot(r, r);
  double rel = std::sqrt(rr) / bnorm;
  state.residual_history.push_back(rel);

  while (rel > opts.tol && state.iterations < opts.max_iters) {
    for (std::size_t k = 0; k < nranks; ++k) ranks[k].x_local = p[k];
    halo_exchange(ranks);
    const auto Ap = distributed_spmv(ranks, opts.version, opts.lanes, registry);

    const double alpha = rr / dot(p, Ap);
    for (std::size_t k = 0; k < nranks; ++k) {
      for (std::size_t i = 0; i < p[k].size(); ++i) {
        state.x[k][i] += alpha * p[k][i];
        r[k][i] -= alpha * Ap[k][i];
      }
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    for (std::size_t k = 0; k < nranks; ++k)
      for (std::size_t i = 0; i < p[k].size(); ++i) p[k][i] = r[k][i] + beta * p[k][i];
    rr = rr_new;

    ++state.iterations;
    rel = std::sqrt(rr) / bnorm;
    state.residual_history.push_back(rel);
    if (!std::isfinite(rel))
      throw Diverged("CG residual became non-finite at iteration " +
                     std::to_string(state.iterations));
  }
  state.relative_residual = rel;
  state.converged = rel <= opts.tol;
  return state;
}

namespace {

using autotune::Timer;
using autotune::TimingContext;

double time_spmv(std::vector<RankSystem>& ranks, KernelVersion version, const HpcgOptions& opts,
                 Timer& timer, const KernelRegistry<double>& registry, std::string_view id,
                 Format format) {
  // Untimed warm-up, as in autotune::measure.
  halo_exchange(ranks);
  (void)distributed_spmv(ranks, version, opts.lanes, registry);
  std::vector<double> samples;
  for (std::size_t rep = 0; rep < opts.reps; ++rep) {
    samples.push_back(timer.time(TimingContext{id, format, version, rep}, [&] {
      for (std::size_t it = 0; it < opts.iters; ++it) {
        halo_exchange(ranks);
        (void)distributed_spmv(ranks, version, opts.lanes, registry);
      }
    }));
  }
  return autotune::median(std::move(samples));
}

void fill_probe(std::vector<RankSystem>& ranks) {
  for (RankSystem& rank : ranks)
    for (std::size_t i = 0; i < rank.global_rows.size(); ++i)
      rank.x_local[i] = 1.0 + 0.125 * static_cast<double>(rank.global_rows[i] % 7);
}

}  // namespace

HpcgReport run_phases(const ProblemSpec& spec, const HpcgOptions& opts, Timer& timer,
                      const KernelRegistry<double>& registry) {
  // Phase 1: problem setup.
  Problem problem = build_problem(spec);
  HpcgReport report;
  report.spec = spec;
  report.ranks = problem.ranks.size();
  report.global_rows = problem.global_rows;
  report.global_nnz = problem.global_nnz;
  std::vector<RankSystem> reference = problem.ranks;

  // Phase 2: reference timing.
  report.ref_spmv_seconds = time_spmv(reference, KernelVersion::Plain, opts, timer, registry,
                                      "reference", Format::Csr);
  CgOptions ref_cg{opts.tol, opts.max_iters, KernelVersion::Plain, opts.lanes};
  CgState ref_state;
  report.ref_cg_seconds = timer.time(
      TimingContext{"reference-cg", Format::Csr, KernelVersion::Plain, 0},
      [&] { ref_state = cg_solve(reference, ref_cg, registry); });
  report.ref_cg_iterations = ref_state.iterations;
  report.ref_relative_residual = ref_state.relative_residual;

  fill_probe(reference);
  halo_exchange(reference);
  const auto ref_y = distributed_spmv(reference, KernelVersion::Plain, opts.lanes, registry);

  autotune::MeasureOptions mopts;
  mopts.iters = opts.iters;
  mopts.reps = opts.reps;
  mopts.lanes = opts.lanes;
  mopts.dia_policy = opts.dia_policy;

  for (KernelVersion version : opts.versions) {
    VersionResult result;
    result.version = version;
    std::vector<RankSystem> tuned = problem.ranks;

    // Phase 3: run-first tuning of each part on each rank.
    const auto candidates = autotune::formats_for(version);
    for (RankSystem& rank : tuned) {
      PartChoice choice;
      const std::string base = "rank" + std::to_string(rank.rank);
      choice.local = autotune::tune(rank.local, base + "/local", candidates, mopts, timer, registry)
                         .format;
      if (rank.remote.shape().nnz > 0)
        choice.remote =
            autotune::tune(rank.remote, base + "/remote", candidates, mopts, timer, registry)
                .format;
      set_formats(rank, choice.local, choice.remote, opts.dia_policy);
      result.formats.push_back(choice);
    }

    // Phase 4: validation against the reference.
    fill_probe(tuned);
    halo_exchange(tuned);
    const auto y = distributed_spmv(tuned, version, opts.lanes, registry);
    for (std::size_t r = 0; r < y.size(); ++r)
      for (std::size_t i = 0; i < y[r].size(); ++i)
        result.max_spmv_error = std::max(
            result.max_spmv_error,
            std::abs(y[r][i] - ref_y[r][i]) / std::max(std::abs(ref_y[r][i]), 1.0));
    if (!(result.max_spmv_error <= opts.spmv_tol))
      throw VerificationFailed("tuned SpMV (" + std::string(to_string(version)) +
                               ") deviates from the reference by " +
                               std::to_string(result.max_spmv_error));

    CgOptions cg{opts.tol, opts.max_iters, version, opts.lanes};
    CgState state;
    result.cg_seconds = timer.time(
        TimingContext{"tuned-cg", result.formats.front().local, version, 0},
        [&] { state = cg_solve(tuned, cg, registry); });
    result.cg_iterations = state.iterations;
    result.relative_residual = state.relative_residual;
    for (std::size_t r = 0; r < state.x.size(); ++r)
      for (std::size_t i = 0; i < state.x[r].size(); ++i)
        result.max_solution_diff =
            std::max(result.max_solution_diff, std::abs(state.x[r][i] - ref_state.x[r][i]));
    if (!state.converged || !(result.max_solution_diff <= opts.solution_tol))
      throw VerificationFailed("tuned CG (" + std::string(to_string(version)) +
                               ") did not reproduce the reference solution");

    // Phase 5: tuned timing.
    result.spmv_seconds = time_spmv(tuned, version, opts, timer, registry, "tuned",
                                    result.formats.front().local);
    result.spmv_ratio =
        result.spmv_seconds > 0.0 ? report.ref_spmv_seconds / result.spmv_seconds : 0.0;
    report.versions.push_back(std::move(result));
  }
  return report;
}

void write_report_csv(std::ostream& out, const HpcgReport& report) {
  out << "version,rank,local_format,remote_format,ref_spmv_seconds,spmv_seconds,spmv_ratio,"
         "ref_cg_iterations,cg_iterations,relative_residual,max_spmv_error\n";
  char buf[512];
  for (const auto& v : report.versions) {
    for (std::size_t r = 0; r < v.formats.size(); ++r) {
      std::snprintf(buf, sizeof buf, "%s,%zu,%s,%s,%.9f,%.9f,%.6f,%zu,%zu,%.6e,%.6e\n",
                    std::string(to_string(v.version)).c_str(), r,
                    std::string(to_string(v.formats[r].local)).c_str(),
                    std::string(to_string(v.formats[r].remote)).c_str(), report.ref_spmv_seconds,
                    v.spmv_seconds, v.spmv_ratio, report.ref_cg_iterations, v.cg_iterations,
                    v.relative_residual, v.max_spmv_error);
      out << buf;
    }
  }
}

std::string summarize(const HpcgReport& report) {
  std::ostringstream os;
  const auto& s = report.spec;
  const auto g = s.global();
  os << "HPCG-lite: local " << s.local.x << "x" << s.local.y << "x" << s.local.z << ", procs "
     << s.procs.x << "x" << s.procs.y << "x" << s.procs.z << ", global " << g.x << "x" << g.y
     << "x" << g.z << " (" << report.global_rows << " rows, " << report.global_nnz << " nnz)\n";
  os << "reference (CSR, Plain): spmv " << report.ref_spmv_seconds << " s, CG "
     << report.ref_cg_iterations << " iterations, residual " << report.ref_relative_residual
     << "\n";
  for (const auto& v : report.versions) {
    os << to_string(v.version) << ": spmv " << v.spmv_seconds << " s, ratio " << v.spmv_ratio
       << ", CG " << v.cg_iterations << " iterations, residual " << v.relative_residual
       << ", verification passed\n";
    for (std::size_t r = 0; r < v.formats.size(); ++r)
      os << "  rank " << r << ": local " << to_string(v.formats[r].local) << ", remote "
         << to_string(v.formats[r].remote) << "\n";
  }
  return os.str();
}

}  // namespace polyspmv::hpcg
