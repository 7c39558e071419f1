#pragma once

// A small HPCG-style benchmark: 27-point Poisson problem on a 3D grid,
// block-decomposed over simulated ranks, solved with unpreconditioned CG.
// Each rank's rows are split into a local part (owned columns) and a remote
// part (halo columns) so the two can use different storage formats.

#include <iosfwd>
#include <string>
#include <vector>

#include "polyspmv/autotune.hpp"
#include "polyspmv/convert.hpp"
#include "polyspmv/core.hpp"
#include "polyspmv/spmv.hpp"

namespace polyspmv::hpcg {

struct Grid3 {
  std::size_t x = 1, y = 1, z = 1;

  std::size_t count() const { return x * y * z; }
  friend bool operator==(const Grid3&, const Grid3&) = default;
};

struct ProblemSpec {
  Grid3 local;  // points per rank
  Grid3 procs;  // rank grid

  Grid3 global() const { return {local.x * procs.x, local.y * procs.y, local.z * procs.z}; }
  /// Throws std::invalid_argument when any count is zero.
  void check() const;
};

struct HaloSource {
  std::size_t owner = 0;
  Index owner_index = 0;
};

struct RankSystem {
  std::size_t rank = 0;
  Grid3 coords;
  std::vector<Index> global_rows;   // local row -> global row
  DynamicMatrix<double> local;      // nrows x owned
  DynamicMatrix<double> remote;     // nrows x halo size
  std::vector<Index> halo_columns;  // halo slot -> global column, ascending
  std::vector<HaloSource> halo_map; // halo slot -> owner
  std::vector<double> b;
  std::vector<double> x_local;      // SpMV input, owned entries
  std::vector<double> halo;         // SpMV input, remote entries
};

struct Problem {
  ProblemSpec spec;
  std::vector<RankSystem> ranks;
  std::size_t global_rows = 0;
  std::size_t global_nnz = 0;
};

/// Builds every rank's rows of the global stencil matrix with b = A * ones.
/// Throws Overflow when the global problem does not fit in Index.
Problem build_problem(const ProblemSpec& spec);

/// Copies owner values of x_local into every rank's halo buffer.
void halo_exchange(std::vector<RankSystem>& ranks);

/// y = local * x_local + remote * halo on every rank. Halos must be current.
std::vector<std::vector<double>> distributed_spmv(
    const std::vector<RankSystem>& ranks, KernelVersion version, const LaneConfig& cfg = {},
    const KernelRegistry<double>& registry = default_registry<double>());

/// Scatters per-rank vectors into one vector in global row order.
std::vector<double> gather_global(const std::vector<RankSystem>& ranks,
                                  const std::vector<std::vector<double>>& per_rank);

/// Re-encodes the two parts of a rank. Throws FillRatioExceeded.
void set_formats(RankSystem& rank, Format local, Format remote, const DiaFillPolicy& policy = {});

struct CgOptions {
  double tol = 1e-9;
  std::size_t max_iters = 500;
  KernelVersion version = KernelVersion::Plain;
  LaneConfig lanes{};
};

struct CgState {
  std::vector<std::vector<double>> x;  // per rank
  std::size_t iterations = 0;
  std::vector<double> residual_history;  // ||r_k|| / ||b||, k = 0..iterations
  double relative_residual = 0.0;
  bool converged = false;
};

/// Unpreconditioned CG from x0 = 0. Overwrites x_local and halo of every
/// rank. Throws Diverged when the residual becomes non-finite.
CgState cg_solve(std::vector<RankSystem>& ranks, const CgOptions& opts,
                 const KernelRegistry<double>& registry = default_registry<double>());

struct PartChoice {
  Format local = Format::Csr;
  Format remote = Format::Csr;
};

struct HpcgOptions {
  std::vector<KernelVersion> versions{KernelVersion::Plain, KernelVersion::Vla};
  std::size_t iters = 100;  // SpMVs per timing sample
  std::size_t reps = 10;
  LaneConfig lanes{};
  DiaFillPolicy dia_policy{};
  double tol = 1e-9;
  std::size_t max_iters = 500;
  double spmv_tol = 1e-10;      // tuned vs reference SpMV, relative
  double solution_tol = 1e-6;   // tuned vs reference CG solution, max-norm
};

struct VersionResult {
  KernelVersion version = KernelVersion::Plain;
  std::vector<PartChoice> formats;  // per rank
  double spmv_seconds = 0.0;
  double cg_seconds = 0.0;
  std::size_t cg_iterations = 0;
  double relative_residual = 0.0;
  double max_spmv_error = 0.0;
  double max_solution_diff = 0.0;
  double spmv_ratio = 0.0;  // reference / tuned; above 1 is a speedup
};

struct HpcgReport {
  ProblemSpec spec;
  std::size_t ranks = 0;
  std::size_t global_rows = 0;
  std::size_t global_nnz = 0;
  double ref_spmv_seconds = 0.0;
  double ref_cg_seconds = 0.0;
  std::size_t ref_cg_iterations = 0;
  double ref_relative_residual = 0.0;
  std::vector<VersionResult> versions;
};

/// Setup, reference timing (CSR + Plain), run-first tuning of each rank's
/// local and remote parts, verification against the reference, tuned timing.
/// Throws VerificationFailed when the tuned configuration disagrees.
HpcgReport run_phases(const ProblemSpec& spec, const HpcgOptions& opts, autotune::Timer& timer,
                      const KernelRegistry<double>& registry = default_registry<double>());

/// One row per (version, rank).
void write_report_csv(std::ostream& out, const HpcgReport& report);
std::string summarize(const HpcgReport& report);

}  // namespace polyspmv::hpcg
