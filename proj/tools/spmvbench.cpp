// spmvbench: format conversion, SpMV corpus sweeps, speedup reports,
// HPCG-lite runs and dataflow cycle estimates.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polyspmv/bench.hpp"
#include "polyspmv/convert.hpp"
#include "polyspmv/dataflow.hpp"
#include "polyspmv/error.hpp"
#include "polyspmv/hpcg.hpp"
#include "polyspmv/matrix_io.hpp"

namespace {

using namespace polyspmv;

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Format> parse_formats(const std::string& s) {
  std::vector<Format> out;
  for (const auto& item : split_list(s)) {
    auto f = parse_format(item);
    if (!f) throw UsageError("unknown format '" + item + "' (expected coo, csr, dia)");
    out.push_back(*f);
  }
  if (out.empty()) throw UsageError("no formats given");
  return out;
}

std::vector<KernelVersion> parse_versions(const std::string& s) {
  std::vector<KernelVersion> out;
  for (const auto& item : split_list(s)) {
    auto v = parse_version(item);
    if (!v) throw UsageError("unknown version '" + item + "' (expected plain, vla)");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError("no versions given");
  return out;
}

hpcg::Grid3 parse_grid(const std::string& s, const char* flag) {
  const auto parts = split_list(s);
  if (parts.size() != 3) throw UsageError(std::string(flag) + " expects NX,NY,NZ");
  std::size_t v[3];
  for (int i = 0; i < 3; ++i) {
    try {
      std::size_t pos = 0;
      const long long n = std::stoll(parts[i], &pos);
      if (pos != parts[i].size() || n < 1) throw std::invalid_argument("");
      v[i] = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + parts[i] + "' is not a positive integer");
    }
  }
  return {v[0], v[1], v[2]};
}

autotune::Candidate parse_candidate(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) throw UsageError("baseline must look like CSR/Plain");
  auto f = parse_format(s.substr(0, slash));
  auto v = parse_version(s.substr(slash + 1));
  if (!f || !v) throw UsageError("baseline must look like CSR/Plain");
  return {*f, *v};
}

LaneConfig lanes_from(std::size_t flag) {
  LaneConfig cfg = LaneConfig::from_env();
  if (flag != 0) {
    if (flag > 64) throw UsageError("--lanes must be in [1, 64]");
    cfg.lanes = flag;
  }
  return cfg;
}

template <class Seq>
void print_seq(std::ostream& out, const char* name, const Seq& seq) {
  out << name << ':';
  for (const auto& v : seq) out << ' ' << v;
  out << '\n';
}

void write_converted(std::ostream& out, const DynamicMatrix<double>& m) {
  out.precision(std::numeric_limits<double>::max_digits10);
  const auto& s = m.shape();
  switch (m.format()) {
    case Format::Coo:
      io::write_matrix_market(out, m.coo());
      break;
    case Format::Csr:
      out << "# CSR " << s.nrows << ' ' << s.ncols << ' ' << s.nnz << '\n';
      print_seq(out, "IRP", m.csr().row_pointers);
      print_seq(out, "AJ", m.csr().col_indices);
      print_seq(out, "AV", m.csr().values);
      break;
    case Format::Dia: {
      const auto& d = m.dia();
      out << "# DIA " << s.nrows << ' ' << s.ncols << ' ' << s.nnz << " ndiags " << d.ndiags()
          << " padded_rows " << d.padded_rows << '\n';
      print_seq(out, "DOFF", d.offsets);
      out << "AV:\n";
      for (std::size_t i = 0; i < d.padded_rows; ++i) {
        for (std::size_t j = 0; j < d.ndiags(); ++j) out << (j ? " " : "") << d.at(i, j);
        out << '\n';
      }
      break;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-format sparse matrix-vector benchmark"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Time every (format, version) on a matrix corpus");
  std::string manifest, run_output = "results.csv", run_formats = "coo,csr,dia",
                        run_versions = "plain,vla";
  std::size_t iters = 100, reps = 10, jobs = 1, lanes = 0;
  double max_fill = 10.0;
  run->add_option("manifest", manifest, "Corpus manifest (id<TAB>path-or-genspec per line)")->required();
  run->add_option("-o,--output", run_output, "CSV output path")->capture_default_str();
  run->add_option("--formats", run_formats, "Comma-separated formats")->capture_default_str();
  run->add_option("--versions", run_versions, "Comma-separated kernel versions")->capture_default_str();
  run->add_option("--iters", iters, "SpMVs per timing sample")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--reps", reps, "Timing samples per configuration")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--jobs", jobs, "Matrices measured concurrently")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--lanes", lanes, "Vector lanes for Vla kernels (default: SPMV_LANES or 8)");
  run->add_option("--max-fill", max_fill, "DIA fill-ratio limit")->capture_default_str();

  // report
  auto* rep = app.add_subcommand("report", "Speedups and optimal-format distribution from CSVs");
  std::vector<std::string> csvs;
  std::string baseline = "CSR/Plain", svg;
  rep->add_option("csv", csvs, "Benchmark CSV files")->required();
  rep->add_option("--baseline", baseline, "Reference configuration FORMAT/VERSION")->capture_default_str();
  rep->add_option("--svg", svg, "Write a speedup scatter plot to this path");

  // hpcg
  auto* hp = app.add_subcommand("hpcg", "Run the HPCG-lite benchmark");
  std::string local = "16,16,16", procs = "1,1,1", hp_versions = "plain,vla", hp_output;
  double tol = 1e-9;
  std::size_t max_iters = 500, hp_iters = 100, hp_reps = 10;
  hp->add_option("--local", local, "Local grid NX,NY,NZ")->capture_default_str();
  hp->add_option("--procs", procs, "Process grid PX,PY,PZ")->capture_default_str();
  hp->add_option("--tol", tol, "CG relative residual tolerance")->capture_default_str();
  hp->add_option("--max-iters", max_iters, "CG iteration cap")->capture_default_str();
  hp->add_option("--versions", hp_versions, "Kernel versions to tune")->capture_default_str();
  hp->add_option("--iters", hp_iters, "SpMVs per timing sample")->capture_default_str()->check(CLI::PositiveNumber);
  hp->add_option("--reps", hp_reps, "Timing samples")->capture_default_str()->check(CLI::PositiveNumber);
  hp->add_option("--lanes", lanes, "Vector lanes for Vla kernels");
  hp->add_option("-o,--output", hp_output, "CSV output path");

  // convert
  auto* cv = app.add_subcommand("convert", "Convert a Matrix Market file to COO, CSR or DIA");
  std::string input, to = "csr", cv_output;
  cv->add_option("input", input, "Matrix Market file")->required();
  cv->add_option("--to", to, "Target format")->capture_default_str();
  cv->add_option("-o,--output", cv_output, "Output path (default stdout)");
  cv->add_option("--max-fill", max_fill, "DIA fill-ratio limit")->capture_default_str();

  // estimate
  auto* est = app.add_subcommand("estimate", "Dataflow COO cycle estimate for a matrix");
  std::string est_input;
  dataflow::DataflowConfig df;
  bool emulate = false;
  est->add_option("input", est_input, "Matrix Market file or gen: spec")->required();
  est->add_option("--latency", df.latency, "Adder pipeline depth")->capture_default_str();
  est->add_option("--pack-bits", df.pack_bits, "Memory packing width")->capture_default_str();
  est->add_option("--element-bits", df.element_bits, "Bits per streamed element")->capture_default_str();
  est->add_option("--clock", df.clock_hz, "Clock frequency in Hz")->capture_default_str();
  est->add_flag("--emulate", emulate, "Also run the functional emulation against scalar COO");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) {
      bench::RunOptions opts;
      opts.formats = parse_formats(run_formats);
      opts.versions = parse_versions(run_versions);
      opts.iters = iters;
      opts.reps = reps;
      opts.jobs = jobs;
      opts.lanes = lanes_from(lanes);
      opts.dia_policy.max_fill_ratio = max_fill;
      autotune::WallTimer timer;
      return bench::cmd_run(manifest, opts, run_output, timer, std::cerr);
    }

    if (*rep) {
      std::vector<bench::BenchRecord> records;
      for (const auto& path : csvs) {
        std::ifstream in(path);
        if (!in) {
          std::cerr << "error: cannot open '" << path << "'\n";
          return kUsageError;
        }
        auto part = bench::read_csv(in);
        records.insert(records.end(), part.begin(), part.end());
      }
      const auto report = bench::build_report(records, parse_candidate(baseline));
      std::cout << bench::render_report(report);
      if (!svg.empty()) std::ofstream(svg) << bench::render_svg(report);
      return 0;
    }

    if (*hp) {
      hpcg::ProblemSpec spec{parse_grid(local, "--local"), parse_grid(procs, "--procs")};
      hpcg::HpcgOptions opts;
      opts.versions = parse_versions(hp_versions);
      opts.tol = tol;
      opts.max_iters = max_iters;
      opts.iters = hp_iters;
      opts.reps = hp_reps;
      opts.lanes = lanes_from(lanes);
      autotune::WallTimer timer;
      const auto report = hpcg::run_phases(spec, opts, timer);
      std::cout << hpcg::summarize(report);
      if (!hp_output.empty()) {
        std::ofstream out(hp_output);
        hpcg::write_report_csv(out, report);
      } else {
        hpcg::write_report_csv(std::cout, report);
      }
      return 0;
    }

    if (*cv) {
      const auto target = parse_format(to);
      if (!target) throw UsageError("unknown format '" + to + "'");
      DiaFillPolicy policy;
      policy.max_fill_ratio = max_fill;
      const DynamicMatrix<double> m(io::read_matrix_market_file<double>(input));
      const auto converted = convert(m, *target, policy);
      if (cv_output.empty()) {
        write_converted(std::cout, converted);
      } else {
        std::ofstream out(cv_output);
        write_converted(out, converted);
      }
      return 0;
    }

    if (*est) {
      df.check();
      const auto coo = io::load_entry<double>(io::CorpusEntry{"input", est_input});
      const auto padded = dataflow::pad_inputs(coo, df);
      const auto e = dataflow::estimate_cycles(padded, df);
      std::printf("nrows %zu nnz %zu padded_nnz %zu\n", coo.shape.nrows, coo.shape.nnz,
                  padded.padded_nnz);
      std::printf("load_cycles %llu reduce_cycles %llu total_cycles %llu est_seconds %.9g\n",
                  static_cast<unsigned long long>(e.load_cycles),
                  static_cast<unsigned long long>(e.reduce_cycles),
                  static_cast<unsigned long long>(e.total_cycles), e.est_seconds);
      if (emulate) {
        const std::vector<double> x(coo.shape.ncols, 1.0);
        const auto y = dataflow::reduce_stage(padded, dataflow::multiply_stage(padded, x), df);
        const auto ref = spmv_coo_plain(coo, x);
        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
          err = std::max(err, std::abs(y[i] - ref[i]) / std::max(std::abs(ref[i]), 1.0));
        std::printf("emulation max relative error vs scalar COO: %.3e\n", err);
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
