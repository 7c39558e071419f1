#include "polyspmv/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "polyspmv/error.hpp"

namespace polyspmv::bench {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::FillExceeded: return "fill_exceeded";
    case Status::Unsupported: return "unsupported";
    case Status::Error: return "error";
  }
  return "error";
}

std::optional<Status> parse_status(std::string_view s) {
  if (s == "ok") return Status::Ok;
  if (s == "fill_exceeded") return Status::FillExceeded;
  if (s == "unsupported") return Status::Unsupported;
  if (s == "error") return Status::Error;
  return std::nullopt;
}

namespace {

double round_fixed(double v, double scale) { return std::round(v * scale) / scale; }

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class I>
std::optional<I> parse_opt_int(const std::string& s, std::size_t lineno) {
  if (s.empty()) return std::nullopt;
  I v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("csv line " + std::to_string(lineno) + ": bad integer '" + s + "'");
  return v;
}

std::optional<double> parse_opt_real(const std::string& s, std::size_t lineno) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (*end != '\0')
    throw ParseError("csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
  return v;
}

std::string label(const autotune::Candidate& c) {
  return std::string(polyspmv::to_string(c.format)) + "/" +
         std::string(polyspmv::to_string(c.version));
}

}  // namespace

double round_seconds(double seconds) { return round_fixed(seconds, 1e9); }

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kCsvHeader << '\n';
  char buf[64];
  for (const auto& r : records) {
    auto opt = [&](const auto& v) -> std::string { return v ? std::to_string(*v) : std::string(); };
    out << r.matrix_id << ',' << opt(r.nrows) << ',' << opt(r.ncols) << ',' << opt(r.nnz) << ','
        << polyspmv::to_string(r.format) << ',' << polyspmv::to_string(r.version) << ','
        << r.iters << ',' << r.reps << ',';
    if (r.median_seconds) {
      std::snprintf(buf, sizeof buf, "%.9f", *r.median_seconds);
      out << buf;
    }
    out << ',';
    if (r.gflops) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.gflops);
      out << buf;
    }
    out << ',' << opt(r.est_cycles) << ',' << to_string(r.status) << '\n';
  }
}

std::vector<BenchRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty benchmark csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ParseError("unexpected csv header '" + line + "'");
  std::vector<BenchRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 12) throw ParseError("csv line " + std::to_string(lineno) + ": expected 12 fields");
    BenchRecord r;
    r.matrix_id = f[0];
    r.nrows = parse_opt_int<std::size_t>(f[1], lineno);
    r.ncols = parse_opt_int<std::size_t>(f[2], lineno);
    r.nnz = parse_opt_int<std::size_t>(f[3], lineno);
    const auto format = parse_format(f[4]);
    const auto version = parse_version(f[5]);
    const auto status = parse_status(f[11]);
    if (!format || !version || !status)
      throw ParseError("csv line " + std::to_string(lineno) + ": bad format/version/status");
    r.format = *format;
    r.version = *version;
    r.iters = parse_opt_int<std::size_t>(f[6], lineno).value_or(0);
    r.reps = parse_opt_int<std::size_t>(f[7], lineno).value_or(0);
    r.median_seconds = parse_opt_real(f[8], lineno);
    r.gflops = parse_opt_real(f[9], lineno);
    r.est_cycles = parse_opt_int<std::uint64_t>(f[10], lineno);
    r.status = *status;
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::vector<BenchRecord> run_matrix(const io::CorpusEntry& entry, const RunOptions& opts,
                                    autotune::Timer& timer,
                                    const KernelRegistry<double>& registry, std::ostream* log,
                                    std::mutex& log_mutex) {
  std::vector<BenchRecord> rows;
  auto blank = [&](Format f, KernelVersion v) {
    BenchRecord r;
    r.matrix_id = entry.id;
    r.format = f;
    r.version = v;
    r.iters = opts.iters;
    r.reps = opts.reps;
    return r;
  };
  auto note = [&](const std::string& msg) {
    if (!log) return;
    std::lock_guard lock(log_mutex);
    *log << entry.id << ": " << msg << '\n';
  };

  CooMatrix<double> coo;
  try {
    coo = io::load_entry<double>(entry);
  } catch (const std::exception& e) {
    note(std::string("load failed: ") + e.what());
    for (Format f : opts.formats)
      for (KernelVersion v : opts.versions) {
        BenchRecord r = blank(f, v);
        r.status = Status::Error;
        rows.push_back(std::move(r));
      }
    return rows;
  }

  const DynamicMatrix<double> A(coo);
  const auto& shape = coo.shape;
  const auto padded = dataflow::pad_inputs(coo, opts.dataflow);
  const auto cycles = dataflow::estimate_cycles(padded, opts.dataflow).total_cycles;

  autotune::MeasureOptions mopts;
  mopts.iters = opts.iters;
  mopts.reps = opts.reps;
  mopts.lanes = opts.lanes;
  mopts.dia_policy = opts.dia_policy;

  for (Format f : opts.formats) {
    for (KernelVersion v : opts.versions) {
      BenchRecord r = blank(f, v);
      r.nrows = shape.nrows;
      r.ncols = shape.ncols;
      r.nnz = shape.nnz;
      try {
        const auto m = autotune::measure(A, entry.id, f, v, mopts, timer, registry);
        r.median_seconds = round_seconds(m.median_seconds);
        r.gflops = round_fixed(autotune::gflops(shape.nnz, opts.iters, *r.median_seconds), 1e6);
        if (f == Format::Coo) r.est_cycles = cycles;
        r.status = Status::Ok;
      } catch (const FillRatioExceeded& e) {
        r.status = Status::FillExceeded;
        note(e.what());
      } catch (const UnsupportedCombination& e) {
        r.status = Status::Unsupported;
        note(e.what());
      } catch (const std::exception& e) {
        r.status = Status::Error;
        note(e.what());
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace

std::vector<BenchRecord> run_corpus(const std::vector<io::CorpusEntry>& corpus,
                                    const RunOptions& opts, autotune::Timer& timer,
                                    const KernelRegistry<double>& registry, std::ostream* log) {
  std::vector<std::vector<BenchRecord>> per_matrix(corpus.size());
  std::mutex log_mutex;
  const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(corpus.size(), 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      per_matrix[i] = run_matrix(corpus[i], opts, timer, registry, log, log_mutex);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++)
          per_matrix[i] = run_matrix(corpus[i], opts, timer, registry, log, log_mutex);
      });
    }
    for (auto& t : workers) t.join();
  }
  std::vector<BenchRecord> out;
  for (auto& rows : per_matrix)
    for (auto& r : rows) out.push_back(std::move(r));
  return out;
}

int cmd_run(const std::filesystem::path& manifest, const RunOptions& opts,
            const std::filesystem::path& output, autotune::Timer& timer, std::ostream& err,
            const KernelRegistry<double>& registry) {
  std::vector<io::CorpusEntry> corpus;
  try {
    corpus = io::read_manifest_file(manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (corpus.empty()) {
    err << "error: manifest '" << manifest.string() << "' lists no matrices\n";
    return 2;
  }
  const auto records = run_corpus(corpus, opts, timer, registry, &err);
  std::ofstream out(output);
  if (!out) {
    err << "error: cannot write '" << output.string() << "'\n";
    return 2;
  }
  write_csv(out, records);
  const bool any_ok = std::any_of(records.begin(), records.end(),
                                  [](const BenchRecord& r) { return r.status == Status::Ok; });
  return any_ok ? 0 : 1;
}

std::vector<autotune::TuneChoice> optimal_choices(const std::vector<BenchRecord>& records) {
  std::vector<std::string> order;
  std::map<std::pair<std::string, KernelVersion>, autotune::TuneChoice> best;
  for (const auto& r : records) {
    if (r.status != Status::Ok || !r.median_seconds) continue;
    const autotune::TuneChoice c{r.format, r.version, *r.median_seconds};
    const auto key = std::make_pair(r.matrix_id, r.version);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, c);
      if (std::find(order.begin(), order.end(), r.matrix_id) == order.end())
        order.push_back(r.matrix_id);
    } else if (autotune::preferred(c, it->second)) {
      it->second = c;
    }
  }
  std::vector<autotune::TuneChoice> out;
  for (const auto& id : order)
    for (KernelVersion v : kAllVersions)
      if (auto it = best.find({id, v}); it != best.end()) out.push_back(it->second);
  return out;
}

Report build_report(const std::vector<BenchRecord>& records, autotune::Candidate baseline) {
  Report report;
  report.baseline = baseline;

  std::vector<std::string> matrices;
  for (const auto& r : records)
    if (std::find(matrices.begin(), matrices.end(), r.matrix_id) == matrices.end())
      matrices.push_back(r.matrix_id);

  auto find_ok = [&](const std::string& id, autotune::Candidate c) -> const BenchRecord* {
    for (const auto& r : records)
      if (r.matrix_id == id && r.format == c.format && r.version == c.version &&
          r.status == Status::Ok && r.median_seconds && *r.median_seconds > 0.0)
        return &r;
    return nullptr;
  };

  std::map<std::string, const BenchRecord*> base_rows;
  for (const auto& id : matrices) {
    const BenchRecord* b = find_ok(id, baseline);
    if (!b)
      throw MissingBaseline("matrix '" + id + "' has no ok " + label(baseline) + " measurement");
    base_rows[id] = b;
  }

  for (Format f : kAllFormats) {
    for (KernelVersion v : kAllVersions) {
      const autotune::Candidate c{f, v};
      if (c == baseline) continue;
      const bool present = std::any_of(records.begin(), records.end(), [&](const BenchRecord& r) {
        return r.format == f && r.version == v;
      });
      if (!present) continue;
      ConfigSummary s;
      s.config = c;
      double log_sum = 0.0;
      for (const auto& id : matrices) {
        const BenchRecord* cand = find_ok(id, c);
        if (!cand) {
          ++s.missing;
          report.warnings.push_back("matrix '" + id + "': no ok " + label(c) +
                                    " measurement, excluded from the mean");
          continue;
        }
        const BenchRecord* b = base_rows[id];
        const double ratio = *b->median_seconds / *cand->median_seconds;
        s.ratios.push_back({id, b->nnz.value_or(0), ratio});
        log_sum += std::log(ratio);
      }
      if (!s.ratios.empty()) s.geomean = std::exp(log_sum / static_cast<double>(s.ratios.size()));
      report.configs.push_back(std::move(s));
    }
  }

  const auto choices = optimal_choices(records);
  if (!choices.empty()) report.distribution = autotune::distribution_report(choices);
  return report;
}

std::string render_report(const Report& report) {
  std::ostringstream os;
  char buf[256];
  os << "Speedup over " << label(report.baseline) << " (ratio > 1 is a speedup)\n";
  std::snprintf(buf, sizeof buf, "%-12s %9s %9s %9s %9s %8s\n", "config", "geomean", "min", "max",
                "matrices", "missing");
  os << buf;
  for (const auto& c : report.configs) {
    double lo = 0.0, hi = 0.0;
    if (!c.ratios.empty()) {
      const auto [mn, mx] = std::minmax_element(
          c.ratios.begin(), c.ratios.end(),
          [](const MatrixRatio& a, const MatrixRatio& b) { return a.ratio < b.ratio; });
      lo = mn->ratio;
      hi = mx->ratio;
    }
    std::snprintf(buf, sizeof buf, "%-12s %9.4f %9.4f %9.4f %9zu %8zu\n", label(c.config).c_str(),
                  c.geomean, lo, hi, c.ratios.size(), c.missing);
    os << buf;
  }
  os << "\nOptimal format distribution\n";
  for (const auto& d : report.distribution) {
    std::snprintf(buf, sizeof buf, "%-6s CSR %6.2f%%  COO %6.2f%%  DIA %6.2f%%  (%zu matrices)\n",
                  std::string(polyspmv::to_string(d.version)).c_str(), d.share(Format::Csr),
                  d.share(Format::Coo), d.share(Format::Dia), d.matrices);
    os << buf;
  }
  if (!report.warnings.empty()) {
    os << "\nWarnings\n";
    for (const auto& w : report.warnings) os << "  " << w << '\n';
  }
  return os.str();
}

std::string render_svg(const Report& report) {
  constexpr double W = 760, H = 480, left = 70, right = 190, top = 30, bottom = 50;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  double xmin = 1, xmax = 10, ymin = -1, ymax = 1;
  bool first = true;
  for (const auto& c : report.configs) {
    for (const auto& r : c.ratios) {
      const double x = std::log10(std::max<double>(r.nnz, 1));
      const double y = std::log2(r.ratio);
      if (first) { xmin = xmax = x; first = false; }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax - xmin < 1) { xmin -= 0.5; xmax += 0.5; }
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (H - top - bottom); };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\""
     << H - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << W - right << "\" y2=\""
     << py(0) << "\" stroke=\"gray\"/>\n";
  os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\">log10(nnz)</text>\n";
  os << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" transform=\"rotate(-90 16 "
     << (top + H - bottom) / 2 << ")\" text-anchor=\"middle\">log2(speedup over "
     << label(report.baseline) << ")</text>\n";
  for (int t = static_cast<int>(std::ceil(xmin)); t <= static_cast<int>(std::floor(xmax)); ++t)
    os << "<text x=\"" << px(t) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">"
       << t << "</text>\n";
  for (int t = static_cast<int>(std::ceil(ymin)); t <= static_cast<int>(std::floor(ymax)); ++t)
    os << "<text x=\"" << left - 6 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << t
       << "</text>\n";

  for (std::size_t k = 0; k < report.configs.size(); ++k) {
    const auto& c = report.configs[k];
    const char* color = colors[k % 6];
    for (const auto& r : c.ratios)
      os << "<circle cx=\"" << px(std::log10(std::max<double>(r.nnz, 1))) << "\" cy=\""
         << py(std::log2(r.ratio)) << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
    if (c.geomean > 0)
      os << "<line x1=\"" << left << "\" y1=\"" << py(std::log2(c.geomean)) << "\" x2=\""
         << W - right << "\" y2=\"" << py(std::log2(c.geomean)) << "\" stroke=\"" << color
         << "\" stroke-dasharray=\"6 3\"/>\n";
    const double ly = top + 18.0 * static_cast<double>(k);
    os << "<circle cx=\"" << W - right + 16 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << color
       << "\"/>\n";
    os << "<text x=\"" << W - right + 26 << "\" y=\"" << ly + 4 << "\">" << label(c.config)
       << " (mean " << c.geomean << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace polyspmv::bench
