#include "curvesearch/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "curvesearch/errors.hpp"

namespace curvesearch {

namespace {

constexpr const char* kTraceHeader = "algo,objective,d,seed,iter,evals,elapsed_ns,f,grad_norm";

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <class Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("csv: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("csv: bad number '" + s + "'");
  return v;
}

void write_traces_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  out << kTraceHeader << '\n';
  for (const auto& t : traces) {
    const std::string prefix = t.meta.algorithm + ',' + t.meta.objective + ',' + std::to_string(t.meta.d) + ',' +
                               std::to_string(t.meta.seed) + ',';
    for (const auto& r : t.rows) {
      out << prefix << r.iter << ',' << r.evals << ',' << r.elapsed_ns << ',' << format_double(r.f) << ',';
      if (r.grad_norm) out << format_double(*r.grad_norm);
      out << '\n';
    }
  }
}

std::vector<RunTrace> read_traces_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw Error("csv: missing trace header");
  std::vector<RunTrace> traces;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 9) {
      throw Error("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                  " fields, expected 9");
    }
    const int d = parse_int<int>(cells[2]);
    const auto seed = parse_int<std::uint64_t>(cells[3]);
    if (traces.empty() || traces.back().meta.algorithm != cells[0] || traces.back().meta.objective != cells[1] ||
        traces.back().meta.d != d || traces.back().meta.seed != seed) {
      RunTrace t;
      t.meta.algorithm = cells[0];
      t.meta.objective = cells[1];
      t.meta.d = d;
      t.meta.seed = seed;
      traces.push_back(std::move(t));
    }
    TraceRow row;
    row.iter = parse_int<std::int64_t>(cells[4]);
    row.evals = parse_int<std::int64_t>(cells[5]);
    row.elapsed_ns = parse_int<std::int64_t>(cells[6]);
    row.f = parse_double(cells[7]);
    if (!cells[8].empty()) row.grad_norm = parse_double(cells[8]);
    traces.back().rows.push_back(row);
  }
  return traces;
}

void write_summaries_csv(std::ostream& out, const std::vector<Summary>& summaries) {
  const bool by_time = !summaries.empty() && summaries.front().by_time;
  for (const auto& s : summaries) {
    if (s.by_time != by_time) throw InvalidArgument("write_summaries_csv: cannot mix iteration and time summaries");
  }
  out << "algo,objective,d," << (by_time ? "time_ns" : "iter") << ",gap_min,gap_med,gap_max\n";
  for (const auto& s : summaries) {
    for (const auto& r : s.rows) {
      out << s.algorithm << ',' << s.objective << ',' << s.d << ',' << r.index << ',' << format_double(r.gap_min)
          << ',' << format_double(r.gap_med) << ',' << format_double(r.gap_max) << '\n';
    }
  }
}

void write_bound_report_csv(std::ostream& out, const BoundReport& report) {
  for (const auto& name : report.param_names) out << name << ',';
  out << "lower,estimate,ci,upper,pass\n";
  for (const auto& r : report.rows) {
    for (double p : r.params) out << format_double(p) << ',';
    out << format_double(r.lower) << ',' << format_double(r.estimate) << ',' << format_double(r.ci_halfwidth) << ','
        << format_double(r.upper) << ',' << (r.pass ? "pass" : "fail") << '\n';
  }
}

void write_escape_csv(std::ostream& out, const BoundReport& report) {
  if (report.param_names != std::vector<std::string>{"d", "lambda_d", "sigma2"}) {
    throw InvalidArgument("write_escape_csv: expected an escape-probability report");
  }
  out << "d,lambda_d,sigma2,prob_lower,prob_est,ci,prob_upper\n";
  for (const auto& r : report.rows) {
    out << static_cast<int>(r.params[0]) << ',' << format_double(r.params[1]) << ',' << format_double(r.params[2])
        << ',' << format_double(r.lower) << ',' << format_double(r.estimate) << ',' << format_double(r.ci_halfwidth)
        << ',' << format_double(r.upper) << '\n';
  }
}

void write_alignment_csv(std::ostream& out, const std::vector<AlignmentSeries>& series) {
  out << "estimator,seed,t,alignment,f_value\n";
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out << s.estimator << ',' << s.seed << ',' << p.t << ',' << format_double(p.alignment) << ','
          << format_double(p.f_value) << '\n';
    }
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace curvesearch
