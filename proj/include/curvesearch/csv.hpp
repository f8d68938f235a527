#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curvesearch/analysis.hpp"
#include "curvesearch/trace.hpp"

namespace curvesearch {

// Per-index optimality-gap band over repeated runs.
struct SummaryRow {
  std::int64_t index = 0;  // iteration, or bucket end in ns for time summaries
  double gap_min = 0.0;
  double gap_med = 0.0;
  double gap_max = 0.0;
};

struct Summary {
  std::string algorithm;
  std::string objective;
  int d = 0;
  bool by_time = false;
  std::vector<SummaryRow> rows;
};

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(const std::string& s);

// algo,objective,d,seed,iter,evals,elapsed_ns,f,grad_norm
void write_traces_csv(std::ostream& out, const std::vector<RunTrace>& traces);
// Inverse of write_traces_csv; consecutive rows with equal
// (algo, objective, d, seed) form one trace. Only CSV fields are restored.
std::vector<RunTrace> read_traces_csv(std::istream& in);

// algo,objective,d,iter,gap_min,gap_med,gap_max (time summaries use time_ns
// in place of iter).
void write_summaries_csv(std::ostream& out, const std::vector<Summary>& summaries);

// Parameter columns, then lower,estimate,ci,upper,pass.
void write_bound_report_csv(std::ostream& out, const BoundReport& report);
// d,lambda_d,sigma2,prob_lower,prob_est,ci,prob_upper
void write_escape_csv(std::ostream& out, const BoundReport& report);
// estimator,seed,t,alignment,f_value
struct AlignmentSeries {
  std::string estimator;
  std::uint64_t seed = 0;
  std::vector<AlignmentPoint> points;
};
void write_alignment_csv(std::ostream& out, const std::vector<AlignmentSeries>& series);

// Writes `content` to `path` in binary mode; failures throw Error naming the path.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace curvesearch
