#include <algorithm>
#include <cstdio>
#include <sstream>

#include "skillroute/serialize.hpp"

namespace skillroute {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string table(const ExperimentReport& r, TableMetric metric) {
  auto pick = [&](const MethodScore& s) {
    return metric == TableMetric::MeanMacro ? s.mean_macro : s.pooled_macro;
  };
  const std::vector<std::string> row_names = {"Backend A", "Backend B", "Router"};
  std::vector<std::vector<std::string>> cells(3);
  std::vector<std::string> header = {"Method"};
  for (const SplitResult& s : r.splits) {
    header.push_back(s.split.name);
    cells[0].push_back(fixed4(pick(s.backend_a)));
    cells[1].push_back(fixed4(pick(s.backend_b)));
    cells[2].push_back(fixed4(pick(s.router)));
  }

  std::size_t first = header[0].size();
  for (const auto& n : row_names) first = std::max(first, n.size());
  std::vector<std::size_t> widths;
  for (std::size_t c = 1; c < header.size(); ++c) {
    widths.push_back(std::max<std::size_t>(header[c].size(), 6));
  }

  std::ostringstream out;
  out << (r.splits.empty() ? header[0] : pad(header[0], first, true));
  for (std::size_t c = 1; c < header.size(); ++c) out << "  " << pad(header[c], widths[c - 1], false);
  out << '\n';
  if (r.splits.empty()) return out.str();
  for (std::size_t row = 0; row < 3; ++row) {
    out << pad(row_names[row], first, true);
    for (std::size_t c = 0; c < cells[row].size(); ++c) out << "  " << pad(cells[row][c], widths[c], false);
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string emit_report(const ExperimentReport& report, ReportFormat format, TableMetric metric) {
  if (format == ReportFormat::Table) return table(report, metric);
  return json(report).dump(2) + "\n";
}

ExperimentReport parse_records(const std::string& text) {
  try {
    return json::parse(text).get<ExperimentReport>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace skillroute
