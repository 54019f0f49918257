#pragma once
// Report emission: CSV (RFC 4180), Markdown tables, JSON documents, and
// minimal SVG 1.1 line/bar charts. All output is a pure function of the
// records, so identical runs produce identical bytes.

#include <string>
#include <vector>

#include "msd/experiment.hpp"

namespace msd {

// Long format: one row per (record, metric) with the config keys repeated.
std::string emit_csv(const std::vector<ResultRecord>& recs);

// One row per record; columns are the config keys followed by the metric
// keys of the first record.
std::string emit_markdown(const std::vector<ResultRecord>& recs);

json emit_json(const std::vector<ResultRecord>& recs);
std::vector<ResultRecord> records_from_json(const json& doc);

struct ChartSpec {
  std::string kind = "line";     // "line" | "bar"
  std::string x_key = "size";    // config key for the x axis
  std::string y_key = "l2_rel";  // value key for the y axis
  std::string series_key = "method";
  std::string title;
  bool log_y = true;
};

std::string emit_chart_svg(const std::vector<ResultRecord>& recs,
                           const ChartSpec& spec);

}  // namespace msd
