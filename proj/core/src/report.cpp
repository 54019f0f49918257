#include "msd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace msd {

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string scalar_str(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string emit_csv(const std::vector<ResultRecord>& recs) {
  if (recs.empty()) throw std::invalid_argument("empty record set");
  std::ostringstream os;
  std::vector<std::string> ckeys;
  for (const auto& [k, v] : recs.front().config.items()) ckeys.push_back(k);
  os << "experiment";
  for (const auto& k : ckeys) os << "," << csv_quote(k);
  os << ",metric,value\r\n";
  for (const auto& r : recs) {
    for (const auto& [mk, mv] : r.values.items()) {
      os << csv_quote(r.experiment);
      for (const auto& k : ckeys) {
        os << "," << csv_quote(r.config.contains(k) ? scalar_str(r.config[k]) : "");
      }
      os << "," << csv_quote(mk) << "," << csv_quote(scalar_str(mv)) << "\r\n";
    }
  }
  return os.str();
}

std::string emit_markdown(const std::vector<ResultRecord>& recs) {
  if (recs.empty()) throw std::invalid_argument("empty record set");
  // Column set: config keys of the first record, then the union of value
  // keys in first-seen order.
  std::vector<std::string> ckeys;
  for (const auto& [k, v] : recs.front().config.items()) ckeys.push_back(k);
  std::vector<std::string> vkeys;
  for (const auto& r : recs) {
    for (const auto& [k, v] : r.values.items()) {
      if (std::find(vkeys.begin(), vkeys.end(), k) == vkeys.end()) {
        vkeys.push_back(k);
      }
    }
  }
  std::ostringstream os;
  os << "|";
  for (const auto& k : ckeys) os << " " << k << " |";
  for (const auto& k : vkeys) os << " " << k << " |";
  os << "\n|";
  for (std::size_t i = 0; i < ckeys.size() + vkeys.size(); ++i) os << " --- |";
  os << "\n";
  for (const auto& r : recs) {
    os << "|";
    for (const auto& k : ckeys) {
      os << " " << (r.config.contains(k) ? scalar_str(r.config[k]) : "") << " |";
    }
    for (const auto& k : vkeys) {
      os << " " << (r.values.contains(k) ? scalar_str(r.values[k]) : "") << " |";
    }
    os << "\n";
  }
  return os.str();
}

json emit_json(const std::vector<ResultRecord>& recs) {
  if (recs.empty()) throw std::invalid_argument("empty record set");
  json doc;
  doc["experiment"] = recs.front().experiment;
  doc["records"] = json::array();
  for (const auto& r : recs) {
    json item;
    item["config"] = r.config;
    item["values"] = r.values;
    doc["records"].push_back(item);
  }
  return doc;
}

std::vector<ResultRecord> records_from_json(const json& doc) {
  std::vector<ResultRecord> recs;
  const std::string experiment = doc.at("experiment").get<std::string>();
  for (const auto& item : doc.at("records")) {
    recs.push_back({experiment, item.at("config"), item.at("values")});
  }
  return recs;
}

std::string emit_chart_svg(const std::vector<ResultRecord>& recs,
                           const ChartSpec& spec) {
  if (recs.empty()) throw std::invalid_argument("empty record set");

  struct Point {
    double x;
    double y;
    std::string label;
  };
  // series name -> points, in first-seen order
  std::vector<std::pair<std::string, std::vector<Point>>> series;
  auto series_of = [&](const std::string& name) -> std::vector<Point>& {
    for (auto& [n, pts] : series) {
      if (n == name) return pts;
    }
    series.emplace_back(name, std::vector<Point>{});
    return series.back().second;
  };

  std::size_t idx = 0;
  for (const auto& r : recs) {
    if (!r.values.contains(spec.y_key)) continue;
    std::string name = "series";
    if (r.values.contains(spec.series_key)) {
      name = scalar_str(r.values[spec.series_key]);
    } else if (r.config.contains(spec.series_key)) {
      name = scalar_str(r.config[spec.series_key]);
    }
    Point p;
    p.y = r.values[spec.y_key].get<double>();
    if (r.config.contains(spec.x_key) && r.config[spec.x_key].is_number()) {
      p.x = r.config[spec.x_key].get<double>();
      p.label = scalar_str(r.config[spec.x_key]);
    } else {
      p.x = static_cast<double>(idx);
      p.label = r.config.contains(spec.x_key) ? scalar_str(r.config[spec.x_key])
                                              : std::to_string(idx);
    }
    series_of(name).push_back(p);
    ++idx;
  }
  if (series.empty()) throw std::invalid_argument("missing series");

  const double width = 640.0;
  const double height = 420.0;
  const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  auto ytrans = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& [n, pts] : series) {
    for (const auto& p : pts) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      const double ty = ytrans(p.y);
      ymin = std::min(ymin, ty);
      ymax = std::max(ymax, ty);
    }
  }
  if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
  if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) {
    return mt + ph - (ytrans(y) - ymin) / (ymax - ymin) * ph;
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
     << fmt(width) << "\" height=\"" << fmt(height) << "\">\n";
  os << "<rect width=\"" << fmt(width) << "\" height=\"" << fmt(height)
     << "\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    os << "<text x=\"" << fmt(width / 2)
       << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << spec.title
       << "</text>\n";
  }
  // axes
  os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt + ph) << "\" x2=\""
     << fmt(ml + pw) << "\" y2=\"" << fmt(mt + ph)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\""
     << fmt(ml) << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height - 12)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_key
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << fmt(mt + ph / 2) << ")\">" << spec.y_key
     << (spec.log_y ? " (log scale)" : "") << "</text>\n";
  // y-axis extent labels
  os << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + ph)
     << "\" text-anchor=\"end\" font-size=\"10\">"
     << fmt(spec.log_y ? std::pow(10.0, ymin) : ymin) << "</text>\n";
  os << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + 10)
     << "\" text-anchor=\"end\" font-size=\"10\">"
     << fmt(spec.log_y ? std::pow(10.0, ymax) : ymax) << "</text>\n";

  std::size_t si = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kColors[si % 6];
    if (spec.kind == "bar") {
      const double bw = pw / (pts.size() * series.size() + 1);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double x = ml + (i * series.size() + si + 0.5) * bw;
        const double y = py(pts[i].y);
        os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
           << fmt(bw * 0.8) << "\" height=\"" << fmt(mt + ph - y)
           << "\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << fmt(x + bw * 0.4) << "\" y=\"" << fmt(mt + ph + 14)
           << "\" text-anchor=\"middle\" font-size=\"9\">" << pts[i].label
           << "</text>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"2\" points=\"";
      for (const auto& p : pts) os << fmt(px(p.x)) << "," << fmt(py(p.y)) << " ";
      os << "\"/>\n";
      for (const auto& p : pts) {
        os << "<circle cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.y))
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    os << "<rect x=\"" << fmt(ml + pw - 150) << "\" y=\""
       << fmt(mt + 8 + 16.0 * si) << "\" width=\"10\" height=\"10\" fill=\""
       << color << "\"/>\n";
    os << "<text x=\"" << fmt(ml + pw - 136) << "\" y=\""
       << fmt(mt + 17 + 16.0 * si) << "\" font-size=\"11\">" << name
       << "</text>\n";
    ++si;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace msd
