#include "adamine/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "adamine/errors.hpp"

namespace adamine {

CurveKind curve_kind_from_string(const std::string& s) {
  if (s == "roc") return CurveKind::kRoc;
  if (s == "det") return CurveKind::kDet;
  if (s == "pr") return CurveKind::kPr;
  throw ArgumentError("unknown curve kind: '" + s + "'");
}

Curve curve(const std::vector<double>& scores, const std::vector<int>& labels,
            CurveKind kind) {
  if (scores.size() != labels.size())
    throw ArgumentError("scores/labels length mismatch");
  if (scores.size() < 2) throw ArgumentError("need at least 2 samples");
  size_t P = 0, N = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw ArgumentError("labels must be 0 or 1");
    y ? ++P : ++N;
  }
  if (P == 0) throw ArgumentError("no positive labels");
  if (N == 0 && kind != CurveKind::kPr)
    throw ArgumentError("roc/det need both classes");

  // positives/negatives grouped per distinct score, descending
  std::map<double, std::pair<size_t, size_t>, std::greater<double>> groups;
  for (size_t i = 0; i < scores.size(); ++i) {
    auto& g = groups[scores[i]];
    labels[i] ? ++g.first : ++g.second;
  }

  Curve c;
  c.kind = kind;
  if (kind != CurveKind::kPr) {
    CurvePoint origin;
    origin.threshold = std::numeric_limits<double>::infinity();
    origin.fpr = 0.0;
    origin.tpr = kind == CurveKind::kDet ? 1.0 : 0.0;  // miss rate 1 at (0,0)
    c.points.push_back(origin);
  }

  size_t tp = 0, fp = 0;
  for (const auto& [thr, g] : groups) {
    tp += g.first;
    fp += g.second;
    CurvePoint p;
    p.threshold = thr;
    p.fpr = N ? static_cast<double>(fp) / static_cast<double>(N) : 0.0;
    double tpr = static_cast<double>(tp) / static_cast<double>(P);
    p.tpr = kind == CurveKind::kDet ? 1.0 - tpr : tpr;
    p.precision =
        tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
    c.points.push_back(p);
  }

  if (kind == CurveKind::kRoc) {
    double auc = 0.0;
    for (size_t i = 1; i < c.points.size(); ++i)
      auc += (c.points[i].fpr - c.points[i - 1].fpr) *
             (c.points[i].tpr + c.points[i - 1].tpr) * 0.5;
    c.auc = auc;
  }
  return c;
}

double tpr_at_fpr(const Curve& roc, double target_fpr) {
  if (roc.kind != CurveKind::kRoc)
    throw ArgumentError("tpr_at_fpr needs a ROC curve");
  if (!(target_fpr >= 0.0 && target_fpr <= 1.0))
    throw ArgumentError("target fpr must be in [0, 1]");
  if (roc.points.empty()) throw ArgumentError("empty curve");

  // collapse to the best tpr at each distinct fpr
  std::vector<std::pair<double, double>> poly;  // (fpr, max tpr), ascending
  for (const CurvePoint& p : roc.points) {
    if (!poly.empty() && poly.back().first == p.fpr)
      poly.back().second = std::max(poly.back().second, p.tpr);
    else
      poly.emplace_back(p.fpr, p.tpr);
  }
  if (target_fpr <= poly.front().first) return poly.front().second;
  for (size_t i = 1; i < poly.size(); ++i) {
    if (target_fpr <= poly[i].first) {
      double span = poly[i].first - poly[i - 1].first;
      if (span <= 0.0) return poly[i].second;
      double w = (target_fpr - poly[i - 1].first) / span;
      return poly[i - 1].second + w * (poly[i].second - poly[i - 1].second);
    }
  }
  return poly.back().second;
}

uint64_t DielMatrix::total() const {
  uint64_t sum = 0;
  for (uint64_t v : counts) sum += v;
  return sum;
}

DielMatrix diel_aggregate(const std::vector<EventRecord>& events,
                          double utc_offset_hours) {
  if (!(utc_offset_hours >= -12.0 && utc_offset_hours <= 14.0))
    throw ArgumentError("utc offset must be in [-12, +14] hours");
  DielMatrix m;
  m.utc_offset_hours = utc_offset_hours;
  if (events.empty()) return m;

  const int64_t offset_ms =
      static_cast<int64_t>(std::llround(utc_offset_hours * 3600.0 * 1000.0));
  auto fdiv = [](int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
  };

  int64_t day_min = std::numeric_limits<int64_t>::max();
  int64_t day_max = std::numeric_limits<int64_t>::min();
  std::vector<std::pair<int64_t, int>> cells;  // (local day, local hour)
  cells.reserve(events.size());
  for (const EventRecord& e : events) {
    int64_t local = e.begin_time + offset_ms;
    int64_t day = fdiv(local, 86400000);
    int hour = static_cast<int>((local - day * 86400000) / 3600000);
    cells.emplace_back(day, hour);
    day_min = std::min(day_min, day);
    day_max = std::max(day_max, day);
  }
  m.first_day = day_min;
  m.n_days = static_cast<size_t>(day_max - day_min + 1);
  m.counts.assign(24 * m.n_days, 0);
  for (auto [day, hour] : cells)
    m.counts[static_cast<size_t>(hour) * m.n_days +
             static_cast<size_t>(day - day_min)]++;
  return m;
}

void emit_curve_tsv(std::ostream& out, const Curve& c,
                    const std::vector<std::string>& meta) {
  for (const std::string& line : meta) out << "# " << line << '\n';
  const char* y = c.kind == CurveKind::kDet ? "miss_rate" : "tpr";
  if (c.kind == CurveKind::kPr)
    out << "threshold\trecall\tprecision\n";
  else
    out << "threshold\tfpr\t" << y << '\n';
  char buf[128];
  for (const CurvePoint& p : c.points) {
    if (c.kind == CurveKind::kPr)
      std::snprintf(buf, sizeof(buf), "%.9g\t%.9g\t%.9g", p.threshold, p.tpr,
                    p.precision);
    else
      std::snprintf(buf, sizeof(buf), "%.9g\t%.9g\t%.9g", p.threshold, p.fpr,
                    p.tpr);
    out << buf << '\n';
  }
  if (c.kind == CurveKind::kRoc) {
    std::snprintf(buf, sizeof(buf), "# auc\t%.9g", c.auc);
    out << buf << '\n';
  }
}

void emit_diel_tsv(std::ostream& out, const DielMatrix& m,
                   const std::vector<std::string>& meta) {
  for (const std::string& line : meta) out << "# " << line << '\n';
  out << "hour";
  for (size_t d = 0; d < m.n_days; ++d) out << "\tday" << d;
  out << '\n';
  for (size_t h = 0; h < 24; ++h) {
    out << h;
    for (size_t d = 0; d < m.n_days; ++d) out << '\t' << m.at(h, d);
    out << '\n';
  }
}

std::string svg_line_chart(const std::vector<std::pair<double, double>>& xy,
                           const std::string& x_label,
                           const std::string& y_label) {
  const int W = 480, H = 480, M = 48;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M
      << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M
      << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label
      << "</text>\n";
  svg << "<text x=\"14\" y=\"" << H / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 "
         "14 "
      << H / 2 << ")\">" << y_label << "</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" "
         "points=\"";
  char buf[64];
  for (auto [x, y] : xy) {
    double px = M + std::clamp(x, 0.0, 1.0) * (W - 2 * M);
    double py = H - M - std::clamp(y, 0.0, 1.0) * (H - 2 * M);
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px, py);
    svg << buf;
  }
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

}  // namespace adamine
