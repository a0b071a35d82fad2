#ifndef ADAMINE_EVALKIT_HPP
#define ADAMINE_EVALKIT_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "adamine/event.hpp"

namespace adamine {

enum class CurveKind { kRoc, kDet, kPr };

CurveKind curve_kind_from_string(const std::string& s);

// One operating point. For kDet, tpr holds the miss rate (1 - ROC tpr);
// precision is only meaningful for kPr.
struct CurvePoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
  double precision = 0.0;
};

struct Curve {
  CurveKind kind = CurveKind::kRoc;
  std::vector<CurvePoint> points;
  double auc = 0.0;  // trapezoid; filled for kRoc only
};

// Thresholds are the distinct score values (predict positive at
// score >= threshold), ties grouped; ROC gets the (0,0) endpoint at
// threshold +inf and ends at (1,1). ROC/DET require both classes; PR
// requires at least one positive.
Curve curve(const std::vector<double>& scores, const std::vector<int>& labels,
            CurveKind kind);

// Linear interpolation along the ROC polyline (max tpr per fpr).
double tpr_at_fpr(const Curve& roc, double target_fpr);

// 24 x D event counts in local time (fixed UTC offset, no DST).
struct DielMatrix {
  size_t n_days = 0;
  double utc_offset_hours = 0.0;
  int64_t first_day = 0;  // local day index (days since epoch) of column 0
  std::vector<uint64_t> counts;  // [hour * n_days + day]

  uint64_t at(size_t hour, size_t day) const {
    return counts[hour * n_days + day];
  }
  uint64_t total() const;
};

DielMatrix diel_aggregate(const std::vector<EventRecord>& events,
                          double utc_offset_hours);

// Tab-separated tables; meta lines are emitted first, '#'-prefixed.
void emit_curve_tsv(std::ostream& out, const Curve& c,
                    const std::vector<std::string>& meta);
void emit_diel_tsv(std::ostream& out, const DielMatrix& m,
                   const std::vector<std::string>& meta);

// Minimal standalone SVG line chart of (x, y) pairs in [0,1]^2.
std::string svg_line_chart(const std::vector<std::pair<double, double>>& xy,
                           const std::string& x_label,
                           const std::string& y_label);

}  // namespace adamine

#endif  // ADAMINE_EVALKIT_HPP
