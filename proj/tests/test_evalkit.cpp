#include <doctest.h>

#include <cmath>
#include <sstream>

#include "adamine/errors.hpp"
#include "adamine/evalkit.hpp"
#include "adamine/rng.hpp"
#include "oracles.hpp"

using namespace adamine;

TEST_SUITE("evalkit") {

TEST_CASE("perfect separation gives AUC exactly one") {
  std::vector<double> scores = {0.9, 0.8, 0.7, 0.2, 0.1};
  std::vector<int> labels = {1, 1, 1, 0, 0};
  Curve c = curve(scores, labels, CurveKind::kRoc);
  CHECK(c.auc == 1.0);
  CHECK(c.points.front().fpr == 0.0);
  CHECK(c.points.front().tpr == 0.0);
  CHECK(c.points.back().fpr == 1.0);
  CHECK(c.points.back().tpr == 1.0);
}

TEST_CASE("identical scores collapse to the two endpoints, AUC one half") {
  std::vector<double> scores(10, 0.5);
  std::vector<int> labels = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  Curve c = curve(scores, labels, CurveKind::kRoc);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].fpr == 0.0);
  CHECK(c.points[0].tpr == 0.0);
  CHECK(c.points[1].fpr == 1.0);
  CHECK(c.points[1].tpr == 1.0);
  CHECK(c.auc == 0.5);
}

TEST_CASE("curve matches the threshold-enumeration oracle") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    size_t n = 50 + rng.uniform_int(150);
    bool has_pos = false, has_neg = false;
    for (size_t i = 0; i < n; ++i) {
      // quantized scores force threshold ties
      scores.push_back(std::floor(rng.uniform() * 20.0) / 20.0);
      labels.push_back(rng.uniform() < 0.4 ? 1 : 0);
      (labels.back() ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;
    Curve c = curve(scores, labels, CurveKind::kRoc);
    auto oracle = oracles::roc_by_enumeration(scores, labels);
    REQUIRE(c.points.size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i) {
      CHECK(c.points[i].fpr == doctest::Approx(oracle[i].fpr).epsilon(1e-12));
      CHECK(c.points[i].tpr == doctest::Approx(oracle[i].tpr).epsilon(1e-12));
    }
  }
}

TEST_CASE("roc auc is invariant under strictly increasing score transforms") {
  Rng rng(23);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 300; ++i) {
    scores.push_back(rng.uniform());
    labels.push_back(rng.uniform() < 0.5 ? 1 : 0);
  }
  labels[0] = 1;
  labels[1] = 0;
  double base = curve(scores, labels, CurveKind::kRoc).auc;
  std::vector<double> warped = scores;
  for (double& s : warped) s = std::exp(3.0 * s) + 7.0;
  CHECK(curve(warped, labels, CurveKind::kRoc).auc ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("det points are roc points re-expressed") {
  std::vector<double> scores = {0.9, 0.6, 0.6, 0.4, 0.2, 0.1};
  std::vector<int> labels = {1, 1, 0, 0, 1, 0};
  Curve roc = curve(scores, labels, CurveKind::kRoc);
  Curve det = curve(scores, labels, CurveKind::kDet);
  REQUIRE(roc.points.size() == det.points.size());
  for (size_t i = 0; i < roc.points.size(); ++i) {
    CHECK(det.points[i].fpr == roc.points[i].fpr);
    CHECK(det.points[i].tpr == doctest::Approx(1.0 - roc.points[i].tpr));
  }
}

TEST_CASE("pr precision at the loosest threshold equals the base rate") {
  Rng rng(29);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 200; ++i) {
    scores.push_back(rng.uniform());
    labels.push_back(rng.uniform() < 0.3 ? 1 : 0);
  }
  labels[0] = 1;
  size_t pos = 0;
  for (int y : labels) pos += y;
  Curve pr = curve(scores, labels, CurveKind::kPr);
  CHECK(pr.points.back().precision ==
        doctest::Approx(static_cast<double>(pos) / labels.size()));
}

TEST_CASE("single-class inputs are rejected for roc, allowed for pr") {
  std::vector<double> scores = {0.1, 0.2, 0.3};
  std::vector<int> all_pos = {1, 1, 1};
  CHECK_THROWS_AS(curve(scores, all_pos, CurveKind::kRoc), ArgumentError);
  CHECK_THROWS_AS(curve(scores, all_pos, CurveKind::kDet), ArgumentError);
  CHECK_NOTHROW(curve(scores, all_pos, CurveKind::kPr));
  std::vector<int> all_neg = {0, 0, 0};
  CHECK_THROWS_AS(curve(scores, all_neg, CurveKind::kPr), ArgumentError);
}

TEST_CASE("tpr_at_fpr endpoints and interpolation") {
  std::vector<double> scores = {0.9, 0.8, 0.7, 0.6, 0.2, 0.1};
  std::vector<int> labels = {1, 1, 0, 1, 0, 0};
  Curve roc = curve(scores, labels, CurveKind::kRoc);
  CHECK(tpr_at_fpr(roc, 1.0) == 1.0);
  // at fpr 0 the curve value is the best tpr reachable without any false
  // positive: thresholds 0.9 and 0.8 both have fpr 0, the latter tpr 2/3
  CHECK(tpr_at_fpr(roc, 0.0) == doctest::Approx(2.0 / 3.0));
  // between fpr=1/3 (tpr=1) and fpr=0 points sits interpolation
  double mid = tpr_at_fpr(roc, 1.0 / 6.0);
  CHECK(mid > 2.0 / 3.0);
  CHECK(mid <= 1.0);
}

TEST_CASE("diel aggregation places events in local cells") {
  std::vector<EventRecord> events;
  EventRecord e;
  e.run_id = "r";
  e.channel_id = "A";
  e.f_lo_hz = 10;
  e.f_hi_hz = 20;
  e.score = 1.0;
  // three events at 01:30 local (offset 0), same day
  for (int i = 0; i < 3; ++i) {
    e.begin_time = utc_from_ymd_hms(2006, 6, 1, 1, 30, i);
    e.end_time = e.begin_time + 1000;
    events.push_back(e);
  }
  DielMatrix m = diel_aggregate(events, 0.0);
  REQUIRE(m.n_days == 1);
  CHECK(m.at(1, 0) == 3);
  CHECK(m.total() == 3);

  // 23:30 UTC at offset -5 lands in local hour 18
  events.clear();
  e.begin_time = utc_from_ymd_hms(2006, 6, 1, 23, 30, 0);
  e.end_time = e.begin_time + 1000;
  events.push_back(e);
  DielMatrix shifted = diel_aggregate(events, -5.0);
  CHECK(shifted.at(18, 0) == 1);
  CHECK(shifted.total() == 1);
}

TEST_CASE("diel conservation over random event sets") {
  Rng rng(31);
  std::vector<EventRecord> events;
  for (int i = 0; i < 500; ++i) {
    EventRecord e;
    e.begin_time = utc_from_ymd_hms(2006, 1, 1, 0, 0, 0) +
                   static_cast<UtcMillis>(rng.uniform_int(40ull * 86400000ull));
    e.end_time = e.begin_time + 500;
    events.push_back(e);
  }
  DielMatrix m = diel_aggregate(events, 5.5);
  CHECK(m.total() == 500);
  CHECK(m.n_days >= 40);
}

TEST_CASE("empty event list gives an empty matrix") {
  DielMatrix m = diel_aggregate({}, 3.0);
  CHECK(m.n_days == 0);
  CHECK(m.total() == 0);
  CHECK_THROWS_AS(diel_aggregate({}, 15.0), ArgumentError);
}

TEST_CASE("tsv and svg emitters produce well-formed output") {
  std::vector<double> scores = {0.9, 0.7, 0.3, 0.1};
  std::vector<int> labels = {1, 1, 0, 0};
  Curve roc = curve(scores, labels, CurveKind::kRoc);
  std::ostringstream table;
  emit_curve_tsv(table, roc, {"adamine 1.0.0", "seed 1"});
  std::string text = table.str();
  CHECK(text.find("# adamine 1.0.0") != std::string::npos);
  CHECK(text.find("threshold\tfpr\ttpr") != std::string::npos);
  CHECK(text.find("# auc") != std::string::npos);

  std::vector<std::pair<double, double>> xy;
  for (const CurvePoint& p : roc.points) xy.emplace_back(p.fpr, p.tpr);
  std::string svg = svg_line_chart(xy, "fpr", "tpr");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

}  // TEST_SUITE
