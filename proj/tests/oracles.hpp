#ifndef ADAMINE_TESTS_ORACLES_HPP
#define ADAMINE_TESTS_ORACLES_HPP

// Independent reference implementations the real code is checked against.
// Everything here is deliberately naive: recursion, O(n^2) scans, direct
// definitions.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "adamine/dsp.hpp"
#include "adamine/event.hpp"
#include "adamine/eventstore.hpp"
#include "adamine/recognizers.hpp"

namespace oracles {

// recursive flood fill; regions as sorted pixel sets
inline std::vector<std::set<std::pair<uint32_t, uint32_t>>> flood_fill_regions(
    const adamine::BinaryMask& mask, int connectivity) {
  const size_t F = mask.n_frames, B = mask.n_bins;
  std::vector<char> seen(F * B, 0);
  std::vector<std::set<std::pair<uint32_t, uint32_t>>> out;
  for (size_t f = 0; f < F; ++f) {
    for (size_t b = 0; b < B; ++b) {
      if (!mask.at(f, b) || seen[f * B + b]) continue;
      std::set<std::pair<uint32_t, uint32_t>> region;
      std::vector<std::pair<size_t, size_t>> stack{{f, b}};
      seen[f * B + b] = 1;
      while (!stack.empty()) {
        auto [cf, cb] = stack.back();
        stack.pop_back();
        region.insert({static_cast<uint32_t>(cf), static_cast<uint32_t>(cb)});
        for (int df = -1; df <= 1; ++df) {
          for (int db = -1; db <= 1; ++db) {
            if (df == 0 && db == 0) continue;
            if (connectivity == 4 && df != 0 && db != 0) continue;
            int64_t nf = static_cast<int64_t>(cf) + df;
            int64_t nb = static_cast<int64_t>(cb) + db;
            if (nf < 0 || nb < 0 || nf >= static_cast<int64_t>(F) ||
                nb >= static_cast<int64_t>(B))
              continue;
            size_t at = static_cast<size_t>(nf) * B + static_cast<size_t>(nb);
            if (!mask.bits[at] || seen[at]) continue;
            seen[at] = 1;
            stack.emplace_back(static_cast<size_t>(nf),
                               static_cast<size_t>(nb));
          }
        }
      }
      out.push_back(std::move(region));
    }
  }
  return out;
}

// direct zero-mean, unit-norm sliding correlation
inline double brute_ncc_at(const adamine::Spectrogram& spec,
                           const adamine::Template& tmpl, size_t fo,
                           size_t bo) {
  const size_t n = tmpl.n_frames * tmpl.n_bins;
  double tm = 0.0, wm = 0.0;
  for (size_t f = 0; f < tmpl.n_frames; ++f)
    for (size_t b = 0; b < tmpl.n_bins; ++b) {
      tm += tmpl.at(f, b);
      wm += spec.at(fo + f, bo + b);
    }
  tm /= static_cast<double>(n);
  wm /= static_cast<double>(n);
  double dot = 0.0, tn = 0.0, wn = 0.0;
  for (size_t f = 0; f < tmpl.n_frames; ++f)
    for (size_t b = 0; b < tmpl.n_bins; ++b) {
      double tv = tmpl.at(f, b) - tm;
      double wv = spec.at(fo + f, bo + b) - wm;
      dot += tv * wv;
      tn += tv * tv;
      wn += wv * wv;
    }
  if (tn < 1e-30 || wn < 1e-30) return 0.0;
  return dot / (std::sqrt(tn) * std::sqrt(wn));
}

// per-threshold confusion counts, one threshold per distinct score
struct RocPoint {
  double threshold, fpr, tpr;
};

inline std::vector<RocPoint> roc_by_enumeration(
    const std::vector<double>& scores, const std::vector<int>& labels) {
  std::set<double, std::greater<double>> thresholds(scores.begin(),
                                                    scores.end());
  double P = 0, N = 0;
  for (int y : labels) (y ? P : N) += 1.0;
  std::vector<RocPoint> points;
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  for (double thr : thresholds) {
    double tp = 0, fp = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= thr) (labels[i] ? tp : fp) += 1.0;
    }
    points.push_back({thr, fp / N, tp / P});
  }
  return points;
}

// predicate filter over a fully loaded list
inline std::vector<adamine::EventRecord> linear_scan_query(
    std::vector<adamine::EventRecord> all, const adamine::QueryPredicate& q) {
  std::vector<adamine::EventRecord> hits;
  for (auto& e : all)
    if (q.matches(e)) hits.push_back(e);
  std::stable_sort(hits.begin(), hits.end(),
                   [](const adamine::EventRecord& a,
                      const adamine::EventRecord& b) {
                     return a.begin_time < b.begin_time;
                   });
  return hits;
}

}  // namespace oracles

#endif
