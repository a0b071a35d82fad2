#include "adamine/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adamine/errors.hpp"

namespace adamine {

double RuleWindow::margin(double x) const {
  if (!contains(x)) return 0.0;
  const bool lo_inf = std::isinf(lo), hi_inf = std::isinf(hi);
  if (lo_inf && hi_inf) return 1.0;
  if (lo_inf || hi_inf) return 1.0;  // half-open window acts as a gate
  double width = hi - lo;
  if (width <= 0.0) return 1.0;  // point window
  double m = 2.0 * std::min(x - lo, hi - x) / width;
  return std::clamp(m, 0.0, 1.0);
}

namespace {

// union-find with path halving
struct Labels {
  std::vector<uint32_t> parent;
  uint32_t make() {
    parent.push_back(static_cast<uint32_t>(parent.size()));
    return parent.back();
  }
  uint32_t find(uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<Region> connected_regions(const BinaryMask& mask,
                                      int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw ArgumentError("connectivity must be 4 or 8");

  const size_t F = mask.n_frames, B = mask.n_bins;
  const uint32_t none = std::numeric_limits<uint32_t>::max();
  std::vector<uint32_t> lab(F * B, none);
  Labels uf;

  // first pass: scan row-major (frame, bin), link to already-seen neighbors
  for (size_t f = 0; f < F; ++f) {
    for (size_t b = 0; b < B; ++b) {
      if (!mask.at(f, b)) continue;
      uint32_t best = none;
      auto consider = [&](size_t ff, size_t bb) {
        uint32_t l = lab[ff * B + bb];
        if (l == none) return;
        if (best == none)
          best = l;
        else
          uf.unite(best, l);
      };
      if (b > 0 && mask.at(f, b - 1)) consider(f, b - 1);
      if (f > 0 && mask.at(f - 1, b)) consider(f - 1, b);
      if (connectivity == 8 && f > 0) {
        if (b > 0 && mask.at(f - 1, b - 1)) consider(f - 1, b - 1);
        if (b + 1 < B && mask.at(f - 1, b + 1)) consider(f - 1, b + 1);
      }
      lab[f * B + b] = best == none ? uf.make() : uf.find(best);
    }
  }

  // second pass: gather pixels per root
  std::vector<uint32_t> root_to_region(uf.parent.size(), none);
  std::vector<Region> regions;
  for (size_t f = 0; f < F; ++f) {
    for (size_t b = 0; b < B; ++b) {
      uint32_t l = lab[f * B + b];
      if (l == none) continue;
      uint32_t root = uf.find(l);
      uint32_t idx = root_to_region[root];
      if (idx == none) {
        idx = static_cast<uint32_t>(regions.size());
        root_to_region[root] = idx;
        regions.emplace_back();
        regions[idx].frame_lo = regions[idx].frame_hi =
            static_cast<uint32_t>(f);
        regions[idx].bin_lo = regions[idx].bin_hi = static_cast<uint32_t>(b);
      }
      Region& r = regions[idx];
      r.pixels.emplace_back(static_cast<uint32_t>(f),
                            static_cast<uint32_t>(b));
      r.frame_lo = std::min(r.frame_lo, static_cast<uint32_t>(f));
      r.frame_hi = std::max(r.frame_hi, static_cast<uint32_t>(f));
      r.bin_lo = std::min(r.bin_lo, static_cast<uint32_t>(b));
      r.bin_hi = std::max(r.bin_hi, static_cast<uint32_t>(b));
    }
  }
  for (Region& r : regions) {
    r.n_pixels = r.pixels.size();
    r.bbox = bbox_from_hull(mask.geom, r.frame_lo, r.frame_hi, r.bin_lo,
                            r.bin_hi);
  }
  std::sort(regions.begin(), regions.end(), [](const Region& a,
                                               const Region& b) {
    return std::tie(a.frame_lo, a.bin_lo, a.pixels.front()) <
           std::tie(b.frame_lo, b.bin_lo, b.pixels.front());
  });
  return regions;
}

TfBbox bbox_from_hull(const SpecGeom& geom, uint32_t frame_lo,
                      uint32_t frame_hi, uint32_t bin_lo, uint32_t bin_hi) {
  TfBbox box;
  box.t0_s = geom.frame_center_s(frame_lo) - 0.5 * geom.frame_hop_s;
  box.t1_s = geom.frame_center_s(frame_hi) + 0.5 * geom.frame_hop_s;
  box.f_lo_hz = static_cast<double>(bin_lo) * geom.bin_width_hz;
  box.f_hi_hz = static_cast<double>(bin_hi + 1) * geom.bin_width_hz;
  return box;
}

EventRecord event_from_bbox(const SpecGeom& geom, const TfBbox& bbox,
                            double score) {
  EventRecord e;
  e.begin_time = geom.t0 + static_cast<UtcMillis>(std::llround(bbox.t0_s * 1000.0));
  e.end_time = geom.t0 + static_cast<UtcMillis>(std::llround(bbox.t1_s * 1000.0));
  if (e.end_time <= e.begin_time) e.end_time = e.begin_time + 1;
  e.f_lo_hz = bbox.f_lo_hz;
  e.f_hi_hz = bbox.f_hi_hz;
  e.score = std::clamp(score, 0.0, 1.0);
  return e;
}

RegionFeatures region_features(const Region& region, const Spectrogram& spec) {
  if (region.pixels.empty())
    throw ConsistencyError("region has no pixels");
  for (auto [f, b] : region.pixels)
    if (f >= spec.n_frames || b >= spec.n_bins)
      throw ConsistencyError("region pixel outside spectrogram bounds");

  RegionFeatures rf;
  rf.duration_s =
      static_cast<double>(region.frame_hi - region.frame_lo + 1) *
      spec.geom.frame_hop_s;
  rf.bandwidth_hz = static_cast<double>(region.bin_hi - region.bin_lo + 1) *
                    spec.geom.bin_width_hz;

  double peak_mag = -1.0;
  double energy = 0.0, t_num = 0.0, f_num = 0.0;
  for (auto [f, b] : region.pixels) {
    double m = spec.at(f, b);
    double e = m * m;
    energy += e;
    t_num += e * spec.geom.frame_center_s(f);
    f_num += e * spec.geom.bin_center_hz(b);
    if (m > peak_mag) {
      peak_mag = m;
      rf.peak_freq_hz = spec.geom.bin_center_hz(b);
    }
  }
  rf.total_energy = energy;
  if (energy > 0.0) {
    rf.time_centroid_s = t_num / energy;
    rf.freq_centroid_hz = f_num / energy;
  } else {
    rf.time_centroid_s = spec.geom.frame_center_s(
        (region.frame_lo + region.frame_hi) / 2);
    rf.freq_centroid_hz =
        spec.geom.bin_center_hz((region.bin_lo + region.bin_hi) / 2);
  }

  // per-frame magnitude-weighted frequency centroid, least squares vs time
  if (region.frame_hi > region.frame_lo) {
    size_t nf = region.frame_hi - region.frame_lo + 1;
    std::vector<double> mass(nf, 0.0), fsum(nf, 0.0), fplain(nf, 0.0);
    std::vector<size_t> counts(nf, 0);
    for (auto [f, b] : region.pixels) {
      size_t i = f - region.frame_lo;
      double m = spec.at(f, b);
      mass[i] += m;
      fsum[i] += m * spec.geom.bin_center_hz(b);
      fplain[i] += spec.geom.bin_center_hz(b);
      counts[i]++;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = 0;
    for (size_t i = 0; i < nf; ++i) {
      if (counts[i] == 0) continue;
      double t = spec.geom.frame_center_s(region.frame_lo + i);
      double c = mass[i] > 0.0 ? fsum[i] / mass[i]
                               : fplain[i] / static_cast<double>(counts[i]);
      sx += t;
      sy += c;
      sxx += t * t;
      sxy += t * c;
      ++n;
    }
    double denom = static_cast<double>(n) * sxx - sx * sx;
    rf.slope_hz_per_s =
        denom > 1e-30 ? (static_cast<double>(n) * sxy - sx * sy) / denom : 0.0;
  }
  return rf;
}

std::vector<EventRecord> type1_detect(const Spectrogram& spec,
                                      const Type1Rules& rules,
                                      double binarize_p, int connectivity) {
  for (const RuleWindow* w : {&rules.duration_s, &rules.bandwidth_hz,
                              &rules.slope_hz_per_s, &rules.energy})
    if (w->lo > w->hi)
      throw ArgumentError("rule window has lo > hi");

  BinaryMask mask = binarize(spec, binarize_p);
  std::vector<EventRecord> events;
  for (const Region& region : connected_regions(mask, connectivity)) {
    RegionFeatures rf = region_features(region, spec);
    if (!rules.duration_s.contains(rf.duration_s) ||
        !rules.bandwidth_hz.contains(rf.bandwidth_hz) ||
        !rules.slope_hz_per_s.contains(rf.slope_hz_per_s) ||
        !rules.energy.contains(rf.total_energy))
      continue;
    double score = std::min({rules.duration_s.margin(rf.duration_s),
                             rules.bandwidth_hz.margin(rf.bandwidth_hz),
                             rules.slope_hz_per_s.margin(rf.slope_hz_per_s),
                             rules.energy.margin(rf.total_energy)});
    events.push_back(event_from_bbox(spec.geom, region.bbox, score));
  }
  return events;
}

}  // namespace adamine
