#ifndef ADAMINE_SEGMENTATION_HPP
#define ADAMINE_SEGMENTATION_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "adamine/dsp.hpp"
#include "adamine/event.hpp"

namespace adamine {

// Time-frequency bounding box, seconds relative to the spectrogram t0.
struct TfBbox {
  double t0_s = 0.0;
  double t1_s = 0.0;
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
};

// A connected blob of mask pixels. Pixels are (frame, bin), sorted
// row-major; the index hull is inclusive.
struct Region {
  std::vector<std::pair<uint32_t, uint32_t>> pixels;
  uint32_t frame_lo = 0, frame_hi = 0;
  uint32_t bin_lo = 0, bin_hi = 0;
  TfBbox bbox;
  size_t n_pixels = 0;
};

struct RegionFeatures {
  double duration_s = 0.0;
  double bandwidth_hz = 0.0;
  double peak_freq_hz = 0.0;
  double total_energy = 0.0;
  double time_centroid_s = 0.0;   // energy-weighted, relative to t0
  double freq_centroid_hz = 0.0;  // energy-weighted
  double slope_hz_per_s = 0.0;
};

// [lo, hi] acceptance window; either side may be infinite.
struct RuleWindow {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x >= lo && x <= hi; }
  // 0 at a finite edge, 1 at the window center; an infinite side scores 1
  double margin(double x) const;
};

struct Type1Rules {
  RuleWindow duration_s;
  RuleWindow bandwidth_hz;
  RuleWindow slope_hz_per_s;
  RuleWindow energy;
};

// Two-pass connected-component labeling with union-find. Output partitions
// the true pixels, independent of traversal order, sorted by
// (frame_lo, bin_lo, first pixel).
std::vector<Region> connected_regions(const BinaryMask& mask,
                                      int connectivity);

// Slope is the least-squares fit of the per-frame magnitude-weighted
// frequency centroid against frame time; energies come from squared
// magnitudes of member pixels only.
RegionFeatures region_features(const Region& region, const Spectrogram& spec);

// Type-I (short tonal) detector: binarize -> connected regions -> rule
// windows. Event score is the minimum normalized rule margin. channel_id,
// run_id, detector_id and tag are left for the caller to fill.
std::vector<EventRecord> type1_detect(const Spectrogram& spec,
                                      const Type1Rules& rules,
                                      double binarize_p, int connectivity);

// Pinned pixel-to-physical mapping shared by every detector: frames span
// [center - hop/2, center + hop/2], bins span [k, k+1) * bin_width.
TfBbox bbox_from_hull(const SpecGeom& geom, uint32_t frame_lo,
                      uint32_t frame_hi, uint32_t bin_lo, uint32_t bin_hi);

// Converts a detector-local bbox into event begin/end UTC and frequency
// bounds (end time is forced at least 1 ms after begin).
EventRecord event_from_bbox(const SpecGeom& geom, const TfBbox& bbox,
                            double score);

}  // namespace adamine

#endif  // ADAMINE_SEGMENTATION_HPP
