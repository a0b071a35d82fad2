#ifndef ADAMINE_RECOGNIZERS_HPP
#define ADAMINE_RECOGNIZERS_HPP

#include <string>
#include <vector>

#include "adamine/dsp.hpp"
#include "adamine/event.hpp"

namespace adamine {

// A stored spectrogram patch matched by normalized image correlation.
struct Template {
  std::string name;
  size_t n_frames = 0;
  size_t n_bins = 0;
  std::vector<double> patch;  // row-major [frame * n_bins + bin]
  double band_f_lo_hz = 0.0;  // frequency anchor of bin 0

  double at(size_t f, size_t b) const { return patch[f * n_bins + b]; }
};

struct HogDescriptor {
  size_t cell_size = 0;
  size_t n_bins = 0;
  size_t n_cells_x = 0;  // along columns
  size_t n_cells_y = 0;  // along rows
  std::vector<double> vector;  // [(cy * n_cells_x + cx) * n_bins + bin]
};

// Normalized cross-correlation of the template against every valid
// (frame, bin) offset; both operands zero-mean and unit-norm per window.
// A constant window (or template) correlates as 0.
struct CorrelationMap {
  size_t n_frame_offsets = 0;
  size_t n_bin_offsets = 0;
  std::vector<double> ncc;  // row-major [frame_off * n_bin_offsets + bin_off]

  double at(size_t fo, size_t bo) const { return ncc[fo * n_bin_offsets + bo]; }
};

CorrelationMap correlation_map(const Spectrogram& spec, const Template& tmpl);

// Local maxima of the correlation map above threshold become events with
// score = max(0, ncc) and bbox = the template footprint at the offset.
std::vector<EventRecord> template_correlate(const Spectrogram& spec,
                                            const Template& tmpl,
                                            double threshold);

/*
 * HOG over a magnitude matrix (rows x cols): central-difference gradients
 * on interior pixels, unsigned orientation folded to [0, 180), votes split
 * linearly between the two bins bracketing the angle (an angle on a bin
 * edge votes wholly into that bin), per-cell histograms, then one global
 * L2 normalization with epsilon 1e-12.
 */
HogDescriptor hog_features(const std::vector<double>& patch, size_t rows,
                           size_t cols, size_t cell_size, size_t n_bins,
                           bool normalize = true);

// Template persistence: <name>.pgm (8-bit clip) + <name>.meta with
// tab-separated f_lo_hz, frames, bins.
void save_template(const std::string& base_path, const Template& tmpl);
Template load_template(const std::string& base_path);

}  // namespace adamine

#endif  // ADAMINE_RECOGNIZERS_HPP
