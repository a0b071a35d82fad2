#ifndef ADAMINE_DSP_HPP
#define ADAMINE_DSP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adamine/pgm.hpp"
#include "adamine/time.hpp"

namespace adamine {

struct SampleBlock;  // archive.hpp

enum class WindowKind { kRectangular, kHann };

WindowKind window_kind_from_string(const std::string& s);
std::string to_string(WindowKind k);

// Shared geometry of a spectrogram and anything derived from it.
struct SpecGeom {
  double frame_hop_s = 0.0;
  double bin_width_hz = 0.0;
  UtcMillis t0 = 0;  // UTC of the first frame's window start
  size_t window_len = 0;
  double sample_rate = 0.0;

  // frame timestamps use the window center
  double frame_center_s(size_t frame) const {
    return static_cast<double>(frame) * frame_hop_s +
           0.5 * static_cast<double>(window_len) / sample_rate;
  }
  double bin_center_hz(size_t bin) const {
    return static_cast<double>(bin) * bin_width_hz;
  }
  double nyquist_hz() const { return 0.5 * sample_rate; }
};

/*
 * Linear magnitude spectrogram, frames x bins, one-sided spectrum
 * (bins = window_len/2 + 1). Interior bins carry a sqrt(2) factor so that
 * the sum of squared magnitudes equals the full two-sided spectrum energy:
 * with a rectangular window and hop = window_len,
 *   sum(samples^2) == sum(mag^2) / window_len.
 */
struct Spectrogram {
  size_t n_frames = 0;
  size_t n_bins = 0;
  std::vector<double> mag;  // row-major, [frame * n_bins + bin]
  SpecGeom geom;
  WindowKind window_kind = WindowKind::kHann;

  double at(size_t frame, size_t bin) const {
    return mag[frame * n_bins + bin];
  }
  double& at(size_t frame, size_t bin) { return mag[frame * n_bins + bin]; }
};

struct MaskProvenance {
  std::string method;
  double parameter = 0.0;
};

struct BinaryMask {
  size_t n_frames = 0;
  size_t n_bins = 0;
  std::vector<uint8_t> bits;  // row-major, 0/1
  SpecGeom geom;
  MaskProvenance provenance;

  bool at(size_t frame, size_t bin) const {
    return bits[frame * n_bins + bin] != 0;
  }
  void set(size_t frame, size_t bin, bool v) {
    bits[frame * n_bins + bin] = v ? 1 : 0;
  }
};

enum class ProjectionAxis { kTime, kFrequency };

// Band-limited energy projection. kTime: one value per frame, summing
// squared magnitudes over the band bins. kFrequency: one value per band
// bin, summing squared magnitudes over frames.
struct EnergyProjection {
  ProjectionAxis axis = ProjectionAxis::kTime;
  std::vector<double> values;
  size_t bin_lo = 0;  // inclusive band bin range
  size_t bin_hi = 0;
  SpecGeom geom;
};

// Throws EmptySpectrogramError if the block is shorter than one window.
Spectrogram stft(const SampleBlock& block, size_t window_len, size_t hop,
                 WindowKind kind);

// Pixel true iff its magnitude strictly exceeds the p-th percentile of its
// own frequency bin across frames. Percentile by linear interpolation
// between order statistics.
BinaryMask binarize(const Spectrogram& spec, double percentile);

// Band selects bins whose center frequency lies in [f_lo, f_hi].
EnergyProjection energy_projection(const Spectrogram& spec,
                                   ProjectionAxis axis, double f_lo_hz,
                                   double f_hi_hz);

// p-th percentile of v by linear interpolation between order statistics
// (rank = p/100 * (n-1)). Exposed for the binarize counting oracle.
double percentile(std::vector<double> v, double p);

// Clip export: row 0 = highest bin of the range, column = frame,
// linear min-max scaling over the clip.
PgmImage spectrogram_to_pgm(const Spectrogram& spec, size_t frame_lo,
                            size_t frame_hi, size_t bin_lo, size_t bin_hi);
PgmImage spectrogram_to_pgm(const Spectrogram& spec);

}  // namespace adamine

#endif  // ADAMINE_DSP_HPP
