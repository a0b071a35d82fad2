#ifndef ADAMINE_SYNTH_HPP
#define ADAMINE_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adamine/archive.hpp"
#include "adamine/classify.hpp"
#include "adamine/event.hpp"

namespace adamine {

enum class SignalKind { kUpsweep, kTone, kPulseTrain };

struct SceneSignal {
  SignalKind kind = SignalKind::kUpsweep;
  double start_s = 0.0;
  double duration_s = 0.0;   // sweep/tone length; ignored for pulse trains
  double f0_hz = 0.0;        // sweep start / tone freq / band low
  double f1_hz = 0.0;        // sweep end / band high
  double snr_db = 10.0;      // in-band SNR against the scene noise
  // pulse-train fields
  double period_s = 0.0;
  size_t n_pulses = 0;
  double pulse_dur_s = 0.0;
  double jitter_frac = 0.0;  // gaussian sigma as a fraction of the period
};

struct SceneSpec {
  double duration_s = 0.0;
  double sample_rate = 2000.0;
  double noise_rms = 0.05;  // white gaussian; 0 = silence floor
  std::vector<SceneSignal> signals;
  uint64_t seed = 1;
  std::string channel_id = "S";
  UtcMillis start_utc = 0;
};

struct RenderedScene {
  SampleBlock block;
  std::vector<EventRecord> truth;  // exact bboxes by construction
  // nominal pulse times per pulse-train signal, in signal order
  std::vector<std::vector<double>> pulse_times;
};

// Deterministic per seed. Signal amplitudes are sized so the in-band SNR
// matches snr_db against the scene noise floor.
RenderedScene render_scene(const SceneSpec& spec);

// Writes the rendered scene as a conventionally named WAV under root and
// returns the file path.
std::string write_scene_wav(const RenderedScene& scene,
                            const std::string& root, int bit_depth = 16);

/*
 * Ordinal analyst scores with a chosen point-biserial correlation to the
 * binary truth: with probability q (solved numerically from rho) the
 * analyst reports the label itself (0 or 1), otherwise a uniform draw from
 * the 5-level scale. Disagreement d flips the label first with probability
 * f = (1 - sqrt(1 - 2d)) / 2, so two independent analysts disagree at rate
 * d. Per event the generator always draws three uniforms (flip, informed,
 * level) to keep streams aligned.
 */
std::vector<HumanScore> simulate_scores(const std::vector<int>& labels,
                                        const std::vector<std::string>& event_ids,
                                        double rho, double disagreement,
                                        uint64_t seed,
                                        const std::string& analyst_id);

// Labeled gaussian-blob feature rows for classifier benchmarks: balanced
// labels, class means +-separation/2 along every axis.
struct LabeledFeatures {
  FeatureMatrix features;
  std::vector<int> labels;
  std::vector<std::string> event_ids;
};

LabeledFeatures synth_feature_set(size_t n, size_t dims, double separation,
                                  uint64_t seed);

// Point-biserial correlation of scores against binary labels.
double point_biserial(const std::vector<double>& scores,
                      const std::vector<int>& labels);

}  // namespace adamine

#endif  // ADAMINE_SYNTH_HPP
