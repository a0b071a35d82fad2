#ifndef ADAMINE_PULSETRAIN_HPP
#define ADAMINE_PULSETRAIN_HPP

#include <vector>

#include "adamine/dsp.hpp"
#include "adamine/event.hpp"

namespace adamine {

// Ordered pulse times with period and regularity. Regularity is
// 1 - min(1, CV) where CV is the inter-pulse-interval standard deviation
// over the median interval; 1 means a perfectly even train.
struct PulseTrain {
  std::vector<double> pulse_times;  // seconds, strictly increasing
  double period_s = 0.0;
  double regularity = 0.0;  // [0, 1]
  size_t count = 0;
  double t_first = 0.0;
  double t_last = 0.0;
};

struct PulseTrainStats {
  double period_s = 0.0;
  double regularity = 0.0;
  size_t count = 0;
};

struct PulseParams {
  double threshold = 0.0;  // energy; > 0
  double min_gap_s = 0.0;  // >= one hop
};

struct TrainParams {
  size_t min_pulses = 5;
  double min_regularity = 0.7;
  double max_period_s = 2.0;
};

// Local maxima of a time-axis energy projection above threshold; maxima
// closer than min_gap merge to the larger. Times are frame centers in
// seconds relative to the projection t0.
std::vector<double> detect_pulses(const EnergyProjection& projection,
                                  double threshold, double min_gap_s);

// Throws InsufficientPulses below 3 pulses. Period is the median
// inter-pulse interval; the interval standard deviation is the population
// form.
PulseTrainStats pulse_train_score(const std::vector<double>& pulse_times);

// Greedy residual extraction: repeatedly fit the best train over the
// remaining pulses, emit it, remove its pulses. Candidate periods come
// from pairwise gaps; chaining accepts the nearest pulse within 30% of the
// period. "Best" is highest regularity, except that regularities within
// 0.05 tie and the larger pulse count wins (harmonic sub-trains of a
// jittered train score marginally more regular than the train itself).
std::vector<PulseTrain> extract_trains(std::vector<double> pulse_times,
                                       const TrainParams& params);

// Type-II detector: band energy projection -> pulses -> trains. Event bbox
// spans the train time span by the band; score = regularity.
std::vector<EventRecord> type2_detect(const Spectrogram& spec, double f_lo_hz,
                                      double f_hi_hz,
                                      const PulseParams& pulse,
                                      const TrainParams& train);

}  // namespace adamine

#endif  // ADAMINE_PULSETRAIN_HPP
