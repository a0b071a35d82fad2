#include "adamine/pulsetrain.hpp"

#include <algorithm>
#include <cmath>

#include "adamine/errors.hpp"
#include "adamine/segmentation.hpp"

namespace adamine {

std::vector<double> detect_pulses(const EnergyProjection& projection,
                                  double threshold, double min_gap_s) {
  if (projection.axis != ProjectionAxis::kTime)
    throw ArgumentError("detect_pulses needs a time-axis projection");
  if (!(threshold > 0.0)) throw ArgumentError("threshold must be positive");
  if (min_gap_s < projection.geom.frame_hop_s - 1e-12)
    throw ArgumentError("min_gap must be at least one frame hop");

  const std::vector<double>& v = projection.values;
  const size_t n = v.size();
  std::vector<size_t> maxima;
  for (size_t i = 0; i < n; ++i) {
    if (!(v[i] > threshold)) continue;
    bool rises = i == 0 || v[i] > v[i - 1];       // leftmost of a plateau
    bool falls = i + 1 == n || v[i] >= v[i + 1];
    if (rises && falls) maxima.push_back(i);
  }

  // larger peaks claim their min_gap neighborhood first
  std::vector<size_t> order(maxima.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (v[maxima[a]] != v[maxima[b]]) return v[maxima[a]] > v[maxima[b]];
    return maxima[a] < maxima[b];
  });
  std::vector<double> accepted;
  for (size_t k : order) {
    double t = projection.geom.frame_center_s(maxima[k]);
    bool blocked = false;
    for (double a : accepted)
      if (std::abs(t - a) < min_gap_s - 1e-12) {
        blocked = true;
        break;
      }
    if (!blocked) accepted.push_back(t);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

PulseTrainStats pulse_train_score(const std::vector<double>& pulse_times) {
  if (pulse_times.size() < 3)
    throw InsufficientPulses("pulse train needs at least 3 pulses, got " +
                             std::to_string(pulse_times.size()));
  std::vector<double> intervals;
  intervals.reserve(pulse_times.size() - 1);
  for (size_t i = 1; i < pulse_times.size(); ++i) {
    double d = pulse_times[i] - pulse_times[i - 1];
    if (!(d > 0.0))
      throw ArgumentError("pulse times must be strictly increasing");
    intervals.push_back(d);
  }
  std::vector<double> sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  size_t m = sorted.size();
  double period = m % 2 == 1 ? sorted[m / 2]
                             : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  double mean = 0.0;
  for (double d : intervals) mean += d;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double d : intervals) var += (d - mean) * (d - mean);
  var /= static_cast<double>(m);
  double cv = std::sqrt(var) / period;

  PulseTrainStats stats;
  stats.period_s = period;
  stats.regularity = 1.0 - std::min(1.0, cv);
  stats.count = pulse_times.size();
  return stats;
}

namespace {

// chain pulses from a start, stepping by roughly one period each hop
std::vector<double> chain(const std::vector<double>& pulses, size_t start,
                          double period) {
  std::vector<double> out{pulses[start]};
  double tol = 0.3 * period;
  size_t i = start;
  for (;;) {
    double want = out.back() + period;
    size_t best = pulses.size();
    double best_dev = tol * (1.0 + 1e-12);  // ties go to the earlier pulse
    for (size_t j = i + 1; j < pulses.size(); ++j) {
      if (pulses[j] <= out.back()) continue;
      double dev = std::abs(pulses[j] - want);
      if (dev < best_dev) {
        best_dev = dev;
        best = j;
      }
      if (pulses[j] > want + tol) break;
    }
    if (best == pulses.size()) return out;
    out.push_back(pulses[best]);
    i = best;
  }
}

// Stride-2 subsets of a jittered or frame-quantized train score slightly
// MORE regular than the train itself (interval noise averages out over the
// doubled period), so regularities within 0.1 count as a tie and the
// larger train wins it.
bool train_beats(const PulseTrain& a, const PulseTrain& b) {
  if (std::abs(a.regularity - b.regularity) > 0.1)
    return a.regularity > b.regularity;
  if (a.count != b.count) return a.count > b.count;
  if (a.regularity != b.regularity) return a.regularity > b.regularity;
  if (a.t_first != b.t_first) return a.t_first < b.t_first;
  return a.period_s < b.period_s;
}

}  // namespace

std::vector<PulseTrain> extract_trains(std::vector<double> pulse_times,
                                       const TrainParams& params) {
  if (params.min_pulses < 3)
    throw ArgumentError("min_pulses must be at least 3");
  if (!(params.min_regularity >= 0.0 && params.min_regularity <= 1.0))
    throw ArgumentError("min_regularity must be in [0, 1]");
  if (!(params.max_period_s > 0.0))
    throw ArgumentError("max_period must be positive");

  std::sort(pulse_times.begin(), pulse_times.end());
  std::vector<PulseTrain> trains;
  while (pulse_times.size() >= params.min_pulses) {
    bool found = false;
    PulseTrain best;
    for (size_t i = 0; i < pulse_times.size(); ++i) {
      for (size_t j = i + 1; j < pulse_times.size(); ++j) {
        double period = pulse_times[j] - pulse_times[i];
        if (period <= 0.0) continue;
        if (period > params.max_period_s * 1.3) break;
        std::vector<double> member = chain(pulse_times, i, period);
        if (member.size() >= 3) {
          // the seed gap is one noisy interval; re-chain once with the
          // fitted period to stop drift from breaking long trains
          double fitted = pulse_train_score(member).period_s;
          std::vector<double> refined = chain(pulse_times, i, fitted);
          if (refined.size() >= member.size()) member = std::move(refined);
        }
        if (member.size() < params.min_pulses) continue;
        PulseTrainStats stats = pulse_train_score(member);
        if (stats.period_s > params.max_period_s ||
            stats.regularity < params.min_regularity)
          continue;
        PulseTrain cand;
        cand.pulse_times = std::move(member);
        cand.period_s = stats.period_s;
        cand.regularity = stats.regularity;
        cand.count = stats.count;
        cand.t_first = cand.pulse_times.front();
        cand.t_last = cand.pulse_times.back();
        if (!found || train_beats(cand, best)) {
          best = std::move(cand);
          found = true;
        }
      }
    }
    if (!found) break;
    // remove the train's pulses from the residual set
    std::vector<double> rest;
    size_t k = 0;
    for (double t : pulse_times) {
      if (k < best.pulse_times.size() && t == best.pulse_times[k])
        ++k;
      else
        rest.push_back(t);
    }
    pulse_times = std::move(rest);
    trains.push_back(std::move(best));
  }
  return trains;
}

std::vector<EventRecord> type2_detect(const Spectrogram& spec, double f_lo_hz,
                                      double f_hi_hz,
                                      const PulseParams& pulse,
                                      const TrainParams& train) {
  EnergyProjection proj =
      energy_projection(spec, ProjectionAxis::kTime, f_lo_hz, f_hi_hz);
  std::vector<double> pulses =
      detect_pulses(proj, pulse.threshold, pulse.min_gap_s);
  std::vector<EventRecord> events;
  for (const PulseTrain& t : extract_trains(pulses, train)) {
    TfBbox box;
    box.t0_s = t.t_first;
    box.t1_s = t.t_last;
    box.f_lo_hz = f_lo_hz;
    box.f_hi_hz = f_hi_hz;
    events.push_back(event_from_bbox(spec.geom, box, t.regularity));
  }
  return events;
}

}  // namespace adamine
