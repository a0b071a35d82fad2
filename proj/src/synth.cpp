#include "adamine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "adamine/errors.hpp"
#include "adamine/rng.hpp"
#include "adamine/wav.hpp"

namespace adamine {

namespace {

constexpr double kPi = 3.14159265358979323846;

// amplitude that puts the sinusoid snr_db above the in-band noise power
double amplitude_for_snr(double snr_db, double noise_rms, double band_hz,
                         double nyquist_hz) {
  if (noise_rms <= 0.0) return 0.5;  // no noise floor: pin a sane level
  double band = std::min(std::max(band_hz, 1.0), nyquist_hz);
  double noise_band_power = noise_rms * noise_rms * band / nyquist_hz;
  return std::sqrt(2.0 * noise_band_power * std::pow(10.0, snr_db / 10.0));
}

void add_burst(std::vector<double>& samples, double rate, double t0,
               double dur, double freq, double amp) {
  int64_t first = std::llround(t0 * rate);
  int64_t count = std::llround(dur * rate);
  for (int64_t i = 0; i < count; ++i) {
    int64_t at = first + i;
    if (at < 0 || at >= static_cast<int64_t>(samples.size())) continue;
    double u = static_cast<double>(i) / static_cast<double>(count);
    double env = 0.5 - 0.5 * std::cos(2.0 * kPi * u);  // hann envelope
    samples[static_cast<size_t>(at)] +=
        amp * env * std::sin(2.0 * kPi * freq * static_cast<double>(i) / rate);
  }
}

}  // namespace

RenderedScene render_scene(const SceneSpec& spec) {
  if (!(spec.duration_s > 0.0) || !(spec.sample_rate > 0.0))
    throw ArgumentError("scene duration and rate must be positive");
  for (const SceneSignal& s : spec.signals) {
    if (s.start_s < 0.0 || !std::isfinite(s.snr_db))
      throw ArgumentError("scene signal start/snr invalid");
    double end = s.kind == SignalKind::kPulseTrain
                     ? s.start_s + static_cast<double>(s.n_pulses) * s.period_s
                     : s.start_s + s.duration_s;
    if (end > spec.duration_s + 1e-9)
      throw ArgumentError("scene signal extends past scene duration");
  }

  const double rate = spec.sample_rate;
  const double nyquist = rate / 2.0;
  const size_t n = static_cast<size_t>(std::llround(spec.duration_s * rate));

  RenderedScene out;
  out.block.channel_id = spec.channel_id;
  out.block.start_utc = spec.start_utc;
  out.block.sample_rate = rate;
  out.block.samples.assign(n, 0.0);

  Rng rng(spec.seed);
  if (spec.noise_rms > 0.0)
    for (double& s : out.block.samples) s = rng.gaussian(0.0, spec.noise_rms);

  for (const SceneSignal& sig : spec.signals) {
    EventRecord truth;
    truth.run_id = "truth";
    truth.channel_id = spec.channel_id;
    truth.score = 1.0;
    truth.detector_id = "truth";

    if (sig.kind == SignalKind::kUpsweep || sig.kind == SignalKind::kTone) {
      double f_lo = std::min(sig.f0_hz, sig.f1_hz);
      double f_hi = std::max(sig.f0_hz, sig.f1_hz);
      double band = sig.kind == SignalKind::kTone
                        ? std::max(2.0 / std::max(sig.duration_s, 1e-6), 4.0)
                        : f_hi - f_lo;
      double amp = amplitude_for_snr(sig.snr_db, spec.noise_rms, band, nyquist);
      int64_t first = std::llround(sig.start_s * rate);
      int64_t count = std::llround(sig.duration_s * rate);
      // cosine ramps keep the onset transient to about one bin of spread
      double ramp = std::min(0.1, sig.duration_s / 4.0);
      for (int64_t i = 0; i < count; ++i) {
        int64_t at = first + i;
        if (at < 0 || at >= static_cast<int64_t>(n)) continue;
        double u = static_cast<double>(i) / rate;  // seconds into the signal
        double phase;
        if (sig.kind == SignalKind::kTone) {
          phase = 2.0 * kPi * sig.f0_hz * u;
        } else {
          double k = (sig.f1_hz - sig.f0_hz) / sig.duration_s;
          phase = 2.0 * kPi * (sig.f0_hz * u + 0.5 * k * u * u);
        }
        double env = 1.0;
        if (u < ramp)
          env = 0.5 - 0.5 * std::cos(kPi * u / ramp);
        else if (sig.duration_s - u < ramp)
          env = 0.5 - 0.5 * std::cos(kPi * (sig.duration_s - u) / ramp);
        out.block.samples[static_cast<size_t>(at)] +=
            amp * env * std::sin(phase);
      }
      truth.begin_time = spec.start_utc +
                         static_cast<UtcMillis>(std::llround(sig.start_s * 1000.0));
      truth.end_time =
          spec.start_utc + static_cast<UtcMillis>(std::llround(
                               (sig.start_s + sig.duration_s) * 1000.0));
      if (sig.kind == SignalKind::kTone) {
        truth.f_lo_hz = sig.f0_hz - band / 2.0;
        truth.f_hi_hz = sig.f0_hz + band / 2.0;
        truth.tag = "tone";
      } else {
        truth.f_lo_hz = f_lo;
        truth.f_hi_hz = f_hi;
        truth.tag = "upsweep";
      }
      out.truth.push_back(truth);
    } else {
      if (sig.n_pulses < 2 || !(sig.period_s > 0.0) || !(sig.pulse_dur_s > 0.0))
        throw ArgumentError("pulse train needs n_pulses >= 2, period > 0, "
                            "pulse_dur > 0");
      double f_center = 0.5 * (sig.f0_hz + sig.f1_hz);
      double band = std::max(sig.f1_hz - sig.f0_hz, 1.0);
      double amp = amplitude_for_snr(sig.snr_db, spec.noise_rms, band, nyquist);
      std::vector<double> times;
      for (size_t k = 0; k < sig.n_pulses; ++k) {
        double t = sig.start_s + static_cast<double>(k) * sig.period_s;
        if (sig.jitter_frac > 0.0)
          t += rng.gaussian(0.0, sig.jitter_frac * sig.period_s);
        times.push_back(t);
      }
      std::sort(times.begin(), times.end());
      for (double t : times)
        add_burst(out.block.samples, rate, t, sig.pulse_dur_s, f_center, amp);
      truth.begin_time = spec.start_utc +
                         static_cast<UtcMillis>(std::llround(times.front() * 1000.0));
      truth.end_time =
          spec.start_utc + static_cast<UtcMillis>(std::llround(
                               (times.back() + sig.pulse_dur_s) * 1000.0));
      truth.f_lo_hz = sig.f0_hz;
      truth.f_hi_hz = sig.f1_hz;
      truth.tag = "pulse_train";
      out.truth.push_back(truth);
      out.pulse_times.push_back(std::move(times));
    }
  }

  for (double& s : out.block.samples) s = std::clamp(s, -1.0, 1.0);
  return out;
}

std::string write_scene_wav(const RenderedScene& scene, const std::string& root,
                            int bit_depth) {
  std::filesystem::create_directories(root);
  std::string name =
      make_archive_filename(scene.block.channel_id, scene.block.start_utc);
  std::string path = root + "/" + name;
  wav_write(path, scene.block.samples,
            static_cast<uint32_t>(std::llround(scene.block.sample_rate)),
            bit_depth);
  return path;
}

double point_biserial(const std::vector<double>& scores,
                      const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw ArgumentError("scores/labels mismatch");
  double n = static_cast<double>(scores.size());
  double n1 = 0.0;
  for (int y : labels) n1 += y ? 1.0 : 0.0;
  double n0 = n - n1;
  if (n1 == 0.0 || n0 == 0.0) return 0.0;
  double m1 = 0.0, m0 = 0.0, mean = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    mean += scores[i];
    (labels[i] ? m1 : m0) += scores[i];
  }
  mean /= n;
  m1 /= n1;
  m0 /= n0;
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= n;
  if (var <= 0.0) return 0.0;
  return (m1 - m0) * std::sqrt(n1 * n0 / (n * n)) / std::sqrt(var);
}

namespace {

// point-biserial of the mixture generator as a function of q, for base rate p
double mixture_pb(double q, double p) {
  double mean = q * p + (1.0 - q) * 0.5;
  double second = q * p + (1.0 - q) * 0.375;  // E[U^2] over the 5 levels
  double var = second - mean * mean;
  if (var <= 0.0) return 1.0;
  return q * std::sqrt(p * (1.0 - p)) / std::sqrt(var);
}

double solve_q(double rho, double p) {
  if (rho >= 1.0) return 1.0;
  if (rho <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mixture_pb(mid, p) < rho)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<HumanScore> simulate_scores(const std::vector<int>& labels,
                                        const std::vector<std::string>& event_ids,
                                        double rho, double disagreement,
                                        uint64_t seed,
                                        const std::string& analyst_id) {
  if (labels.size() != event_ids.size())
    throw ArgumentError("labels/event_ids length mismatch");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw ArgumentError("rho must be in [0, 1]");
  if (!(disagreement >= 0.0 && disagreement <= 0.5))
    throw ArgumentError("disagreement must be in [0, 0.5]");

  double p = 0.0;
  for (int y : labels) p += y ? 1.0 : 0.0;
  p = labels.empty() ? 0.5 : p / static_cast<double>(labels.size());
  p = std::clamp(p, 1e-6, 1.0 - 1e-6);
  const double q = solve_q(rho, p);
  const double flip = (1.0 - std::sqrt(std::max(0.0, 1.0 - 2.0 * disagreement))) / 2.0;
  static const double kLevels[5] = {0.0, 0.25, 0.5, 0.75, 1.0};

  Rng rng(seed);
  std::vector<HumanScore> out;
  out.reserve(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    double u_flip = rng.uniform();
    double u_informed = rng.uniform();
    double u_level = rng.uniform();
    int eff = labels[i];
    if (u_flip < flip) eff = 1 - eff;
    double s;
    if (u_informed < q)
      s = eff ? 1.0 : 0.0;
    else
      s = kLevels[std::min(static_cast<size_t>(u_level * 5.0), size_t{4})];
    out.push_back({event_ids[i], analyst_id, s});
  }
  return out;
}

LabeledFeatures synth_feature_set(size_t n, size_t dims, double separation,
                                  uint64_t seed) {
  if (n == 0 || dims == 0)
    throw ArgumentError("need n > 0 and dims > 0");
  Rng rng(seed);
  LabeledFeatures set;
  set.features.reserve(n);
  set.labels.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    int y = rng.uniform() < 0.5 ? 0 : 1;
    double shift = (y ? 0.5 : -0.5) * separation;
    std::vector<double> row(dims);
    for (double& v : row) v = rng.gaussian(0.0, 1.0) + shift;
    set.features.push_back(std::move(row));
    set.labels.push_back(y);
    set.event_ids.push_back("synth:" + std::to_string(i));
  }
  return set;
}

}  // namespace adamine
