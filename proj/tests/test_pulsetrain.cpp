#include <doctest.h>

#include <cmath>

#include "adamine/dsp.hpp"
#include "adamine/errors.hpp"
#include "adamine/pulsetrain.hpp"
#include "adamine/rng.hpp"
#include "adamine/synth.hpp"

using namespace adamine;

namespace {

EnergyProjection make_proj(const std::vector<double>& values,
                           double hop_s = 0.01) {
  EnergyProjection p;
  p.axis = ProjectionAxis::kTime;
  p.values = values;
  p.geom.frame_hop_s = hop_s;
  p.geom.window_len = 0;  // frame center == frame index * hop
  p.geom.sample_rate = 1.0;
  return p;
}

}  // namespace

TEST_SUITE("pulsetrain") {

TEST_CASE("impulses over a silent baseline are found exactly") {
  std::vector<double> v(400, 0.0);
  v[100] = 5.0;  // 1.00 s at hop 0.01
  v[200] = 4.0;
  v[300] = 6.0;
  auto pulses = detect_pulses(make_proj(v), 1.0, 0.05);
  REQUIRE(pulses.size() == 3);
  CHECK(pulses[0] == doctest::Approx(1.0));
  CHECK(pulses[1] == doctest::Approx(2.0));
  CHECK(pulses[2] == doctest::Approx(3.0));
}

TEST_CASE("constant projection below threshold is silent") {
  std::vector<double> v(100, 0.4);
  CHECK(detect_pulses(make_proj(v), 1.0, 0.05).empty());
}

TEST_CASE("close double peak merges to the larger") {
  std::vector<double> v(100, 0.0);
  v[50] = 2.0;
  v[55] = 3.0;  // 0.05 s apart, min_gap 0.1
  auto pulses = detect_pulses(make_proj(v), 1.0, 0.1);
  REQUIRE(pulses.size() == 1);
  CHECK(pulses[0] == doctest::Approx(0.55));
}

TEST_CASE("min_gap below one hop is rejected") {
  std::vector<double> v(10, 0.0);
  CHECK_THROWS_AS(detect_pulses(make_proj(v), 1.0, 0.001), ArgumentError);
}

TEST_CASE("perfect train scores period and full regularity") {
  std::vector<double> times;
  for (int i = 0; i < 10; ++i) times.push_back(2.0 + 0.5 * i);
  PulseTrainStats s = pulse_train_score(times);
  CHECK(s.period_s == doctest::Approx(0.5));
  CHECK(s.regularity == doctest::Approx(1.0));
  CHECK(s.count == 10);
}

TEST_CASE("two pulses are not a train") {
  CHECK_THROWS_AS(pulse_train_score({1.0, 2.0}), InsufficientPulses);
}

TEST_CASE("jittered train: period within 5 percent, regularity high") {
  Rng rng(101);
  const double period = 0.8;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> times;
    double t = 1.0;
    for (int i = 0; i < 20; ++i) {
      times.push_back(t + rng.gaussian(0.0, 0.05 * period));
      t += period;
    }
    std::sort(times.begin(), times.end());
    PulseTrainStats s = pulse_train_score(times);
    CHECK(std::abs(s.period_s - period) / period < 0.05);
    CHECK(s.regularity >= 0.8);
    CHECK(s.regularity < 1.0);
  }
}

TEST_CASE("score is translation invariant and scale equivariant") {
  Rng rng(7);
  std::vector<double> times;
  double t = 0.0;
  for (int i = 0; i < 12; ++i) {
    t += 0.4 + rng.uniform(-0.02, 0.02);
    times.push_back(t);
  }
  PulseTrainStats base = pulse_train_score(times);

  std::vector<double> shifted = times;
  for (double& x : shifted) x += 123.456;
  PulseTrainStats sh = pulse_train_score(shifted);
  CHECK(sh.period_s == doctest::Approx(base.period_s).epsilon(1e-12));
  CHECK(sh.regularity == doctest::Approx(base.regularity).epsilon(1e-9));

  const double c = 2.5;
  std::vector<double> scaled = times;
  for (double& x : scaled) x *= c;
  PulseTrainStats sc = pulse_train_score(scaled);
  CHECK(sc.period_s == doctest::Approx(c * base.period_s).epsilon(1e-12));
  CHECK(sc.regularity == doctest::Approx(base.regularity).epsilon(1e-9));
}

TEST_CASE("greedy extraction recovers two interleaved trains") {
  // periods 0.4 and 1.0, offset so pulse sets stay disjoint
  std::vector<double> pulses;
  for (int i = 0; i < 12; ++i) pulses.push_back(1.00 + 0.4 * i);
  for (int i = 0; i < 8; ++i) pulses.push_back(1.17 + 1.0 * i);
  TrainParams params;
  params.min_pulses = 5;
  params.min_regularity = 0.9;
  params.max_period_s = 1.5;
  auto trains = extract_trains(pulses, params);
  REQUIRE(trains.size() == 2);

  // exhaustive subset verification: no admissible subset beats the first
  // train's regularity at >= min_pulses (20 pulses -> 2^20 subsets)
  std::sort(pulses.begin(), pulses.end());
  double best_reg = -1.0;
  size_t n = pulses.size();
  REQUIRE(n <= 25);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<size_t>(__builtin_popcount(mask)) < params.min_pulses)
      continue;
    std::vector<double> subset;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(pulses[i]);
    PulseTrainStats s = pulse_train_score(subset);
    if (s.period_s <= params.max_period_s && s.regularity > best_reg)
      best_reg = s.regularity;
  }
  CHECK(trains[0].regularity == doctest::Approx(best_reg).epsilon(1e-9));

  // both planted periods come back
  std::vector<double> got = {trains[0].period_s, trains[1].period_s};
  std::sort(got.begin(), got.end());
  CHECK(got[0] == doctest::Approx(0.4).epsilon(0.01));
  CHECK(got[1] == doctest::Approx(1.0).epsilon(0.01));
  CHECK(trains[0].count + trains[1].count == 20);
}

TEST_CASE("extraction terminates within the pulse budget") {
  Rng rng(31);
  std::vector<double> pulses;
  for (int i = 0; i < 60; ++i) pulses.push_back(rng.uniform(0.0, 30.0));
  std::sort(pulses.begin(), pulses.end());
  TrainParams params;
  params.min_pulses = 5;
  params.min_regularity = 0.5;
  params.max_period_s = 2.0;
  auto trains = extract_trains(pulses, params);
  CHECK(trains.size() <= 60 / 5);
  for (const PulseTrain& t : trains) {
    CHECK(t.count >= params.min_pulses);
    CHECK(t.regularity >= params.min_regularity);
  }
}

TEST_CASE("type2 detects a rendered pulse train end to end") {
  SceneSpec spec;
  spec.duration_s = 15.0;
  spec.sample_rate = 2000.0;
  spec.noise_rms = 0.01;
  spec.seed = 77;
  SceneSignal sig;
  sig.kind = SignalKind::kPulseTrain;
  sig.start_s = 2.0;
  sig.period_s = 0.4;
  sig.n_pulses = 20;
  sig.pulse_dur_s = 0.08;
  sig.f0_hz = 150.0;
  sig.f1_hz = 250.0;
  sig.snr_db = 20.0;
  spec.signals.push_back(sig);
  RenderedScene scene = render_scene(spec);

  Spectrogram s = stft(scene.block, 256, 64, WindowKind::kHann);
  EnergyProjection proj =
      energy_projection(s, ProjectionAxis::kTime, 150.0, 250.0);
  double peak = 0.0;
  for (double v : proj.values) peak = std::max(peak, v);

  PulseParams pulse;
  pulse.threshold = peak * 0.25;
  pulse.min_gap_s = 0.15;
  TrainParams train;
  train.min_pulses = 5;
  train.min_regularity = 0.7;
  train.max_period_s = 1.0;
  auto events = type2_detect(s, 150.0, 250.0, pulse, train);
  REQUIRE(events.size() == 1);
  CHECK(events[0].score >= train.min_regularity);
  // count within +-1 of 20 and period within 10 percent
  auto pulses = detect_pulses(proj, pulse.threshold, pulse.min_gap_s);
  auto trains = extract_trains(pulses, train);
  REQUIRE(trains.size() == 1);
  CHECK(std::abs(static_cast<double>(trains[0].count) - 20.0) <= 1.0);
  CHECK(std::abs(trains[0].period_s - 0.4) / 0.4 <= 0.10);
}

TEST_CASE("an isolated pulse never becomes an event") {
  SceneSpec spec;
  spec.duration_s = 10.0;
  spec.sample_rate = 2000.0;
  spec.noise_rms = 0.01;
  spec.seed = 78;
  SceneSignal sig;
  sig.kind = SignalKind::kTone;  // one short burst
  sig.start_s = 5.0;
  sig.duration_s = 0.08;
  sig.f0_hz = 200.0;
  sig.snr_db = 25.0;
  spec.signals.push_back(sig);
  RenderedScene scene = render_scene(spec);

  Spectrogram s = stft(scene.block, 256, 64, WindowKind::kHann);
  EnergyProjection proj =
      energy_projection(s, ProjectionAxis::kTime, 150.0, 250.0);
  double peak = 0.0;
  for (double v : proj.values) peak = std::max(peak, v);
  PulseParams pulse;
  pulse.threshold = peak * 0.25;
  pulse.min_gap_s = 0.15;
  TrainParams train;
  CHECK(type2_detect(s, 150.0, 250.0, pulse, train).empty());
}

TEST_CASE("zero-jitter rendered trains are near-perfectly regular") {
  SceneSpec spec;
  spec.duration_s = 12.0;
  spec.sample_rate = 2000.0;
  spec.noise_rms = 0.0;
  spec.seed = 79;
  SceneSignal sig;
  sig.kind = SignalKind::kPulseTrain;
  sig.start_s = 1.0;
  sig.period_s = 0.5;
  sig.n_pulses = 15;
  sig.pulse_dur_s = 0.06;
  sig.f0_hz = 100.0;
  sig.f1_hz = 200.0;
  sig.snr_db = 20.0;
  sig.jitter_frac = 0.0;
  spec.signals.push_back(sig);
  RenderedScene scene = render_scene(spec);
  REQUIRE(scene.pulse_times.size() == 1);
  PulseTrainStats s = pulse_train_score(scene.pulse_times[0]);
  CHECK(s.regularity >= 0.99);
  CHECK(s.period_s == doctest::Approx(0.5).epsilon(1e-9));
}

}  // TEST_SUITE
