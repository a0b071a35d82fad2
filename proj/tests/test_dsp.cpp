#include <doctest.h>

#include <cmath>

#include "adamine/archive.hpp"
#include "adamine/dsp.hpp"
#include "adamine/errors.hpp"
#include "adamine/rng.hpp"

using namespace adamine;

namespace {

constexpr double kPi = 3.14159265358979323846;

SampleBlock sine_block(double freq, double rate, size_t n, double amp = 1.0) {
  SampleBlock b;
  b.channel_id = "T";
  b.sample_rate = rate;
  b.samples.resize(n);
  for (size_t i = 0; i < n; ++i)
    b.samples[i] = amp * std::sin(2.0 * kPi * freq * static_cast<double>(i) / rate);
  return b;
}

Spectrogram manual_spec(size_t frames, size_t bins, double hop_s = 0.1,
                        double bw = 10.0) {
  Spectrogram s;
  s.n_frames = frames;
  s.n_bins = bins;
  s.mag.assign(frames * bins, 0.0);
  s.geom.frame_hop_s = hop_s;
  s.geom.bin_width_hz = bw;
  s.geom.window_len = 16;
  s.geom.sample_rate = bw * 16;
  return s;
}

}  // namespace

TEST_SUITE("dsp") {

TEST_CASE("sine lands in the exact bin") {
  // 125 Hz at 1000 Hz rate, window 256: bin = 125*256/1000 = 32
  SampleBlock b = sine_block(125.0, 1000.0, 1024);
  Spectrogram s = stft(b, 256, 128, WindowKind::kRectangular);
  CHECK(s.n_bins == 129);
  CHECK(s.n_frames == (1024 - 256) / 128 + 1);
  for (size_t f = 0; f < s.n_frames; ++f) {
    size_t argmax = 0;
    for (size_t k = 1; k < s.n_bins; ++k)
      if (s.at(f, k) > s.at(f, argmax)) argmax = k;
    CHECK(argmax == 32);
  }
}

TEST_CASE("high-rate path: 60 kHz tone at a 200 kHz sample rate") {
  // brackets the wideband-recorder case next to the 2 kHz fixtures
  SampleBlock b = sine_block(60000.0, 200000.0, 4096);
  Spectrogram s = stft(b, 256, 128, WindowKind::kRectangular);
  // 60000 * 256 / 200000 = 76.8 -> nearest bin 77
  for (size_t f = 0; f < s.n_frames; ++f) {
    size_t argmax = 0;
    for (size_t k = 1; k < s.n_bins; ++k)
      if (s.at(f, k) > s.at(f, argmax)) argmax = k;
    CHECK(argmax == 77);
  }
  CHECK(s.geom.bin_width_hz == doctest::Approx(781.25));
}

TEST_CASE("all-zero block gives all-zero magnitudes") {
  SampleBlock b;
  b.sample_rate = 1000.0;
  b.samples.assign(600, 0.0);
  Spectrogram s = stft(b, 256, 128, WindowKind::kHann);
  for (double m : s.mag) CHECK(m == 0.0);
}

TEST_CASE("block shorter than a window is an error") {
  SampleBlock b;
  b.sample_rate = 1000.0;
  b.samples.assign(100, 0.1);
  CHECK_THROWS_AS(stft(b, 256, 128, WindowKind::kHann),
                  EmptySpectrogramError);
}

TEST_CASE("rectangular non-overlapping stft preserves energy") {
  Rng rng(11);
  SampleBlock b;
  b.sample_rate = 1000.0;
  b.samples.resize(2048);
  for (double& s : b.samples) s = rng.uniform(-1.0, 1.0);
  Spectrogram s = stft(b, 256, 256, WindowKind::kRectangular);

  double direct = 0.0;  // covered samples only
  for (size_t i = 0; i < s.n_frames * 256; ++i)
    direct += b.samples[i] * b.samples[i];
  double from_spec = 0.0;
  for (double m : s.mag) from_spec += m * m;
  from_spec /= 256.0;
  CHECK(std::abs(direct - from_spec) / direct < 1e-6);
}

TEST_CASE("stft magnitude scales linearly with amplitude") {
  SampleBlock base = sine_block(90.0, 1000.0, 1024, 0.3);
  Spectrogram ref = stft(base, 256, 128, WindowKind::kHann);
  for (double c : {0.0, 1.0, -1.0, 2.5}) {
    SampleBlock scaled = base;
    for (double& s : scaled.samples) s *= c;
    Spectrogram got = stft(scaled, 256, 128, WindowKind::kHann);
    for (size_t i = 0; i < ref.mag.size(); ++i)
      CHECK(got.mag[i] == doctest::Approx(std::abs(c) * ref.mag[i])
                              .epsilon(1e-9));
  }
}

TEST_CASE("binarize tie rule: constant spectrogram stays all false") {
  Spectrogram s = manual_spec(10, 5);
  for (double& m : s.mag) m = 3.5;
  BinaryMask mask = binarize(s, 90.0);
  for (uint8_t v : mask.bits) CHECK(v == 0);
}

TEST_CASE("binarize: single hot pixel") {
  Spectrogram s = manual_spec(8, 6);
  s.at(3, 2) = 1.0;
  BinaryMask mask = binarize(s, 50.0);
  size_t count = 0;
  for (size_t f = 0; f < 8; ++f)
    for (size_t b = 0; b < 6; ++b)
      if (mask.at(f, b)) {
        ++count;
        CHECK(f == 3);
        CHECK(b == 2);
      }
  CHECK(count == 1);
}

TEST_CASE("binarize against sort-and-count oracle") {
  Rng rng(5);
  for (double p : {50.0, 80.0, 95.0}) {
    Spectrogram s = manual_spec(64, 64);
    for (double& m : s.mag) m = rng.uniform();
    BinaryMask mask = binarize(s, p);
    for (size_t b = 0; b < 64; ++b) {
      std::vector<double> col;
      for (size_t f = 0; f < 64; ++f) col.push_back(s.at(f, b));
      double thr = percentile(col, p);
      size_t expect = 0;
      for (double v : col)
        if (v > thr) ++expect;
      size_t got = 0;
      for (size_t f = 0; f < 64; ++f)
        if (mask.at(f, b)) ++got;
      CHECK(got == expect);
      // true fraction bounded by 1 - p/100 plus one-sample tie slack
      CHECK(static_cast<double>(got) / 64.0 <= 1.0 - p / 100.0 + 1.0 / 64.0);
    }
  }
}

TEST_CASE("binarize invariant under strictly monotone per-bin rescaling") {
  Rng rng(6);
  Spectrogram s = manual_spec(32, 16);
  for (double& m : s.mag) m = rng.uniform();
  BinaryMask ref = binarize(s, 85.0);

  Spectrogram warped = s;
  for (size_t b = 0; b < warped.n_bins; ++b) {
    double gain = 0.5 + static_cast<double>(b);
    for (size_t f = 0; f < warped.n_frames; ++f) {
      double v = warped.at(f, b);
      warped.at(f, b) = gain * v * v * v + static_cast<double>(b);
    }
  }
  BinaryMask got = binarize(warped, 85.0);
  CHECK(got.bits == ref.bits);
}

TEST_CASE("energy projection basics") {
  Spectrogram s = manual_spec(4, 3);  // bw 10: centers 0, 10, 20
  for (double& m : s.mag) m = 1.0;
  EnergyProjection time_proj =
      energy_projection(s, ProjectionAxis::kTime, 0.0, 20.0);
  REQUIRE(time_proj.values.size() == 4);
  for (double v : time_proj.values) CHECK(v == doctest::Approx(3.0));

  EnergyProjection one_bin =
      energy_projection(s, ProjectionAxis::kTime, 8.0, 12.0);
  CHECK(one_bin.bin_lo == 1);
  CHECK(one_bin.bin_hi == 1);
  for (double v : one_bin.values) CHECK(v == doctest::Approx(1.0));

  CHECK_THROWS_AS(energy_projection(s, ProjectionAxis::kTime, 12.0, 14.0),
                  ArgumentError);
  CHECK_THROWS_AS(energy_projection(s, ProjectionAxis::kTime, 14.0, 12.0),
                  ArgumentError);
}

TEST_CASE("time and frequency projections agree on totals") {
  Rng rng(8);
  Spectrogram s = manual_spec(20, 12);
  for (double& m : s.mag) m = rng.uniform();
  EnergyProjection t = energy_projection(s, ProjectionAxis::kTime, 5.0, 75.0);
  EnergyProjection f =
      energy_projection(s, ProjectionAxis::kFrequency, 5.0, 75.0);
  double ts = 0.0, fs = 0.0;
  for (double v : t.values) ts += v;
  for (double v : f.values) fs += v;
  CHECK(ts == doctest::Approx(fs).epsilon(1e-12));
}

TEST_CASE("click projection peaks at the click frame") {
  Rng rng(13);
  SampleBlock b;
  b.sample_rate = 1000.0;
  b.samples.resize(4000);
  for (double& s : b.samples) s = rng.gaussian(0.0, 0.01);
  // a short broadband click at 2.0 s
  for (size_t i = 2000; i < 2032; ++i) b.samples[i] += 0.8;
  Spectrogram s = stft(b, 256, 64, WindowKind::kHann);
  EnergyProjection proj =
      energy_projection(s, ProjectionAxis::kTime, 10.0, 490.0);
  size_t argmax = 0;
  for (size_t i = 1; i < proj.values.size(); ++i)
    if (proj.values[i] > proj.values[argmax]) argmax = i;
  double t = proj.geom.frame_center_s(argmax);
  CHECK(std::abs(t - 2.016) < 0.15);  // click spans [2.0, 2.032]
}

TEST_CASE("spectrogram pgm export") {
  Spectrogram s = manual_spec(6, 4);
  s.at(2, 1) = 2.0;
  s.at(5, 3) = 4.0;
  PgmImage img = spectrogram_to_pgm(s);
  CHECK(img.rows == 4);
  CHECK(img.cols == 6);
  // top row is the highest bin; the 4.0 peak maps to 255
  CHECK(img.at(0, 5) == 255);
  CHECK(img.at(2, 2) == 128);  // 2.0 of 4.0, bin 1 -> row 2, lround(127.5)
  CHECK(img.at(3, 0) == 0);
}

}  // TEST_SUITE
