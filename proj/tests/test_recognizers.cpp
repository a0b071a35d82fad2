#include <doctest.h>

#include <cmath>

#include "adamine/errors.hpp"
#include "adamine/recognizers.hpp"
#include "adamine/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace adamine;

namespace {

Spectrogram random_spec(size_t frames, size_t bins, Rng& rng) {
  Spectrogram s;
  s.n_frames = frames;
  s.n_bins = bins;
  s.mag.resize(frames * bins);
  for (double& m : s.mag) m = rng.uniform();
  s.geom.frame_hop_s = 0.064;
  s.geom.bin_width_hz = 7.8125;
  s.geom.window_len = 256;
  s.geom.sample_rate = 2000.0;
  return s;
}

Template patch_of(const Spectrogram& s, size_t fo, size_t bo, size_t frames,
                  size_t bins) {
  Template t;
  t.name = "probe";
  t.n_frames = frames;
  t.n_bins = bins;
  t.patch.resize(frames * bins);
  for (size_t f = 0; f < frames; ++f)
    for (size_t b = 0; b < bins; ++b)
      t.patch[f * bins + b] = s.at(fo + f, bo + b);
  return t;
}

}  // namespace

TEST_SUITE("recognizers") {

TEST_CASE("self-match correlates to exactly one, negation to minus one") {
  Rng rng(2);
  Spectrogram s = random_spec(32, 32, rng);
  Template t = patch_of(s, 10, 7, 8, 8);
  CorrelationMap map = correlation_map(s, t);
  CHECK(map.at(10, 7) == doctest::Approx(1.0).epsilon(1e-9));

  Template neg = t;
  for (double& v : neg.patch) v = -v;
  CorrelationMap nmap = correlation_map(s, neg);
  CHECK(nmap.at(10, 7) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("full map matches the brute-force oracle") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Spectrogram s = random_spec(32, 32, rng);
    Template t;
    t.n_frames = 8;
    t.n_bins = 8;
    t.patch.resize(64);
    for (double& v : t.patch) v = rng.uniform();
    CorrelationMap map = correlation_map(s, t);
    REQUIRE(map.n_frame_offsets == 25);
    REQUIRE(map.n_bin_offsets == 25);
    for (size_t fo = 0; fo < 25; ++fo)
      for (size_t bo = 0; bo < 25; ++bo) {
        double want = oracles::brute_ncc_at(s, t, fo, bo);
        CHECK(std::abs(map.at(fo, bo) - want) < 1e-9);
      }
  }
}

TEST_CASE("correlation is invariant under affine rescaling") {
  Rng rng(4);
  Spectrogram s = random_spec(24, 24, rng);
  Template t = patch_of(s, 3, 3, 6, 6);
  CorrelationMap ref = correlation_map(s, t);

  for (double a : {0.5, 3.0}) {
    for (double b : {0.0, 1.0}) {
      Spectrogram scaled = s;
      for (double& m : scaled.mag) m = a * m + b;
      CorrelationMap got = correlation_map(scaled, t);
      for (size_t i = 0; i < ref.ncc.size(); ++i)
        CHECK(std::abs(got.ncc[i] - ref.ncc[i]) < 1e-9);

      Template tmpl_scaled = t;
      for (double& v : tmpl_scaled.patch) v = a * v + b;
      CorrelationMap got2 = correlation_map(s, tmpl_scaled);
      for (size_t i = 0; i < ref.ncc.size(); ++i)
        CHECK(std::abs(got2.ncc[i] - ref.ncc[i]) < 1e-9);
    }
  }
}

TEST_CASE("template larger than the spectrogram is rejected") {
  Rng rng(5);
  Spectrogram s = random_spec(8, 8, rng);
  Template t;
  t.n_frames = 9;
  t.n_bins = 4;
  t.patch.assign(36, 1.0);
  CHECK_THROWS_AS(correlation_map(s, t), ArgumentError);
}

TEST_CASE("template_correlate emits the planted peak with its footprint") {
  Rng rng(6);
  Spectrogram s = random_spec(40, 30, rng);
  Template t = patch_of(s, 20, 12, 8, 6);
  auto events = template_correlate(s, t, 0.995);
  REQUIRE(events.size() == 1);
  const EventRecord& e = events[0];
  CHECK(e.score == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.f_lo_hz == doctest::Approx(12 * 7.8125));
  CHECK(e.f_hi_hz == doctest::Approx(18 * 7.8125));
  // frames 20..27 under the center-time convention
  double expect_t0 = 20 * 0.064 + 0.5 * 256 / 2000.0 - 0.5 * 0.064;
  double expect_t1 = 27 * 0.064 + 0.5 * 256 / 2000.0 + 0.5 * 0.064;
  CHECK(e.begin_time / 1000.0 == doctest::Approx(expect_t0).epsilon(1e-3));
  CHECK(e.end_time / 1000.0 == doctest::Approx(expect_t1).epsilon(1e-3));
}

TEST_CASE("constant patch yields the zero descriptor") {
  std::vector<double> patch(16 * 16, 3.7);
  HogDescriptor d = hog_features(patch, 16, 16, 8, 9);
  CHECK(d.vector.size() == 2 * 2 * 9);
  for (double v : d.vector) CHECK(v == 0.0);
}

TEST_CASE("vertical step edge puts all mass in the zero-degree bin") {
  // intensity changes across columns only: gradients are horizontal (0 deg).
  // Hand oracle on the 8x8 patch: interior pixels at columns 3 and 4 see
  // gx = 0.5, gy = 0; rows 1..6 give 12 voting pixels, everything in bin 0.
  const size_t n = 8;
  std::vector<double> patch(n * n, 0.0);
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 4; c < n; ++c) patch[r * n + c] = 1.0;

  HogDescriptor raw = hog_features(patch, n, n, 8, 9, false);
  REQUIRE(raw.vector.size() == 9);
  CHECK(raw.vector[0] == doctest::Approx(12 * 0.5).epsilon(1e-12));
  for (size_t b = 1; b < 9; ++b) CHECK(raw.vector[b] == 0.0);

  HogDescriptor d = hog_features(patch, n, n, 8, 9);
  CHECK(d.vector[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("descriptor length arithmetic") {
  std::vector<double> patch(32 * 32, 0.0);
  for (size_t i = 0; i < patch.size(); ++i)
    patch[i] = static_cast<double>(i % 7);
  HogDescriptor d = hog_features(patch, 32, 32, 8, 9);
  CHECK(d.vector.size() == 4 * 4 * 9);
  CHECK(d.n_cells_x == 4);
  CHECK(d.n_cells_y == 4);
}

TEST_CASE("hog vote mass equals gradient magnitude mass") {
  Rng rng(7);
  const size_t n = 24;
  std::vector<double> patch(n * n);
  for (double& v : patch) v = rng.uniform();
  HogDescriptor raw = hog_features(patch, n, n, 8, 9, false);

  double grad_mass = 0.0;
  for (size_t r = 1; r + 1 < n; ++r)
    for (size_t c = 1; c + 1 < n; ++c) {
      double gx = 0.5 * (patch[r * n + c + 1] - patch[r * n + c - 1]);
      double gy = 0.5 * (patch[(r + 1) * n + c] - patch[(r - 1) * n + c]);
      grad_mass += std::hypot(gx, gy);
    }
  double vote_mass = 0.0;
  for (double v : raw.vector) vote_mass += v;
  CHECK(vote_mass == doctest::Approx(grad_mass).epsilon(1e-12));
}

TEST_CASE("hog descriptor is scale invariant after normalization") {
  Rng rng(9);
  const size_t n = 16;
  std::vector<double> patch(n * n);
  for (double& v : patch) v = rng.uniform();
  HogDescriptor d = hog_features(patch, n, n, 8, 9);
  std::vector<double> scaled = patch;
  for (double& v : scaled) v *= 4.2;
  HogDescriptor d2 = hog_features(scaled, n, n, 8, 9);
  for (size_t i = 0; i < d.vector.size(); ++i) {
    CHECK(std::abs(d2.vector[i] - d.vector[i]) < 1e-9);
    CHECK(d.vector[i] >= 0.0);
  }
}

TEST_CASE("hog rejects bad geometry") {
  std::vector<double> patch(10 * 10, 0.0);
  CHECK_THROWS_AS(hog_features(patch, 10, 10, 8, 9), ArgumentError);
  CHECK_THROWS_AS(hog_features(patch, 10, 9, 5, 9), ArgumentError);
}

TEST_CASE("template save/load round trip") {
  testutil::TempDir dir;
  Rng rng(8);
  Template t;
  t.name = "upcall";
  t.n_frames = 12;
  t.n_bins = 10;
  t.band_f_lo_hz = 93.75;
  t.patch.resize(120);
  for (double& v : t.patch) v = rng.uniform();
  save_template(dir.file("upcall"), t);

  Template back = load_template(dir.file("upcall"));
  CHECK(back.name == "upcall");
  CHECK(back.n_frames == 12);
  CHECK(back.n_bins == 10);
  CHECK(back.band_f_lo_hz == doctest::Approx(93.75));

  // 8-bit quantization keeps the patch NCC-equivalent to the original
  Spectrogram s;
  s.n_frames = 12;
  s.n_bins = 10;
  s.mag = t.patch;
  s.geom.frame_hop_s = 0.064;
  s.geom.bin_width_hz = 7.8125;
  s.geom.window_len = 256;
  s.geom.sample_rate = 2000.0;
  CorrelationMap map = correlation_map(s, back);
  CHECK(map.at(0, 0) > 0.999);
}

}  // TEST_SUITE
