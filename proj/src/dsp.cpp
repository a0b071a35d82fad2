#include "adamine/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "adamine/archive.hpp"
#include "adamine/errors.hpp"

namespace adamine {

WindowKind window_kind_from_string(const std::string& s) {
  if (s == "rectangular") return WindowKind::kRectangular;
  if (s == "hann") return WindowKind::kHann;
  throw ArgumentError("unknown window kind: '" + s + "'");
}

std::string to_string(WindowKind k) {
  return k == WindowKind::kRectangular ? "rectangular" : "hann";
}

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// in-place iterative radix-2 Cooley-Tukey
void fft_pow2(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void dft_naive(const std::vector<double>& x,
               std::vector<std::complex<double>>& out) {
  const size_t n = x.size();
  out.resize(n / 2 + 1);
  for (size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double ang = -2.0 * kPi * static_cast<double>(k) *
                   static_cast<double>(i) / static_cast<double>(n);
      re += x[i] * std::cos(ang);
      im += x[i] * std::sin(ang);
    }
    out[k] = {re, im};
  }
}

}  // namespace

Spectrogram stft(const SampleBlock& block, size_t window_len, size_t hop,
                 WindowKind kind) {
  if (window_len == 0 || hop == 0)
    throw ArgumentError("window_len and hop must be positive");
  if (block.samples.size() < window_len)
    throw EmptySpectrogramError(
        "block of " + std::to_string(block.samples.size()) +
        " samples is shorter than one window (" + std::to_string(window_len) +
        ")");

  const size_t n_frames = (block.samples.size() - window_len) / hop + 1;
  const size_t n_bins = window_len / 2 + 1;

  std::vector<double> window(window_len, 1.0);
  if (kind == WindowKind::kHann)
    for (size_t i = 0; i < window_len; ++i)
      window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                       static_cast<double>(window_len));

  Spectrogram spec;
  spec.n_frames = n_frames;
  spec.n_bins = n_bins;
  spec.mag.resize(n_frames * n_bins);
  spec.geom.frame_hop_s = static_cast<double>(hop) / block.sample_rate;
  spec.geom.bin_width_hz = block.sample_rate / static_cast<double>(window_len);
  spec.geom.t0 = block.start_utc;
  spec.geom.window_len = window_len;
  spec.geom.sample_rate = block.sample_rate;
  spec.window_kind = kind;

  const bool pow2 = is_pow2(window_len);
  const double root2 = std::sqrt(2.0);
  std::vector<std::complex<double>> buf;
  std::vector<double> frame(window_len);
  for (size_t f = 0; f < n_frames; ++f) {
    const double* src = block.samples.data() + f * hop;
    for (size_t i = 0; i < window_len; ++i) frame[i] = src[i] * window[i];
    if (pow2) {
      buf.assign(frame.begin(), frame.end());
      fft_pow2(buf);
    } else {
      dft_naive(frame, buf);
    }
    double* row = spec.mag.data() + f * n_bins;
    for (size_t k = 0; k < n_bins; ++k) {
      double m = std::abs(buf[k]);
      // sqrt(2) on interior bins keeps sum(mag^2) equal to the two-sided
      // spectrum energy (Parseval)
      if (k != 0 && k != window_len - k) m *= root2;
      row[k] = m;
    }
  }
  return spec;
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) throw ArgumentError("percentile of empty vector");
  if (!(p > 0.0 && p < 100.0))
    throw ArgumentError("percentile must be in (0, 100)");
  std::sort(v.begin(), v.end());
  double rank = p / 100.0 * static_cast<double>(v.size() - 1);
  size_t lo = static_cast<size_t>(rank);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = rank - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

BinaryMask binarize(const Spectrogram& spec, double p) {
  if (!(p > 0.0 && p < 100.0))
    throw ArgumentError("binarize percentile must be in (0, 100)");
  BinaryMask mask;
  mask.n_frames = spec.n_frames;
  mask.n_bins = spec.n_bins;
  mask.bits.assign(spec.n_frames * spec.n_bins, 0);
  mask.geom = spec.geom;
  mask.provenance = {"per-bin-percentile", p};

  std::vector<double> column(spec.n_frames);
  for (size_t b = 0; b < spec.n_bins; ++b) {
    for (size_t f = 0; f < spec.n_frames; ++f) column[f] = spec.at(f, b);
    double thr = percentile(column, p);
    for (size_t f = 0; f < spec.n_frames; ++f)
      if (spec.at(f, b) > thr) mask.bits[f * spec.n_bins + b] = 1;
  }
  return mask;
}

EnergyProjection energy_projection(const Spectrogram& spec,
                                   ProjectionAxis axis, double f_lo_hz,
                                   double f_hi_hz) {
  if (!(f_lo_hz < f_hi_hz))
    throw ArgumentError("band must satisfy f_lo < f_hi");
  if (f_lo_hz < 0.0 || f_hi_hz > spec.geom.nyquist_hz() + 1e-9)
    throw ArgumentError("band outside [0, Nyquist]");

  // bins whose center frequency lies in the band
  size_t bin_lo = spec.n_bins, bin_hi = 0;
  for (size_t b = 0; b < spec.n_bins; ++b) {
    double fc = spec.geom.bin_center_hz(b);
    if (fc >= f_lo_hz && fc <= f_hi_hz) {
      bin_lo = std::min(bin_lo, b);
      bin_hi = std::max(bin_hi, b);
    }
  }
  if (bin_lo > bin_hi)
    throw ArgumentError("band [" + std::to_string(f_lo_hz) + ", " +
                        std::to_string(f_hi_hz) + "] Hz contains no bins");

  EnergyProjection proj;
  proj.axis = axis;
  proj.bin_lo = bin_lo;
  proj.bin_hi = bin_hi;
  proj.geom = spec.geom;
  if (axis == ProjectionAxis::kTime) {
    proj.values.assign(spec.n_frames, 0.0);
    for (size_t f = 0; f < spec.n_frames; ++f)
      for (size_t b = bin_lo; b <= bin_hi; ++b)
        proj.values[f] += spec.at(f, b) * spec.at(f, b);
  } else {
    proj.values.assign(bin_hi - bin_lo + 1, 0.0);
    for (size_t f = 0; f < spec.n_frames; ++f)
      for (size_t b = bin_lo; b <= bin_hi; ++b)
        proj.values[b - bin_lo] += spec.at(f, b) * spec.at(f, b);
  }
  return proj;
}

PgmImage spectrogram_to_pgm(const Spectrogram& spec, size_t frame_lo,
                            size_t frame_hi, size_t bin_lo, size_t bin_hi) {
  if (frame_hi >= spec.n_frames || bin_hi >= spec.n_bins ||
      frame_lo > frame_hi || bin_lo > bin_hi)
    throw ArgumentError("clip range outside spectrogram");
  double mn = spec.at(frame_lo, bin_lo), mx = mn;
  for (size_t f = frame_lo; f <= frame_hi; ++f)
    for (size_t b = bin_lo; b <= bin_hi; ++b) {
      mn = std::min(mn, spec.at(f, b));
      mx = std::max(mx, spec.at(f, b));
    }
  PgmImage img;
  img.rows = bin_hi - bin_lo + 1;
  img.cols = frame_hi - frame_lo + 1;
  img.pixels.assign(img.rows * img.cols, 0);
  double span = mx - mn;
  for (size_t r = 0; r < img.rows; ++r) {
    size_t b = bin_hi - r;  // row 0 = highest bin
    for (size_t c = 0; c < img.cols; ++c) {
      double v = span > 0.0 ? (spec.at(frame_lo + c, b) - mn) / span : 0.0;
      img.pixels[r * img.cols + c] =
          static_cast<uint8_t>(std::lround(255.0 * v));
    }
  }
  return img;
}

PgmImage spectrogram_to_pgm(const Spectrogram& spec) {
  return spectrogram_to_pgm(spec, 0, spec.n_frames - 1, 0, spec.n_bins - 1);
}

}  // namespace adamine
