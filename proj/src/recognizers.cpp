#include "adamine/recognizers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "adamine/errors.hpp"
#include "adamine/pgm.hpp"
#include "adamine/segmentation.hpp"

namespace adamine {

CorrelationMap correlation_map(const Spectrogram& spec, const Template& tmpl) {
  if (tmpl.patch.empty() || tmpl.n_frames == 0 || tmpl.n_bins == 0)
    throw ArgumentError("empty template");
  if (tmpl.n_frames > spec.n_frames || tmpl.n_bins > spec.n_bins)
    throw ArgumentError("template larger than spectrogram");

  const size_t tn = tmpl.n_frames * tmpl.n_bins;
  double tmean = 0.0;
  for (double v : tmpl.patch) tmean += v;
  tmean /= static_cast<double>(tn);
  std::vector<double> tzero(tn);
  double tnorm2 = 0.0;
  for (size_t i = 0; i < tn; ++i) {
    tzero[i] = tmpl.patch[i] - tmean;
    tnorm2 += tzero[i] * tzero[i];
  }
  const double eps = 1e-30;
  const bool degenerate_template = tnorm2 < eps;
  const double tnorm = std::sqrt(tnorm2);

  CorrelationMap map;
  map.n_frame_offsets = spec.n_frames - tmpl.n_frames + 1;
  map.n_bin_offsets = spec.n_bins - tmpl.n_bins + 1;
  map.ncc.assign(map.n_frame_offsets * map.n_bin_offsets, 0.0);
  if (degenerate_template) return map;

  for (size_t fo = 0; fo < map.n_frame_offsets; ++fo) {
    for (size_t bo = 0; bo < map.n_bin_offsets; ++bo) {
      double wsum = 0.0, wsum2 = 0.0, dot = 0.0;
      for (size_t f = 0; f < tmpl.n_frames; ++f) {
        const double* srow = spec.mag.data() + (fo + f) * spec.n_bins + bo;
        const double* trow = tzero.data() + f * tmpl.n_bins;
        for (size_t b = 0; b < tmpl.n_bins; ++b) {
          wsum += srow[b];
          wsum2 += srow[b] * srow[b];
          dot += srow[b] * trow[b];
        }
      }
      double wvar = wsum2 - wsum * wsum / static_cast<double>(tn);
      if (wvar < eps) continue;  // constant window: leave 0
      map.ncc[fo * map.n_bin_offsets + bo] = dot / (tnorm * std::sqrt(wvar));
    }
  }
  return map;
}

std::vector<EventRecord> template_correlate(const Spectrogram& spec,
                                            const Template& tmpl,
                                            double threshold) {
  if (!(threshold >= -1.0 && threshold <= 1.0))
    throw ArgumentError("correlation threshold must be in [-1, 1]");
  CorrelationMap map = correlation_map(spec, tmpl);

  std::vector<EventRecord> events;
  const size_t NF = map.n_frame_offsets, NB = map.n_bin_offsets;
  for (size_t fo = 0; fo < NF; ++fo) {
    for (size_t bo = 0; bo < NB; ++bo) {
      double v = map.at(fo, bo);
      if (!(v > threshold)) continue;
      // 8-neighborhood local max; plateau goes to the row-major first cell
      bool is_max = true;
      for (int df = -1; df <= 1 && is_max; ++df) {
        for (int db = -1; db <= 1; ++db) {
          if (df == 0 && db == 0) continue;
          int64_t nf = static_cast<int64_t>(fo) + df;
          int64_t nb = static_cast<int64_t>(bo) + db;
          if (nf < 0 || nb < 0 || nf >= static_cast<int64_t>(NF) ||
              nb >= static_cast<int64_t>(NB))
            continue;
          double w = map.at(static_cast<size_t>(nf), static_cast<size_t>(nb));
          bool earlier = nf < static_cast<int64_t>(fo) ||
                         (nf == static_cast<int64_t>(fo) &&
                          nb < static_cast<int64_t>(bo));
          if (w > v || (w == v && earlier)) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      TfBbox box = bbox_from_hull(
          spec.geom, static_cast<uint32_t>(fo),
          static_cast<uint32_t>(fo + tmpl.n_frames - 1),
          static_cast<uint32_t>(bo), static_cast<uint32_t>(bo + tmpl.n_bins - 1));
      events.push_back(event_from_bbox(spec.geom, box, std::max(0.0, v)));
    }
  }
  return events;
}

HogDescriptor hog_features(const std::vector<double>& patch, size_t rows,
                           size_t cols, size_t cell_size, size_t n_bins,
                           bool normalize) {
  if (rows * cols != patch.size())
    throw ArgumentError("patch size does not match rows x cols");
  if (cell_size == 0 || n_bins == 0)
    throw ArgumentError("cell_size and n_bins must be positive");
  if (rows % cell_size != 0 || cols % cell_size != 0)
    throw ArgumentError("patch dims must be divisible by cell_size");
  if (rows < 3 || cols < 3)
    throw ArgumentError("patch too small for central differences");

  HogDescriptor d;
  d.cell_size = cell_size;
  d.n_bins = n_bins;
  d.n_cells_x = cols / cell_size;
  d.n_cells_y = rows / cell_size;
  d.vector.assign(d.n_cells_x * d.n_cells_y * n_bins, 0.0);

  const double bin_width = 180.0 / static_cast<double>(n_bins);
  for (size_t r = 1; r + 1 < rows; ++r) {
    for (size_t c = 1; c + 1 < cols; ++c) {
      double gx = 0.5 * (patch[r * cols + c + 1] - patch[r * cols + c - 1]);
      double gy = 0.5 * (patch[(r + 1) * cols + c] - patch[(r - 1) * cols + c]);
      double m = std::hypot(gx, gy);
      if (m == 0.0) continue;
      double deg = std::atan2(gy, gx) * 180.0 / 3.14159265358979323846;
      deg = std::fmod(deg + 360.0, 180.0);  // unsigned orientation [0, 180)
      double pos = deg / bin_width;
      size_t b0 = std::min(static_cast<size_t>(pos), n_bins - 1);
      double frac = pos - static_cast<double>(b0);
      size_t b1 = (b0 + 1) % n_bins;
      size_t cell = (r / cell_size) * d.n_cells_x + (c / cell_size);
      d.vector[cell * n_bins + b0] += (1.0 - frac) * m;
      d.vector[cell * n_bins + b1] += frac * m;
    }
  }

  if (normalize) {
    double norm2 = 0.0;
    for (double v : d.vector) norm2 += v * v;
    double denom = std::sqrt(norm2 + 1e-12);
    for (double& v : d.vector) v /= denom;
  }
  return d;
}

void save_template(const std::string& base_path, const Template& tmpl) {
  if (tmpl.patch.empty()) throw ArgumentError("empty template");
  double mn = tmpl.patch[0], mx = tmpl.patch[0];
  for (double v : tmpl.patch) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  PgmImage img;
  img.rows = tmpl.n_bins;  // row 0 = highest bin, matching clip export
  img.cols = tmpl.n_frames;
  img.pixels.assign(img.rows * img.cols, 0);
  double span = mx - mn;
  for (size_t r = 0; r < img.rows; ++r) {
    size_t b = tmpl.n_bins - 1 - r;
    for (size_t c = 0; c < img.cols; ++c) {
      double v = span > 0.0 ? (tmpl.at(c, b) - mn) / span : 0.0;
      img.pixels[r * img.cols + c] =
          static_cast<uint8_t>(std::lround(255.0 * v));
    }
  }
  write_pgm(base_path + ".pgm", img);
  std::ofstream meta(base_path + ".meta", std::ios::binary);
  if (!meta) throw IoError("cannot open for writing: " + base_path + ".meta");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", tmpl.band_f_lo_hz);
  meta << buf << '\t' << tmpl.n_frames << '\t' << tmpl.n_bins << '\n';
}

Template load_template(const std::string& base_path) {
  PgmImage img = read_pgm(base_path + ".pgm");
  std::ifstream meta(base_path + ".meta", std::ios::binary);
  if (!meta) throw IoError("cannot open: " + base_path + ".meta");
  double f_lo;
  size_t frames, bins;
  if (!(meta >> f_lo >> frames >> bins))
    throw FormatError("malformed template meta: " + base_path + ".meta");
  if (frames != img.cols || bins != img.rows)
    throw FormatError("template meta dims disagree with PGM: " + base_path);

  Template t;
  size_t slash = base_path.find_last_of("/\\");
  t.name = slash == std::string::npos ? base_path : base_path.substr(slash + 1);
  t.n_frames = frames;
  t.n_bins = bins;
  t.band_f_lo_hz = f_lo;
  t.patch.assign(frames * bins, 0.0);
  for (size_t r = 0; r < img.rows; ++r) {
    size_t b = bins - 1 - r;
    for (size_t c = 0; c < img.cols; ++c)
      t.patch[c * bins + b] = img.at(r, c) / 255.0;
  }
  return t;
}

}  // namespace adamine
