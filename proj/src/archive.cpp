#include "adamine/archive.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adamine/errors.hpp"
#include "adamine/wav.hpp"

namespace fs = std::filesystem;

namespace adamine {

UtcMillis ManifestEntry::end_utc() const {
  return start_utc +
         static_cast<UtcMillis>(std::llround(1000.0 * static_cast<double>(n_samples) / sample_rate));
}

bool parse_archive_filename(const std::string& filename, std::string& channel,
                            UtcMillis& start_utc) {
  const std::string ext = ".wav";
  if (filename.size() <= ext.size() ||
      filename.compare(filename.size() - ext.size(), ext.size(), ext) != 0)
    return false;
  std::string stem = filename.substr(0, filename.size() - ext.size());
  size_t p2 = stem.rfind('_');
  if (p2 == std::string::npos || p2 == 0) return false;
  size_t p1 = stem.rfind('_', p2 - 1);
  if (p1 == std::string::npos || p1 == 0) return false;
  std::string date = stem.substr(p1 + 1, p2 - p1 - 1);
  std::string time = stem.substr(p2 + 1);
  try {
    start_utc = parse_compact_stamp(date, time);
  } catch (const FormatError&) {
    return false;
  }
  channel = stem.substr(0, p1);
  return true;
}

std::string make_archive_filename(const std::string& channel, UtcMillis t) {
  std::string d, h;
  format_compact_stamp(t, d, h);
  return channel + "_" + d + "_" + h + ".wav";
}

bool glob_match(const std::string& pattern, const std::string& name) {
  size_t p = 0, n = 0, star_p = std::string::npos, star_n = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star_p = p++;
      star_n = n;
    } else if (star_p != std::string::npos) {
      p = star_p + 1;
      n = ++star_n;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

ArchiveManifest scan_archive(const std::string& root,
                             const std::string& name_pattern) {
  std::error_code ec;
  fs::file_status st = fs::status(root, ec);
  if (ec || !fs::is_directory(st))
    throw IoError("archive root is not a readable directory: " + root);

  std::vector<std::string> files;
  for (auto it = fs::recursive_directory_iterator(
           root, fs::directory_options::skip_permission_denied, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw IoError("cannot walk archive root: " + root);
    if (it->is_regular_file()) files.push_back(it->path().string());
  }
  std::sort(files.begin(), files.end());

  ArchiveManifest m;
  for (const std::string& path : files) {
    std::string name = fs::path(path).filename().string();
    std::string channel;
    UtcMillis start;
    if (!glob_match(name_pattern, name) ||
        !parse_archive_filename(name, channel, start)) {
      m.skipped.push_back({path, "name does not match pattern"});
      continue;
    }
    try {
      WavInfo info = wav_probe(path);
      m.entries.push_back({path, channel, start,
                           static_cast<double>(info.sample_rate),
                           info.n_samples, info.bit_depth});
    } catch (const Error& e) {
      m.skipped.push_back({path, e.what()});
    }
  }

  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return std::tie(a.channel_id, a.start_utc, a.path) <
                     std::tie(b.channel_id, b.start_utc, b.path);
            });

  // enforce the non-overlap invariant; the offender goes to skipped
  std::vector<ManifestEntry> kept;
  for (const ManifestEntry& e : m.entries) {
    if (!kept.empty() && kept.back().channel_id == e.channel_id &&
        e.start_utc < kept.back().end_utc() - 1) {
      m.skipped.push_back(
          {e.path, "overlaps an earlier entry of channel " + e.channel_id});
      continue;
    }
    kept.push_back(e);
  }
  m.entries = std::move(kept);
  std::sort(m.skipped.begin(), m.skipped.end(),
            [](const SkippedFile& a, const SkippedFile& b) {
              return std::tie(a.path, a.reason) < std::tie(b.path, b.reason);
            });
  return m;
}

namespace {

struct Segment {
  double t0 = 0.0;  // channel-relative seconds
  double t1 = 0.0;
  double rate = 0.0;
  size_t first_entry = 0;  // manifest index range [first, last]
  size_t last_entry = 0;
};

// contiguous runs of one channel's entries (same rate, no gap)
std::vector<Segment> channel_segments(const ArchiveManifest& m,
                                      size_t begin_idx, size_t end_idx,
                                      UtcMillis epoch) {
  std::vector<Segment> segs;
  for (size_t i = begin_idx; i < end_idx; ++i) {
    const ManifestEntry& e = m.entries[i];
    double rel0 = static_cast<double>(e.start_utc - epoch) / 1000.0;
    double rel1 = static_cast<double>(e.end_utc() - epoch) / 1000.0;
    bool fresh = segs.empty();
    if (!fresh) {
      const ManifestEntry& prev = m.entries[i - 1];
      UtcMillis delta = e.start_utc - prev.end_utc();
      if (delta < -1)
        throw ValidationError("manifest entries overlap: " + e.path);
      fresh = delta > 1 || e.sample_rate != prev.sample_rate;
    }
    if (fresh)
      segs.push_back({rel0, rel1, e.sample_rate, i, i});
    else {
      segs.back().t1 = rel1;
      segs.back().last_entry = i;
    }
  }
  return segs;
}

}  // namespace

UtcMillis channel_epoch(const ArchiveManifest& manifest,
                        const std::string& channel_id) {
  for (const ManifestEntry& e : manifest.entries)
    if (e.channel_id == channel_id) return e.start_utc;
  throw ArgumentError("channel not in manifest: " + channel_id);
}

std::vector<WorkUnit> partition(const ArchiveManifest& manifest,
                                double unit_len_s, double pad_s) {
  if (!(unit_len_s > 0.0))
    throw ArgumentError("unit_len must be positive");
  if (!(pad_s >= 0.0 && pad_s < unit_len_s))
    throw ArgumentError("pad must satisfy 0 <= pad < unit_len");

  std::vector<WorkUnit> units;
  size_t i = 0;
  while (i < manifest.entries.size()) {
    const std::string& channel = manifest.entries[i].channel_id;
    size_t j = i;
    while (j < manifest.entries.size() &&
           manifest.entries[j].channel_id == channel)
      ++j;
    UtcMillis epoch = manifest.entries[i].start_utc;
    for (const Segment& seg : channel_segments(manifest, i, j, epoch)) {
      double dur = seg.t1 - seg.t0;
      size_t n = static_cast<size_t>(std::ceil(dur / unit_len_s - 1e-9));
      if (n == 0) n = 1;
      for (size_t k = 0; k < n; ++k) {
        WorkUnit u;
        u.channel_id = channel;
        u.core_t0 = seg.t0 + static_cast<double>(k) * unit_len_s;
        u.core_t1 = std::min(seg.t0 + static_cast<double>(k + 1) * unit_len_s,
                             seg.t1);
        u.pad_before = std::min(pad_s, u.core_t0 - seg.t0);
        u.pad_after = std::min(pad_s, seg.t1 - u.core_t1);
        double span_lo = u.core_t0 - u.pad_before;
        double span_hi = u.core_t1 + u.pad_after;
        for (size_t e = seg.first_entry; e <= seg.last_entry; ++e) {
          const ManifestEntry& me = manifest.entries[e];
          double rel0 = static_cast<double>(me.start_utc - epoch) / 1000.0;
          double rel1 = static_cast<double>(me.end_utc() - epoch) / 1000.0;
          if (rel1 > span_lo + 1e-9 && rel0 < span_hi - 1e-9)
            u.source_entries.push_back(e);
        }
        units.push_back(std::move(u));
      }
    }
    i = j;
  }
  return units;
}

SampleBlock read_samples(const WorkUnit& unit,
                         const ArchiveManifest& manifest) {
  UtcMillis epoch = channel_epoch(manifest, unit.channel_id);
  double t_start = unit.core_t0 - unit.pad_before;
  double t_end = unit.core_t1 + unit.pad_after;
  if (!(t_end > t_start)) throw ArgumentError("empty work unit span");

  // entries of this channel overlapping the padded span, in time order
  std::vector<const ManifestEntry*> hits;
  for (const ManifestEntry& e : manifest.entries) {
    if (e.channel_id != unit.channel_id) continue;
    double rel0 = static_cast<double>(e.start_utc - epoch) / 1000.0;
    double rel1 = static_cast<double>(e.end_utc() - epoch) / 1000.0;
    if (rel1 > t_start + 1e-9 && rel0 < t_end - 1e-9) hits.push_back(&e);
  }
  if (hits.empty())
    throw GapInData("no recorded data in [" + std::to_string(t_start) + ", " +
                        std::to_string(t_end) + ") s of channel " +
                        unit.channel_id,
                    t_start, t_end);

  double rate = hits.front()->sample_rate;
  for (const ManifestEntry* e : hits)
    if (e->sample_rate != rate)
      throw ValidationError("work unit straddles a sample-rate change in " +
                            unit.channel_id);

  int64_t cur = std::llround(t_start * rate);   // channel sample grid
  int64_t last = std::llround(t_end * rate);
  SampleBlock block;
  block.channel_id = unit.channel_id;
  block.start_utc = epoch + static_cast<UtcMillis>(std::llround(t_start * 1000.0));
  block.sample_rate = rate;
  block.samples.reserve(static_cast<size_t>(last - cur));

  for (const ManifestEntry* e : hits) {
    double rel0 = static_cast<double>(e->start_utc - epoch) / 1000.0;
    int64_t e0 = std::llround(rel0 * rate);
    int64_t e1 = e0 + static_cast<int64_t>(e->n_samples);
    if (cur < e0) {
      double g0 = static_cast<double>(cur) / rate;
      double g1 = static_cast<double>(e0) / rate;
      throw GapInData("recording gap [" + std::to_string(g0) + ", " +
                          std::to_string(g1) + ") s inside requested span of " +
                          unit.channel_id,
                      g0, g1);
    }
    int64_t take = std::min(last, e1) - cur;
    if (take <= 0) continue;
    WavInfo info = wav_probe(e->path);
    if (info.n_samples != e->n_samples ||
        static_cast<double>(info.sample_rate) != e->sample_rate)
      throw DecodeError("file changed since scan: " + e->path);
    std::vector<double> part =
        wav_read(e->path, info, static_cast<uint64_t>(cur - e0),
                 static_cast<uint64_t>(take));
    block.samples.insert(block.samples.end(), part.begin(), part.end());
    cur += take;
  }
  if (cur < last) {
    double g0 = static_cast<double>(cur) / rate;
    throw GapInData("requested span extends past recorded data of " +
                        unit.channel_id + " at " + std::to_string(g0) + " s",
                    g0, t_end);
  }
  return block;
}

SampleBlock read_span(const ArchiveManifest& manifest,
                      const std::string& channel_id, double t0_s,
                      double t1_s) {
  UtcMillis epoch = channel_epoch(manifest, channel_id);
  size_t i = 0;
  while (i < manifest.entries.size() &&
         manifest.entries[i].channel_id != channel_id)
    ++i;
  size_t j = i;
  while (j < manifest.entries.size() &&
         manifest.entries[j].channel_id == channel_id)
    ++j;
  // pick the segment with the largest overlap of [t0, t1]
  double best_overlap = -1.0;
  Segment best;
  for (const Segment& seg : channel_segments(manifest, i, j, epoch)) {
    double lo = std::max(seg.t0, t0_s), hi = std::min(seg.t1, t1_s);
    if (hi - lo > best_overlap) {
      best_overlap = hi - lo;
      best = seg;
    }
  }
  if (best_overlap <= 0.0)
    throw GapInData("no recorded data overlaps the requested span", t0_s,
                    t1_s);
  WorkUnit u;
  u.channel_id = channel_id;
  u.core_t0 = std::max(t0_s, best.t0);
  u.core_t1 = std::min(t1_s, best.t1);
  return read_samples(u, manifest);
}

std::string manifest_to_string(const ArchiveManifest& manifest) {
  std::ostringstream out;
  out << "#adamine-manifest v1\n";
  char buf[64];
  for (const ManifestEntry& e : manifest.entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.sample_rate);
    out << e.channel_id << '\t' << e.path << '\t'
        << format_iso8601(e.start_utc) << '\t' << buf << '\t' << e.n_samples
        << '\t' << e.bit_depth << '\n';
  }
  for (const SkippedFile& s : manifest.skipped)
    out << "#skipped\t" << s.path << '\t' << s.reason << '\n';
  return out.str();
}

void write_manifest(const std::string& path, const ArchiveManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << manifest_to_string(manifest);
  if (!out) throw IoError("short write: " + path);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  for (;;) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

}  // namespace

ArchiveManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#adamine-manifest v1", 0) != 0)
    throw FormatError("missing '#adamine-manifest v1' header: " + path);
  ArchiveManifest m;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields[0] == "#skipped") {
      if (fields.size() != 3)
        throw FormatError(path + ":" + std::to_string(row) +
                          ": malformed #skipped line");
      m.skipped.push_back({fields[1], fields[2]});
      continue;
    }
    if (line[0] == '#') continue;
    if (fields.size() != 6)
      throw FormatError(path + ":" + std::to_string(row) +
                        ": expected 6 tab-separated fields");
    ManifestEntry e;
    e.channel_id = fields[0];
    e.path = fields[1];
    try {
      e.start_utc = parse_iso8601(fields[2]);
      e.sample_rate = std::stod(fields[3]);
      e.n_samples = std::stoull(fields[4]);
      e.bit_depth = std::stoi(fields[5]);
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(row) + ": bad field value");
    }
    if (e.sample_rate <= 0.0 || e.n_samples == 0)
      throw FormatError(path + ":" + std::to_string(row) +
                        ": rate and n_samples must be positive");
    m.entries.push_back(std::move(e));
  }
  return m;
}

}  // namespace adamine
