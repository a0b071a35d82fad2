#ifndef ADAMINE_ARCHIVE_HPP
#define ADAMINE_ARCHIVE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adamine/time.hpp"

namespace adamine {

struct ManifestEntry {
  std::string path;
  std::string channel_id;
  UtcMillis start_utc = 0;
  double sample_rate = 0.0;  // Hz
  uint64_t n_samples = 0;
  int bit_depth = 0;

  double duration_s() const {
    return static_cast<double>(n_samples) / sample_rate;
  }
  UtcMillis end_utc() const;
};

struct SkippedFile {
  std::string path;
  std::string reason;
};

// Inventory of one archive root. Entries are sorted by (channel_id,
// start_utc) and non-overlapping within a channel.
struct ArchiveManifest {
  std::vector<ManifestEntry> entries;
  std::vector<SkippedFile> skipped;
};

// One channel time slice plus context pads; the scheduler's unit of
// distribution. Spans are seconds relative to the channel epoch (the
// channel's first entry start).
struct WorkUnit {
  std::string channel_id;
  double core_t0 = 0.0;
  double core_t1 = 0.0;
  double pad_before = 0.0;
  double pad_after = 0.0;
  std::vector<size_t> source_entries;  // manifest indices read by this unit
};

// Contiguous normalized samples for one channel/time span.
struct SampleBlock {
  std::string channel_id;
  UtcMillis start_utc = 0;
  double sample_rate = 0.0;
  std::vector<double> samples;  // [-1, 1]
};

// Filename convention: <channel>_<YYYYMMDD>_<HHMMSS>.wav, UTC. The channel
// part may itself contain underscores; the last two fields are the stamp.
bool parse_archive_filename(const std::string& filename, std::string& channel,
                            UtcMillis& start_utc);
std::string make_archive_filename(const std::string& channel, UtcMillis t);

// Shell-style glob on a bare filename; supports '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& name);

// Walks root recursively. Every regular file lands in entries or skipped.
// Unreadable root is fatal (IoError); a bad file never is.
ArchiveManifest scan_archive(const std::string& root,
                             const std::string& name_pattern = "*.wav");

// Splits each channel timeline at gaps and sample-rate changes, then cuts
// units of unit_len seconds (last unit of a segment may be shorter). Pads
// are clamped so they never cross a segment edge.
std::vector<WorkUnit> partition(const ArchiveManifest& manifest,
                                double unit_len_s, double pad_s);

UtcMillis channel_epoch(const ArchiveManifest& manifest,
                        const std::string& channel_id);

// Core plus pads, concatenated across file boundaries and normalized by the
// full scale of each file's bit depth. A span touching a recording gap
// throws GapInData; a corrupt payload throws DecodeError.
SampleBlock read_samples(const WorkUnit& unit, const ArchiveManifest& manifest);

// Arbitrary span of one channel in channel-relative seconds; clamps to the
// containing contiguous segment. Used by clip export.
SampleBlock read_span(const ArchiveManifest& manifest,
                      const std::string& channel_id, double t0_s, double t1_s);

// Line-oriented text manifest, header "#adamine-manifest v1", one entry per
// line: channel, path, start_iso8601, rate_hz, n_samples, bit_depth
// (tab-separated). Skipped files follow as "#skipped" comment lines.
void write_manifest(const std::string& path, const ArchiveManifest& manifest);
std::string manifest_to_string(const ArchiveManifest& manifest);
ArchiveManifest read_manifest(const std::string& path);

}  // namespace adamine

#endif  // ADAMINE_ARCHIVE_HPP
