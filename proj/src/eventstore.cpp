#include "adamine/eventstore.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adamine/errors.hpp"
#include "adamine/rng.hpp"

namespace adamine {

const char* const kFlatHeader =
    "event_id\trun_id\tchannel\tbegin_iso8601\tend_iso8601\tlow_hz\thigh_hz\t"
    "score\tdetector\ttag";

StoreBackend backend_from_string(const std::string& s) {
  if (s == "flat") return StoreBackend::kFlat;
  if (s == "array") return StoreBackend::kArray;
  if (s == "xml") return StoreBackend::kXml;
  if (s == "indexed") return StoreBackend::kIndexed;
  throw ArgumentError("unknown store backend: '" + s + "'");
}

std::string to_string(StoreBackend b) {
  switch (b) {
    case StoreBackend::kFlat: return "flat";
    case StoreBackend::kArray: return "array";
    case StoreBackend::kXml: return "xml";
    case StoreBackend::kIndexed: return "indexed";
  }
  return "?";
}

bool QueryPredicate::matches(const EventRecord& e) const {
  if (t_min && e.begin_time < *t_min) return false;
  if (t_max && e.begin_time >= *t_max) return false;
  if (min_score && e.score < *min_score) return false;
  if (tag_equals && e.tag != *tag_equals) return false;
  if (detector_equals && e.detector_id != *detector_equals) return false;
  return true;
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

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

// ---------------------------------------------------------------- flat ----

void write_flat(const std::string& path,
                const std::vector<EventRecord>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << kFlatHeader << '\n';
  for (const EventRecord& e : events) {
    out << e.event_id << '\t' << e.run_id << '\t' << e.channel_id << '\t'
        << format_iso8601(e.begin_time) << '\t' << format_iso8601(e.end_time)
        << '\t' << fmt6(e.f_lo_hz) << '\t' << fmt6(e.f_hi_hz) << '\t'
        << fmt6(e.score) << '\t' << e.detector_id << '\t' << e.tag << '\n';
  }
  if (!out) throw IoError("short write: " + path);
}

std::vector<EventRecord> load_flat(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kFlatHeader)
    throw FormatError("flat store header mismatch: " + path);
  std::vector<EventRecord> events;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 10)
      throw FormatError("flat store row " + std::to_string(row) +
                        " has " + std::to_string(f.size()) + " fields: " + path);
    EventRecord e;
    e.event_id = f[0];
    e.run_id = f[1];
    e.channel_id = f[2];
    try {
      e.begin_time = parse_iso8601(f[3]);
      e.end_time = parse_iso8601(f[4]);
      e.f_lo_hz = std::stod(f[5]);
      e.f_hi_hz = std::stod(f[6]);
      e.score = std::stod(f[7]);
    } catch (const std::exception&) {
      throw FormatError("flat store row " + std::to_string(row) +
                        " has a bad field: " + path);
    }
    e.detector_id = f[8];
    e.tag = f[9];
    events.push_back(std::move(e));
  }
  return events;
}

// --------------------------------------------------------------- array ----

constexpr char kArrayMagic[8] = {'A', 'D', 'M', 'A', 'R', 'R', 'v', '1'};

void put_u64(std::string& buf, uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

void put_i64(std::string& buf, int64_t v) {
  put_u64(buf, static_cast<uint64_t>(v));
}

void put_f64(std::string& buf, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(buf, bits);
}

void put_str(std::string& buf, const std::string& s) {
  put_u64(buf, s.size());
  buf.append(s);
}

struct BinReader {
  const char* p;
  const char* end;
  const std::string& path;

  void need(size_t n) const {
    if (static_cast<size_t>(end - p) < n)
      throw FormatError("truncated binary store: " + path);
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    p += 8;
    return v;
  }
  int64_t i64() { return static_cast<int64_t>(u64()); }
  double f64() {
    uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    uint64_t n = u64();
    need(n);
    std::string s(p, p + n);
    p += n;
    return s;
  }
};

void encode_record(std::string& buf, const EventRecord& e) {
  put_str(buf, e.event_id);
  put_str(buf, e.run_id);
  put_str(buf, e.channel_id);
  put_i64(buf, e.begin_time);
  put_i64(buf, e.end_time);
  put_f64(buf, e.f_lo_hz);
  put_f64(buf, e.f_hi_hz);
  put_f64(buf, e.score);
  put_str(buf, e.detector_id);
  put_str(buf, e.tag);
}

EventRecord decode_record(BinReader& r) {
  EventRecord e;
  e.event_id = r.str();
  e.run_id = r.str();
  e.channel_id = r.str();
  e.begin_time = r.i64();
  e.end_time = r.i64();
  e.f_lo_hz = r.f64();
  e.f_hi_hz = r.f64();
  e.score = r.f64();
  e.detector_id = r.str();
  e.tag = r.str();
  return e;
}

void write_array(const std::string& path,
                 const std::vector<EventRecord>& events) {
  std::string buf;
  buf.append(kArrayMagic, sizeof(kArrayMagic));
  put_u64(buf, events.size());
  for (const EventRecord& e : events) encode_record(buf, e);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write: " + path);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<EventRecord> load_array(const std::string& path) {
  std::string data = slurp(path);
  if (data.size() < sizeof(kArrayMagic) + 8 ||
      std::memcmp(data.data(), kArrayMagic, sizeof(kArrayMagic)) != 0)
    throw FormatError("not an array store: " + path);
  BinReader r{data.data() + sizeof(kArrayMagic), data.data() + data.size(),
              path};
  uint64_t n = r.u64();
  std::vector<EventRecord> events;
  events.reserve(n);
  for (uint64_t i = 0; i < n; ++i) events.push_back(decode_record(r));
  return events;
}

// ----------------------------------------------------------------- xml ----

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(const std::string& s, const std::string& path) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    size_t semi = s.find(';', i);
    if (semi == std::string::npos)
      throw FormatError("bad entity in xml store: " + path);
    std::string ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else throw FormatError("unknown entity '&" + ent + ";' in: " + path);
    i = semi;
  }
  return out;
}

void write_xml(const std::string& path,
               const std::vector<EventRecord>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<events>\n";
  for (const EventRecord& e : events) {
    out << "<event id=\"" << xml_escape(e.event_id) << "\">"
        << "<run>" << xml_escape(e.run_id) << "</run>"
        << "<channel>" << xml_escape(e.channel_id) << "</channel>"
        << "<begin>" << format_iso8601(e.begin_time) << "</begin>"
        << "<end>" << format_iso8601(e.end_time) << "</end>"
        << "<low_hz>" << fmt6(e.f_lo_hz) << "</low_hz>"
        << "<high_hz>" << fmt6(e.f_hi_hz) << "</high_hz>"
        << "<score>" << fmt6(e.score) << "</score>"
        << "<detector>" << xml_escape(e.detector_id) << "</detector>"
        << "<tag>" << xml_escape(e.tag) << "</tag>"
        << "</event>\n";
  }
  out << "</events>\n";
  if (!out) throw IoError("short write: " + path);
}

// minimal parser for the subset this store emits
struct XmlCursor {
  const std::string& text;
  const std::string& path;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool try_consume(const std::string& token) {
    skip_ws();
    if (text.compare(pos, token.size(), token) == 0) {
      pos += token.size();
      return true;
    }
    return false;
  }
  void consume(const std::string& token) {
    if (!try_consume(token))
      throw FormatError("xml store: expected '" + token + "' near byte " +
                        std::to_string(pos) + ": " + path);
  }
  std::string until(char stop) {
    size_t at = text.find(stop, pos);
    if (at == std::string::npos)
      throw FormatError("xml store: unterminated value: " + path);
    std::string s = text.substr(pos, at - pos);
    pos = at;
    return s;
  }
};

std::vector<EventRecord> load_xml(const std::string& path) {
  std::string data = slurp(path);
  XmlCursor cur{data, path};
  if (cur.try_consume("<?xml")) {
    cur.until('>');
    cur.consume(">");
  }
  cur.consume("<events>");
  std::vector<EventRecord> events;
  auto child = [&](const char* tag) {
    cur.consume(std::string("<") + tag + ">");
    std::string raw = cur.until('<');
    cur.consume(std::string("</") + tag + ">");
    return xml_unescape(raw, path);
  };
  for (;;) {
    if (cur.try_consume("</events>")) break;
    cur.consume("<event id=\"");
    EventRecord e;
    e.event_id = xml_unescape(cur.until('"'), path);
    cur.consume("\">");
    e.run_id = child("run");
    e.channel_id = child("channel");
    try {
      e.begin_time = parse_iso8601(child("begin"));
      e.end_time = parse_iso8601(child("end"));
      e.f_lo_hz = std::stod(child("low_hz"));
      e.f_hi_hz = std::stod(child("high_hz"));
      e.score = std::stod(child("score"));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError("xml store: bad numeric field: " + path);
    }
    e.detector_id = child("detector");
    e.tag = child("tag");
    cur.consume("</event>");
    events.push_back(std::move(e));
  }
  return events;
}

// ------------------------------------------------------------- indexed ----

constexpr char kIndexMagic[8] = {'A', 'D', 'M', 'I', 'D', 'X', 'v', '1'};
constexpr uint64_t kIndexStride = 64;  // records per sparse-index entry

std::atomic<uint64_t> g_indexed_reads{0};

// read-only mapping so a query touches only the pages it needs
class MappedFile {
public:
  explicit MappedFile(const std::string& path) {
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw IoError("cannot open: " + path);
    struct stat st {};
    if (::fstat(fd, &st) != 0 || st.st_size < 0) {
      ::close(fd);
      throw IoError("cannot stat: " + path);
    }
    size_ = static_cast<size_t>(st.st_size);
    if (size_ > 0) {
      void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
      if (p == MAP_FAILED) {
        ::close(fd);
        throw IoError("cannot mmap: " + path);
      }
      base_ = static_cast<const char*>(p);
    }
    ::close(fd);
  }
  ~MappedFile() {
    if (base_) ::munmap(const_cast<char*>(base_), size_);
  }
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;
  MappedFile(MappedFile&& other) noexcept
      : base_(other.base_), size_(other.size_) {
    other.base_ = nullptr;
    other.size_ = 0;
  }

  const char* data() const { return base_; }
  size_t size() const { return size_; }

private:
  const char* base_ = nullptr;
  size_t size_ = 0;
};

// Index sections are fixed 16-byte entries, binary-searched in place; a
// query never materializes an index it does not use.
struct IndexedLayout {
  MappedFile map;
  std::string path;
  uint64_t n_records = 0;
  uint64_t n_time_entries = 0;
  uint64_t records_begin = 0;
  uint64_t records_end = 0;   // == start of the time index
  uint64_t score_index_at = 0;

  explicit IndexedLayout(const std::string& p) : map(p), path(p) {}

  const char* data() const { return map.data(); }
  size_t size() const { return map.size(); }

  std::pair<int64_t, uint64_t> time_entry(uint64_t i) const {
    BinReader r{data() + records_end + i * 16, data() + size(), path};
    int64_t t = r.i64();
    return {t, r.u64()};
  }
  std::pair<double, uint64_t> score_entry(uint64_t i) const {
    BinReader r{data() + score_index_at + i * 16, data() + size(), path};
    double s = r.f64();
    return {s, r.u64()};
  }
};

void write_indexed(const std::string& path,
                   std::vector<EventRecord> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return std::tie(a.begin_time, a.event_id) <
                            std::tie(b.begin_time, b.event_id);
                   });
  std::string records;
  std::vector<uint64_t> offsets;
  offsets.reserve(events.size());
  for (const EventRecord& e : events) {
    offsets.push_back(records.size());
    encode_record(records, e);
  }

  std::string time_index, score_index;
  uint64_t n_time = 0;
  for (size_t i = 0; i < events.size(); i += kIndexStride) {
    put_i64(time_index, events[i].begin_time);
    put_u64(time_index, offsets[i]);
    ++n_time;
  }
  std::vector<size_t> by_score(events.size());
  for (size_t i = 0; i < by_score.size(); ++i) by_score[i] = i;
  std::stable_sort(by_score.begin(), by_score.end(), [&](size_t a, size_t b) {
    return events[a].score < events[b].score;
  });
  for (size_t i : by_score) {
    put_f64(score_index, events[i].score);
    put_u64(score_index, offsets[i]);
  }

  std::string head;
  head.append(kIndexMagic, sizeof(kIndexMagic));
  put_u64(head, events.size());
  put_u64(head, n_time);
  uint64_t records_begin = head.size() + 8;
  put_u64(head, records_begin);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(records.data(), static_cast<std::streamsize>(records.size()));
  out.write(time_index.data(), static_cast<std::streamsize>(time_index.size()));
  out.write(score_index.data(), static_cast<std::streamsize>(score_index.size()));
  if (!out) throw IoError("short write: " + path);
}

IndexedLayout open_indexed(const std::string& path) {
  IndexedLayout lay(path);
  if (lay.size() < sizeof(kIndexMagic) + 24 ||
      std::memcmp(lay.data(), kIndexMagic, sizeof(kIndexMagic)) != 0)
    throw FormatError("not an indexed store: " + path);
  BinReader r{lay.data() + sizeof(kIndexMagic), lay.data() + lay.size(), path};
  lay.n_records = r.u64();
  lay.n_time_entries = r.u64();
  lay.records_begin = r.u64();

  // index sections sit after the records; locate them by their fixed sizes
  if (lay.n_records > lay.size() / 16 || lay.n_time_entries > lay.size() / 16)
    throw FormatError("implausible record counts in indexed store: " + path);
  uint64_t time_bytes = lay.n_time_entries * 16;
  uint64_t score_bytes = lay.n_records * 16;
  if (lay.size() < time_bytes + score_bytes + lay.records_begin ||
      lay.records_begin < sizeof(kIndexMagic) + 24)
    throw FormatError("truncated indexed store: " + path);
  lay.score_index_at = lay.size() - score_bytes;
  lay.records_end = lay.score_index_at - time_bytes;
  return lay;
}

EventRecord read_record_at(const IndexedLayout& lay, uint64_t offset,
                           const std::string& path) {
  BinReader r{lay.data() + lay.records_begin + offset,
              lay.data() + lay.size(), path};
  g_indexed_reads.fetch_add(1, std::memory_order_relaxed);
  return decode_record(r);
}

std::vector<EventRecord> query_indexed(const std::string& path,
                                       const QueryPredicate& q) {
  IndexedLayout lay = open_indexed(path);
  std::vector<EventRecord> hits;

  if (q.t_min || q.t_max) {
    // records are begin-time sorted: jump via the sparse index, scan to t_max
    uint64_t start_off = 0;
    if (q.t_min && lay.n_time_entries > 0) {
      uint64_t lo = 0, hi = lay.n_time_entries;
      while (lo + 1 < hi) {  // greatest entry with begin <= t_min
        uint64_t mid = (lo + hi) / 2;
        if (lay.time_entry(mid).first <= *q.t_min)
          lo = mid;
        else
          hi = mid;
      }
      start_off = lay.time_entry(lo).second;
    }
    BinReader r{lay.data() + lay.records_begin + start_off,
                lay.data() + lay.records_end, path};
    while (r.p < lay.data() + lay.records_end) {
      g_indexed_reads.fetch_add(1, std::memory_order_relaxed);
      EventRecord e = decode_record(r);
      if (q.t_max && e.begin_time >= *q.t_max) break;
      if (q.matches(e)) hits.push_back(std::move(e));
    }
  } else if (q.min_score) {
    // score index is ascending: binary search the cutoff, read the suffix
    uint64_t lo = 0, hi = lay.n_records;
    while (lo < hi) {
      uint64_t mid = (lo + hi) / 2;
      if (lay.score_entry(mid).first < *q.min_score)
        lo = mid + 1;
      else
        hi = mid;
    }
    for (uint64_t i = lo; i < lay.n_records; ++i) {
      EventRecord e = read_record_at(lay, lay.score_entry(i).second, path);
      if (q.matches(e)) hits.push_back(std::move(e));
    }
    std::sort(hits.begin(), hits.end(), canonical_event_less);
  } else {
    BinReader r{lay.data() + lay.records_begin,
                lay.data() + lay.size(), path};
    for (uint64_t i = 0; i < lay.n_records; ++i) {
      g_indexed_reads.fetch_add(1, std::memory_order_relaxed);
      EventRecord e = decode_record(r);
      if (q.matches(e)) hits.push_back(std::move(e));
    }
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.begin_time < b.begin_time;
                   });
  return hits;
}

std::vector<EventRecord> load_indexed(const std::string& path) {
  IndexedLayout lay = open_indexed(path);
  BinReader r{lay.data() + lay.records_begin,
              lay.data() + lay.size(), path};
  std::vector<EventRecord> events;
  events.reserve(lay.n_records);
  for (uint64_t i = 0; i < lay.n_records; ++i) {
    g_indexed_reads.fetch_add(1, std::memory_order_relaxed);
    events.push_back(decode_record(r));
  }
  return events;
}

}  // namespace

uint64_t indexed_records_read() {
  return g_indexed_reads.load(std::memory_order_relaxed);
}

void reset_indexed_records_read() {
  g_indexed_reads.store(0, std::memory_order_relaxed);
}

size_t store_write(StoreBackend backend, const std::string& path,
                   const std::vector<EventRecord>& events) {
  validate_events(events);
  switch (backend) {
    case StoreBackend::kFlat: write_flat(path, events); break;
    case StoreBackend::kArray: write_array(path, events); break;
    case StoreBackend::kXml: write_xml(path, events); break;
    case StoreBackend::kIndexed: write_indexed(path, events); break;
  }
  return events.size();
}

std::vector<EventRecord> store_load(StoreBackend backend,
                                    const std::string& path) {
  switch (backend) {
    case StoreBackend::kFlat: return load_flat(path);
    case StoreBackend::kArray: return load_array(path);
    case StoreBackend::kXml: return load_xml(path);
    case StoreBackend::kIndexed: return load_indexed(path);
  }
  throw ArgumentError("bad backend");
}

std::vector<EventRecord> store_query(StoreBackend backend,
                                     const std::string& path,
                                     const QueryPredicate& predicate) {
  if (backend == StoreBackend::kIndexed)
    return query_indexed(path, predicate);
  std::vector<EventRecord> all = store_load(backend, path);
  std::vector<EventRecord> hits;
  for (EventRecord& e : all)
    if (predicate.matches(e)) hits.push_back(std::move(e));
  std::stable_sort(hits.begin(), hits.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.begin_time < b.begin_time;
                   });
  return hits;
}

std::vector<EventRecord> generate_dummy_events(size_t n, uint64_t seed) {
  static const char* kTags[] = {"NARW-upcall", "minke-pt", "fin-pulse",
                                "noise", "airgun"};
  static const char* kDetectors[] = {"upcall_cra", "minke_type2",
                                     "fin_template", "hog_ann"};
  static const char* kChannels[] = {"A", "B", "C", "D"};
  Rng rng(seed);
  std::vector<EventRecord> events;
  events.reserve(n);
  const UtcMillis base = utc_from_ymd_hms(2006, 1, 1, 0, 0, 0);
  for (size_t i = 0; i < n; ++i) {
    EventRecord e;
    e.event_id = "bench:" + std::to_string(i);
    e.run_id = "bench";
    e.channel_id = kChannels[rng.uniform_int(4)];
    e.begin_time =
        base + static_cast<UtcMillis>(rng.uniform_int(365ull * 86400000ull));
    e.end_time = e.begin_time + 100 + static_cast<UtcMillis>(rng.uniform_int(4900));
    e.f_lo_hz = std::floor(rng.uniform(10.0, 900.0) * 1e6) / 1e6;
    e.f_hi_hz =
        std::floor((e.f_lo_hz + rng.uniform(5.0, 100.0)) * 1e6) / 1e6;
    e.score = std::floor(rng.uniform() * 1e6) / 1e6;
    e.detector_id = kDetectors[rng.uniform_int(4)];
    e.tag = kTags[rng.uniform_int(5)];
    events.push_back(std::move(e));
  }
  return events;
}

namespace {

template <typename F>
double median_of_5(F&& f) {
  std::vector<double> times;
  for (int i = 0; i < 5; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[2];
}

}  // namespace

BenchReport store_benchmark(size_t n_events, uint64_t seed,
                            const std::string& work_dir) {
  if (n_events < 1000)
    throw ArgumentError("benchmark needs at least 1000 events");
  std::filesystem::create_directories(work_dir);
  std::vector<EventRecord> events = generate_dummy_events(n_events, seed);

  // fixed 3-predicate suite over the dummy distribution
  const UtcMillis base = utc_from_ymd_hms(2006, 1, 1, 0, 0, 0);
  QueryPredicate q_time;  // ~1% of the year
  q_time.t_min = base + 30ll * 86400000ll;
  q_time.t_max = base + 33ll * 86400000ll + 15ll * 3600000ll;
  QueryPredicate q_score;
  q_score.min_score = 0.9;
  QueryPredicate q_combo;
  q_combo.t_min = base + 100ll * 86400000ll;
  q_combo.t_max = base + 130ll * 86400000ll;
  q_combo.min_score = 0.5;
  q_combo.detector_equals = "minke_type2";

  BenchReport report;
  report.n_events = n_events;
  report.seed = seed;

  const StoreBackend order[] = {StoreBackend::kFlat, StoreBackend::kArray,
                                StoreBackend::kXml, StoreBackend::kIndexed};
  for (StoreBackend b : order) {
    std::string path = work_dir + "/bench." + to_string(b);
    store_write(b, path, events);
    BackendBench bench;
    bench.backend = b;
    bench.load_s = median_of_5([&] { store_load(b, path); });
    bench.query_s = median_of_5([&] {
      store_query(b, path, q_time);
      store_query(b, path, q_score);
      store_query(b, path, q_combo);
    });
    bench.load_10x_s = 10.0 * bench.load_s;
    bench.query_10x_s = 10.0 * bench.query_s;
    report.backends.push_back(bench);
  }

  std::vector<BackendBench> by_query = report.backends;
  std::sort(by_query.begin(), by_query.end(),
            [](const BackendBench& a, const BackendBench& b) {
              return a.query_s < b.query_s;
            });
  for (size_t i = 0; i < by_query.size(); ++i)
    report.query_ordering += (i ? " < " : "") + to_string(by_query[i].backend);
  report.ordering_matches_expected =
      report.query_ordering == "indexed < array < flat < xml";
  return report;
}

void emit_bench_tsv(std::ostream& out, const BenchReport& r,
                    const std::vector<std::string>& meta) {
  for (const std::string& line : meta) out << "# " << line << '\n';
  out << "# n_events\t" << r.n_events << "\n# seed\t" << r.seed << '\n';
  out << "backend\tload_s\tquery_s\tload_10x_s\tquery_10x_s\n";
  char buf[160];
  for (const BackendBench& b : r.backends) {
    std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.6f\t%.6f\t%.6f",
                  to_string(b.backend).c_str(), b.load_s, b.query_s,
                  b.load_10x_s, b.query_10x_s);
    out << buf << '\n';
  }
  out << "# query ordering\t" << r.query_ordering << '\n';
  out << "# matches expected (indexed < array < flat < xml)\t"
      << (r.ordering_matches_expected ? "yes" : "no") << '\n';
}

}  // namespace adamine
