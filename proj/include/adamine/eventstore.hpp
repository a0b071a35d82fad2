#ifndef ADAMINE_EVENTSTORE_HPP
#define ADAMINE_EVENTSTORE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adamine/event.hpp"

namespace adamine {

// flat    tab-delimited text, bit-exact schema
// array   whole-store binary image, loaded fully then scanned
// xml     one element per event, one child per field
// indexed single-file store, records sorted by begin_time with a sparse
//         time index and a full score index
enum class StoreBackend { kFlat, kArray, kXml, kIndexed };

StoreBackend backend_from_string(const std::string& s);
std::string to_string(StoreBackend b);

// Conjunctive predicate; absent members do not constrain.
// Time range is half-open on begin_time: t_min <= begin < t_max.
struct QueryPredicate {
  std::optional<UtcMillis> t_min;
  std::optional<UtcMillis> t_max;
  std::optional<double> min_score;
  std::optional<std::string> tag_equals;
  std::optional<std::string> detector_equals;

  bool matches(const EventRecord& e) const;
};

// Validates every record (ValidationError names the offending row), then
// writes a durable store. Returns the number of events written.
size_t store_write(StoreBackend backend, const std::string& path,
                   const std::vector<EventRecord>& events);

// Full materialization in stored order.
std::vector<EventRecord> store_load(StoreBackend backend,
                                    const std::string& path);

// Exactly the events satisfying the predicate, sorted by begin_time.
std::vector<EventRecord> store_query(StoreBackend backend,
                                     const std::string& path,
                                     const QueryPredicate& predicate);

// Record-deserialization counter for the indexed backend, reset before a
// query to observe how much of the store a lookup touches.
uint64_t indexed_records_read();
void reset_indexed_records_read();

struct BackendBench {
  StoreBackend backend = StoreBackend::kFlat;
  double load_s = 0.0;
  double query_s = 0.0;        // fixed 3-predicate suite
  double load_10x_s = 0.0;     // 10 x measured, linear model
  double query_10x_s = 0.0;
};

struct BenchReport {
  size_t n_events = 0;
  uint64_t seed = 0;
  std::vector<BackendBench> backends;
  std::string query_ordering;  // backends sorted by measured query time
  bool ordering_matches_expected = false;  // indexed < array < flat < xml
};

// Seeded dummy events: one year of begin times, plausible bands, scores,
// a small tag/detector vocabulary. Deterministic per seed.
std::vector<EventRecord> generate_dummy_events(size_t n, uint64_t seed);

// Writes the dummy store once per backend under work_dir, then measures
// load and the query suite as the median of 5 runs each.
BenchReport store_benchmark(size_t n_events, uint64_t seed,
                            const std::string& work_dir);

void emit_bench_tsv(std::ostream& out, const BenchReport& r,
                    const std::vector<std::string>& meta);

// The pinned flat header, shared with score files and tests.
extern const char* const kFlatHeader;

}  // namespace adamine

#endif  // ADAMINE_EVENTSTORE_HPP
