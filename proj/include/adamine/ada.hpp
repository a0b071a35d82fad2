#ifndef ADAMINE_ADA_HPP
#define ADAMINE_ADA_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "adamine/archive.hpp"
#include "adamine/event.hpp"
#include "adamine/eventstore.hpp"
#include "adamine/registry.hpp"

namespace adamine {

// Declarative job: which detectors over which archive, how to cut it, how
// many workers, where the events go.
struct JobSpec {
  std::string job_id;
  std::vector<std::string> detector_ids;
  double unit_len_s = 600.0;
  double pad_s = 5.0;
  size_t workers = 1;
  StoreBackend output_backend = StoreBackend::kFlat;
  std::string output_path;
};

struct Task {
  size_t task_id = 0;
  std::string detector_id;
  WorkUnit unit;
};

// Detector-major, time-minor task list; ids dense 0..n-1.
struct TaskPlan {
  std::vector<Task> tasks;
  std::vector<std::string> warnings;
};

struct TaskOutcome {
  size_t task_id = 0;
  std::string detector_id;
  double unit_t0 = 0.0;
  double unit_t1 = 0.0;
  bool ok = true;
  std::string fail_reason;
  double wall_ms = 0.0;
  size_t n_events = 0;
  size_t worker = 0;
};

struct RunReport {
  std::string job_id;
  std::vector<EventRecord> events;  // merged, canonically sorted
  std::vector<TaskOutcome> task_rows;
  size_t n_tasks = 0;
  size_t n_failures = 0;
  double wall_ms_total = 0.0;
};

// Overlap-pad duplicate reconciliation tolerance.
struct MergeTol {
  double dt_s = 0.5;
  double df_hz = 10.0;
};

// Unknown detector ids fail here, before any execution. An empty manifest
// yields an empty plan plus a warning diagnostic.
TaskPlan plan(const JobSpec& job, const ArchiveManifest& manifest,
              const DetectorRegistry& registry);

struct GatherResult {
  std::vector<EventRecord> events;
  // per output event: the provenance ids (task_id << 32 | local index) of
  // every partial event folded into it
  std::vector<std::vector<uint64_t>> provenance;
};

// Deduplicates events that adjacent units of the same detector both saw in
// their shared pad window (bbox deltas all within tolerance; the higher
// score wins), then sorts by (t_start, channel, detector).
GatherResult gather(const std::vector<std::vector<EventRecord>>& partials,
                    const TaskPlan& plan, const ArchiveManifest& manifest,
                    const MergeTol& tol);

// Pull-queue execution across `workers` threads; a failed task never
// aborts the run. A task keeps only events whose bbox intersects its core
// span — pads give detectors context, the neighbor owns what lies wholly
// inside them. Merged events get ids "<run_id>:<counter>" in canonical
// order, so any worker count produces identical output.
RunReport execute(const TaskPlan& plan, const ArchiveManifest& manifest,
                  const DetectorRegistry& registry, size_t workers,
                  const MergeTol& tol, const std::string& run_id);

// Tasks spilling more than this many events stream through a temp file.
constexpr size_t kSpillThreshold = 100000;

void write_run_summary(std::ostream& out, const RunReport& report);

// task_id  detector  t0  t1  status  wall_ms  n_events
void write_task_table(const std::string& path, const RunReport& report);

}  // namespace adamine

#endif  // ADAMINE_ADA_HPP
