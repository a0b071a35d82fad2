#include "adamine/ada.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include "adamine/errors.hpp"

namespace adamine {

TaskPlan plan(const JobSpec& job, const ArchiveManifest& manifest,
              const DetectorRegistry& registry) {
  if (job.detector_ids.empty())
    throw PlanError("job names no detectors");
  for (const std::string& id : job.detector_ids) {
    if (!registry.has(id)) {
      if (is_reserved_detector_id(id))
        throw PlanError("detector id '" + id +
                        "' is reserved but not implemented");
      throw PlanError("unknown detector id: '" + id + "'");
    }
  }

  TaskPlan out;
  if (manifest.entries.empty()) {
    out.warnings.push_back("manifest has no entries; nothing to do");
    return out;
  }
  std::vector<WorkUnit> units = partition(manifest, job.unit_len_s, job.pad_s);
  size_t id = 0;
  for (const std::string& det : job.detector_ids)
    for (const WorkUnit& u : units) out.tasks.push_back({id++, det, u});
  return out;
}

namespace {

std::string spill_path(size_t task_id) {
  return (std::filesystem::temp_directory_path() /
          ("adamine-spill-" + std::to_string(::getpid()) + "-" +
           std::to_string(task_id) + ".tsv"))
      .string();
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

GatherResult gather(const std::vector<std::vector<EventRecord>>& partials,
                    const TaskPlan& plan, const ArchiveManifest& manifest,
                    const MergeTol& tol) {
  if (partials.size() != plan.tasks.size())
    throw ConsistencyError("got " + std::to_string(partials.size()) +
                           " partial lists for " +
                           std::to_string(plan.tasks.size()) + " tasks");

  // flatten with provenance ids
  struct Item {
    uint64_t prov;
    size_t task;
    const EventRecord* event;
  };
  std::vector<Item> items;
  for (size_t t = 0; t < partials.size(); ++t) {
    if (partials[t].size() >= (1ull << 32))
      throw ConsistencyError("task partial list too large");
    for (size_t i = 0; i < partials[t].size(); ++i)
      items.push_back({(static_cast<uint64_t>(t) << 32) | i, t,
                       &partials[t][i]});
  }

  // union-find over item indices
  std::vector<size_t> parent(items.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  // adjacent same-detector unit pairs share the pad window around their
  // core boundary; events wholly inside it are dedup candidates
  std::map<std::pair<std::string, std::string>, std::vector<size_t>> lanes;
  for (size_t t = 0; t < plan.tasks.size(); ++t)
    lanes[{plan.tasks[t].detector_id, plan.tasks[t].unit.channel_id}]
        .push_back(t);

  std::vector<std::vector<size_t>> task_items(plan.tasks.size());
  for (size_t i = 0; i < items.size(); ++i)
    task_items[items[i].task].push_back(i);

  const UtcMillis dt_ms = static_cast<UtcMillis>(std::llround(tol.dt_s * 1000.0));
  for (auto& [lane, tasks] : lanes) {
    std::sort(tasks.begin(), tasks.end(), [&](size_t a, size_t b) {
      return plan.tasks[a].unit.core_t0 < plan.tasks[b].unit.core_t0;
    });
    UtcMillis epoch = channel_epoch(manifest, lane.second);
    for (size_t k = 0; k + 1 < tasks.size(); ++k) {
      const WorkUnit& ua = plan.tasks[tasks[k]].unit;
      const WorkUnit& ub = plan.tasks[tasks[k + 1]].unit;
      if (std::abs(ua.core_t1 - ub.core_t0) > 1e-6) continue;  // gap between
      double win_lo = ub.core_t0 - ub.pad_before;
      double win_hi = ua.core_t1 + ua.pad_after;
      if (win_hi <= win_lo) continue;  // zero pads: nothing shared
      UtcMillis win_lo_ms = epoch + static_cast<UtcMillis>(std::llround(win_lo * 1000.0)) - 1;
      UtcMillis win_hi_ms = epoch + static_cast<UtcMillis>(std::llround(win_hi * 1000.0)) + 1;
      auto inside = [&](const EventRecord& e) {
        return e.begin_time >= win_lo_ms && e.end_time <= win_hi_ms;
      };
      std::vector<size_t> b_inside;
      for (size_t ib : task_items[tasks[k + 1]])
        if (inside(*items[ib].event)) b_inside.push_back(ib);
      if (b_inside.empty()) continue;
      for (size_t ia : task_items[tasks[k]]) {
        const EventRecord& a = *items[ia].event;
        if (!inside(a)) continue;
        for (size_t ib : b_inside) {
          const EventRecord& b = *items[ib].event;
          if (std::llabs(a.begin_time - b.begin_time) <= dt_ms &&
              std::llabs(a.end_time - b.end_time) <= dt_ms &&
              std::abs(a.f_lo_hz - b.f_lo_hz) <= tol.df_hz &&
              std::abs(a.f_hi_hz - b.f_hi_hz) <= tol.df_hz)
            unite(ia, ib);
        }
      }
    }
  }

  // the higher score represents the group; ties to the earlier provenance
  std::map<size_t, size_t> rep;  // root -> winning item
  for (size_t i = 0; i < items.size(); ++i) {
    size_t root = find(i);
    auto it = rep.find(root);
    if (it == rep.end()) {
      rep[root] = i;
      continue;
    }
    const EventRecord& cur = *items[it->second].event;
    const EventRecord& cand = *items[i].event;
    if (cand.score > cur.score ||
        (cand.score == cur.score && items[i].prov < items[it->second].prov))
      it->second = i;
  }

  std::vector<std::pair<EventRecord, std::vector<uint64_t>>> merged;
  for (auto& [root, win] : rep)
    merged.emplace_back(*items[win].event, std::vector<uint64_t>{});
  {
    std::map<size_t, size_t> root_to_out;
    size_t n = 0;
    for (auto& [root, win] : rep) root_to_out[root] = n++;
    for (size_t i = 0; i < items.size(); ++i)
      merged[root_to_out[find(i)]].second.push_back(items[i].prov);
  }
  for (auto& [e, prov] : merged) std::sort(prov.begin(), prov.end());
  // provenance breaks ties between field-identical merged events so the
  // output order never depends on grouping order
  std::sort(merged.begin(), merged.end(),
            [](const auto& a, const auto& b) {
              if (canonical_event_less(a.first, b.first)) return true;
              if (canonical_event_less(b.first, a.first)) return false;
              return a.second.front() < b.second.front();
            });

  GatherResult out;
  for (auto& [e, prov] : merged) {
    out.events.push_back(std::move(e));
    out.provenance.push_back(std::move(prov));
  }
  return out;
}

RunReport execute(const TaskPlan& plan, const ArchiveManifest& manifest,
                  const DetectorRegistry& registry, size_t workers,
                  const MergeTol& tol, const std::string& run_id) {
  if (workers < 1) throw ArgumentError("need at least one worker");

  // resolve every pipeline once, before any thread starts
  std::map<std::string, DetectorFn> fns;
  for (const Task& t : plan.tasks)
    if (!fns.count(t.detector_id))
      fns[t.detector_id] = registry.resolve(t.detector_id);

  const size_t n = plan.tasks.size();
  std::vector<std::vector<EventRecord>> partials(n);
  std::vector<std::string> spills(n);
  std::vector<TaskOutcome> outcomes(n);

  auto run_start = std::chrono::steady_clock::now();
  std::atomic<size_t> next{0};
  auto worker_loop = [&](size_t wid) {
    for (;;) {
      size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= n) return;
      const Task& task = plan.tasks[t];
      TaskOutcome& o = outcomes[t];
      o.task_id = task.task_id;
      o.detector_id = task.detector_id;
      o.unit_t0 = task.unit.core_t0;
      o.unit_t1 = task.unit.core_t1;
      o.worker = wid;
      auto t0 = std::chrono::steady_clock::now();
      try {
        SampleBlock block = read_samples(task.unit, manifest);
        std::vector<EventRecord> events = fns[task.detector_id](block);
        // pads give detectors context; ownership stays with the core.
        // Events entirely inside a pad belong to the neighboring unit,
        // which observes them in full. Events straddling a core boundary
        // stay in both units and reconcile in gather().
        UtcMillis epoch = channel_epoch(manifest, task.unit.channel_id);
        UtcMillis core_lo = epoch + static_cast<UtcMillis>(
                                        std::llround(task.unit.core_t0 * 1000.0));
        UtcMillis core_hi = epoch + static_cast<UtcMillis>(
                                        std::llround(task.unit.core_t1 * 1000.0));
        std::erase_if(events, [&](const EventRecord& e) {
          return e.end_time <= core_lo || e.begin_time >= core_hi;
        });
        o.n_events = events.size();
        if (events.size() > kSpillThreshold) {
          spills[t] = spill_path(task.task_id);
          store_write(StoreBackend::kFlat, spills[t], events);
        } else {
          partials[t] = std::move(events);
        }
        o.ok = true;
      } catch (const std::exception& e) {
        o.ok = false;
        o.fail_reason = e.what();
      }
      auto t1 = std::chrono::steady_clock::now();
      o.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
  };

  if (workers == 1) {
    worker_loop(0);
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w)
      pool.emplace_back(worker_loop, w);
    for (std::thread& th : pool) th.join();
  }

  // pull spilled partials back in for the merge
  for (size_t t = 0; t < n; ++t) {
    if (spills[t].empty()) continue;
    partials[t] = store_load(StoreBackend::kFlat, spills[t]);
    std::error_code ec;
    std::filesystem::remove(spills[t], ec);
  }

  RunReport report;
  report.job_id = run_id;
  GatherResult merged = gather(partials, plan, manifest, tol);
  report.events = std::move(merged.events);
  for (size_t i = 0; i < report.events.size(); ++i) {
    report.events[i].run_id = run_id;
    report.events[i].event_id = run_id + ":" + std::to_string(i);
  }
  report.task_rows = std::move(outcomes);
  report.n_tasks = n;
  for (const TaskOutcome& o : report.task_rows)
    if (!o.ok) ++report.n_failures;
  auto run_end = std::chrono::steady_clock::now();
  report.wall_ms_total =
      std::chrono::duration<double, std::milli>(run_end - run_start).count();
  return report;
}

void write_run_summary(std::ostream& out, const RunReport& report) {
  out << "job " << report.job_id << ": " << report.n_tasks << " tasks, "
      << report.n_failures << " failed, " << report.events.size()
      << " events, " << std::llround(report.wall_ms_total) << " ms\n";
  for (const TaskOutcome& o : report.task_rows)
    if (!o.ok)
      out << "  task " << o.task_id << " (" << o.detector_id
          << ") failed: " << o.fail_reason << '\n';
}

void write_task_table(const std::string& path, const RunReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "task_id\tdetector\tt0\tt1\tstatus\twall_ms\tn_events\n";
  char buf[64];
  for (const TaskOutcome& o : report.task_rows) {
    std::string status = o.ok ? "ok" : "failed(" + sanitize(o.fail_reason) + ")";
    std::snprintf(buf, sizeof(buf), "%.3f\t%.3f", o.unit_t0, o.unit_t1);
    out << o.task_id << '\t' << o.detector_id << '\t' << buf << '\t' << status
        << '\t';
    std::snprintf(buf, sizeof(buf), "%.3f", o.wall_ms);
    out << buf << '\t' << o.n_events << '\n';
  }
  if (!out) throw IoError("short write: " + path);
}

}  // namespace adamine
