#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "adamine/archive.hpp"
#include "adamine/event.hpp"
#include "adamine/eventstore.hpp"
#include "test_util.hpp"

using namespace adamine;

namespace {

int run_cli(const std::string& args, const std::string& log_path) {
  std::string cmd = std::string(ADAMINE_BIN) + " " + args + " >" + log_path +
                    " 2>" + log_path + ".err";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

const char* kRunConfig = R"([archive]
root = {DIR}/arch

[job]
job_id = clirun
unit_len = 30
pad = 3
workers = 2
backend = flat
output = {DIR}/events.tsv
merge_df = 25

[detector upcall]
kind = type1
tag = NARW
binarize_p = 92
min_duration = 0.3
max_duration = 2.0
min_bandwidth = 40
max_bandwidth = 300
min_slope = 25
max_slope = 400
min_energy = 50

[scene]
duration = 120
rate = 2000
noise_rms = 0.01
seed = 36
channel = S
start = 2006-01-01T00:00:00Z
truth_out = {DIR}/truth.tsv
signal = upsweep 20.0 1.0 100 200 20
signal = upsweep 65.5 1.0 100 200 20
signal = upsweep 100.0 1.0 110 210 22
)";

std::string fill(std::string text, const std::string& dir) {
  for (size_t at; (at = text.find("{DIR}")) != std::string::npos;)
    text.replace(at, 5, dir);
  return text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("scan writes a manifest and fails cleanly on a bad root") {
  testutil::TempDir dir;
  std::filesystem::create_directories(dir.file("arch"));
  testutil::spit(dir.file("arch/notes.txt"), "x");
  int rc = run_cli("scan " + dir.file("arch") + " --out " +
                       dir.file("manifest.tsv"),
                   dir.file("scan.log"));
  CHECK(rc == 0);
  ArchiveManifest m = read_manifest(dir.file("manifest.tsv"));
  CHECK(m.entries.empty());
  CHECK(m.skipped.size() == 1);

  int rc2 = run_cli("scan /definitely/not/here --out " + dir.file("x.tsv"),
                    dir.file("scan2.log"));
  CHECK(rc2 == 2);
}

TEST_CASE("run on a scene config detects the planted sweeps") {
  testutil::TempDir dir;
  testutil::spit(dir.file("job.cfg"), fill(kRunConfig, dir.path()));
  int rc = run_cli("run " + dir.file("job.cfg"), dir.file("run.log"));
  CHECK(rc == 0);

  auto events = store_load(StoreBackend::kFlat, dir.file("events.tsv"));
  auto truth = store_load(StoreBackend::kFlat, dir.file("truth.tsv"));
  REQUIRE(truth.size() == 3);
  REQUIRE(!events.empty());
  size_t matched = 0;
  for (const EventRecord& t : truth) {
    for (const EventRecord& e : events)
      if (event_iou(e, t) >= 0.25) {
        ++matched;
        break;
      }
  }
  CHECK(matched == 3);
  CHECK(events.size() <= 4);  // at most one stray

  // task table exists with the pinned columns
  std::string table = testutil::slurp(dir.file("events.tsv.tasks.tsv"));
  CHECK(table.rfind("task_id\tdetector\tt0\tt1\tstatus\twall_ms\tn_events\n",
                    0) == 0);

  // idempotence: a second run reproduces the store byte for byte
  std::string first = testutil::slurp(dir.file("events.tsv"));
  int rc2 = run_cli("run " + dir.file("job.cfg"), dir.file("run2.log"));
  CHECK(rc2 == 0);
  CHECK(testutil::slurp(dir.file("events.tsv")) == first);
}

TEST_CASE("run on an empty archive warns and writes an empty store") {
  testutil::TempDir dir;
  std::filesystem::create_directories(dir.file("arch"));
  std::string cfg = R"([archive]
root = {DIR}/arch

[job]
job_id = empty
unit_len = 30
pad = 3
workers = 2
backend = flat
output = {DIR}/events.tsv

[detector upcall]
kind = type1
min_duration = 0.3
max_duration = 2.0
)";
  testutil::spit(dir.file("job.cfg"), fill(cfg, dir.path()));
  int rc = run_cli("run " + dir.file("job.cfg"), dir.file("run.log"));
  CHECK(rc == 0);
  CHECK(testutil::slurp(dir.file("run.log.err")).find("warning") !=
        std::string::npos);
  CHECK(store_load(StoreBackend::kFlat, dir.file("events.tsv")).empty());
}

TEST_CASE("missing config exits 2, malformed config exits 3") {
  testutil::TempDir dir;
  CHECK(run_cli("run " + dir.file("nope.cfg"), dir.file("a.log")) == 2);
  testutil::spit(dir.file("bad.cfg"), "[job]\nbogus_key = 1\n");
  CHECK(run_cli("run " + dir.file("bad.cfg"), dir.file("b.log")) == 3);
}

TEST_CASE("import-scores validates ids and writes the sidecar") {
  testutil::TempDir dir;
  testutil::spit(dir.file("job.cfg"), fill(kRunConfig, dir.path()));
  REQUIRE(run_cli("run " + dir.file("job.cfg"), dir.file("run.log")) == 0);
  auto events = store_load(StoreBackend::kFlat, dir.file("events.tsv"));
  REQUIRE(!events.empty());

  // unknown id: exit 3, stderr names it, store unmodified
  std::string before = testutil::slurp(dir.file("events.tsv"));
  testutil::spit(dir.file("bad_scores.tsv"),
                 "event_id\tanalyst_id\tscore\nghost:99\tan0\t0.75\n");
  int rc = run_cli("import-scores --file " + dir.file("bad_scores.tsv") +
                       " --store " + dir.file("events.tsv"),
                   dir.file("imp.log"));
  CHECK(rc == 3);
  CHECK(testutil::slurp(dir.file("imp.log.err")).find("ghost:99") !=
        std::string::npos);
  CHECK(testutil::slurp(dir.file("events.tsv")) == before);
  CHECK(!std::filesystem::exists(dir.file("events.tsv.scores.tsv")));

  // valid scores attach
  testutil::spit(dir.file("scores.tsv"),
                 "event_id\tanalyst_id\tscore\n" + events[0].event_id +
                     "\tan0\t1.000000\n");
  int rc2 = run_cli("import-scores --file " + dir.file("scores.tsv") +
                        " --store " + dir.file("events.tsv"),
                    dir.file("imp2.log"));
  CHECK(rc2 == 0);
  std::string sidecar = testutil::slurp(dir.file("events.tsv.scores.tsv"));
  CHECK(sidecar.rfind("event_id\tanalyst_id\tscore\n", 0) == 0);
  CHECK(sidecar.find(events[0].event_id) != std::string::npos);

  // off-scale score value is a validation failure
  testutil::spit(dir.file("off.tsv"),
                 "event_id\tanalyst_id\tscore\n" + events[0].event_id +
                     "\tan0\t0.33\n");
  CHECK(run_cli("import-scores --file " + dir.file("off.tsv") + " --store " +
                    dir.file("events.tsv"),
                dir.file("imp3.log")) == 3);
}

TEST_CASE("eval emits a curve table with auc and tpr lines") {
  testutil::TempDir dir;
  testutil::spit(dir.file("job.cfg"), fill(kRunConfig, dir.path()));
  REQUIRE(run_cli("run " + dir.file("job.cfg"), dir.file("run.log")) == 0);

  int rc = run_cli("eval --store " + dir.file("events.tsv") + " --truth " +
                       dir.file("truth.tsv") + " --kind roc --out " +
                       dir.file("roc.tsv") + " --svg " + dir.file("roc.svg") +
                       " --fpr 0.06",
                   dir.file("eval.log"));
  if (rc == 0) {
    std::string table = testutil::slurp(dir.file("roc.tsv"));
    CHECK(table.find("threshold\tfpr\ttpr") != std::string::npos);
    CHECK(table.find("# auc") != std::string::npos);
    CHECK(table.find("# tpr_at_fpr") != std::string::npos);
    CHECK(testutil::slurp(dir.file("roc.svg")).find("<svg") !=
          std::string::npos);
  } else {
    // a perfectly clean run has single-class labels: a validation error
    CHECK(rc == 3);
  }
}

TEST_CASE("export-clips writes one pgm per event plus an index") {
  testutil::TempDir dir;
  testutil::spit(dir.file("job.cfg"), fill(kRunConfig, dir.path()));
  REQUIRE(run_cli("run " + dir.file("job.cfg"), dir.file("run.log")) == 0);
  REQUIRE(run_cli("scan " + dir.file("arch") + " --out " +
                      dir.file("manifest.tsv"),
                  dir.file("scan.log")) == 0);

  int rc = run_cli("export-clips --store " + dir.file("events.tsv") +
                       " --archive " + dir.file("manifest.tsv") + " --out " +
                       dir.file("clips"),
                   dir.file("clips.log"));
  CHECK(rc == 0);
  auto events = store_load(StoreBackend::kFlat, dir.file("events.tsv"));
  REQUIRE(!events.empty());
  for (const EventRecord& e : events)
    CHECK(std::filesystem::exists(dir.file("clips/" + e.event_id + ".pgm")));
  std::string index = testutil::slurp(dir.file("clips/index.tsv"));
  CHECK(index.find("event_id\tfile\tbegin") != std::string::npos);
}

TEST_CASE("post-train fits a model from store plus scores") {
  testutil::TempDir dir;
  testutil::spit(dir.file("job.cfg"), fill(kRunConfig, dir.path()));
  REQUIRE(run_cli("run " + dir.file("job.cfg"), dir.file("run.log")) == 0);
  auto events = store_load(StoreBackend::kFlat, dir.file("events.tsv"));
  REQUIRE(events.size() >= 2);

  std::string scores = "event_id\tanalyst_id\tscore\n";
  for (size_t i = 0; i < events.size(); ++i)
    scores += events[i].event_id + "\tan0\t" +
              (i % 2 == 0 ? "1.000000" : "0.000000") + "\n";
  testutil::spit(dir.file("scores.tsv"), scores);

  int rc = run_cli("post-train --store " + dir.file("events.tsv") +
                       " --scores " + dir.file("scores.tsv") + " --out " +
                       dir.file("model.txt") + " --seed 42 --epochs 50",
                   dir.file("post.log"));
  CHECK(rc == 0);
  std::string model = testutil::slurp(dir.file("model.txt"));
  CHECK(model.rfind("#adamine-mlp v1\n", 0) == 0);
  CHECK(model.find("human_score") != std::string::npos);
}

TEST_CASE("bench-store on a small n prints the table") {
  testutil::TempDir dir;
  int rc = run_cli("bench-store --n 2000 --seed 5 --dir " + dir.file("bench"),
                   dir.file("bench.log"));
  CHECK(rc == 0);
  std::string out = testutil::slurp(dir.file("bench.log"));
  CHECK(out.find("backend\tload_s\tquery_s") != std::string::npos);
  CHECK(out.find("# query ordering") != std::string::npos);
}

TEST_CASE("bench-scale reports speedups and determinism") {
  testutil::TempDir dir;
  testutil::spit(dir.file("job.cfg"), fill(kRunConfig, dir.path()));
  int rc = run_cli("bench-scale " + dir.file("job.cfg") + " --workers 1,2",
                   dir.file("scale.log"));
  CHECK(rc == 0);
  std::string out = testutil::slurp(dir.file("scale.log"));
  CHECK(out.find("workers\twall_ms\tspeedup") != std::string::npos);
  CHECK(out.find("NO") == std::string::npos);  // deterministic at both W
}

}  // TEST_SUITE
