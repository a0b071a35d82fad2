// adamine: scan sound archives, run detector jobs across a worker pool,
// benchmark event stores, evaluate detectors, export analyst clips, and
// train the human-knowledge post-classifier.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "adamine/ada.hpp"
#include "adamine/archive.hpp"
#include "adamine/classify.hpp"
#include "adamine/config.hpp"
#include "adamine/dsp.hpp"
#include "adamine/errors.hpp"
#include "adamine/evalkit.hpp"
#include "adamine/eventstore.hpp"
#include "adamine/pgm.hpp"
#include "adamine/registry.hpp"
#include "adamine/synth.hpp"

using namespace adamine;

namespace {

constexpr const char* kToolVersion = "adamine 1.0.0";

// exit-code contract: 0 ok, 1 fatal I/O, 2 bad input path, 3 validation
constexpr int kOk = 0;
constexpr int kFatalIo = 1;
constexpr int kBadInput = 2;
constexpr int kValidation = 3;

std::vector<std::string> meta_lines(uint64_t seed, uint64_t config_hash) {
  std::ostringstream hash;
  hash << std::hex << config_hash;
  return {std::string(kToolVersion), "seed " + std::to_string(seed),
          "config_hash " + hash.str()};
}

struct ScoreFile {
  std::vector<HumanScore> scores;
};

ScoreFile read_scores_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scores file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "event_id\tanalyst_id\tscore")
    throw ValidationError("scores file header must be "
                          "'event_id\\tanalyst_id\\tscore': " +
                          path);
  ScoreFile out;
  std::set<std::pair<std::string, std::string>> seen;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(row) +
                            ": expected 3 tab-separated fields");
    HumanScore s;
    s.event_id = line.substr(0, t1);
    s.analyst_id = line.substr(t1 + 1, t2 - t1 - 1);
    try {
      s.score = std::stod(line.substr(t2 + 1));
    } catch (const std::exception&) {
      throw ValidationError(path + ":" + std::to_string(row) +
                            ": score is not a number");
    }
    if (!is_valid_human_score_value(s.score))
      throw ValidationError(path + ":" + std::to_string(row) +
                            ": score must be one of 0, 0.25, 0.5, 0.75, 1");
    if (!seen.insert({s.event_id, s.analyst_id}).second)
      throw ValidationError(path + ":" + std::to_string(row) +
                            ": duplicate (event, analyst) pair");
    out.scores.push_back(std::move(s));
  }
  return out;
}

void write_scores_tsv(const std::string& path, std::vector<HumanScore> scores) {
  std::sort(scores.begin(), scores.end(),
            [](const HumanScore& a, const HumanScore& b) {
              return std::tie(a.event_id, a.analyst_id) <
                     std::tie(b.event_id, b.analyst_id);
            });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "event_id\tanalyst_id\tscore\n";
  char buf[32];
  for (const HumanScore& s : scores) {
    std::snprintf(buf, sizeof(buf), "%.6f", s.score);
    out << s.event_id << '\t' << s.analyst_id << '\t' << buf << '\n';
  }
  if (!out) throw IoError("short write: " + path);
}

// one analyst score per event: the lexicographically first analyst wins
std::map<std::string, double> scores_by_event(const ScoreFile& file) {
  std::map<std::string, std::pair<std::string, double>> picked;
  for (const HumanScore& s : file.scores) {
    auto it = picked.find(s.event_id);
    if (it == picked.end() || s.analyst_id < it->second.first)
      picked[s.event_id] = {s.analyst_id, s.score};
  }
  std::map<std::string, double> out;
  for (const auto& [id, pair] : picked) out[id] = pair.second;
  return out;
}

// label detections against truth by time-frequency IoU
std::vector<int> labels_by_iou(const std::vector<EventRecord>& detections,
                               const std::vector<EventRecord>& truth,
                               double min_iou) {
  std::vector<int> labels(detections.size(), 0);
  for (size_t i = 0; i < detections.size(); ++i)
    for (const EventRecord& t : truth)
      if (t.channel_id == detections[i].channel_id &&
          event_iou(detections[i], t) >= min_iou) {
        labels[i] = 1;
        break;
      }
  return labels;
}

// pinned machine feature extraction for post-train
const std::vector<std::string> kMachineFeatureNames = {
    "duration_s", "bandwidth_hz_over_100", "f_lo_khz", "f_hi_khz",
    "machine_score"};

std::vector<double> machine_features(const EventRecord& e) {
  return {(e.end_time - e.begin_time) / 1000.0,
          (e.f_hi_hz - e.f_lo_hz) / 100.0, e.f_lo_hz / 1000.0,
          e.f_hi_hz / 1000.0, e.score};
}

ArchiveManifest manifest_for(const JobConfigFile& cfg) {
  if (!cfg.archive_manifest.empty()) return read_manifest(cfg.archive_manifest);
  return scan_archive(cfg.archive_root, cfg.archive_pattern);
}

DetectorRegistry registry_for(const JobConfigFile& cfg) {
  DetectorRegistry reg;
  for (const DetectorConfig& d : cfg.detectors) reg.register_detector(d);
  return reg;
}

// render the configured scene into the archive root; write truth if asked
void materialize_scene(const JobConfigFile& cfg) {
  if (!cfg.scene) return;
  if (cfg.archive_root.empty())
    throw ValidationError("[scene] needs [archive] root to render into");
  RenderedScene scene = render_scene(*cfg.scene);
  write_scene_wav(scene, cfg.archive_root);
  if (!cfg.scene_truth_out.empty()) {
    std::vector<EventRecord> truth = scene.truth;
    for (size_t i = 0; i < truth.size(); ++i) {
      truth[i].run_id = "truth";
      truth[i].event_id = "truth:" + std::to_string(i);
    }
    store_write(StoreBackend::kFlat, cfg.scene_truth_out, truth);
  }
}

int cmd_scan(const std::string& root, const std::string& pattern,
             const std::string& out_path) {
  ArchiveManifest m;
  try {
    m = scan_archive(root, pattern);
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return kBadInput;
  }
  write_manifest(out_path, m);
  std::cout << m.entries.size() << " entries, " << m.skipped.size()
            << " skipped -> " << out_path << '\n';
  return kOk;
}

int cmd_run(const std::string& config_path) {
  JobConfigFile cfg = parse_job_config(config_path);
  materialize_scene(cfg);
  ArchiveManifest manifest = manifest_for(cfg);
  DetectorRegistry reg = registry_for(cfg);

  TaskPlan task_plan = plan(cfg.job, manifest, reg);
  for (const std::string& w : task_plan.warnings)
    std::cerr << "warning: " << w << '\n';

  RunReport report = execute(task_plan, manifest, reg, cfg.job.workers,
                             cfg.tol, cfg.job.job_id);
  store_write(cfg.job.output_backend, cfg.job.output_path, report.events);
  write_task_table(cfg.job.output_path + ".tasks.tsv", report);
  write_run_summary(std::cout, report);
  std::cout << "events -> " << cfg.job.output_path << " ("
            << to_string(cfg.job.output_backend) << ")\n";
  return kOk;
}

int cmd_bench_store(size_t n, uint64_t seed, std::string dir) {
  if (dir.empty())
    dir = (std::filesystem::temp_directory_path() /
           ("adamine-bench-" + std::to_string(seed)))
              .string();
  BenchReport r = store_benchmark(n, seed, dir);
  emit_bench_tsv(std::cout, r, meta_lines(seed, 0));
  return kOk;
}

int cmd_bench_scale(const std::string& config_path,
                    const std::string& workers_csv) {
  JobConfigFile cfg = parse_job_config(config_path);
  materialize_scene(cfg);
  ArchiveManifest manifest = manifest_for(cfg);
  DetectorRegistry reg = registry_for(cfg);
  TaskPlan task_plan = plan(cfg.job, manifest, reg);

  std::vector<size_t> workers;
  std::stringstream ss(workers_csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    workers.push_back(static_cast<size_t>(std::stoul(tok)));
  if (workers.empty()) throw ValidationError("empty --workers list");

  for (const std::string& line :
       meta_lines(cfg.scene ? cfg.scene->seed : 0, cfg.config_hash))
    std::cout << "# " << line << '\n';
  std::cout << "workers\twall_ms\tspeedup\tevents\tdeterministic\n";
  double base_ms = 0.0;
  std::vector<EventRecord> reference;
  char buf[64];
  for (size_t i = 0; i < workers.size(); ++i) {
    RunReport r = execute(task_plan, manifest, reg, workers[i], cfg.tol,
                          cfg.job.job_id);
    if (i == 0) {
      base_ms = r.wall_ms_total;
      reference = r.events;
    }
    bool same = r.events == reference;
    std::snprintf(buf, sizeof(buf), "%.1f\t%.2f", r.wall_ms_total,
                  base_ms / std::max(1e-9, r.wall_ms_total));
    std::cout << workers[i] << '\t' << buf << '\t' << r.events.size() << '\t'
              << (same ? "yes" : "NO") << '\n';
  }
  return kOk;
}

int cmd_eval(const std::string& store_path, const std::string& backend,
             const std::string& truth_path, const std::string& truth_backend,
             const std::string& kind_name, const std::string& out_path,
             const std::string& svg_path, double fpr_target, double min_iou) {
  std::vector<EventRecord> detections =
      store_load(backend_from_string(backend), store_path);
  std::vector<EventRecord> truth =
      store_load(backend_from_string(truth_backend), truth_path);
  if (detections.size() < 2)
    throw ValidationError("need at least 2 detections to draw a curve");

  std::vector<double> scores;
  for (const EventRecord& e : detections) scores.push_back(e.score);
  std::vector<int> labels = labels_by_iou(detections, truth, min_iou);

  CurveKind kind = curve_kind_from_string(kind_name);
  Curve c = curve(scores, labels, kind);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + out_path);
  std::vector<std::string> meta = {std::string(kToolVersion),
                                   "store " + store_path,
                                   "truth " + truth_path,
                                   "min_iou " + std::to_string(min_iou)};
  emit_curve_tsv(out, c, meta);
  if (kind == CurveKind::kRoc && fpr_target >= 0.0) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# tpr_at_fpr\t%.6f\t%.6f", fpr_target,
                  tpr_at_fpr(c, fpr_target));
    out << buf << '\n';
    std::cout << buf << '\n';
  }
  if (kind == CurveKind::kRoc)
    std::cout << "auc " << c.auc << " over " << detections.size()
              << " detections\n";

  if (!svg_path.empty()) {
    std::vector<std::pair<double, double>> xy;
    for (const CurvePoint& p : c.points)
      xy.emplace_back(kind == CurveKind::kPr ? p.tpr : p.fpr,
                      kind == CurveKind::kPr ? p.precision : p.tpr);
    const char* xl = kind == CurveKind::kPr ? "recall" : "fpr";
    const char* yl = kind == CurveKind::kPr
                         ? "precision"
                         : (kind == CurveKind::kDet ? "miss rate" : "tpr");
    std::ofstream svg(svg_path, std::ios::binary);
    if (!svg) throw IoError("cannot open for writing: " + svg_path);
    svg << svg_line_chart(xy, xl, yl);
  }
  return kOk;
}

int cmd_export_clips(const std::string& store_path, const std::string& backend,
                     const std::string& manifest_path,
                     const std::string& out_dir) {
  std::vector<EventRecord> events =
      store_load(backend_from_string(backend), store_path);
  ArchiveManifest manifest = read_manifest(manifest_path);
  std::filesystem::create_directories(out_dir);

  std::ofstream index(out_dir + "/index.tsv", std::ios::binary);
  if (!index)
    throw IoError("cannot open for writing: " + out_dir + "/index.tsv");
  index << "# " << kToolVersion << "\n"
        << "event_id\tfile\tbegin\tend\tlow_hz\thigh_hz\tscore\tdetector\n";

  size_t exported = 0;
  for (const EventRecord& e : events) {
    try {
      UtcMillis epoch = channel_epoch(manifest, e.channel_id);
      double t0 = (e.begin_time - epoch) / 1000.0 - 1.0;  // 1 s of context
      double t1 = (e.end_time - epoch) / 1000.0 + 1.0;
      SampleBlock block = read_span(manifest, e.channel_id, t0, t1);
      Spectrogram spec = stft(block, 256, 128, WindowKind::kHann);
      double bw = spec.geom.bin_width_hz;
      size_t bin_lo =
          static_cast<size_t>(std::max(0.0, e.f_lo_hz / bw - 10.0));
      size_t bin_hi = std::min(spec.n_bins - 1,
                               static_cast<size_t>(e.f_hi_hz / bw + 10.0));
      PgmImage img =
          spectrogram_to_pgm(spec, 0, spec.n_frames - 1, bin_lo, bin_hi);
      std::string file = e.event_id + ".pgm";
      write_pgm(out_dir + "/" + file, img);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f", e.f_lo_hz,
                    e.f_hi_hz, e.score);
      index << e.event_id << '\t' << file << '\t'
            << format_iso8601(e.begin_time) << '\t'
            << format_iso8601(e.end_time) << '\t' << buf << '\t'
            << e.detector_id << '\n';
      ++exported;
    } catch (const Error& err) {
      std::cerr << "skipping " << e.event_id << ": " << err.what() << '\n';
    }
  }
  std::cout << exported << " clips -> " << out_dir << '\n';
  return kOk;
}

int cmd_import_scores(const std::string& file, const std::string& store_path,
                      const std::string& backend) {
  std::vector<EventRecord> events =
      store_load(backend_from_string(backend), store_path);
  std::set<std::string> known;
  for (const EventRecord& e : events) known.insert(e.event_id);

  ScoreFile scores = read_scores_tsv(file);
  std::vector<std::string> offenders;
  for (const HumanScore& s : scores.scores)
    if (!known.count(s.event_id)) offenders.push_back(s.event_id);
  if (!offenders.empty()) {
    std::cerr << "unknown event ids:";
    for (const std::string& id : offenders) std::cerr << ' ' << id;
    std::cerr << '\n';
    return kValidation;
  }
  write_scores_tsv(store_path + ".scores.tsv", scores.scores);
  std::cout << scores.scores.size() << " scores attached -> " << store_path
            << ".scores.tsv\n";
  return kOk;
}

int cmd_post_train(const std::string& store_path, const std::string& backend,
                   const std::string& scores_path, const std::string& out_path,
                   uint64_t seed, const std::string& truth_path,
                   const std::string& truth_backend, size_t epochs, double lr,
                   size_t hidden, size_t batch, double min_iou) {
  std::vector<EventRecord> events =
      store_load(backend_from_string(backend), store_path);
  if (events.empty()) throw ValidationError("store has no events to train on");
  ScoreFile score_file = read_scores_tsv(scores_path);
  std::map<std::string, double> by_event = scores_by_event(score_file);

  std::vector<EventRecord> rows;
  std::vector<int> labels;
  if (!truth_path.empty()) {
    std::vector<EventRecord> truth =
        store_load(backend_from_string(truth_backend), truth_path);
    rows = events;
    labels = labels_by_iou(rows, truth, min_iou);
  } else {
    // no truth store: train on the scored events, the binarized analyst
    // score standing in for the label
    for (const EventRecord& e : events) {
      auto it = by_event.find(e.event_id);
      if (it == by_event.end()) continue;
      rows.push_back(e);
      labels.push_back(it->second >= 0.5 ? 1 : 0);
    }
    if (rows.size() < 2)
      throw ValidationError("fewer than 2 scored events to train on");
  }

  FeatureMatrix features;
  std::vector<std::string> ids;
  for (const EventRecord& e : rows) {
    features.push_back(machine_features(e));
    ids.push_back(e.event_id);
  }
  FeatureMatrix augmented = hk_augment(features, ids, by_event);

  TrainHyper hyper;
  hyper.layer_sizes = {augmented[0].size(), hidden, 1};
  hyper.learning_rate = lr;
  hyper.epochs = epochs;
  hyper.batch = batch;
  hyper.seed = seed;
  TrainResult result = mlp_train(augmented, labels, hyper);
  result.model.feature_names = kMachineFeatureNames;
  result.model.feature_names.push_back("human_score");
  result.model.feature_names.push_back("human_score_missing");
  write_mlp_model(out_path, result.model);

  size_t pos = 0;
  for (int y : labels) pos += y;
  std::cout << "trained on " << rows.size() << " events (" << pos
            << " positive), final loss " << result.final_loss << " -> "
            << out_path << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acoustic data-mining engine"};
  app.require_subcommand(1);

  auto* scan = app.add_subcommand("scan", "index an archive root");
  std::string scan_root, scan_pattern = "*.wav", scan_out = "manifest.tsv";
  scan->add_option("root", scan_root)->required();
  scan->add_option("--pattern", scan_pattern);
  scan->add_option("--out", scan_out);

  auto* run = app.add_subcommand("run", "plan, execute and store a job");
  std::string run_config;
  run->add_option("config", run_config)->required();

  auto* bstore = app.add_subcommand("bench-store", "storage backend benchmark");
  size_t bench_n = 100000;
  uint64_t bench_seed = 20060101;
  std::string bench_dir;
  bstore->add_option("--n", bench_n);
  bstore->add_option("--seed", bench_seed);
  bstore->add_option("--dir", bench_dir);

  auto* bscale = app.add_subcommand("bench-scale", "worker scaling benchmark");
  std::string bscale_config, bscale_workers = "1,2,4,8";
  bscale->add_option("config", bscale_config)->required();
  bscale->add_option("--workers", bscale_workers);

  auto* eval = app.add_subcommand("eval", "detector performance curves");
  std::string eval_store, eval_backend = "flat", eval_truth,
              eval_truth_backend = "flat", eval_kind = "roc", eval_out,
              eval_svg;
  double eval_fpr = -1.0, eval_iou = 0.25;
  eval->add_option("--store", eval_store)->required();
  eval->add_option("--backend", eval_backend);
  eval->add_option("--truth", eval_truth)->required();
  eval->add_option("--truth-backend", eval_truth_backend);
  eval->add_option("--kind", eval_kind);
  eval->add_option("--out", eval_out)->required();
  eval->add_option("--svg", eval_svg);
  eval->add_option("--fpr", eval_fpr);
  eval->add_option("--min-iou", eval_iou);

  auto* clips = app.add_subcommand("export-clips", "one PGM per event");
  std::string clips_store, clips_backend = "flat", clips_manifest, clips_out;
  clips->add_option("--store", clips_store)->required();
  clips->add_option("--backend", clips_backend);
  clips->add_option("--archive", clips_manifest)->required();
  clips->add_option("--out", clips_out)->required();

  auto* import = app.add_subcommand("import-scores", "attach analyst scores");
  std::string import_file, import_store, import_backend = "flat";
  import->add_option("--file", import_file)->required();
  import->add_option("--store", import_store)->required();
  import->add_option("--backend", import_backend);

  auto* post = app.add_subcommand("post-train", "train the HK post-classifier");
  std::string post_store, post_backend = "flat", post_scores, post_out,
              post_truth, post_truth_backend = "flat";
  uint64_t post_seed = 1;
  size_t post_epochs = 400, post_hidden = 8, post_batch = 32;
  double post_lr = 0.3, post_iou = 0.25;
  post->add_option("--store", post_store)->required();
  post->add_option("--backend", post_backend);
  post->add_option("--scores", post_scores)->required();
  post->add_option("--out", post_out)->required();
  post->add_option("--seed", post_seed);
  post->add_option("--truth", post_truth);
  post->add_option("--truth-backend", post_truth_backend);
  post->add_option("--epochs", post_epochs);
  post->add_option("--lr", post_lr);
  post->add_option("--hidden", post_hidden);
  post->add_option("--batch", post_batch);
  post->add_option("--min-iou", post_iou);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scan) return cmd_scan(scan_root, scan_pattern, scan_out);
    if (*run) return cmd_run(run_config);
    if (*bstore) return cmd_bench_store(bench_n, bench_seed, bench_dir);
    if (*bscale) return cmd_bench_scale(bscale_config, bscale_workers);
    if (*eval)
      return cmd_eval(eval_store, eval_backend, eval_truth, eval_truth_backend,
                      eval_kind, eval_out, eval_svg, eval_fpr, eval_iou);
    if (*clips)
      return cmd_export_clips(clips_store, clips_backend, clips_manifest,
                              clips_out);
    if (*import)
      return cmd_import_scores(import_file, import_store, import_backend);
    if (*post)
      return cmd_post_train(post_store, post_backend, post_scores, post_out,
                            post_seed, post_truth, post_truth_backend,
                            post_epochs, post_lr, post_hidden, post_batch,
                            post_iou);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const PlanError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    // unreadable inputs are "bad input path"; write failures are fatal I/O
    std::string msg = e.what();
    bool read_side = msg.rfind("cannot open", 0) == 0 &&
                     msg.find("for writing") == std::string::npos;
    return read_side ? kBadInput : kFatalIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFatalIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFatalIo;
  }
  return kOk;
}
