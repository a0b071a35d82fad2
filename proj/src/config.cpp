#include "adamine/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "adamine/errors.hpp"

namespace adamine {

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Section {
  std::string header;  // e.g. "job" or "detector upcall"
  size_t line = 0;
  std::vector<std::pair<std::string, std::string>> kv;

  bool has(const std::string& key) const {
    for (const auto& [k, v] : kv)
      if (k == key) return true;
    return false;
  }
  const std::string& get(const std::string& key) const {
    for (const auto& [k, v] : kv)
      if (k == key) return v;
    throw ValidationError("missing key '" + key + "' in [" + header + "]");
  }
};

[[noreturn]] void bad(const std::string& origin, size_t line,
                      const std::string& what) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + what);
}

double to_double(const Section& s, const std::string& key,
                 const std::string& origin) {
  try {
    size_t used = 0;
    double v = std::stod(s.get(key), &used);
    if (used != s.get(key).size()) throw std::invalid_argument(key);
    return v;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError(origin + ": key '" + key + "' in [" + s.header +
                          "] is not a number");
  }
}

uint64_t to_u64(const Section& s, const std::string& key,
                const std::string& origin) {
  try {
    size_t used = 0;
    unsigned long long v = std::stoull(s.get(key), &used);
    if (used != s.get(key).size()) throw std::invalid_argument(key);
    return v;
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError(origin + ": key '" + key + "' in [" + s.header +
                          "] is not a non-negative integer");
  }
}

void check_keys(const Section& s, const std::set<std::string>& allowed,
                const std::string& origin) {
  std::set<std::string> seen;
  for (const auto& [k, v] : s.kv) {
    if (!allowed.count(k))
      throw ValidationError(origin + ": unknown key '" + k + "' in [" +
                            s.header + "]");
    if (k != "signal" && !seen.insert(k).second)
      throw ValidationError(origin + ": duplicate key '" + k + "' in [" +
                            s.header + "]");
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double num_tok(const std::vector<std::string>& toks, size_t i,
               const std::string& what, const std::string& origin) {
  if (i >= toks.size())
    throw ValidationError(origin + ": signal line missing " + what);
  try {
    size_t used = 0;
    double v = std::stod(toks[i], &used);
    if (used != toks[i].size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(origin + ": signal field '" + what +
                          "' is not a number");
  }
}

SceneSignal parse_signal(const std::string& value, const std::string& origin) {
  auto toks = split_ws(value);
  if (toks.empty())
    throw ValidationError(origin + ": empty signal line");
  SceneSignal sig;
  if (toks[0] == "upsweep" || toks[0] == "tone") {
    sig.kind = toks[0] == "tone" ? SignalKind::kTone : SignalKind::kUpsweep;
    sig.start_s = num_tok(toks, 1, "start", origin);
    sig.duration_s = num_tok(toks, 2, "duration", origin);
    sig.f0_hz = num_tok(toks, 3, "f0", origin);
    if (sig.kind == SignalKind::kUpsweep) {
      sig.f1_hz = num_tok(toks, 4, "f1", origin);
      sig.snr_db = num_tok(toks, 5, "snr_db", origin);
      if (toks.size() != 6)
        throw ValidationError(origin + ": upsweep takes 5 fields");
    } else {
      sig.f1_hz = sig.f0_hz;
      sig.snr_db = num_tok(toks, 4, "snr_db", origin);
      if (toks.size() != 5)
        throw ValidationError(origin + ": tone takes 4 fields");
    }
  } else if (toks[0] == "pulse_train") {
    sig.kind = SignalKind::kPulseTrain;
    sig.start_s = num_tok(toks, 1, "start", origin);
    sig.period_s = num_tok(toks, 2, "period", origin);
    double n = num_tok(toks, 3, "n_pulses", origin);
    sig.n_pulses = static_cast<size_t>(n);
    sig.pulse_dur_s = num_tok(toks, 4, "pulse_dur", origin);
    sig.f0_hz = num_tok(toks, 5, "f_lo", origin);
    sig.f1_hz = num_tok(toks, 6, "f_hi", origin);
    sig.snr_db = num_tok(toks, 7, "snr_db", origin);
    sig.jitter_frac = num_tok(toks, 8, "jitter_frac", origin);
    if (toks.size() != 9)
      throw ValidationError(origin + ": pulse_train takes 8 fields");
  } else {
    throw ValidationError(origin + ": unknown signal kind '" + toks[0] + "'");
  }
  return sig;
}

RuleWindow window_from(const Section& s, const std::string& stem,
                       const std::string& origin) {
  RuleWindow w;
  if (s.has("min_" + stem)) w.lo = to_double(s, "min_" + stem, origin);
  if (s.has("max_" + stem)) w.hi = to_double(s, "max_" + stem, origin);
  return w;
}

DetectorConfig parse_detector(const Section& s, const std::string& id,
                              const std::string& origin) {
  static const std::set<std::string> common = {
      "kind",        "tag",       "window",      "hop",
      "window_kind", "binarize_p", "connectivity", "context_pad"};
  static const std::set<std::string> type1_keys = {
      "min_duration", "max_duration", "min_bandwidth", "max_bandwidth",
      "min_slope",    "max_slope",    "min_energy",    "max_energy"};
  static const std::set<std::string> type2_keys = {
      "band_lo",    "band_hi",        "pulse_threshold", "min_gap",
      "min_pulses", "min_regularity", "max_period"};
  static const std::set<std::string> template_keys = {"template",
                                                      "corr_threshold"};
  static const std::set<std::string> hog_keys = {
      "model",    "patch_frames", "patch_bins",
      "hog_cell", "hog_bins",     "min_score"};

  DetectorConfig c;
  c.detector_id = id;
  c.kind = detector_kind_from_string(s.get("kind"));

  std::set<std::string> allowed = common;
  const std::set<std::string>* extra = nullptr;
  switch (c.kind) {
    case DetectorKind::kType1: extra = &type1_keys; break;
    case DetectorKind::kType2: extra = &type2_keys; break;
    case DetectorKind::kTemplate: extra = &template_keys; break;
    case DetectorKind::kHogAnn: extra = &hog_keys; break;
  }
  allowed.insert(extra->begin(), extra->end());
  check_keys(s, allowed, origin);

  if (s.has("tag")) c.tag = s.get("tag");
  if (s.has("window")) c.dsp.window_len = to_u64(s, "window", origin);
  if (s.has("hop")) c.dsp.hop = to_u64(s, "hop", origin);
  if (s.has("window_kind"))
    c.dsp.window = window_kind_from_string(s.get("window_kind"));
  if (s.has("binarize_p")) c.dsp.binarize_p = to_double(s, "binarize_p", origin);
  if (s.has("connectivity"))
    c.dsp.connectivity = static_cast<int>(to_u64(s, "connectivity", origin));
  if (s.has("context_pad")) c.context_pad_s = to_double(s, "context_pad", origin);

  switch (c.kind) {
    case DetectorKind::kType1:
      c.rules.duration_s = window_from(s, "duration", origin);
      c.rules.bandwidth_hz = window_from(s, "bandwidth", origin);
      c.rules.slope_hz_per_s = window_from(s, "slope", origin);
      c.rules.energy = window_from(s, "energy", origin);
      break;
    case DetectorKind::kType2:
      c.band_lo_hz = to_double(s, "band_lo", origin);
      c.band_hi_hz = to_double(s, "band_hi", origin);
      c.pulse.threshold = to_double(s, "pulse_threshold", origin);
      c.pulse.min_gap_s = to_double(s, "min_gap", origin);
      if (s.has("min_pulses"))
        c.train.min_pulses = to_u64(s, "min_pulses", origin);
      if (s.has("min_regularity"))
        c.train.min_regularity = to_double(s, "min_regularity", origin);
      if (s.has("max_period"))
        c.train.max_period_s = to_double(s, "max_period", origin);
      break;
    case DetectorKind::kTemplate:
      c.template_path = s.get("template");
      if (s.has("corr_threshold"))
        c.corr_threshold = to_double(s, "corr_threshold", origin);
      break;
    case DetectorKind::kHogAnn:
      c.model_path = s.get("model");
      if (s.has("patch_frames"))
        c.patch_frames = to_u64(s, "patch_frames", origin);
      if (s.has("patch_bins")) c.patch_bins = to_u64(s, "patch_bins", origin);
      if (s.has("hog_cell")) c.hog_cell = to_u64(s, "hog_cell", origin);
      if (s.has("hog_bins")) c.hog_bins = to_u64(s, "hog_bins", origin);
      if (s.has("min_score")) c.min_score = to_double(s, "min_score", origin);
      break;
  }
  return c;
}

}  // namespace

JobConfigFile parse_job_config_text(const std::string& text,
                                    const std::string& origin) {
  std::vector<Section> sections;
  {
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']') bad(origin, lineno, "unterminated section header");
        sections.push_back({trim(t.substr(1, t.size() - 2)), lineno, {}});
        if (sections.back().header.empty())
          bad(origin, lineno, "empty section header");
        continue;
      }
      if (sections.empty())
        bad(origin, lineno, "key outside any [section]");
      size_t eq = t.find('=');
      if (eq == std::string::npos)
        bad(origin, lineno, "expected 'key = value'");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) bad(origin, lineno, "empty key");
      sections.back().kv.emplace_back(key, value);
    }
  }

  JobConfigFile cfg;
  cfg.config_hash = fnv1a64(text);
  bool saw_archive = false, saw_job = false, saw_scene = false;

  for (const Section& s : sections) {
    if (s.header == "archive") {
      if (saw_archive) bad(origin, s.line, "duplicate [archive] section");
      saw_archive = true;
      check_keys(s, {"root", "pattern", "manifest"}, origin);
      if (s.has("root")) cfg.archive_root = s.get("root");
      if (s.has("pattern")) cfg.archive_pattern = s.get("pattern");
      if (s.has("manifest")) cfg.archive_manifest = s.get("manifest");
      if (cfg.archive_root.empty() && cfg.archive_manifest.empty())
        bad(origin, s.line, "[archive] needs root or manifest");
    } else if (s.header == "job") {
      if (saw_job) bad(origin, s.line, "duplicate [job] section");
      saw_job = true;
      check_keys(s,
                 {"job_id", "unit_len", "pad", "workers", "backend", "output",
                  "merge_dt", "merge_df"},
                 origin);
      if (s.has("job_id")) cfg.job.job_id = s.get("job_id");
      if (s.has("unit_len")) cfg.job.unit_len_s = to_double(s, "unit_len", origin);
      if (s.has("pad")) {
        cfg.job.pad_s = to_double(s, "pad", origin);
        cfg.pad_set = true;
      }
      if (s.has("workers"))
        cfg.job.workers = static_cast<size_t>(to_u64(s, "workers", origin));
      if (s.has("backend"))
        cfg.job.output_backend = backend_from_string(s.get("backend"));
      if (s.has("output")) cfg.job.output_path = s.get("output");
      if (s.has("merge_dt")) cfg.tol.dt_s = to_double(s, "merge_dt", origin);
      if (s.has("merge_df")) cfg.tol.df_hz = to_double(s, "merge_df", origin);
    } else if (s.header.rfind("detector ", 0) == 0) {
      std::string id = trim(s.header.substr(9));
      if (id.empty()) bad(origin, s.line, "detector section without an id");
      for (const DetectorConfig& d : cfg.detectors)
        if (d.detector_id == id)
          bad(origin, s.line, "duplicate detector id '" + id + "'");
      cfg.detectors.push_back(parse_detector(s, id, origin));
    } else if (s.header == "scene") {
      if (saw_scene) bad(origin, s.line, "duplicate [scene] section");
      saw_scene = true;
      check_keys(s,
                 {"duration", "rate", "noise_rms", "seed", "channel", "start",
                  "truth_out", "signal"},
                 origin);
      SceneSpec scene;
      scene.duration_s = to_double(s, "duration", origin);
      if (s.has("rate")) scene.sample_rate = to_double(s, "rate", origin);
      if (s.has("noise_rms")) scene.noise_rms = to_double(s, "noise_rms", origin);
      if (s.has("seed")) scene.seed = to_u64(s, "seed", origin);
      if (s.has("channel")) scene.channel_id = s.get("channel");
      if (s.has("start")) scene.start_utc = parse_iso8601(s.get("start"));
      if (s.has("truth_out")) cfg.scene_truth_out = s.get("truth_out");
      for (const auto& [k, v] : s.kv)
        if (k == "signal") scene.signals.push_back(parse_signal(v, origin));
      cfg.scene = std::move(scene);
    } else {
      bad(origin, s.line, "unknown section [" + s.header + "]");
    }
  }

  if (!saw_archive)
    throw ValidationError(origin + ": missing [archive] section");
  if (!saw_job) throw ValidationError(origin + ": missing [job] section");
  if (cfg.job.job_id.empty())
    throw ValidationError(origin + ": [job] needs a job_id");
  if (cfg.job.output_path.empty())
    throw ValidationError(origin + ": [job] needs an output path");
  if (cfg.detectors.empty())
    throw ValidationError(origin + ": no [detector <id>] sections");
  for (const DetectorConfig& d : cfg.detectors)
    cfg.job.detector_ids.push_back(d.detector_id);

  if (!cfg.pad_set) {
    double pad = 0.0;
    for (const DetectorConfig& d : cfg.detectors)
      pad = std::max(pad, d.context_pad_s);
    cfg.job.pad_s = pad;
  }
  return cfg;
}

JobConfigFile parse_job_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_job_config_text(ss.str(), path);
}

}  // namespace adamine
