#ifndef ADAMINE_CONFIG_HPP
#define ADAMINE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "adamine/ada.hpp"
#include "adamine/registry.hpp"
#include "adamine/synth.hpp"

namespace adamine {

/*
 * Job config file: "[section]" headers with "key = value" lines. Sections
 * are [archive], [job], one [detector <id>] per detector, and an optional
 * [scene]. Parsing is fail-fast: unknown sections or keys are errors,
 * duplicate keys are errors (the scene "signal" key may repeat).
 */
struct JobConfigFile {
  std::string archive_root;
  std::string archive_pattern = "*.wav";
  std::string archive_manifest;  // read this instead of scanning when set

  JobSpec job;
  bool pad_set = false;  // unset pad defaults to the longest detector context
  MergeTol tol;

  std::vector<DetectorConfig> detectors;

  std::optional<SceneSpec> scene;
  std::string scene_truth_out;  // flat store of ground truth, optional

  uint64_t config_hash = 0;  // FNV-1a of the raw file bytes
};

JobConfigFile parse_job_config(const std::string& path);
JobConfigFile parse_job_config_text(const std::string& text,
                                    const std::string& origin);

uint64_t fnv1a64(const std::string& bytes);

}  // namespace adamine

#endif  // ADAMINE_CONFIG_HPP
