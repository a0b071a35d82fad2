#ifndef ADAMINE_REGISTRY_HPP
#define ADAMINE_REGISTRY_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adamine/archive.hpp"
#include "adamine/classify.hpp"
#include "adamine/event.hpp"
#include "adamine/pulsetrain.hpp"
#include "adamine/recognizers.hpp"
#include "adamine/segmentation.hpp"

namespace adamine {

enum class DetectorKind { kType1, kType2, kTemplate, kHogAnn };

DetectorKind detector_kind_from_string(const std::string& s);
std::string to_string(DetectorKind k);

struct DspParams {
  size_t window_len = 256;
  size_t hop = 128;
  WindowKind window = WindowKind::kHann;
  double binarize_p = 90.0;
  int connectivity = 8;
};

struct DetectorConfig {
  std::string detector_id;
  DetectorKind kind = DetectorKind::kType1;
  DspParams dsp;
  std::string tag;  // copied onto emitted events

  Type1Rules rules;  // type1

  double band_lo_hz = 0.0;  // type2 band / hog_ann band restriction
  double band_hi_hz = 0.0;
  PulseParams pulse;  // type2
  TrainParams train;

  std::string template_path;  // template: base path of <x>.pgm/<x>.meta
  double corr_threshold = 0.6;

  std::string model_path;  // hog_ann
  size_t patch_frames = 32;
  size_t patch_bins = 32;
  size_t hog_cell = 8;
  size_t hog_bins = 9;
  double min_score = 0.5;

  double context_pad_s = 0.0;
};

// A resolved, reentrant pipeline: SampleBlock in, events out (channel,
// detector id and tag filled; run/event ids left to the scheduler).
using DetectorFn =
    std::function<std::vector<EventRecord>(const SampleBlock&)>;

// Detector ids known from the wider tool family but not implemented here;
// registering or resolving them fails with a dedicated message.
bool is_reserved_detector_id(const std::string& id);

class DetectorRegistry {
public:
  // Validates kind-specific required parameters up front.
  void register_detector(const DetectorConfig& config);

  // Test hook: bind an id straight to a function.
  void register_custom(const std::string& id, DetectorFn fn,
                       double context_pad_s = 0.0);

  bool has(const std::string& id) const;
  const DetectorConfig& config(const std::string& id) const;
  double context_pad_s(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Builds the runnable pipeline, loading any template/model it needs.
  // Unknown ids fail here (and therefore at plan time).
  DetectorFn resolve(const std::string& id) const;

private:
  std::map<std::string, DetectorConfig> configs_;
  std::map<std::string, std::pair<DetectorFn, double>> custom_;
};

}  // namespace adamine

#endif  // ADAMINE_REGISTRY_HPP
