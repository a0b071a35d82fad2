#include "adamine/registry.hpp"

#include <algorithm>
#include <cmath>

#include "adamine/dsp.hpp"
#include "adamine/errors.hpp"

namespace adamine {

DetectorKind detector_kind_from_string(const std::string& s) {
  if (s == "type1") return DetectorKind::kType1;
  if (s == "type2") return DetectorKind::kType2;
  if (s == "template") return DetectorKind::kTemplate;
  if (s == "hog_ann") return DetectorKind::kHogAnn;
  throw ValidationError("unknown detector kind: '" + s + "'");
}

std::string to_string(DetectorKind k) {
  switch (k) {
    case DetectorKind::kType1: return "type1";
    case DetectorKind::kType2: return "type2";
    case DetectorKind::kTemplate: return "template";
    case DetectorKind::kHogAnn: return "hog_ann";
  }
  return "?";
}

bool is_reserved_detector_id(const std::string& id) {
  // multi-stage recognizers from the wider tool family, not built here
  return id == "israt" || id == "elephant_pulse";
}

namespace {

void validate_config(const DetectorConfig& c) {
  if (c.detector_id.empty())
    throw ValidationError("detector id must not be empty");
  if (is_reserved_detector_id(c.detector_id))
    throw ValidationError("detector id '" + c.detector_id +
                          "' is reserved but not implemented");
  if (c.dsp.window_len == 0 || c.dsp.hop == 0)
    throw ValidationError(c.detector_id + ": window/hop must be positive");
  if (c.dsp.connectivity != 4 && c.dsp.connectivity != 8)
    throw ValidationError(c.detector_id + ": connectivity must be 4 or 8");
  if (!(c.dsp.binarize_p > 0.0 && c.dsp.binarize_p < 100.0))
    throw ValidationError(c.detector_id + ": binarize_p must be in (0, 100)");
  if (c.context_pad_s < 0.0)
    throw ValidationError(c.detector_id + ": context_pad must be >= 0");

  switch (c.kind) {
    case DetectorKind::kType1:
      for (const RuleWindow* w :
           {&c.rules.duration_s, &c.rules.bandwidth_hz, &c.rules.slope_hz_per_s,
            &c.rules.energy})
        if (w->lo > w->hi)
          throw ValidationError(c.detector_id + ": rule window has lo > hi");
      break;
    case DetectorKind::kType2:
      if (!(c.band_lo_hz < c.band_hi_hz))
        throw ValidationError(c.detector_id + ": type2 needs band_lo < band_hi");
      if (!(c.pulse.threshold > 0.0))
        throw ValidationError(c.detector_id + ": pulse threshold must be > 0");
      if (c.train.min_pulses < 3)
        throw ValidationError(c.detector_id + ": min_pulses must be >= 3");
      break;
    case DetectorKind::kTemplate:
      if (c.template_path.empty())
        throw ValidationError(c.detector_id + ": template kind needs a "
                              "template path");
      break;
    case DetectorKind::kHogAnn:
      if (c.model_path.empty())
        throw ValidationError(c.detector_id +
                              ": hog_ann kind needs a model path");
      if (c.patch_frames % c.hog_cell != 0 || c.patch_bins % c.hog_cell != 0)
        throw ValidationError(c.detector_id +
                              ": patch dims must be divisible by hog_cell");
      break;
  }
}

std::vector<EventRecord> finish(std::vector<EventRecord> events,
                                const SampleBlock& block,
                                const DetectorConfig& c) {
  for (EventRecord& e : events) {
    e.channel_id = block.channel_id;
    e.detector_id = c.detector_id;
    e.tag = c.tag;
  }
  return events;
}

}  // namespace

void DetectorRegistry::register_detector(const DetectorConfig& config) {
  validate_config(config);
  if (configs_.count(config.detector_id) || custom_.count(config.detector_id))
    throw ValidationError("detector id registered twice: " +
                          config.detector_id);
  configs_[config.detector_id] = config;
}

void DetectorRegistry::register_custom(const std::string& id, DetectorFn fn,
                                       double context_pad_s) {
  if (configs_.count(id) || custom_.count(id))
    throw ValidationError("detector id registered twice: " + id);
  custom_[id] = {std::move(fn), context_pad_s};
}

bool DetectorRegistry::has(const std::string& id) const {
  return configs_.count(id) != 0 || custom_.count(id) != 0;
}

const DetectorConfig& DetectorRegistry::config(const std::string& id) const {
  auto it = configs_.find(id);
  if (it == configs_.end())
    throw ArgumentError("no config for detector id: " + id);
  return it->second;
}

double DetectorRegistry::context_pad_s(const std::string& id) const {
  auto it = configs_.find(id);
  if (it != configs_.end()) return it->second.context_pad_s;
  auto ct = custom_.find(id);
  if (ct != custom_.end()) return ct->second.second;
  throw ArgumentError("unknown detector id: " + id);
}

std::vector<std::string> DetectorRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, c] : configs_) out.push_back(id);
  for (const auto& [id, c] : custom_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

DetectorFn DetectorRegistry::resolve(const std::string& id) const {
  auto ct = custom_.find(id);
  if (ct != custom_.end()) return ct->second.first;
  auto it = configs_.find(id);
  if (it == configs_.end()) {
    if (is_reserved_detector_id(id))
      throw ValidationError("detector id '" + id +
                            "' is reserved but not implemented");
    throw ValidationError("unknown detector id: '" + id + "'");
  }
  const DetectorConfig c = it->second;

  switch (c.kind) {
    case DetectorKind::kType1:
      return [c](const SampleBlock& block) {
        Spectrogram spec = stft(block, c.dsp.window_len, c.dsp.hop, c.dsp.window);
        return finish(
            type1_detect(spec, c.rules, c.dsp.binarize_p, c.dsp.connectivity),
            block, c);
      };
    case DetectorKind::kType2:
      return [c](const SampleBlock& block) {
        Spectrogram spec = stft(block, c.dsp.window_len, c.dsp.hop, c.dsp.window);
        return finish(
            type2_detect(spec, c.band_lo_hz, c.band_hi_hz, c.pulse, c.train),
            block, c);
      };
    case DetectorKind::kTemplate: {
      Template tmpl = load_template(c.template_path);
      return [c, tmpl](const SampleBlock& block) {
        Spectrogram spec = stft(block, c.dsp.window_len, c.dsp.hop, c.dsp.window);
        return finish(template_correlate(spec, tmpl, c.corr_threshold), block,
                      c);
      };
    }
    case DetectorKind::kHogAnn: {
      MlpModel model = read_mlp_model(c.model_path);
      size_t descriptor_len = (c.patch_frames / c.hog_cell) *
                              (c.patch_bins / c.hog_cell) * c.hog_bins;
      if (model.layer_sizes.front() != descriptor_len)
        throw ValidationError(
            c.detector_id + ": model input " +
            std::to_string(model.layer_sizes.front()) +
            " does not match HOG descriptor length " +
            std::to_string(descriptor_len));
      return [c, model](const SampleBlock& block) {
        Spectrogram spec = stft(block, c.dsp.window_len, c.dsp.hop, c.dsp.window);
        BinaryMask mask = binarize(spec, c.dsp.binarize_p);
        std::vector<EventRecord> events;
        if (spec.n_frames < c.patch_frames || spec.n_bins < c.patch_bins)
          return events;
        for (const Region& region :
             connected_regions(mask, c.dsp.connectivity)) {
          // fixed-size patch centered on the region, clamped to bounds
          size_t fc = (region.frame_lo + region.frame_hi) / 2;
          size_t bc = (region.bin_lo + region.bin_hi) / 2;
          size_t f0 = fc >= c.patch_frames / 2 ? fc - c.patch_frames / 2 : 0;
          size_t b0 = bc >= c.patch_bins / 2 ? bc - c.patch_bins / 2 : 0;
          f0 = std::min(f0, spec.n_frames - c.patch_frames);
          b0 = std::min(b0, spec.n_bins - c.patch_bins);
          std::vector<double> patch(c.patch_frames * c.patch_bins);
          for (size_t f = 0; f < c.patch_frames; ++f)
            for (size_t b = 0; b < c.patch_bins; ++b)
              patch[f * c.patch_bins + b] = spec.at(f0 + f, b0 + b);
          HogDescriptor d = hog_features(patch, c.patch_frames, c.patch_bins,
                                         c.hog_cell, c.hog_bins);
          double p = mlp_predict(model, d.vector);
          if (p < c.min_score) continue;
          events.push_back(event_from_bbox(spec.geom, region.bbox, p));
        }
        return finish(std::move(events), block, c);
      };
    }
  }
  throw ArgumentError("bad detector kind");
}

}  // namespace adamine
