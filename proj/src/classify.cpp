#include "adamine/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "adamine/errors.hpp"
#include "adamine/rng.hpp"

namespace adamine {

namespace {

constexpr double kProbClamp = 1e-12;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double p) {
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

void check_shapes(const MlpModel& m) {
  if (m.layer_sizes.size() < 2 || m.layer_sizes.back() != 1)
    throw ArgumentError("layer_sizes must end in a single output unit");
  if (m.weights.size() != m.layer_sizes.size() - 1 ||
      m.biases.size() != m.layer_sizes.size() - 1)
    throw ArgumentError("model layer count mismatch");
  for (size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    if (m.weights[l].size() != m.layer_sizes[l] * m.layer_sizes[l + 1] ||
        m.biases[l].size() != m.layer_sizes[l + 1])
      throw ArgumentError("model parameter shape mismatch at layer " +
                          std::to_string(l));
  }
}

// activations per layer for one sample
void forward(const MlpModel& m, const std::vector<double>& x,
             std::vector<std::vector<double>>& acts) {
  acts.assign(m.layer_sizes.size(), {});
  acts[0] = x;
  for (size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    size_t in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
    acts[l + 1].resize(out);
    for (size_t o = 0; o < out; ++o) {
      double z = m.biases[l][o];
      const double* w = m.weights[l].data() + o * in;
      for (size_t i = 0; i < in; ++i) z += w[i] * acts[l][i];
      acts[l + 1][o] = logistic(z);
    }
  }
}

MlpModel init_model(const TrainHyper& hyper, size_t input_dim) {
  if (hyper.layer_sizes.size() < 2 || hyper.layer_sizes.back() != 1)
    throw ArgumentError("layer_sizes must end in a single output unit");
  if (hyper.layer_sizes.front() != input_dim)
    throw ArgumentError("input layer size " +
                        std::to_string(hyper.layer_sizes.front()) +
                        " does not match feature dimension " +
                        std::to_string(input_dim));
  MlpModel m;
  m.layer_sizes = hyper.layer_sizes;
  m.seed = hyper.seed;
  Rng rng(hyper.seed);
  for (size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    size_t in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(in * out);
    for (double& v : w) v = rng.uniform(-scale, scale);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(out, 0.0);
  }
  return m;
}

}  // namespace

bool is_valid_human_score_value(double s) {
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0})
    if (s == v) return true;
  return false;
}

double mlp_predict(const MlpModel& model, const std::vector<double>& x) {
  check_shapes(model);
  if (x.size() != model.layer_sizes.front())
    throw ArgumentError("feature length " + std::to_string(x.size()) +
                        " does not match model input " +
                        std::to_string(model.layer_sizes.front()));
  std::vector<std::vector<double>> acts;
  forward(model, x, acts);
  return clamp_prob(acts.back()[0]);
}

double mlp_loss_and_gradients(const MlpModel& model,
                              const FeatureMatrix& features,
                              const std::vector<int>& labels,
                              std::vector<double>* gradients) {
  check_shapes(model);
  if (features.size() != labels.size() || features.empty())
    throw ArgumentError("features/labels size mismatch or empty");
  const size_t n = features.size();
  const size_t L = model.layer_sizes.size() - 1;

  std::vector<std::vector<double>> gw(L), gb(L);
  for (size_t l = 0; l < L; ++l) {
    gw[l].assign(model.weights[l].size(), 0.0);
    gb[l].assign(model.biases[l].size(), 0.0);
  }

  double loss = 0.0;
  std::vector<std::vector<double>> acts;
  for (size_t s = 0; s < n; ++s) {
    if (features[s].size() != model.layer_sizes.front())
      throw ArgumentError("feature row " + std::to_string(s) +
                          " has wrong dimension");
    forward(model, features[s], acts);
    double p = clamp_prob(acts.back()[0]);
    double y = labels[s] ? 1.0 : 0.0;
    loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    if (!gradients) continue;

    // delta at the output of layer l+1
    std::vector<double> delta{acts.back()[0] - y};
    for (size_t l = L; l-- > 0;) {
      size_t in = model.layer_sizes[l], out = model.layer_sizes[l + 1];
      for (size_t o = 0; o < out; ++o) {
        gb[l][o] += delta[o];
        double* g = gw[l].data() + o * in;
        for (size_t i = 0; i < in; ++i) g[i] += delta[o] * acts[l][i];
      }
      if (l == 0) break;
      std::vector<double> prev(in, 0.0);
      for (size_t o = 0; o < out; ++o) {
        const double* w = model.weights[l].data() + o * in;
        for (size_t i = 0; i < in; ++i) prev[i] += w[i] * delta[o];
      }
      for (size_t i = 0; i < in; ++i)
        prev[i] *= acts[l][i] * (1.0 - acts[l][i]);
      delta = std::move(prev);
    }
  }
  loss /= static_cast<double>(n);
  if (gradients) {
    gradients->clear();
    for (size_t l = 0; l < L; ++l) {
      for (double v : gw[l]) gradients->push_back(v / static_cast<double>(n));
      for (double v : gb[l]) gradients->push_back(v / static_cast<double>(n));
    }
  }
  return loss;
}

std::vector<double> mlp_parameters(const MlpModel& model) {
  std::vector<double> out;
  for (size_t l = 0; l < model.weights.size(); ++l) {
    out.insert(out.end(), model.weights[l].begin(), model.weights[l].end());
    out.insert(out.end(), model.biases[l].begin(), model.biases[l].end());
  }
  return out;
}

void mlp_set_parameters(MlpModel& model, const std::vector<double>& params) {
  size_t pos = 0;
  for (size_t l = 0; l < model.weights.size(); ++l) {
    for (double& v : model.weights[l]) v = params[pos++];
    for (double& v : model.biases[l]) v = params[pos++];
  }
  if (pos != params.size())
    throw ArgumentError("parameter vector length mismatch");
}

TrainResult mlp_train(const FeatureMatrix& features,
                      const std::vector<int>& labels,
                      const TrainHyper& hyper) {
  if (features.empty() || features.size() != labels.size())
    throw ArgumentError("need at least one sample and matching labels");
  for (int y : labels)
    if (y != 0 && y != 1) throw ArgumentError("labels must be 0 or 1");
  for (const auto& row : features)
    for (double v : row)
      if (!std::isfinite(v))
        throw ArgumentError("features contain NaN or Inf");
  if (hyper.batch == 0) throw ArgumentError("batch size must be positive");

  TrainResult result;
  result.model = init_model(hyper, features[0].size());
  MlpModel& model = result.model;
  if (hyper.epochs == 0) {
    result.final_loss =
        mlp_loss_and_gradients(model, features, labels, nullptr);
    return result;
  }

  Rng rng(hyper.seed ^ 0x5DEECE66Dull);  // separate stream from init
  const size_t n = features.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> grads;
  FeatureMatrix batch_x;
  std::vector<int> batch_y;
  for (size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t from = 0; from < n; from += hyper.batch) {
      size_t to = std::min(n, from + hyper.batch);
      batch_x.clear();
      batch_y.clear();
      for (size_t i = from; i < to; ++i) {
        batch_x.push_back(features[order[i]]);
        batch_y.push_back(labels[order[i]]);
      }
      mlp_loss_and_gradients(model, batch_x, batch_y, &grads);
      size_t pos = 0;
      for (size_t l = 0; l < model.weights.size(); ++l) {
        for (double& w : model.weights[l])
          w -= hyper.learning_rate * grads[pos++];
        for (double& b : model.biases[l])
          b -= hyper.learning_rate * grads[pos++];
      }
    }
    double loss = mlp_loss_and_gradients(model, features, labels, nullptr);
    if (!std::isfinite(loss))
      throw TrainingError(
          "training diverged (non-finite loss) at epoch " +
              std::to_string(epoch),
          static_cast<int>(epoch));
    result.epoch_losses.push_back(loss);
  }
  result.final_loss = result.epoch_losses.back();
  return result;
}

FeatureMatrix hk_augment(const FeatureMatrix& features,
                         const std::vector<std::string>& event_ids,
                         const std::map<std::string, double>& scores) {
  if (features.size() != event_ids.size())
    throw ArgumentError("one event id per feature row required");
  std::set<std::string> known(event_ids.begin(), event_ids.end());
  std::string offenders;
  for (const auto& [id, s] : scores) {
    if (!is_valid_human_score_value(s))
      throw ValidationError("human score for '" + id +
                            "' not on the 5-level scale");
    if (!known.count(id)) offenders += offenders.empty() ? id : ", " + id;
  }
  if (!offenders.empty())
    throw ValidationError("scores reference unknown event ids: " + offenders);

  FeatureMatrix out = features;
  for (size_t i = 0; i < out.size(); ++i) {
    auto it = scores.find(event_ids[i]);
    if (it == scores.end()) {
      out[i].push_back(0.5);
      out[i].push_back(1.0);
    } else {
      out[i].push_back(it->second);
      out[i].push_back(0.0);
    }
  }
  return out;
}

std::string mlp_model_to_string(const MlpModel& model) {
  std::ostringstream out;
  out << "#adamine-mlp v1\n";
  for (size_t i = 0; i < model.layer_sizes.size(); ++i)
    out << (i ? "\t" : "") << model.layer_sizes[i];
  out << '\n';
  char buf[40];
  for (size_t l = 0; l < model.weights.size(); ++l) {
    out << "w" << l;
    for (double v : model.weights[l]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << '\t' << buf;
    }
    out << '\n' << "b" << l;
    for (double v : model.biases[l]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
  out << "#seed\t" << model.seed << '\n';
  out << "#features";
  for (const std::string& f : model.feature_names) out << '\t' << f;
  out << '\n';
  return out.str();
}

void write_mlp_model(const std::string& path, const MlpModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << mlp_model_to_string(model);
  if (!out) throw IoError("short write: " + path);
}

MlpModel read_mlp_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "#adamine-mlp v1")
    throw FormatError("missing '#adamine-mlp v1' header: " + path);
  if (!std::getline(in, line))
    throw FormatError("missing layer sizes line: " + path);

  MlpModel m;
  {
    std::istringstream ls(line);
    size_t v;
    while (ls >> v) m.layer_sizes.push_back(v);
  }
  if (m.layer_sizes.size() < 2)
    throw FormatError("need at least two layer sizes: " + path);

  auto parse_row = [&](const std::string& want, size_t count) {
    if (!std::getline(in, line))
      throw FormatError("truncated model file: " + path);
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != want)
      throw FormatError("expected '" + want + "' row, got '" + tag +
                        "': " + path);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.size() != count)
      throw FormatError("row '" + want + "' has " +
                        std::to_string(vals.size()) + " values, expected " +
                        std::to_string(count) + ": " + path);
    return vals;
  };

  for (size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    m.weights.push_back(parse_row(
        "w" + std::to_string(l), m.layer_sizes[l] * m.layer_sizes[l + 1]));
    m.biases.push_back(
        parse_row("b" + std::to_string(l), m.layer_sizes[l + 1]));
  }
  while (std::getline(in, line)) {
    if (line.rfind("#seed\t", 0) == 0) {
      try {
        m.seed = std::stoull(line.substr(6));
      } catch (const std::exception&) {
        throw FormatError("bad #seed line: " + path);
      }
    } else if (line.rfind("#features", 0) == 0) {
      std::string rest = line.substr(9);
      size_t pos = 0;
      while (pos < rest.size() && rest[pos] == '\t') {
        size_t tab = rest.find('\t', pos + 1);
        m.feature_names.push_back(
            rest.substr(pos + 1, tab == std::string::npos ? std::string::npos
                                                          : tab - pos - 1));
        if (tab == std::string::npos) break;
        pos = tab;
      }
    }
  }

  check_shapes(m);
  return m;
}

}  // namespace adamine
