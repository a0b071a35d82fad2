#ifndef ADAMINE_CLASSIFY_HPP
#define ADAMINE_CLASSIFY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace adamine {

// Feed-forward network, logistic activation on every layer including the
// single output unit.
struct MlpModel {
  std::vector<size_t> layer_sizes;  // input, hidden..., 1
  // weights[l] is row-major [out x in] for the transition l -> l+1
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  uint64_t seed = 0;
  std::vector<std::string> feature_names;

  bool operator==(const MlpModel&) const = default;
};

// 5-level ordinal analyst score mapped onto [0, 1].
struct HumanScore {
  std::string event_id;
  std::string analyst_id;
  double score = 0.0;  // one of {0, 0.25, 0.5, 0.75, 1}
};

bool is_valid_human_score_value(double s);

struct TrainHyper {
  std::vector<size_t> layer_sizes;
  double learning_rate = 0.1;
  size_t epochs = 100;
  size_t batch = 32;
  uint64_t seed = 1;
};

struct TrainResult {
  MlpModel model;
  double final_loss = 0.0;
  std::vector<double> epoch_losses;  // mean cross-entropy at each epoch end
};

using FeatureMatrix = std::vector<std::vector<double>>;

// Weights start uniform in +-1/sqrt(fan_in) from the seeded generator,
// biases at zero; epochs=0 returns exactly that initialization. Mini-batch
// gradient descent on mean cross-entropy, epoch order reshuffled from the
// same generator. Throws TrainingError naming the epoch if the loss goes
// non-finite.
TrainResult mlp_train(const FeatureMatrix& features,
                      const std::vector<int>& labels, const TrainHyper& hyper);

// Forward pass; output clamped to (0, 1) by 1e-12 on both sides.
double mlp_predict(const MlpModel& model, const std::vector<double>& x);

// Mean cross-entropy over the set and its analytic parameter gradients,
// laid out layer by layer (weights row-major, then biases). Shared by
// training and the finite-difference check.
double mlp_loss_and_gradients(const MlpModel& model,
                              const FeatureMatrix& features,
                              const std::vector<int>& labels,
                              std::vector<double>* gradients);

// Flattened parameter vector view used by the gradient check.
std::vector<double> mlp_parameters(const MlpModel& model);
void mlp_set_parameters(MlpModel& model, const std::vector<double>& params);

// Appends two columns per row: the analyst score (0.5 where missing) and a
// missing indicator (1 = no score). Scores naming unknown event ids raise
// ValidationError listing the offenders.
FeatureMatrix hk_augment(const FeatureMatrix& features,
                         const std::vector<std::string>& event_ids,
                         const std::map<std::string, double>& scores);

// Versioned text format, header "#adamine-mlp v1"; weights and biases with
// 17 significant digits so round-trips are bit-identical.
void write_mlp_model(const std::string& path, const MlpModel& model);
std::string mlp_model_to_string(const MlpModel& model);
MlpModel read_mlp_model(const std::string& path);

}  // namespace adamine

#endif  // ADAMINE_CLASSIFY_HPP
