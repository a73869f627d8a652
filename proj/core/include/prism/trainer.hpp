#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prism/model.hpp"
#include "prism/structure.hpp"

namespace prism {

enum class Augmentation { None, RandomRotation };

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 1e-3;
  int epochs = 30;
  int batch_size = 32;
  std::uint64_t seed = 0;
  Augmentation augmentation = Augmentation::None;
  double val_fraction = 0.2;
  double huber_delta = 0.01;  // target units
  int threads = 1;
  /// When false the wall_seconds column is written as 0 so logs are reproducible.
  bool record_wall_time = false;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double train_mae = 0.0;
  double val_mae = 0.0;
  double wall_seconds = 0.0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

struct TrainResult {
  PrismModel model;
  std::vector<EpochLog> log;
  Split split;
};

/// Mean of |pred - target|. Throws LengthMismatch or EmptyInput.
double mae(std::span<const double> preds, std::span<const double> targets);

/// Seeded shuffle; the first round(n * val_fraction) indices validate. With
/// no validation share the training indices double as validation.
Split split_dataset(std::size_t n, double val_fraction, std::uint64_t seed);

/// Predictions in dataset order. Work may fan out over `threads`.
std::vector<double> predict_all(const PrismModel& model, const std::vector<CrystalStructure>& data,
                                int threads = 1);

/// MAE against the stored targets; parameters are not touched.
double evaluate(const PrismModel& model, const std::vector<CrystalStructure>& data, int threads = 1);

/// Adam with the usual defaults (beta1 0.9, beta2 0.999, eps 1e-8).
class Adam {
 public:
  Adam(const ParamStore& params, double learning_rate);
  void step(ParamStore& params, const Gradients& grads);
  long steps() const { return t_; }

 private:
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  Gradients m_;
  Gradients v_;
};

/// Throws DivergenceDetected as soon as a loss turns non-finite.
TrainResult train(const std::vector<CrystalStructure>& dataset, const TrainConfig& config);

/// CSV: epoch,train_loss,train_mae,val_mae,wall_seconds
std::string epoch_log_csv(const std::vector<EpochLog>& log);

struct FusionWeights {
  double gate_cell = 0.0;
  double gate_multi = 0.0;
  double w_atomistic = 0.0;
  double w_similarity = 0.0;
  double w_multiscale = 0.0;
};

/// Effective fusion weights of one layer. Disabled experts get weight 0 and
/// the softmax runs over the enabled ones.
FusionWeights layer_fusion_weights(const PrismModel& model, int layer);

struct FusionReport {
  int layers = 0;
  std::vector<std::vector<FusionWeights>> per_model;  // [model][layer]
  std::vector<FusionWeights> mean;                     // [layer], across models
  std::vector<FusionWeights> stddev;                   // [layer], sample s.d.
  FusionWeights overall_mean;                          // averaged over layers, then models
  FusionWeights overall_stddev;

  /// layer,gate_cell,gate_multi,w_atomistic,w_similarity,w_multiscale,seed_mean,model,
  /// gate_cell_std,gate_multi_std,w_atomistic_std,w_similarity_std,w_multiscale_std
  std::string to_csv() const;
};

/// Throws EmptyInput for no models and LayerMismatch for differing depths.
FusionReport fusion_report(const std::vector<PrismModel>& models);

}  // namespace prism
