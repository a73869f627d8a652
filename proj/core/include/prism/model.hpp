#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prism/autodiff.hpp"
#include "prism/experts.hpp"
#include "prism/graph.hpp"
#include "prism/params.hpp"
#include "prism/structure.hpp"

namespace prism {

struct ExpertToggles {
  bool atomistic = true;
  bool similarity = true;
  bool multiscale = true;
  bool cell = true;

  bool uses_superatom() const { return multiscale || cell; }
  bool operator==(const ExpertToggles&) const = default;
};

struct ModelConfig {
  int dim = 16;
  int layers = 2;
  int rbf_centers = 16;
  double r_c = 4.0;   // atomistic cutoff, Angstrom
  double R_c = 16.0;  // cell-graph cutoff, Angstrom
  double r_f = 0.5;   // feature-space cutoff, embedding units
  int max_degree = 8;
  bool direction_features = false;
  ExpertToggles experts;

  /// Throws ConfigError: cutoffs > 0, R_c > r_c, layers >= 1, dim >= 1,
  /// max_degree >= 1, rbf_centers >= 2, at least one atom-level expert.
  void validate() const;
  int edge_input_dim() const { return rbf_centers + (direction_features ? 3 : 0); }
  RbfBasis atomistic_basis() const { return {rbf_centers, r_c}; }
  RbfBasis cell_basis() const { return {rbf_centers, R_c}; }
  /// Minimum-image distances are bounded by the cell, not by r_f, so the
  /// similarity basis spans the cell cutoff.
  RbfBasis similarity_basis() const { return {rbf_centers, R_c}; }

  bool operator==(const ModelConfig&) const = default;
};

/// Target standardization: prediction = raw * scale + mean.
struct Normalizer {
  double mean = 0.0;
  double scale = 1.0;
  bool operator==(const Normalizer&) const = default;
};

/// Topologies that do not depend on embeddings, with their encoded RBF inputs.
struct StaticGraphs {
  PeriodicGraph atomistic;
  PeriodicGraph cell;
  PeriodicGraph multiscale;
  Matrix atomistic_basis;
  Matrix cell_basis;
};

StaticGraphs prepare_graphs(const CrystalStructure& s, const ModelConfig& config);

struct ExpertOutputs {
  std::optional<ad::Var> atomistic;
  std::optional<ad::Var> similarity;
  std::optional<LayerState> multiscale;
  std::optional<ad::Var> cell;
};

class PrismModel {
 public:
  PrismModel(ModelConfig config, ParamStore params, Normalizer normalizer = {});

  /// Fresh parameters: alpha = 0 and fusion logits = 0 in every layer.
  static PrismModel initialize(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const ParamStore& params() const { return params_; }
  ParamStore& params() { return params_; }
  const Normalizer& normalizer() const { return normalizer_; }
  void set_normalizer(Normalizer n) { normalizer_ = n; }

  /// Input state: element embeddings and (if used) the attention superatom.
  LayerState initial_state(ad::Tape& t, const CrystalStructure& s) const;

  /// Every enabled expert reads the same input `state`.
  /// The similarity graph is rebuilt from state.h_atoms unless `frozen_similarity`
  /// is given; the graph actually used is written to `used_similarity`.
  ExpertOutputs run_experts(ad::Tape& t, const LayerState& state, const CrystalStructure& s,
                            const StaticGraphs& graphs, int layer,
                            const PeriodicGraph* frozen_similarity = nullptr,
                            PeriodicGraph* used_similarity = nullptr) const;

  /// One full layer: run_experts, then the superatom gate and atom softmax fusion.
  LayerState prism_layer(ad::Tape& t, const LayerState& state, const CrystalStructure& s,
                         const StaticGraphs& graphs, int layer,
                         const PeriodicGraph* frozen_similarity = nullptr,
                         PeriodicGraph* used_similarity = nullptr) const;

  struct Forward {
    ad::Var raw;         // readout in normalized units
    ad::Var prediction;  // target units
    LayerState final_state;
    std::vector<PeriodicGraph> similarity_graphs;  // one per layer when enabled
  };

  Forward forward(ad::Tape& t, const CrystalStructure& s, const StaticGraphs& graphs,
                  const std::vector<PeriodicGraph>* frozen_similarity = nullptr) const;

  double predict(const CrystalStructure& s) const;
  double predict(const CrystalStructure& s, const StaticGraphs& graphs) const;

  struct LossGradient {
    double loss = 0.0;
    double prediction = 0.0;
    Gradients gradients;
    std::vector<PeriodicGraph> similarity_graphs;
  };

  /// Smooth-L1 loss against s.target() and its gradient for every parameter.
  LossGradient loss_and_gradient(const CrystalStructure& s, const StaticGraphs& graphs,
                                 double huber_delta,
                                 const std::vector<PeriodicGraph>* frozen_similarity = nullptr) const;

  /// Loss only, for finite differences.
  double loss(const CrystalStructure& s, const StaticGraphs& graphs, double huber_delta,
              const std::vector<PeriodicGraph>* frozen_similarity = nullptr) const;

 private:
  ModelConfig config_;
  ParamStore params_;
  Normalizer normalizer_;
};

std::string layer_prefix(int layer);

}  // namespace prism
