#include "prism/model.hpp"

#include <cmath>

#include "prism/error.hpp"

namespace prism {

void ModelConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(r_c)) throw ConfigError("r_c must be > 0");
  if (!positive(R_c)) throw ConfigError("R_c must be > 0");
  if (!(R_c > r_c)) throw ConfigError("R_c must exceed r_c");
  if (!positive(r_f)) throw ConfigError("r_f must be > 0");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (max_degree < 1) throw ConfigError("max_degree must be >= 1");
  if (rbf_centers < 2) throw ConfigError("rbf_centers must be >= 2");
  if (!experts.atomistic && !experts.similarity && !experts.multiscale)
    throw ConfigError("at least one atom-level expert must be enabled");
}

std::string layer_prefix(int layer) { return "layer" + std::to_string(layer); }

StaticGraphs prepare_graphs(const CrystalStructure& s, const ModelConfig& config) {
  StaticGraphs g;
  if (config.experts.atomistic) {
    g.atomistic = build_atomistic_graph(s, config.r_c);
    g.atomistic_basis = edge_basis(g.atomistic, config.atomistic_basis(), config.direction_features);
  }
  if (config.experts.cell) {
    g.cell = build_cell_graph(s, config.R_c);
    g.cell_basis = edge_basis(g.cell, config.cell_basis(), config.direction_features);
  }
  if (config.experts.multiscale) g.multiscale = build_multiscale_graph(s);
  return g;
}

PrismModel::PrismModel(ModelConfig config, ParamStore params, Normalizer normalizer)
    : config_(std::move(config)), params_(std::move(params)), normalizer_(normalizer) {
  config_.validate();
}

PrismModel PrismModel::initialize(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ParamStore p;
  const int d = config.dim;
  const int de = config.edge_input_dim();
  const auto& ex = config.experts;

  Matrix embedding(kMaxAtomicNumber, d);
  for (Eigen::Index i = 0; i < embedding.size(); ++i)
    embedding.data()[i] = rng.normal(0.0, 1.0 / std::sqrt(double(d)));
  p.add("embedding", std::move(embedding));

  if (ex.uses_superatom()) {
    Matrix score(d, 1);
    for (Eigen::Index i = 0; i < score.size(); ++i) score.data()[i] = rng.normal(0.0, 1.0 / std::sqrt(double(d)));
    p.add("superatom.score", std::move(score));
  }
  if (ex.atomistic) experts::add_linear(p, "edge.atomistic", de, d, rng);
  if (ex.cell) experts::add_linear(p, "edge.cell", de, d, rng);

  for (int l = 0; l < config.layers; ++l) {
    const std::string lp = layer_prefix(l);
    if (ex.atomistic) {
      experts::add_mlp2(p, lp + ".atomistic.msg", 3 * d, d, d, rng);
      experts::add_mlp2(p, lp + ".atomistic.upd", 2 * d, d, d, rng);
    }
    if (ex.similarity) {
      experts::add_linear(p, lp + ".edge.similarity", de, d, rng);
      experts::add_mlp2(p, lp + ".similarity.msg", 3 * d, d, d, rng);
      experts::add_mlp2(p, lp + ".similarity.upd", 2 * d, d, d, rng);
    }
    if (ex.cell) {
      experts::add_mlp2(p, lp + ".cell.msg", 3 * d, d, d, rng);
      experts::add_mlp2(p, lp + ".cell.upd", 2 * d, d, d, rng);
    }
    if (ex.multiscale) experts::add_mlp2(p, lp + ".multiscale.phi", d, d, d, rng);
    p.add(lp + ".fusion.alpha", Matrix::Zero(1, 1));
    p.add(lp + ".fusion.logits", Matrix::Zero(1, 3));
  }
  experts::add_mlp2(p, "readout", d, d, 1, rng);
  return PrismModel(config, std::move(p));
}

LayerState PrismModel::initial_state(ad::Tape& t, const CrystalStructure& s) const {
  LayerState state;
  state.h_atoms = experts::encode_atoms(t, s.atomic_numbers());
  if (config_.experts.uses_superatom()) state.h_super = experts::init_superatom(t, state.h_atoms);
  return state;
}

ExpertOutputs PrismModel::run_experts(ad::Tape& t, const LayerState& state,
                                      const CrystalStructure& s, const StaticGraphs& graphs,
                                      int layer, const PeriodicGraph* frozen_similarity,
                                      PeriodicGraph* used_similarity) const {
  const auto& ex = config_.experts;
  const std::string lp = layer_prefix(layer);
  ExpertOutputs out;
  if (ex.atomistic) {
    const auto e = experts::encode_edge_basis(t, graphs.atomistic_basis, "edge.atomistic");
    out.atomistic = experts::mp_expert_forward(t, state.h_atoms, graphs.atomistic, e, lp + ".atomistic");
  }
  if (ex.similarity) {
    PeriodicGraph built;
    if (frozen_similarity == nullptr)
      built = build_similarity_graph(s, state.h_atoms.value(), config_.r_f, config_.max_degree);
    const PeriodicGraph& g = frozen_similarity ? *frozen_similarity : built;
    const Matrix basis = edge_basis(g, config_.similarity_basis(), config_.direction_features);
    const auto e = experts::encode_edge_basis(t, basis, lp + ".edge.similarity");
    out.similarity = experts::mp_expert_forward(t, state.h_atoms, g, e, lp + ".similarity");
    if (used_similarity) *used_similarity = g;
  }
  if (ex.multiscale) out.multiscale = experts::multiscale_forward(t, state, lp + ".multiscale");
  if (ex.cell) {
    const auto e = experts::encode_edge_basis(t, graphs.cell_basis, "edge.cell");
    out.cell = experts::mp_expert_forward(t, state.h_super, graphs.cell, e, lp + ".cell");
  }
  return out;
}

LayerState PrismModel::prism_layer(ad::Tape& t, const LayerState& state, const CrystalStructure& s,
                                   const StaticGraphs& graphs, int layer,
                                   const PeriodicGraph* frozen_similarity,
                                   PeriodicGraph* used_similarity) const {
  const ExpertOutputs out =
      run_experts(t, state, s, graphs, layer, frozen_similarity, used_similarity);
  const std::string lp = layer_prefix(layer);

  std::vector<ad::Var> atom_outputs;
  std::vector<int> columns;
  if (out.atomistic) atom_outputs.push_back(*out.atomistic), columns.push_back(0);
  if (out.similarity) atom_outputs.push_back(*out.similarity), columns.push_back(1);
  if (out.multiscale) atom_outputs.push_back(out.multiscale->h_atoms), columns.push_back(2);

  LayerState next;
  next.h_atoms = experts::fuse_atoms_subset(atom_outputs, t.param(lp + ".fusion.logits"), columns);
  if (out.cell && out.multiscale)
    next.h_super = experts::fuse_superatom(*out.cell, out.multiscale->h_super, t.param(lp + ".fusion.alpha"));
  else if (out.cell)
    next.h_super = *out.cell;
  else if (out.multiscale)
    next.h_super = out.multiscale->h_super;
  return next;
}

PrismModel::Forward PrismModel::forward(ad::Tape& t, const CrystalStructure& s,
                                        const StaticGraphs& graphs,
                                        const std::vector<PeriodicGraph>* frozen_similarity) const {
  if (frozen_similarity && config_.experts.similarity &&
      frozen_similarity->size() != std::size_t(config_.layers))
    throw LayerMismatch("frozen similarity graphs must cover every layer");
  Forward f;
  LayerState state = initial_state(t, s);
  for (int l = 0; l < config_.layers; ++l) {
    PeriodicGraph used;
    const PeriodicGraph* frozen =
        frozen_similarity && config_.experts.similarity ? &(*frozen_similarity)[std::size_t(l)] : nullptr;
    state = prism_layer(t, state, s, graphs, l, frozen, &used);
    if (config_.experts.similarity) f.similarity_graphs.push_back(std::move(used));
  }
  f.final_state = state;
  f.raw = experts::readout(t, state.h_atoms);
  f.prediction = ad::add_constant(ad::scale(f.raw, normalizer_.scale), normalizer_.mean);
  return f;
}

double PrismModel::predict(const CrystalStructure& s) const {
  return predict(s, prepare_graphs(s, config_));
}

double PrismModel::predict(const CrystalStructure& s, const StaticGraphs& graphs) const {
  ad::Tape t(&params_, false);
  return forward(t, s, graphs).prediction.scalar();
}

PrismModel::LossGradient PrismModel::loss_and_gradient(
    const CrystalStructure& s, const StaticGraphs& graphs, double huber_delta,
    const std::vector<PeriodicGraph>* frozen_similarity) const {
  if (!s.target()) throw EmptyInput("structure '" + s.id() + "' has no target");
  ad::Tape t(&params_, true);
  Forward f = forward(t, s, graphs, frozen_similarity);
  const ad::Var loss = ad::huber(f.prediction, *s.target(), huber_delta);
  t.backward(loss);
  return {loss.scalar(), f.prediction.scalar(), t.gradients(), std::move(f.similarity_graphs)};
}

double PrismModel::loss(const CrystalStructure& s, const StaticGraphs& graphs, double huber_delta,
                        const std::vector<PeriodicGraph>* frozen_similarity) const {
  if (!s.target()) throw EmptyInput("structure '" + s.id() + "' has no target");
  ad::Tape t(&params_, false);
  const Forward f = forward(t, s, graphs, frozen_similarity);
  return ad::huber(f.prediction, *s.target(), huber_delta).scalar();
}

}  // namespace prism
