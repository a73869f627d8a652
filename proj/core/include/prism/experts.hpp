#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "prism/autodiff.hpp"
#include "prism/graph.hpp"
#include "prism/params.hpp"
#include "prism/random.hpp"

namespace prism {

/// Gaussian radial basis with `centers` evenly spaced on [0, span] and width
/// equal to the spacing.
struct RbfBasis {
  int centers = 16;
  double span = 1.0;

  double sigma() const { return span / double(centers - 1); }
  double center(int k) const { return span * double(k) / double(centers - 1); }
};

/// Raw per-edge inputs: RBF(dist), optionally followed by the unit direction
/// disp / dist (zero for a zero-length edge). Throws KindMismatch for Multiscale.
Matrix edge_basis(const PeriodicGraph& graph, const RbfBasis& basis, bool directions);

struct LayerState {
  ad::Var h_atoms;  // N x dim
  ad::Var h_super;  // 1 x dim; invalid when no superatom expert is enabled
};

namespace experts {

// Parameter construction. Weights ~ N(0, gain^2 / fan_in), biases zero.
void add_linear(ParamStore& p, const std::string& prefix, int in, int out, Rng& rng,
                double gain = 1.0);
void add_mlp2(ParamStore& p, const std::string& prefix, int in, int hidden, int out, Rng& rng,
              double out_gain = 1.0);

/// x W + b
ad::Var linear(ad::Tape& t, const ad::Var& x, const std::string& prefix);
/// Linear, SiLU, Linear.
ad::Var mlp2(ad::Tape& t, const ad::Var& x, const std::string& prefix);

/// Rows of the "embedding" table for each atomic number. Throws UnknownElement.
ad::Var encode_atoms(ad::Tape& t, const std::vector<int>& atomic_numbers);

/// Attention-pooled superatom: softmax(H w) weighted sum of atom rows, using
/// the "superatom.score" vector.
ad::Var init_superatom(ad::Tape& t, const ad::Var& h_atoms);

/// SiLU(basis W + b) with the encoder stored under `prefix`.
ad::Var encode_edge_basis(ad::Tape& t, const Matrix& basis, const std::string& prefix);
ad::Var encode_edges(ad::Tape& t, const PeriodicGraph& graph, const RbfBasis& basis,
                     bool directions, const std::string& prefix);

/// h_i + U([h_i | sum_{e: src->i} M([h_src | h_i | e])]); the sum runs in
/// canonical edge order. Parameters under prefix + ".msg" and prefix + ".upd".
ad::Var mp_expert_forward(ad::Tape& t, const ad::Var& h, const PeriodicGraph& graph,
                          const ad::Var& edge_feats, const std::string& prefix);

/// h_s' = h_s + sum_i phi(h_i); h_i' = h_i + phi(h_s'). One phi (prefix + ".phi")
/// serves both directions and sees no geometry.
LayerState multiscale_forward(ad::Tape& t, const LayerState& state, const std::string& prefix);

/// sigma(alpha) h_cell + (1 - sigma(alpha)) h_multi
ad::Var fuse_superatom(const ad::Var& h_cell, const ad::Var& h_multi, const ad::Var& alpha);

/// softmax(logits) weighted sum of the three atom-level expert outputs.
ad::Var fuse_atoms(const ad::Var& h_atomistic, const ad::Var& h_feat, const ad::Var& h_multi,
                   const ad::Var& logits);

/// Convex combination restricted to the enabled subset: `outputs[k]` goes with
/// logit column `columns[k]`. A single output passes through unchanged.
ad::Var fuse_atoms_subset(const std::vector<ad::Var>& outputs, const ad::Var& logits,
                          const std::vector<int>& columns);

/// Mean-pool over atoms, then the "readout" two-layer perceptron to 1x1.
ad::Var readout(ad::Tape& t, const ad::Var& h_atoms);

double gate_weight(double alpha);
std::array<double, 3> fusion_weights(const std::array<double, 3>& logits);

}  // namespace experts
}  // namespace prism
