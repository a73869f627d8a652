#include "prism/experts.hpp"

#include <cmath>

#include "prism/error.hpp"
#include "prism/structure.hpp"

namespace prism {

Matrix edge_basis(const PeriodicGraph& graph, const RbfBasis& basis, bool directions) {
  if (!graph.has_geometry()) throw KindMismatch("multiscale edges carry no geometry to encode");
  if (basis.centers < 2 || !(basis.span > 0.0)) throw ConfigError("invalid radial basis");
  const Eigen::Index cols = basis.centers + (directions ? 3 : 0);
  Matrix out(Eigen::Index(graph.edges.size()), cols);
  const double inv_two_sigma_sq = 1.0 / (2.0 * basis.sigma() * basis.sigma());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    const auto row = Eigen::Index(e);
    for (int k = 0; k < basis.centers; ++k) {
      const double x = edge.dist - basis.center(k);
      out(row, k) = std::exp(-x * x * inv_two_sigma_sq);
    }
    if (directions) {
      const Vec3 u = edge.dist > 0.0 ? Vec3(edge.disp / edge.dist) : Vec3::Zero();
      for (int k = 0; k < 3; ++k) out(row, basis.centers + k) = u[k];
    }
  }
  return out;
}

namespace experts {

void add_linear(ParamStore& p, const std::string& prefix, int in, int out, Rng& rng, double gain) {
  const double sd = gain / std::sqrt(double(in));
  Matrix w(in, out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal(0.0, sd);
  p.add(prefix + ".w", std::move(w));
  p.add(prefix + ".b", Matrix::Zero(1, out));
}

void add_mlp2(ParamStore& p, const std::string& prefix, int in, int hidden, int out, Rng& rng,
              double out_gain) {
  add_linear(p, prefix + ".l1", in, hidden, rng);
  add_linear(p, prefix + ".l2", hidden, out, rng, out_gain);
}

ad::Var linear(ad::Tape& t, const ad::Var& x, const std::string& prefix) {
  return ad::add_row(ad::matmul(x, t.param(prefix + ".w")), t.param(prefix + ".b"));
}

ad::Var mlp2(ad::Tape& t, const ad::Var& x, const std::string& prefix) {
  return linear(t, ad::silu(linear(t, x, prefix + ".l1")), prefix + ".l2");
}

ad::Var encode_atoms(ad::Tape& t, const std::vector<int>& atomic_numbers) {
  std::vector<int> rows;
  rows.reserve(atomic_numbers.size());
  for (int z : atomic_numbers) {
    if (z < 1 || z > kMaxAtomicNumber)
      throw UnknownElement("atomic number " + std::to_string(z) + " outside [1, 118]");
    rows.push_back(z - 1);
  }
  return ad::gather_rows(t.param("embedding"), rows);
}

ad::Var init_superatom(ad::Tape& t, const ad::Var& h_atoms) {
  if (h_atoms.rows() < 1) throw EmptyInput("superatom needs at least one atom");
  const ad::Var attn = ad::softmax_col(ad::matmul(h_atoms, t.param("superatom.score")));
  return ad::matmul(ad::transpose(attn), h_atoms);
}

ad::Var encode_edge_basis(ad::Tape& t, const Matrix& basis, const std::string& prefix) {
  return ad::silu(linear(t, t.constant(basis), prefix));
}

ad::Var encode_edges(ad::Tape& t, const PeriodicGraph& graph, const RbfBasis& basis,
                     bool directions, const std::string& prefix) {
  return encode_edge_basis(t, edge_basis(graph, basis, directions), prefix);
}

ad::Var mp_expert_forward(ad::Tape& t, const ad::Var& h, const PeriodicGraph& graph,
                          const ad::Var& edge_feats, const std::string& prefix) {
  if (graph.num_nodes != h.rows())
    throw ShapeMismatch("graph has " + std::to_string(graph.num_nodes) + " nodes, state has " +
                        std::to_string(h.rows()) + " rows");
  if (edge_feats.rows() != Eigen::Index(graph.edges.size()))
    throw ShapeMismatch("edge feature rows differ from edge count");
  std::vector<int> src, dst;
  src.reserve(graph.edges.size());
  dst.reserve(graph.edges.size());
  for (const auto& e : graph.edges) {
    src.push_back(e.src);
    dst.push_back(e.dst);
  }
  const ad::Var inputs =
      ad::concat_cols({ad::gather_rows(h, src), ad::gather_rows(h, dst), edge_feats});
  const ad::Var messages = mlp2(t, inputs, prefix + ".msg");
  const ad::Var agg = ad::scatter_add_rows(messages, dst, h.rows());
  return ad::add(h, mlp2(t, ad::concat_cols({h, agg}), prefix + ".upd"));
}

LayerState multiscale_forward(ad::Tape& t, const LayerState& state, const std::string& prefix) {
  if (state.h_super.cols() != state.h_atoms.cols())
    throw ShapeMismatch("superatom and atom embeddings differ in width");
  const std::string phi = prefix + ".phi";
  const ad::Var h_super = ad::add(state.h_super, ad::sum_rows(mlp2(t, state.h_atoms, phi)));
  const ad::Var h_atoms =
      ad::add(state.h_atoms, ad::broadcast_rows(mlp2(t, h_super, phi), state.h_atoms.rows()));
  return {h_atoms, h_super};
}

ad::Var fuse_superatom(const ad::Var& h_cell, const ad::Var& h_multi, const ad::Var& alpha) {
  const ad::Var g = ad::sigmoid(alpha);
  return ad::add(ad::mul_scalar(h_cell, g), ad::mul_scalar(h_multi, ad::one_minus(g)));
}

ad::Var fuse_atoms(const ad::Var& h_atomistic, const ad::Var& h_feat, const ad::Var& h_multi,
                   const ad::Var& logits) {
  return fuse_atoms_subset({h_atomistic, h_feat, h_multi}, logits, {0, 1, 2});
}

ad::Var fuse_atoms_subset(const std::vector<ad::Var>& outputs, const ad::Var& logits,
                          const std::vector<int>& columns) {
  if (outputs.empty() || outputs.size() != columns.size())
    throw ShapeMismatch("fusion needs one logit column per expert output");
  for (const auto& o : outputs)
    if (o.rows() != outputs[0].rows() || o.cols() != outputs[0].cols())
      throw ShapeMismatch("expert outputs differ in shape");
  if (outputs.size() == 1) return outputs[0];
  const ad::Var w = ad::softmax_row(ad::select_cols(logits, columns));
  ad::Var out = ad::mul_scalar(outputs[0], ad::select_cols(w, {0}));
  for (std::size_t k = 1; k < outputs.size(); ++k)
    out = ad::add(out, ad::mul_scalar(outputs[k], ad::select_cols(w, {int(k)})));
  return out;
}

ad::Var readout(ad::Tape& t, const ad::Var& h_atoms) {
  return mlp2(t, ad::mean_rows(h_atoms), "readout");
}

double gate_weight(double alpha) { return 1.0 / (1.0 + std::exp(-alpha)); }

std::array<double, 3> fusion_weights(const std::array<double, 3>& logits) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  std::array<double, 3> w{};
  double sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k) sum += (w[k] = std::exp(logits[k] - m));
  for (auto& v : w) v /= sum;
  return w;
}

}  // namespace experts
}  // namespace prism
