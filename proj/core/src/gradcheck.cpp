#include "prism/gradcheck.hpp"

#include <cmath>

#include "prism/error.hpp"

namespace prism {

GradCheckResult grad_check(ParamStore& params, const Gradients& analytic,
                           const std::function<double(const ParamStore&)>& loss, double eps) {
  if (!(eps >= 1e-6 && eps <= 1e-3)) throw ConfigError("grad_check eps must be in [1e-6, 1e-3]");
  if (analytic.size() != params.size()) throw ShapeMismatch("gradient count differs from parameters");
  GradCheckResult r;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix& value = params.value(int(p));
    for (Eigen::Index k = 0; k < value.size(); ++k) {
      const double saved = value.data()[k];
      value.data()[k] = saved + eps;
      const double up = loss(params);
      value.data()[k] = saved - eps;
      const double down = loss(params);
      value.data()[k] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double exact = analytic[p].data()[k];
      if (!std::isfinite(numeric) || !std::isfinite(exact))
        throw NonFinite("non-finite gradient for " + params.name(int(p)));
      const double rel =
          std::abs(exact - numeric) / std::max({std::abs(exact), std::abs(numeric), 1e-8});
      ++r.checked;
      if (rel > r.max_rel_error || r.worst_entry < 0) {
        r.max_rel_error = rel;
        r.worst_param = params.name(int(p));
        r.worst_entry = k;
        r.worst_analytic = exact;
        r.worst_numeric = numeric;
      }
    }
  }
  return r;
}

GradCheckResult grad_check(PrismModel& model, const CrystalStructure& s, double eps,
                           bool freeze_similarity, double huber_delta) {
  const StaticGraphs graphs = prepare_graphs(s, model.config());
  const auto base = model.loss_and_gradient(s, graphs, huber_delta);
  const std::vector<PeriodicGraph>* frozen = freeze_similarity ? &base.similarity_graphs : nullptr;
  return grad_check(model.params(), base.gradients,
                    [&](const ParamStore&) { return model.loss(s, graphs, huber_delta, frozen); }, eps);
}

}  // namespace prism
