#pragma once

#include <functional>
#include <string>

#include "prism/model.hpp"
#include "prism/params.hpp"

namespace prism {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_entry = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Central differences over every scalar of every parameter, compared as
/// |g_a - g_fd| / max(|g_a|, |g_fd|, 1e-8). Parameters are restored afterwards.
/// eps must lie in [1e-6, 1e-3]; throws NonFinite on any non-finite value.
GradCheckResult grad_check(ParamStore& params, const Gradients& analytic,
                           const std::function<double(const ParamStore&)>& loss, double eps);

/// Checks PrismModel::loss_and_gradient. With freeze_similarity the feature
/// graphs of the unperturbed pass are reused by every perturbed pass, which is
/// the topology the analytic gradient differentiates through.
GradCheckResult grad_check(PrismModel& model, const CrystalStructure& s, double eps,
                           bool freeze_similarity = true, double huber_delta = 0.01);

}  // namespace prism
