#include "prism/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "prism/error.hpp"
#include "prism/random.hpp"

namespace prism {

void TrainConfig::validate() const {
  model.validate();
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be > 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must be in [0, 1)");
  if (!(huber_delta > 0.0)) throw ConfigError("huber delta must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

namespace {

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so the
// caller can reduce them in index order.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::size_t(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double mae(std::span<const double> preds, std::span<const double> targets) {
  if (preds.size() != targets.size())
    throw LengthMismatch("mae: " + std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(targets.size()) + " targets");
  if (preds.empty()) throw EmptyInput("mae of an empty set");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += std::abs(preds[i] - targets[i]);
  return sum / double(preds.size());
}

Split split_dataset(std::size_t n, double val_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed ^ 0x5851f42d4c957f2dULL);
  rng.shuffle(order);
  auto n_val = static_cast<std::size_t>(std::llround(double(n) * val_fraction));
  if (n_val >= n) n_val = n > 1 ? n - 1 : 0;
  Split s;
  s.val.assign(order.begin(), order.begin() + std::ptrdiff_t(n_val));
  s.train.assign(order.begin() + std::ptrdiff_t(n_val), order.end());
  if (s.val.empty()) s.val = s.train;
  return s;
}

std::vector<double> predict_all(const PrismModel& model, const std::vector<CrystalStructure>& data,
                                int threads) {
  std::vector<double> out(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) { out[i] = model.predict(data[i]); });
  return out;
}

double evaluate(const PrismModel& model, const std::vector<CrystalStructure>& data, int threads) {
  if (data.empty()) throw EmptyInput("evaluate on an empty dataset");
  std::vector<double> targets;
  targets.reserve(data.size());
  for (const auto& s : data) {
    if (!s.target()) throw EmptyInput("structure '" + s.id() + "' has no target");
    targets.push_back(*s.target());
  }
  const auto preds = predict_all(model, data, threads);
  return mae(preds, targets);
}

Adam::Adam(const ParamStore& params, double learning_rate)
    : lr_(learning_rate), m_(zero_gradients(params)), v_(zero_gradients(params)) {}

void Adam::step(ParamStore& params, const Gradients& grads) {
  if (grads.size() != params.size()) throw ShapeMismatch("gradient count differs from parameters");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, double(t_));
  const double c2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseAbs2();
    auto& p = params.value(int(i));
    p.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

TrainResult train(const std::vector<CrystalStructure>& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw EmptyInput("training set is empty");
  for (const auto& s : dataset)
    if (!s.target()) throw EmptyInput("structure '" + s.id() + "' has no target");

  const auto start = std::chrono::steady_clock::now();
  Split split = split_dataset(dataset.size(), config.val_fraction, config.seed);

  double mean = 0.0;
  for (auto i : split.train) mean += *dataset[i].target();
  mean /= double(split.train.size());
  double var = 0.0;
  for (auto i : split.train) var += std::pow(*dataset[i].target() - mean, 2);
  var /= double(split.train.size());
  const double sd = std::sqrt(var);

  PrismModel model = PrismModel::initialize(config.model, config.seed);
  model.set_normalizer({mean, sd > 1e-12 ? sd : 1.0});

  const bool augment = config.augmentation == Augmentation::RandomRotation;
  std::vector<StaticGraphs> graphs(dataset.size());
  {
    std::vector<std::size_t> needed = split.val;
    if (!augment) needed.insert(needed.end(), split.train.begin(), split.train.end());
    parallel_for(needed.size(), config.threads, [&](std::size_t k) {
      graphs[needed[k]] = prepare_graphs(dataset[needed[k]], config.model);
    });
  }
  std::vector<CrystalStructure> val_set;
  for (auto i : split.val) val_set.push_back(dataset[i]);

  Adam adam(model.params(), config.learning_rate);
  Rng rng(config.seed);
  std::vector<std::size_t> order = split.train;
  TrainResult result{model, {}, split};

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0, abs_sum = 0.0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += std::size_t(config.batch_size)) {
      const std::size_t b1 = std::min(order.size(), b0 + std::size_t(config.batch_size));
      const std::size_t count = b1 - b0;
      std::vector<std::uint64_t> rot_seeds(count);
      if (augment)
        for (auto& r : rot_seeds) r = rng.next();

      std::vector<PrismModel::LossGradient> parts(count);
      try {
        parallel_for(count, config.threads, [&](std::size_t k) {
          const auto idx = order[b0 + k];
          if (augment) {
            const CrystalStructure rotated = dataset[idx].rotated(random_rotation(rot_seeds[k]));
            parts[k] = model.loss_and_gradient(rotated, prepare_graphs(rotated, config.model),
                                               config.huber_delta);
          } else {
            parts[k] = model.loss_and_gradient(dataset[idx], graphs[idx], config.huber_delta);
          }
        });
      } catch (const NonFinite& e) {
        throw DivergenceDetected("epoch " + std::to_string(epoch) + ": " + e.what());
      }

      Gradients total = zero_gradients(model.params());
      for (std::size_t k = 0; k < count; ++k) {
        const auto& p = parts[k];
        if (!std::isfinite(p.loss))
          throw DivergenceDetected("non-finite loss at epoch " + std::to_string(epoch) +
                                   " on structure '" + dataset[order[b0 + k]].id() + "'");
        loss_sum += p.loss;
        abs_sum += std::abs(p.prediction - *dataset[order[b0 + k]].target());
        accumulate(total, p.gradients, 1.0 / double(count));
      }
      adam.step(model.params(), total);
    }

    std::vector<double> preds(val_set.size()), targets(val_set.size());
    try {
      parallel_for(val_set.size(), config.threads, [&](std::size_t k) {
        preds[k] = model.predict(val_set[k], graphs[split.val[k]]);
      });
    } catch (const NonFinite& e) {
      throw DivergenceDetected("epoch " + std::to_string(epoch) + " validation: " + e.what());
    }
    for (std::size_t k = 0; k < val_set.size(); ++k) targets[k] = *val_set[k].target();

    EpochLog row;
    row.epoch = epoch;
    row.train_loss = loss_sum / double(order.size());
    row.train_mae = abs_sum / double(order.size());
    row.val_mae = mae(preds, targets);
    if (!std::isfinite(row.train_loss) || !std::isfinite(row.val_mae))
      throw DivergenceDetected("non-finite metrics at epoch " + std::to_string(epoch));
    row.wall_seconds = config.record_wall_time
                           ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                           : 0.0;
    result.log.push_back(row);
  }
  result.model = std::move(model);
  return result;
}

std::string epoch_log_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,train_mae,val_mae,wall_seconds\n";
  for (const auto& r : log) {
    out += std::to_string(r.epoch) + "," + fmt_double(r.train_loss) + "," + fmt_double(r.train_mae) +
           "," + fmt_double(r.val_mae) + "," + fmt_double(r.wall_seconds) + "\n";
  }
  return out;
}

FusionWeights layer_fusion_weights(const PrismModel& model, int layer) {
  const auto& ex = model.config().experts;
  const auto& p = model.params();
  const std::string lp = layer_prefix(layer);
  FusionWeights w;
  if (ex.cell && ex.multiscale) {
    w.gate_cell = experts::gate_weight(p.value(lp + ".fusion.alpha")(0, 0));
    w.gate_multi = 1.0 - w.gate_cell;
  } else {
    w.gate_cell = ex.cell ? 1.0 : 0.0;
    w.gate_multi = ex.multiscale ? 1.0 : 0.0;
  }
  const Matrix& logits = p.value(lp + ".fusion.logits");
  const bool on[3] = {ex.atomistic, ex.similarity, ex.multiscale};
  double m = -INFINITY;
  for (int k = 0; k < 3; ++k)
    if (on[k]) m = std::max(m, logits(0, k));
  double e[3] = {0, 0, 0}, sum = 0.0;
  for (int k = 0; k < 3; ++k)
    if (on[k]) sum += (e[k] = std::exp(logits(0, k) - m));
  w.w_atomistic = e[0] / sum;
  w.w_similarity = e[1] / sum;
  w.w_multiscale = e[2] / sum;
  return w;
}

namespace {

using Field = double FusionWeights::*;
constexpr Field kFields[] = {&FusionWeights::gate_cell, &FusionWeights::gate_multi,
                             &FusionWeights::w_atomistic, &FusionWeights::w_similarity,
                             &FusionWeights::w_multiscale};

void mean_and_sd(const std::vector<FusionWeights>& xs, FusionWeights& mean, FusionWeights& sd) {
  mean = {};
  sd = {};
  for (Field f : kFields) {
    double s = 0.0;
    for (const auto& x : xs) s += x.*f;
    mean.*f = s / double(xs.size());
    if (xs.size() > 1) {
      double q = 0.0;
      for (const auto& x : xs) q += (x.*f - mean.*f) * (x.*f - mean.*f);
      sd.*f = std::sqrt(q / double(xs.size() - 1));
    }
  }
}

std::string weights_csv(const FusionWeights& w) {
  std::string out;
  for (Field f : kFields) out += fmt_double(w.*f) + ",";
  out.pop_back();
  return out;
}

}  // namespace

FusionReport fusion_report(const std::vector<PrismModel>& models) {
  if (models.empty()) throw EmptyInput("fusion report needs at least one model");
  FusionReport r;
  r.layers = models.front().config().layers;
  for (const auto& m : models)
    if (m.config().layers != r.layers) throw LayerMismatch("models differ in layer count");

  std::vector<FusionWeights> layer_avg;
  for (const auto& m : models) {
    std::vector<FusionWeights> rows;
    for (int l = 0; l < r.layers; ++l) rows.push_back(layer_fusion_weights(m, l));
    FusionWeights avg, unused;
    mean_and_sd(rows, avg, unused);
    layer_avg.push_back(avg);
    r.per_model.push_back(std::move(rows));
  }
  r.mean.resize(std::size_t(r.layers));
  r.stddev.resize(std::size_t(r.layers));
  for (int l = 0; l < r.layers; ++l) {
    std::vector<FusionWeights> across;
    for (const auto& pm : r.per_model) across.push_back(pm[std::size_t(l)]);
    mean_and_sd(across, r.mean[std::size_t(l)], r.stddev[std::size_t(l)]);
  }
  mean_and_sd(layer_avg, r.overall_mean, r.overall_stddev);
  return r;
}

std::string FusionReport::to_csv() const {
  std::string out =
      "layer,gate_cell,gate_multi,w_atomistic,w_similarity,w_multiscale,seed_mean,model,"
      "gate_cell_std,gate_multi_std,w_atomistic_std,w_similarity_std,w_multiscale_std\n";
  const std::string zeros = "0,0,0,0,0";
  for (std::size_t m = 0; m < per_model.size(); ++m)
    for (int l = 0; l < layers; ++l)
      out += std::to_string(l) + "," + weights_csv(per_model[m][std::size_t(l)]) + ",0," +
             std::to_string(m) + "," + zeros + "\n";
  for (int l = 0; l < layers; ++l)
    out += std::to_string(l) + "," + weights_csv(mean[std::size_t(l)]) + ",1,all," +
           weights_csv(stddev[std::size_t(l)]) + "\n";
  out += "mean," + weights_csv(overall_mean) + ",1,all," + weights_csv(overall_stddev) + "\n";
  return out;
}

}  // namespace prism
