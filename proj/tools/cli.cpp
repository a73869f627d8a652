#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "prism/checkpoint.hpp"
#include "prism/invariance.hpp"
#include "prism/run_config.hpp"
#include "prism/structure_io.hpp"
#include "prism/synthetic.hpp"
#include "prism/trainer.hpp"

namespace prism::cli {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("write failed for " + path);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix checkpoint_embeddings(const PrismModel& model, const CrystalStructure& s) {
  const Matrix& table = model.params().value("embedding");
  Matrix h(Eigen::Index(s.size()), table.cols());
  for (std::size_t i = 0; i < s.size(); ++i) h.row(Eigen::Index(i)) = table.row(s.site(i).atomic_number - 1);
  return h;
}

struct BuildGraphsArgs {
  std::string input, out, checkpoint;
  double r_c = 0.0, R_c = 0.0, r_f = 0.5;
  int max_degree = 8;
  bool strict = false;
};

void run_build_graphs(const BuildGraphsArgs& a, std::ostream& out) {
  if (!(a.r_c > 0.0) || !(a.R_c > a.r_c)) throw ConfigError("need 0 < rc < Rc");
  const auto data = parse_structures(a.input, {a.strict});
  std::optional<PrismModel> model;
  if (!a.checkpoint.empty()) model.emplace(load_checkpoint(a.checkpoint));
  std::string dump;
  for (const auto& s : data) {
    const Matrix h = model ? checkpoint_embeddings(*model, s) : one_hot_embeddings(s);
    dump += graph_to_json_line(s.id(), build_atomistic_graph(s, a.r_c)) + "\n";
    dump += graph_to_json_line(s.id(), build_similarity_graph(s, h, a.r_f, a.max_degree)) + "\n";
    dump += graph_to_json_line(s.id(), build_cell_graph(s, a.R_c)) + "\n";
    dump += graph_to_json_line(s.id(), build_multiscale_graph(s)) + "\n";
  }
  write_file(a.out, dump);
  out << "wrote " << 4 * data.size() << " graphs for " << data.size() << " structures to " << a.out << "\n";
}

struct TrainArgs {
  std::string config, input, checkpoint, log;
  std::optional<long long> seed;
  std::vector<std::string> overrides;
};

void run_train(const TrainArgs& a, std::ostream& out) {
  RunConfig rc = parse_run_config(a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_run_config_value(rc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!a.input.empty()) rc.data = a.input;
  if (!a.checkpoint.empty()) rc.checkpoint = a.checkpoint;
  if (!a.log.empty()) rc.log = a.log;
  if (a.seed) {
    if (*a.seed < 0) throw ConfigError("seed must be >= 0");
    rc.train.seed = std::uint64_t(*a.seed);
  }
  rc.train.validate();
  if (rc.data.empty()) throw ConfigError("no training data: set 'data' or pass --input");
  if (rc.checkpoint.empty()) throw ConfigError("no checkpoint path: set 'checkpoint' or pass --checkpoint");

  const auto data = parse_structures(rc.data);
  for (const auto& s : data)
    if (!s.target()) throw ConfigError("structure '" + s.id() + "' has no target");
  const auto result = train(data, rc.train);
  save_checkpoint(result.model, rc.checkpoint);
  if (!rc.log.empty()) write_file(rc.log, epoch_log_csv(result.log));
  const auto& last = result.log.back();
  out << "epochs " << result.log.size() << " train_mae " << fmt(last.train_mae) << " val_mae "
      << fmt(last.val_mae) << "\n";
}

struct EvaluateArgs {
  std::string input, checkpoint, out;
  int threads = 1;
};

void run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto model = load_checkpoint(a.checkpoint);
  const auto data = parse_structures(a.input);
  const auto preds = predict_all(model, data, a.threads);
  std::vector<double> targets;
  for (const auto& s : data) {
    if (!s.target()) throw ConfigError("structure '" + s.id() + "' has no target");
    targets.push_back(*s.target());
  }
  const double err = mae(preds, targets);
  if (!a.out.empty()) {
    std::string csv = "id,target,prediction\n";
    for (std::size_t k = 0; k < data.size(); ++k)
      csv += data[k].id() + "," + fmt(targets[k]) + "," + fmt(preds[k]) + "\n";
    write_file(a.out, csv);
  }
  out << "mae " << fmt(err) << "\n";
}

struct InvarianceArgs {
  std::string input, out, checkpoint;
  int trials = 50;
  long long seed = 0;
  double tol = kForwardTolerance;
};

bool run_check_invariance(const InvarianceArgs& a, std::ostream& out) {
  if (a.trials < 1) throw ConfigError("--trials must be >= 1");
  if (a.seed < 0) throw ConfigError("--seed must be >= 0");
  const auto data = parse_structures(a.input);
  const PrismModel model =
      a.checkpoint.empty() ? PrismModel::initialize(ModelConfig{}, std::uint64_t(a.seed)) : load_checkpoint(a.checkpoint);
  InvarianceReport report;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const std::uint64_t seed = std::uint64_t(a.seed) * 1000003u + k;
    report.merge(check_cell_invariance(model, data[k], a.trials, a.tol, seed));
    report.merge(check_permutation(model, data[k], a.trials, kPermutationTolerance, seed));
    report.merge(check_rotation(model, data[k], a.trials, a.tol, seed));
  }
  write_file(a.out, report.to_csv());
  const bool ok = report.all_pass();
  out << (ok ? "all invariance checks pass" : "invariance checks FAILED") << " (" << report.checks.size()
      << " rows, report " << a.out << ")\n";
  return ok;
}

void run_fusion_report(const std::vector<std::string>& checkpoints, const std::string& path, std::ostream& out) {
  std::vector<PrismModel> models;
  for (const auto& c : checkpoints) models.push_back(load_checkpoint(c));
  const auto report = fusion_report(models);
  write_file(path, report.to_csv());
  out << "fusion report for " << models.size() << " model(s), " << report.layers << " layer(s) written to "
      << path << "\n";
}

void run_generate(const std::string& kind_name, long long n, long long seed, const std::string& path,
                  std::ostream& out) {
  const auto kind = parse_synthetic_kind(kind_name);
  if (!kind) throw ConfigError("--kind must be short-range, long-range or mixed");
  if (n < 1) throw ConfigError("--n must be >= 1");
  if (seed < 0) throw ConfigError("--seed must be >= 0");
  write_structures(path, generate_synthetic(*kind, std::size_t(n), std::uint64_t(seed)));
  out << "wrote " << n << " " << kind_name << " structures to " << path << "\n";
}

}  // namespace

std::string graph_to_json_line(const std::string& id, const PeriodicGraph& g) {
  // Edges are emitted by hand so that every double keeps all 17 digits.
  std::string line = "{\"id\":" + nlohmann::json(id).dump() + ",\"kind\":\"" + std::string(to_string(g.kind)) +
                     "\",\"num_nodes\":" + std::to_string(g.num_nodes) + ",\"edges\":[";
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto& e = g.edges[k];
    if (k) line += ",";
    line += "[" + std::to_string(e.src) + "," + std::to_string(e.dst) + "," + std::to_string(e.shift[0]) + "," +
            std::to_string(e.shift[1]) + "," + std::to_string(e.shift[2]);
    if (g.has_geometry()) line += "," + fmt(e.disp[0]) + "," + fmt(e.disp[1]) + "," + fmt(e.disp[2]);
    line += "]";
  }
  return line + "]}";
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic crystal graphs, mixture-of-experts training and invariance checks", "prism"};
  app.require_subcommand(1);

  BuildGraphsArgs bg;
  auto* build = app.add_subcommand("build-graphs", "Dump atomistic, similarity, cell and multiscale graphs");
  build->add_option("--input", bg.input, "Structure file (JSON-lines)")->required();
  build->add_option("--rc", bg.r_c, "Atomistic cutoff in Angstrom")->required();
  build->add_option("--Rc", bg.R_c, "Cell cutoff in Angstrom")->required();
  build->add_option("--rf", bg.r_f, "Feature-space cutoff")->capture_default_str();
  build->add_option("--max-degree", bg.max_degree, "Similarity out-degree cap")->capture_default_str();
  build->add_option("--checkpoint", bg.checkpoint, "Take similarity embeddings from this checkpoint");
  build->add_flag("--strict", bg.strict, "Reject fractional coordinates outside [0, 1)");
  build->add_option("--out", bg.out, "Graph dump (JSON-lines)")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a key = value config file");
  train_cmd->add_option("--config", tr.config, "Run config")->required();
  train_cmd->add_option("--input", tr.input, "Override 'data'");
  train_cmd->add_option("--checkpoint", tr.checkpoint, "Override 'checkpoint'");
  train_cmd->add_option("--log", tr.log, "Override 'log'");
  train_cmd->add_option("--seed", tr.seed, "Override 'seed'");
  train_cmd->add_option("--set", tr.overrides, "Extra key=value assignments");

  EvaluateArgs ev;
  auto* eval = app.add_subcommand("evaluate", "MAE of a checkpoint on a labelled structure file");
  eval->add_option("--input", ev.input, "Structure file with targets")->required();
  eval->add_option("--checkpoint", ev.checkpoint, "Model checkpoint")->required();
  eval->add_option("--out", ev.out, "Per-structure predictions (CSV)");
  eval->add_option("--threads", ev.threads, "Worker threads")->capture_default_str();

  InvarianceArgs inv;
  auto* check = app.add_subcommand("check-invariance", "Cell, permutation and rotation invariance report");
  check->add_option("--input", inv.input, "Structure file")->required();
  check->add_option("--trials", inv.trials, "Random transforms per structure")->capture_default_str();
  check->add_option("--out", inv.out, "Report CSV")->required();
  check->add_option("--checkpoint", inv.checkpoint, "Model to probe (default: fresh model from --seed)");
  check->add_option("--seed", inv.seed, "Seed")->capture_default_str();
  check->add_option("--tol", inv.tol, "Forward-pass tolerance")->capture_default_str();

  std::vector<std::string> fusion_checkpoints;
  std::string fusion_out;
  auto* fusion = app.add_subcommand("fusion-report", "Per-layer gate and fusion weights across checkpoints");
  fusion->add_option("--checkpoint", fusion_checkpoints, "One or more checkpoints")->required();
  fusion->add_option("--out", fusion_out, "Report CSV")->required();

  std::string kind;
  long long n = 0, gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate-data", "Synthetic structures with closed-form targets");
  gen->add_option("--kind", kind, "short-range | long-range | mixed")->required();
  gen->add_option("--n", n, "Number of structures")->required();
  gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Structure file (JSON-lines)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidationFailure;
  }

  try {
    if (*build) run_build_graphs(bg, out);
    else if (*train_cmd) run_train(tr, out);
    else if (*eval) run_evaluate(ev, out);
    else if (*check) return run_check_invariance(inv, out) ? kOk : kValidationFailure;
    else if (*fusion) run_fusion_report(fusion_checkpoints, fusion_out, out);
    else if (*gen) run_generate(kind, n, gen_seed, gen_out, out);
    return kOk;
  } catch (const DivergenceDetected& e) {
    err << "error: " << e.what() << "\n";
    return kInternalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

int cli_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace prism::cli
