#include "prism/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

#include "prism/error.hpp"

namespace prism {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"learning_rate", [](RunConfig& c, auto& k, auto& v) { c.train.learning_rate = to_double(k, v); }},
      {"epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs = int(to_int(k, v)); }},
      {"batch_size", [](RunConfig& c, auto& k, auto& v) { c.train.batch_size = int(to_int(k, v)); }},
      {"seed",
       [](RunConfig& c, auto& k, auto& v) {
         const auto s = to_int(k, v);
         if (s < 0) throw ConfigError("'seed' must be >= 0");
         c.train.seed = std::uint64_t(s);
       }},
      {"val_fraction", [](RunConfig& c, auto& k, auto& v) { c.train.val_fraction = to_double(k, v); }},
      {"huber_delta", [](RunConfig& c, auto& k, auto& v) { c.train.huber_delta = to_double(k, v); }},
      {"threads", [](RunConfig& c, auto& k, auto& v) { c.train.threads = int(to_int(k, v)); }},
      {"record_wall_time", [](RunConfig& c, auto& k, auto& v) { c.train.record_wall_time = to_bool(k, v); }},
      {"augmentation",
       [](RunConfig& c, auto&, auto& v) {
         if (v == "none")
           c.train.augmentation = Augmentation::None;
         else if (v == "random-rotation")
           c.train.augmentation = Augmentation::RandomRotation;
         else
           throw ConfigError("'augmentation' must be none or random-rotation, got '" + v + "'");
       }},
      {"dim", [](RunConfig& c, auto& k, auto& v) { c.train.model.dim = int(to_int(k, v)); }},
      {"layers", [](RunConfig& c, auto& k, auto& v) { c.train.model.layers = int(to_int(k, v)); }},
      {"rbf_centers", [](RunConfig& c, auto& k, auto& v) { c.train.model.rbf_centers = int(to_int(k, v)); }},
      {"r_c", [](RunConfig& c, auto& k, auto& v) { c.train.model.r_c = to_double(k, v); }},
      {"R_c", [](RunConfig& c, auto& k, auto& v) { c.train.model.R_c = to_double(k, v); }},
      {"r_f", [](RunConfig& c, auto& k, auto& v) { c.train.model.r_f = to_double(k, v); }},
      {"max_degree", [](RunConfig& c, auto& k, auto& v) { c.train.model.max_degree = int(to_int(k, v)); }},
      {"direction_features",
       [](RunConfig& c, auto& k, auto& v) { c.train.model.direction_features = to_bool(k, v); }},
      {"expert_atomistic", [](RunConfig& c, auto& k, auto& v) { c.train.model.experts.atomistic = to_bool(k, v); }},
      {"expert_similarity",
       [](RunConfig& c, auto& k, auto& v) { c.train.model.experts.similarity = to_bool(k, v); }},
      {"expert_multiscale",
       [](RunConfig& c, auto& k, auto& v) { c.train.model.experts.multiscale = to_bool(k, v); }},
      {"expert_cell", [](RunConfig& c, auto& k, auto& v) { c.train.model.experts.cell = to_bool(k, v); }},
      {"data", [](RunConfig& c, auto&, auto& v) { c.data = v; }},
      {"checkpoint", [](RunConfig& c, auto&, auto& v) { c.checkpoint = v; }},
      {"log", [](RunConfig& c, auto&, auto& v) { c.log = v; }},
  };
  return table;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void set_run_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(config, key, value);
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig config;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text.resize(hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    try {
      set_run_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  config.train.validate();
  return config;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in);
}

std::string run_config_to_string(const RunConfig& c) {
  const auto& t = c.train;
  const auto& m = t.model;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  std::string out;
  out += "learning_rate = " + num(t.learning_rate) + "\n";
  out += "epochs = " + std::to_string(t.epochs) + "\n";
  out += "batch_size = " + std::to_string(t.batch_size) + "\n";
  out += "seed = " + std::to_string(t.seed) + "\n";
  out += "val_fraction = " + num(t.val_fraction) + "\n";
  out += "huber_delta = " + num(t.huber_delta) + "\n";
  out += "threads = " + std::to_string(t.threads) + "\n";
  out += "record_wall_time = " + b(t.record_wall_time) + "\n";
  out += std::string("augmentation = ") +
         (t.augmentation == Augmentation::None ? "none" : "random-rotation") + "\n";
  out += "dim = " + std::to_string(m.dim) + "\n";
  out += "layers = " + std::to_string(m.layers) + "\n";
  out += "rbf_centers = " + std::to_string(m.rbf_centers) + "\n";
  out += "r_c = " + num(m.r_c) + "\n";
  out += "R_c = " + num(m.R_c) + "\n";
  out += "r_f = " + num(m.r_f) + "\n";
  out += "max_degree = " + std::to_string(m.max_degree) + "\n";
  out += "direction_features = " + b(m.direction_features) + "\n";
  out += "expert_atomistic = " + b(m.experts.atomistic) + "\n";
  out += "expert_similarity = " + b(m.experts.similarity) + "\n";
  out += "expert_multiscale = " + b(m.experts.multiscale) + "\n";
  out += "expert_cell = " + b(m.experts.cell) + "\n";
  if (!c.data.empty()) out += "data = " + c.data + "\n";
  if (!c.checkpoint.empty()) out += "checkpoint = " + c.checkpoint + "\n";
  if (!c.log.empty()) out += "log = " + c.log + "\n";
  return out;
}

}  // namespace prism
