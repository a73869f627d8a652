#include "prism/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prism/error.hpp"

namespace prism {

using nlohmann::json;

namespace {

json config_to_json(const ModelConfig& c) {
  return json{{"dim", c.dim},
              {"layers", c.layers},
              {"rbf_centers", c.rbf_centers},
              {"r_c", c.r_c},
              {"R_c", c.R_c},
              {"r_f", c.r_f},
              {"max_degree", c.max_degree},
              {"direction_features", c.direction_features},
              {"experts",
               {{"atomistic", c.experts.atomistic},
                {"similarity", c.experts.similarity},
                {"multiscale", c.experts.multiscale},
                {"cell", c.experts.cell}}}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.dim = j.at("dim").get<int>();
  c.layers = j.at("layers").get<int>();
  c.rbf_centers = j.at("rbf_centers").get<int>();
  c.r_c = j.at("r_c").get<double>();
  c.R_c = j.at("R_c").get<double>();
  c.r_f = j.at("r_f").get<double>();
  c.max_degree = j.at("max_degree").get<int>();
  c.direction_features = j.at("direction_features").get<bool>();
  const auto& e = j.at("experts");
  c.experts.atomistic = e.at("atomistic").get<bool>();
  c.experts.similarity = e.at("similarity").get<bool>();
  c.experts.multiscale = e.at("multiscale").get<bool>();
  c.experts.cell = e.at("cell").get<bool>();
  return c;
}

}  // namespace

std::string checkpoint_to_string(const PrismModel& model) {
  json params = json::object();
  const auto& p = model.params();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Matrix& m = p.value(int(i));
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    params[p.name(int(i))] = {{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
  }
  json doc{{"format", "prism-checkpoint"},
           {"version", kCheckpointVersion},
           {"config", config_to_json(model.config())},
           {"normalizer", {{"mean", model.normalizer().mean}, {"scale", model.normalizer().scale}}},
           {"params", std::move(params)}};
  return doc.dump() + "\n";
}

PrismModel checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "prism-checkpoint")
      throw ConfigError("not a prism checkpoint");
    if (doc.at("version").get<int>() != kCheckpointVersion)
      throw ConfigError("unsupported checkpoint version");
    const ModelConfig config = config_from_json(doc.at("config"));
    PrismModel model = PrismModel::initialize(config, 0);
    auto& store = model.params();
    const auto& params = doc.at("params");
    if (params.size() != store.size())
      throw ConfigError("checkpoint has " + std::to_string(params.size()) + " arrays, config implies " +
                        std::to_string(store.size()));
    for (std::size_t i = 0; i < store.size(); ++i) {
      const std::string& name = store.name(int(i));
      if (!params.contains(name)) throw ConfigError("checkpoint is missing '" + name + "'");
      const auto& entry = params.at(name);
      Matrix& m = store.value(int(i));
      const auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
      const auto data = entry.at("data").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols() ||
          data.size() != std::size_t(m.size()))
        throw ConfigError("shape mismatch for '" + name + "'");
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = data[k++];
    }
    const auto& norm = doc.at("normalizer");
    model.set_normalizer({norm.at("mean").get<double>(), norm.at("scale").get<double>()});
    return model;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const PrismModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << checkpoint_to_string(model);
}

PrismModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace prism
