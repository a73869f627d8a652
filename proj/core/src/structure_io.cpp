#include "prism/structure_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include <json.hpp>

#include "prism/error.hpp"

namespace prism {

using nlohmann::json;

namespace {

Vec3 read_vec3(const json& j, std::size_t line, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(line, std::string(what) + " must have 3 numbers");
  Vec3 v;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw ParseError(line, std::string(what) + " entries must be numbers");
    v[Eigen::Index(k)] = j[k].get<double>();
  }
  return v;
}

CrystalStructure parse_record(const std::string& text, std::size_t line, const ParseOptions& opt) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(line, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line, "record must be a JSON object");
  for (const char* key : {"id", "lattice", "frac_coords", "atomic_numbers"})
    if (!j.contains(key)) throw ParseError(line, std::string("missing \"") + key + "\"");
  if (!j["id"].is_string()) throw ParseError(line, "\"id\" must be a string");

  const auto& lat = j["lattice"];
  if (!lat.is_array() || lat.size() != 3) throw ParseError(line, "\"lattice\" must hold 3 vectors");
  Mat3 m;
  for (std::size_t k = 0; k < 3; ++k) m.col(Eigen::Index(k)) = read_vec3(lat[k], line, "lattice vector");
  std::optional<LatticeMatrix> lattice;
  try {
    lattice.emplace(m);
  } catch (const SingularLattice& e) {
    throw InvalidLattice(line, e.what());
  }

  const auto& fc = j["frac_coords"];
  const auto& zs = j["atomic_numbers"];
  if (!fc.is_array() || !zs.is_array()) throw ParseError(line, "coordinates and atomic numbers must be arrays");
  if (fc.size() != zs.size())
    throw ParseError(line, "frac_coords has " + std::to_string(fc.size()) + " rows but atomic_numbers has " +
                               std::to_string(zs.size()));
  if (fc.empty()) throw ParseError(line, "structure has no atoms");

  std::vector<AtomSite> sites;
  for (std::size_t i = 0; i < fc.size(); ++i) {
    const Vec3 f = read_vec3(fc[i], line, "fractional coordinate");
    if (!f.allFinite()) throw InvalidFraction(line, "non-finite fractional coordinate");
    if (opt.strict && ((f.array() < 0.0).any() || (f.array() >= 1.0).any()))
      throw InvalidFraction(line, "fractional coordinate of site " + std::to_string(i) + " outside [0, 1)");
    if (!zs[i].is_number_integer()) throw ParseError(line, "atomic numbers must be integers");
    const int z = zs[i].get<int>();
    if (z < 1 || z > kMaxAtomicNumber) throw ParseError(line, "atomic number " + std::to_string(z) + " outside [1, 118]");
    sites.push_back({f, z});
  }

  std::optional<double> target;
  if (j.contains("target") && !j["target"].is_null()) {
    if (!j["target"].is_number()) throw ParseError(line, "\"target\" must be a number");
    target = j["target"].get<double>();
  }
  return CrystalStructure(*lattice, std::move(sites), j["id"].get<std::string>(), target);
}

}  // namespace

std::vector<CrystalStructure> parse_structures(std::istream& in, ParseOptions options) {
  std::vector<CrystalStructure> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    out.push_back(parse_record(text, line, options));
  }
  return out;
}

std::vector<CrystalStructure> parse_structures(const std::filesystem::path& path, ParseOptions options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open structure file " + path.string());
  return parse_structures(in, options);
}

std::string structure_to_json_line(const CrystalStructure& s) {
  json lattice = json::array();
  for (int k = 0; k < 3; ++k) {
    const Vec3 col = s.lattice().column(k);
    lattice.push_back({col[0], col[1], col[2]});
  }
  json frac = json::array();
  json zs = json::array();
  for (const auto& site : s.sites()) {
    frac.push_back({site.frac[0], site.frac[1], site.frac[2]});
    zs.push_back(site.atomic_number);
  }
  json j{{"id", s.id()}, {"lattice", lattice}, {"frac_coords", frac}, {"atomic_numbers", zs}};
  j["target"] = s.target() ? json(*s.target()) : json(nullptr);
  return j.dump();
}

std::string serialize_structures(const std::vector<CrystalStructure>& structures) {
  std::string out(kStructureFileHeader);
  out += "\n";
  for (const auto& s : structures) out += structure_to_json_line(s) + "\n";
  return out;
}

void write_structures(const std::filesystem::path& path, const std::vector<CrystalStructure>& structures) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << serialize_structures(structures);
}

}  // namespace prism
