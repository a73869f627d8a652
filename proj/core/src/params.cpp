#include "prism/params.hpp"

#include "prism/error.hpp"

namespace prism {

int ParamStore::add(std::string name, Matrix init) {
  if (index_.contains(name)) throw ConfigError("duplicate parameter '" + name + "'");
  const int id = static_cast<int>(values_.size());
  index_.emplace(name, id);
  names_.push_back(std::move(name));
  values_.push_back(std::move(init));
  return id;
}

bool ParamStore::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

int ParamStore::index(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return it->second;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += std::size_t(v.size());
  return n;
}

bool ParamStore::operator==(const ParamStore& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i].rows() != other.values_[i].rows() || values_[i].cols() != other.values_[i].cols())
      return false;
    if (values_[i] != other.values_[i]) return false;
  }
  return true;
}

Gradients zero_gradients(const ParamStore& params) {
  Gradients g;
  g.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.value(int(i));
    g.push_back(Matrix::Zero(v.rows(), v.cols()));
  }
  return g;
}

void accumulate(Gradients& into, const Gradients& g, double scale) {
  if (into.size() != g.size()) throw ShapeMismatch("gradient sets have different lengths");
  for (std::size_t i = 0; i < g.size(); ++i) into[i] += scale * g[i];
}

}  // namespace prism
