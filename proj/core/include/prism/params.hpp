#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace prism {

using Matrix = Eigen::MatrixXd;

/// Named, shape-tagged trainable arrays in insertion order. Names are
/// hierarchical, dot-separated ("layer0.atomistic.msg.w1").
class ParamStore {
 public:
  /// Throws ConfigError on a duplicate name.
  int add(std::string name, Matrix init);

  bool contains(std::string_view name) const;
  /// Throws ConfigError for unknown names.
  int index(std::string_view name) const;

  std::size_t size() const { return values_.size(); }
  std::size_t scalar_count() const;

  const std::string& name(int i) const { return names_[std::size_t(i)]; }
  Matrix& value(int i) { return values_[std::size_t(i)]; }
  const Matrix& value(int i) const { return values_[std::size_t(i)]; }
  Matrix& value(std::string_view n) { return value(index(n)); }
  const Matrix& value(std::string_view n) const { return value(index(n)); }

  bool operator==(const ParamStore& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::map<std::string, int, std::less<>> index_;
};

/// One gradient array per parameter, aligned with ParamStore indices.
using Gradients = std::vector<Matrix>;

Gradients zero_gradients(const ParamStore& params);
/// into += scale * g
void accumulate(Gradients& into, const Gradients& g, double scale = 1.0);

}  // namespace prism
