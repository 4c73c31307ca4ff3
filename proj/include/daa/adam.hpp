#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "daa/matrix.hpp"
#include "daa/random.hpp"

namespace daa {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Named parameter tensors with their Adam moment estimates. Iteration
/// order is insertion order, which keeps serialization deterministic.
class ParamStore {
 public:
  struct Param {
    std::string name;
    Matrix value;
    Matrix m;  // first moment
    Matrix v;  // second moment
  };

  void add(const std::string& name, Matrix init);
  bool contains(const std::string& name) const { return index_.contains(name); }
  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  const std::vector<Param>& params() const noexcept { return params_; }
  std::vector<Param>& params() noexcept { return params_; }
  std::size_t parameter_count() const noexcept;

  /// Number of Adam updates applied so far (shared by all parameters).
  std::uint64_t step() const noexcept { return step_; }
  void set_step(std::uint64_t s) noexcept { step_ = s; }

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t step_ = 0;
};

using GradMap = std::unordered_map<std::string, Matrix>;

/// One bias-corrected Adam update of every parameter. `grads` must hold a
/// gradient of matching shape for each parameter (ShapeError otherwise).
void adam_step(ParamStore& params, const GradMap& grads, const AdamOptions& opts);

}  // namespace daa
