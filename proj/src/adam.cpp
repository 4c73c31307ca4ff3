#include "daa/adam.hpp"

#include <cmath>

#include "daa/error.hpp"

namespace daa {

void ParamStore::add(const std::string& name, Matrix init) {
  if (contains(name)) throw InvalidArgument("ParamStore: duplicate parameter '" + name + "'");
  index_[name] = params_.size();
  Matrix zeros(init.rows(), init.cols());
  params_.push_back(Param{name, std::move(init), zeros, zeros});
}

Matrix& ParamStore::value(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw InvalidArgument("ParamStore: no parameter '" + name + "'");
  return params_[it->second].value;
}

const Matrix& ParamStore::value(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InvalidArgument("ParamStore: no parameter '" + name + "'");
  return params_[it->second].value;
}

std::size_t ParamStore::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void adam_step(ParamStore& params, const GradMap& grads, const AdamOptions& opts) {
  for (const auto& p : params.params()) {
    auto it = grads.find(p.name);
    if (it == grads.end()) throw ShapeError("adam_step: missing gradient for '" + p.name + "'");
    require_same_shape(p.value, it->second, ("adam_step '" + p.name + "'").c_str());
  }
  const std::uint64_t t = params.step() + 1;
  const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(t));
  for (auto& p : params.params()) {
    const Matrix& g = grads.at(p.name);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double gi = g.values()[i];
      double& m = p.m.values()[i];
      double& v = p.v.values()[i];
      m = opts.beta1 * m + (1.0 - opts.beta1) * gi;
      v = opts.beta2 * v + (1.0 - opts.beta2) * gi * gi;
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      p.value.values()[i] -= opts.lr * m_hat / (std::sqrt(v_hat) + opts.eps);
    }
  }
  params.set_step(t);
}

}  // namespace daa
