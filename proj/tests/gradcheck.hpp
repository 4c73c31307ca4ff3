#pragma once

// Central finite-difference gradient check for autodiff graphs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "daa/autodiff.hpp"
#include "daa/matrix.hpp"

namespace daa::test {

struct GradCheckResult {
  double max_rel_error = 0.0;  // over leaves, ||g - fd|| / max(||g||, ||fd||, floor)
  std::string worst_leaf;
};

/// Re-evaluates `out` with each leaf entry perturbed by +-h. The graph must
/// already be built; `inputs` holds the value of every leaf by name.
inline GradCheckResult gradcheck(ad::Graph& g, ad::NodeId out, std::map<std::string, Matrix> inputs,
                                 double h = 1e-5, double floor = 1e-6) {
  auto eval = [&]() {
    ad::Bindings b;
    for (auto& [name, m] : inputs) b.bind(name, m);
    g.forward(b);
    return g.scalar(out);
  };
  eval();
  g.backward(out);
  std::map<std::string, Matrix> analytic;
  for (auto& [name, m] : inputs) analytic.emplace(name, g.grad(g.find_leaf(name)));

  GradCheckResult res;
  for (auto& [name, m] : inputs) {
    Matrix fd(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double orig = m.values()[i];
      m.values()[i] = orig + h;
      const double up = eval();
      m.values()[i] = orig - h;
      const double down = eval();
      m.values()[i] = orig;
      fd.values()[i] = (up - down) / (2.0 * h);
    }
    const Matrix& a = analytic.at(name);
    double diff = 0.0, na = 0.0, nf = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      diff += std::pow(a.values()[i] - fd.values()[i], 2);
      na += a.values()[i] * a.values()[i];
      nf += fd.values()[i] * fd.values()[i];
    }
    const double rel = std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nf), floor});
    if (rel >= res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst_leaf = name;
    }
  }
  return res;
}

}  // namespace daa::test
