#include "daa/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "daa/error.hpp"
#include "daa/kernels.hpp"

namespace daa::ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Constant: return "constant";
    case Op::MatMul: return "matmul";
    case Op::Add: return "add";
    case Op::AddRowBroadcast: return "add_row_broadcast";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Scale: return "scale";
    case Op::AddScalar: return "add_scalar";
    case Op::ScalarMul: return "scalar_mul";
    case Op::Relu: return "relu";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Square: return "square";
    case Op::Clamp: return "clamp";
    case Op::RowSoftmax: return "row_softmax";
    case Op::ColSoftmax: return "col_softmax";
    case Op::Transpose: return "transpose";
    case Op::Sum: return "sum";
    case Op::Mean: return "mean";
    case Op::RowSum: return "row_sum";
    case Op::Reparam: return "reparam";
    case Op::RepeatRows: return "repeat_rows";
    case Op::PairwiseSqDist: return "pairwise_sq_dist";
    case Op::RowLogSumExp: return "row_logsumexp";
  }
  return "?";
}

void Graph::check(NodeId id) const {
  if (id >= nodes_.size()) throw InvalidArgument("autodiff: unknown node id " + std::to_string(id));
}

NodeId Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  evaluated_ = false;
  return nodes_.size() - 1;
}

NodeId Graph::unary(Op op, NodeId a, double p0, double p1) {
  check(a);
  Node n;
  n.op = op;
  n.a = a;
  n.p0 = p0;
  n.p1 = p1;
  return push(std::move(n));
}

NodeId Graph::binary(Op op, NodeId a, NodeId b) {
  check(a);
  check(b);
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

NodeId Graph::leaf(const std::string& name) {
  if (leaf_index_.contains(name)) throw InvalidArgument("autodiff: duplicate leaf '" + name + "'");
  Node n;
  n.op = Op::Leaf;
  n.name = name;
  const NodeId id = push(std::move(n));
  leaves_.push_back(id);
  leaf_index_[name] = id;
  return id;
}

NodeId Graph::constant(Matrix value) {
  Node n;
  n.op = Op::Constant;
  n.value = std::move(value);
  return push(std::move(n));
}

void Graph::set_constant(NodeId id, Matrix value) {
  check(id);
  if (nodes_[id].op != Op::Constant) throw InvalidArgument("set_constant: node is not a constant");
  nodes_[id].value = std::move(value);
  evaluated_ = false;
}

NodeId Graph::matmul(NodeId a, NodeId b) { return binary(Op::MatMul, a, b); }
NodeId Graph::add(NodeId a, NodeId b) { return binary(Op::Add, a, b); }
NodeId Graph::add_row_broadcast(NodeId a, NodeId row) { return binary(Op::AddRowBroadcast, a, row); }
NodeId Graph::sub(NodeId a, NodeId b) { return binary(Op::Sub, a, b); }
NodeId Graph::mul(NodeId a, NodeId b) { return binary(Op::Mul, a, b); }
NodeId Graph::scale(NodeId a, double c) { return unary(Op::Scale, a, c); }
NodeId Graph::add_scalar(NodeId a, double c) { return unary(Op::AddScalar, a, c); }
NodeId Graph::scalar_mul(NodeId s, NodeId a) { return binary(Op::ScalarMul, s, a); }
NodeId Graph::relu(NodeId a) { return unary(Op::Relu, a); }
NodeId Graph::exp(NodeId a) { return unary(Op::Exp, a); }
NodeId Graph::log(NodeId a) { return unary(Op::Log, a); }
NodeId Graph::square(NodeId a) { return unary(Op::Square, a); }
NodeId Graph::clamp(NodeId a, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgument("clamp: lo must be <= hi");
  return unary(Op::Clamp, a, lo, hi);
}
NodeId Graph::row_softmax(NodeId a) { return unary(Op::RowSoftmax, a); }
NodeId Graph::col_softmax(NodeId a) { return unary(Op::ColSoftmax, a); }
NodeId Graph::transpose(NodeId a) { return unary(Op::Transpose, a); }
NodeId Graph::sum(NodeId a) { return unary(Op::Sum, a); }
NodeId Graph::mean(NodeId a) { return unary(Op::Mean, a); }
NodeId Graph::row_sum(NodeId a) { return unary(Op::RowSum, a); }
NodeId Graph::row_logsumexp(NodeId a) { return unary(Op::RowLogSumExp, a); }

NodeId Graph::reparam(NodeId mu, NodeId sigma, NodeId eps) {
  check(mu);
  check(sigma);
  check(eps);
  Node n;
  n.op = Op::Reparam;
  n.a = mu;
  n.b = sigma;
  n.c = eps;
  return push(std::move(n));
}

NodeId Graph::repeat_rows(NodeId a, std::size_t times) {
  if (times == 0) throw InvalidArgument("repeat_rows: times must be >= 1");
  const NodeId id = unary(Op::RepeatRows, a);
  nodes_[id].count = times;
  return id;
}

NodeId Graph::pairwise_sq_dist(NodeId a, NodeId centers) {
  check(centers);
  if (nodes_[centers].op != Op::Constant) throw InvalidArgument("pairwise_sq_dist: centers must be a constant node");
  return binary(Op::PairwiseSqDist, a, centers);
}

NodeId Graph::find_leaf(const std::string& name) const {
  auto it = leaf_index_.find(name);
  if (it == leaf_index_.end()) throw InvalidArgument("autodiff: no leaf named '" + name + "'");
  return it->second;
}

const Matrix& Graph::value(NodeId id) const {
  check(id);
  return nodes_[id].value;
}

const Matrix& Graph::grad(NodeId id) const {
  check(id);
  return nodes_[id].grad;
}

double Graph::scalar(NodeId id) const {
  const Matrix& v = value(id);
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("scalar: node value is " + v.shape_string());
  return v(0, 0);
}

namespace {

void need_same(const Matrix& a, const Matrix& b, Op op) { require_same_shape(a, b, op_name(op)); }

Matrix map(const Matrix& a, auto&& f) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = f(a.values()[i]);
  return out;
}

}  // namespace

void Graph::eval(Node& n) {
  switch (n.op) {
    case Op::Leaf:
    case Op::Constant:
      return;
    case Op::MatMul: {
      const Matrix& a = nodes_[n.a].value;
      const Matrix& b = nodes_[n.b].value;
      n.value = daa::matmul(a, b);
      return;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul: {
      const Matrix& a = nodes_[n.a].value;
      const Matrix& b = nodes_[n.b].value;
      need_same(a, b, n.op);
      n.value = a;
      auto& v = n.value.values();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (n.op == Op::Add) v[i] += b.values()[i];
        else if (n.op == Op::Sub) v[i] -= b.values()[i];
        else v[i] *= b.values()[i];
      }
      return;
    }
    case Op::AddRowBroadcast: {
      const Matrix& a = nodes_[n.a].value;
      const Matrix& r = nodes_[n.b].value;
      if (r.rows() != 1 || r.cols() != a.cols()) {
        throw ShapeError("add_row_broadcast: " + a.shape_string() + " plus row " + r.shape_string());
      }
      n.value = a;
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) n.value(i, j) += r(0, j);
      return;
    }
    case Op::Scale: n.value = map(nodes_[n.a].value, [c = n.p0](double x) { return c * x; }); return;
    case Op::AddScalar: n.value = map(nodes_[n.a].value, [c = n.p0](double x) { return x + c; }); return;
    case Op::ScalarMul: {
      const Matrix& s = nodes_[n.a].value;
      if (s.rows() != 1 || s.cols() != 1) throw ShapeError("scalar_mul: scale node is " + s.shape_string());
      n.value = map(nodes_[n.b].value, [c = s(0, 0)](double x) { return c * x; });
      return;
    }
    case Op::Relu: n.value = map(nodes_[n.a].value, [](double x) { return x > 0.0 ? x : 0.0; }); return;
    case Op::Exp: n.value = map(nodes_[n.a].value, [](double x) { return std::exp(x); }); return;
    case Op::Log: n.value = map(nodes_[n.a].value, [](double x) { return std::log(x); }); return;
    case Op::Square: n.value = map(nodes_[n.a].value, [](double x) { return x * x; }); return;
    case Op::Clamp:
      n.value = map(nodes_[n.a].value, [lo = n.p0, hi = n.p1](double x) { return std::clamp(x, lo, hi); });
      return;
    case Op::RowSoftmax:
    case Op::ColSoftmax: {
      const Matrix& a = nodes_[n.a].value;
      const bool rows = n.op == Op::RowSoftmax;
      n.value = Matrix(a.rows(), a.cols());
      const std::size_t outer = rows ? a.rows() : a.cols();
      const std::size_t inner = rows ? a.cols() : a.rows();
      auto at = [&](const Matrix& m, std::size_t o, std::size_t i) -> double { return rows ? m(o, i) : m(i, o); };
      for (std::size_t o = 0; o < outer; ++o) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < inner; ++i) mx = std::max(mx, at(a, o, i));
        double s = 0.0;
        for (std::size_t i = 0; i < inner; ++i) {
          const double e = std::exp(at(a, o, i) - mx);
          (rows ? n.value(o, i) : n.value(i, o)) = e;
          s += e;
        }
        for (std::size_t i = 0; i < inner; ++i) (rows ? n.value(o, i) : n.value(i, o)) /= s;
      }
      return;
    }
    case Op::Transpose: n.value = nodes_[n.a].value.transpose(); return;
    case Op::Sum:
    case Op::Mean: {
      const Matrix& a = nodes_[n.a].value;
      double s = 0.0;
      for (double x : a.values()) s += x;
      if (n.op == Op::Mean) {
        if (a.empty()) throw ShapeError("mean: empty operand");
        s /= static_cast<double>(a.size());
      }
      n.value = Matrix(1, 1, s);
      return;
    }
    case Op::RowSum: {
      const Matrix& a = nodes_[n.a].value;
      n.value = Matrix(a.rows(), 1);
      for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double x : a.row(i)) s += x;
        n.value(i, 0) = s;
      }
      return;
    }
    case Op::Reparam: {
      const Matrix& mu = nodes_[n.a].value;
      const Matrix& sigma = nodes_[n.b].value;
      const Matrix& eps = nodes_[n.c].value;
      need_same(mu, sigma, n.op);
      need_same(mu, eps, n.op);
      n.value = mu;
      for (std::size_t i = 0; i < mu.size(); ++i)
        n.value.values()[i] += std::max(sigma.values()[i], kSigmaFloor) * eps.values()[i];
      return;
    }
    case Op::RepeatRows: {
      const Matrix& a = nodes_[n.a].value;
      n.value = Matrix(a.rows() * n.count, a.cols());
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t l = 0; l < n.count; ++l)
          std::copy(a.row(i).begin(), a.row(i).end(), n.value.row(i * n.count + l).begin());
      return;
    }
    case Op::PairwiseSqDist: {
      const Matrix& a = nodes_[n.a].value;
      const Matrix& c = nodes_[n.b].value;
      if (a.cols() != c.cols()) throw ShapeError("pairwise_sq_dist: " + a.shape_string() + " vs centers " + c.shape_string());
      n.value = Matrix(a.rows(), c.rows());
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t s = 0; s < c.rows(); ++s) {
          double d2 = 0.0;
          for (std::size_t j = 0; j < a.cols(); ++j) {
            const double d = a(i, j) - c(s, j);
            d2 += d * d;
          }
          n.value(i, s) = d2;
        }
      return;
    }
    case Op::RowLogSumExp: {
      const Matrix& a = nodes_[n.a].value;
      n.value = Matrix(a.rows(), 1);
      for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        const double mx = *std::max_element(r.begin(), r.end());
        double s = 0.0;
        for (double x : r) s += std::exp(x - mx);
        n.value(i, 0) = mx + std::log(s);
      }
      return;
    }
  }
}

void Graph::forward(const Bindings& inputs) {
  for (auto& n : nodes_) {
    if (n.op == Op::Leaf) {
      const Matrix* v = inputs.find(n.name);
      if (v == nullptr) throw InvalidArgument("forward: leaf '" + n.name + "' is not bound");
      n.value = *v;
    } else {
      eval(n);
    }
  }
  evaluated_ = true;
}

namespace {

void accumulate(Matrix& dst, const Matrix& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst.values()[i] += src.values()[i];
}

}  // namespace

void Graph::propagate(const Node& n) {
  const Matrix& g = n.grad;
  switch (n.op) {
    case Op::Leaf:
    case Op::Constant:
      return;
    case Op::MatMul: {
      Node& a = nodes_[n.a];
      Node& b = nodes_[n.b];
      accumulate(a.grad, daa::matmul(g, b.value.transpose()));
      accumulate(b.grad, daa::matmul(a.value.transpose(), g));
      return;
    }
    case Op::Add:
      accumulate(nodes_[n.a].grad, g);
      accumulate(nodes_[n.b].grad, g);
      return;
    case Op::Sub: {
      accumulate(nodes_[n.a].grad, g);
      Matrix& gb = nodes_[n.b].grad;
      for (std::size_t i = 0; i < gb.size(); ++i) gb.values()[i] -= g.values()[i];
      return;
    }
    case Op::Mul: {
      Node& a = nodes_[n.a];
      Node& b = nodes_[n.b];
      for (std::size_t i = 0; i < g.size(); ++i) {
        a.grad.values()[i] += g.values()[i] * b.value.values()[i];
        b.grad.values()[i] += g.values()[i] * a.value.values()[i];
      }
      return;
    }
    case Op::AddRowBroadcast: {
      accumulate(nodes_[n.a].grad, g);
      Matrix& gr = nodes_[n.b].grad;
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gr(0, j) += g(i, j);
      return;
    }
    case Op::Scale: {
      Matrix& ga = nodes_[n.a].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga.values()[i] += n.p0 * g.values()[i];
      return;
    }
    case Op::AddScalar: accumulate(nodes_[n.a].grad, g); return;
    case Op::ScalarMul: {
      Node& s = nodes_[n.a];
      Node& a = nodes_[n.b];
      const double c = s.value(0, 0);
      double ds = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        a.grad.values()[i] += c * g.values()[i];
        ds += g.values()[i] * a.value.values()[i];
      }
      s.grad(0, 0) += ds;
      return;
    }
    case Op::Relu:
    case Op::Exp:
    case Op::Log:
    case Op::Square:
    case Op::Clamp: {
      Node& a = nodes_[n.a];
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = a.value.values()[i];
        double d = 0.0;
        switch (n.op) {
          case Op::Relu: d = x > 0.0 ? 1.0 : 0.0; break;
          case Op::Exp: d = n.value.values()[i]; break;
          case Op::Log: d = 1.0 / x; break;
          case Op::Square: d = 2.0 * x; break;
          default: d = (x >= n.p0 && x <= n.p1) ? 1.0 : 0.0; break;
        }
        a.grad.values()[i] += d * g.values()[i];
      }
      return;
    }
    case Op::RowSoftmax:
    case Op::ColSoftmax: {
      Matrix& ga = nodes_[n.a].grad;
      const Matrix& y = n.value;
      const bool rows = n.op == Op::RowSoftmax;
      const std::size_t outer = rows ? y.rows() : y.cols();
      const std::size_t inner = rows ? y.cols() : y.rows();
      for (std::size_t o = 0; o < outer; ++o) {
        double s = 0.0;
        for (std::size_t i = 0; i < inner; ++i) s += rows ? g(o, i) * y(o, i) : g(i, o) * y(i, o);
        for (std::size_t i = 0; i < inner; ++i) {
          if (rows) ga(o, i) += y(o, i) * (g(o, i) - s);
          else ga(i, o) += y(i, o) * (g(i, o) - s);
        }
      }
      return;
    }
    case Op::Transpose: accumulate(nodes_[n.a].grad, g.transpose()); return;
    case Op::Sum:
    case Op::Mean: {
      Matrix& ga = nodes_[n.a].grad;
      const double d = n.op == Op::Sum ? g(0, 0) : g(0, 0) / static_cast<double>(ga.size());
      for (double& x : ga.values()) x += d;
      return;
    }
    case Op::RowSum: {
      Matrix& ga = nodes_[n.a].grad;
      for (std::size_t i = 0; i < ga.rows(); ++i)
        for (double& x : ga.row(i)) x += g(i, 0);
      return;
    }
    case Op::Reparam: {
      Node& mu = nodes_[n.a];
      Node& sigma = nodes_[n.b];
      Node& eps = nodes_[n.c];
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double gi = g.values()[i];
        const double s = sigma.value.values()[i];
        mu.grad.values()[i] += gi;
        if (s > kSigmaFloor) sigma.grad.values()[i] += gi * eps.value.values()[i];
        eps.grad.values()[i] += gi * std::max(s, kSigmaFloor);
      }
      return;
    }
    case Op::RepeatRows: {
      Matrix& ga = nodes_[n.a].grad;
      for (std::size_t i = 0; i < ga.rows(); ++i)
        for (std::size_t l = 0; l < n.count; ++l)
          for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) += g(i * n.count + l, j);
      return;
    }
    case Op::PairwiseSqDist: {
      Node& a = nodes_[n.a];
      const Matrix& c = nodes_[n.b].value;
      for (std::size_t i = 0; i < a.value.rows(); ++i)
        for (std::size_t s = 0; s < c.rows(); ++s) {
          const double gis = 2.0 * g(i, s);
          if (gis == 0.0) continue;
          for (std::size_t j = 0; j < c.cols(); ++j) a.grad(i, j) += gis * (a.value(i, j) - c(s, j));
        }
      return;
    }
    case Op::RowLogSumExp: {
      Node& a = nodes_[n.a];
      for (std::size_t i = 0; i < a.value.rows(); ++i) {
        const double lse = n.value(i, 0);
        for (std::size_t j = 0; j < a.value.cols(); ++j) a.grad(i, j) += g(i, 0) * std::exp(a.value(i, j) - lse);
      }
      return;
    }
  }
}

void Graph::backward(NodeId output) {
  check(output);
  if (!evaluated_) throw InvalidArgument("backward: forward() has not been run on the current graph");
  const Matrix& out = nodes_[output].value;
  if (out.rows() != 1 || out.cols() != 1) {
    throw ShapeError("backward: output must be scalar (1x1), got " + out.shape_string());
  }
  for (auto& n : nodes_) n.grad = Matrix(n.value.rows(), n.value.cols());
  nodes_[output].grad(0, 0) = 1.0;
  for (NodeId id = output + 1; id-- > 0;) propagate(nodes_[id]);
}

}  // namespace daa::ad
