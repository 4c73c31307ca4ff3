#pragma once

// Reverse-mode automatic differentiation over dense matrices.
//
// A Graph is built once (define-then-run): leaves are named placeholders bound
// to concrete matrices at every forward() call, so one graph serves every
// mini-batch even when the batch size changes. Node ids are creation order,
// which is also a valid topological order.

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "daa/matrix.hpp"

namespace daa::ad {

using NodeId = std::size_t;

enum class Op {
  Leaf,
  Constant,
  MatMul,
  Add,
  AddRowBroadcast,  // a (m x n) + b (1 x n) on every row
  Sub,
  Mul,              // elementwise
  Scale,            // c * a
  AddScalar,        // a + c
  ScalarMul,        // s (1 x 1 node) * a
  Relu,
  Exp,
  Log,
  Square,
  Clamp,            // clamp to [lo, hi]; zero gradient outside
  RowSoftmax,
  ColSoftmax,
  Transpose,
  Sum,              // -> 1 x 1
  Mean,             // -> 1 x 1
  RowSum,           // -> m x 1
  Reparam,          // mu + max(sigma, kSigmaFloor) * eps
  RepeatRows,       // each row repeated `times` times consecutively
  PairwiseSqDist,   // a (n x d) against constant centers (s x d) -> n x s
  RowLogSumExp,     // -> m x 1
};

const char* op_name(Op op);

/// Lower clamp applied to sigma inside the reparametrization.
inline constexpr double kSigmaFloor = 1e-6;

/// Leaf bindings for one forward pass. Stores pointers; the bound matrices
/// must outlive the forward() call.
class Bindings {
 public:
  Bindings& bind(const std::string& name, const Matrix& value) {
    map_[name] = &value;
    return *this;
  }
  const Matrix* find(const std::string& name) const {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : it->second;
  }

 private:
  std::unordered_map<std::string, const Matrix*> map_;
};

class Graph {
 public:
  NodeId leaf(const std::string& name);
  NodeId constant(Matrix value);

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId add_row_broadcast(NodeId a, NodeId row);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double c);
  NodeId add_scalar(NodeId a, double c);
  NodeId scalar_mul(NodeId s, NodeId a);
  NodeId relu(NodeId a);
  NodeId exp(NodeId a);
  NodeId log(NodeId a);
  NodeId square(NodeId a);
  NodeId clamp(NodeId a, double lo, double hi);
  NodeId row_softmax(NodeId a);
  NodeId col_softmax(NodeId a);
  NodeId transpose(NodeId a);
  NodeId sum(NodeId a);
  NodeId mean(NodeId a);
  NodeId row_sum(NodeId a);
  /// mu + max(sigma, 1e-6) * eps; eps is normally a leaf rebound every step.
  NodeId reparam(NodeId mu, NodeId sigma, NodeId eps);
  NodeId repeat_rows(NodeId a, std::size_t times);
  /// Squared distances between the rows of `a` and the rows of the constant
  /// node `centers`; no gradient flows to the centers.
  NodeId pairwise_sq_dist(NodeId a, NodeId centers);
  NodeId row_logsumexp(NodeId a);

  /// x W + b, with b a 1 x out row.
  NodeId affine(NodeId x, NodeId w, NodeId b) { return add_row_broadcast(matmul(x, w), b); }

  /// Replaces the value of a Constant node (e.g. fresh Monte-Carlo centers).
  void set_constant(NodeId id, Matrix value);

  /// Evaluates every node in creation order. Throws InvalidArgument for an
  /// unbound leaf and ShapeError when an op's operands do not conform.
  void forward(const Bindings& inputs);

  /// Populates grad() of every node with d(output)/d(node). The output must
  /// be 1 x 1 and forward() must have run.
  void backward(NodeId output);

  const Matrix& value(NodeId id) const;
  const Matrix& grad(NodeId id) const;
  double scalar(NodeId id) const;

  std::size_t size() const noexcept { return nodes_.size(); }
  Op op(NodeId id) const { return nodes_.at(id).op; }
  const std::vector<NodeId>& leaves() const noexcept { return leaves_; }
  const std::string& leaf_name(NodeId id) const { return nodes_.at(id).name; }
  /// Id of the leaf named `name`; throws InvalidArgument when absent.
  NodeId find_leaf(const std::string& name) const;

 private:
  struct Node {
    Op op = Op::Leaf;
    NodeId a = 0;
    NodeId b = 0;
    NodeId c = 0;
    double p0 = 0.0;
    double p1 = 0.0;
    std::size_t count = 0;
    std::string name;
    Matrix value;
    Matrix grad;
  };

  NodeId push(Node n);
  NodeId unary(Op op, NodeId a, double p0 = 0.0, double p1 = 0.0);
  NodeId binary(Op op, NodeId a, NodeId b);
  void check(NodeId id) const;
  void eval(Node& n);
  void propagate(const Node& n);

  std::vector<Node> nodes_;
  std::vector<NodeId> leaves_;
  std::unordered_map<std::string, NodeId> leaf_index_;
  bool evaluated_ = false;
};

}  // namespace daa::ad
