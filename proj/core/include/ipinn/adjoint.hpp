#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ipinn/jet.hpp"

namespace ipinn {

class AdjointGraph;

/// Handle to a node of an AdjointGraph. Cheap to copy; only valid while the
/// owning graph is alive and has not been cleared.
struct Var {
  AdjointGraph* graph = nullptr;
  std::size_t id = 0;

  const Jet3& value() const;
};

enum class OpTag { Leaf, Constant, Add, Sub, Mul, Scale, Elem, Coef };

/// Append-only record of jet-valued operations with reverse accumulation.
///
/// Every node stores its value and, for each operand, the 4x4 Jacobian of
/// its coefficients with respect to the operand's coefficients. Adjoints
/// are jets: adjoint[i][k] is d(seed . root)/d(node_i.c[k]).
class AdjointGraph {
 public:
  using Partial = std::array<double, 16>;  // row-major d out[n] / d in[i]

  struct Node {
    OpTag tag = OpTag::Leaf;
    std::array<std::size_t, 2> args{0, 0};
    std::size_t nargs = 0;
    ElemFn fn = ElemFn::Exp;
    double param = 0.0;  // scale factor, Pow exponent, or Coef index
    Jet3 value;
    std::array<Partial, 2> partials{};
  };

  AdjointGraph() = default;
  AdjointGraph(const AdjointGraph&) = delete;
  AdjointGraph& operator=(const AdjointGraph&) = delete;

  void clear() { nodes_.clear(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }
  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t id) const { return nodes_[id]; }

  Var leaf(const Jet3& value);
  Var constant(const Jet3& value);
  Var constant(double value) { return constant(Jet3::constant(value)); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var elem(ElemFn f, Var a, double exponent = 0.0);
  Var coef(Var a, std::size_t k);

  /// Reverse accumulation from `root` seeded with `seed`. Nodes after root
  /// are ignored. When `visit_order` is given, the ids of visited nodes are
  /// appended in the order they were processed.
  std::vector<Jet3> backward(Var root, const Jet3& seed = Jet3{1.0},
                             std::vector<std::size_t>* visit_order = nullptr) const;

  /// Re-evaluates every node from its recorded operation. Leaves take the
  /// values in `leaf_values` (in creation order) when provided, otherwise
  /// their recorded values.
  std::vector<Jet3> replay(std::span<const Jet3> leaf_values = {}) const;

 private:
  Var push(Node n);

  std::vector<Node> nodes_;
};

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double s);
Var operator+(double s, Var a);
Var operator-(Var a, double s);
Var operator-(double s, Var a);
Var operator*(Var a, double s);
Var operator*(double s, Var a);
Var operator/(Var a, double s);
Var operator/(double s, Var a);

Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
Var sin(Var a);
Var cos(Var a);
Var recip(Var a);
Var pow(Var a, double p);
Var sq(Var a);
Var coef(Var a, std::size_t k);

struct GradResult {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Value and gradient of a scalar loss built on a fresh graph whose leaves
/// are the given parameters. The loss is the value coefficient of the
/// returned node.
GradResult grad(const std::function<Var(AdjointGraph&, std::span<const Var>)>& loss,
                std::span<const double> params);

}  // namespace ipinn
