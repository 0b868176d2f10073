#include "ipinn/adjoint.hpp"

#include <cassert>

namespace ipinn {

namespace {

using Partial = AdjointGraph::Partial;

Partial identity_partial(double s = 1.0) {
  Partial p{};
  for (int i = 0; i < 4; ++i) p[i * 4 + i] = s;
  return p;
}

// d(a*b)[n] / d a[i] = C(n, i) b[n - i]
Partial mul_partial(const Jet3& other) {
  static constexpr double binom[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  Partial p{};
  for (int n = 0; n < 4; ++n) {
    for (int i = 0; i <= n; ++i) p[n * 4 + i] = binom[n][i] * other[n - i];
  }
  return p;
}

Partial elem_partial(const std::array<double, 5>& d, const Jet3& a) {
  const double a1 = a[1];
  const double a2 = a[2];
  const double a3 = a[3];
  Partial p{};
  p[0 * 4 + 0] = d[1];

  p[1 * 4 + 0] = d[2] * a1;
  p[1 * 4 + 1] = d[1];

  p[2 * 4 + 0] = d[3] * a1 * a1 + d[2] * a2;
  p[2 * 4 + 1] = 2.0 * d[2] * a1;
  p[2 * 4 + 2] = d[1];

  p[3 * 4 + 0] = d[4] * a1 * a1 * a1 + 3.0 * d[3] * a1 * a2 + d[2] * a3;
  p[3 * 4 + 1] = 3.0 * d[3] * a1 * a1 + 3.0 * d[2] * a2;
  p[3 * 4 + 2] = 3.0 * d[2] * a1;
  p[3 * 4 + 3] = d[1];
  return p;
}

Jet3 eval_node(const AdjointGraph::Node& n, const Jet3& a, const Jet3& b) {
  switch (n.tag) {
    case OpTag::Leaf:
    case OpTag::Constant: return n.value;
    case OpTag::Add: return jet_add(a, b);
    case OpTag::Sub: return jet_sub(a, b);
    case OpTag::Mul: return jet_mul(a, b);
    case OpTag::Scale: return jet_scale(a, n.param);
    case OpTag::Elem: return jet_elem(n.fn, a, n.param);
    case OpTag::Coef: return jet_coef(a, static_cast<std::size_t>(n.param));
  }
  return {};
}

}  // namespace

const Jet3& Var::value() const { return graph->node(id).value; }

Var AdjointGraph::push(Node n) {
  nodes_.push_back(n);
  return Var{this, nodes_.size() - 1};
}

Var AdjointGraph::leaf(const Jet3& value) {
  Node n;
  n.tag = OpTag::Leaf;
  n.value = value;
  return push(n);
}

Var AdjointGraph::constant(const Jet3& value) {
  Node n;
  n.tag = OpTag::Constant;
  n.value = value;
  return push(n);
}

Var AdjointGraph::add(Var a, Var b) {
  Node n;
  n.tag = OpTag::Add;
  n.args = {a.id, b.id};
  n.nargs = 2;
  n.value = jet_add(nodes_[a.id].value, nodes_[b.id].value);
  n.partials = {identity_partial(), identity_partial()};
  return push(n);
}

Var AdjointGraph::sub(Var a, Var b) {
  Node n;
  n.tag = OpTag::Sub;
  n.args = {a.id, b.id};
  n.nargs = 2;
  n.value = jet_sub(nodes_[a.id].value, nodes_[b.id].value);
  n.partials = {identity_partial(), identity_partial(-1.0)};
  return push(n);
}

Var AdjointGraph::mul(Var a, Var b) {
  const Jet3& va = nodes_[a.id].value;
  const Jet3& vb = nodes_[b.id].value;
  Node n;
  n.tag = OpTag::Mul;
  n.args = {a.id, b.id};
  n.nargs = 2;
  n.value = jet_mul(va, vb);
  n.partials = {mul_partial(vb), mul_partial(va)};
  return push(n);
}

Var AdjointGraph::scale(Var a, double s) {
  Node n;
  n.tag = OpTag::Scale;
  n.args = {a.id, 0};
  n.nargs = 1;
  n.param = s;
  n.value = jet_scale(nodes_[a.id].value, s);
  n.partials[0] = identity_partial(s);
  return push(n);
}

Var AdjointGraph::elem(ElemFn f, Var a, double exponent) {
  const Jet3& va = nodes_[a.id].value;
  const auto d = elem_derivatives(f, va[0], exponent);
  Node n;
  n.tag = OpTag::Elem;
  n.fn = f;
  n.args = {a.id, 0};
  n.nargs = 1;
  n.param = exponent;
  n.value = jet_compose(d, va);
  n.partials[0] = elem_partial(d, va);
  return push(n);
}

Var AdjointGraph::coef(Var a, std::size_t k) {
  assert(k < 4);
  Node n;
  n.tag = OpTag::Coef;
  n.args = {a.id, 0};
  n.nargs = 1;
  n.param = static_cast<double>(k);
  n.value = jet_coef(nodes_[a.id].value, k);
  n.partials[0][k] = 1.0;
  return push(n);
}

std::vector<Jet3> AdjointGraph::backward(Var root, const Jet3& seed,
                                         std::vector<std::size_t>* visit_order) const {
  std::vector<Jet3> adj(nodes_.size());
  adj[root.id] = seed;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    if (visit_order) visit_order->push_back(i);
    const Node& n = nodes_[i];
    const Jet3& g = adj[i];
    if (g == Jet3{}) continue;
    for (std::size_t a = 0; a < n.nargs; ++a) {
      const Partial& p = n.partials[a];
      Jet3& target = adj[n.args[a]];
      for (int k = 0; k < 4; ++k) {
        double s = 0.0;
        for (int m = 0; m < 4; ++m) s += p[m * 4 + k] * g[m];
        target[k] += s;
      }
    }
  }
  return adj;
}

std::vector<Jet3> AdjointGraph::replay(std::span<const Jet3> leaf_values) const {
  std::vector<Jet3> values(nodes_.size());
  std::size_t next_leaf = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.tag == OpTag::Leaf) {
      values[i] = next_leaf < leaf_values.size() ? leaf_values[next_leaf] : n.value;
      ++next_leaf;
      continue;
    }
    const Jet3 a = n.nargs > 0 ? values[n.args[0]] : Jet3{};
    const Jet3 b = n.nargs > 1 ? values[n.args[1]] : Jet3{};
    values[i] = eval_node(n, a, b);
  }
  return values;
}

Var operator+(Var a, Var b) { return a.graph->add(a, b); }
Var operator-(Var a, Var b) { return a.graph->sub(a, b); }
Var operator*(Var a, Var b) { return a.graph->mul(a, b); }
Var operator/(Var a, Var b) { return a.graph->mul(a, a.graph->elem(ElemFn::Recip, b)); }
Var operator-(Var a) { return a.graph->scale(a, -1.0); }
Var operator+(Var a, double s) { return a.graph->add(a, a.graph->constant(s)); }
Var operator+(double s, Var a) { return a.graph->add(a.graph->constant(s), a); }
Var operator-(Var a, double s) { return a.graph->sub(a, a.graph->constant(s)); }
Var operator-(double s, Var a) { return a.graph->sub(a.graph->constant(s), a); }
Var operator*(Var a, double s) { return a.graph->scale(a, s); }
Var operator*(double s, Var a) { return a.graph->scale(a, s); }
Var operator/(Var a, double s) {
  if (s == 0.0) throw DomainError("division by zero");
  return a.graph->scale(a, 1.0 / s);
}
Var operator/(double s, Var a) { return a.graph->scale(a.graph->elem(ElemFn::Recip, a), s); }

Var tanh(Var a) { return a.graph->elem(ElemFn::Tanh, a); }
Var exp(Var a) { return a.graph->elem(ElemFn::Exp, a); }
Var log(Var a) { return a.graph->elem(ElemFn::Log, a); }
Var sin(Var a) { return a.graph->elem(ElemFn::Sin, a); }
Var cos(Var a) { return a.graph->elem(ElemFn::Cos, a); }
Var recip(Var a) { return a.graph->elem(ElemFn::Recip, a); }
Var pow(Var a, double p) { return a.graph->elem(ElemFn::Pow, a, p); }
Var sq(Var a) { return a.graph->mul(a, a); }
Var coef(Var a, std::size_t k) { return a.graph->coef(a, k); }

GradResult grad(const std::function<Var(AdjointGraph&, std::span<const Var>)>& loss,
                std::span<const double> params) {
  AdjointGraph graph;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (double p : params) leaves.push_back(graph.leaf(Jet3::constant(p)));
  const Var root = loss(graph, leaves);
  const auto adj = graph.backward(root);
  GradResult out;
  out.value = root.value()[0];
  out.gradient.reserve(params.size());
  for (const Var& v : leaves) out.gradient.push_back(adj[v.id][0]);
  return out;
}

}  // namespace ipinn
