#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ipinn/jet.hpp"

namespace ipinn {

/// Fully connected tanh network: input -> hidden_layers x hidden_width -> output.
/// The output layer is affine (no activation).
struct MlpLayout {
  std::size_t input_dim = 1;
  std::size_t hidden_layers = 5;
  std::size_t hidden_width = 40;
  std::size_t output_dim = 1;

  /// Number of affine layers (hidden layers plus the output layer).
  std::size_t n_affine() const { return hidden_layers + 1; }
  std::size_t fan_in(std::size_t layer) const;
  std::size_t fan_out(std::size_t layer) const;
  std::size_t parameter_count() const;

  /// Throws std::invalid_argument on zero dimensions.
  void validate() const;

  friend bool operator==(const MlpLayout&, const MlpLayout&) = default;
};

/// Weights and biases stored contiguously. Layer l occupies
/// [W_l (fan_out x fan_in, column-major) | b_l (fan_out)].
class ParamSet {
 public:
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  ParamSet() = default;
  explicit ParamSet(MlpLayout layout);
  ParamSet(MlpLayout layout, std::vector<double> flat);

  const MlpLayout& layout() const { return layout_; }

  std::span<double> flat() { return flat_; }
  std::span<const double> flat() const { return flat_; }
  std::size_t size() const { return flat_.size(); }

  MatrixMap weights(std::size_t layer);
  ConstMatrixMap weights(std::size_t layer) const;
  VectorMap bias(std::size_t layer);
  ConstVectorMap bias(std::size_t layer) const;

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const;

  friend bool operator==(const ParamSet& a, const ParamSet& b) {
    return a.layout_ == b.layout_ && a.flat_ == b.flat_;
  }

 private:
  MlpLayout layout_;
  std::vector<std::size_t> offsets_;
  std::vector<double> flat_;
};

/// Glorot-uniform weights, zero biases. Deterministic in `seed`.
ParamSet init_mlp(const MlpLayout& layout, std::uint64_t seed);

/// Evaluates the network on a single jet input, one neuron at a time.
std::vector<Jet3> mlp_forward(const ParamSet& params, const Jet3& x);

/// Forward pass over a batch of scalar inputs, propagating derivative
/// coefficients 0..order with respect to the input. Keeps the intermediate
/// state needed to back-propagate jet adjoints to the parameters.
class MlpBatch {
 public:
  MlpBatch(const ParamSet& params, std::span<const double> xs, int order);

  std::size_t n_points() const { return n_; }
  std::size_t output_dim() const { return out_.rows(); }
  int order() const { return order_; }

  /// Jet of output `o` at point `p`; coefficients above order() are zero.
  Jet3 output(std::size_t p, std::size_t o) const;

  /// `adjoint` is output_dim x ((order+1) * n_points); column k*n + p holds the
  /// adjoint of coefficient k of the outputs at point p. Accumulates into
  /// `grad` (same layout as ParamSet::flat()).
  void backward(const Eigen::MatrixXd& adjoint, std::span<double> grad) const;

 private:
  struct HiddenCache {
    Eigen::MatrixXd input;  // stacked coefficients of the layer input
    Eigen::ArrayXXd z;      // stacked pre-activation
    std::array<Eigen::ArrayXXd, 4> d;  // tanh', tanh'', tanh''', tanh'''' at z0
  };

  const ParamSet* params_;
  // Owned copies of the weight matrices. Maps into the flat vector have
  // heap-dependent alignment, which changes the vectorized summation order
  // and makes runs differ in the last bit.
  std::vector<Eigen::MatrixXd> w_;
  std::size_t n_;
  int order_;
  std::vector<HiddenCache> hidden_;
  Eigen::MatrixXd last_input_;
  Eigen::MatrixXd out_;
};

/// Writes one JSON header line (layout, seed, count) followed by the flat
/// parameters as little-endian float64.
void write_snapshot(const std::filesystem::path& path, const ParamSet& params,
                    std::uint64_t seed);

struct Snapshot {
  ParamSet params;
  std::uint64_t seed = 0;
};

Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace ipinn
