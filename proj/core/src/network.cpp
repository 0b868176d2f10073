#include "ipinn/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace ipinn {

std::size_t MlpLayout::fan_in(std::size_t layer) const {
  return layer == 0 ? input_dim : hidden_width;
}

std::size_t MlpLayout::fan_out(std::size_t layer) const {
  return layer == hidden_layers ? output_dim : hidden_width;
}

std::size_t MlpLayout::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < n_affine(); ++l) n += fan_in(l) * fan_out(l) + fan_out(l);
  return n;
}

void MlpLayout::validate() const {
  if (input_dim != 1) throw std::invalid_argument("MlpLayout: input_dim must be 1");
  if (hidden_layers == 0 || hidden_width == 0) {
    throw std::invalid_argument("MlpLayout: need at least one non-empty hidden layer");
  }
  if (output_dim == 0) throw std::invalid_argument("MlpLayout: output_dim must be >= 1");
}

ParamSet::ParamSet(MlpLayout layout) : ParamSet(layout, std::vector<double>(layout.parameter_count(), 0.0)) {}

ParamSet::ParamSet(MlpLayout layout, std::vector<double> flat)
    : layout_(layout), flat_(std::move(flat)) {
  layout_.validate();
  if (flat_.size() != layout_.parameter_count()) {
    throw std::invalid_argument("ParamSet: flat vector has " + std::to_string(flat_.size()) +
                                " entries, layout needs " +
                                std::to_string(layout_.parameter_count()));
  }
  std::size_t off = 0;
  for (std::size_t l = 0; l < layout_.n_affine(); ++l) {
    offsets_.push_back(off);
    off += layout_.fan_in(l) * layout_.fan_out(l) + layout_.fan_out(l);
  }
}

std::size_t ParamSet::bias_offset(std::size_t layer) const {
  return offsets_[layer] + layout_.fan_in(layer) * layout_.fan_out(layer);
}

ParamSet::MatrixMap ParamSet::weights(std::size_t layer) {
  return MatrixMap(flat_.data() + offsets_[layer], static_cast<Eigen::Index>(layout_.fan_out(layer)),
                   static_cast<Eigen::Index>(layout_.fan_in(layer)));
}

ParamSet::ConstMatrixMap ParamSet::weights(std::size_t layer) const {
  return ConstMatrixMap(flat_.data() + offsets_[layer],
                        static_cast<Eigen::Index>(layout_.fan_out(layer)),
                        static_cast<Eigen::Index>(layout_.fan_in(layer)));
}

ParamSet::VectorMap ParamSet::bias(std::size_t layer) {
  return VectorMap(flat_.data() + bias_offset(layer), static_cast<Eigen::Index>(layout_.fan_out(layer)));
}

ParamSet::ConstVectorMap ParamSet::bias(std::size_t layer) const {
  return ConstVectorMap(flat_.data() + bias_offset(layer),
                        static_cast<Eigen::Index>(layout_.fan_out(layer)));
}

ParamSet init_mlp(const MlpLayout& layout, std::uint64_t seed) {
  ParamSet params(layout);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < layout.n_affine(); ++l) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layout.fan_in(l) + layout.fan_out(l)));
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto w = params.weights(l);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  }
  return params;
}

std::vector<Jet3> mlp_forward(const ParamSet& params, const Jet3& x) {
  const MlpLayout& layout = params.layout();
  std::vector<Jet3> a{x};
  for (std::size_t l = 0; l < layout.n_affine(); ++l) {
    const auto w = params.weights(l);
    const auto b = params.bias(l);
    std::vector<Jet3> z(layout.fan_out(l));
    for (std::size_t i = 0; i < z.size(); ++i) {
      Jet3 acc = Jet3::constant(b(static_cast<Eigen::Index>(i)));
      for (std::size_t j = 0; j < a.size(); ++j) {
        acc = acc + a[j] * w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      z[i] = l < layout.hidden_layers ? tanh(acc) : acc;
    }
    a = std::move(z);
  }
  return a;
}

MlpBatch::MlpBatch(const ParamSet& params, std::span<const double> xs, int order)
    : params_(&params), n_(xs.size()), order_(order) {
  if (order < 0 || order > 3) throw std::invalid_argument("MlpBatch: order must be in [0, 3]");
  const MlpLayout& layout = params.layout();
  const auto n = static_cast<Eigen::Index>(n_);
  const Eigen::Index k_count = order + 1;
  for (std::size_t l = 0; l < layout.n_affine(); ++l) w_.emplace_back(params.weights(l));

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, k_count * n);
  for (Eigen::Index p = 0; p < n; ++p) a(0, p) = xs[static_cast<std::size_t>(p)];
  if (order >= 1) a.block(0, n, 1, n).setOnes();

  hidden_.resize(layout.hidden_layers);
  for (std::size_t l = 0; l < layout.hidden_layers; ++l) {
    HiddenCache& c = hidden_[l];
    c.input = std::move(a);
    Eigen::MatrixXd z = w_[l] * c.input;
    z.leftCols(n).colwise() += params.bias(l);
    c.z = z.array();

    const auto z0 = c.z.leftCols(n);
    const Eigen::ArrayXXd y = z0.unaryExpr([](double v) { return tanh_via_exp(v); });
    const Eigen::ArrayXXd y2 = y.square();
    c.d[0] = 1.0 - y2;
    c.d[1] = -2.0 * y * c.d[0];
    c.d[2] = c.d[0] * (6.0 * y2 - 2.0);
    c.d[3] = c.d[1] * (6.0 * y2 - 2.0) + 12.0 * y * c.d[0].square();

    Eigen::ArrayXXd out(c.z.rows(), c.z.cols());
    out.leftCols(n) = y;
    if (order >= 1) {
      const auto z1 = c.z.middleCols(n, n);
      out.middleCols(n, n) = c.d[0] * z1;
      if (order >= 2) {
        const auto z2 = c.z.middleCols(2 * n, n);
        out.middleCols(2 * n, n) = c.d[1] * z1.square() + c.d[0] * z2;
        if (order >= 3) {
          const auto z3 = c.z.middleCols(3 * n, n);
          out.middleCols(3 * n, n) =
              c.d[2] * z1.cube() + 3.0 * c.d[1] * z1 * z2 + c.d[0] * z3;
        }
      }
    }
    a = out.matrix();
  }

  const std::size_t last = layout.hidden_layers;
  last_input_ = std::move(a);
  out_ = w_[last] * last_input_;
  out_.leftCols(n).colwise() += params.bias(last);
}

Jet3 MlpBatch::output(std::size_t p, std::size_t o) const {
  Jet3 j;
  const auto n = static_cast<Eigen::Index>(n_);
  for (int k = 0; k <= order_; ++k) {
    j[static_cast<std::size_t>(k)] = out_(static_cast<Eigen::Index>(o), k * n + static_cast<Eigen::Index>(p));
  }
  return j;
}

void MlpBatch::backward(const Eigen::MatrixXd& adjoint, std::span<double> grad) const {
  const ParamSet& params = *params_;
  const MlpLayout& layout = params.layout();
  const auto n = static_cast<Eigen::Index>(n_);
  if (adjoint.rows() != out_.rows() || adjoint.cols() != out_.cols()) {
    throw std::invalid_argument("MlpBatch::backward: adjoint shape mismatch");
  }
  if (grad.size() != params.size()) {
    throw std::invalid_argument("MlpBatch::backward: gradient size mismatch");
  }

  auto grad_w = [&](std::size_t l) {
    return ParamSet::MatrixMap(grad.data() + params.weight_offset(l),
                               static_cast<Eigen::Index>(layout.fan_out(l)),
                               static_cast<Eigen::Index>(layout.fan_in(l)));
  };
  auto grad_b = [&](std::size_t l) {
    return ParamSet::VectorMap(grad.data() + params.bias_offset(l),
                               static_cast<Eigen::Index>(layout.fan_out(l)));
  };

  const std::size_t last = layout.hidden_layers;
  // products go to owned temporaries; only elementwise adds touch grad
  Eigen::MatrixXd gw = adjoint * last_input_.transpose();
  Eigen::VectorXd gb = adjoint.leftCols(n).rowwise().sum();
  grad_w(last) += gw;
  grad_b(last) += gb;
  Eigen::MatrixXd ga = w_[last].transpose() * adjoint;

  for (std::size_t l = layout.hidden_layers; l-- > 0;) {
    const HiddenCache& c = hidden_[l];
    const auto& d = c.d;
    const Eigen::ArrayXXd gy = ga.array();
    Eigen::ArrayXXd gz(gy.rows(), gy.cols());

    const auto gy0 = gy.leftCols(n);
    gz.leftCols(n) = gy0 * d[0];
    if (order_ >= 1) {
      const auto z1 = c.z.middleCols(n, n);
      const auto gy1 = gy.middleCols(n, n);
      gz.leftCols(n) += gy1 * d[1] * z1;
      gz.middleCols(n, n) = gy1 * d[0];
      if (order_ >= 2) {
        const auto z2 = c.z.middleCols(2 * n, n);
        const auto gy2 = gy.middleCols(2 * n, n);
        gz.leftCols(n) += gy2 * (d[2] * z1.square() + d[1] * z2);
        gz.middleCols(n, n) += gy2 * 2.0 * d[1] * z1;
        gz.middleCols(2 * n, n) = gy2 * d[0];
        if (order_ >= 3) {
          const auto z3 = c.z.middleCols(3 * n, n);
          const auto gy3 = gy.middleCols(3 * n, n);
          gz.leftCols(n) += gy3 * (d[3] * z1.cube() + 3.0 * d[2] * z1 * z2 + d[1] * z3);
          gz.middleCols(n, n) += gy3 * (3.0 * d[2] * z1.square() + 3.0 * d[1] * z2);
          gz.middleCols(2 * n, n) += gy3 * 3.0 * d[1] * z1;
          gz.middleCols(3 * n, n) = gy3 * d[0];
        }
      }
    }

    const Eigen::MatrixXd gzm = gz.matrix();
    gw.noalias() = gzm * c.input.transpose();
    gb = gzm.leftCols(n).rowwise().sum();
    grad_w(l) += gw;
    grad_b(l) += gb;
    if (l > 0) ga = w_[l].transpose() * gzm;
  }
}

namespace {

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFFu);
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  if (!is) throw std::runtime_error("snapshot: truncated parameter data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const ParamSet& params,
                    std::uint64_t seed) {
  const MlpLayout& l = params.layout();
  nlohmann::json header = {
      {"layout",
       {{"input_dim", l.input_dim},
        {"hidden_layers", l.hidden_layers},
        {"hidden_width", l.hidden_width},
        {"output_dim", l.output_dim}}},
      {"seed", seed},
      {"count", params.size()},
  };
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string());
  os << header.dump() << '\n';
  for (double v : params.flat()) put_le(os, v);
  if (!os) throw std::runtime_error("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  const auto header = nlohmann::json::parse(line);
  MlpLayout layout;
  const auto& jl = header.at("layout");
  layout.input_dim = jl.at("input_dim").get<std::size_t>();
  layout.hidden_layers = jl.at("hidden_layers").get<std::size_t>();
  layout.hidden_width = jl.at("hidden_width").get<std::size_t>();
  layout.output_dim = jl.at("output_dim").get<std::size_t>();
  const auto count = header.at("count").get<std::size_t>();
  if (count != layout.parameter_count()) {
    throw std::runtime_error("snapshot: count does not match layout");
  }
  std::vector<double> flat(count);
  for (double& v : flat) v = get_le(is);
  return {ParamSet(layout, std::move(flat)), header.at("seed").get<std::uint64_t>()};
}

}  // namespace ipinn
