#include "fallrec/mlp.hpp"

#include <cmath>

namespace fallrec {

namespace {

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
inline double elu_deriv(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

}  // namespace

Mlp::Mlp(int input_dim, const std::vector<int>& hidden, int output_dim)
    : input_dim_(input_dim), output_dim_(output_dim) {
  if (input_dim < 1 || output_dim < 1) throw ConfigError("bad mlp dims");
  sizes_.push_back(input_dim);
  for (int h : hidden) {
    if (h < 1) throw ConfigError("layer sizes must be >= 1");
    sizes_.push_back(h);
  }
  sizes_.push_back(output_dim);
  for (size_t i = 0; i + 1 < sizes_.size(); ++i) {
    weights_.emplace_back(MatX::Zero(sizes_[i + 1], sizes_[i]));
    biases_.emplace_back(VecX::Zero(sizes_[i + 1]));
  }
}

void Mlp::init_weights(Rng& rng) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    const double scale = std::sqrt(2.0 / sizes_[l]);
    // Last layer small so initial outputs stay near zero.
    const double gain = (l + 1 == weights_.size()) ? 0.01 : scale;
    for (int r = 0; r < weights_[l].rows(); ++r)
      for (int c = 0; c < weights_[l].cols(); ++c)
        weights_[l](r, c) = gain * rng.normal();
    biases_[l].setZero();
  }
}

VecX Mlp::forward(const VecX& input) const { return forward(input, nullptr); }

VecX Mlp::forward(const VecX& input, Cache* cache) const {
  if (input.size() != input_dim_) throw ConfigError("mlp input dim mismatch");
  VecX x = input;
  if (cache) {
    cache->pre.clear();
    cache->post.clear();
    cache->post.push_back(x);
  }
  for (size_t l = 0; l < weights_.size(); ++l) {
    VecX z = weights_[l] * x + biases_[l];
    if (cache) cache->pre.push_back(z);
    if (l + 1 < weights_.size())
      x = z.unaryExpr([](double v) { return elu(v); });
    else
      x = z;
    if (cache) cache->post.push_back(x);
  }
  return x;
}

VecX Mlp::backward(const Cache& cache, const VecX& grad_output,
                   VecX* grad_params) const {
  if (grad_params->size() != num_params())
    throw ConfigError("grad buffer size mismatch");
  VecX delta = grad_output;
  // Walk layers backwards, filling the flat gradient in forward layout.
  std::vector<int> offsets(weights_.size());
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    offsets[l] = off;
    off += static_cast<int>(weights_[l].size() + biases_[l].size());
  }
  for (int l = static_cast<int>(weights_.size()) - 1; l >= 0; --l) {
    if (static_cast<size_t>(l) + 1 < weights_.size()) {
      const VecX& z = cache.pre[l];
      delta = delta.cwiseProduct(
          z.unaryExpr([](double v) { return elu_deriv(v); }));
    }
    const VecX& x = cache.post[l];
    const int wn = static_cast<int>(weights_[l].size());
    Eigen::Map<MatX> gw(grad_params->data() + offsets[l], weights_[l].rows(),
                        weights_[l].cols());
    gw.noalias() += delta * x.transpose();
    grad_params->segment(offsets[l] + wn, biases_[l].size()) += delta;
    delta = weights_[l].transpose() * delta;
  }
  return delta;
}

int Mlp::num_params() const {
  int n = 0;
  for (size_t l = 0; l < weights_.size(); ++l)
    n += static_cast<int>(weights_[l].size() + biases_[l].size());
  return n;
}

VecX Mlp::params() const {
  VecX flat(num_params());
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<const VecX> w(weights_[l].data(), weights_[l].size());
    flat.segment(off, w.size()) = w;
    off += static_cast<int>(w.size());
    flat.segment(off, biases_[l].size()) = biases_[l];
    off += static_cast<int>(biases_[l].size());
  }
  return flat;
}

void Mlp::set_params(const VecX& flat) {
  if (flat.size() != num_params()) throw ConfigError("param size mismatch");
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::Map<MatX> w(weights_[l].data(), weights_[l].rows(),
                       weights_[l].cols());
    w = Eigen::Map<const MatX>(flat.data() + off, weights_[l].rows(),
                               weights_[l].cols());
    off += static_cast<int>(weights_[l].size());
    biases_[l] = flat.segment(off, biases_[l].size());
    off += static_cast<int>(biases_[l].size());
  }
}

AdamOptimizer::AdamOptimizer(int n, double lr, double beta1, double beta2,
                             double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_ = VecX::Zero(n);
  v_ = VecX::Zero(n);
}

VecX AdamOptimizer::step(const VecX& params, const VecX& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  VecX out(params.size());
  for (int i = 0; i < params.size(); ++i) {
    const double mh = m_(i) / c1;
    const double vh = v_(i) / c2;
    out(i) = params(i) - lr_ * mh / (std::sqrt(vh) + eps_);
  }
  return out;
}

void AdamOptimizer::restore(const VecX& m, const VecX& v, int64_t t) {
  m_ = m;
  v_ = v;
  t_ = t;
}

}  // namespace fallrec
