#pragma once

#include <vector>

#include "fallrec/rng.hpp"
#include "fallrec/types.hpp"

namespace fallrec {

// Fully-connected network with ELU hidden activations and a linear output,
// plus hand-rolled backprop. Doubles throughout; gradient checks against
// central finite differences are part of the test suite.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int input_dim, const std::vector<int>& hidden, int output_dim);

  void init_weights(Rng& rng);  // orthogonal-ish scaled Gaussian init

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const std::vector<int>& layer_sizes() const { return sizes_; }

  VecX forward(const VecX& input) const;

  struct Cache {
    std::vector<VecX> pre;   // pre-activation per layer
    std::vector<VecX> post;  // post-activation (post[0] = input)
  };
  VecX forward(const VecX& input, Cache* cache) const;

  // Accumulates d(loss)/d(params) into grad (flat, same layout as params())
  // given d(loss)/d(output). Returns d(loss)/d(input).
  VecX backward(const Cache& cache, const VecX& grad_output,
                VecX* grad_params) const;

  int num_params() const;
  VecX params() const;               // flat [W0, b0, W1, b1, ...]
  void set_params(const VecX& flat);

 private:
  int input_dim_ = 0, output_dim_ = 0;
  std::vector<int> sizes_;  // [input, hidden..., output]
  std::vector<MatX> weights_;
  std::vector<VecX> biases_;
};

// Adam with the usual bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(int n, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  VecX step(const VecX& params, const VecX& grad);

  const VecX& m() const { return m_; }
  const VecX& v() const { return v_; }
  int64_t t() const { return t_; }
  void restore(const VecX& m, const VecX& v, int64_t t);
  double lr() const { return lr_; }

 private:
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int64_t t_ = 0;
  VecX m_, v_;
};

}  // namespace fallrec
