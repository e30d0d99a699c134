#pragma once

#include <cstddef>
#include <vector>

#include "hsc/rng.hpp"

namespace hsc {

// Fully connected net with two tanh hidden layers and a linear output,
// with hand-written backprop. Weights are row-major (out x in).
struct Mlp {
  std::size_t in = 0;
  std::size_t hidden = 0;
  std::size_t out = 0;
  std::vector<double> w1, b1;  // hidden x in
  std::vector<double> w2, b2;  // hidden x hidden
  std::vector<double> w3, b3;  // out x hidden

  static Mlp zeros(std::size_t in, std::size_t hidden, std::size_t out);

  // Orthogonal weights (gain hidden_gain on the trunk, out_gain on the
  // output layer), zero biases.
  static Mlp orthogonal(std::size_t in, std::size_t hidden, std::size_t out,
                        double hidden_gain, double out_gain, RandomStream& rng);

  struct Cache {
    std::vector<double> input;
    std::vector<double> h1;  // post-tanh
    std::vector<double> h2;  // post-tanh
  };

  // Returns the output vector; fills `cache` for backward() when non-null.
  std::vector<double> forward(const std::vector<double>& input,
                              Cache* cache = nullptr) const;

  // Accumulates d(loss)/d(weights) into `grad` given d(loss)/d(output).
  void backward(const Cache& cache, const std::vector<double>& output_grad,
                Mlp& grad) const;

  // Pointers to every parameter, in a fixed order. Shared by the
  // optimizer and the finite-difference tests.
  std::vector<double*> parameter_view();
  std::vector<const double*> parameter_view() const;
  std::size_t parameter_count() const;

  void fill(double value);
};

// Adam with the usual decay constants and bias correction.
struct AdamOptimizer {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> m, v;
  std::int64_t steps = 0;

  void step(const std::vector<double*>& params, const std::vector<const double*>& grads,
            double learning_rate);
};

// Scales gradients in place so their global L2 norm is at most max_norm;
// returns the pre-clip norm.
double clip_global_norm(const std::vector<double*>& grads, double max_norm);

}  // namespace hsc
