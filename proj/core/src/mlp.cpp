#include "hsc/mlp.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace hsc {

namespace {

// Matrix with orthonormal rows (rows <= cols) via modified Gram-Schmidt
// on Gaussian draws, then scaled by `gain`.
std::vector<double> orthogonal_rows(std::size_t rows, std::size_t cols, double gain,
                                    RandomStream& rng) {
  assert(rows <= cols);
  std::vector<double> m(rows * cols);
  for (double& x : m) x = rng.normal();
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = &m[r * cols];
    for (std::size_t prev = 0; prev < r; ++prev) {
      const double* other = &m[prev * cols];
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += row[c] * other[c];
      for (std::size_t c = 0; c < cols; ++c) row[c] -= dot * other[c];
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < cols; ++c) norm += row[c] * row[c];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {  // degenerate draw; retry with a fresh row
      for (std::size_t c = 0; c < cols; ++c) row[c] = rng.normal();
      --r;
      continue;
    }
    for (std::size_t c = 0; c < cols; ++c) row[c] /= norm;
  }
  for (double& x : m) x *= gain;
  return m;
}

// Orthogonal init for an out x in weight matrix; orthonormalizes along
// the shorter side.
std::vector<double> orthogonal_weights(std::size_t out, std::size_t in, double gain,
                                       RandomStream& rng) {
  if (out <= in) return orthogonal_rows(out, in, gain, rng);
  // Orthonormal columns: build the transpose and flip it.
  const std::vector<double> t = orthogonal_rows(in, out, gain, rng);
  std::vector<double> m(out * in);
  for (std::size_t r = 0; r < out; ++r) {
    for (std::size_t c = 0; c < in; ++c) {
      m[r * in + c] = t[c * out + r];
    }
  }
  return m;
}

void linear_forward(const std::vector<double>& w, const std::vector<double>& b,
                    const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t out = b.size();
  const std::size_t in = x.size();
  y.resize(out);
  for (std::size_t r = 0; r < out; ++r) {
    double acc = b[r];
    const double* row = &w[r * in];
    for (std::size_t c = 0; c < in; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

// Accumulates dW, db and returns dx for y = W x + b.
void linear_backward(const std::vector<double>& w, const std::vector<double>& x,
                     const std::vector<double>& dy, std::vector<double>& dw,
                     std::vector<double>& db, std::vector<double>& dx) {
  const std::size_t out = dy.size();
  const std::size_t in = x.size();
  dx.assign(in, 0.0);
  for (std::size_t r = 0; r < out; ++r) {
    db[r] += dy[r];
    const double g = dy[r];
    const double* row = &w[r * in];
    double* grow = &dw[r * in];
    for (std::size_t c = 0; c < in; ++c) {
      grow[c] += g * x[c];
      dx[c] += g * row[c];
    }
  }
}

}  // namespace

Mlp Mlp::zeros(std::size_t in, std::size_t hidden, std::size_t out) {
  Mlp net;
  net.in = in;
  net.hidden = hidden;
  net.out = out;
  net.w1.assign(hidden * in, 0.0);
  net.b1.assign(hidden, 0.0);
  net.w2.assign(hidden * hidden, 0.0);
  net.b2.assign(hidden, 0.0);
  net.w3.assign(out * hidden, 0.0);
  net.b3.assign(out, 0.0);
  return net;
}

Mlp Mlp::orthogonal(std::size_t in, std::size_t hidden, std::size_t out,
                    double hidden_gain, double out_gain, RandomStream& rng) {
  Mlp net = zeros(in, hidden, out);
  net.w1 = orthogonal_weights(hidden, in, hidden_gain, rng);
  net.w2 = orthogonal_weights(hidden, hidden, hidden_gain, rng);
  net.w3 = orthogonal_weights(out, hidden, out_gain, rng);
  return net;
}

std::vector<double> Mlp::forward(const std::vector<double>& input,
                                 Cache* cache) const {
  if (input.size() != in) {
    throw std::invalid_argument("mlp: input size mismatch");
  }
  std::vector<double> h1, h2, y;
  linear_forward(w1, b1, input, h1);
  for (double& v : h1) v = std::tanh(v);
  linear_forward(w2, b2, h1, h2);
  for (double& v : h2) v = std::tanh(v);
  linear_forward(w3, b3, h2, y);
  if (cache != nullptr) {
    cache->input = input;
    cache->h1 = std::move(h1);
    cache->h2 = std::move(h2);
  }
  return y;
}

void Mlp::backward(const Cache& cache, const std::vector<double>& output_grad,
                   Mlp& grad) const {
  std::vector<double> dh2, dh1, dx;
  linear_backward(w3, cache.h2, output_grad, grad.w3, grad.b3, dh2);
  for (std::size_t i = 0; i < dh2.size(); ++i) {
    dh2[i] *= 1.0 - cache.h2[i] * cache.h2[i];  // tanh'
  }
  linear_backward(w2, cache.h1, dh2, grad.w2, grad.b2, dh1);
  for (std::size_t i = 0; i < dh1.size(); ++i) {
    dh1[i] *= 1.0 - cache.h1[i] * cache.h1[i];
  }
  linear_backward(w1, cache.input, dh1, grad.w1, grad.b1, dx);
}

std::vector<double*> Mlp::parameter_view() {
  std::vector<double*> view;
  view.reserve(parameter_count());
  for (auto* block : {&w1, &b1, &w2, &b2, &w3, &b3}) {
    for (double& v : *block) view.push_back(&v);
  }
  return view;
}

std::vector<const double*> Mlp::parameter_view() const {
  std::vector<const double*> view;
  view.reserve(parameter_count());
  for (const auto* block : {&w1, &b1, &w2, &b2, &w3, &b3}) {
    for (const double& v : *block) view.push_back(&v);
  }
  return view;
}

std::size_t Mlp::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

void Mlp::fill(double value) {
  for (auto* block : {&w1, &b1, &w2, &b2, &w3, &b3}) {
    for (double& v : *block) v = value;
  }
}

void AdamOptimizer::step(const std::vector<double*>& params,
                         const std::vector<const double*>& grads,
                         double learning_rate) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam: parameter/gradient size mismatch");
  }
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  ++steps;
  const double bias1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
  const double bias2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = *grads[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    *params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

double clip_global_norm(const std::vector<double*>& grads, double max_norm) {
  double sq = 0.0;
  for (const double* g : grads) sq += (*g) * (*g);
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double* g : grads) *g *= scale;
  }
  return norm;
}

}  // namespace hsc
