// Adam with bias correction. One optimizer instance owns the moment
// buffers for a fixed list of tensors; large embedding tables are updated
// row-wise so a training step only touches the rows it used.
#pragma once

#include <atomic>
#include <cmath>
#include <vector>

#include "c2v/tensor.hpp"

namespace c2v {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Scale factors for one step; computed once from the step counter and then
// valid for every tensor updated in that step.
struct AdamScale {
  double bc1 = 1.0;  // 1 / (1 - beta1^t)
  double bc2 = 1.0;  // 1 / (1 - beta2^t)
};

class Adam {
 public:
  Adam() = default;
  explicit Adam(const AdamConfig& cfg) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  uint64_t step_count() const { return t_.load(std::memory_order_relaxed); }

  // Allocates first/second moment buffers matching `refs`. Slot order
  // follows the registration order.
  void register_params(const std::vector<TensorRef>& refs) {
    m_.clear();
    v_.clear();
    for (const TensorRef& r : refs) {
      m_.emplace_back(r.size, 0.0);
      v_.emplace_back(r.size, 0.0);
    }
  }

  // Advances the shared step counter. In multi-worker training the counter
  // is the only cross-thread coordination; moment updates race by design.
  AdamScale next_step() {
    uint64_t t = t_.fetch_add(1, std::memory_order_relaxed) + 1;
    AdamScale s;
    s.bc1 = 1.0 / (1.0 - std::pow(cfg_.beta1, static_cast<double>(t)));
    s.bc2 = 1.0 / (1.0 - std::pow(cfg_.beta2, static_cast<double>(t)));
    return s;
  }

  void update(size_t slot, const AdamScale& s, double* param, const double* grad,
              size_t n, size_t offset = 0) {
    double* m = m_[slot].data() + offset;
    double* v = v_[slot].data() + offset;
    const double one_m_b1 = 1.0 - cfg_.beta1;
    const double one_m_b2 = 1.0 - cfg_.beta2;
    for (size_t i = 0; i < n; ++i) {
      double g = grad[i];
      m[i] = cfg_.beta1 * m[i] + one_m_b1 * g;
      v[i] = cfg_.beta2 * v[i] + one_m_b2 * g * g;
      double m_hat = m[i] * s.bc1;
      double v_hat = v[i] * s.bc2;
      param[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }

  void update(size_t slot, const AdamScale& s, const TensorRef& ref) {
    update(slot, s, ref.value, ref.grad, ref.size);
  }

  // Row update for a table tensor registered at `slot`.
  void update_row(size_t slot, const AdamScale& s, Mat& table, size_t row,
                  const double* grad_row) {
    update(slot, s, table.row(row), grad_row, table.cols, row * table.cols);
  }

 private:
  AdamConfig cfg_;
  std::atomic<uint64_t> t_{0};
  std::vector<Vec> m_;
  std::vector<Vec> v_;
};

// Single-tensor convenience used by the kernel tests: one fused
// step over `param` with internal state carried by the caller.
struct AdamState {
  AdamConfig cfg;
  Vec m;
  Vec v;
  uint64_t t = 0;

  explicit AdamState(size_t n, const AdamConfig& c = {}) : cfg(c), m(n, 0.0), v(n, 0.0) {}

  void step(double* param, const double* grad, size_t n) {
    check_shape(n == m.size(), "adam_update: grad size");
    ++t;
    double bc1 = 1.0 / (1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
    double bc2 = 1.0 / (1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
    for (size_t i = 0; i < n; ++i) {
      double g = grad[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      param[i] -= cfg.lr * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + cfg.eps);
    }
  }
};

}  // namespace c2v
