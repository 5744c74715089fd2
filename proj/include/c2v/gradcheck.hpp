// Central finite-difference verification of analytic gradients. Runs the
// production forward/backward code in double precision and reports the
// worst relative disagreement across all registered tensors.
#pragma once

#include <functional>
#include <vector>

#include "c2v/tensor.hpp"

namespace c2v {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_tensor;
  size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// `loss` must be deterministic: called with want_grad=true it returns the
// loss and fills every ref's grad buffer; with want_grad=false it only
// returns the loss at the current parameter values. `fd_loss` is the
// evaluation used for the difference quotient; passing one that computes
// in extended precision keeps the quotient meaningful for near-zero
// gradient entries, where the quotient noise is ulp(loss) / (2 epsilon).
template <typename FdLoss>
GradCheckResult grad_check_fd(const std::function<double(bool want_grad)>& loss,
                              const FdLoss& fd_loss, const std::vector<TensorRef>& refs,
                              double epsilon) {
  require(epsilon >= 1e-6 && epsilon <= 1e-3, "grad_check: epsilon outside [1e-6, 1e-3]");
  using Q = decltype(fd_loss());

  for (const TensorRef& r : refs) std::fill(r.grad, r.grad + r.size, 0.0);
  double base = loss(true);
  if (!std::isfinite(base)) throw NumericError("grad_check: non-finite loss");

  std::vector<Vec> analytic;
  analytic.reserve(refs.size());
  for (const TensorRef& r : refs) analytic.emplace_back(r.grad, r.grad + r.size);

  GradCheckResult result;
  for (size_t k = 0; k < refs.size(); ++k) {
    const TensorRef& r = refs[k];
    for (size_t i = 0; i < r.size; ++i) {
      double saved = r.value[i];
      r.value[i] = saved + epsilon;
      Q lp = fd_loss();
      r.value[i] = saved - epsilon;
      Q lm = fd_loss();
      r.value[i] = saved;
      double numeric = static_cast<double>((lp - lm) / (Q(2.0) * Q(epsilon)));
      if (!std::isfinite(numeric)) {
        throw NumericError("grad_check: non-finite loss under perturbation");
      }
      double a = analytic[k][i];
      double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_tensor = r.name;
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

inline GradCheckResult grad_check(const std::function<double(bool want_grad)>& loss,
                                  const std::vector<TensorRef>& refs, double epsilon) {
  return grad_check_fd(loss, [&]() { return loss(false); }, refs, epsilon);
}

}  // namespace c2v
