#pragma once

#include <vector>

#include "pathgan/model.hpp"
#include "pathgan/nn/conv.hpp"

namespace pathgan::nn {

// Adaptive-moment optimizer over a fixed parameter list. Moment tensors are
// exposed so checkpoints can resume runs exactly.
class Adam {
 public:
  Adam() = default;
  Adam(OptimConfig cfg, const std::vector<Param*>& params);

  void step(const std::vector<Param*>& params);
  void zero_grad(const std::vector<Param*>& params);

  std::int64_t t() const { return t_; }
  void set_t(std::int64_t t) { t_ = t; }
  std::vector<Tensor>& moments_m() { return m_; }
  std::vector<Tensor>& moments_v() { return v_; }

 private:
  OptimConfig cfg_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

}  // namespace pathgan::nn
