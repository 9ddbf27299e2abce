#include "pathgan/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "pathgan/nn/kernels.hpp"

namespace pathgan::nn {

Adam::Adam(OptimConfig cfg, const std::vector<Param*>& params) : cfg_(cfg) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Param* p : params) {
    m_.push_back(Tensor::zeros_like(p->value));
    v_.push_back(Tensor::zeros_like(p->value));
  }
}

void Adam::step(const std::vector<Param*>& params) {
  if (params.size() != m_.size()) {
    throw std::invalid_argument("adam: parameter list changed");
  }
  ++t_;
  const double b1p = std::pow(cfg_.beta1, static_cast<double>(t_));
  const double b2p = std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    kernels::adam_step(p.value.ptr(), p.grad.ptr(), m_[i].ptr(), v_[i].ptr(),
                       p.value.size(), static_cast<float>(cfg_.lr),
                       static_cast<float>(cfg_.beta1),
                       static_cast<float>(cfg_.beta2),
                       static_cast<float>(cfg_.eps), b1p, b2p);
  }
}

void Adam::zero_grad(const std::vector<Param*>& params) {
  for (Param* p : params) p->zero_grad();
}

}  // namespace pathgan::nn
