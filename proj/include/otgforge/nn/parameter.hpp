#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "otgforge/random.hpp"

namespace otgforge::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;

  Parameter() = default;
  Parameter(std::string name, Eigen::Index rows, Eigen::Index cols);

  void zero_grad() { grad.setZero(); }
};

using ParameterList = std::vector<Parameter*>;

void init_glorot(Parameter& p, Rng& rng);
void init_uniform(Parameter& p, double scale, Rng& rng);

// Rounds every value to the nearest float so that checkpoints (stored as
// 32-bit floats) reload bit-identically.
void quantize_to_float(const ParameterList& params);

std::vector<Matrix> snapshot(const ParameterList& params);
void restore(const ParameterList& params, const std::vector<Matrix>& values);

// FNV-1a over the raw bytes of every value, in list order.
std::uint64_t parameter_checksum(const ParameterList& params);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables clipping
};

class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}
  // Scales gradients by `grad_scale`, clips, updates, then zeroes gradients.
  void step(const ParameterList& params, double grad_scale = 1.0);

 private:
  AdamOptions options_;
  std::int64_t t_ = 0;
};

}  // namespace otgforge::nn
