#include "otgforge/nn/parameter.hpp"

#include <cmath>
#include <cstring>

namespace otgforge::nn {

Parameter::Parameter(std::string name_, Eigen::Index rows, Eigen::Index cols)
    : name(std::move(name_)),
      value(Matrix::Zero(rows, cols)),
      grad(Matrix::Zero(rows, cols)),
      adam_m(Matrix::Zero(rows, cols)),
      adam_v(Matrix::Zero(rows, cols)) {}

void init_glorot(Parameter& p, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    p.value.data()[i] = (2.0 * uniform01(rng) - 1.0) * limit;
  }
}

void init_uniform(Parameter& p, double scale, Rng& rng) {
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    p.value.data()[i] = (2.0 * uniform01(rng) - 1.0) * scale;
  }
}

void quantize_to_float(const ParameterList& params) {
  for (auto* p : params) {
    p->value = p->value.cast<float>().cast<double>();
  }
}

std::vector<Matrix> snapshot(const ParameterList& params) {
  std::vector<Matrix> values;
  values.reserve(params.size());
  for (const auto* p : params) values.push_back(p->value);
  return values;
}

void restore(const ParameterList& params, const std::vector<Matrix>& values) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

std::uint64_t parameter_checksum(const ParameterList& params) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto* p : params) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p->value.data());
    const std::size_t n = static_cast<std::size_t>(p->value.size()) * sizeof(double);
    for (std::size_t i = 0; i < n; ++i) {
      hash ^= bytes[i];
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

void Adam::step(const ParameterList& params, double grad_scale) {
  ++t_;
  double scale = grad_scale;
  if (options_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const auto* p : params) sq += p->grad.squaredNorm();
    const double norm = std::sqrt(sq) * grad_scale;
    if (norm > options_.clip_norm) scale *= options_.clip_norm / norm;
  }
  const double bias1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  const double step_size = options_.learning_rate * std::sqrt(bias2) / bias1;
  for (auto* p : params) {
    if (p->adam_m.size() != p->value.size()) {
      p->adam_m = Matrix::Zero(p->value.rows(), p->value.cols());
      p->adam_v = Matrix::Zero(p->value.rows(), p->value.cols());
    }
    const auto g = (p->grad.array() * scale).eval();
    p->adam_m.array() = options_.beta1 * p->adam_m.array() + (1.0 - options_.beta1) * g;
    p->adam_v.array() = options_.beta2 * p->adam_v.array() + (1.0 - options_.beta2) * g.square();
    p->value.array() -= step_size * p->adam_m.array() / (p->adam_v.array().sqrt() + options_.epsilon);
    p->grad.setZero();
  }
}

}  // namespace otgforge::nn
