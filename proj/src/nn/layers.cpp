#include "otgforge/nn/layers.hpp"

#include <cmath>

namespace otgforge::nn {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Matrix linear_forward(const Parameter& w, const Parameter& b, const Matrix& x) {
  Matrix y = w.value * x;
  y.colwise() += b.value.col(0);
  return y;
}

Matrix linear_backward(Parameter& w, Parameter& b, const Matrix& x, const Matrix& dy) {
  w.grad.noalias() += dy * x.transpose();
  b.grad.col(0) += dy.rowwise().sum();
  return w.value.transpose() * dy;
}

Matrix gather_columns(const Parameter& table, std::span<const int> indices) {
  Matrix out(table.value.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (indices[t] < 0) {
      out.col(static_cast<Eigen::Index>(t)).setZero();
    } else {
      out.col(static_cast<Eigen::Index>(t)) = table.value.col(indices[t]);
    }
  }
  return out;
}

void scatter_add_columns(Parameter& table, std::span<const int> indices, const Matrix& dy) {
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (indices[t] >= 0) table.grad.col(indices[t]) += dy.col(static_cast<Eigen::Index>(t));
  }
}

LstmWeights::LstmWeights(const std::string& prefix, Eigen::Index input_dim, Eigen::Index hidden_dim)
    : input(prefix + ".input", 4 * hidden_dim, input_dim),
      recurrent(prefix + ".recurrent", 4 * hidden_dim, hidden_dim),
      bias(prefix + ".bias", 4 * hidden_dim, 1) {}

void LstmWeights::init(Rng& rng) {
  init_glorot(input, rng);
  init_glorot(recurrent, rng);
  const Eigen::Index h = hidden_dim();
  bias.value.setZero();
  bias.value.block(h, 0, h, 1).setOnes();  // forget gate
}

void LstmWeights::append_to(ParameterList& list) {
  list.push_back(&input);
  list.push_back(&recurrent);
  list.push_back(&bias);
}

Matrix lstm_forward(const LstmWeights& weights, const Matrix& x, bool reverse, LstmTrace* trace) {
  const Eigen::Index h = weights.hidden_dim();
  const Eigen::Index steps = x.cols();
  Matrix gates = weights.input.value * x;
  gates.colwise() += weights.bias.value.col(0);
  Matrix cells(h, steps), cell_tanh(h, steps), hidden(h, steps);
  Vector h_prev = Vector::Zero(h), c_prev = Vector::Zero(h);
  for (Eigen::Index k = 0; k < steps; ++k) {
    const Eigen::Index t = reverse ? steps - 1 - k : k;
    auto a = gates.col(t);
    a.noalias() += weights.recurrent.value * h_prev;
    for (Eigen::Index j = 0; j < h; ++j) {
      a(j) = sigmoid(a(j));
      a(h + j) = sigmoid(a(h + j));
      a(2 * h + j) = std::tanh(a(2 * h + j));
      a(3 * h + j) = sigmoid(a(3 * h + j));
      const double c = a(h + j) * c_prev(j) + a(j) * a(2 * h + j);
      const double tc = std::tanh(c);
      cells(j, t) = c;
      cell_tanh(j, t) = tc;
      hidden(j, t) = a(3 * h + j) * tc;
    }
    h_prev = hidden.col(t);
    c_prev = cells.col(t);
  }
  if (trace) {
    trace->x = x;
    trace->gates = std::move(gates);
    trace->cells = std::move(cells);
    trace->cell_tanh = std::move(cell_tanh);
    trace->hidden = hidden;
    trace->reverse = reverse;
  }
  return hidden;
}

Matrix lstm_backward(LstmWeights& weights, const LstmTrace& trace, const Matrix& d_hidden) {
  const Eigen::Index h = weights.hidden_dim();
  const Eigen::Index steps = trace.x.cols();
  Matrix d_pre(4 * h, steps);
  Matrix h_prev_all = Matrix::Zero(h, steps);
  Vector dh_next = Vector::Zero(h), dc_next = Vector::Zero(h);
  for (Eigen::Index k = steps - 1; k >= 0; --k) {
    const Eigen::Index t = trace.reverse ? steps - 1 - k : k;
    const Eigen::Index prev = trace.reverse ? t + 1 : t - 1;
    const bool has_prev = k > 0;
    const auto a = trace.gates.col(t);
    Vector dh = d_hidden.col(t) + dh_next;
    auto da = d_pre.col(t);
    for (Eigen::Index j = 0; j < h; ++j) {
      const double i = a(j), f = a(h + j), g = a(2 * h + j), o = a(3 * h + j);
      const double tc = trace.cell_tanh(j, t);
      const double c_prev = has_prev ? trace.cells(j, prev) : 0.0;
      const double d_o = dh(j) * tc;
      const double dc = dh(j) * o * (1.0 - tc * tc) + dc_next(j);
      da(j) = dc * g * i * (1.0 - i);
      da(h + j) = dc * c_prev * f * (1.0 - f);
      da(2 * h + j) = dc * i * (1.0 - g * g);
      da(3 * h + j) = d_o * o * (1.0 - o);
      dc_next(j) = dc * f;
    }
    if (has_prev) h_prev_all.col(t) = trace.hidden.col(prev);
    dh_next.noalias() = weights.recurrent.value.transpose() * da;
  }
  weights.recurrent.grad.noalias() += d_pre * h_prev_all.transpose();
  weights.input.grad.noalias() += d_pre * trace.x.transpose();
  weights.bias.grad.col(0) += d_pre.rowwise().sum();
  return weights.input.value.transpose() * d_pre;
}

BiLstm::BiLstm(const std::string& prefix, Eigen::Index input_dim, Eigen::Index hidden_dim)
    : forward(prefix + ".forward", input_dim, hidden_dim),
      backward(prefix + ".backward", input_dim, hidden_dim) {}

void BiLstm::init(Rng& rng) {
  forward.init(rng);
  backward.init(rng);
}

void BiLstm::append_to(ParameterList& list) {
  forward.append_to(list);
  backward.append_to(list);
}

Matrix bilstm_forward(const BiLstm& lstm, const Matrix& x, BiLstmTrace* trace) {
  const Eigen::Index h = lstm.forward.hidden_dim();
  Matrix out(2 * h, x.cols());
  out.topRows(h) = lstm_forward(lstm.forward, x, false, trace ? &trace->forward : nullptr);
  out.bottomRows(h) = lstm_forward(lstm.backward, x, true, trace ? &trace->backward : nullptr);
  return out;
}

Matrix bilstm_backward(BiLstm& lstm, const BiLstmTrace& trace, const Matrix& d_out) {
  const Eigen::Index h = lstm.forward.hidden_dim();
  Matrix dx = lstm_backward(lstm.forward, trace.forward, d_out.topRows(h));
  dx += lstm_backward(lstm.backward, trace.backward, d_out.bottomRows(h));
  return dx;
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Matrix mask(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = uniform01(rng) < rate ? 0.0 : keep;
  }
  return mask;
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index t = 0; t < p.cols(); ++t) {
    auto col = p.col(t);
    col.array() -= col.maxCoeff();
    col = col.array().exp().matrix();
    col /= col.sum();
  }
  return p;
}

double softmax_cross_entropy(const Matrix& logits, std::span<const int> targets, Matrix* d_logits) {
  double loss = 0.0;
  Matrix p = softmax_columns(logits);
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    const int y = targets[static_cast<std::size_t>(t)];
    const double m = logits.col(t).maxCoeff();
    const double lse = m + std::log((logits.col(t).array() - m).exp().sum());
    loss += lse - logits(y, t);
    if (d_logits) p(y, t) -= 1.0;
  }
  if (d_logits) *d_logits = std::move(p);
  return loss;
}

Matrix unfold(const Matrix& x, int width) {
  const Eigen::Index c = x.rows();
  const Eigen::Index out_len = std::max<Eigen::Index>(0, x.cols() - width + 1);
  Matrix u(c * width, out_len);
  for (Eigen::Index p = 0; p < out_len; ++p) {
    for (int k = 0; k < width; ++k) u.block(k * c, p, c, 1) = x.col(p + k);
  }
  return u;
}

Matrix fold_gradient(const Matrix& d_unfolded, Eigen::Index channels, Eigen::Index length, int width) {
  Matrix dx = Matrix::Zero(channels, length);
  for (Eigen::Index p = 0; p < d_unfolded.cols(); ++p) {
    for (int k = 0; k < width; ++k) dx.col(p + k) += d_unfolded.block(k * channels, p, channels, 1);
  }
  return dx;
}

Matrix conv1d_forward(const Parameter& w, const Parameter& b, const Matrix& unfolded) {
  return linear_forward(w, b, unfolded);
}

Matrix conv1d_backward(Parameter& w, Parameter& b, const Matrix& unfolded, const Matrix& dy) {
  return linear_backward(w, b, unfolded, dy);
}

Matrix onehot_conv1d_forward(const Parameter& w, const Parameter& b, std::span<const int> indices,
                             int alphabet, int width) {
  const auto len = static_cast<Eigen::Index>(indices.size());
  const Eigen::Index out_len = std::max<Eigen::Index>(0, len - width + 1);
  Matrix y(w.value.rows(), out_len);
  for (Eigen::Index p = 0; p < out_len; ++p) {
    y.col(p) = b.value.col(0);
    for (int k = 0; k < width; ++k) {
      const int idx = indices[static_cast<std::size_t>(p + k)];
      if (idx >= 0) y.col(p) += w.value.col(k * alphabet + idx);
    }
  }
  return y;
}

void onehot_conv1d_backward(Parameter& w, Parameter& b, std::span<const int> indices, int alphabet,
                            int width, const Matrix& dy) {
  for (Eigen::Index p = 0; p < dy.cols(); ++p) {
    b.grad.col(0) += dy.col(p);
    for (int k = 0; k < width; ++k) {
      const int idx = indices[static_cast<std::size_t>(p + k)];
      if (idx >= 0) w.grad.col(k * alphabet + idx) += dy.col(p);
    }
  }
}

Vector max_over_columns(const Matrix& x, std::vector<Eigen::Index>* argmax) {
  Vector out(x.rows());
  if (argmax) argmax->assign(static_cast<std::size_t>(x.rows()), 0);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Eigen::Index best = 0;
    out(r) = x.row(r).maxCoeff(&best);
    if (argmax) (*argmax)[static_cast<std::size_t>(r)] = best;
  }
  return out;
}

Matrix max_over_columns_backward(const Vector& dy, const std::vector<Eigen::Index>& argmax,
                                 Eigen::Index cols) {
  Matrix dx = Matrix::Zero(dy.size(), cols);
  for (Eigen::Index r = 0; r < dy.size(); ++r) dx(r, argmax[static_cast<std::size_t>(r)]) = dy(r);
  return dx;
}

Matrix max_pool_forward(const Matrix& x, int size, std::vector<Eigen::Index>* argmax) {
  const Eigen::Index out_len = x.cols() / size;
  Matrix y(x.rows(), out_len);
  if (argmax) argmax->assign(static_cast<std::size_t>(x.rows() * out_len), 0);
  for (Eigen::Index p = 0; p < out_len; ++p) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      Eigen::Index best = p * size;
      for (Eigen::Index k = 1; k < size; ++k) {
        if (x(r, p * size + k) > x(r, best)) best = p * size + k;
      }
      y(r, p) = x(r, best);
      if (argmax) (*argmax)[static_cast<std::size_t>(p * x.rows() + r)] = best;
    }
  }
  return y;
}

Matrix max_pool_backward(const Matrix& dy, const std::vector<Eigen::Index>& argmax, Eigen::Index in_cols) {
  Matrix dx = Matrix::Zero(dy.rows(), in_cols);
  for (Eigen::Index p = 0; p < dy.cols(); ++p) {
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
      dx(r, argmax[static_cast<std::size_t>(p * dy.rows() + r)]) += dy(r, p);
    }
  }
  return dx;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& x, const Matrix& dy) {
  return (x.array() > 0.0).select(dy, 0.0);
}

}  // namespace otgforge::nn
