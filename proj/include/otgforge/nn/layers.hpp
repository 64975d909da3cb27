#pragma once

#include <span>
#include <vector>

#include "otgforge/nn/parameter.hpp"

// Forward/backward kernels. Sequences are stored column-wise: a D x T matrix
// holds one D-dimensional vector per position. Backward functions accumulate
// into Parameter::grad and return the gradient with respect to their input.
namespace otgforge::nn {

// y = W x + b, applied to every column of x.
Matrix linear_forward(const Parameter& w, const Parameter& b, const Matrix& x);
Matrix linear_backward(Parameter& w, Parameter& b, const Matrix& x, const Matrix& dy);

// Embedding tables are D x V; lookup gathers columns. Negative indices yield
// zero columns and receive no gradient.
Matrix gather_columns(const Parameter& table, std::span<const int> indices);
void scatter_add_columns(Parameter& table, std::span<const int> indices, const Matrix& dy);

// Single-direction LSTM with gate order (input, forget, cell, output).
struct LstmWeights {
  Parameter input;      // 4H x D
  Parameter recurrent;  // 4H x H
  Parameter bias;       // 4H x 1

  LstmWeights() = default;
  LstmWeights(const std::string& prefix, Eigen::Index input_dim, Eigen::Index hidden_dim);
  Eigen::Index hidden_dim() const { return recurrent.value.cols(); }
  void init(Rng& rng);
  void append_to(ParameterList& list);
};

struct LstmTrace {
  Matrix x;
  Matrix gates;  // 4H x T, post-activation
  Matrix cells;  // H x T
  Matrix cell_tanh;
  Matrix hidden;
  bool reverse = false;
};

// Runs left-to-right, or right-to-left when `reverse`; outputs are aligned with
// input positions either way.
Matrix lstm_forward(const LstmWeights& weights, const Matrix& x, bool reverse, LstmTrace* trace);
Matrix lstm_backward(LstmWeights& weights, const LstmTrace& trace, const Matrix& d_hidden);

struct BiLstm {
  LstmWeights forward;
  LstmWeights backward;

  BiLstm() = default;
  BiLstm(const std::string& prefix, Eigen::Index input_dim, Eigen::Index hidden_dim);
  Eigen::Index output_dim() const { return 2 * forward.hidden_dim(); }
  void init(Rng& rng);
  void append_to(ParameterList& list);
};

struct BiLstmTrace {
  LstmTrace forward;
  LstmTrace backward;
};

// Output is 2H x T: forward states on top, backward states below.
Matrix bilstm_forward(const BiLstm& lstm, const Matrix& x, BiLstmTrace* trace);
Matrix bilstm_backward(BiLstm& lstm, const BiLstmTrace& trace, const Matrix& d_out);

// Inverted dropout mask: entries are 0 with probability `rate`, else 1/(1-rate).
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

Matrix softmax_columns(const Matrix& logits);
// Summed cross-entropy over columns; writes d(loss)/d(logits) when requested.
double softmax_cross_entropy(const Matrix& logits, std::span<const int> targets, Matrix* d_logits);

// Valid 1-D convolution. x is C x L, w is O x (C * width); column p of the
// unfolded input stacks x(:, p + k) for k in [0, width).
Matrix unfold(const Matrix& x, int width);
Matrix fold_gradient(const Matrix& d_unfolded, Eigen::Index channels, Eigen::Index length, int width);
Matrix conv1d_forward(const Parameter& w, const Parameter& b, const Matrix& unfolded);
// Returns the gradient of the unfolded input.
Matrix conv1d_backward(Parameter& w, Parameter& b, const Matrix& unfolded, const Matrix& dy);

// Convolution whose input is a one-hot sequence over an alphabet of size
// `alphabet`; index < 0 is an all-zero column. w is O x (alphabet * width).
Matrix onehot_conv1d_forward(const Parameter& w, const Parameter& b, std::span<const int> indices,
                             int alphabet, int width);
void onehot_conv1d_backward(Parameter& w, Parameter& b, std::span<const int> indices, int alphabet,
                            int width, const Matrix& dy);

// Row-wise max across columns, recording the winning column per row.
Vector max_over_columns(const Matrix& x, std::vector<Eigen::Index>* argmax);
Matrix max_over_columns_backward(const Vector& dy, const std::vector<Eigen::Index>& argmax,
                                 Eigen::Index cols);

// Non-overlapping max pooling along columns (trailing remainder dropped).
Matrix max_pool_forward(const Matrix& x, int size, std::vector<Eigen::Index>* argmax);
Matrix max_pool_backward(const Matrix& dy, const std::vector<Eigen::Index>& argmax,
                         Eigen::Index in_cols);

Matrix relu(const Matrix& x);
// dy masked by x > 0.
Matrix relu_backward(const Matrix& x, const Matrix& dy);

}  // namespace otgforge::nn
