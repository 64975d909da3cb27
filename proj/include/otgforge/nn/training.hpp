#pragma once

#include <functional>
#include <string>
#include <vector>

#include "otgforge/nn/parameter.hpp"

namespace otgforge::nn {

// Patience-based early stopping on validation loss. An epoch improves only
// when its loss is strictly below the best seen so far.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);

  // Records one epoch; returns true when it is the new best.
  bool observe(double validation_loss);
  bool should_stop() const { return epochs_without_improvement_ >= patience_; }
  int best_epoch() const { return best_epoch_; }  // 1-based, 0 before any epoch
  double best_loss() const { return best_loss_; }
  int epochs_seen() const { return epochs_seen_; }

 private:
  int patience_;
  int epochs_seen_ = 0;
  int epochs_without_improvement_ = 0;
  int best_epoch_ = 0;
  double best_loss_;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct FitResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  int epochs_run = 0;
};

// Runs up to `max_epochs` epochs, snapshotting `params` whenever validation
// loss improves and restoring the best snapshot on exit.
FitResult fit_with_early_stopping(const ParameterList& params, int max_epochs, int patience,
                                  const std::function<double(int epoch)>& run_epoch,
                                  const std::function<double()>& validation_loss);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t entries_checked = 0;
};

// Compares analytic gradients against central differences for every entry of
// every parameter. Gradients are zeroed, then `loss_with_grad` is called once
// to accumulate them; `loss` evaluates without touching gradients. Relative error is |a - n| / max(|a|, |n|, 1e-5).
GradientCheckResult check_gradients(const ParameterList& params,
                                    const std::function<double()>& loss_with_grad,
                                    const std::function<double()>& loss, double step = 1e-6);

}  // namespace otgforge::nn
