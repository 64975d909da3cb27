#include "otgforge/nn/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otgforge::nn {

EarlyStopping::EarlyStopping(int patience)
    : patience_(patience), best_loss_(std::numeric_limits<double>::infinity()) {}

bool EarlyStopping::observe(double validation_loss) {
  ++epochs_seen_;
  if (validation_loss < best_loss_) {
    best_loss_ = validation_loss;
    best_epoch_ = epochs_seen_;
    epochs_without_improvement_ = 0;
    return true;
  }
  ++epochs_without_improvement_;
  return false;
}

FitResult fit_with_early_stopping(const ParameterList& params, int max_epochs, int patience,
                                  const std::function<double(int epoch)>& run_epoch,
                                  const std::function<double()>& validation_loss) {
  FitResult result;
  EarlyStopping stopper(patience);
  std::vector<Matrix> best = snapshot(params);
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = run_epoch(epoch);
    record.validation_loss = validation_loss();
    result.history.push_back(record);
    result.epochs_run = epoch;
    if (stopper.observe(record.validation_loss)) best = snapshot(params);
    if (stopper.should_stop()) break;
  }
  restore(params, best);
  result.best_epoch = stopper.best_epoch();
  return result;
}

GradientCheckResult check_gradients(const ParameterList& params,
                                    const std::function<double()>& loss_with_grad,
                                    const std::function<double()>& loss, double step) {
  for (auto* p : params) p->zero_grad();
  loss_with_grad();
  GradientCheckResult result;
  for (auto* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& v = p->value.data()[i];
      const double original = v;
      v = original + step;
      const double plus = loss();
      v = original - step;
      const double minus = loss();
      v = original;
      const double numeric = (plus - minus) / (2.0 * step);
      const double analytic = p->grad.data()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
      const double rel = std::abs(analytic - numeric) / denom;
      ++result.entries_checked;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_parameter = p->name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace otgforge::nn
