#pragma once

#include <vector>

#include "emiace/types.hpp"

namespace emiace {

/// `consistent` applies the standard exponential-average recurrences whose
/// covariance update is the exact Sherman-Morrison inverse of
///   Sigma' = (1 - lambda) * Sigma + lambda * d * d^T.
/// `literal` reproduces the update equations of the original formulation
/// verbatim, kept for fidelity comparisons.
enum class UpdateMode { consistent, literal };

UpdateMode parse_update_mode(const std::string& s);
std::string to_string(UpdateMode mode);

/// Gaussian background estimate, stored as mean and inverse covariance.
struct BackgroundModel {
  Vec mean;
  Mat inv_cov;  // symmetric positive definite

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Sample mean and inverse of the sample covariance (denominator n) plus a
/// relative ridge: cov += ridge * (trace(cov)/dim) * I.
/// Throws EstimationError when the ridged covariance is not invertible.
BackgroundModel estimate_background(const std::vector<Vec>& samples, double ridge);
BackgroundModel estimate_background(const std::vector<FeatureVector>& features, double ridge);

/// One exponential mean step.
///   consistent: (1 - lambda) * mu + lambda * x
///   literal:    (1 - lambda) * mu + lambda * (x - mu)
Vec update_mean(const Vec& mu, const Vec& x, double lambda, UpdateMode mode);

/// One rank-one inverse-covariance step with d = x - mean (the pre-update
/// mean). The result is symmetrized; the mean is returned unchanged.
BackgroundModel update_inverse_covariance(const BackgroundModel& bg, const Vec& x,
                                          double lambda, UpdateMode mode);

}  // namespace emiace
