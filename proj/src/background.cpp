#include "emiace/background.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "emiace/errors.hpp"

namespace emiace {

UpdateMode parse_update_mode(const std::string& s) {
  if (s == "consistent") return UpdateMode::consistent;
  if (s == "literal") return UpdateMode::literal;
  throw std::invalid_argument("unknown update mode '" + s +
                              "' (expected consistent or literal)");
}

std::string to_string(UpdateMode mode) {
  return mode == UpdateMode::consistent ? "consistent" : "literal";
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in (0, 1)");
  }
}

}  // namespace

BackgroundModel estimate_background(const std::vector<Vec>& samples, double ridge) {
  if (samples.empty()) {
    throw std::invalid_argument("background estimate requires samples");
  }
  if (ridge < 0.0 || !std::isfinite(ridge)) {
    throw std::invalid_argument("ridge must be finite and >= 0");
  }
  const auto dim = samples.front().size();
  for (const Vec& s : samples) {
    if (s.size() != dim) {
      throw std::invalid_argument("samples must share one dimension");
    }
  }

  Vec mean = Vec::Zero(dim);
  for (const Vec& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());

  Mat cov = Mat::Zero(dim, dim);
  for (const Vec& s : samples) {
    const Vec d = s - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(samples.size());
  cov += ridge * (cov.trace() / static_cast<double>(dim)) *
         Mat::Identity(dim, dim);

  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw EstimationError("covariance eigendecomposition failed");
  }
  const double max_eig = eig.eigenvalues().maxCoeff();
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig > 0.0) || min_eig < 1e-12 * max_eig) {
    throw EstimationError("covariance singular; raise the ridge");
  }

  BackgroundModel bg;
  bg.mean = std::move(mean);
  bg.inv_cov = eig.eigenvectors() *
               eig.eigenvalues().cwiseInverse().asDiagonal() *
               eig.eigenvectors().transpose();
  bg.inv_cov = ((bg.inv_cov + bg.inv_cov.transpose()) / 2.0).eval();
  return bg;
}

BackgroundModel estimate_background(const std::vector<FeatureVector>& features,
                                    double ridge) {
  std::vector<Vec> samples;
  samples.reserve(features.size());
  for (const FeatureVector& f : features) samples.push_back(f.values);
  return estimate_background(samples, ridge);
}

Vec update_mean(const Vec& mu, const Vec& x, double lambda, UpdateMode mode) {
  check_lambda(lambda);
  if (mu.size() != x.size()) {
    throw std::invalid_argument("mean and sample dimensions differ");
  }
  if (mode == UpdateMode::literal) {
    return (1.0 - lambda) * mu + lambda * (x - mu);
  }
  return (1.0 - lambda) * mu + lambda * x;
}

BackgroundModel update_inverse_covariance(const BackgroundModel& bg, const Vec& x,
                                          double lambda, UpdateMode mode) {
  check_lambda(lambda);
  if (bg.mean.size() != x.size() || bg.inv_cov.rows() != x.size() ||
      bg.inv_cov.cols() != x.size()) {
    throw std::invalid_argument("model and sample dimensions differ");
  }
  if (!x.allFinite() || !bg.mean.allFinite() || !bg.inv_cov.allFinite()) {
    throw std::invalid_argument("non-finite input to covariance update");
  }

  const Vec d = x - bg.mean;
  Mat next;
  if (mode == UpdateMode::literal) {
    const double denom = (1.0 - lambda) / lambda + d.squaredNorm();
    next = (bg.inv_cov - (d * d.transpose()) / denom) / (1.0 - lambda);
  } else {
    const Vec sd = bg.inv_cov * d;
    const double denom = (1.0 - lambda) / lambda + d.dot(sd);
    next = (bg.inv_cov - (sd * sd.transpose()) / denom) / (1.0 - lambda);
  }

  BackgroundModel out;
  out.mean = bg.mean;
  out.inv_cov = ((next + next.transpose()) / 2.0).eval();
  return out;
}

}  // namespace emiace
