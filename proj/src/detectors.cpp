#include "emiace/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include <Eigen/QR>

#include "emiace/errors.hpp"

namespace emiace {

namespace {

// Quadratic forms below this are treated as a zero-direction input.
constexpr double kDegenerateQuad = 1e-12;

Mat feature_matrix(const Dictionary& dict) {
  if (dict.atoms.empty()) {
    throw std::invalid_argument("dictionary has no atoms");
  }
  const auto dim = dict.atoms.front().feature.values.size();
  if (dim == 0) {
    throw std::invalid_argument("dictionary atoms have empty features");
  }
  Mat a(dim, static_cast<Eigen::Index>(dict.atoms.size()));
  for (size_t i = 0; i < dict.atoms.size(); ++i) {
    const Vec& f = dict.atoms[i].feature.values;
    if (f.size() != dim) {
      throw std::invalid_argument("dictionary atom features differ in dimension");
    }
    a.col(static_cast<Eigen::Index>(i)) = f;
  }
  return a;
}

}  // namespace

double ace_statistic(const Vec& x, const Vec& t, const BackgroundModel& bg) {
  if (x.size() != bg.mean.size() || t.size() != bg.mean.size()) {
    throw std::invalid_argument("sample, target, and model dimensions differ");
  }
  const Vec dx = x - bg.mean;
  const Vec dt = t - bg.mean;
  const Vec sdx = bg.inv_cov * dx;
  const double xq = dx.dot(sdx);
  const double tq = dt.dot(bg.inv_cov * dt);
  if (xq < kDegenerateQuad || tq < kDegenerateQuad) {
    throw UndefinedStatisticError("sample or target coincides with the background mean");
  }
  const double cross = dt.dot(sdx);
  return std::clamp(cross * cross / (tq * xq), 0.0, 1.0);
}

AceScorer::AceScorer(const Dictionary& dict, BackgroundModel bg)
    : atom_features_(feature_matrix(dict)) {
  set_model(std::move(bg));
}

void AceScorer::set_model(BackgroundModel bg) {
  if (bg.mean.size() != atom_features_.rows() ||
      bg.inv_cov.rows() != atom_features_.rows() ||
      bg.inv_cov.cols() != atom_features_.rows()) {
    throw std::invalid_argument("model dimension differs from atom features");
  }
  bg_ = std::move(bg);
  rebuild();
}

void AceScorer::rebuild() {
  centered_ = atom_features_.colwise() - bg_.mean;
  whitened_.noalias() = bg_.inv_cov * centered_;
  atom_quad_ = (centered_.array() * whitened_.array()).colwise().sum();
}

double AceScorer::confidence(const Vec& x) const {
  if (x.size() != bg_.mean.size()) {
    throw std::invalid_argument("sample dimension differs from the model");
  }
  const Vec d = x - bg_.mean;
  const Vec sd = bg_.inv_cov * d;
  const double xq = d.dot(sd);
  if (xq < kDegenerateQuad) {
    std::cerr << "warning: sample coincides with the background mean; confidence 0\n";
    return 0.0;
  }
  const Vec cross = whitened_.transpose() * d;
  double best = -1.0;
  for (Eigen::Index a = 0; a < cross.size(); ++a) {
    if (atom_quad_[a] < kDegenerateQuad) continue;
    best = std::max(best, cross[a] * cross[a] / (atom_quad_[a] * xq));
  }
  if (best < 0.0) {
    std::cerr << "warning: every atom coincides with the background mean; confidence 0\n";
    return 0.0;
  }
  return std::clamp(best, 0.0, 1.0);
}

double ace_confidence(const FeatureVector& x, const Dictionary& dict,
                      const BackgroundModel& bg) {
  return AceScorer(dict, bg).confidence(x.values);
}

ConfidenceTrace detect_global_ace(const std::vector<FeatureVector>& features,
                                  const Dictionary& dict, double ridge) {
  const AceScorer scorer(dict, estimate_background(features, ridge));
  ConfidenceTrace trace;
  trace.detector_name = "ace-global";
  trace.values.reserve(features.size());
  for (const FeatureVector& f : features) {
    trace.values.push_back(scorer.confidence(f.values));
  }
  return trace;
}

void WaceConfig::validate() const {
  if (!(lambda > 0.0) || !(lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in (0, 1)");
  }
  if (init_window < kFeatureDim + 1) {
    throw std::invalid_argument("init window must exceed the feature dimension");
  }
  if (!(background_threshold >= 0.0) || !(background_threshold <= 1.0)) {
    throw std::invalid_argument("background threshold must lie in [0, 1]");
  }
  if (ridge < 0.0 || !std::isfinite(ridge)) {
    throw std::invalid_argument("ridge must be finite and >= 0");
  }
}

ConfidenceTrace detect_wace(const std::vector<FeatureVector>& features,
                            const Dictionary& dict, const WaceConfig& cfg) {
  cfg.validate();
  const size_t n = features.size();
  const size_t window = static_cast<size_t>(cfg.init_window);
  if (n < 2 * window) {
    throw std::invalid_argument("lane shorter than twice the init window");
  }

  std::vector<FeatureVector> init(features.begin(),
                                  features.begin() + static_cast<long>(window));
  AceScorer scorer(dict, estimate_background(init, cfg.ridge));

  ConfidenceTrace trace;
  trace.detector_name = "wace";
  trace.values.resize(n);

  // First 2N confidences come from the frozen initial model.
  for (size_t k = 0; k < 2 * window; ++k) {
    trace.values[k] = scorer.confidence(features[k].values);
  }
  // From then on the sample that just left the lagging window is absorbed
  // into the model iff it scored as background when it was evaluated.
  for (size_t k = 2 * window; k < n; ++k) {
    const size_t lagged = k - window;
    if (trace.values[lagged] < cfg.background_threshold) {
      const Vec& x = features[lagged].values;
      BackgroundModel next =
          update_inverse_covariance(scorer.model(), x, cfg.lambda, cfg.update_mode);
      next.mean = update_mean(scorer.model().mean, x, cfg.lambda, cfg.update_mode);
      scorer.set_model(std::move(next));
    }
    trace.values[k] = scorer.confidence(features[k].values);
  }
  return trace;
}

OmpResult omp(const FeatureVector& x, const Dictionary& dict, int sparsity) {
  const Mat a = feature_matrix(dict);
  if (x.values.size() != a.rows()) {
    throw std::invalid_argument("input dimension differs from atom features");
  }
  if (sparsity < 1 || sparsity > a.cols()) {
    throw std::invalid_argument("sparsity must lie in [1, atom count]");
  }

  OmpResult result;
  if (x.values.norm() < 1e-15) {
    result.degenerate = true;
    return result;
  }

  Vec residual = x.values;
  std::vector<char> used(static_cast<size_t>(a.cols()), 0);
  for (int iter = 0; iter < sparsity; ++iter) {
    const Vec corr = a.transpose() * residual;
    int best = -1;
    double best_abs = 1e-14;  // atoms uncorrelated with the residual add nothing
    for (Eigen::Index j = 0; j < corr.size(); ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      const double c = std::abs(corr[j]);
      if (c > best_abs) {
        best_abs = c;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;
    used[static_cast<size_t>(best)] = 1;
    result.selected_atoms.push_back(best);

    Mat sel(a.rows(), static_cast<Eigen::Index>(result.selected_atoms.size()));
    for (size_t j = 0; j < result.selected_atoms.size(); ++j) {
      sel.col(static_cast<Eigen::Index>(j)) = a.col(result.selected_atoms[j]);
    }
    const Vec w = sel.colPivHouseholderQr().solve(x.values);
    result.weights.assign(w.data(), w.data() + w.size());
    residual = x.values - sel * w;
    if (residual.norm() < 1e-14) break;
  }
  result.residual_sq = residual.squaredNorm();
  return result;
}

double jomp_confidence(std::span<const double> residuals) {
  if (residuals.empty()) {
    throw std::invalid_argument("jomp confidence requires at least one residual");
  }
  double sum = 0.0;
  for (double r : residuals) {
    if (!(r >= 0.0)) {
      throw std::invalid_argument("residuals must be >= 0");
    }
    sum += r;
  }
  return 1.0 / (1.0 + sum / static_cast<double>(residuals.size()));
}

ConfidenceTrace detect_jomp(const std::vector<FeatureVector>& features,
                            const Dictionary& dict, int offset, int sparsity) {
  const Mat a = feature_matrix(dict);
  if (offset < 1) {
    throw std::invalid_argument("offset must be >= 1");
  }
  if (sparsity < 1 || sparsity > a.cols()) {
    throw std::invalid_argument("sparsity must lie in [1, atom count]");
  }
  const size_t n = features.size();
  const size_t s = static_cast<size_t>(offset);
  if (n <= 2 * s) {
    throw std::invalid_argument("lane shorter than twice the offset plus one");
  }

  ConfidenceTrace trace;
  trace.detector_name = "jomp";
  trace.values.assign(n, 0.0);  // edge indices keep confidence 0

  for (size_t i = s; i + s < n; ++i) {
    const Vec& y1 = features[i - s].values;
    const Vec& y2 = features[i + s].values;
    if (y1.size() != a.rows() || y2.size() != a.rows()) {
      throw std::invalid_argument("input dimension differs from atom features");
    }

    // Greedy selection on the stacked problem: both flanking samples share
    // the atom set, weights are refit per sample.
    Vec r1 = y1;
    Vec r2 = y2;
    std::vector<int> selected;
    std::vector<char> used(static_cast<size_t>(a.cols()), 0);
    for (int iter = 0; iter < sparsity; ++iter) {
      const Vec c1 = a.transpose() * r1;
      const Vec c2 = a.transpose() * r2;
      int best = -1;
      double best_score = 1e-28;
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double score = c1[j] * c1[j] + c2[j] * c2[j];
        if (score > best_score) {
          best_score = score;
          best = static_cast<int>(j);
        }
      }
      if (best < 0) break;
      used[static_cast<size_t>(best)] = 1;
      selected.push_back(best);

      Mat sel(a.rows(), static_cast<Eigen::Index>(selected.size()));
      for (size_t j = 0; j < selected.size(); ++j) {
        sel.col(static_cast<Eigen::Index>(j)) = a.col(selected[j]);
      }
      const auto qr = sel.colPivHouseholderQr();
      r1 = y1 - sel * qr.solve(y1);
      r2 = y2 - sel * qr.solve(y2);
      if (r1.norm() < 1e-14 && r2.norm() < 1e-14) break;
    }
    const double res[2] = {r1.squaredNorm(), r2.squaredNorm()};
    trace.values[i] = jomp_confidence(res);
  }
  return trace;
}

ConfidenceTrace detect_energy(const RawLane& lane) {
  ConfidenceTrace trace;
  trace.detector_name = "energy";
  trace.values.reserve(lane.samples.size());
  for (const SweepSample& s : lane.samples) {
    double sum = 0.0;
    for (const Complex& r : s.response) {
      sum += std::abs(r);
    }
    trace.values.push_back(sum);
  }
  return trace;
}

}  // namespace emiace
