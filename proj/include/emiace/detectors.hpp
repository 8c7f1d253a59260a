#pragma once

#include <span>
#include <string>
#include <vector>

#include "emiace/background.hpp"
#include "emiace/dsrf.hpp"
#include "emiace/types.hpp"

namespace emiace {

/// Coherence between sample x and target t under the background model:
///   [(t-mu)^T S (x-mu)]^2 / ([(t-mu)^T S (t-mu)] * [(x-mu)^T S (x-mu)])
/// with S the inverse covariance. Equals the squared cosine of the angle
/// between the whitened vectors; always in [0, 1].
/// Throws UndefinedStatisticError when x or t coincides with the mean.
double ace_statistic(const Vec& x, const Vec& t, const BackgroundModel& bg);

/// Scores samples against every dictionary atom under one background model.
/// All detector drivers share this path so their confidences agree bit for
/// bit on identical models.
class AceScorer {
 public:
  AceScorer(const Dictionary& dict, BackgroundModel bg);

  void set_model(BackgroundModel bg);
  const BackgroundModel& model() const { return bg_; }

  /// Max ACE statistic over the atoms; atoms with an undefined statistic are
  /// skipped, and a lane with every atom skipped scores 0 with a warning.
  double confidence(const Vec& x) const;

 private:
  void rebuild();

  Mat atom_features_;  // dim x M, one column per atom
  Mat centered_;       // atom_features - mean
  Mat whitened_;       // inv_cov * centered
  Vec atom_quad_;      // per-atom (t-mu)^T inv_cov (t-mu)
  BackgroundModel bg_;
};

/// Max ACE statistic across the dictionary for a single sample.
double ace_confidence(const FeatureVector& x, const Dictionary& dict,
                      const BackgroundModel& bg);

/// Non-causal ACE: one background model estimated from the whole feature
/// sequence, then applied to every sample.
ConfidenceTrace detect_global_ace(const std::vector<FeatureVector>& features,
                                  const Dictionary& dict, double ridge = 1e-6);

struct WaceConfig {
  double lambda = 0.005;
  int init_window = 200;              // N: samples used to initialize the model
  double background_threshold = 0.5;  // lagged confidences below this update the model
  UpdateMode update_mode = UpdateMode::consistent;
  double ridge = 1e-6;                // ridge for the initial estimate

  void validate() const;  // throws std::invalid_argument
};

/// Causal ACE with a lagging update window: the model is initialized from the
/// first N samples, frozen for the first 2N confidences, and from then on
/// sample k-N is folded into the model whenever its confidence fell below the
/// background threshold, before sample k is scored.
ConfidenceTrace detect_wace(const std::vector<FeatureVector>& features,
                            const Dictionary& dict, const WaceConfig& cfg);

struct OmpResult {
  std::vector<int> selected_atoms;
  std::vector<double> weights;
  double residual_sq = 0.0;
  bool degenerate = false;  // zero input, nothing selected
};

/// Greedy orthogonal matching pursuit: repeatedly select the atom most
/// correlated with the residual, refit least squares on the selected set.
OmpResult omp(const FeatureVector& x, const Dictionary& dict, int sparsity);

/// 1 / (1 + mean(residuals)). Throws std::invalid_argument on a negative
/// residual or an empty sequence.
double jomp_confidence(std::span<const double> residuals);

/// Joint OMP over the two samples at i-offset and i+offset: atoms are chosen
/// greedily to maximize the summed squared correlation of both residuals,
/// weights are refit per sample on the shared atom set. Edge indices score 0.
ConfidenceTrace detect_jomp(const std::vector<FeatureVector>& features,
                            const Dictionary& dict, int offset, int sparsity);

/// Baseline: per-sample sum of response magnitudes over the operating
/// frequencies, computed on filtered, un-normalized data.
ConfidenceTrace detect_energy(const RawLane& lane);

}  // namespace emiace
