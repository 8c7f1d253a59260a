#pragma once

#include <random>
#include <vector>

#include "emiace/types.hpp"

namespace emiace::test {

inline Vec random_vec(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

/// SPD matrix with eigenvalues drawn uniformly from [lo, hi], rotated by a
/// random orthogonal basis, so conditioning is controlled.
inline Mat random_spd(std::mt19937_64& rng, int dim, double lo = 0.5,
                      double hi = 2.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(lo, hi);
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
  }
  const Mat q = Eigen::HouseholderQR<Mat>(a).householderQ();
  Vec eigs(dim);
  for (int i = 0; i < dim; ++i) eigs[i] = uniform(rng);
  Mat m = q * eigs.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

inline double rel_frobenius(const Mat& a, const Mat& b) {
  const double scale = b.norm();
  return scale > 0.0 ? (a - b).norm() / scale : (a - b).norm();
}

/// Lane whose samples are complex Gaussian sweeps around a fixed mean,
/// positioned on a straight line. Channel c of sample i is mean + noise.
inline RawLane random_lane(std::mt19937_64& rng, int n_samples,
                           double spacing = 0.05, double noise = 0.2) {
  std::normal_distribution<double> normal(0.0, noise);
  RawLane lane;
  lane.lane_id = "test";
  for (int i = 0; i < n_samples; ++i) {
    SweepSample s;
    s.pos = Position{i * spacing, 0.0};
    s.response.resize(kNumFreqs);
    for (int f = 0; f < kNumFreqs; ++f) {
      s.response[static_cast<size_t>(f)] =
          Complex(1.0 + normal(rng), 1.0 + normal(rng));
    }
    lane.samples.push_back(std::move(s));
  }
  return lane;
}

}  // namespace emiace::test
