#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace emiace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Number of sensor operating frequencies per sweep.
inline constexpr int kNumFreqs = 21;

/// Feature dimension: real parts followed by imaginary parts.
inline constexpr int kFeatureDim = 2 * kNumFreqs;

/// Planar UTM position in meters.
struct Position {
  double easting = 0.0;
  double northing = 0.0;
};

inline double distance(const Position& a, const Position& b) {
  const double de = a.easting - b.easting;
  const double dn = a.northing - b.northing;
  return std::sqrt(de * de + dn * dn);
}

/// One sensor reading: complex response at each operating frequency plus
/// the UTM position recorded for the sweep.
struct SweepSample {
  Position pos;
  std::vector<Complex> response;  // kNumFreqs entries
};

/// A down-track ordered sequence of sweeps from one lane pass.
struct RawLane {
  std::string lane_id;
  std::vector<double> operating_freqs_hz;
  std::vector<SweepSample> samples;
};

/// 42-dim real vector: zero mean over the 21 real components, unit L2 norm.
struct FeatureVector {
  Vec values;  // kFeatureDim entries
};

/// Per-sample detector confidences, aligned 1:1 with the scored sequence.
struct ConfidenceTrace {
  std::string detector_name;
  std::vector<double> values;
};

}  // namespace emiace
