#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emiace/dsrf.hpp"
#include "emiace/scoring.hpp"
#include "emiace/types.hpp"

namespace emiace {

// All simulated lanes share one UTM frame; the cart travels along easting.
inline constexpr double kUtmOriginEasting = 500000.0;
inline constexpr double kUtmOriginNorthing = 4420000.0;

struct BackgroundSpec {
  Vec mean;                       // 42-vector, re_1..re_21 then im_1..im_21
  Mat covariance;                 // 42x42 SPD
  double drift_amplitude = 0.05;  // slow additive drift on every channel
  double drift_period_m = 10.0;
};

struct TargetSpec {
  double along_track_m = 0.0;
  int atom_index = 0;
  double amplitude_snr_db = 15.0;   // peak energy vs mean background energy
  double spatial_sigma_m = 0.15;
  double depth_in = 0.0;            // attenuates amplitude by 2^(-depth/4)
  ObjectKind kind = ObjectKind::target;
  MetalCategory metal = MetalCategory::MT;
  Purpose purpose = Purpose::AT;
};

/// Localized anomaly with a random spectral shape drawn off-dictionary. It
/// carries target-like energy but no relaxation structure, and it is absent
/// from ground truth, so energy thresholding pays for it while model-based
/// detectors should not.
struct HotspotSpec {
  double along_track_m = 0.0;
  double amplitude_snr_db = 15.0;
  double spatial_sigma_m = 0.15;
};

struct Scenario {
  std::string name;
  double lane_length_m = 50.0;
  double sample_spacing_m = 0.05;
  double track_width_m = 1.2;  // cross-track extent swept by the cart
  BackgroundSpec background;
  std::vector<TargetSpec> targets;
  std::vector<HotspotSpec> hotspots;
  uint64_t rng_seed = 1;

  void validate(const Dictionary& dict) const;  // throws std::invalid_argument
};

/// Background with mean 1.0 on every channel, covariance
/// sigma^2 * rho^|i-j| (sigma 0.2, rho 0.7), and default drift.
BackgroundSpec default_background();

struct SimResult {
  RawLane lane;
  std::vector<GroundTruthEntry> truth;
};

/// Samples every sample_spacing_m along a track that drifts linearly across
/// the lane width, so each grid row is visited once. Each sweep is a
/// correlated Gaussian background draw plus sinusoidal drift plus Gaussian
/// bumps for targets (dictionary responses) and hotspots (random shapes).
/// Deterministic given (scenario, dictionary).
SimResult generate_lane(const Scenario& scenario, const Dictionary& dict);

/// lane1..lane6 (published object compositions), plus easy and hard tuning
/// scenarios.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
Scenario preset_scenario(const std::string& name);  // throws on unknown name

struct MetalCounts {
  int mt = 0;
  int lmt = 0;
  int nmt = 0;
  int cl = 0;

  bool operator==(const MetalCounts&) const = default;
};

MetalCounts count_by_metal(const std::vector<GroundTruthEntry>& truth);

/// Totals row of the published object survey as printed. Its clutter entry
/// disagrees with the per-lane column sum; the printed row is reproduced
/// verbatim rather than recomputed.
MetalCounts published_survey_totals();

}  // namespace emiace
