#include "emiace/lane_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace emiace {

BackgroundSpec default_background() {
  BackgroundSpec bg;
  bg.mean = Vec::Ones(kFeatureDim);
  bg.covariance.resize(kFeatureDim, kFeatureDim);
  for (int i = 0; i < kFeatureDim; ++i) {
    for (int j = 0; j < kFeatureDim; ++j) {
      bg.covariance(i, j) = 0.04 * std::pow(0.7, std::abs(i - j));
    }
  }
  return bg;
}

void Scenario::validate(const Dictionary& dict) const {
  if (!(sample_spacing_m > 0.0) || !(lane_length_m >= sample_spacing_m)) {
    throw std::invalid_argument("lane length and sample spacing must be positive");
  }
  if (track_width_m < 0.0) {
    throw std::invalid_argument("track width must be >= 0");
  }
  if (background.mean.size() != kFeatureDim ||
      background.covariance.rows() != kFeatureDim ||
      background.covariance.cols() != kFeatureDim) {
    throw std::invalid_argument("background spec has wrong dimensions");
  }
  if (!background.covariance.isApprox(background.covariance.transpose(), 1e-10)) {
    throw std::invalid_argument("background covariance must be symmetric");
  }
  if (Eigen::LLT<Mat>(background.covariance).info() != Eigen::Success) {
    throw std::invalid_argument("background covariance must be positive definite");
  }
  if (!(background.drift_period_m > 0.0)) {
    throw std::invalid_argument("drift period must be positive");
  }
  for (const TargetSpec& t : targets) {
    if (t.along_track_m < 0.0 || t.along_track_m > lane_length_m) {
      throw std::invalid_argument("target lies outside the lane extent");
    }
    if (t.atom_index < 0 || t.atom_index >= static_cast<int>(dict.atoms.size())) {
      throw std::invalid_argument("target atom index outside the dictionary");
    }
    if (!(t.spatial_sigma_m > 0.0)) {
      throw std::invalid_argument("target spatial sigma must be positive");
    }
    if (t.depth_in < 0.0) {
      throw std::invalid_argument("target depth must be >= 0");
    }
  }
  for (const HotspotSpec& h : hotspots) {
    if (h.along_track_m < 0.0 || h.along_track_m > lane_length_m) {
      throw std::invalid_argument("hotspot lies outside the lane extent");
    }
    if (!(h.spatial_sigma_m > 0.0)) {
      throw std::invalid_argument("hotspot spatial sigma must be positive");
    }
  }
}

namespace {

double gaussian_bump(double along, double center, double sigma) {
  const double d = along - center;
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

}  // namespace

SimResult generate_lane(const Scenario& scenario, const Dictionary& dict) {
  scenario.validate(dict);

  // Mean background energy: sum of channel magnitudes of the mean sweep.
  double bg_energy = 0.0;
  for (int f = 0; f < kNumFreqs; ++f) {
    bg_energy += std::abs(
        Complex(scenario.background.mean[f], scenario.background.mean[kNumFreqs + f]));
  }
  if (!(bg_energy > 0.0)) {
    throw std::invalid_argument("background mean energy must be positive");
  }

  std::mt19937_64 rng(scenario.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Hotspot spectral shapes first, so they do not depend on the lane length.
  // Each shape is scaled to unit energy; the SNR then sets its peak energy.
  std::vector<std::vector<Complex>> hotspot_shapes;
  hotspot_shapes.reserve(scenario.hotspots.size());
  for (size_t h = 0; h < scenario.hotspots.size(); ++h) {
    std::vector<Complex> shape(kNumFreqs);
    double energy = 0.0;
    for (int f = 0; f < kNumFreqs; ++f) {
      shape[static_cast<size_t>(f)] = Complex(normal(rng), normal(rng));
      energy += std::abs(shape[static_cast<size_t>(f)]);
    }
    for (Complex& c : shape) c /= energy;
    hotspot_shapes.push_back(std::move(shape));
  }

  std::vector<double> target_amps(scenario.targets.size());
  for (size_t t = 0; t < scenario.targets.size(); ++t) {
    const TargetSpec& spec = scenario.targets[t];
    const auto& raw = dict.atoms[static_cast<size_t>(spec.atom_index)].raw_response;
    double atom_energy = 0.0;
    for (const Complex& c : raw) atom_energy += std::abs(c);
    target_amps[t] = std::pow(10.0, spec.amplitude_snr_db / 10.0) * bg_energy /
                     atom_energy * std::pow(2.0, -spec.depth_in / 4.0);
  }
  std::vector<double> hotspot_amps(scenario.hotspots.size());
  for (size_t h = 0; h < scenario.hotspots.size(); ++h) {
    hotspot_amps[h] =
        std::pow(10.0, scenario.hotspots[h].amplitude_snr_db / 10.0) * bg_energy;
  }

  const Eigen::LLT<Mat> llt(scenario.background.covariance);
  const Mat chol = llt.matrixL();

  const int n_samples =
      static_cast<int>(std::floor(scenario.lane_length_m / scenario.sample_spacing_m)) + 1;

  // Monotone lateral drift: each northing is visited once, so grid-row
  // interpolation never bridges distant parts of the track.
  auto track_position = [&](double along) {
    return Position{
        kUtmOriginEasting + along,
        kUtmOriginNorthing +
            scenario.track_width_m * (along / scenario.lane_length_m - 0.5)};
  };

  SimResult result;
  result.lane.lane_id = scenario.name;
  result.lane.operating_freqs_hz = dict.operating_freqs_hz;
  result.lane.samples.resize(static_cast<size_t>(n_samples));

  Vec z(kFeatureDim);
  for (int i = 0; i < n_samples; ++i) {
    const double along = i * scenario.sample_spacing_m;
    SweepSample& sample = result.lane.samples[static_cast<size_t>(i)];
    sample.pos = track_position(along);

    for (int d = 0; d < kFeatureDim; ++d) z[d] = normal(rng);
    const double drift =
        scenario.background.drift_amplitude *
        std::sin(2.0 * std::numbers::pi * along / scenario.background.drift_period_m);
    const Vec channels = scenario.background.mean + chol * z +
                         drift * Vec::Ones(kFeatureDim);

    sample.response.resize(kNumFreqs);
    for (int f = 0; f < kNumFreqs; ++f) {
      sample.response[static_cast<size_t>(f)] =
          Complex(channels[f], channels[kNumFreqs + f]);
    }

    for (size_t t = 0; t < scenario.targets.size(); ++t) {
      const TargetSpec& spec = scenario.targets[t];
      const double g = gaussian_bump(along, spec.along_track_m, spec.spatial_sigma_m);
      if (g < 1e-12) continue;
      const auto& raw = dict.atoms[static_cast<size_t>(spec.atom_index)].raw_response;
      for (int f = 0; f < kNumFreqs; ++f) {
        sample.response[static_cast<size_t>(f)] +=
            target_amps[t] * g * raw[static_cast<size_t>(f)];
      }
    }
    for (size_t h = 0; h < scenario.hotspots.size(); ++h) {
      const HotspotSpec& spec = scenario.hotspots[h];
      const double g = gaussian_bump(along, spec.along_track_m, spec.spatial_sigma_m);
      if (g < 1e-12) continue;
      for (int f = 0; f < kNumFreqs; ++f) {
        sample.response[static_cast<size_t>(f)] +=
            hotspot_amps[h] * g * hotspot_shapes[h][static_cast<size_t>(f)];
      }
    }
  }

  result.truth.reserve(scenario.targets.size());
  for (const TargetSpec& spec : scenario.targets) {
    GroundTruthEntry entry;
    entry.pos = track_position(spec.along_track_m);
    entry.kind = spec.kind;
    entry.metal = spec.metal;
    entry.depth_in = spec.depth_in;
    entry.purpose = spec.purpose;
    result.truth.push_back(entry);
  }
  return result;
}

namespace {

constexpr double kFirstSlotM = 12.0;  // leaves the init window target-free
constexpr double kSlotPitchM = 2.5;

double slot_along(int slot) { return kFirstSlotM + kSlotPitchM * slot; }

// Midpoint between object slots k and k+1; keeps hotspots 1.25 m away from
// every object so their alarms never fall inside a hit halo.
double midpoint_along(int k) { return slot_along(k) + kSlotPitchM / 2.0; }

struct ObjectMix {
  int mt = 0;
  int lmt = 0;
  int nmt = 0;
  int cl = 0;
};

Scenario survey_lane(const std::string& name, const ObjectMix& mix) {
  Scenario s;
  s.name = name;
  s.sample_spacing_m = 0.05;
  s.track_width_m = 1.2;
  s.background = default_background();

  const double depth_cycle[4] = {0.0, 2.0, 4.0, 6.0};
  int slot = 0;
  auto add = [&](int count, MetalCategory metal, double snr_db, ObjectKind kind) {
    for (int i = 0; i < count; ++i, ++slot) {
      TargetSpec t;
      t.along_track_m = slot_along(slot);
      t.atom_index = (7 + 9 * slot) % 100;
      t.amplitude_snr_db = snr_db;
      t.depth_in = depth_cycle[slot % 4];
      t.kind = kind;
      t.metal = metal;
      t.purpose = kind == ObjectKind::clutter ? Purpose::other
                  : slot % 2                  ? Purpose::AP
                                              : Purpose::AT;
      s.targets.push_back(t);
    }
  };
  add(mix.mt, MetalCategory::MT, 15.0, ObjectKind::target);
  add(mix.lmt, MetalCategory::LMT, 9.0, ObjectKind::target);
  add(mix.nmt, MetalCategory::NMT, -20.0, ObjectKind::target);
  add(mix.cl, MetalCategory::CL, 13.0, ObjectKind::clutter);

  s.lane_length_m = slot_along(slot) + 3.0 - kSlotPitchM;
  const double hotspot_snrs[4] = {13.5, 15.5, 16.5, 17.5};
  for (int j = 0; j < 4; ++j) {
    HotspotSpec h;
    h.along_track_m = midpoint_along(1 + 3 * j);
    h.amplitude_snr_db = hotspot_snrs[j];
    s.hotspots.push_back(h);
  }
  return s;
}

Scenario easy_preset() {
  Scenario s;
  s.name = "easy";
  s.lane_length_m = 50.0;
  s.sample_spacing_m = 0.05;
  s.track_width_m = 1.2;
  s.background = default_background();

  // Strong targets with a compact footprint: the filtered response (two
  // lobes straddling the object) must die out inside the suppression halo,
  // or its far lobe survives extraction as a false alarm.
  for (int k = 0; k < 13; ++k) {
    TargetSpec t;
    t.along_track_m = slot_along(k);
    t.atom_index = (7 + 9 * k) % 100;
    t.amplitude_snr_db = 15.0;
    t.spatial_sigma_m = 0.06;
    if (k < 10) {
      t.depth_in = static_cast<double>(k % 3);
      t.kind = ObjectKind::target;
      t.metal = MetalCategory::MT;
      t.purpose = k % 2 ? Purpose::AP : Purpose::AT;
    } else {
      t.depth_in = 0.0;
      t.kind = ObjectKind::clutter;
      t.metal = MetalCategory::CL;
      t.purpose = Purpose::other;
    }
    s.targets.push_back(t);
  }

  const double hotspot_snrs[9] = {13.0, 14.0, 15.5, 16.0, 17.0,
                                  18.0, 14.5, 13.5, 15.2};
  for (int j = 0; j < 9; ++j) {
    HotspotSpec h;
    h.along_track_m = midpoint_along(j);
    h.amplitude_snr_db = hotspot_snrs[j];
    s.hotspots.push_back(h);
  }
  return s;
}

Scenario hard_preset() {
  Scenario s;
  s.name = "hard";
  s.sample_spacing_m = 0.05;
  s.track_width_m = 1.2;
  s.background = default_background();

  const double depth_cycle[5] = {0.0, 3.0, 6.0, 9.0, 11.0};
  for (int k = 0; k < 18; ++k) {
    TargetSpec t;
    t.along_track_m = slot_along(k);
    t.atom_index = (7 + 9 * k) % 100;
    if (k < 10) {
      t.amplitude_snr_db = 8.0;
      t.depth_in = depth_cycle[k % 5];
      t.kind = ObjectKind::target;
      t.metal = MetalCategory::MT;
      t.purpose = k % 2 ? Purpose::AP : Purpose::AT;
    } else if (k < 15) {
      t.amplitude_snr_db = 4.0;
      t.depth_in = depth_cycle[k % 5];
      t.kind = ObjectKind::target;
      t.metal = MetalCategory::LMT;
      t.purpose = k % 2 ? Purpose::AP : Purpose::AT;
    } else {
      t.amplitude_snr_db = 13.0;
      t.depth_in = 0.0;
      t.kind = ObjectKind::clutter;
      t.metal = MetalCategory::CL;
      t.purpose = Purpose::other;
    }
    s.targets.push_back(t);
  }

  s.lane_length_m = slot_along(18) + 3.0 - kSlotPitchM;
  for (int j = 0; j < 10; ++j) {
    HotspotSpec h;
    h.along_track_m = midpoint_along(j);
    h.amplitude_snr_db = 12.0 + 0.7 * j;
    s.hotspots.push_back(h);
  }
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"lane1", "lane2", "lane3", "lane4", "lane5", "lane6", "easy", "hard"};
}

bool is_preset(const std::string& name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario preset_scenario(const std::string& name) {
  if (name == "lane1") return survey_lane(name, {4, 7, 0, 6});
  if (name == "lane2") return survey_lane(name, {4, 10, 0, 4});
  if (name == "lane3") return survey_lane(name, {4, 7, 0, 8});
  if (name == "lane4") return survey_lane(name, {6, 6, 3, 0});
  if (name == "lane5") return survey_lane(name, {7, 5, 5, 0});
  if (name == "lane6") return survey_lane(name, {6, 6, 2, 3});
  if (name == "easy") return easy_preset();
  if (name == "hard") return hard_preset();
  throw std::invalid_argument("unknown preset '" + name + "'");
}

MetalCounts count_by_metal(const std::vector<GroundTruthEntry>& truth) {
  MetalCounts counts;
  for (const GroundTruthEntry& t : truth) {
    switch (t.metal) {
      case MetalCategory::MT: ++counts.mt; break;
      case MetalCategory::LMT: ++counts.lmt; break;
      case MetalCategory::NMT: ++counts.nmt; break;
      case MetalCategory::CL: ++counts.cl; break;
    }
  }
  return counts;
}

MetalCounts published_survey_totals() { return MetalCounts{31, 41, 10, 11}; }

}  // namespace emiace
