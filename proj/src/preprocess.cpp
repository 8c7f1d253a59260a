#include "emiace/preprocess.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "emiace/errors.hpp"

namespace emiace {

std::vector<double> sine_filter_taps(int width) {
  if (width < 3 || width % 2 == 0) {
    throw std::invalid_argument("filter width must be odd and >= 3");
  }
  std::vector<double> taps(static_cast<size_t>(width));
  const double center = (width - 1) / 2.0;
  for (int n = 0; n < width; ++n) {
    taps[static_cast<size_t>(n)] =
        std::sin(2.0 * std::numbers::pi * (n - center) / width);
  }
  double mean = 0.0;
  for (double t : taps) mean += t;
  mean /= width;
  double norm_sq = 0.0;
  for (double& t : taps) {
    t -= mean;
    norm_sq += t * t;
  }
  const double norm = std::sqrt(norm_sq);
  for (double& t : taps) t /= norm;
  return taps;
}

RawLane downtrack_filter(const RawLane& lane, std::span<const double> taps) {
  if (taps.empty()) {
    throw std::invalid_argument("filter taps must be non-empty");
  }
  const int width = static_cast<int>(taps.size());
  const int n = static_cast<int>(lane.samples.size());
  if (n < width) {
    throw std::invalid_argument("lane shorter than the filter");
  }
  for (const SweepSample& s : lane.samples) {
    if (s.response.size() != lane.samples.front().response.size()) {
      throw std::invalid_argument("inconsistent response length across samples");
    }
  }
  const int channels = static_cast<int>(lane.samples.front().response.size());
  const int center = (width - 1) / 2;

  RawLane out;
  out.lane_id = lane.lane_id;
  out.operating_freqs_hz = lane.operating_freqs_hz;
  out.samples.resize(lane.samples.size());
  for (int i = 0; i < n; ++i) {
    SweepSample& dst = out.samples[static_cast<size_t>(i)];
    dst.pos = lane.samples[static_cast<size_t>(i)].pos;
    dst.response.assign(static_cast<size_t>(channels), Complex(0.0, 0.0));
    for (int k = 0; k < width; ++k) {
      const int src = i + k - center;
      if (src < 0 || src >= n) continue;  // zero padding
      const double w = taps[static_cast<size_t>(k)];
      const auto& resp = lane.samples[static_cast<size_t>(src)].response;
      for (int c = 0; c < channels; ++c) {
        dst.response[static_cast<size_t>(c)] += w * resp[static_cast<size_t>(c)];
      }
    }
  }
  return out;
}

FeatureVector to_feature_vector(std::span<const Complex> response) {
  if (static_cast<int>(response.size()) != kNumFreqs) {
    throw std::invalid_argument("sample must hold one response per operating frequency");
  }
  Vec v(kFeatureDim);
  for (int i = 0; i < kNumFreqs; ++i) {
    const Complex& r = response[static_cast<size_t>(i)];
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) {
      throw std::invalid_argument("sample response must be finite");
    }
    v[i] = r.real();
    v[kNumFreqs + i] = r.imag();
  }
  const double real_mean = v.head(kNumFreqs).mean();
  v.head(kNumFreqs).array() -= real_mean;
  const double norm = v.norm();
  if (norm < 1e-12) {
    throw DegenerateSampleError("no signal direction after real-mean removal");
  }
  v /= norm;
  return FeatureVector{std::move(v)};
}

FeatureVector to_feature_vector(const SweepSample& sample) {
  return to_feature_vector(std::span<const Complex>(sample.response));
}

FeaturizedLane featurize_lane(const RawLane& lane) {
  FeaturizedLane out;
  out.positions.reserve(lane.samples.size());
  out.features.reserve(lane.samples.size());
  for (size_t i = 0; i < lane.samples.size(); ++i) {
    try {
      FeatureVector f = to_feature_vector(lane.samples[i]);
      out.positions.push_back(lane.samples[i].pos);
      out.features.push_back(std::move(f));
    } catch (const DegenerateSampleError&) {
      ++out.skipped;
      std::cerr << "warning: skipping degenerate sample " << i << " in lane '"
                << lane.lane_id << "'\n";
    }
  }
  return out;
}

Dictionary normalize_dictionary(Dictionary dict) {
  for (DictionaryAtom& atom : dict.atoms) {
    try {
      atom.feature = to_feature_vector(atom.raw_response);
    } catch (const DegenerateSampleError&) {
      throw std::invalid_argument("dictionary atom " + std::to_string(atom.id) +
                                  " has no direction after normalization");
    }
  }
  return dict;
}

}  // namespace emiace
