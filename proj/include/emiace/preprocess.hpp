#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "emiace/dsrf.hpp"
#include "emiace/types.hpp"

namespace emiace {

/// Zero-mean, unit-norm sine filter taps of odd width >= 3. The taps are one
/// period of a sine centered on the middle tap, so they are antisymmetric:
/// reversing the vector negates it.
std::vector<double> sine_filter_taps(int width);

/// Slides `taps` along every real/imaginary channel (correlation alignment:
/// out[i] = sum_k taps[k] * x[i + k - center], zero-padded boundaries), so a
/// unit impulse produces the reversed taps centered on it. Positions pass
/// through.
RawLane downtrack_filter(const RawLane& lane, std::span<const double> taps);

/// Concatenates real then imaginary parts, removes the mean of the 21 real
/// components from those components, and scales to unit L2 norm.
/// Throws DegenerateSampleError when nothing remains after mean removal.
FeatureVector to_feature_vector(std::span<const Complex> response);
FeatureVector to_feature_vector(const SweepSample& sample);

/// Lane samples converted to features; degenerate samples are dropped from
/// both arrays (with a warning) so positions stay aligned with features.
struct FeaturizedLane {
  std::vector<Position> positions;
  std::vector<FeatureVector> features;
  std::size_t skipped = 0;
};

FeaturizedLane featurize_lane(const RawLane& lane);

/// Fills every atom's feature by applying the sample normalization to its
/// raw response. A degenerate atom is a build error.
Dictionary normalize_dictionary(Dictionary dict);

}  // namespace emiace
