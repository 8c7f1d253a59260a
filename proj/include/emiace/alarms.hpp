#pragma once

#include <string>
#include <vector>

#include "emiace/types.hpp"

namespace emiace {

struct Alarm {
  Position pos;
  double confidence = 0.0;
  std::string label;  // detector that produced the alarm
};

struct GridConfig {
  double cell_size_m = 0.05;
  double min_separation_m = 0.5;  // zeroing halo around each extracted alarm
  double threshold = 0.0;         // confidences at or below this are dropped

  void validate() const;  // throws std::invalid_argument
};

/// Confidence raster over the lane bounding box. Cells with no sample and no
/// interpolated value hold 0 and are marked unoccupied.
struct ConfidenceGrid {
  double origin_easting = 0.0;
  double origin_northing = 0.0;
  double cell_size_m = 0.05;
  int rows = 0;  // northing axis
  int cols = 0;  // easting axis
  std::vector<double> values;    // row-major
  std::vector<uint8_t> occupied;

  double& at(int r, int c) { return values[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<size_t>(r) * cols + c]; }
  Position cell_center(int r, int c) const;
};

/// Bins samples into the grid (max combine on collisions), then fills gaps by
/// 1-D linear interpolation along rows and along columns between cells that
/// held samples, keeping the larger of the two passes.
ConfidenceGrid rasterize(const std::vector<Position>& positions,
                         const std::vector<double>& confidences,
                         const GridConfig& cfg);

/// Iterative peak extraction: take the global maximum as an alarm, zero every
/// cell within the separation halo, repeat until nothing exceeds the
/// threshold. Ties resolve to the lowest row, then lowest column.
std::vector<Alarm> extract_alarms(const ConfidenceGrid& grid, const GridConfig& cfg,
                                  const std::string& label);

/// rasterize + extract_alarms.
std::vector<Alarm> cluster_alarms(const std::vector<Position>& positions,
                                  const std::vector<double>& confidences,
                                  const GridConfig& cfg, const std::string& label);

}  // namespace emiace
