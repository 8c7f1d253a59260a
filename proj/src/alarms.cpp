#include "emiace/alarms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace emiace {

void GridConfig::validate() const {
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m)) {
    throw std::invalid_argument("cell size must be positive");
  }
  if (!(min_separation_m > 0.0) || !std::isfinite(min_separation_m)) {
    throw std::invalid_argument("alarm separation halo must be positive");
  }
  if (!std::isfinite(threshold) || threshold < 0.0) {
    throw std::invalid_argument("alarm threshold must be finite and >= 0");
  }
}

Position ConfidenceGrid::cell_center(int r, int c) const {
  return Position{origin_easting + (c + 0.5) * cell_size_m,
                  origin_northing + (r + 0.5) * cell_size_m};
}

ConfidenceGrid rasterize(const std::vector<Position>& positions,
                         const std::vector<double>& confidences,
                         const GridConfig& cfg) {
  cfg.validate();
  if (positions.empty() || positions.size() != confidences.size()) {
    throw std::invalid_argument("rasterize requires matching, non-empty positions and confidences");
  }

  double min_e = positions.front().easting, max_e = min_e;
  double min_n = positions.front().northing, max_n = min_n;
  for (const Position& p : positions) {
    if (!std::isfinite(p.easting) || !std::isfinite(p.northing)) {
      throw std::invalid_argument("positions must be finite");
    }
    min_e = std::min(min_e, p.easting);
    max_e = std::max(max_e, p.easting);
    min_n = std::min(min_n, p.northing);
    max_n = std::max(max_n, p.northing);
  }

  ConfidenceGrid grid;
  grid.origin_easting = min_e;
  grid.origin_northing = min_n;
  grid.cell_size_m = cfg.cell_size_m;
  grid.cols = static_cast<int>(std::floor((max_e - min_e) / cfg.cell_size_m)) + 1;
  grid.rows = static_cast<int>(std::floor((max_n - min_n) / cfg.cell_size_m)) + 1;
  grid.values.assign(static_cast<size_t>(grid.rows) * grid.cols, 0.0);
  grid.occupied.assign(grid.values.size(), 0);

  // Cells that received at least one sample; interpolation runs between these.
  std::vector<uint8_t> sampled(grid.values.size(), 0);
  for (size_t i = 0; i < positions.size(); ++i) {
    if (!std::isfinite(confidences[i]) || confidences[i] < 0.0) {
      throw std::invalid_argument("confidences must be finite and >= 0");
    }
    int c = static_cast<int>(std::floor((positions[i].easting - min_e) / cfg.cell_size_m));
    int r = static_cast<int>(std::floor((positions[i].northing - min_n) / cfg.cell_size_m));
    c = std::clamp(c, 0, grid.cols - 1);
    r = std::clamp(r, 0, grid.rows - 1);
    const size_t idx = static_cast<size_t>(r) * grid.cols + c;
    if (sampled[idx]) {
      grid.values[idx] = std::max(grid.values[idx], confidences[i]);
    } else {
      grid.values[idx] = confidences[i];
      sampled[idx] = 1;
    }
  }

  // 1-D linear fill between sampled cells, along rows and along columns;
  // a cell reached by both passes keeps the larger value.
  std::vector<double> fill(grid.values.size(),
                           -std::numeric_limits<double>::infinity());
  auto lerp_span = [&](size_t idx_a, size_t idx_b, size_t stride, int gap) {
    const double va = grid.values[idx_a];
    const double vb = grid.values[idx_b];
    for (int step = 1; step < gap; ++step) {
      const size_t idx = idx_a + stride * static_cast<size_t>(step);
      const double frac = static_cast<double>(step) / gap;
      fill[idx] = std::max(fill[idx], va + (vb - va) * frac);
    }
  };
  for (int r = 0; r < grid.rows; ++r) {
    int prev = -1;
    for (int c = 0; c < grid.cols; ++c) {
      if (!sampled[static_cast<size_t>(r) * grid.cols + c]) continue;
      if (prev >= 0 && c - prev > 1) {
        lerp_span(static_cast<size_t>(r) * grid.cols + prev,
                  static_cast<size_t>(r) * grid.cols + c, 1, c - prev);
      }
      prev = c;
    }
  }
  for (int c = 0; c < grid.cols; ++c) {
    int prev = -1;
    for (int r = 0; r < grid.rows; ++r) {
      if (!sampled[static_cast<size_t>(r) * grid.cols + c]) continue;
      if (prev >= 0 && r - prev > 1) {
        lerp_span(static_cast<size_t>(prev) * grid.cols + c,
                  static_cast<size_t>(r) * grid.cols + c,
                  static_cast<size_t>(grid.cols), r - prev);
      }
      prev = r;
    }
  }

  for (size_t i = 0; i < grid.values.size(); ++i) {
    if (sampled[i]) {
      grid.occupied[i] = 1;
    } else if (fill[i] > -std::numeric_limits<double>::infinity()) {
      grid.values[i] = fill[i];
      grid.occupied[i] = 1;
    }
  }
  return grid;
}

std::vector<Alarm> extract_alarms(const ConfidenceGrid& grid, const GridConfig& cfg,
                                  const std::string& label) {
  cfg.validate();
  std::vector<double> values = grid.values;
  const int halo_cells =
      static_cast<int>(std::ceil(cfg.min_separation_m / grid.cell_size_m)) + 1;

  std::vector<Alarm> alarms;
  for (;;) {
    int best_r = -1, best_c = -1;
    double best = cfg.threshold;
    for (int r = 0; r < grid.rows; ++r) {
      for (int c = 0; c < grid.cols; ++c) {
        const double v = values[static_cast<size_t>(r) * grid.cols + c];
        if (v > best) {  // strict: ties keep the first cell in row-major order
          best = v;
          best_r = r;
          best_c = c;
        }
      }
    }
    if (best_r < 0) break;

    const Position peak = grid.cell_center(best_r, best_c);
    alarms.push_back(Alarm{peak, best, label});

    const int r_lo = std::max(0, best_r - halo_cells);
    const int r_hi = std::min(grid.rows - 1, best_r + halo_cells);
    const int c_lo = std::max(0, best_c - halo_cells);
    const int c_hi = std::min(grid.cols - 1, best_c + halo_cells);
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int c = c_lo; c <= c_hi; ++c) {
        if (distance(grid.cell_center(r, c), peak) <= cfg.min_separation_m) {
          values[static_cast<size_t>(r) * grid.cols + c] = 0.0;
        }
      }
    }
  }
  return alarms;
}

std::vector<Alarm> cluster_alarms(const std::vector<Position>& positions,
                                  const std::vector<double>& confidences,
                                  const GridConfig& cfg, const std::string& label) {
  return extract_alarms(rasterize(positions, confidences, cfg), cfg, label);
}

}  // namespace emiace
