#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emiace/background.hpp"
#include "emiace/detectors.hpp"
#include "emiace/scoring.hpp"
#include "emiace/types.hpp"

namespace emiace {

inline const std::vector<std::string> kKnownDetectors = {"ace-global", "wace",
                                                         "jomp", "energy"};
inline const std::vector<double> kDefaultFarGrid = {0.01, 0.02, 0.05, 0.1, 0.2};

struct PipelineConfig {
  // Inputs. A named preset simulates the lane; otherwise lane_path is read.
  std::string preset;
  std::string lane_path;
  std::string truth_path;  // scoring runs only when truth is available
  std::string dict_path;   // empty: default dictionary
  std::string out_dir = "out";
  std::vector<std::string> detectors = kKnownDetectors;
  uint64_t seed = 1;

  // Preprocessing.
  int filter_width = 9;

  // Detector parameters.
  double lambda = 0.005;
  int init_window = 200;
  double background_threshold = 0.5;
  UpdateMode update_mode = UpdateMode::consistent;
  double ridge = 1e-6;
  int jomp_offset = 5;
  int jomp_sparsity = 1;

  // Alarm extraction.
  double cell_size_m = 0.05;
  double alarm_halo_m = 0.5;
  double alarm_threshold = 0.0;

  // Scoring.
  double hit_halo_m = 0.25;
  double max_depth_in = 8.0;
  std::optional<Purpose> purpose_filter;
  FarMode far_mode = FarMode::per_area;

  void validate() const;  // throws std::invalid_argument
};

/// Applies config-file pairs onto defaults. Unknown keys and bad values
/// raise std::invalid_argument naming the key.
PipelineConfig config_from_kv(const std::map<std::string, std::string>& kv);

struct ArtifactEntry {
  std::string path;  // relative to out_dir
  std::string hash;  // fnv1a64 of the file bytes
};

struct Manifest {
  std::vector<ArtifactEntry> artifacts;

  const ArtifactEntry* find(const std::string& path) const;
};

void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

/// simulate (optional) -> preprocess -> detect -> alarms -> score -> report.
/// Per detector: confidence CSV, alarm CSV, ROC CSV (with truth), PGM map
/// with sidecar, grid CSV. Writes manifest.json last. Failures surface as
/// StageError tagged with the stage name.
Manifest run_pipeline(const PipelineConfig& cfg);

/// Envelope Pd at the given FAR: max pd over points with far <= far_limit.
double pd_at_far(const RocCurve& curve, double far_limit);

/// Trapezoidal area under the (far, pd) polyline from 0 to far_hi,
/// normalized by far_hi; the curve extends flat past its last point. A
/// degenerate range returns the envelope pd at far_hi.
double roc_auc(const RocCurve& curve, double far_hi);

/// Largest FAR shared by every curve: min over curves of max far.
double common_far_limit(const std::vector<RocCurve>& curves);

struct ReportRow {
  std::string name;
  double auc = 0.0;
  std::vector<double> pd_at;  // one per far-grid entry
};

/// AUC over the common FAR range plus Pd at the grid points, sorted by AUC
/// descending (name ascending on ties).
std::vector<ReportRow> compare_report(const std::vector<std::string>& names,
                                      const std::vector<RocCurve>& curves,
                                      const std::vector<double>& far_grid = kDefaultFarGrid);

/// Reads ROC CSVs and reports on them; a trailing "_roc" is stripped from
/// the file stem to recover the detector name.
std::vector<ReportRow> compare_report_files(const std::vector<std::string>& paths,
                                            const std::vector<double>& far_grid = kDefaultFarGrid);

std::string render_report_table(const std::vector<ReportRow>& rows,
                                const std::vector<double>& far_grid = kDefaultFarGrid);
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows,
                      const std::vector<double>& far_grid = kDefaultFarGrid);

}  // namespace emiace
