#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "emiace/alarms.hpp"
#include "emiace/dsrf.hpp"
#include "emiace/scoring.hpp"
#include "emiace/types.hpp"

namespace emiace {

/// Shortest decimal string that round-trips the value exactly. All CSV
/// writers use this, so identical runs produce byte-identical files.
std::string format_double(double v);

/// Strict double parse of a full token; context goes into the ParseError.
double parse_double(const std::string& token, const std::string& file, int line);
long parse_long(const std::string& token, const std::string& file, int line);

/// Lane CSV: easting,northing,re_1..re_21,im_1..im_21. The file does not
/// carry the operating frequencies; readers fill in the default ladder.
RawLane read_lane_csv(const std::string& path);
void write_lane_csv(const std::string& path, const RawLane& lane);

/// Dictionary CSV: atom_id,zeta_hz,re_1..re_21,im_1..im_21 (raw responses).
/// Features are recomputed on read.
Dictionary read_dictionary_csv(const std::string& path);
void write_dictionary_csv(const std::string& path, const Dictionary& dict);

/// Feature CSV: atom_id,f_1..f_42.
void write_dictionary_features_csv(const std::string& path, const Dictionary& dict);

/// Confidence CSV: easting,northing,confidence.
void write_confidence_csv(const std::string& path,
                          const std::vector<Position>& positions,
                          const std::vector<double>& confidences);
std::pair<std::vector<Position>, std::vector<double>> read_confidence_csv(
    const std::string& path);

/// Alarm CSV: easting,northing,confidence,label.
void write_alarms_csv(const std::string& path, const std::vector<Alarm>& alarms);
std::vector<Alarm> read_alarms_csv(const std::string& path);

/// Truth CSV: easting,northing,kind,metal,depth_in,purpose.
void write_truth_csv(const std::string& path,
                     const std::vector<GroundTruthEntry>& truth);
std::vector<GroundTruthEntry> read_truth_csv(const std::string& path);

/// ROC CSV: threshold,pd,far_per_m2. The all-inclusive point is stored with
/// threshold "-inf".
void write_roc_csv(const std::string& path, const RocCurve& curve);
RocCurve read_roc_csv(const std::string& path);

/// 8-bit binary PGM, values scaled linearly over the grid min..max (a flat
/// grid maps to 0). Rows are written north-up: the last grid row is the top
/// image row. A sidecar text file at path + ".meta" records origin, cell
/// size, and value range.
void write_grid_pgm(const std::string& path, const ConfidenceGrid& grid);

/// Companion grid CSV for external plotting: header c_1..c_cols, one line
/// per grid row.
void write_grid_csv(const std::string& path, const ConfidenceGrid& grid);

/// Flat key=value config, one pair per line, '#' comments, blank lines
/// ignored. Duplicate keys keep the last value.
std::map<std::string, std::string> read_config_kv(const std::string& path);

/// FNV-1a over the file bytes; the manifest's content hash.
uint64_t fnv1a64_file(const std::string& path);
std::string hash_hex(uint64_t h);

}  // namespace emiace
