#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emiace/alarms.hpp"
#include "emiace/types.hpp"

namespace emiace {

enum class ObjectKind { target, clutter };
enum class MetalCategory { MT, LMT, NMT, CL };
enum class Purpose { AT, AP, other };

std::string to_string(ObjectKind k);
std::string to_string(MetalCategory m);
std::string to_string(Purpose p);
ObjectKind parse_object_kind(const std::string& s);
MetalCategory parse_metal_category(const std::string& s);
Purpose parse_purpose(const std::string& s);

struct GroundTruthEntry {
  Position pos;
  ObjectKind kind = ObjectKind::target;
  MetalCategory metal = MetalCategory::MT;
  double depth_in = 0.0;
  Purpose purpose = Purpose::AT;
};

enum class AlarmLabel { HIT, FALSE_ALARM, IGNORED };

std::string to_string(AlarmLabel l);
AlarmLabel parse_alarm_label(const std::string& s);

struct MatchConfig {
  double hit_halo_m = 0.25;
  double max_depth_in = 8.0;  // deeper targets are ignored, not scored
  std::optional<Purpose> purpose_filter;

  void validate() const;  // throws std::invalid_argument
};

struct LabeledAlarm {
  Alarm alarm;
  AlarmLabel label = AlarmLabel::FALSE_ALARM;
  int matched_truth = -1;  // index into truth for HIT, -1 otherwise
};

struct MatchResult {
  std::vector<LabeledAlarm> alarms;  // input order preserved
  int scorable_targets = 0;
};

/// Labels each alarm against ground truth. Scorable targets are kind==target,
/// depth within the cutoff, and matching the purpose filter when one is set.
/// HIT: within the halo of a scorable target, each target credited at most
/// once, alarms considered in descending confidence (target beats clutter on
/// overlap). IGNORED: within the halo of clutter, an over-deep target, or an
/// excluded-purpose target. FALSE_ALARM otherwise, including a second alarm
/// on an already-credited target.
MatchResult match_alarms(const std::vector<Alarm>& alarms,
                         const std::vector<GroundTruthEntry>& truth,
                         const MatchConfig& cfg);

struct RocPoint {
  double threshold = 0.0;
  double pd = 0.0;
  double far = 0.0;  // false alarms per m^2 (or per lane in per_lane mode)
};

struct RocCurve {
  std::vector<RocPoint> points;
};

enum class FarMode { per_area, per_lane };

/// Threshold sweep over the distinct alarm confidences, descending, plus a
/// final all-inclusive point at threshold -inf. pd counts credited hits at or
/// above the threshold over scorable targets; far counts false alarms at or
/// above the threshold, divided by the lane area (per_area) or raw
/// (per_lane).
RocCurve roc(const MatchResult& match, double lane_area_m2,
             FarMode mode = FarMode::per_area);

/// Axis-aligned bounding-box area of a position set; the lane-area
/// convention for FAR normalization.
double bounding_box_area(const std::vector<Position>& positions);

}  // namespace emiace
