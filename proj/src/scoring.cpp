#include "emiace/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace emiace {

std::string to_string(ObjectKind k) {
  return k == ObjectKind::target ? "target" : "clutter";
}

std::string to_string(MetalCategory m) {
  switch (m) {
    case MetalCategory::MT: return "MT";
    case MetalCategory::LMT: return "LMT";
    case MetalCategory::NMT: return "NMT";
    case MetalCategory::CL: return "CL";
  }
  return "MT";
}

std::string to_string(Purpose p) {
  switch (p) {
    case Purpose::AT: return "AT";
    case Purpose::AP: return "AP";
    case Purpose::other: return "other";
  }
  return "other";
}

std::string to_string(AlarmLabel l) {
  switch (l) {
    case AlarmLabel::HIT: return "HIT";
    case AlarmLabel::FALSE_ALARM: return "FALSE_ALARM";
    case AlarmLabel::IGNORED: return "IGNORED";
  }
  return "FALSE_ALARM";
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

ObjectKind parse_object_kind(const std::string& s) {
  const std::string v = lower(s);
  if (v == "target") return ObjectKind::target;
  if (v == "clutter") return ObjectKind::clutter;
  throw std::invalid_argument("unknown object kind '" + s + "'");
}

MetalCategory parse_metal_category(const std::string& s) {
  const std::string v = lower(s);
  if (v == "mt") return MetalCategory::MT;
  if (v == "lmt") return MetalCategory::LMT;
  if (v == "nmt") return MetalCategory::NMT;
  if (v == "cl") return MetalCategory::CL;
  throw std::invalid_argument("unknown metal category '" + s + "'");
}

Purpose parse_purpose(const std::string& s) {
  const std::string v = lower(s);
  if (v == "at") return Purpose::AT;
  if (v == "ap") return Purpose::AP;
  if (v == "other") return Purpose::other;
  throw std::invalid_argument("unknown purpose '" + s + "'");
}

AlarmLabel parse_alarm_label(const std::string& s) {
  const std::string v = lower(s);
  if (v == "hit") return AlarmLabel::HIT;
  if (v == "false_alarm") return AlarmLabel::FALSE_ALARM;
  if (v == "ignored") return AlarmLabel::IGNORED;
  throw std::invalid_argument("unknown alarm label '" + s + "'");
}

void MatchConfig::validate() const {
  if (!(hit_halo_m > 0.0) || !std::isfinite(hit_halo_m)) {
    throw std::invalid_argument("hit halo must be positive");
  }
  if (!(max_depth_in >= 0.0) || !std::isfinite(max_depth_in)) {
    throw std::invalid_argument("depth cutoff must be >= 0");
  }
}

MatchResult match_alarms(const std::vector<Alarm>& alarms,
                         const std::vector<GroundTruthEntry>& truth,
                         const MatchConfig& cfg) {
  cfg.validate();

  std::vector<char> scorable(truth.size(), 0);
  std::vector<char> ignorable(truth.size(), 0);
  int scorable_count = 0;
  for (size_t j = 0; j < truth.size(); ++j) {
    const GroundTruthEntry& t = truth[j];
    if (t.kind == ObjectKind::target && t.depth_in <= cfg.max_depth_in &&
        (!cfg.purpose_filter || t.purpose == *cfg.purpose_filter)) {
      scorable[j] = 1;
      ++scorable_count;
    } else {
      // Clutter, over-deep targets, and excluded-purpose targets all shield
      // nearby alarms from counting as false.
      ignorable[j] = 1;
    }
  }

  // Credit greedily by descending confidence so the strongest alarm on each
  // target wins; ties keep input order.
  std::vector<size_t> order(alarms.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return alarms[a].confidence > alarms[b].confidence;
  });

  MatchResult result;
  result.scorable_targets = scorable_count;
  result.alarms.resize(alarms.size());
  std::vector<char> credited(truth.size(), 0);

  for (size_t idx : order) {
    const Alarm& alarm = alarms[idx];
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    bool near_ignorable = false;
    for (size_t j = 0; j < truth.size(); ++j) {
      const double d = distance(alarm.pos, truth[j].pos);
      if (d > cfg.hit_halo_m) continue;
      if (scorable[j] && !credited[j]) {
        if (d < best_dist) {
          best_dist = d;
          best = static_cast<int>(j);
        }
      } else if (ignorable[j]) {
        near_ignorable = true;
      }
    }

    LabeledAlarm& out = result.alarms[idx];
    out.alarm = alarm;
    if (best >= 0) {
      out.label = AlarmLabel::HIT;
      out.matched_truth = best;
      credited[static_cast<size_t>(best)] = 1;
    } else if (near_ignorable) {
      out.label = AlarmLabel::IGNORED;
    } else {
      out.label = AlarmLabel::FALSE_ALARM;
    }
  }
  return result;
}

RocCurve roc(const MatchResult& match, double lane_area_m2, FarMode mode) {
  if (!(lane_area_m2 > 0.0) || !std::isfinite(lane_area_m2)) {
    throw std::invalid_argument("lane area must be positive");
  }

  std::vector<const LabeledAlarm*> sorted;
  sorted.reserve(match.alarms.size());
  for (const LabeledAlarm& a : match.alarms) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledAlarm* a, const LabeledAlarm* b) {
              return a->alarm.confidence > b->alarm.confidence;
            });

  RocCurve curve;
  const double denom = std::max(1, match.scorable_targets);
  int hits = 0;
  int fas = 0;
  auto push_point = [&](double threshold) {
    RocPoint p;
    p.threshold = threshold;
    p.pd = match.scorable_targets > 0 ? hits / denom : 0.0;
    p.far = mode == FarMode::per_area ? fas / lane_area_m2
                                      : static_cast<double>(fas);
    curve.points.push_back(p);
  };

  size_t i = 0;
  while (i < sorted.size()) {
    const double threshold = sorted[i]->alarm.confidence;
    for (; i < sorted.size() && sorted[i]->alarm.confidence == threshold; ++i) {
      if (sorted[i]->label == AlarmLabel::HIT) ++hits;
      if (sorted[i]->label == AlarmLabel::FALSE_ALARM) ++fas;
    }
    push_point(threshold);
  }
  push_point(-std::numeric_limits<double>::infinity());
  return curve;
}

double bounding_box_area(const std::vector<Position>& positions) {
  if (positions.empty()) return 0.0;
  double min_e = positions.front().easting, max_e = min_e;
  double min_n = positions.front().northing, max_n = min_n;
  for (const Position& p : positions) {
    min_e = std::min(min_e, p.easting);
    max_e = std::max(max_e, p.easting);
    min_n = std::min(min_n, p.northing);
    max_n = std::max(max_n, p.northing);
  }
  return (max_e - min_e) * (max_n - min_n);
}

}  // namespace emiace
