#include "emiace/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "emiace/alarms.hpp"
#include "emiace/errors.hpp"
#include "emiace/io.hpp"
#include "emiace/lane_sim.hpp"
#include "emiace/preprocess.hpp"

namespace fs = std::filesystem;

namespace emiace {

namespace {

double parse_config_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" +
                                value + "'");
  }
}

long parse_config_long(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                value + "'");
  }
}

uint64_t parse_config_seed(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': expected a seed, got '" +
                                value + "'");
  }
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  size_t start = 0;
  while (start <= value.size()) {
    const size_t comma = value.find(',', start);
    const std::string item = value.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

template <typename F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (preset.empty() && lane_path.empty()) {
    throw std::invalid_argument("either a preset or a lane path is required");
  }
  if (!preset.empty() && !is_preset(preset)) {
    throw std::invalid_argument("unknown preset '" + preset + "'");
  }
  if (out_dir.empty()) {
    throw std::invalid_argument("output directory must be set");
  }
  if (detectors.empty()) {
    throw std::invalid_argument("at least one detector is required");
  }
  for (const std::string& d : detectors) {
    if (std::find(kKnownDetectors.begin(), kKnownDetectors.end(), d) ==
        kKnownDetectors.end()) {
      throw std::invalid_argument("unknown detector '" + d + "'");
    }
    if (std::count(detectors.begin(), detectors.end(), d) > 1) {
      throw std::invalid_argument("duplicate detector '" + d + "'");
    }
  }
  if (filter_width < 3 || filter_width % 2 == 0) {
    throw std::invalid_argument("filter width must be odd and >= 3");
  }
  WaceConfig wace;
  wace.lambda = lambda;
  wace.init_window = init_window;
  wace.background_threshold = background_threshold;
  wace.update_mode = update_mode;
  wace.ridge = ridge;
  wace.validate();
  if (jomp_offset < 1) {
    throw std::invalid_argument("jomp offset must be >= 1");
  }
  if (jomp_sparsity < 1) {
    throw std::invalid_argument("jomp sparsity must be >= 1");
  }
  GridConfig grid;
  grid.cell_size_m = cell_size_m;
  grid.min_separation_m = alarm_halo_m;
  grid.threshold = alarm_threshold;
  grid.validate();
  MatchConfig match;
  match.hit_halo_m = hit_halo_m;
  match.max_depth_in = max_depth_in;
  match.purpose_filter = purpose_filter;
  match.validate();
}

PipelineConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  PipelineConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "preset") {
      cfg.preset = value;
    } else if (key == "lane") {
      cfg.lane_path = value;
    } else if (key == "truth") {
      cfg.truth_path = value;
    } else if (key == "dict") {
      cfg.dict_path = value;
    } else if (key == "out-dir") {
      cfg.out_dir = value;
    } else if (key == "detectors") {
      cfg.detectors = split_list(value);
    } else if (key == "seed") {
      cfg.seed = parse_config_seed(key, value);
    } else if (key == "filter-width") {
      cfg.filter_width = static_cast<int>(parse_config_long(key, value));
    } else if (key == "lambda") {
      cfg.lambda = parse_config_double(key, value);
    } else if (key == "init-n") {
      cfg.init_window = static_cast<int>(parse_config_long(key, value));
    } else if (key == "bg-threshold") {
      cfg.background_threshold = parse_config_double(key, value);
    } else if (key == "update-mode") {
      cfg.update_mode = parse_update_mode(value);
    } else if (key == "ridge") {
      cfg.ridge = parse_config_double(key, value);
    } else if (key == "offset") {
      cfg.jomp_offset = static_cast<int>(parse_config_long(key, value));
    } else if (key == "sparsity") {
      cfg.jomp_sparsity = static_cast<int>(parse_config_long(key, value));
    } else if (key == "cell") {
      cfg.cell_size_m = parse_config_double(key, value);
    } else if (key == "alarm-halo") {
      cfg.alarm_halo_m = parse_config_double(key, value);
    } else if (key == "alarm-threshold") {
      cfg.alarm_threshold = parse_config_double(key, value);
    } else if (key == "hit-halo") {
      cfg.hit_halo_m = parse_config_double(key, value);
    } else if (key == "max-depth") {
      cfg.max_depth_in = parse_config_double(key, value);
    } else if (key == "purpose") {
      cfg.purpose_filter =
          value.empty() ? std::nullopt : std::optional<Purpose>(parse_purpose(value));
    } else if (key == "far-mode") {
      if (value == "area") {
        cfg.far_mode = FarMode::per_area;
      } else if (value == "lane") {
        cfg.far_mode = FarMode::per_lane;
      } else {
        throw std::invalid_argument("config key 'far-mode': expected area or lane");
      }
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

const ArtifactEntry* Manifest::find(const std::string& path) const {
  for (const ArtifactEntry& a : artifacts) {
    if (a.path == path) return &a;
  }
  return nullptr;
}

void write_manifest(const std::string& path, const Manifest& m) {
  nlohmann::json j;
  j["artifacts"] = nlohmann::json::array();
  for (const ArtifactEntry& a : m.artifacts) {
    j["artifacts"].push_back({{"path", a.path}, {"hash", a.hash}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write manifest '" + path + "'");
  }
  out << j.dump(2) << '\n';
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path, 0, "cannot open manifest");
  }
  Manifest m;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    for (const auto& item : j.at("artifacts")) {
      m.artifacts.push_back(
          ArtifactEntry{item.at("path").get<std::string>(),
                        item.at("hash").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  return m;
}

Manifest run_pipeline(const PipelineConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); });
  const fs::path out_dir = cfg.out_dir;
  run_stage("config", [&] { fs::create_directories(out_dir); });

  std::vector<std::string> artifact_order;
  auto artifact = [&](const std::string& rel) {
    artifact_order.push_back(rel);
    return (out_dir / rel).string();
  };

  const Dictionary dict = run_stage("dict", [&] {
    return cfg.dict_path.empty() ? default_dictionary()
                                 : read_dictionary_csv(cfg.dict_path);
  });

  RawLane lane;
  std::optional<std::vector<GroundTruthEntry>> truth;
  if (!cfg.preset.empty()) {
    run_stage("simulate", [&] {
      Scenario scenario = preset_scenario(cfg.preset);
      scenario.rng_seed = cfg.seed;
      SimResult sim = generate_lane(scenario, dict);
      lane = std::move(sim.lane);
      truth = std::move(sim.truth);
      write_lane_csv(artifact("lane.csv"), lane);
      write_truth_csv(artifact("truth.csv"), *truth);
    });
  } else {
    run_stage("input", [&] {
      lane = read_lane_csv(cfg.lane_path);
      if (!cfg.truth_path.empty()) {
        truth = read_truth_csv(cfg.truth_path);
      }
    });
  }

  RawLane filtered;
  FeaturizedLane featurized;
  run_stage("preprocess", [&] {
    filtered = downtrack_filter(lane, sine_filter_taps(cfg.filter_width));
    featurized = featurize_lane(filtered);
  });

  std::vector<Position> lane_positions;
  lane_positions.reserve(lane.samples.size());
  for (const SweepSample& s : lane.samples) lane_positions.push_back(s.pos);
  const double lane_area =
      cfg.far_mode == FarMode::per_area ? bounding_box_area(lane_positions) : 1.0;

  WaceConfig wace;
  wace.lambda = cfg.lambda;
  wace.init_window = cfg.init_window;
  wace.background_threshold = cfg.background_threshold;
  wace.update_mode = cfg.update_mode;
  wace.ridge = cfg.ridge;

  GridConfig grid_cfg;
  grid_cfg.cell_size_m = cfg.cell_size_m;
  grid_cfg.min_separation_m = cfg.alarm_halo_m;
  grid_cfg.threshold = cfg.alarm_threshold;

  MatchConfig match_cfg;
  match_cfg.hit_halo_m = cfg.hit_halo_m;
  match_cfg.max_depth_in = cfg.max_depth_in;
  match_cfg.purpose_filter = cfg.purpose_filter;

  std::vector<std::string> scored_names;
  std::vector<RocCurve> scored_curves;

  for (const std::string& name : cfg.detectors) {
    ConfidenceTrace trace;
    const std::vector<Position>* positions = &featurized.positions;
    run_stage("detect", [&] {
      if (name == "ace-global") {
        trace = detect_global_ace(featurized.features, dict, cfg.ridge);
      } else if (name == "wace") {
        trace = detect_wace(featurized.features, dict, wace);
      } else if (name == "jomp") {
        trace = detect_jomp(featurized.features, dict, cfg.jomp_offset,
                            cfg.jomp_sparsity);
      } else {
        trace = detect_energy(filtered);
        positions = &lane_positions;
      }
      write_confidence_csv(artifact(name + "_conf.csv"), *positions, trace.values);
    });

    std::vector<Alarm> alarms;
    run_stage("alarms", [&] {
      const ConfidenceGrid grid = rasterize(*positions, trace.values, grid_cfg);
      alarms = extract_alarms(grid, grid_cfg, name);
      write_alarms_csv(artifact(name + "_alarms.csv"), alarms);
      write_grid_pgm(artifact(name + "_map.pgm"), grid);
      artifact_order.push_back(name + "_map.pgm.meta");
      write_grid_csv(artifact(name + "_grid.csv"), grid);
    });

    if (truth) {
      run_stage("score", [&] {
        const MatchResult match = match_alarms(alarms, *truth, match_cfg);
        const RocCurve curve = roc(match, lane_area, cfg.far_mode);
        write_roc_csv(artifact(name + "_roc.csv"), curve);
        scored_names.push_back(name);
        scored_curves.push_back(curve);
      });
    }
  }

  if (truth) {
    run_stage("report", [&] {
      const auto rows = compare_report(scored_names, scored_curves, kDefaultFarGrid);
      write_report_csv(artifact("report.csv"), rows, kDefaultFarGrid);
      std::ofstream txt(out_dir / "report.txt", std::ios::binary);
      if (!txt) {
        throw std::runtime_error("cannot write report.txt");
      }
      txt << render_report_table(rows, kDefaultFarGrid);
      artifact_order.push_back("report.txt");
    });
  }

  Manifest manifest;
  run_stage("manifest", [&] {
    for (const std::string& rel : artifact_order) {
      manifest.artifacts.push_back(
          ArtifactEntry{rel, hash_hex(fnv1a64_file((out_dir / rel).string()))});
    }
    write_manifest((out_dir / "manifest.json").string(), manifest);
  });
  return manifest;
}

double pd_at_far(const RocCurve& curve, double far_limit) {
  double best = 0.0;
  for (const RocPoint& p : curve.points) {
    if (p.far <= far_limit) best = std::max(best, p.pd);
  }
  return best;
}

double roc_auc(const RocCurve& curve, double far_hi) {
  if (curve.points.empty() || !(far_hi >= 0.0)) return 0.0;
  if (far_hi == 0.0) return pd_at_far(curve, 0.0);

  // Monotone envelope breakpoints: max pd at or below each distinct FAR.
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size());
  for (const RocPoint& p : curve.points) pts.emplace_back(p.far, p.pd);
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> env;
  double running = 0.0;
  for (const auto& [far, pd] : pts) {
    running = std::max(running, pd);
    if (!env.empty() && env.back().first == far) {
      env.back().second = running;
    } else {
      env.emplace_back(far, running);
    }
  }

  // Integrate the polyline from 0 to far_hi; flat extension past the ends.
  double area = 0.0;
  double prev_far = 0.0;
  double prev_pd = pd_at_far(curve, 0.0);
  for (const auto& [far, pd] : env) {
    if (far <= 0.0) continue;
    const double seg_end = std::min(far, far_hi);
    if (seg_end > prev_far) {
      // pd varies linearly from prev_pd at prev_far to pd at far
      const double pd_at_end = prev_pd + (pd - prev_pd) * (seg_end - prev_far) /
                                             (far - prev_far);
      area += 0.5 * (prev_pd + pd_at_end) * (seg_end - prev_far);
      prev_far = seg_end;
      prev_pd = pd_at_end;
    } else {
      prev_pd = std::max(prev_pd, pd);
    }
    if (prev_far >= far_hi) break;
  }
  if (prev_far < far_hi) {
    area += prev_pd * (far_hi - prev_far);
  }
  return area / far_hi;
}

double common_far_limit(const std::vector<RocCurve>& curves) {
  double limit = std::numeric_limits<double>::infinity();
  for (const RocCurve& c : curves) {
    double max_far = 0.0;
    for (const RocPoint& p : c.points) max_far = std::max(max_far, p.far);
    limit = std::min(limit, max_far);
  }
  return std::isfinite(limit) ? limit : 0.0;
}

std::vector<ReportRow> compare_report(const std::vector<std::string>& names,
                                      const std::vector<RocCurve>& curves,
                                      const std::vector<double>& far_grid) {
  if (names.size() != curves.size()) {
    throw std::invalid_argument("one name per curve is required");
  }
  if (curves.empty()) {
    throw std::invalid_argument("at least one curve is required");
  }
  const double far_hi = common_far_limit(curves);
  std::vector<ReportRow> rows;
  rows.reserve(curves.size());
  for (size_t i = 0; i < curves.size(); ++i) {
    ReportRow row;
    row.name = names[i];
    row.auc = roc_auc(curves[i], far_hi);
    for (double far : far_grid) {
      row.pd_at.push_back(pd_at_far(curves[i], far));
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.auc != b.auc) return a.auc > b.auc;
    return a.name < b.name;
  });
  return rows;
}

std::vector<ReportRow> compare_report_files(const std::vector<std::string>& paths,
                                            const std::vector<double>& far_grid) {
  if (paths.empty()) {
    throw std::invalid_argument("at least one ROC file is required");
  }
  std::vector<std::string> names;
  std::vector<RocCurve> curves;
  for (const std::string& p : paths) {
    std::string name = fs::path(p).stem().string();
    if (name.size() > 4 && name.ends_with("_roc")) {
      name.resize(name.size() - 4);
    }
    names.push_back(std::move(name));
    curves.push_back(read_roc_csv(p));
  }
  return compare_report(names, curves, far_grid);
}

std::string render_report_table(const std::vector<ReportRow>& rows,
                                const std::vector<double>& far_grid) {
  size_t name_width = 8;
  for (const ReportRow& r : rows) name_width = std::max(name_width, r.name.size());

  std::string out;
  char buf[64];
  auto pad = [&](const std::string& s, size_t width) {
    out += s;
    out.append(width > s.size() ? width - s.size() : 0, ' ');
  };

  pad("detector", name_width + 2);
  pad("auc", 10);
  for (double far : far_grid) {
    pad("pd@" + format_double(far), 12);
  }
  out += '\n';
  for (const ReportRow& r : rows) {
    pad(r.name, name_width + 2);
    std::snprintf(buf, sizeof(buf), "%.4f", r.auc);
    pad(buf, 10);
    for (double pd : r.pd_at) {
      std::snprintf(buf, sizeof(buf), "%.4f", pd);
      pad(buf, 12);
    }
    out += '\n';
  }
  return out;
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows,
                      const std::vector<double>& far_grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write report '" + path + "'");
  }
  out << "detector,auc";
  for (double far : far_grid) out << ",pd_at_" << format_double(far);
  out << '\n';
  for (const ReportRow& r : rows) {
    out << r.name << ',' << format_double(r.auc);
    for (double pd : r.pd_at) out << ',' << format_double(pd);
    out << '\n';
  }
}

}  // namespace emiace
