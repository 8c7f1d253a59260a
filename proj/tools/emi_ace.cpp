#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emiace/alarms.hpp"
#include "emiace/detectors.hpp"
#include "emiace/dsrf.hpp"
#include "emiace/errors.hpp"
#include "emiace/io.hpp"
#include "emiace/lane_sim.hpp"
#include "emiace/pipeline.hpp"
#include "emiace/preprocess.hpp"
#include "emiace/scoring.hpp"

namespace {

using namespace emiace;

uint64_t env_or(uint64_t fallback) {
  const char* env = std::getenv("EMI_ACE_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("EMI_ACE_SEED must be an integer, got '") +
                                env + "'");
  }
}

struct DictArgs {
  int count = 100;
  double zeta_min = 45.0;
  double zeta_max = 670000.0;
  double freq_min = 300.0;
  double freq_max = 90000.0;
  std::string omega = "angular";
  std::string out;
  std::string features_out;
};

struct SimulateArgs {
  std::string preset;
  uint64_t seed = 1;
  std::string out_lane;
  std::string out_truth;
};

struct PreprocessArgs {
  std::string in;
  int filter_width = 9;
  std::string out;
};

struct DetectArgs {
  std::string method;
  std::string in;
  std::string dict;
  double lambda = 0.005;
  int init_n = 200;
  double bg_threshold = 0.5;
  std::string update_mode = "consistent";
  int offset = 5;
  int sparsity = 1;
  double ridge = 1e-6;
  std::string out;
};

struct AlarmsArgs {
  std::string in;
  double halo = 0.5;
  double cell = 0.05;
  double threshold = 0.0;
  std::string label;
  std::string out;
  std::string pgm;
  std::string grid_csv;
};

struct ScoreArgs {
  std::string alarms;
  std::string truth;
  double hit_halo = 0.25;
  double max_depth = 8.0;
  std::string purpose;
  std::string lane;
  double area = 0.0;
  std::string far_mode = "area";
  std::string out;
};

struct RunArgs {
  std::string config;
  std::string preset;
  std::string lane;
  std::string truth;
  std::string dict;
  std::string out_dir = "out";
  std::string detectors;
  uint64_t seed = 1;
  int filter_width = 9;
  double lambda = 0.005;
  int init_n = 200;
  double bg_threshold = 0.5;
  std::string update_mode = "consistent";
  int offset = 5;
  int sparsity = 1;
  double ridge = 1e-6;
  double cell = 0.05;
  double alarm_halo = 0.5;
  double alarm_threshold = 0.0;
  double hit_halo = 0.25;
  double max_depth = 8.0;
  std::string purpose;
  std::string far_mode = "area";
};

struct ReportArgs {
  std::vector<std::string> in;
  std::string out;
};

OmegaConvention parse_omega(const std::string& s) {
  if (s == "angular") return OmegaConvention::angular;
  if (s == "plain") return OmegaConvention::plain;
  throw std::invalid_argument("omega convention must be angular or plain");
}

FarMode parse_far_mode(const std::string& s) {
  if (s == "area") return FarMode::per_area;
  if (s == "lane") return FarMode::per_lane;
  throw std::invalid_argument("far mode must be area or lane");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wideband EMI buried-object detection toolkit"};
  app.require_subcommand(1);

  DictArgs dict_args;
  auto* dict_cmd = app.add_subcommand("dict", "Build the relaxation-frequency dictionary");
  dict_cmd->add_option("--count", dict_args.count, "Number of atoms");
  dict_cmd->add_option("--zeta-min", dict_args.zeta_min, "Lowest relaxation frequency (Hz)");
  dict_cmd->add_option("--zeta-max", dict_args.zeta_max, "Highest relaxation frequency (Hz)");
  dict_cmd->add_option("--freq-min", dict_args.freq_min, "Lowest operating frequency (Hz)");
  dict_cmd->add_option("--freq-max", dict_args.freq_max, "Highest operating frequency (Hz)");
  dict_cmd->add_option("--omega-convention", dict_args.omega, "angular or plain");
  dict_cmd->add_option("--out", dict_args.out, "Dictionary CSV path")->required();
  dict_cmd->add_option("--features-out", dict_args.features_out,
                       "Normalized feature CSV path");
  dict_cmd->callback([&] {
    const Dictionary dict = build_dictionary(
        log_spaced(kNumFreqs, dict_args.freq_min, dict_args.freq_max), dict_args.count,
        dict_args.zeta_min, dict_args.zeta_max, parse_omega(dict_args.omega));
    write_dictionary_csv(dict_args.out, dict);
    if (!dict_args.features_out.empty()) {
      write_dictionary_features_csv(dict_args.features_out, dict);
    }
    std::cout << "wrote " << dict.atoms.size() << " atoms to " << dict_args.out << '\n';
  });

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic lane");
  sim_cmd->add_option("--preset", sim_args.preset, "Scenario preset name")->required();
  auto* sim_seed = sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
  sim_cmd->add_option("--out-lane", sim_args.out_lane, "Lane CSV path")->required();
  sim_cmd->add_option("--out-truth", sim_args.out_truth, "Truth CSV path")->required();
  sim_cmd->callback([&] {
    Scenario scenario = preset_scenario(sim_args.preset);
    scenario.rng_seed = sim_seed->count() ? sim_args.seed : env_or(scenario.rng_seed);
    const SimResult sim = generate_lane(scenario, default_dictionary());
    write_lane_csv(sim_args.out_lane, sim.lane);
    write_truth_csv(sim_args.out_truth, sim.truth);
    std::cout << "wrote " << sim.lane.samples.size() << " samples and "
              << sim.truth.size() << " truth entries\n";
  });

  PreprocessArgs pre_args;
  auto* pre_cmd = app.add_subcommand("preprocess", "Down-track filter a lane");
  pre_cmd->add_option("--in", pre_args.in, "Lane CSV path")->required();
  pre_cmd->add_option("--filter-width", pre_args.filter_width, "Sine filter width (odd)");
  pre_cmd->add_option("--out", pre_args.out, "Filtered lane CSV path")->required();
  pre_cmd->callback([&] {
    const RawLane lane = read_lane_csv(pre_args.in);
    write_lane_csv(pre_args.out,
                   downtrack_filter(lane, sine_filter_taps(pre_args.filter_width)));
    std::cout << "wrote " << pre_args.out << '\n';
  });

  DetectArgs det_args;
  auto* det_cmd = app.add_subcommand("detect", "Score a filtered lane");
  det_cmd->add_option("--method", det_args.method, "ace-global, wace, jomp, or energy")
      ->required();
  det_cmd->add_option("--in", det_args.in, "Filtered lane CSV path")->required();
  det_cmd->add_option("--dict", det_args.dict, "Dictionary CSV (default: built in)");
  det_cmd->add_option("--lambda", det_args.lambda, "Update weight");
  det_cmd->add_option("--init-n", det_args.init_n, "Initialization window");
  det_cmd->add_option("--bg-threshold", det_args.bg_threshold, "Background gate");
  det_cmd->add_option("--update-mode", det_args.update_mode, "consistent or literal");
  det_cmd->add_option("--offset", det_args.offset, "JOMP flank offset (samples)");
  det_cmd->add_option("--sparsity", det_args.sparsity, "OMP sparsity");
  det_cmd->add_option("--ridge", det_args.ridge, "Covariance ridge");
  det_cmd->add_option("--out", det_args.out, "Confidence CSV path")->required();
  det_cmd->callback([&] {
    const RawLane lane = read_lane_csv(det_args.in);
    ConfidenceTrace trace;
    if (det_args.method == "energy") {
      trace = detect_energy(lane);
      std::vector<Position> positions;
      for (const SweepSample& s : lane.samples) positions.push_back(s.pos);
      write_confidence_csv(det_args.out, positions, trace.values);
    } else {
      const Dictionary dict = det_args.dict.empty() ? default_dictionary()
                                                    : read_dictionary_csv(det_args.dict);
      const FeaturizedLane feat = featurize_lane(lane);
      if (det_args.method == "ace-global") {
        trace = detect_global_ace(feat.features, dict, det_args.ridge);
      } else if (det_args.method == "wace") {
        WaceConfig cfg;
        cfg.lambda = det_args.lambda;
        cfg.init_window = det_args.init_n;
        cfg.background_threshold = det_args.bg_threshold;
        cfg.update_mode = parse_update_mode(det_args.update_mode);
        cfg.ridge = det_args.ridge;
        trace = detect_wace(feat.features, dict, cfg);
      } else if (det_args.method == "jomp") {
        trace = detect_jomp(feat.features, dict, det_args.offset, det_args.sparsity);
      } else {
        throw std::invalid_argument("unknown method '" + det_args.method + "'");
      }
      write_confidence_csv(det_args.out, feat.positions, trace.values);
    }
    std::cout << "wrote " << det_args.out << '\n';
  });

  AlarmsArgs alarm_args;
  auto* alarm_cmd = app.add_subcommand("alarms", "Cluster confidences into alarms");
  alarm_cmd->add_option("--in", alarm_args.in, "Confidence CSV path")->required();
  alarm_cmd->add_option("--halo", alarm_args.halo, "Suppression halo (m)");
  alarm_cmd->add_option("--cell", alarm_args.cell, "Grid cell size (m)");
  alarm_cmd->add_option("--threshold", alarm_args.threshold, "Minimum confidence");
  alarm_cmd->add_option("--label", alarm_args.label, "Label column value");
  alarm_cmd->add_option("--out", alarm_args.out, "Alarm CSV path")->required();
  alarm_cmd->add_option("--pgm", alarm_args.pgm, "Confidence map PGM path");
  alarm_cmd->add_option("--grid-csv", alarm_args.grid_csv, "Confidence grid CSV path");
  alarm_cmd->callback([&] {
    const auto [positions, confidences] = read_confidence_csv(alarm_args.in);
    GridConfig cfg;
    cfg.cell_size_m = alarm_args.cell;
    cfg.min_separation_m = alarm_args.halo;
    cfg.threshold = alarm_args.threshold;
    std::string label = alarm_args.label;
    if (label.empty()) {
      label = std::filesystem::path(alarm_args.in).stem().string();
      if (label.size() > 5 && label.ends_with("_conf")) label.resize(label.size() - 5);
    }
    const ConfidenceGrid grid = rasterize(positions, confidences, cfg);
    const std::vector<Alarm> alarms = extract_alarms(grid, cfg, label);
    write_alarms_csv(alarm_args.out, alarms);
    if (!alarm_args.pgm.empty()) write_grid_pgm(alarm_args.pgm, grid);
    if (!alarm_args.grid_csv.empty()) write_grid_csv(alarm_args.grid_csv, grid);
    std::cout << "wrote " << alarms.size() << " alarms to " << alarm_args.out << '\n';
  });

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "Score alarms against ground truth");
  score_cmd->add_option("--alarms", score_args.alarms, "Alarm CSV path")->required();
  score_cmd->add_option("--truth", score_args.truth, "Truth CSV path")->required();
  score_cmd->add_option("--hit-halo", score_args.hit_halo, "Hit credit halo (m)");
  score_cmd->add_option("--max-depth", score_args.max_depth, "Depth cutoff (in)");
  score_cmd->add_option("--purpose", score_args.purpose, "Score only this purpose");
  score_cmd->add_option("--lane", score_args.lane, "Lane CSV for the area convention");
  auto* area_opt = score_cmd->add_option("--area", score_args.area, "Lane area (m^2)");
  score_cmd->add_option("--far-mode", score_args.far_mode, "area or lane");
  score_cmd->add_option("--out", score_args.out, "ROC CSV path")->required();
  score_cmd->callback([&] {
    const std::vector<Alarm> alarms = read_alarms_csv(score_args.alarms);
    const std::vector<GroundTruthEntry> truth = read_truth_csv(score_args.truth);
    MatchConfig cfg;
    cfg.hit_halo_m = score_args.hit_halo;
    cfg.max_depth_in = score_args.max_depth;
    if (!score_args.purpose.empty()) cfg.purpose_filter = parse_purpose(score_args.purpose);

    const FarMode mode = parse_far_mode(score_args.far_mode);
    double area = 1.0;
    if (mode == FarMode::per_area) {
      if (area_opt->count()) {
        area = score_args.area;
      } else if (!score_args.lane.empty()) {
        const RawLane lane = read_lane_csv(score_args.lane);
        std::vector<Position> positions;
        for (const SweepSample& s : lane.samples) positions.push_back(s.pos);
        area = bounding_box_area(positions);
      } else {
        std::vector<Position> positions;
        for (const Alarm& a : alarms) positions.push_back(a.pos);
        for (const GroundTruthEntry& t : truth) positions.push_back(t.pos);
        area = bounding_box_area(positions);
        std::cerr << "warning: no --lane or --area given; using the bounding box of "
                     "alarms and truth ("
                  << format_double(area) << " m^2)\n";
      }
    }

    const MatchResult match = match_alarms(alarms, truth, cfg);
    write_roc_csv(score_args.out, roc(match, area, mode));

    int hits = 0, fas = 0, ignored = 0;
    for (const LabeledAlarm& a : match.alarms) {
      if (a.label == AlarmLabel::HIT) ++hits;
      if (a.label == AlarmLabel::FALSE_ALARM) ++fas;
      if (a.label == AlarmLabel::IGNORED) ++ignored;
    }
    std::cout << hits << " hits, " << fas << " false alarms, " << ignored
              << " ignored over " << match.scorable_targets << " scorable targets\n";
  });

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline");
  run_cmd->add_option("--config", run_args.config, "key=value config file");
  auto* o_preset = run_cmd->add_option("--preset", run_args.preset, "Scenario preset");
  auto* o_lane = run_cmd->add_option("--lane", run_args.lane, "Lane CSV input");
  auto* o_truth = run_cmd->add_option("--truth", run_args.truth, "Truth CSV input");
  auto* o_dict = run_cmd->add_option("--dict", run_args.dict, "Dictionary CSV input");
  auto* o_out = run_cmd->add_option("--out-dir", run_args.out_dir, "Artifact directory");
  auto* o_methods =
      run_cmd->add_option("--detectors", run_args.detectors, "Comma-separated detectors");
  auto* o_seed = run_cmd->add_option("--seed", run_args.seed, "Random seed");
  auto* o_fw = run_cmd->add_option("--filter-width", run_args.filter_width, "Filter width");
  auto* o_lambda = run_cmd->add_option("--lambda", run_args.lambda, "Update weight");
  auto* o_initn = run_cmd->add_option("--init-n", run_args.init_n, "Init window");
  auto* o_bgt =
      run_cmd->add_option("--bg-threshold", run_args.bg_threshold, "Background gate");
  auto* o_um =
      run_cmd->add_option("--update-mode", run_args.update_mode, "consistent or literal");
  auto* o_off = run_cmd->add_option("--offset", run_args.offset, "JOMP offset");
  auto* o_sp = run_cmd->add_option("--sparsity", run_args.sparsity, "OMP sparsity");
  auto* o_ridge = run_cmd->add_option("--ridge", run_args.ridge, "Covariance ridge");
  auto* o_cell = run_cmd->add_option("--cell", run_args.cell, "Grid cell size (m)");
  auto* o_ah = run_cmd->add_option("--alarm-halo", run_args.alarm_halo, "Alarm halo (m)");
  auto* o_at = run_cmd->add_option("--alarm-threshold", run_args.alarm_threshold,
                                   "Alarm threshold");
  auto* o_hh = run_cmd->add_option("--hit-halo", run_args.hit_halo, "Hit halo (m)");
  auto* o_md = run_cmd->add_option("--max-depth", run_args.max_depth, "Depth cutoff (in)");
  auto* o_purpose = run_cmd->add_option("--purpose", run_args.purpose, "Purpose filter");
  auto* o_fm = run_cmd->add_option("--far-mode", run_args.far_mode, "area or lane");
  run_cmd->callback([&] {
    PipelineConfig cfg;
    if (!run_args.config.empty()) {
      cfg = config_from_kv(read_config_kv(run_args.config));
    }
    if (o_preset->count()) cfg.preset = run_args.preset;
    if (o_lane->count()) cfg.lane_path = run_args.lane;
    if (o_truth->count()) cfg.truth_path = run_args.truth;
    if (o_dict->count()) cfg.dict_path = run_args.dict;
    if (o_out->count()) cfg.out_dir = run_args.out_dir;
    if (o_methods->count()) {
      cfg.detectors.clear();
      std::string item;
      for (char c : run_args.detectors + ",") {
        if (c == ',') {
          if (!item.empty()) cfg.detectors.push_back(item);
          item.clear();
        } else {
          item += c;
        }
      }
    }
    cfg.seed = o_seed->count() ? run_args.seed : env_or(cfg.seed);
    if (o_fw->count()) cfg.filter_width = run_args.filter_width;
    if (o_lambda->count()) cfg.lambda = run_args.lambda;
    if (o_initn->count()) cfg.init_window = run_args.init_n;
    if (o_bgt->count()) cfg.background_threshold = run_args.bg_threshold;
    if (o_um->count()) cfg.update_mode = parse_update_mode(run_args.update_mode);
    if (o_off->count()) cfg.jomp_offset = run_args.offset;
    if (o_sp->count()) cfg.jomp_sparsity = run_args.sparsity;
    if (o_ridge->count()) cfg.ridge = run_args.ridge;
    if (o_cell->count()) cfg.cell_size_m = run_args.cell;
    if (o_ah->count()) cfg.alarm_halo_m = run_args.alarm_halo;
    if (o_at->count()) cfg.alarm_threshold = run_args.alarm_threshold;
    if (o_hh->count()) cfg.hit_halo_m = run_args.hit_halo;
    if (o_md->count()) cfg.max_depth_in = run_args.max_depth;
    if (o_purpose->count()) {
      cfg.purpose_filter = run_args.purpose.empty()
                               ? std::nullopt
                               : std::optional<Purpose>(parse_purpose(run_args.purpose));
    }
    if (o_fm->count()) cfg.far_mode = parse_far_mode(run_args.far_mode);

    const Manifest manifest = run_pipeline(cfg);
    std::cout << "wrote " << manifest.artifacts.size() << " artifacts to "
              << cfg.out_dir << '\n';
    const std::filesystem::path report = std::filesystem::path(cfg.out_dir) / "report.txt";
    if (std::filesystem::exists(report)) {
      std::ifstream in(report);
      std::cout << in.rdbuf();
    }
  });

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Compare detector ROC curves");
  report_cmd->add_option("--in", report_args.in, "ROC CSV paths")
      ->required()
      ->expected(1, -1);
  report_cmd->add_option("--out", report_args.out, "Summary CSV path");
  report_cmd->callback([&] {
    const auto rows = compare_report_files(report_args.in, kDefaultFarGrid);
    if (!report_args.out.empty()) {
      write_report_csv(report_args.out, rows, kDefaultFarGrid);
    }
    std::cout << render_report_table(rows, kDefaultFarGrid);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
