#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "emiace/detectors.hpp"
#include "emiace/errors.hpp"
#include "emiace/io.hpp"
#include "emiace/pipeline.hpp"
#include "emiace/preprocess.hpp"

using namespace emiace;

namespace {

std::filesystem::path temp_root() {
  static const std::filesystem::path dir = [] {
    const auto d =
        std::filesystem::temp_directory_path() / "emiace-pipeline-tests";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string temp_path(const std::string& name) {
  return (temp_root() / name).string();
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

RocCurve make_curve(std::vector<RocPoint> points) {
  RocCurve c;
  c.points = std::move(points);
  return c;
}

}  // namespace

TEST_CASE("config_from_kv defaults and full key coverage") {
  const PipelineConfig def = config_from_kv({});
  CHECK(def.preset.empty());
  CHECK(def.out_dir == "out");
  CHECK(def.detectors == kKnownDetectors);
  CHECK(def.seed == 1);
  CHECK(def.filter_width == 9);
  CHECK(def.lambda == 0.005);
  CHECK(def.init_window == 200);
  CHECK(def.background_threshold == 0.5);
  CHECK(def.update_mode == UpdateMode::consistent);
  CHECK(def.jomp_offset == 5);
  CHECK(def.jomp_sparsity == 1);
  CHECK(def.cell_size_m == 0.05);
  CHECK(def.alarm_halo_m == 0.5);
  CHECK(def.alarm_threshold == 0.0);
  CHECK(def.hit_halo_m == 0.25);
  CHECK(def.max_depth_in == 8.0);
  CHECK_FALSE(def.purpose_filter.has_value());
  CHECK(def.far_mode == FarMode::per_area);

  const PipelineConfig cfg = config_from_kv({
      {"preset", "easy"},
      {"lane", "x.csv"},
      {"truth", "t.csv"},
      {"dict", "d.csv"},
      {"out-dir", "run1"},
      {"detectors", "wace,energy"},
      {"seed", "42"},
      {"filter-width", "13"},
      {"lambda", "0.01"},
      {"init-n", "100"},
      {"bg-threshold", "0.25"},
      {"update-mode", "literal"},
      {"ridge", "0.001"},
      {"offset", "7"},
      {"sparsity", "2"},
      {"cell", "0.1"},
      {"alarm-halo", "0.75"},
      {"alarm-threshold", "0.3"},
      {"hit-halo", "0.5"},
      {"max-depth", "10"},
      {"purpose", "AP"},
      {"far-mode", "lane"},
  });
  CHECK(cfg.preset == "easy");
  CHECK(cfg.lane_path == "x.csv");
  CHECK(cfg.truth_path == "t.csv");
  CHECK(cfg.dict_path == "d.csv");
  CHECK(cfg.out_dir == "run1");
  CHECK(cfg.detectors == std::vector<std::string>{"wace", "energy"});
  CHECK(cfg.seed == 42);
  CHECK(cfg.filter_width == 13);
  CHECK(cfg.lambda == 0.01);
  CHECK(cfg.init_window == 100);
  CHECK(cfg.background_threshold == 0.25);
  CHECK(cfg.update_mode == UpdateMode::literal);
  CHECK(cfg.ridge == 0.001);
  CHECK(cfg.jomp_offset == 7);
  CHECK(cfg.jomp_sparsity == 2);
  CHECK(cfg.cell_size_m == 0.1);
  CHECK(cfg.alarm_halo_m == 0.75);
  CHECK(cfg.alarm_threshold == 0.3);
  CHECK(cfg.hit_halo_m == 0.5);
  CHECK(cfg.max_depth_in == 10.0);
  REQUIRE(cfg.purpose_filter.has_value());
  CHECK(*cfg.purpose_filter == Purpose::AP);
  CHECK(cfg.far_mode == FarMode::per_lane);

  CHECK_FALSE(config_from_kv({{"purpose", ""}}).purpose_filter.has_value());
}

TEST_CASE("config_from_kv rejects unknown keys and bad values by name") {
  try {
    config_from_kv({{"lambada", "0.1"}});
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("lambada") != std::string::npos);
  }
  try {
    config_from_kv({{"lambda", "abc"}});
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_kv({{"seed", "12x"}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_kv({{"far-mode", "both"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_kv({{"update-mode", "fast"}}),
                  std::invalid_argument);
}

TEST_CASE("PipelineConfig validation") {
  PipelineConfig cfg;
  cfg.preset = "easy";
  CHECK_NOTHROW(cfg.validate());

  PipelineConfig bad;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // no input

  bad = cfg;
  bad.preset = "lane9";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.detectors = {"ace-global", "sonar"};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.detectors = {"wace", "wace"};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.detectors.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.filter_width = 8;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.filter_width = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.jomp_offset = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.alarm_threshold = -0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.out_dir.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // lane input without a preset is the other valid entry path
  PipelineConfig lane_cfg;
  lane_cfg.lane_path = "some.csv";
  CHECK_NOTHROW(lane_cfg.validate());
}

TEST_CASE("run_pipeline writes the full artifact set with valid hashes") {
  PipelineConfig cfg;
  cfg.preset = "easy";
  cfg.out_dir = temp_path("full_run");
  const Manifest manifest = run_pipeline(cfg);

  // lane + truth, six files per detector, report pair.
  CHECK(manifest.artifacts.size() == 28);
  CHECK(manifest.find("lane.csv") != nullptr);
  CHECK(manifest.find("truth.csv") != nullptr);
  for (const std::string& det : kKnownDetectors) {
    for (const std::string suffix :
         {"_conf.csv", "_alarms.csv", "_map.pgm", "_map.pgm.meta", "_grid.csv",
          "_roc.csv"}) {
      CHECK(manifest.find(det + suffix) != nullptr);
    }
  }
  CHECK(manifest.find("report.csv") != nullptr);
  CHECK(manifest.find("report.txt") != nullptr);
  // The manifest cannot contain its own hash.
  CHECK(manifest.find("manifest.json") == nullptr);

  for (const ArtifactEntry& a : manifest.artifacts) {
    const std::string full = cfg.out_dir + "/" + a.path;
    REQUIRE(std::filesystem::exists(full));
    CHECK(hash_hex(fnv1a64_file(full)) == a.hash);
  }

  const Manifest reread =
      read_manifest(cfg.out_dir + "/manifest.json");
  REQUIRE(reread.artifacts.size() == manifest.artifacts.size());
  for (size_t i = 0; i < manifest.artifacts.size(); ++i) {
    CHECK(reread.artifacts[i].path == manifest.artifacts[i].path);
    CHECK(reread.artifacts[i].hash == manifest.artifacts[i].hash);
  }
}

TEST_CASE("run_pipeline is reproducible across output directories") {
  PipelineConfig cfg;
  cfg.preset = "easy";
  cfg.seed = 3;
  cfg.out_dir = temp_path("repro_a");
  const Manifest a = run_pipeline(cfg);
  cfg.out_dir = temp_path("repro_b");
  const Manifest b = run_pipeline(cfg);

  REQUIRE(a.artifacts.size() == b.artifacts.size());
  for (size_t i = 0; i < a.artifacts.size(); ++i) {
    CHECK(a.artifacts[i].path == b.artifacts[i].path);
    CHECK(a.artifacts[i].hash == b.artifacts[i].hash);
  }
}

TEST_CASE("pipeline confidences equal the staged library composition") {
  PipelineConfig cfg;
  cfg.preset = "easy";
  cfg.out_dir = temp_path("staged");
  run_pipeline(cfg);

  // Rebuild the ace-global confidence file from the published lane alone.
  const RawLane lane = read_lane_csv(cfg.out_dir + "/lane.csv");
  const RawLane filtered =
      downtrack_filter(lane, sine_filter_taps(cfg.filter_width));
  const FeaturizedLane feats = featurize_lane(filtered);
  const ConfidenceTrace trace =
      detect_global_ace(feats.features, default_dictionary(), cfg.ridge);
  const std::string rebuilt = temp_path("staged_conf.csv");
  write_confidence_csv(rebuilt, feats.positions, trace.values);

  CHECK(read_bytes(rebuilt) == read_bytes(cfg.out_dir + "/ace-global_conf.csv"));
}

TEST_CASE("run_pipeline tags failures with the stage name") {
  PipelineConfig cfg;
  cfg.preset = "easy";
  cfg.out_dir = temp_path("stage_dict");
  cfg.dict_path = temp_path("missing_dict.csv");
  try {
    run_pipeline(cfg);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "dict");
  }

  PipelineConfig lane_cfg;
  lane_cfg.lane_path = temp_path("missing_lane.csv");
  lane_cfg.out_dir = temp_path("stage_input");
  try {
    run_pipeline(lane_cfg);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "input");
  }

  PipelineConfig bad;
  bad.out_dir = temp_path("stage_config");
  try {
    run_pipeline(bad);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "config");
  }
}

TEST_CASE("pd_at_far takes the envelope at the limit") {
  const RocCurve curve = make_curve({{0.9, 0.5, 0.0}, {0.5, 1.0, 0.03}});
  CHECK(pd_at_far(curve, 0.0) == 0.5);
  CHECK(pd_at_far(curve, 0.02) == 0.5);
  CHECK(pd_at_far(curve, 0.03) == 1.0);
  CHECK(pd_at_far(curve, 1.0) == 1.0);
  CHECK(pd_at_far(RocCurve{}, 1.0) == 0.0);
}

TEST_CASE("roc_auc integrates the monotone envelope") {
  const RocCurve curve = make_curve({{0.9, 0.5, 0.0}, {0.5, 1.0, 0.1}});
  CHECK(roc_auc(curve, 0.1) == doctest::Approx(0.75).epsilon(1e-12));
  // Flat extension past the last point.
  CHECK(roc_auc(curve, 0.2) == doctest::Approx(0.875).epsilon(1e-12));
  // Degenerate range: envelope pd at zero FAR.
  CHECK(roc_auc(curve, 0.0) == 0.5);

  const RocCurve perfect = make_curve(
      {{0.9, 1.0, 0.0},
       {-std::numeric_limits<double>::infinity(), 1.0, 0.0}});
  for (double far_hi : {0.01, 0.05, 1.0}) {
    CHECK(roc_auc(perfect, far_hi) == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK(roc_auc(RocCurve{}, 0.1) == 0.0);
  CHECK(roc_auc(curve, -1.0) == 0.0);
}

TEST_CASE("common_far_limit is the smallest curve maximum") {
  const std::vector<RocCurve> curves = {
      make_curve({{0.9, 0.5, 0.0}, {0.1, 1.0, 0.5}}),
      make_curve({{0.8, 0.4, 0.02}, {0.2, 0.9, 0.1}}),
      make_curve({{0.7, 1.0, 0.2}})};
  CHECK(common_far_limit(curves) == 0.1);
  CHECK(common_far_limit({}) == 0.0);
  CHECK(common_far_limit({RocCurve{}}) == 0.0);
}

TEST_CASE("compare_report sorts by AUC then name") {
  const RocCurve perfect = make_curve({{0.9, 1.0, 0.0}});
  const RocCurve weak = make_curve({{0.9, 0.2, 0.0}, {0.5, 1.0, 0.4}});
  const auto rows =
      compare_report({"zeta", "alpha", "mid"}, {perfect, perfect, weak});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].name == "alpha");  // AUC tie resolves alphabetically
  CHECK(rows[1].name == "zeta");
  CHECK(rows[2].name == "mid");
  CHECK(rows[0].auc == doctest::Approx(1.0));
  CHECK(rows[2].auc < rows[1].auc);
  for (const ReportRow& r : rows) {
    CHECK(r.pd_at.size() == kDefaultFarGrid.size());
  }

  CHECK_THROWS_AS(compare_report({"a"}, {}), std::invalid_argument);
  CHECK_THROWS_AS(compare_report({}, {}), std::invalid_argument);
}

TEST_CASE("compare_report_files strips the _roc suffix") {
  const RocCurve perfect = make_curve({{0.9, 1.0, 0.0}});
  const RocCurve weak = make_curve({{0.9, 0.0, 0.0}, {0.5, 1.0, 0.2}});
  const std::string p1 = temp_path("alpha_roc.csv");
  const std::string p2 = temp_path("beta.csv");
  write_roc_csv(p1, perfect);
  write_roc_csv(p2, weak);

  const auto rows = compare_report_files({p1, p2});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].name == "alpha");
  CHECK(rows[1].name == "beta");
  CHECK(rows[0].auc > rows[1].auc);
}

TEST_CASE("report renderers carry the far grid and values") {
  const RocCurve perfect = make_curve({{0.9, 1.0, 0.0}});
  const auto rows = compare_report({"ace-global"}, {perfect});

  const std::string table = render_report_table(rows);
  CHECK(table.find("detector") != std::string::npos);
  CHECK(table.find("auc") != std::string::npos);
  CHECK(table.find("pd@0.05") != std::string::npos);
  CHECK(table.find("ace-global") != std::string::npos);
  CHECK(table.find("1.0000") != std::string::npos);

  const std::string path = temp_path("report_out.csv");
  write_report_csv(path, rows);
  const std::string csv = read_bytes(path);
  CHECK(csv.find("detector,auc,pd_at_0.01,pd_at_0.02,pd_at_0.05,pd_at_0.1,"
                 "pd_at_0.2\n") == 0);
  CHECK(csv.find("ace-global,1,1,1,1,1,1\n") != std::string::npos);
}

TEST_CASE("manifest round trip and lookup") {
  Manifest m;
  m.artifacts.push_back({"a.csv", "0123456789abcdef"});
  m.artifacts.push_back({"b/c.pgm", "fedcba9876543210"});
  const std::string path = temp_path("manifest_rt.json");
  write_manifest(path, m);
  const Manifest back = read_manifest(path);
  REQUIRE(back.artifacts.size() == 2);
  CHECK(back.artifacts[0].path == "a.csv");
  CHECK(back.artifacts[1].hash == "fedcba9876543210");
  CHECK(back.find("b/c.pgm") != nullptr);
  CHECK(back.find("nope") == nullptr);

  CHECK_THROWS_AS(read_manifest(temp_path("no_manifest.json")), ParseError);
  const std::string garbage = temp_path("garbage.json");
  {
    std::ofstream out(garbage, std::ios::binary);
    out << "{not json";
  }
  CHECK_THROWS_AS(read_manifest(garbage), ParseError);
}
