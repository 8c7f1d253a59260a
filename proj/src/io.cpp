#include "emiace/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "emiace/errors.hpp"
#include "emiace/preprocess.hpp"

namespace emiace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& file, int line) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(file, static_cast<size_t>(line), "expected a number, got '" + token + "'");
  }
  return value;
}

long parse_long(const std::string& token, const std::string& file, int line) {
  long value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(file, static_cast<size_t>(line), "expected an integer, got '" + token + "'");
  }
  return value;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string chomp(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path, 0, "cannot open file");
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file '" + path + "'");
  }
  return out;
}

std::string response_header() {
  std::string h;
  for (int i = 1; i <= kNumFreqs; ++i) h += ",re_" + std::to_string(i);
  for (int i = 1; i <= kNumFreqs; ++i) h += ",im_" + std::to_string(i);
  return h;
}

void expect_header(std::ifstream& in, const std::string& path,
                   const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path, 1, "missing header row");
  }
  line = chomp(line);
  if (line != expected) {
    throw ParseError(path, 1, "expected header '" + expected + "'");
  }
}

std::vector<Complex> parse_response(const std::vector<std::string>& fields,
                                    size_t first, const std::string& path,
                                    int line_no) {
  std::vector<Complex> response(kNumFreqs);
  for (int f = 0; f < kNumFreqs; ++f) {
    const double re = parse_double(fields[first + static_cast<size_t>(f)], path, line_no);
    const double im =
        parse_double(fields[first + static_cast<size_t>(kNumFreqs + f)], path, line_no);
    response[static_cast<size_t>(f)] = Complex(re, im);
  }
  return response;
}

void write_response(std::ofstream& out, const std::vector<Complex>& response) {
  for (const Complex& c : response) out << ',' << format_double(c.real());
  for (const Complex& c : response) out << ',' << format_double(c.imag());
}

}  // namespace

RawLane read_lane_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  expect_header(in, path, "easting,northing" + response_header());

  RawLane lane;
  lane.lane_id = std::filesystem::path(path).stem().string();
  lane.operating_freqs_hz = default_operating_freqs();

  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2 + static_cast<size_t>(kFeatureDim)) {
      throw ParseError(path, static_cast<size_t>(line_no), "expected 44 fields");
    }
    SweepSample sample;
    sample.pos.easting = parse_double(fields[0], path, line_no);
    sample.pos.northing = parse_double(fields[1], path, line_no);
    sample.response = parse_response(fields, 2, path, line_no);
    lane.samples.push_back(std::move(sample));
  }
  return lane;
}

void write_lane_csv(const std::string& path, const RawLane& lane) {
  std::ofstream out = open_output(path);
  out << "easting,northing" << response_header() << '\n';
  for (const SweepSample& s : lane.samples) {
    out << format_double(s.pos.easting) << ',' << format_double(s.pos.northing);
    write_response(out, s.response);
    out << '\n';
  }
}

Dictionary read_dictionary_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  expect_header(in, path, "atom_id,zeta_hz" + response_header());

  Dictionary dict;
  dict.operating_freqs_hz = default_operating_freqs();
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2 + static_cast<size_t>(kFeatureDim)) {
      throw ParseError(path, static_cast<size_t>(line_no), "expected 44 fields");
    }
    DictionaryAtom atom;
    atom.id = static_cast<int>(parse_long(fields[0], path, line_no));
    atom.relaxation_freq_hz = parse_double(fields[1], path, line_no);
    atom.raw_response = parse_response(fields, 2, path, line_no);
    dict.atoms.push_back(std::move(atom));
  }
  return normalize_dictionary(std::move(dict));
}

void write_dictionary_csv(const std::string& path, const Dictionary& dict) {
  std::ofstream out = open_output(path);
  out << "atom_id,zeta_hz" << response_header() << '\n';
  for (const DictionaryAtom& atom : dict.atoms) {
    out << atom.id << ',' << format_double(atom.relaxation_freq_hz);
    write_response(out, atom.raw_response);
    out << '\n';
  }
}

void write_dictionary_features_csv(const std::string& path, const Dictionary& dict) {
  std::ofstream out = open_output(path);
  out << "atom_id";
  for (int i = 1; i <= kFeatureDim; ++i) out << ",f_" << i;
  out << '\n';
  for (const DictionaryAtom& atom : dict.atoms) {
    out << atom.id;
    for (Eigen::Index i = 0; i < atom.feature.values.size(); ++i) {
      out << ',' << format_double(atom.feature.values[i]);
    }
    out << '\n';
  }
}

void write_confidence_csv(const std::string& path,
                          const std::vector<Position>& positions,
                          const std::vector<double>& confidences) {
  if (positions.size() != confidences.size()) {
    throw std::invalid_argument("positions and confidences differ in length");
  }
  std::ofstream out = open_output(path);
  out << "easting,northing,confidence\n";
  for (size_t i = 0; i < positions.size(); ++i) {
    out << format_double(positions[i].easting) << ','
        << format_double(positions[i].northing) << ','
        << format_double(confidences[i]) << '\n';
  }
}

std::pair<std::vector<Position>, std::vector<double>> read_confidence_csv(
    const std::string& path) {
  std::ifstream in = open_input(path);
  expect_header(in, path, "easting,northing,confidence");

  std::pair<std::vector<Position>, std::vector<double>> result;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw ParseError(path, static_cast<size_t>(line_no), "expected 3 fields");
    }
    result.first.push_back(Position{parse_double(fields[0], path, line_no),
                                    parse_double(fields[1], path, line_no)});
    result.second.push_back(parse_double(fields[2], path, line_no));
  }
  return result;
}

void write_alarms_csv(const std::string& path, const std::vector<Alarm>& alarms) {
  std::ofstream out = open_output(path);
  out << "easting,northing,confidence,label\n";
  for (const Alarm& a : alarms) {
    out << format_double(a.pos.easting) << ',' << format_double(a.pos.northing)
        << ',' << format_double(a.confidence) << ',' << a.label << '\n';
  }
}

std::vector<Alarm> read_alarms_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  expect_header(in, path, "easting,northing,confidence,label");

  std::vector<Alarm> alarms;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw ParseError(path, static_cast<size_t>(line_no), "expected 4 fields");
    }
    Alarm a;
    a.pos.easting = parse_double(fields[0], path, line_no);
    a.pos.northing = parse_double(fields[1], path, line_no);
    a.confidence = parse_double(fields[2], path, line_no);
    a.label = fields[3];
    alarms.push_back(std::move(a));
  }
  return alarms;
}

void write_truth_csv(const std::string& path,
                     const std::vector<GroundTruthEntry>& truth) {
  std::ofstream out = open_output(path);
  out << "easting,northing,kind,metal,depth_in,purpose\n";
  for (const GroundTruthEntry& t : truth) {
    out << format_double(t.pos.easting) << ',' << format_double(t.pos.northing)
        << ',' << to_string(t.kind) << ',' << to_string(t.metal) << ','
        << format_double(t.depth_in) << ',' << to_string(t.purpose) << '\n';
  }
}

std::vector<GroundTruthEntry> read_truth_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  expect_header(in, path, "easting,northing,kind,metal,depth_in,purpose");

  std::vector<GroundTruthEntry> truth;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6) {
      throw ParseError(path, static_cast<size_t>(line_no), "expected 6 fields");
    }
    GroundTruthEntry t;
    t.pos.easting = parse_double(fields[0], path, line_no);
    t.pos.northing = parse_double(fields[1], path, line_no);
    try {
      t.kind = parse_object_kind(fields[2]);
      t.metal = parse_metal_category(fields[3]);
      t.depth_in = parse_double(fields[4], path, line_no);
      t.purpose = parse_purpose(fields[5]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, static_cast<size_t>(line_no), e.what());
    }
    truth.push_back(t);
  }
  return truth;
}

void write_roc_csv(const std::string& path, const RocCurve& curve) {
  std::ofstream out = open_output(path);
  out << "threshold,pd,far_per_m2\n";
  for (const RocPoint& p : curve.points) {
    out << format_double(p.threshold) << ',' << format_double(p.pd) << ','
        << format_double(p.far) << '\n';
  }
}

RocCurve read_roc_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  expect_header(in, path, "threshold,pd,far_per_m2");

  RocCurve curve;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw ParseError(path, static_cast<size_t>(line_no), "expected 3 fields");
    }
    RocPoint p;
    p.threshold = parse_double(fields[0], path, line_no);
    p.pd = parse_double(fields[1], path, line_no);
    p.far = parse_double(fields[2], path, line_no);
    curve.points.push_back(p);
  }
  return curve;
}

void write_grid_pgm(const std::string& path, const ConfidenceGrid& grid) {
  if (grid.rows < 1 || grid.cols < 1) {
    throw std::invalid_argument("grid must be at least 1x1");
  }
  double lo = grid.values.front(), hi = lo;
  for (double v : grid.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;

  std::ofstream out = open_output(path);
  out << "P5\n" << grid.cols << ' ' << grid.rows << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(grid.cols));
  for (int r = grid.rows - 1; r >= 0; --r) {  // north at the top of the image
    for (int c = 0; c < grid.cols; ++c) {
      const double v = grid.at(r, c);
      row[static_cast<size_t>(c)] =
          static_cast<unsigned char>(std::lround((v - lo) * scale));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }

  std::ofstream meta = open_output(path + ".meta");
  meta << "origin_easting=" << format_double(grid.origin_easting) << '\n'
       << "origin_northing=" << format_double(grid.origin_northing) << '\n'
       << "cell_size_m=" << format_double(grid.cell_size_m) << '\n'
       << "rows=" << grid.rows << '\n'
       << "cols=" << grid.cols << '\n'
       << "value_min=" << format_double(lo) << '\n'
       << "value_max=" << format_double(hi) << '\n'
       << "row_order=north-to-south\n";
}

void write_grid_csv(const std::string& path, const ConfidenceGrid& grid) {
  std::ofstream out = open_output(path);
  for (int c = 1; c <= grid.cols; ++c) {
    out << (c == 1 ? "" : ",") << "c_" << c;
  }
  out << '\n';
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      out << (c == 0 ? "" : ",") << format_double(grid.at(r, c));
    }
    out << '\n';
  }
}

std::map<std::string, std::string> read_config_kv(const std::string& path) {
  std::ifstream in = open_input(path);

  auto trim = [](const std::string& s) {
    const size_t first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return std::string();
    const size_t last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
  };

  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = chomp(line);
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path, static_cast<size_t>(line_no), "expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ParseError(path, static_cast<size_t>(line_no), "empty key");
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot hash missing file '" + path + "'");
  }
  uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace emiace
