#include "osa/config_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace osa {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::runtime_error(path + "." + key + ": missing required field");
  }
  return j.at(key);
}

Eigen::Matrix2d parse_matrix2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
      !j[1].is_array() || j[1].size() != 2) {
    throw std::runtime_error(path + ": expected a 2x2 matrix [[a,b],[c,d]]");
  }
  Eigen::Matrix2d m;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) m(r, c) = j[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
  }
  return m;
}

std::vector<std::uint8_t> parse_bits(const json& j, const std::string& path) {
  if (!j.is_array()) throw std::runtime_error(path + ": expected an array of 0/1");
  std::vector<std::uint8_t> bits;
  for (const auto& e : j) {
    int b = e.get<int>();
    if (b != 0 && b != 1) throw std::runtime_error(path + ": entries must be 0 or 1");
    bits.push_back(static_cast<std::uint8_t>(b));
  }
  return bits;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// JSON scalar for a double: null when not finite (only sweep means can be).
std::string json_num(double x) { return std::isfinite(x) ? fmt_double(x) : "null"; }

std::vector<std::string> split_csv_line(const std::string& line) {
  // The table files never quote fields (numerals and bit strings only), so a
  // plain comma split is exact here.
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_exact(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double x = std::strtod(begin, &end);
  if (end == begin) throw std::runtime_error(where + ": not a number: '" + text + "'");
  return x;
}

int parse_int(const std::string& text, const std::string& where) {
  try {
    size_t pos = 0;
    int x = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": not an integer: '" + text + "'");
  }
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": JSON parse error: " + e.what());
  }

  ScenarioConfig cfg;
  try {
    cfg.M = need(j, "M", origin).get<int>();
    cfg.V = need(j, "V", origin).get<int>();
    cfg.D = need(j, "D", origin).get<int>();
    cfg.zeta = j.contains("zeta") ? j.at("zeta").get<int>() : 1;

    const json& channels = need(j, "channels", origin);
    if (!channels.is_array()) throw std::runtime_error(origin + ".channels: expected an array");
    for (size_t i = 0; i < channels.size(); ++i) {
      std::string base = origin + ".channels[" + std::to_string(i) + "]";
      ChannelParams cp;
      cp.occupancy = parse_matrix2(need(channels[i], "occupancy", base), base + ".occupancy");
      cp.quality = parse_matrix2(need(channels[i], "quality", base), base + ".quality");
      cfg.channels.push_back(cp);
    }

    const json& rates = need(j, "rates", origin);
    cfg.rates.good = need(rates, "good", origin + ".rates").get<int>();
    cfg.rates.bad = need(rates, "bad", origin + ".rates").get<int>();

    const json& costs = need(j, "costs", origin);
    cfg.costs.silent = need(costs, "silent", origin + ".costs").get<double>();
    cfg.costs.transmit = need(costs, "transmit", origin + ".costs").get<double>();
    cfg.costs.sw = need(costs, "switch", origin + ".costs").get<double>();

    const json& penalty = need(j, "penalty", origin);
    std::string type = need(penalty, "type", origin + ".penalty").get<std::string>();
    if (type == "quadratic") {
      cfg.penalty.kind = PenaltySpec::Kind::Quadratic;
      cfg.penalty.L = need(penalty, "L", origin + ".penalty").get<double>();
    } else if (type == "table") {
      cfg.penalty.kind = PenaltySpec::Kind::Table;
      const json& values = need(penalty, "values", origin + ".penalty");
      if (!values.is_array()) {
        throw std::runtime_error(origin + ".penalty.values: expected an array");
      }
      for (const auto& e : values) cfg.penalty.table.push_back(e.get<double>());
    } else {
      throw std::runtime_error(origin + ".penalty.type: expected 'quadratic' or 'table', got '" +
                               type + "'");
    }

    const json& initial = need(j, "initial", origin);
    cfg.initial.occupancy = parse_bits(need(initial, "occupancy", origin + ".initial"),
                                       origin + ".initial.occupancy");
    cfg.initial.quality =
        parse_bits(need(initial, "quality", origin + ".initial"), origin + ".initial.quality");
    cfg.initial.v = initial.contains("v") ? initial.at("v").get<int>() : -1;
    cfg.initial.channel = initial.contains("channel") ? initial.at("channel").get<int>() : 0;
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": malformed field: " + e.what());
  }

  ValidationReport validation = validate_config(cfg);
  if (!validation.ok()) {
    throw std::runtime_error(origin + ": invalid configuration: " + validation.summary());
  }
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  return parse_config_text(read_file(path), path);
}

std::string canonical_config_dump(const ScenarioConfig& cfg) {
  json j;
  j["M"] = cfg.M;
  j["V"] = cfg.V;
  j["D"] = cfg.D;
  j["zeta"] = cfg.zeta;
  json channels = json::array();
  for (const ChannelParams& cp : cfg.channels) {
    json entry;
    entry["occupancy"] = {{cp.occupancy(0, 0), cp.occupancy(0, 1)},
                          {cp.occupancy(1, 0), cp.occupancy(1, 1)}};
    entry["quality"] = {{cp.quality(0, 0), cp.quality(0, 1)},
                        {cp.quality(1, 0), cp.quality(1, 1)}};
    channels.push_back(entry);
  }
  j["channels"] = channels;
  j["rates"] = {{"good", cfg.rates.good}, {"bad", cfg.rates.bad}};
  j["costs"] = {{"silent", cfg.costs.silent},
                {"transmit", cfg.costs.transmit},
                {"switch", cfg.costs.sw}};
  if (cfg.penalty.kind == PenaltySpec::Kind::Quadratic) {
    j["penalty"] = {{"type", "quadratic"}, {"L", cfg.penalty.L}};
  } else {
    j["penalty"] = {{"type", "table"}, {"values", cfg.penalty.table}};
  }
  State s1 = cfg.initial_state();
  j["initial"] = {{"v", s1.v},
                  {"occupancy", cfg.initial.occupancy},
                  {"quality", cfg.initial.quality},
                  {"channel", s1.c}};
  return j.dump();  // std::map keys: sorted, canonical
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    hash ^= static_cast<std::uint64_t>(ch);
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string config_hash_hex(const ScenarioConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config_dump(cfg))));
  return buf;
}

std::string csv_quote(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string mask_to_bits(unsigned mask, int M) {
  std::string bits(static_cast<size_t>(M), '0');
  for (int m = 0; m < M; ++m) {
    if ((mask >> m) & 1u) bits[static_cast<size_t>(m)] = '1';
  }
  return bits;
}

unsigned bits_to_mask(const std::string& bits) {
  unsigned mask = 0;
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') mask |= 1u << i;
    else if (bits[i] != '0') throw std::runtime_error("bit string must contain only 0/1");
  }
  return mask;
}

void write_value_table_csv(const ValueTable& values, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,v,o,q,c,value\n";
  const StateSpace& space = values.space;
  for (int t = 1; t <= values.D + 1; ++t) {
    const Eigen::VectorXd& layer = values.layer(t);
    for (long idx = 0; idx < space.size(); ++idx) {
      State s = space.decode(idx);
      out << t << ',' << s.v << ',' << mask_to_bits(s.o, space.M) << ','
          << mask_to_bits(s.q, space.M) << ',' << s.c << ',' << fmt_double(layer[idx]) << '\n';
    }
  }
}

void write_value_table_json(const ValueTable& values, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "{\"columns\":[\"t\",\"v\",\"o\",\"q\",\"c\",\"value\"],\"rows\":[";
  const StateSpace& space = values.space;
  bool first = true;
  for (int t = 1; t <= values.D + 1; ++t) {
    const Eigen::VectorXd& layer = values.layer(t);
    for (long idx = 0; idx < space.size(); ++idx) {
      State s = space.decode(idx);
      out << (first ? "\n" : ",\n") << '[' << t << ',' << s.v << ",\""
          << mask_to_bits(s.o, space.M) << "\",\"" << mask_to_bits(s.q, space.M) << "\"," << s.c
          << ',' << json_num(layer[idx]) << ']';
      first = false;
    }
  }
  out << "\n]}\n";
}

void write_policy_csv(const PolicyTable& policy, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,v,o,q,c,b,n\n";
  const StateSpace& space = policy.space;
  for (int t = 1; t <= policy.D; ++t) {
    for (long idx = 0; idx < space.size(); ++idx) {
      State s = space.decode(idx);
      const Action& a = policy.at(t, idx);
      out << t << ',' << s.v << ',' << mask_to_bits(s.o, space.M) << ','
          << mask_to_bits(s.q, space.M) << ',' << s.c << ',' << a.b << ',' << a.n << '\n';
    }
  }
}

void write_policy_json(const PolicyTable& policy, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "{\"columns\":[\"t\",\"v\",\"o\",\"q\",\"c\",\"b\",\"n\"],\"rows\":[";
  const StateSpace& space = policy.space;
  bool first = true;
  for (int t = 1; t <= policy.D; ++t) {
    for (long idx = 0; idx < space.size(); ++idx) {
      State s = space.decode(idx);
      const Action& a = policy.at(t, idx);
      out << (first ? "\n" : ",\n") << '[' << t << ',' << s.v << ",\""
          << mask_to_bits(s.o, space.M) << "\",\"" << mask_to_bits(s.q, space.M) << "\"," << s.c
          << ',' << a.b << ',' << a.n << ']';
      first = false;
    }
  }
  out << "\n]}\n";
}

namespace {

std::string th_field(int th) { return th < 0 ? std::string() : std::to_string(th); }
std::string th_json(int th) { return th < 0 ? std::string("null") : std::to_string(th); }

}  // namespace

void write_thresholds_csv(const ThresholdTable& thresholds, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,o,q,c,case,target,th1,th2,th3,th4\n";
  const StateSpace& space = thresholds.space;
  for (int t = 1; t <= thresholds.D; ++t) {
    for (long joint = 0; joint < space.K; ++joint) {
      for (int c = 1; c <= space.M; ++c) {
        const ThresholdRow& row = thresholds.row(t, joint, c);
        out << t << ',' << mask_to_bits(joint_o_mask(joint, space.M), space.M) << ','
            << mask_to_bits(joint_q_mask(joint, space.M), space.M) << ',' << c << ','
            << static_cast<int>(row.tag) << ','
            << (row.target > 0 ? std::to_string(row.target) : std::string()) << ','
            << th_field(row.th[0]) << ',' << th_field(row.th[1]) << ',' << th_field(row.th[2])
            << ',' << th_field(row.th[3]) << '\n';
      }
    }
  }
}

void write_thresholds_json(const ThresholdTable& thresholds, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "{\"columns\":[\"t\",\"o\",\"q\",\"c\",\"case\",\"target\",\"th1\",\"th2\",\"th3\","
         "\"th4\"],\"rows\":[";
  const StateSpace& space = thresholds.space;
  bool first = true;
  for (int t = 1; t <= thresholds.D; ++t) {
    for (long joint = 0; joint < space.K; ++joint) {
      for (int c = 1; c <= space.M; ++c) {
        const ThresholdRow& row = thresholds.row(t, joint, c);
        out << (first ? "\n" : ",\n") << '[' << t << ",\""
            << mask_to_bits(joint_o_mask(joint, space.M), space.M) << "\",\""
            << mask_to_bits(joint_q_mask(joint, space.M), space.M) << "\"," << c << ','
            << static_cast<int>(row.tag) << ','
            << (row.target > 0 ? std::to_string(row.target) : std::string("null")) << ','
            << th_json(row.th[0]) << ',' << th_json(row.th[1]) << ',' << th_json(row.th[2]) << ','
            << th_json(row.th[3]) << ']';
        first = false;
      }
    }
  }
  out << "\n]}\n";
}

void write_surface_csv(const std::vector<SurfaceCell>& cells, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,v,code,target\n";
  for (const SurfaceCell& cell : cells) {
    out << cell.t << ',' << cell.v << ',' << cell.code << ','
        << (cell.target > 0 ? std::to_string(cell.target) : std::string()) << '\n';
  }
}

void write_surface_json(const std::vector<SurfaceCell>& cells, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "{\"columns\":[\"t\",\"v\",\"code\",\"target\"],\"rows\":[";
  bool first = true;
  for (const SurfaceCell& cell : cells) {
    out << (first ? "\n" : ",\n") << '[' << cell.t << ',' << cell.v << ',' << cell.code << ','
        << (cell.target > 0 ? std::to_string(cell.target) : std::string("null")) << ']';
    first = false;
  }
  out << "\n]}\n";
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "sweep_var,policy,mean,stderr,exact_value,n\n";
  for (const SweepRow& row : sweep.rows) {
    out << row.sweep_var << ',' << csv_quote(row.policy) << ','
        << (std::isfinite(row.mean) ? fmt_double(row.mean) : std::string()) << ','
        << (std::isfinite(row.std_err) ? fmt_double(row.std_err) : std::string()) << ','
        << fmt_double(row.exact_value) << ',' << row.n << '\n';
  }
}

void write_sweep_json(const SweepResult& sweep, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "{\"sweep_var\":\"" << sweep.var_name
      << "\",\"columns\":[\"sweep_var\",\"policy\",\"mean\",\"stderr\",\"exact_value\",\"n\"],"
         "\"rows\":[";
  bool first = true;
  for (const SweepRow& row : sweep.rows) {
    out << (first ? "\n" : ",\n") << '[' << row.sweep_var << ",\"" << row.policy << "\","
        << json_num(row.mean) << ',' << json_num(row.std_err) << ','
        << json_num(row.exact_value) << ',' << row.n << ']';
    first = false;
  }
  out << "\n]}\n";
}

void write_check_reports_json(const std::vector<CheckReport>& reports, const std::string& path) {
  json j;
  bool all_pass = true;
  json entries = json::array();
  for (const CheckReport& report : reports) {
    all_pass = all_pass && report.pass;
    json entry;
    entry["name"] = report.name;
    entry["pass"] = report.pass;
    entry["checked"] = report.checked;
    entry["violations"] = report.violations;
    json ces = json::array();
    for (const Counterexample& ce : report.counterexamples) {
      json e;
      e["t"] = ce.t;
      e["state"] = {{"v", ce.s.v}, {"o", ce.s.o}, {"q", ce.s.q}, {"c", ce.s.c}};
      e["a1"] = {{"b", ce.a1.b}, {"n", ce.a1.n}};
      e["a2"] = {{"b", ce.a2.b}, {"n", ce.a2.n}};
      e["v_hi"] = ce.v_hi;
      e["v_lo"] = ce.v_lo;
      e["lhs"] = ce.lhs;
      e["rhs"] = ce.rhs;
      e["detail"] = ce.detail;
      ces.push_back(e);
    }
    entry["counterexamples"] = ces;
    entries.push_back(entry);
  }
  j["all_pass"] = all_pass;
  j["reports"] = entries;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

ValueTable read_value_table_csv(const ScenarioConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{
                                     "t", "v", "o", "q", "c", "value"}) {
    throw std::runtime_error(path + ": unexpected header");
  }
  StateSpace space = state_space(cfg);
  ValueTable values;
  values.space = space;
  values.D = cfg.D;
  values.layers.assign(static_cast<size_t>(cfg.D + 1),
                       Eigen::VectorXd::Constant(space.size(),
                                                 std::numeric_limits<double>::quiet_NaN()));
  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error(path + ": expected 6 fields, got line '" + line + "'");
    int t = parse_int(f[0], path);
    if (t < 1 || t > cfg.D + 1) throw std::runtime_error(path + ": stage out of range");
    State s{parse_int(f[1], path), bits_to_mask(f[2]), bits_to_mask(f[3]), parse_int(f[4], path)};
    values.layer(t)[space.index(s)] = parse_double_exact(f[5], path);
    ++rows;
  }
  if (rows != static_cast<long>(cfg.D + 1) * space.size()) {
    throw std::runtime_error(path + ": expected " +
                             std::to_string(static_cast<long>(cfg.D + 1) * space.size()) +
                             " rows, got " + std::to_string(rows));
  }
  for (int t = 1; t <= cfg.D + 1; ++t) {
    if (values.layer(t).hasNaN()) throw std::runtime_error(path + ": missing entries at stage " + std::to_string(t));
  }
  return values;
}

PolicyTable read_policy_csv(const ScenarioConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      split_csv_line(line) != std::vector<std::string>{"t", "v", "o", "q", "c", "b", "n"}) {
    throw std::runtime_error(path + ": unexpected header");
  }
  StateSpace space = state_space(cfg);
  PolicyTable policy;
  policy.space = space;
  policy.D = cfg.D;
  policy.stages.assign(static_cast<size_t>(cfg.D),
                       std::vector<Action>(static_cast<size_t>(space.size()), Action{-1, 0}));
  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 7) throw std::runtime_error(path + ": expected 7 fields, got line '" + line + "'");
    int t = parse_int(f[0], path);
    if (t < 1 || t > cfg.D) throw std::runtime_error(path + ": stage out of range");
    State s{parse_int(f[1], path), bits_to_mask(f[2]), bits_to_mask(f[3]), parse_int(f[4], path)};
    policy.at(t, space.index(s)) = Action{parse_int(f[5], path), parse_int(f[6], path)};
    ++rows;
  }
  if (rows != static_cast<long>(cfg.D) * space.size()) {
    throw std::runtime_error(path + ": expected " +
                             std::to_string(static_cast<long>(cfg.D) * space.size()) +
                             " rows, got " + std::to_string(rows));
  }
  for (int t = 1; t <= cfg.D; ++t) {
    for (long idx = 0; idx < space.size(); ++idx) {
      if (policy.at(t, idx).b < 0) {
        throw std::runtime_error(path + ": missing entries at stage " + std::to_string(t));
      }
    }
  }
  return policy;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  json j;
  j["subcommand"] = manifest.subcommand;
  j["config_path"] = manifest.config_path;
  j["config_hash"] = manifest.config_hash;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version;
  j["wall_ms"] = manifest.wall_ms;
  j["outputs"] = manifest.outputs;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace osa
