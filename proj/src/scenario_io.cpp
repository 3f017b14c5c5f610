#include "edgeflow/scenario_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

#include "edgeflow/error.hpp"

#ifndef EDGEFLOW_VERSION
#define EDGEFLOW_VERSION "0.0.0"
#endif

namespace edgeflow {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

const json& require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) schema_error(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&key](const char* a) { return key == a; })) {
      schema_error(join(path, key), "unknown key");
    }
  }
  return j;
}

const json& require_key(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(join(path, key), "missing required key");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<long long>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema_error(path, "expected a boolean");
  return j.get<bool>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = as_number(j[k], index(path, k));
  return v;
}

// Row-major nested arrays.
Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) schema_error(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].empty()) schema_error(index(path, r), "expected a non-empty row");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols) schema_error(index(path, r), "row length differs from row 0");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_number(j[r][c], index(index(path, r), c));
    }
  }
  return m;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

void require_empty_params(const json& params, const std::string& path) {
  if (params.is_null()) return;
  require_object(params, path, {});
}

std::map<std::string, ObjectiveParser>& objective_registry() {
  static std::map<std::string, ObjectiveParser> registry = {
      {"zero",
       [](const json& params, const std::string& path) -> ObjectiveSpec {
         require_empty_params(params, path);
         return objective::Zero{};
       }},
      {"exp_sum",
       [](const json& params, const std::string& path) -> ObjectiveSpec {
         require_empty_params(params, path);
         return objective::ExpSum{};
       }},
      {"squared_distance",
       [](const json& params, const std::string& path) -> ObjectiveSpec {
         require_object(params, path, {"target", "weight"});
         objective::SquaredDistance f;
         f.target = as_vector(require_key(params, path, "target"), join(path, "target"));
         if (params.contains("weight")) f.weight = as_number(params["weight"], join(path, "weight"));
         return f;
       }},
      {"quadratic",
       [](const json& params, const std::string& path) -> ObjectiveSpec {
         require_object(params, path, {"Q", "c", "r"});
         objective::Quadratic f;
         f.Q = as_matrix(require_key(params, path, "Q"), join(path, "Q"));
         f.c = as_vector(require_key(params, path, "c"), join(path, "c"));
         if (params.contains("r")) f.r = as_number(params["r"], join(path, "r"));
         return f;
       }},
  };
  return registry;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

ObjectiveSpec parse_objective(const json& j, const std::string& path) {
  require_object(j, path, {"type", "params"});
  const std::string type = as_string(require_key(j, path, "type"), join(path, "type"));
  ObjectiveParser parser;
  {
    const std::lock_guard lock(registry_mutex());
    const auto& registry = objective_registry();
    const auto it = registry.find(type);
    if (it == registry.end()) schema_error(join(path, "type"), "unknown objective type '" + type + "'");
    parser = it->second;
  }
  return parser(j.contains("params") ? j["params"] : json(), join(path, "params"));
}

FlowMode parse_mode(const json& j, const std::string& path) {
  const std::string s = as_string(j, path);
  if (s == "saddle_point") return FlowMode::SaddlePoint;
  if (s == "edge_only") return FlowMode::EdgeOnly;
  schema_error(path, "expected 'saddle_point' or 'edge_only'");
}

InitSpec parse_init(const json& j, const std::string& path) {
  require_object(j, path, {"type", "x0", "lambda0", "low", "high", "seed"});
  const std::string type = as_string(require_key(j, path, "type"), join(path, "type"));
  if (type == "explicit") {
    for (const char* k : {"low", "high", "seed"}) {
      if (j.contains(k)) schema_error(join(path, k), "not allowed for explicit init");
    }
    ExplicitInit e;
    e.x0 = as_vector(require_key(j, path, "x0"), join(path, "x0"));
    if (j.contains("lambda0")) e.lambda0 = as_vector(j["lambda0"], join(path, "lambda0"));
    return e;
  }
  if (type == "uniform") {
    for (const char* k : {"x0", "lambda0"}) {
      if (j.contains(k)) schema_error(join(path, k), "not allowed for uniform init");
    }
    UniformInit u;
    if (j.contains("low")) u.low = as_number(j["low"], join(path, "low"));
    if (j.contains("high")) u.high = as_number(j["high"], join(path, "high"));
    const long long seed = as_integer(require_key(j, path, "seed"), join(path, "seed"));
    if (seed < 0) schema_error(join(path, "seed"), "must be non-negative");
    u.seed = static_cast<std::uint64_t>(seed);
    if (!(u.low < u.high)) schema_error(path, "low must be below high");
    return u;
  }
  schema_error(join(path, "type"), "expected 'explicit' or 'uniform'");
}

IntegratorConfig parse_integrator(const json& j, const std::string& path) {
  require_object(j, path, {"method", "dt", "rtol", "atol", "t_end", "record_every", "stop_on"});
  IntegratorConfig c;
  const std::string method = as_string(require_key(j, path, "method"), join(path, "method"));
  if (method == "rk4_fixed") {
    c.method = IntegrationMethod::Rk4Fixed;
  } else if (method == "rk45_adaptive") {
    c.method = IntegrationMethod::Rk45Adaptive;
  } else {
    schema_error(join(path, "method"), "expected 'rk4_fixed' or 'rk45_adaptive'");
  }
  if (j.contains("dt")) c.dt = as_number(j["dt"], join(path, "dt"));
  if (j.contains("rtol")) c.rtol = as_number(j["rtol"], join(path, "rtol"));
  if (j.contains("atol")) c.atol = as_number(j["atol"], join(path, "atol"));
  c.t_end = as_number(require_key(j, path, "t_end"), join(path, "t_end"));
  c.record_every = as_number(require_key(j, path, "record_every"), join(path, "record_every"));
  if (j.contains("stop_on")) {
    const std::string sp = join(path, "stop_on");
    const json& s = require_object(j["stop_on"], sp, {"metric", "threshold"});
    StopRule rule;
    const std::string metric = as_string(require_key(s, sp, "metric"), join(sp, "metric"));
    if (metric == "V") {
      rule.metric = StopMetric::V;
    } else if (metric == "rhs_norm") {
      rule.metric = StopMetric::RhsNorm;
    } else if (metric == "W") {
      rule.metric = StopMetric::W;
    } else {
      schema_error(join(sp, "metric"), "expected 'V', 'rhs_norm' or 'W'");
    }
    rule.threshold = as_number(require_key(s, sp, "threshold"), join(sp, "threshold"));
    c.stop_on = rule;
  }
  try {
    c.validate();
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  return c;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void register_objective_type(const std::string& name, ObjectiveParser parser) {
  const std::lock_guard lock(registry_mutex());
  objective_registry()[name] = std::move(parser);
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending character.
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                           e.what());
  }

  require_object(doc, "", {"version", "n", "agents", "edges", "mode", "init", "integrator", "edge_only_override"});
  const long long version = as_integer(require_key(doc, "", "version"), "version");
  if (version != kScenarioVersion) schema_error("version", "unsupported version " + std::to_string(version));

  Scenario sc;
  const long long n = as_integer(require_key(doc, "", "n"), "n");
  if (n < 1) schema_error("n", "must be positive");
  sc.n = static_cast<int>(n);

  const json& agents = require_key(doc, "", "agents");
  if (!agents.is_array() || agents.empty()) schema_error("agents", "expected a non-empty array");
  const int m = static_cast<int>(agents.size());
  std::vector<std::optional<ObjectiveSpec>> objectives(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const std::string path = index("agents", k);
    require_object(agents[k], path, {"id", "objective"});
    const long long id = as_integer(require_key(agents[k], path, "id"), join(path, "id"));
    if (id < 1 || id > m) schema_error(join(path, "id"), "must be in 1.." + std::to_string(m));
    auto& slot = objectives[static_cast<std::size_t>(id - 1)];
    if (slot) schema_error(join(path, "id"), "duplicate agent id " + std::to_string(id));
    slot = parse_objective(require_key(agents[k], path, "objective"), join(path, "objective"));
  }
  for (auto& f : objectives) sc.objectives.push_back(std::move(*f));

  const json& edges = require_key(doc, "", "edges");
  if (!edges.is_array()) schema_error("edges", "expected an array");
  std::vector<Edge> edge_list;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string path = index("edges", k);
    require_object(edges[k], path, {"i", "j", "A", "b"});
    EdgeConstraint c;
    c.i = static_cast<int>(as_integer(require_key(edges[k], path, "i"), join(path, "i"))) - 1;
    c.j = static_cast<int>(as_integer(require_key(edges[k], path, "j"), join(path, "j"))) - 1;
    c.A = as_matrix(require_key(edges[k], path, "A"), join(path, "A"));
    c.b = as_vector(require_key(edges[k], path, "b"), join(path, "b"));
    edge_list.push_back({c.i, c.j});
    sc.constraints.push_back(std::move(c));
  }
  try {
    sc.graph = Graph(m, std::move(edge_list));
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationFailed, std::string("consistency: ") + e.what());
  }

  sc.mode = parse_mode(require_key(doc, "", "mode"), "mode");
  sc.init = parse_init(require_key(doc, "", "init"), "init");
  sc.integrator = parse_integrator(require_key(doc, "", "integrator"), "integrator");
  if (doc.contains("edge_only_override")) sc.edge_only_override = as_bool(doc["edge_only_override"], "edge_only_override");
  return sc;
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

Scenario load_scenario(const std::filesystem::path& path) {
  Scenario sc = read_scenario(path);
  (void)require_valid(sc);
  return sc;
}

json objective_to_json(const ObjectiveSpec& spec) {
  json out;
  out["type"] = std::string(type_name(spec));
  json params = json::object();
  if (const auto* f = std::get_if<objective::SquaredDistance>(&spec)) {
    params["target"] = vector_json(f->target);
    params["weight"] = f->weight;
  } else if (const auto* q = std::get_if<objective::Quadratic>(&spec)) {
    params["Q"] = matrix_json(q->Q);
    params["c"] = vector_json(q->c);
    params["r"] = q->r;
  }
  out["params"] = params;
  return out;
}

json scenario_to_json(const Scenario& sc) {
  json doc;
  doc["version"] = kScenarioVersion;
  doc["n"] = sc.n;
  json agents = json::array();
  for (std::size_t i = 0; i < sc.objectives.size(); ++i) {
    agents.push_back({{"id", i + 1}, {"objective", objective_to_json(sc.objectives[i])}});
  }
  doc["agents"] = agents;
  json edges = json::array();
  for (const auto& c : sc.constraints) {
    edges.push_back({{"i", c.i + 1}, {"j", c.j + 1}, {"A", matrix_json(c.A)}, {"b", vector_json(c.b)}});
  }
  doc["edges"] = edges;
  doc["mode"] = sc.mode == FlowMode::EdgeOnly ? "edge_only" : "saddle_point";
  if (const auto* e = std::get_if<ExplicitInit>(&sc.init)) {
    json init = {{"type", "explicit"}, {"x0", vector_json(e->x0)}};
    if (e->lambda0) init["lambda0"] = vector_json(*e->lambda0);
    doc["init"] = init;
  } else {
    const auto& u = std::get<UniformInit>(sc.init);
    doc["init"] = {{"type", "uniform"}, {"low", u.low}, {"high", u.high}, {"seed", u.seed}};
  }
  const auto& c = sc.integrator;
  json integ = {{"method", c.method == IntegrationMethod::Rk4Fixed ? "rk4_fixed" : "rk45_adaptive"},
                {"dt", c.dt},
                {"rtol", c.rtol},
                {"atol", c.atol},
                {"t_end", c.t_end},
                {"record_every", c.record_every}};
  if (c.stop_on) {
    const char* metric = c.stop_on->metric == StopMetric::V ? "V" : c.stop_on->metric == StopMetric::W ? "W" : "rhs_norm";
    integ["stop_on"] = {{"metric", metric}, {"threshold", c.stop_on->threshold}};
  }
  doc["integrator"] = integ;
  doc["edge_only_override"] = sc.edge_only_override;
  return doc;
}

std::string scenario_hash(const Scenario& sc) {
  const std::string text = scenario_to_json(sc).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return hex.str();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int m, int n) {
  os << "t";
  for (int i = 1; i <= m; ++i) {
    for (int k = 1; k <= n; ++k) os << ",x_" << i << "_" << k;
  }
  for (int i = 1; i <= m; ++i) {
    for (int k = 1; k <= n; ++k) os << ",lambda_" << i << "_" << k;
  }
  os << ",V";
  if (traj.W_series) os << ",W";
  os << "\n";
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    const auto& st = traj.states[r];
    os << format_double(traj.times[r]);
    for (Eigen::Index k = 0; k < st.x.size(); ++k) os << "," << format_double(st.x(k));
    for (Eigen::Index k = 0; k < st.lambda.size(); ++k) os << "," << format_double(st.lambda(k));
    os << "," << format_double(traj.V_series[r]);
    if (traj.W_series) os << "," << format_double((*traj.W_series)[r]);
    os << "\n";
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::ParseError, "empty CSV");
  std::stringstream header(line);
  for (std::string cell; std::getline(header, cell, ',');) table.header.push_back(cell);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str() || *end != '\0') {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != table.header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": wrong number of cells");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

json summary_to_json(const RunSummary& s, const std::string& hash) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json out;
  out["final_V"] = s.final_V;
  out["final_W"] = opt(s.final_W);
  out["final_rhs_norm"] = s.final_rhs_norm;
  out["fitted_rate"] = opt(s.fitted_rate);
  out["fit_r_squared"] = opt(s.fit_r_squared);
  out["fitted_series"] = s.fitted_series;
  out["locality_ok"] = s.locality_ok;
  out["wall_time"] = s.wall_time;
  out["seed"] = s.seed ? json(*s.seed) : json(nullptr);
  out["t_final"] = s.t_final;
  out["stopped_early"] = s.stopped_early;
  out["notes"] = s.notes;
  out["scenario_hash"] = hash;
  out["tool_version"] = std::string(tool_version());
  return out;
}

json reference_to_json(const ReferenceSolution& ref) {
  return {{"status", "ok"},
          {"method", ref.method},
          {"x_star", vector_json(ref.x_star)},
          {"mu_star", vector_json(ref.mu_star)},
          {"kkt_residual", ref.kkt_residual},
          {"objective_value", ref.objective_value},
          {"unique", ref.unique},
          {"outer_iterations", ref.outer_iterations}};
}

std::string_view tool_version() { return EDGEFLOW_VERSION; }

}  // namespace edgeflow
