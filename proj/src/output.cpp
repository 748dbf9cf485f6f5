// Artifact plumbing: run-config ingestion with positional diagnostics, the
// deterministic CSV/JSON writers for every task's result files, the manifest,
// and the FNV-1a content hash. All serialization funnels through one
// shortest-round-trip double formatter so rerun bodies are byte-identical.

#include "spinmet/output.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "spinmet/errors.hpp"

namespace spinmet {

using ordered_json = nlohmann::ordered_json;

// --- primitive formatting ---------------------------------------------------

std::string format_real(Real value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(cells[i]);
  }
  line += '\n';
  return line;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

// --- file helpers ------------------------------------------------------------

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw SchemaError(path, "read failed");
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& body) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
    if (ec)
      throw std::runtime_error(path + ": cannot create parent directory: " +
                               ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

// --- run configuration --------------------------------------------------------

std::string task_name(TaskKind task) {
  switch (task) {
    case TaskKind::MetScan: return "met-scan";
    case TaskKind::BondSweep: return "bond-sweep";
    case TaskKind::ParamSweep: return "param-sweep";
    case TaskKind::HaarCampaign: return "haar-campaign";
    case TaskKind::Fit: return "fit";
    case TaskKind::Bounds: return "bounds";
  }
  return "unknown";
}

namespace {

using json = nlohmann::json;

const json& require_field(const json& obj, const char* key,
                          const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(where, std::string("missing field \"") + key + "\"");
  return *it;
}

// Typos are config bugs: every object only admits its documented keys.
void reject_unknown_keys(const json& obj,
                         const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw SchemaError(where, "unknown field \"" + it.key() + "\"");
  }
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  const json& field = require_field(obj, key, where);
  if (!field.is_string() || field.get<std::string>().empty())
    throw SchemaError(where + "." + key, "must be a nonempty string");
  return field.get<std::string>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
  const json& field = require_field(obj, key, where);
  if (!field.is_number_integer())
    throw SchemaError(where + "." + key, "must be an integer");
  return field.get<int>();
}

Real optional_number(const json& obj, const char* key, Real fallback,
                     const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number())
    throw SchemaError(where + "." + key, "must be a number");
  return it->get<Real>();
}

int optional_int(const json& obj, const char* key, int fallback,
                 const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer())
    throw SchemaError(where + "." + key, "must be an integer");
  return it->get<int>();
}

bool optional_bool(const json& obj, const char* key, bool fallback,
                   const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean())
    throw SchemaError(where + "." + key, "must be a boolean");
  return it->get<bool>();
}

std::vector<Real> require_number_array(const json& obj, const char* key,
                                       const std::string& where) {
  const json& field = require_field(obj, key, where);
  if (!field.is_array() || field.empty())
    throw SchemaError(where + "." + key, "must be a nonempty array");
  std::vector<Real> values;
  values.reserve(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!field[i].is_number())
      throw SchemaError(where + "." + key + "[" + std::to_string(i) + "]",
                        "must be a number");
    values.push_back(field[i].get<Real>());
  }
  return values;
}

std::string resolve_against(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  if (base.empty() || p.is_absolute()) return p.lexically_normal().string();
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

TargetSpec parse_target(const json& obj, const std::string& where,
                        const std::string& base_dir) {
  if (!obj.is_object()) throw SchemaError(where, "must be an object");
  TargetSpec spec;
  const std::string kind = require_string(obj, "kind", where);
  if (kind == "basis") {
    reject_unknown_keys(obj, {"kind", "bits"}, where);
    spec.kind = TargetSpec::Kind::Basis;
    spec.bits = require_string(obj, "bits", where);
    for (char c : spec.bits) {
      if (c != '0' && c != '1')
        throw ValidationError(where + ".bits",
                              "must be a bitstring over {0,1}");
    }
  } else if (kind == "pauli-ground") {
    reject_unknown_keys(obj, {"kind", "hamiltonian"}, where);
    spec.kind = TargetSpec::Kind::PauliGround;
    spec.hamiltonian_path =
        resolve_against(base_dir, require_string(obj, "hamiltonian", where));
  } else {
    throw SchemaError(where + ".kind",
                      "must be \"basis\" or \"pauli-ground\"");
  }
  return spec;
}

// Fills scan (grid normalized ascending regardless of the order given).
void parse_scan_block(const json& obj, const std::string& where,
                      MetScanConfig& scan) {
  if (!obj.is_object()) throw SchemaError(where, "must be an object");
  reject_unknown_keys(obj,
                      {"t_grid_ns", "threshold", "n_segments", "direction",
                       "warm_start", "refine_resolution_ns", "seed_starts",
                       "seed_with_zero", "warm_starts"},
                      where);
  std::vector<Real> grid = require_number_array(obj, "t_grid_ns", where);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0))
      throw ValidationError(where + ".t_grid_ns[" + std::to_string(i) + "]",
                            "durations must be positive");
  }
  bool ascending = true, descending = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    ascending = ascending && grid[i] > grid[i - 1];
    descending = descending && grid[i] < grid[i - 1];
  }
  if (!ascending && !descending)
    throw ValidationError(where + ".t_grid_ns", "must be strictly monotone");
  if (descending && grid.size() > 1) std::reverse(grid.begin(), grid.end());
  scan.t_grid = std::move(grid);

  scan.threshold = optional_number(obj, "threshold", scan.threshold, where);
  if (!(scan.threshold > 0.0))
    throw ValidationError(where + ".threshold", "must be positive");
  scan.n_segments = optional_int(obj, "n_segments", scan.n_segments, where);
  if (scan.n_segments < 1)
    throw ValidationError(where + ".n_segments", "must be >= 1");
  if (auto it = obj.find("direction"); it != obj.end()) {
    if (!it->is_string())
      throw SchemaError(where + ".direction", "must be a string");
    const std::string dir = it->get<std::string>();
    if (dir == "ascending") scan.scan_direction = ScanDirection::Ascending;
    else if (dir == "descending") scan.scan_direction = ScanDirection::Descending;
    else
      throw SchemaError(where + ".direction",
                        "must be \"ascending\" or \"descending\"");
  }
  scan.warm_start = optional_bool(obj, "warm_start", scan.warm_start, where);
  if (auto it = obj.find("refine_resolution_ns"); it != obj.end()) {
    if (!it->is_number())
      throw SchemaError(where + ".refine_resolution_ns", "must be a number");
    const Real res = it->get<Real>();
    if (!(res > 0.0))
      throw ValidationError(where + ".refine_resolution_ns",
                            "must be positive");
    scan.refine_resolution = res;
  }
  scan.seed_starts = optional_int(obj, "seed_starts", scan.seed_starts, where);
  if (scan.seed_starts < 1)
    throw ValidationError(where + ".seed_starts", "must be >= 1");
  scan.seed_with_zero =
      optional_bool(obj, "seed_with_zero", scan.seed_with_zero, where);
  scan.warm_starts = optional_int(obj, "warm_starts", scan.warm_starts, where);
  if (scan.warm_starts < 0)
    throw ValidationError(where + ".warm_starts", "must be >= 0");
}

void parse_optimizer_block(const json& obj, const std::string& where,
                           OptimizerConfig& opt) {
  if (!obj.is_object()) throw SchemaError(where, "must be an object");
  reject_unknown_keys(obj,
                      {"max_iterations", "gradient_tol", "relative_cost_tol",
                       "n_random_restarts", "memory", "max_line_search_steps",
                       "freeze_carriers", "propagation"},
                      where);
  opt.max_iterations =
      optional_int(obj, "max_iterations", opt.max_iterations, where);
  if (opt.max_iterations < 1)
    throw ValidationError(where + ".max_iterations", "must be >= 1");
  opt.gradient_tol =
      optional_number(obj, "gradient_tol", opt.gradient_tol, where);
  if (!(opt.gradient_tol > 0.0))
    throw ValidationError(where + ".gradient_tol", "must be positive");
  opt.relative_cost_tol =
      optional_number(obj, "relative_cost_tol", opt.relative_cost_tol, where);
  if (opt.relative_cost_tol < 0.0)
    throw ValidationError(where + ".relative_cost_tol", "must be >= 0");
  opt.n_random_restarts =
      optional_int(obj, "n_random_restarts", opt.n_random_restarts, where);
  if (opt.n_random_restarts < 0)
    throw ValidationError(where + ".n_random_restarts", "must be >= 0");
  opt.memory = optional_int(obj, "memory", opt.memory, where);
  if (opt.memory < 1)
    throw ValidationError(where + ".memory", "must be >= 1");
  opt.max_line_search_steps = optional_int(obj, "max_line_search_steps",
                                           opt.max_line_search_steps, where);
  if (opt.max_line_search_steps < 1)
    throw ValidationError(where + ".max_line_search_steps", "must be >= 1");
  opt.freeze_carriers =
      optional_bool(obj, "freeze_carriers", opt.freeze_carriers, where);
  if (auto it = obj.find("propagation"); it != obj.end()) {
    const std::string pw = where + ".propagation";
    if (!it->is_object()) throw SchemaError(pw, "must be an object");
    reject_unknown_keys(*it,
                        {"rwa", "phase_budget_rad", "substeps_override",
                         "substep_multiplier"},
                        pw);
    opt.propagation.rwa = optional_bool(*it, "rwa", opt.propagation.rwa, pw);
    opt.propagation.phase_budget_rad = optional_number(
        *it, "phase_budget_rad", opt.propagation.phase_budget_rad, pw);
    if (!(opt.propagation.phase_budget_rad > 0.0))
      throw ValidationError(pw + ".phase_budget_rad", "must be positive");
    opt.propagation.substeps_override = optional_int(
        *it, "substeps_override", opt.propagation.substeps_override, pw);
    if (opt.propagation.substeps_override < 0)
      throw ValidationError(pw + ".substeps_override", "must be >= 0");
    opt.propagation.substep_multiplier = optional_int(
        *it, "substep_multiplier", opt.propagation.substep_multiplier, pw);
    if (opt.propagation.substep_multiplier < 1)
      throw ValidationError(pw + ".substep_multiplier", "must be >= 1");
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text,
                           const std::string& origin,
                           const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(origin, e.what());
  }
  const std::string root = origin.empty() ? "$" : origin;
  if (!doc.is_object()) throw SchemaError(root, "top level must be an object");

  RunConfig config;
  config.raw_text = json_text;
  config.base_dir = base_dir;

  const std::string task = require_string(doc, "task", root);
  if (task == "met-scan") config.task = TaskKind::MetScan;
  else if (task == "bond-sweep") config.task = TaskKind::BondSweep;
  else if (task == "param-sweep") config.task = TaskKind::ParamSweep;
  else if (task == "haar-campaign") config.task = TaskKind::HaarCampaign;
  else if (task == "fit") config.task = TaskKind::Fit;
  else if (task == "bounds") config.task = TaskKind::Bounds;
  else
    throw SchemaError(root + ".task",
                      "must be one of met-scan, bond-sweep, param-sweep, "
                      "haar-campaign, fit, bounds");

  const json& seed = require_field(doc, "seed", root);
  if (!seed.is_number_integer() ||
      (seed.is_number_integer() && !seed.is_number_unsigned() &&
       seed.get<long long>() < 0))
    throw SchemaError(root + ".seed", "must be a nonnegative integer");
  config.seed = seed.get<std::uint64_t>();

  config.output_dir = require_string(doc, "output_dir", root);
  config.parallelism = optional_int(doc, "parallelism", 0, root);
  if (config.parallelism < 0)
    throw ValidationError(root + ".parallelism", "must be >= 0");

  std::vector<std::string> allowed = {"task", "seed", "output_dir",
                                      "parallelism"};
  const auto parse_device = [&] {
    config.device_path =
        resolve_against(base_dir, require_string(doc, "device", root));
  };
  const auto parse_scan = [&] {
    parse_scan_block(require_field(doc, "scan", root), root + ".scan",
                     config.scan);
    config.scan.seed = config.seed;
  };
  const auto parse_optimizer = [&] {
    if (auto it = doc.find("optimizer"); it != doc.end())
      parse_optimizer_block(*it, root + ".optimizer", config.optimizer);
  };
  const auto parse_initial = [&] {
    if (auto it = doc.find("initial"); it != doc.end())
      config.initial = parse_target(*it, root + ".initial", base_dir);
  };

  switch (config.task) {
    case TaskKind::MetScan: {
      allowed.insert(allowed.end(),
                     {"device", "target", "initial", "scan", "optimizer"});
      reject_unknown_keys(doc, allowed, root);
      parse_device();
      config.target =
          parse_target(require_field(doc, "target", root), root + ".target",
                       base_dir);
      parse_initial();
      parse_scan();
      parse_optimizer();
      break;
    }
    case TaskKind::BondSweep: {
      allowed.insert(allowed.end(),
                     {"device", "hamiltonians", "scan", "optimizer"});
      reject_unknown_keys(doc, allowed, root);
      parse_device();
      const json& series = require_field(doc, "hamiltonians", root);
      if (!series.is_array() || series.empty())
        throw SchemaError(root + ".hamiltonians", "must be a nonempty array");
      for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series[i].is_string())
          throw SchemaError(root + ".hamiltonians[" + std::to_string(i) + "]",
                            "must be a path string");
        config.hamiltonian_paths.push_back(
            resolve_against(base_dir, series[i].get<std::string>()));
      }
      parse_scan();
      parse_optimizer();
      break;
    }
    case TaskKind::ParamSweep: {
      allowed.insert(allowed.end(), {"device", "target", "initial", "scan",
                                     "optimizer", "axis", "factors"});
      reject_unknown_keys(doc, allowed, root);
      parse_device();
      config.target =
          parse_target(require_field(doc, "target", root), root + ".target",
                       base_dir);
      parse_initial();
      parse_scan();
      parse_optimizer();
      const std::string axis = require_string(doc, "axis", root);
      if (axis == "iq_max") config.axis = SweepAxis::IqMax;
      else if (axis == "j_max") config.axis = SweepAxis::JMax;
      else if (axis == "delta_b") config.axis = SweepAxis::DeltaB;
      else
        throw SchemaError(root + ".axis",
                          "must be one of iq_max, j_max, delta_b");
      config.factors = require_number_array(doc, "factors", root);
      for (std::size_t i = 0; i < config.factors.size(); ++i) {
        if (!(config.factors[i] > 0.0))
          throw ValidationError(root + ".factors[" + std::to_string(i) + "]",
                                "must be positive");
      }
      break;
    }
    case TaskKind::HaarCampaign: {
      allowed.insert(allowed.end(),
                     {"device", "campaign", "bootstrap", "optimizer"});
      reject_unknown_keys(doc, allowed, root);
      parse_device();
      const json& campaign = require_field(doc, "campaign", root);
      const std::string cw = root + ".campaign";
      if (!campaign.is_object()) throw SchemaError(cw, "must be an object");
      reject_unknown_keys(
          campaign, {"n_pairs", "t_grid_ns", "n_segments", "threshold"}, cw);
      config.campaign_n_pairs = require_int(campaign, "n_pairs", cw);
      if (config.campaign_n_pairs < 1)
        throw ValidationError(cw + ".n_pairs", "must be >= 1");
      config.campaign_t_grid =
          require_number_array(campaign, "t_grid_ns", cw);
      for (std::size_t i = 0; i < config.campaign_t_grid.size(); ++i) {
        if (!(config.campaign_t_grid[i] > 0.0))
          throw ValidationError(cw + ".t_grid_ns[" + std::to_string(i) + "]",
                                "durations must be positive");
        if (i > 0 &&
            !(config.campaign_t_grid[i] < config.campaign_t_grid[i - 1]))
          throw ValidationError(
              cw + ".t_grid_ns",
              "must be strictly descending (the chain runs from the longest "
              "duration down)");
      }
      config.campaign_n_segments =
          optional_int(campaign, "n_segments", config.campaign_n_segments, cw);
      if (config.campaign_n_segments < 1)
        throw ValidationError(cw + ".n_segments", "must be >= 1");
      config.campaign_threshold = optional_number(
          campaign, "threshold", config.campaign_threshold, cw);
      if (!(config.campaign_threshold > 0.0))
        throw ValidationError(cw + ".threshold", "must be positive");
      if (auto it = doc.find("bootstrap"); it != doc.end()) {
        const std::string bw = root + ".bootstrap";
        if (!it->is_object()) throw SchemaError(bw, "must be an object");
        reject_unknown_keys(*it, {"n_resamples", "confidence"}, bw);
        const json& n = require_field(*it, "n_resamples", bw);
        if (!n.is_number_integer() || n.get<long long>() < 0)
          throw SchemaError(bw + ".n_resamples",
                            "must be a nonnegative integer");
        config.bootstrap_resamples = n.get<long long>();
        config.bootstrap_confidence = optional_number(
            *it, "confidence", config.bootstrap_confidence, bw);
        if (!(config.bootstrap_confidence > 0.0) ||
            !(config.bootstrap_confidence < 1.0))
          throw ValidationError(bw + ".confidence", "must be inside (0, 1)");
      }
      parse_optimizer();
      break;
    }
    case TaskKind::Fit: {
      allowed.insert(allowed.end(), {"estimate_csv", "d", "max_terms"});
      reject_unknown_keys(doc, allowed, root);
      config.estimate_csv =
          resolve_against(base_dir, require_string(doc, "estimate_csv", root));
      config.fit_d = require_int(doc, "d", root);
      if (config.fit_d < 2)
        throw ValidationError(root + ".d", "must be >= 2");
      config.fit_max_terms =
          optional_int(doc, "max_terms", config.fit_max_terms, root);
      if (config.fit_max_terms < 1)
        throw ValidationError(root + ".max_terms", "must be >= 1");
      break;
    }
    case TaskKind::Bounds: {
      allowed.insert(allowed.end(), {"budget"});
      reject_unknown_keys(doc, allowed, root);
      if (auto it = doc.find("budget"); it != doc.end()) {
        const std::string bw = root + ".budget";
        if (!it->is_object()) throw SchemaError(bw, "must be an object");
        reject_unknown_keys(
            *it, {"pi_gate_time_ns", "swap_alpha_max_time_ns"}, bw);
        config.pi_gate_time =
            optional_number(*it, "pi_gate_time_ns", config.pi_gate_time, bw);
        config.swap_time = optional_number(*it, "swap_alpha_max_time_ns",
                                           config.swap_time, bw);
        if (config.pi_gate_time < 0.0)
          throw ValidationError(bw + ".pi_gate_time_ns", "must be >= 0");
        if (config.swap_time < 0.0)
          throw ValidationError(bw + ".swap_alpha_max_time_ns",
                                "must be >= 0");
      }
      break;
    }
  }
  return config;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const std::string base =
      std::filesystem::path(path).parent_path().string();
  return parse_run_config(text, path, base);
}

// --- scan / sweep serializers ---------------------------------------------

namespace {

const std::vector<std::string> kScanHeader = {
    "kind",      "t_ns",     "best_cost", "excess",
    "converged", "feasible", "refined",   "best_restart"};

std::vector<std::string> scan_point_cells(const MetPoint& point) {
  return {"point",
          format_real(point.total_time),
          format_real(point.best_cost),
          format_real(point.excess),
          point.converged ? "1" : "0",
          point.feasible ? "1" : "0",
          point.refined ? "1" : "0",
          std::to_string(point.outcome.restart_index_of_best)};
}

std::vector<std::string> scan_met_cells(const MetScanResult& result) {
  return {"met",
          result.met_estimate ? format_real(*result.met_estimate) : "",
          "",
          "",
          "",
          "",
          "",
          ""};
}

std::vector<std::string> prepend(const std::vector<std::string>& head,
                                 std::vector<std::string> tail) {
  tail.insert(tail.begin(), head.begin(), head.end());
  return tail;
}

ordered_json met_scan_summary(const MetScanResult& result) {
  ordered_json summary;
  summary["met_ns"] =
      result.met_estimate ? ordered_json(*result.met_estimate) : ordered_json(nullptr);
  summary["bracket_below_ns"] = result.bracket_below;
  summary["bracket_above_ns"] =
      result.bracket_above ? ordered_json(*result.bracket_above) : ordered_json(nullptr);
  summary["n_points"] = result.points.size();
  int feasible = 0;
  for (const MetPoint& point : result.points) feasible += point.feasible;
  summary["n_feasible"] = feasible;
  return summary;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string met_scan_csv(const MetScanResult& result) {
  std::string body = csv_line(kScanHeader);
  for (const MetPoint& point : result.points)
    body += csv_line(scan_point_cells(point));
  body += csv_line(scan_met_cells(result));
  return body;
}

std::string sweep_csv(const std::vector<SweepEntry>& entries) {
  std::string body = csv_line(prepend({"factor"}, kScanHeader));
  for (const SweepEntry& entry : entries) {
    const std::string factor = format_real(entry.factor);
    for (const MetPoint& point : entry.result.points)
      body += csv_line(prepend({factor}, scan_point_cells(point)));
    body += csv_line(prepend({factor}, scan_met_cells(entry.result)));
  }
  return body;
}

std::string bond_sweep_csv(const std::vector<PauliSum>& series,
                           const std::vector<MetScanResult>& results) {
  std::string body = csv_line(prepend({"entry", "bond_angstrom"}, kScanHeader));
  for (std::size_t e = 0; e < results.size(); ++e) {
    const auto& bond =
        e < series.size() ? series[e].metadata.bond_distance_angstrom
                          : std::optional<Real>{};
    const std::vector<std::string> head = {
        std::to_string(e), bond ? format_real(*bond) : ""};
    for (const MetPoint& point : results[e].points)
      body += csv_line(prepend(head, scan_point_cells(point)));
    body += csv_line(prepend(head, scan_met_cells(results[e])));
  }
  return body;
}

std::string met_summary_json(const MetScanResult& result) {
  return dump(met_scan_summary(result));
}

std::string sweep_summary_json(SweepAxis axis,
                               const std::vector<SweepEntry>& entries) {
  ordered_json doc;
  switch (axis) {
    case SweepAxis::IqMax: doc["axis"] = "iq_max"; break;
    case SweepAxis::JMax: doc["axis"] = "j_max"; break;
    case SweepAxis::DeltaB: doc["axis"] = "delta_b"; break;
  }
  doc["entries"] = ordered_json::array();
  for (const SweepEntry& entry : entries) {
    ordered_json row;
    row["factor"] = entry.factor;
    row["met_ns"] = entry.result.met_estimate
                        ? ordered_json(*entry.result.met_estimate)
                        : ordered_json(nullptr);
    doc["entries"].push_back(row);
  }
  return dump(doc);
}

std::string bond_sweep_summary_json(const std::vector<PauliSum>& series,
                                    const std::vector<MetScanResult>& results) {
  ordered_json doc;
  doc["entries"] = ordered_json::array();
  for (std::size_t e = 0; e < results.size(); ++e) {
    ordered_json row;
    row["entry"] = e;
    if (e < series.size()) {
      const PauliMetadata& meta = series[e].metadata;
      row["molecule"] = meta.molecule ? ordered_json(*meta.molecule) : ordered_json(nullptr);
      row["bond_angstrom"] = meta.bond_distance_angstrom
                                 ? ordered_json(*meta.bond_distance_angstrom)
                                 : ordered_json(nullptr);
      row["fci_energy"] =
          meta.fci_energy ? ordered_json(*meta.fci_energy) : ordered_json(nullptr);
    }
    row["met_ns"] = results[e].met_estimate
                        ? ordered_json(*results[e].met_estimate)
                        : ordered_json(nullptr);
    doc["entries"].push_back(row);
  }
  return dump(doc);
}

// --- campaign serializers ---------------------------------------------------

std::string campaign_pairs_csv(const CdfEstimate& estimate) {
  std::string body =
      csv_line({"pair", "t_ns", "infidelity", "feasible", "passes"});
  for (std::size_t p = 0; p < estimate.pairs.size(); ++p) {
    const PairRecord& record = estimate.pairs[p];
    if (record.excluded) continue;
    for (std::size_t i = 0; i < estimate.t_grid.size(); ++i) {
      body += csv_line({std::to_string(p), format_real(estimate.t_grid[i]),
                        format_real(record.infidelity[i]),
                        record.feasible[i] ? "1" : "0",
                        record.passes[i] ? "1" : "0"});
    }
  }
  return body;
}

std::string campaign_mets_csv(const CdfEstimate& estimate) {
  std::string body = csv_line(
      {"pair", "met_below_ns", "met_above_ns", "excluded", "notice"});
  for (std::size_t p = 0; p < estimate.pairs.size(); ++p) {
    const PairRecord& record = estimate.pairs[p];
    body += csv_line(
        {std::to_string(p),
         record.excluded ? "" : format_real(record.met_below),
         record.met_above ? format_real(*record.met_above) : "",
         record.excluded ? "1" : "0", record.notice});
  }
  return body;
}

std::string campaign_cdf_csv(const CdfEstimate& estimate) {
  std::string body =
      csv_line({"t_ns", "cdf", "variance", "ci_low", "ci_high"});
  const bool banded = estimate.variance.size() == estimate.t_grid.size();
  for (std::size_t i = 0; i < estimate.t_grid.size(); ++i) {
    body += csv_line({format_real(estimate.t_grid[i]),
                      format_real(estimate.cdf[i]),
                      banded ? format_real(estimate.variance[i]) : "",
                      banded ? format_real(estimate.ci_low[i]) : "",
                      banded ? format_real(estimate.ci_high[i]) : ""});
  }
  return body;
}

std::string campaign_summary_json(const CdfEstimate& estimate) {
  ordered_json doc;
  doc["n_qubits"] = estimate.n_qubits;
  doc["n_pairs"] = estimate.pairs.size();
  doc["n_included"] = estimate.n_included();
  doc["threshold"] = estimate.threshold;
  doc["t_grid_ns"] = estimate.t_grid;
  doc["cdf"] = estimate.cdf;
  std::optional<Real> max_met;
  long long without_met = 0;
  for (const PairRecord& record : estimate.pairs) {
    if (record.excluded) continue;
    if (!record.met_above) {
      ++without_met;
      continue;
    }
    if (!max_met || *record.met_above > *max_met) max_met = *record.met_above;
  }
  doc["max_met_above_ns"] = max_met ? ordered_json(*max_met) : ordered_json(nullptr);
  doc["n_pairs_without_met"] = without_met;
  doc["n_resamples"] = estimate.n_resamples;
  doc["confidence"] = estimate.confidence;
  return dump(doc);
}

// --- fit serializers ----------------------------------------------------------

namespace {

ordered_json fit_record(const CdfFit& fit) {
  ordered_json record;
  record["model"] = fit.model == CdfFit::Model::ConstantSpeed
                        ? "constant-speed"
                        : "expansion";
  record["d"] = fit.d;
  record["edge_speed"] = fit.v;
  if (fit.covariance.rows() > 0 && fit.covariance(0, 0) >= 0.0)
    record["edge_speed_se"] = std::sqrt(fit.covariance(0, 0));
  else
    record["edge_speed_se"] = nullptr;
  record["first_power"] = fit.first_power;
  record["n_terms"] = fit.coefficients.size();
  record["coefficients"] = fit.coefficients;
  record["n_parameters"] = fit.n_parameters();
  record["chi2"] = fit.chi2;
  record["n_dof"] = fit.n_dof;
  record["chi2_per_dof"] = fit.chi2_per_dof();
  return record;
}

std::size_t selected_index(const ExpansionSelection& selection) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < selection.trail.size(); ++i) {
    if (selection.trail[i].chi2_per_dof() <
        selection.trail[best].chi2_per_dof())
      best = i;
  }
  return best;
}

}  // namespace

std::string selection_trail_csv(const ExpansionSelection& selection) {
  std::string body =
      csv_line({"n_terms", "n_parameters", "edge_speed", "chi2", "n_dof",
                "chi2_per_dof", "selected"});
  const std::size_t winner = selected_index(selection);
  for (std::size_t i = 0; i < selection.trail.size(); ++i) {
    const CdfFit& fit = selection.trail[i];
    body += csv_line({std::to_string(fit.coefficients.size()),
                      std::to_string(fit.n_parameters()),
                      format_real(fit.v), format_real(fit.chi2),
                      std::to_string(fit.n_dof),
                      format_real(fit.chi2_per_dof()),
                      i == winner ? "1" : "0"});
  }
  return body;
}

std::string fit_curves_csv(const CdfEstimate& estimate, const CdfFit& hi_fit,
                           const CdfFit& best) {
  std::string body =
      csv_line({"t_ns", "cdf", "variance", "hi_fit", "best_fit"});
  const bool banded = estimate.variance.size() == estimate.t_grid.size();
  for (std::size_t i = 0; i < estimate.t_grid.size(); ++i) {
    const Real t = estimate.t_grid[i];
    body += csv_line({format_real(t), format_real(estimate.cdf[i]),
                      banded ? format_real(estimate.variance[i]) : "",
                      format_real(hi_fit.evaluate(t)),
                      format_real(best.evaluate(t))});
  }
  return body;
}

std::string fit_report_json(const CdfFit& hi_fit,
                            const ExpansionSelection& selection) {
  ordered_json doc;
  doc["constant_speed"] = fit_record(hi_fit);
  doc["selected"] = fit_record(selection.best);
  doc["trail"] = ordered_json::array();
  for (const CdfFit& fit : selection.trail)
    doc["trail"].push_back(fit_record(fit));
  return dump(doc);
}

EstimateTable parse_estimate_csv(const std::string& text,
                                 const std::string& origin) {
  const std::string where = origin.empty() ? "estimate" : origin;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> cells;
  std::string cell;
  for (char c : text) {
    if (c == '\r') continue;
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c == '\n') {
      cells.push_back(cell);
      cell.clear();
      rows.push_back(cells);
      cells.clear();
    } else {
      cell += c;
    }
  }
  if (!cell.empty() || !cells.empty()) {
    cells.push_back(cell);
    rows.push_back(cells);
  }
  if (rows.size() < 2)
    throw SchemaError(where, "need a header line and at least one data row");

  const std::vector<std::string>& header = rows.front();
  const auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw SchemaError(where, "missing column \"" + name + "\"");
  };
  const std::size_t t_col = column("t_ns");
  const std::size_t cdf_col = column("cdf");
  const std::size_t var_col = column("variance");

  const auto number = [&](const std::string& text_value, std::size_t row,
                          const std::string& name) {
    char* end = nullptr;
    const Real value = std::strtod(text_value.c_str(), &end);
    if (end == text_value.c_str() || *end != '\0')
      throw SchemaError(where + ":row " + std::to_string(row),
                        "column \"" + name + "\" is not a number");
    return value;
  };

  EstimateTable table;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::vector<std::string>& row = rows[r];
    const std::size_t needed = std::max({t_col, cdf_col, var_col});
    if (row.size() <= needed)
      throw SchemaError(where + ":row " + std::to_string(r),
                        "too few columns");
    table.t.push_back(number(row[t_col], r, "t_ns"));
    table.cdf.push_back(number(row[cdf_col], r, "cdf"));
    table.variance.push_back(number(row[var_col], r, "variance"));
  }
  return table;
}

// --- bounds serializers -----------------------------------------------------

std::string bounds_json(const GateTimeBudget& budget) {
  ordered_json doc;
  doc["pi_gate_time_ns"] = budget.pi_gate_time;
  doc["swap_alpha_max_time_ns"] = budget.swap_alpha_max_time;
  doc["one_qubit_max_ns"] = budget.one_qubit_max;
  doc["two_qubit_max_ns"] = budget.two_qubit_max;
  doc["two_qubit_from_01_max_ns"] = budget.two_qubit_from_01_max;
  doc["two_qubit_min_ns"] = budget.two_qubit_min;
  return dump(doc);
}

std::string bounds_text(const GateTimeBudget& budget) {
  std::string out;
  out += "gate-clock budget (ns)\n";
  out += "  pi gate time                 " + format_real(budget.pi_gate_time) +
         "\n";
  out += "  fractional-SWAP max time     " +
         format_real(budget.swap_alpha_max_time) + "\n";
  out += "  one-qubit preparation    <=  " +
         format_real(budget.one_qubit_max) + "\n";
  out += "  two-qubit preparation    <=  " +
         format_real(budget.two_qubit_max) + "\n";
  out += "  two-qubit from |01>      <=  " +
         format_real(budget.two_qubit_from_01_max) + "\n";
  out += "  two-qubit worst case     >=  " +
         format_real(budget.two_qubit_min) + "\n";
  return out;
}

// --- manifest ------------------------------------------------------------------

std::string manifest_json(const RunConfig& config, std::uint64_t config_hash,
                          Real wall_seconds,
                          const std::vector<std::string>& artifacts,
                          const std::vector<std::string>& warnings) {
  ordered_json doc;
  doc["tool"] = "spinmet";
  doc["version"] = "1.0.0";
  doc["task"] = task_name(config.task);
  doc["config_hash_fnv1a64"] = hex64(config_hash);
  doc["seed"] = config.seed;
  doc["parallelism"] = config.parallelism;
  doc["wall_time_seconds"] = wall_seconds;
  doc["artifacts"] = artifacts;
  doc["warnings"] = warnings;
  return dump(doc);
}

}  // namespace spinmet
