#pragma once

// Command-line front end: validated run configurations, dispatch onto the
// numerical modules (with order-preserving parallel sweeps), and CSV/JSON
// rendering.

#include <casimir/error.hpp>
#include <casimir/gaussian.hpp>
#include <casimir/lattice.hpp>
#include <casimir/plates.hpp>
#include <casimir/series.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace casimir::cli {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class Command {
  PlatesPair,
  PlatesStack,
  PlatesSweep,
  SeriesResum,
  GaussianEnergy,
  GaussianSweep,
  GaussianRg,
  LatticeCheck,
};

enum class Format { Csv, Json };

inline constexpr std::array<std::pair<Command, std::string_view>, 8> command_names = {{
    {Command::PlatesPair, "plates-pair"},
    {Command::PlatesStack, "plates-stack"},
    {Command::PlatesSweep, "plates-sweep"},
    {Command::SeriesResum, "series-resum"},
    {Command::GaussianEnergy, "gaussian-energy"},
    {Command::GaussianSweep, "gaussian-sweep"},
    {Command::GaussianRg, "gaussian-rg"},
    {Command::LatticeCheck, "lattice-check"},
}};

inline std::string_view describe(Command c) {
  switch (c) {
    case Command::PlatesPair: return "energy per area of two parallel plates";
    case Command::PlatesStack: return "energy of a geometric stack of plates";
    case Command::PlatesSweep: return "stack energy over a range of ratios x";
    case Command::SeriesResum: return "continued-fraction resummation of a power series";
    case Command::GaussianEnergy: return "shell energy of the Gaussian field";
    case Command::GaussianSweep: return "shell energy over a range of lambda, b or t";
    case Command::GaussianRg: return "one rescaling step of the coupling constants";
    case Command::LatticeCheck: return "Parseval residuals of a random lattice field";
  }
  return "";
}

inline std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : command_names) {
    if (cmd == c) return name;
  }
  return "unknown";
}

inline std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

/// Bad flags, bad config files, failed preconditions. Exit code 1.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable config or unwritable output. Exit code 1.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::PlatesPair;
  json params = json::object();  // typed, defaults filled in
  std::optional<std::string> output;
  Format format = Format::Json;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ---------------------------------------------------------------------------
// Parameter schema

enum class Kind { Real, Integer, Text, Flag, RealList, RealOrAuto };

struct ParamSpec {
  std::string name;
  Kind kind;
  bool required = false;
  json fallback = nullptr;  // default when absent and not required
  std::vector<std::string> choices = {};
};

namespace detail {

inline std::vector<ParamSpec> gaussian_base(bool all_required) {
  return {
      {"d", Kind::Integer, all_required},
      {"lambda", Kind::Real, all_required},
      {"b", Kind::Real, all_required},
      {"T", Kind::Real, all_required},
      {"t", Kind::Real, all_required},
      {"K", Kind::Real, all_required},
      {"L", Kind::Real, false, 0.0},
      {"higher", Kind::RealList, false, json::array()},
  };
}

inline std::vector<ParamSpec> build_schema(Command c) {
  const std::vector<std::string> directions = {"inflation", "contraction", "combined"};
  switch (c) {
    case Command::PlatesPair:
      return {{"a", Kind::Real, true}, {"kind", Kind::Text, false, "dirichlet", {"dirichlet", "em"}}};
    case Command::PlatesStack:
      return {{"a", Kind::Real, true},
              {"x", Kind::Real, true},
              {"direction", Kind::Text, true, nullptr, directions},
              {"truncate", Kind::Integer}};
    case Command::PlatesSweep:
      return {{"a", Kind::Real, true},
              {"direction", Kind::Text, true, nullptr, directions},
              {"x-min", Kind::Real},
              {"x-max", Kind::Real},
              {"steps", Kind::Integer},
              {"log", Kind::Flag, false, false},
              {"x-values", Kind::RealList},
              {"truncate", Kind::Integer}};
    case Command::SeriesResum:
      return {{"coeffs", Kind::RealList, true},
              {"x", Kind::Real, true},
              {"tol", Kind::Real, false, series::default_tolerance}};
    case Command::GaussianEnergy:
      return gaussian_base(true);
    case Command::GaussianSweep: {
      auto s = gaussian_base(false);
      s.insert(s.begin(), {"var", Kind::Text, true, nullptr, {"lambda", "b", "t"}});
      s.push_back({"min", Kind::Real});
      s.push_back({"max", Kind::Real});
      s.push_back({"steps", Kind::Integer});
      s.push_back({"log", Kind::Flag, false, false});
      s.push_back({"values", Kind::RealList});
      s.push_back({"fit", Kind::Flag, false, false});
      return s;
    }
    case Command::GaussianRg:
      return {{"d", Kind::Integer, true},
              {"b", Kind::Real, true},
              {"B", Kind::RealOrAuto, false, "auto"},
              {"t", Kind::Real, true},
              {"K", Kind::Real, true},
              {"L", Kind::Real, true}};
    case Command::LatticeCheck:
      return {{"d", Kind::Integer, true}, {"sites", Kind::Integer, true}, {"seed", Kind::Integer, false, 0}};
  }
  return {};
}

}  // namespace detail

inline const std::vector<ParamSpec>& schema(Command c) {
  static const std::map<Command, std::vector<ParamSpec>> table = [] {
    std::map<Command, std::vector<ParamSpec>> m;
    for (const auto& [cmd, name] : command_names) m[cmd] = detail::build_schema(cmd);
    return m;
  }();
  return table.at(c);
}

// ---------------------------------------------------------------------------
// Parsing and validation

namespace detail {

inline const ParamSpec* find_spec(Command c, const std::string& key) {
  for (const auto& spec : schema(c)) {
    if (spec.name == key) return &spec;
  }
  return nullptr;
}

inline double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw usage_error("invalid value for '" + key + "': expected a number, got '" + text + "'");
  }
}

inline json coerce_list(const std::string& key, const json& value) {
  if (!value.is_array()) throw usage_error("invalid value for '" + key + "': expected a JSON array of numbers");
  json out = json::array();
  for (const auto& v : value) {
    if (!v.is_number()) throw usage_error("invalid value for '" + key + "': array entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

/// Typed value from a JSON config entry.
inline json coerce(const ParamSpec& spec, const json& value) {
  const std::string& key = spec.name;
  switch (spec.kind) {
    case Kind::Real:
      if (!value.is_number()) throw usage_error("invalid value for '" + key + "': expected a number");
      return value.get<double>();
    case Kind::Integer:
      if (!value.is_number_integer()) throw usage_error("invalid value for '" + key + "': expected an integer");
      return value.get<std::int64_t>();
    case Kind::Text:
      if (!value.is_string()) throw usage_error("invalid value for '" + key + "': expected a string");
      return value;
    case Kind::Flag:
      if (!value.is_boolean()) throw usage_error("invalid value for '" + key + "': expected true or false");
      return value;
    case Kind::RealList:
      return coerce_list(key, value);
    case Kind::RealOrAuto:
      if (value.is_string() && value.get<std::string>() == "auto") return value;
      if (!value.is_number()) throw usage_error("invalid value for '" + key + "': expected a number or \"auto\"");
      return value.get<double>();
  }
  return value;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw usage_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Typed value from a command-line flag string. List flags accept an inline
/// JSON array or a path to a file holding one.
inline json coerce_flag(const ParamSpec& spec, const std::string& text) {
  const std::string& key = spec.name;
  switch (spec.kind) {
    case Kind::Real:
      return parse_real(key, text);
    case Kind::Integer: {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return static_cast<std::int64_t>(v);
      } catch (const std::exception&) {
        throw usage_error("invalid value for '" + key + "': expected an integer, got '" + text + "'");
      }
    }
    case Kind::Text:
      return text;
    case Kind::Flag:
      return true;
    case Kind::RealList: {
      const auto first = text.find_first_not_of(" \t");
      if (first != std::string::npos && text[first] == '[') {
        try {
          return coerce_list(key, json::parse(text));
        } catch (const json::parse_error&) {
          throw usage_error("invalid value for '" + key + "': malformed JSON array");
        }
      }
      return coerce_list(key, read_json_file(text));
    }
    case Kind::RealOrAuto:
      if (text == "auto") return text;
      return parse_real(key, text);
  }
  return text;
}

inline double real(const json& params, const char* key) { return params.at(key).get<double>(); }
inline std::int64_t integer(const json& params, const char* key) { return params.at(key).get<std::int64_t>(); }

inline void require(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw usage_error("invalid value for '" + key + "': " + why);
}

inline void require_finite(const json& params, const char* key) {
  if (params.contains(key) && params.at(key).is_number()) {
    require(std::isfinite(params.at(key).get<double>()), key, "must be finite");
  }
}

// Sweep range: either an explicit list or (min, max, steps[, log]).
inline void validate_range(const json& p, const std::string& values, const std::string& min,
                           const std::string& max) {
  if (p.contains(values)) {
    require(!p.at(values).empty(), values, "needs at least one value");
    for (const auto& v : p.at(values)) require(std::isfinite(v.get<double>()), values, "entries must be finite");
    return;
  }
  for (const std::string& key : {min, max, std::string("steps")}) {
    require(p.contains(key), key, "required (or give --" + values + ")");
  }
  require(std::isfinite(p.at(min).get<double>()), min, "must be finite");
  require(std::isfinite(p.at(max).get<double>()), max, "must be finite");
  require(p.at("steps").get<std::int64_t>() >= 2, "steps", "must be >= 2");
  require(p.at(min).get<double>() < p.at(max).get<double>(), min, "must be less than " + max);
  if (p.at("log").get<bool>()) require(p.at(min).get<double>() > 0.0, min, "logarithmic spacing needs a positive minimum");
}

inline void validate_gaussian(const json& p, bool skip_var, const std::string& var) {
  auto given = [&](const char* key) { return !(skip_var && var == key) && p.contains(key); };
  for (const char* key : {"d", "lambda", "b", "T", "t", "K"}) {
    if (!(skip_var && var == key)) require(p.contains(key), key, "required");
  }
  require(integer(p, "d") >= 1, "d", "dimension must be >= 1");
  if (given("lambda")) require(real(p, "lambda") > 0.0, "lambda", "cutoff must be positive");
  if (given("b")) require(real(p, "b") > 1.0, "b", "shell factor must exceed 1");
  require(real(p, "T") > 0.0, "T", "temperature must be positive");
  if (given("t")) require(real(p, "t") >= 0.0, "t", "t < 0 (below criticality) is unsupported");
  require(real(p, "K") >= 0.0, "K", "must be non-negative");
  require(real(p, "L") >= 0.0, "L", "must be non-negative");
  for (const auto& h : p.at("higher")) require(std::isfinite(h.get<double>()), "higher", "entries must be finite");
}

inline void validate(RunConfig& cfg) {
  json& p = cfg.params;
  for (const auto& spec : schema(cfg.command)) {
    if (p.contains(spec.name)) continue;
    if (spec.required) throw usage_error("missing required parameter '" + spec.name + "'");
    if (!spec.fallback.is_null()) p[spec.name] = spec.fallback;
  }
  for (const auto& spec : schema(cfg.command)) {
    if (!p.contains(spec.name)) continue;
    require_finite(p, spec.name.c_str());
    if (!spec.choices.empty()) {
      const auto v = p.at(spec.name).get<std::string>();
      if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
        throw usage_error("invalid value for '" + spec.name + "': '" + v + "' is not one of the allowed choices");
      }
    }
  }

  switch (cfg.command) {
    case Command::PlatesPair:
      require(real(p, "a") > 0.0, "a", "spacing must be positive");
      break;
    case Command::PlatesStack:
      require(real(p, "a") > 0.0, "a", "spacing must be positive");
      require(real(p, "x") > 1.0, "x", "ratio must exceed 1");
      [[fallthrough]];
    case Command::PlatesSweep:
      require(real(p, "a") > 0.0, "a", "spacing must be positive");
      if (p.contains("truncate")) {
        require(integer(p, "truncate") >= 2, "truncate", "a stack needs at least two plates");
        require(p.at("direction") != "combined", "truncate", "truncation applies to inflation or contraction stacks");
      }
      if (cfg.command == Command::PlatesSweep) validate_range(p, "x-values", "x-min", "x-max");
      break;
    case Command::SeriesResum: {
      const auto& c = p.at("coeffs");
      require(!c.empty(), "coeffs", "needs at least one coefficient");
      for (const auto& v : c) require(std::isfinite(v.get<double>()), "coeffs", "entries must be finite");
      require(c.front().get<double>() != 0.0, "coeffs", "leading coefficient must be non-zero");
      require(real(p, "tol") > 0.0, "tol", "must be positive");
      break;
    }
    case Command::GaussianEnergy:
      validate_gaussian(p, false, "");
      break;
    case Command::GaussianSweep: {
      const auto var = p.at("var").get<std::string>();
      validate_gaussian(p, true, var);
      validate_range(p, "values", "min", "max");
      break;
    }
    case Command::GaussianRg:
      require(integer(p, "d") >= 1, "d", "dimension must be >= 1");
      require(real(p, "b") > 1.0, "b", "rescale factor must exceed 1");
      if (p.at("B").is_number()) require(real(p, "B") > 0.0, "B", "must be positive");
      break;
    case Command::LatticeCheck:
      require(integer(p, "d") == 1 || integer(p, "d") == 2, "d", "lattice checks support d = 1 or 2");
      require(integer(p, "sites") >= 2, "sites", "need at least two sites per axis");
      require(integer(p, "seed") >= 0, "seed", "must be non-negative");
      break;
  }
}

inline std::optional<Command> command_from_name(const std::string& name) {
  for (const auto& [cmd, n] : command_names) {
    if (n == name) return cmd;
  }
  return std::nullopt;
}

// Applies top-level keys of a config object onto `cfg`.
inline std::string type_name(const ParamSpec& spec) {
  switch (spec.kind) {
    case Kind::Real: return "REAL";
    case Kind::Integer: return "INT";
    case Kind::RealList: return "JSON-ARRAY|FILE";
    case Kind::RealOrAuto: return "REAL|auto";
    case Kind::Flag: return "";
    case Kind::Text: break;
  }
  std::string out;
  for (const auto& c : spec.choices) out += (out.empty() ? "" : "|") + c;
  return out.empty() ? "TEXT" : out;
}

inline void apply_config_object(RunConfig& cfg, const json& obj) {
  if (!obj.is_object()) throw usage_error("config must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "command") {
      if (!value.is_string() || command_from_name(value.get<std::string>()) != cfg.command) {
        throw usage_error("invalid value for 'command': config is for a different command");
      }
    } else if (key == "out") {
      if (!value.is_string()) throw usage_error("invalid value for 'out': expected a path");
      cfg.output = value.get<std::string>();
    } else if (key == "format") {
      if (value != "csv" && value != "json") throw usage_error("invalid value for 'format': expected csv or json");
      cfg.format = value == "csv" ? Format::Csv : Format::Json;
    } else if (const ParamSpec* spec = find_spec(cfg.command, key)) {
      cfg.params[key] = coerce(*spec, value);
    } else {
      throw usage_error("unknown key '" + key + "' for " + std::string(to_string(cfg.command)));
    }
  }
}

}  // namespace detail

/// Validated config from a JSON object carrying a "command" key.
inline RunConfig config_from_json(const json& obj) {
  if (!obj.is_object() || !obj.contains("command") || !obj.at("command").is_string()) {
    throw usage_error("missing required parameter 'command'");
  }
  const auto cmd = detail::command_from_name(obj.at("command").get<std::string>());
  if (!cmd) throw usage_error("invalid value for 'command': unknown command");
  RunConfig cfg;
  cfg.command = *cmd;
  detail::apply_config_object(cfg, obj);
  detail::validate(cfg);
  return cfg;
}

/// Flat JSON form accepted back by config_from_json and --config.
inline ordered_json to_json(const RunConfig& cfg) {
  ordered_json out;
  out["command"] = to_string(cfg.command);
  for (const auto& spec : schema(cfg.command)) {
    if (cfg.params.contains(spec.name)) out[spec.name] = cfg.params.at(spec.name);
  }
  if (cfg.output) out["out"] = *cfg.output;
  out["format"] = to_string(cfg.format);
  return out;
}

/// Thrown for --help; carries the help text. Exit code 0.
class help_requested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `command --flag value ...` (program name excluded). Values from
/// --config are applied first; flags override them.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Casimir energies, self-similar resummation and Gaussian shell integrals", "casimir_cli"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> out_flag, format_flag, config_flag;
  app.add_option("--out", out_flag, "output path (default: stdout)");
  app.add_option("--format", format_flag, "csv or json (default: json)")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", config_flag, "JSON config file; flags override its values");

  std::map<Command, std::map<std::string, std::string>> raw;
  std::map<Command, std::map<std::string, bool>> flags;
  std::map<Command, std::map<std::string, CLI::Option*>> options;
  std::map<Command, CLI::App*> subs;
  for (const auto& [cmd, name] : command_names) {
    CLI::App* sub = app.add_subcommand(std::string(name), std::string(describe(cmd)));
    subs[cmd] = sub;
    for (const auto& spec : schema(cmd)) {
      const std::string flag = "--" + spec.name;
      if (spec.kind == Kind::Flag) {
        options[cmd][spec.name] = sub->add_flag(flag, flags[cmd][spec.name]);
      } else {
        options[cmd][spec.name] = sub->add_option(flag, raw[cmd][spec.name])->type_name(detail::type_name(spec));
      }
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw help_requested(app.help());
  } catch (const CLI::ParseError& e) {
    throw usage_error(e.what());
  }

  RunConfig cfg;
  for (const auto& [cmd, sub] : subs) {
    if (sub->parsed()) cfg.command = cmd;
  }
  if (subs[cfg.command]->count("--help") > 0) throw help_requested(subs[cfg.command]->help());

  if (config_flag) detail::apply_config_object(cfg, detail::read_json_file(*config_flag));
  for (const auto& spec : schema(cfg.command)) {
    if (options[cfg.command][spec.name]->count() == 0) continue;
    cfg.params[spec.name] = detail::coerce_flag(spec, raw[cfg.command][spec.name]);
  }
  if (out_flag) cfg.output = *out_flag;
  if (format_flag) cfg.format = *format_flag == "csv" ? Format::Csv : Format::Json;
  detail::validate(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Execution

struct Record {
  ordered_json fields;
  std::optional<std::string> error;
};

struct Column {
  std::string header;
  std::string key;
};

struct ResultSet {
  Command command = Command::PlatesPair;
  std::vector<Column> columns;
  std::vector<Record> records;
  std::optional<gaussian::PowerLawFit> fit;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const Record& r) { return r.error.has_value(); }));
  }
};

namespace detail {

using Compute = std::function<ordered_json(const ordered_json&)>;

/// Runs `compute` over every input on up to `threads` workers. Records come
/// back in input order; a throwing point keeps its inputs, gets null outputs
/// and an error message.
inline std::vector<Record> evaluate(const std::vector<ordered_json>& inputs,
                                    const std::vector<std::string>& output_keys, const Compute& compute,
                                    unsigned threads) {
  std::vector<Record> out(inputs.size());
  auto one = [&](std::size_t i) {
    Record r{inputs[i], std::nullopt};
    try {
      const ordered_json result = compute(inputs[i]);
      for (const auto& [key, value] : result.items()) r.fields[key] = value;
    } catch (const std::exception& e) {
      for (const auto& key : output_keys) r.fields[key] = nullptr;
      r.error = e.what();
    }
    out[i] = std::move(r);
  };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), inputs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) one(i);
      });
    }
  }
  return out;
}

inline std::vector<double> sweep_values(const json& p, const std::string& values, const std::string& min,
                                        const std::string& max) {
  if (p.contains(values)) return p.at(values).get<std::vector<double>>();
  const double lo = p.at(min).get<double>();
  const double hi = p.at(max).get<double>();
  const auto steps = static_cast<std::size_t>(p.at("steps").get<std::int64_t>());
  const bool log = p.at("log").get<bool>();
  std::vector<double> v(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(steps - 1);
    v[i] = log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
  }
  v.front() = lo;
  v.back() = hi;
  return v;
}

inline plates::Direction direction_from(const std::string& s) {
  if (s == "inflation") return plates::Direction::Inflation;
  if (s == "contraction") return plates::Direction::Contraction;
  return plates::Direction::Combined;
}

inline ordered_json plates_inputs(const json& p, double x) {
  ordered_json in;
  in["a"] = real(p, "a");
  in["x"] = x;
  in["direction"] = p.at("direction");
  in["N"] = p.contains("truncate") ? json(p.at("truncate")) : json(nullptr);
  return in;
}

inline ordered_json plates_compute(const ordered_json& in) {
  plates::StackConfig config;
  config.spacing = in.at("a").get<double>();
  config.ratio = in.at("x").get<double>();
  config.direction = direction_from(in.at("direction").get<std::string>());
  if (!in.at("N").is_null()) config.truncation = in.at("N").get<int>();
  const plates::EnergyDensity e = plates::stack_energy(config);
  return {{"value", e.value}, {"regularized", e.regularized}};
}

inline ordered_json gaussian_inputs(const json& p) {
  ordered_json in;
  for (const char* key : {"d", "lambda", "b", "T", "t", "K", "L", "higher"}) in[key] = p.at(key);
  return in;
}

inline ordered_json gaussian_compute(const ordered_json& in) {
  gaussian::LGParams params{in.at("t").get<double>(), in.at("K").get<double>(), in.at("L").get<double>(),
                            in.at("higher").get<std::vector<double>>()};
  gaussian::ShellSpec shell{in.at("d").get<int>(), in.at("lambda").get<double>(), in.at("b").get<double>(),
                            in.at("T").get<double>()};
  const auto r = gaussian::casimir_energy_density(params, shell);
  return {{"value", r.value}, {"abs_error_estimate", r.abs_error_estimate}, {"evaluations", r.evaluations}};
}

const std::vector<Column> plates_columns = {{"a", "a"},     {"x", "x"},         {"direction", "direction"},
                                            {"N", "N"},     {"value", "value"}, {"regularized", "regularized"}};
const std::vector<Column> gaussian_columns = {{"d", "d"}, {"lambda", "lambda"}, {"b", "b"},
                                              {"T", "T"}, {"t", "t"},           {"K", "K"},
                                              {"L", "L"}, {"value", "value"},   {"error", "abs_error_estimate"}};

}  // namespace detail

/// Dispatches a validated config. `threads` bounds sweep parallelism
/// (0 = hardware concurrency); results are identical for any value.
inline ResultSet execute(const RunConfig& cfg, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const json& p = cfg.params;
  ResultSet rs;
  rs.command = cfg.command;

  switch (cfg.command) {
    case Command::PlatesPair: {
      rs.columns = {{"a", "a"}, {"kind", "kind"}, {"value", "value"}};
      ordered_json in{{"a", detail::real(p, "a")}, {"kind", p.at("kind").get<std::string>()}};
      rs.records = detail::evaluate({in}, {"value"}, [](const ordered_json& i) {
        const auto kind = i.at("kind") == "em" ? plates::FieldKind::Electromagnetic : plates::FieldKind::DirichletScalar;
        return ordered_json{{"value", plates::pair_interaction_energy(i.at("a").get<double>(), kind).value}};
      }, 1);
      break;
    }
    case Command::PlatesStack:
      rs.columns = detail::plates_columns;
      rs.records = detail::evaluate({detail::plates_inputs(p, detail::real(p, "x"))}, {"value", "regularized"},
                                    detail::plates_compute, 1);
      break;
    case Command::PlatesSweep: {
      rs.columns = detail::plates_columns;
      std::vector<ordered_json> inputs;
      for (double x : detail::sweep_values(p, "x-values", "x-min", "x-max")) inputs.push_back(detail::plates_inputs(p, x));
      rs.records = detail::evaluate(inputs, {"value", "regularized"}, detail::plates_compute, threads);
      break;
    }
    case Command::SeriesResum: {
      rs.columns = {{"value", "value"}, {"converged", "converged"}, {"convergents_used", "convergents_used"},
                    {"residual", "residual"}};
      const std::vector<std::string> keys = {"value", "converged", "convergents_used", "residual"};
      rs.records = detail::evaluate({ordered_json::object()}, keys, [&](const ordered_json&) {
        const series::PowerSeries s(p.at("coeffs").get<std::vector<double>>());
        const auto r = series::self_similar_sum(s, detail::real(p, "x"), detail::real(p, "tol"));
        return ordered_json{{"value", r.value}, {"converged", r.converged},
                            {"convergents_used", r.convergents_used}, {"residual", r.residual}};
      }, 1);
      break;
    }
    case Command::GaussianEnergy:
      rs.columns = detail::gaussian_columns;
      rs.records = detail::evaluate({detail::gaussian_inputs(p)}, {"value", "abs_error_estimate", "evaluations"},
                                    detail::gaussian_compute, 1);
      break;
    case Command::GaussianSweep: {
      rs.columns = detail::gaussian_columns;
      const auto var = p.at("var").get<std::string>();
      std::vector<ordered_json> inputs;
      for (double v : detail::sweep_values(p, "values", "min", "max")) {
        json point = p;
        point[var] = v;
        inputs.push_back(detail::gaussian_inputs(point));
      }
      rs.records = detail::evaluate(inputs, {"value", "abs_error_estimate", "evaluations"},
                                    detail::gaussian_compute, threads);
      if (p.at("fit").get<bool>()) {
        // distance scale b/Lambda for shell sweeps, t itself for t sweeps
        std::vector<std::pair<double, double>> samples;
        for (const auto& r : rs.records) {
          if (r.error) continue;
          const auto& f = r.fields;
          const double scale = var == "t" ? f.at("t").get<double>() : f.at("b").get<double>() / f.at("lambda").get<double>();
          samples.emplace_back(scale, f.at("value").get<double>());
        }
        try {
          rs.fit = gaussian::fit_power_law(samples);
        } catch (const casimir::error&) {
          rs.fit.reset();
        }
      }
      break;
    }
    case Command::GaussianRg: {
      rs.columns = {{"d", "d"}, {"b", "b"}, {"B", "B"}, {"t", "t"}, {"K", "K"}, {"L", "L"},
                    {"t_prime", "t_prime"}, {"K_prime", "K_prime"}, {"L_prime", "L_prime"}};
      const int d = static_cast<int>(detail::integer(p, "d"));
      const double b = detail::real(p, "b");
      const double B = p.at("B").is_number() ? detail::real(p, "B") : gaussian::fixed_point_B(b, d);
      ordered_json in{{"d", d}, {"b", b}, {"B", B}, {"t", detail::real(p, "t")}, {"K", detail::real(p, "K")}, {"L", detail::real(p, "L")}};
      rs.records = detail::evaluate({in}, {"t_prime", "K_prime", "L_prime"}, [](const ordered_json& i) {
        const gaussian::LGParams params{i.at("t").get<double>(), i.at("K").get<double>(), i.at("L").get<double>(), {}};
        const auto r = gaussian::rg_rescale(params, i.at("b").get<double>(), i.at("B").get<double>(), i.at("d").get<int>());
        return ordered_json{{"t_prime", r.t}, {"K_prime", r.K}, {"L_prime", r.L}};
      }, 1);
      break;
    }
    case Command::LatticeCheck: {
      rs.columns = {{"d", "d"}, {"sites", "sites"}, {"seed", "seed"},
                    {"phi2_residual", "phi2_residual"}, {"grad2_residual", "grad2_residual"}};
      ordered_json in{{"d", detail::integer(p, "d")}, {"sites", detail::integer(p, "sites")}, {"seed", detail::integer(p, "seed")}};
      rs.records = detail::evaluate({in}, {"phi2_residual", "grad2_residual"}, [](const ordered_json& i) {
        const auto field = lattice::white_noise(i.at("d").get<int>(), i.at("sites").get<std::size_t>(),
                                                i.at("seed").get<std::uint64_t>());
        const auto r = lattice::parseval_residuals(field);
        return ordered_json{{"phi2_residual", r.phi2_residual}, {"grad2_residual", r.grad2_residual}};
      }, 1);
      break;
    }
  }
  return rs;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

/// 17 significant digits; integral values keep a trailing ".0".
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

inline std::string csv_cell(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_real(v.get<double>());
  if (v.is_number()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace detail

/// CSV (fixed header per command) or JSON (array of records, stable key order).
inline std::string render(const ResultSet& rs, Format format) {
  if (rs.records.empty()) throw std::invalid_argument("cannot render an empty result set");
  std::ostringstream os;
  if (format == Format::Csv) {
    for (std::size_t i = 0; i < rs.columns.size(); ++i) os << (i ? "," : "") << rs.columns[i].header;
    os << '\n';
    for (const auto& r : rs.records) {
      for (std::size_t i = 0; i < rs.columns.size(); ++i) {
        os << (i ? "," : "") << detail::csv_cell(r.fields.value(rs.columns[i].key, ordered_json()));
      }
      os << '\n';
    }
    if (rs.fit) {
      os << "# fit exponent=" << detail::format_real(rs.fit->exponent)
         << " r_squared=" << detail::format_real(rs.fit->r_squared) << '\n';
    }
    return os.str();
  }

  ordered_json out = ordered_json::array();
  for (const auto& r : rs.records) {
    ordered_json rec = r.fields;
    if (r.error) rec["error"] = *r.error;
    out.push_back(std::move(rec));
  }
  if (rs.fit) out.push_back({{"fit", {{"exponent", rs.fit->exponent}, {"r_squared", rs.fit->r_squared}}}});
  os << out.dump(2) << '\n';
  return os.str();
}

/// Full CLI run. Exit codes: 0 success or partial failure, 1 usage or I/O
/// error, 2 when every evaluation failed.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, unsigned threads = 0) {
  try {
    const RunConfig cfg = parse_config(args);
    const ResultSet rs = execute(cfg, threads);
    for (std::size_t i = 0; i < rs.records.size(); ++i) {
      if (rs.records[i].error) err << "row " << i << ": " << *rs.records[i].error << '\n';
    }
    const std::string text = render(rs, cfg.format);
    if (cfg.output) {
      std::ofstream file(*cfg.output, std::ios::binary);
      if (!file || !(file << text) || !file.flush()) throw io_error("cannot write '" + *cfg.output + "'");
    } else {
      out << text;
    }
    return rs.failures() == rs.records.size() ? 2 : 0;
  } catch (const help_requested& h) {
    out << h.what();
    return 0;
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const io_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace casimir::cli
