#include "runner/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sideinfo/errors.hpp"

namespace sideinfo::runner {
namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : object.items())
    if (!allowed.contains(key)) throw ConfigError("unknown field '" + key + "' in " + where);
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + key + "' is missing or has the wrong type");
  }
}

std::uint64_t count_of(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError("field '" + key + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::uint64_t get_count(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("field '" + key + "' is missing");
  return count_of(j.at(key), key);
}

// A single integer or an array of them.
std::vector<std::uint64_t> get_counts(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) return {count_of(v, key)};
  std::vector<std::uint64_t> out;
  for (const json& item : v) out.push_back(count_of(item, key));
  return out;
}

SingleLetterModel component(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const auto kind = get_as<std::string>(j, "kind");
  if (kind == "dsbs") {
    reject_unknown(j, {"kind", "crossover"}, where);
    return SingleLetterModel::iid(dsbs(get_as<double>(j, "crossover")), {2, 2});
  }
  if (kind == "iid") {
    reject_unknown(j, {"kind", "x1_size", "x2_size", "p"}, where);
    const PairAlphabet alphabet{get_count(j, "x1_size"), get_count(j, "x2_size")};
    if (alphabet.x1_size == 0 || alphabet.x2_size == 0) throw ConfigError(where + ": alphabet sizes must be positive");
    return SingleLetterModel::iid(Dist(get_as<std::vector<double>>(j, "p"), kProbTolerance), alphabet);
  }
  throw ConfigError(where + ": unknown model kind '" + kind + "'");
}

SingleLetterModel parse_model(const json& j) {
  if (j.is_object() && j.value("kind", "") == "mixture") {
    reject_unknown(j, {"kind", "alpha", "components"}, "model");
    const json& parts = j.at("components");
    if (!parts.is_array() || parts.size() != 2) throw ConfigError("a mixture needs exactly two components");
    const auto p1 = component(parts[0], "model.components[0]");
    const auto p2 = component(parts[1], "model.components[1]");
    if (!(p1.alphabet() == p2.alphabet())) throw ConfigError("mixture components use different alphabets");
    return SingleLetterModel::mixture(get_as<double>(j, "alpha"), p1.p(), p2.p(), p1.alphabet());
  }
  return component(j, "model");
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::verify, Command::optimal, Command::multi, Command::sweep, Command::exponent,
                    Command::mixed, Command::probe})
    if (name == to_string(c)) return c;
  throw ConfigError("unknown command '" + name + "'");
}

Params parse_params(const json& j) {
  reject_unknown(j, {"n", "M", "R", "rates", "k", "k_max", "grid_step", "budget", "trials", "n_values", "a"},
                 "params");
  Params p;
  if (j.contains("n")) p.n = static_cast<unsigned>(get_count(j, "n"));
  if (j.contains("M")) p.sizes = get_counts(j, "M");
  if (j.contains("R")) p.rate = get_as<double>(j, "R");
  if (j.contains("rates")) p.rates = get_as<std::vector<double>>(j, "rates");
  if (j.contains("k")) p.k = get_count(j, "k");
  if (j.contains("k_max")) p.k_max = get_count(j, "k_max");
  if (j.contains("grid_step")) p.grid_step = get_as<double>(j, "grid_step");
  if (j.contains("budget")) p.budget = get_count(j, "budget");
  if (j.contains("trials")) p.trials = get_count(j, "trials");
  if (j.contains("n_values"))
    for (std::uint64_t n : get_counts(j, "n_values")) p.n_values.push_back(static_cast<unsigned>(n));
  if (j.contains("a")) p.a = get_as<double>(j, "a");
  return p;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

const char* to_string(Command command) {
  switch (command) {
    case Command::verify: return "verify";
    case Command::optimal: return "optimal";
    case Command::multi: return "multi";
    case Command::sweep: return "sweep";
    case Command::exponent: return "exponent";
    case Command::mixed: return "mixed";
    case Command::probe: return "probe";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("the configuration must be a JSON object");
  reject_unknown(doc, {"command", "model", "params", "seed", "workers", "output_path", "timings"}, "configuration");

  ExperimentConfig config;
  try {
    config.command = parse_command(get_as<std::string>(doc, "command"));
    if (doc.contains("model")) config.model = parse_model(doc.at("model"));
    if (doc.contains("params")) {
      if (!doc.at("params").is_object()) throw ConfigError("params must be an object");
      config.params = parse_params(doc.at("params"));
    }
    if (doc.contains("seed")) config.seed = get_count(doc, "seed");
    if (doc.contains("workers")) config.workers = static_cast<unsigned>(get_count(doc, "workers"));
    if (doc.contains("output_path")) config.output_path = get_as<std::string>(doc, "output_path");
    if (doc.contains("timings")) config.timings = get_as<bool>(doc, "timings");
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const ExperimentConfig& config) {
  const Params& p = config.params;
  require(config.workers >= 1, "workers must be at least 1");
  if (config.command == Command::verify) return;
  require(config.model.has_value(), std::string("command '") + to_string(config.command) + "' needs a model");
  const SingleLetterModel& model = *config.model;
  const bool iid = model.kind() == SingleLetterModel::Kind::iid;
  auto rate_ok = [](double r) { return std::isfinite(r) && r >= 0.0; };
  if (p.n) require(*p.n >= 1, "n must be at least 1");
  for (unsigned n : p.n_values) require(n >= 1, "n_values must be at least 1");
  if (p.grid_step) require(*p.grid_step > 0.0 && *p.grid_step <= 0.1, "grid_step must lie in (0, 0.1]");
  if (p.a) require(*p.a >= 0.0 && *p.a < 1.0, "a must lie in [0, 1)");

  switch (config.command) {
    case Command::verify:
      break;
    case Command::optimal:
      require(!p.sizes.empty(), "optimal needs M");
      for (auto m : p.sizes) require(m >= 1, "M must be at least 1");
      break;
    case Command::multi:
      require(!p.sizes.empty(), "multi needs M");
      for (auto m : p.sizes) require(m >= 1, "M must be at least 1");
      require(p.k || p.k_max, "multi needs k or k_max");
      if (p.budget) require(*p.budget >= 1, "budget must be at least 1");
      break;
    case Command::sweep:
      require(p.rate && rate_ok(*p.rate), "sweep needs a nonnegative R");
      require(!p.n_values.empty(), "sweep needs n_values");
      break;
    case Command::exponent:
      require(iid, "exponent needs an iid or dsbs model");
      require(p.rate || !p.rates.empty(), "exponent needs R or rates");
      for (double r : p.rates) require(rate_ok(r), "rates must be nonnegative");
      if (p.rate) require(rate_ok(*p.rate), "R must be nonnegative");
      for (std::size_t i = 1; i < p.rates.size(); ++i)
        require(p.rates[i] > p.rates[i - 1], "rates must be strictly increasing");
      break;
    case Command::mixed:
      require(!iid, "mixed needs a mixture model");
      require(p.rate && rate_ok(*p.rate), "mixed needs a nonnegative R");
      require(!p.n_values.empty(), "mixed needs n_values");
      break;
    case Command::probe:
      require(p.trials && *p.trials >= 1, "probe needs trials >= 1");
      break;
  }
}

}  // namespace sideinfo::runner
