#pragma once

// Flat JSON config files for the dmh CLI. Keys mirror the long flag names with
// underscores; unknown keys and nested values are errors.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "dmh/experiments.hpp"

namespace dmh::cli {

namespace detail {

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InvalidArgument("");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw InvalidArgument("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InvalidArgument("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "' has the wrong type: " + v.dump());
  }
}

}  // namespace detail

inline OptimizerAlgorithm parse_algorithm(const std::string& name) {
  if (name == "adam") return OptimizerAlgorithm::adam;
  if (name == "sgd") return OptimizerAlgorithm::sgd;
  throw InvalidArgument("unknown optimizer '" + name + "' (expected adam or sgd)");
}

/// Overwrites the fields named in a flat JSON object.
inline void apply_config(experiments::ExperimentConfig& c, const nlohmann::json& doc) {
  using detail::get_as;
  if (!doc.is_object()) throw InvalidArgument("config must be a flat JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (v.is_object() || (v.is_array() && key != "chain_lengths"))
      throw InvalidArgument("config key '" + key + "' must hold a scalar");
    if (key == "experiment") {
      const auto name = get_as<std::string>(v, key);
      if (!c.experiment.empty() && name != c.experiment)
        throw InvalidArgument("config is for '" + name + "' but the command is '" + c.experiment + "'");
    } else if (key == "seed") {
      c.seed = get_as<std::uint64_t>(v, key);
    } else if (key == "chain_length") {
      c.chain_length = get_as<std::size_t>(v, key);
    } else if (key == "chain_lengths") {
      if (!v.is_array()) throw InvalidArgument("config key 'chain_lengths' must be an array");
      c.chain_lengths.clear();
      for (const auto& e : v) c.chain_lengths.push_back(get_as<std::size_t>(e, key));
    } else if (key == "reps") {
      c.reps = get_as<std::size_t>(v, key);
    } else if (key == "workers") {
      c.workers = get_as<std::size_t>(v, key);
    } else if (key == "burn_in") {
      c.burn_in = get_as<std::size_t>(v, key);
    } else if (key == "grid_start") {
      c.grid_start = get_as<double>(v, key);
    } else if (key == "grid_stop") {
      c.grid_stop = get_as<double>(v, key);
    } else if (key == "grid_points") {
      c.grid_points = get_as<std::size_t>(v, key);
    } else if (key == "theta0") {
      c.theta0 = get_as<double>(v, key);
    } else if (key == "optimizer") {
      c.optimizer.algorithm = parse_algorithm(get_as<std::string>(v, key));
    } else if (key == "lr") {
      c.optimizer.learning_rate = get_as<double>(v, key);
    } else if (key == "beta1") {
      c.optimizer.beta1 = get_as<double>(v, key);
    } else if (key == "beta2") {
      c.optimizer.beta2 = get_as<double>(v, key);
    } else if (key == "iterations") {
      c.optimizer.iterations = get_as<std::size_t>(v, key);
    } else if (key == "lattice") {
      c.lattice = get_as<std::size_t>(v, key);
    } else if (key == "theta") {
      c.coupling = get_as<double>(v, key);
    } else if (key == "coupled") {
      c.coupled = get_as<bool>(v, key);
    } else if (key == "observation") {
      c.observation = get_as<double>(v, key);
    } else if (key == "out") {
      c.out = get_as<std::string>(v, key);
    } else {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
}

inline nlohmann::json parse_config_text(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
}

inline nlohmann::json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace dmh::cli
