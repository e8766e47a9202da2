/*
 * Copyright 2026 The ctfsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ctf/config.hpp"

#include "ctf/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace ctf {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string &key, const std::string &value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception &) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::uint64_t to_uint(const std::string &key, const std::string &value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value +
                      "'");
  }
  return v;
}

bool to_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

struct FitKeys {
  std::optional<double> x1, x2, x3;
  bool any() const { return x1 || x2 || x3; }
};

void apply_device_key(DeviceParams &d, FitKeys &ltd, FitKeys &ltp, const std::string &key,
                      const std::string &value) {
  if (key == "ltd.x1") {
    ltd.x1 = to_double(key, value);
  } else if (key == "ltd.x2") {
    ltd.x2 = to_double(key, value);
  } else if (key == "ltd.x3") {
    ltd.x3 = to_double(key, value);
  } else if (key == "ltp.x1") {
    ltp.x1 = to_double(key, value);
  } else if (key == "ltp.x2") {
    ltp.x2 = to_double(key, value);
  } else if (key == "ltp.x3") {
    ltp.x3 = to_double(key, value);
  } else if (key == "noise_fraction") {
    d.noise_fraction = to_double(key, value);
  } else if (key == "g_min") {
    d.g_min = to_double(key, value);
  } else if (key == "g_max") {
    d.g_max = to_double(key, value);
  } else if (key == "g_center") {
    d.g_center = to_double(key, value);
  } else {
    throw ConfigError("unknown device key '" + key + "'");
  }
}

UpdateLaw law_from_keys(const FitKeys &keys, const char *name) {
  if (!keys.x1 || !keys.x2 || !keys.x3) {
    throw ConfigError(std::string("device: ") + name + ".x1, .x2 and .x3 must be given together");
  }
  return UpdateLaw::from_fit({*keys.x1, *keys.x2, *keys.x3});
}

void finish_device(DeviceParams &d, const FitKeys &ltd, const FitKeys &ltp) {
  if (ltd.any()) {
    d.potentiation = law_from_keys(ltd, "ltd");
  }
  if (ltp.any()) {
    d.depression = law_from_keys(ltp, "ltp");
  }
}

pt::ptree read_tree(std::string_view text) {
  std::istringstream in{std::string(text)};
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  return tree;
}

void apply_experiment_key(ExperimentConfig &c, DeviceParams &d, FitKeys &ltd, FitKeys &ltp,
                          const std::string &key, const std::string &value) {
  if (key == "experiment") {
    // handled first
  } else if (key == "backend") {
    if (value == "crossbar") {
      c.backend = BackendKind::crossbar;
    } else if (value == "float") {
      c.backend = BackendKind::floating;
    } else {
      throw ConfigError("backend must be 'crossbar' or 'float'");
    }
  } else if (key == "alpha") {
    c.alpha = to_double(key, value);
  } else if (key == "k") {
    c.k = to_double(key, value);
  } else if (key == "pl" || key == "train_length") {
    c.train_length = static_cast<int>(to_uint(key, value));
  } else if (key == "cycle") {
    if (value == "positive") {
      c.cycle = UpdateCycle::positive;
    } else if (value == "negative") {
      c.cycle = UpdateCycle::negative;
    } else {
      throw ConfigError("cycle must be 'positive' or 'negative'");
    }
  } else if (key == "epochs") {
    c.epochs = static_cast<int>(to_uint(key, value));
  } else if (key == "bias") {
    c.bias = to_bool(key, value);
  } else if (key == "train_subset") {
    c.train_subset = to_uint(key, value);
  } else if (key == "test_subset") {
    c.test_subset = to_uint(key, value);
  } else if (key == "checkpoint_every") {
    c.checkpoint_every = to_uint(key, value);
  } else if (key == "checkpoint_test") {
    c.checkpoint_test = to_bool(key, value);
  } else if (key == "mnist_dir") {
    c.mnist_dir = value;
  } else if (key == "train_features") {
    c.train_features = value;
  } else if (key == "test_features") {
    c.test_features = value;
  } else if (key == "episodes") {
    c.episodes = static_cast<int>(to_uint(key, value));
  } else if (key == "epsilon") {
    c.epsilon = to_double(key, value);
  } else if (key == "gamma") {
    c.gamma = to_double(key, value);
  } else if (key == "max_steps") {
    c.max_steps = to_uint(key, value);
  } else if (key == "final_window") {
    c.final_window = to_uint(key, value);
  } else if (key == "index_table_size") {
    c.index_table_size = to_uint(key, value);
  } else if (key == "k_values") {
    c.k_values = parse_number_list(value);
  } else if (key == "noise_values") {
    c.noise_values = parse_number_list(value);
  } else if (key == "sweep_weight_range") {
    c.sweep_weight_range = to_double(key, value);
  } else if (key == "repetitions") {
    c.repetitions = static_cast<int>(to_uint(key, value));
  } else if (key == "seed") {
    c.seed = to_uint(key, value);
  } else if (key == "jobs") {
    c.jobs = static_cast<unsigned>(to_uint(key, value));
  } else if (key == "out") {
    c.out_dir = value;
  } else {
    // Device keys may also sit in [experiment].
    apply_device_key(d, ltd, ltp, key, value);
  }
}

} // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
  case ExperimentKind::mnist:
    return "mnist";
  case ExperimentKind::cifar10:
    return "cifar10";
  case ExperimentKind::cifar100:
    return "cifar100";
  case ExperimentKind::mountain_car:
    return "mountain_car";
  case ExperimentKind::k_sweep:
    return "k_sweep";
  case ExperimentKind::noise_sweep:
    return "noise_sweep";
  case ExperimentKind::toy_smoke:
    return "toy_smoke";
  }
  return "?";
}

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::crossbar ? "crossbar" : "float";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::mnist, ExperimentKind::cifar10, ExperimentKind::cifar100,
                 ExperimentKind::mountain_car, ExperimentKind::k_sweep, ExperimentKind::noise_sweep,
                 ExperimentKind::toy_smoke}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  throw ConfigError("unknown experiment '" + std::string(text) + "'");
}

ExperimentConfig defaults_for(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.device.noise_fraction = 1.0;
  switch (kind) {
  case ExperimentKind::mnist:
    break;
  case ExperimentKind::cifar10:
  case ExperimentKind::cifar100: {
    const std::string name(to_string(kind));
    c.alpha = 0.1;
    c.train_features = "data/" + name + "_train.ctff";
    c.test_features = "data/" + name + "_test.ctff";
    break;
  }
  case ExperimentKind::mountain_car:
    c.alpha = 0.00625;
    c.repetitions = 100;
    break;
  case ExperimentKind::k_sweep:
    c.device.noise_fraction = 0.1;
    c.repetitions = 1;
    break;
  case ExperimentKind::noise_sweep:
    c.epochs = 3;
    c.repetitions = 4;
    break;
  case ExperimentKind::toy_smoke:
    c.alpha = 0.1;
    c.epochs = 50;
    c.repetitions = 1;
    c.checkpoint_every = 0;
    c.device.noise_fraction = 0.0;
    break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string &m) { throw ConfigError(m); };
  if (!(alpha >= 0.0)) {
    fail("alpha must be >= 0");
  }
  if (!(effective_k() > 0.0)) {
    fail("k must be > 0");
  }
  if (train_length < 1) {
    fail("pl must be >= 1");
  }
  if (repetitions < 1) {
    fail("repetitions must be >= 1");
  }
  if (epochs < 1 || episodes < 1) {
    fail("epochs and episodes must be >= 1");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    fail("epsilon must lie in [0, 1]");
  }
  if (max_steps < 1 || final_window < 1) {
    fail("max_steps and final_window must be >= 1");
  }
  for (double k : k_values) {
    if (!(k > 0.0)) {
      fail("k_values must be positive");
    }
  }
  for (double n : noise_values) {
    if (!(n >= 0.0)) {
      fail("noise_values must be >= 0");
    }
  }
  DeviceModel check(device); // throws ConfigError on a bad window
}

ExperimentConfig parse_config(std::string_view text) {
  const pt::ptree tree = read_tree(text);

  std::optional<std::string> kind_text;
  if (auto section = tree.find("experiment"); section != tree.not_found()) {
    if (auto v = section->second.find("experiment"); v != section->second.not_found()) {
      kind_text = trim(v->second.data());
    }
  }
  if (!kind_text) {
    throw ConfigError("config needs 'experiment = ...' in the [experiment] section");
  }
  ExperimentConfig c = defaults_for(parse_experiment_kind(*kind_text));
  FitKeys ltd;
  FitKeys ltp;
  for (const auto &[section, body] : tree) {
    if (section == "experiment") {
      for (const auto &[key, child] : body) {
        apply_experiment_key(c, c.device, ltd, ltp, trim(key), trim(child.data()));
      }
    } else if (section == "device") {
      for (const auto &[key, child] : body) {
        apply_device_key(c.device, ltd, ltp, trim(key), trim(child.data()));
      }
    } else {
      throw ConfigError("unknown config section or top-level key '" + section + "'");
    }
  }
  finish_device(c.device, ltd, ltp);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

DeviceParams load_device_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open device config " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const pt::ptree tree = read_tree(buf.str());
  DeviceParams d;
  FitKeys ltd;
  FitKeys ltp;
  for (const auto &[section, body] : tree) {
    if (section != "device") {
      continue;
    }
    for (const auto &[key, child] : body) {
      apply_device_key(d, ltd, ltp, trim(key), trim(child.data()));
    }
  }
  finish_device(d, ltd, ltp);
  DeviceModel check(d);
  return d;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      continue;
    }
    out.push_back(to_double("list", item));
  }
  if (out.empty()) {
    throw ConfigError("empty number list '" + std::string(text) + "'");
  }
  return out;
}

} // namespace ctf
