// Copyright 2026 The qpinn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qpinn/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

namespace qpinn::config {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "config key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "config key '" + key + "': expected a non-negative integer, got '" +
                               v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(key, "config key '" + key + "': expected true or false, got '" + v + "'");
}

template <typename F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, "config key '" + key + "': " + e.what());
  }
}

smooth::SmoothingConfig& smoothing(train::TrainConfig& t) {
  if (!t.loss.smoothing) t.loss.smoothing = smooth::SmoothingConfig{};
  return *t.loss.smoothing;
}

void apply(RunConfig& rc, const std::string& key, const std::string& v) {
  train::TrainConfig& t = rc.train;
  if (key == "problem") return;  // resolved first
  if (key == "trial") {
    t.trial_kind = wrap(key, [&] { return train::parse_trial_kind(v); });
  } else if (key == "formulation") {
    t.loss.formulation = wrap(key, [&] { return pde::parse_formulation(v); });
    if (pde::is_smoothed(t.loss.formulation)) smoothing(t);
  } else if (key == "engine") {
    t.network.engine = wrap(key, [&] { return trial::parse_engine(v); });
  } else if (key == "seeds") {
    rc.seeds = wrap(key, [&] { return parse_seed_list(v); });
  } else if (key == "output") {
    rc.output_dir = v;
  } else if (key == "iterations") {
    t.adam.iterations = to_uint(key, v);
  } else if (key == "learning_rate") {
    t.adam.learning_rate = to_double(key, v);
  } else if (key == "beta1") {
    t.adam.beta1 = to_double(key, v);
  } else if (key == "beta2") {
    t.adam.beta2 = to_double(key, v);
  } else if (key == "epsilon") {
    t.adam.epsilon = to_double(key, v);
  } else if (key == "clip") {
    if (v == "none") {
      t.adam.clip.reset();
    } else {
      t.adam.clip = to_double(key, v);
    }
  } else if (key == "lambda_e") {
    t.loss.lambda_e = to_double(key, v);
  } else if (key == "n_r") {
    t.loss.n_r = to_uint(key, v);
  } else if (key == "n_e") {
    t.loss.n_e = to_uint(key, v);
  } else if (key == "n_qubits") {
    t.network.n_qubits = to_uint(key, v);
  } else if (key == "layers") {
    t.network.layers = to_uint(key, v);
  } else if (key == "encoding") {
    t.network.encoding = wrap(key, [&] { return qnet::parse_encoding_kind(v); });
  } else if (key == "classical_nodes") {
    t.network.classical_nodes = to_uint(key, v);
  } else if (key == "fd_h") {
    t.network.classical_fd_h = to_double(key, v);
  } else if (key == "sigma") {
    smoothing(t).sigma = to_double(key, v);
  } else if (key == "K") {
    smoothing(t).K = to_uint(key, v);
  } else if (key == "antithetic") {
    smoothing(t).antithetic = to_bool(key, v);
  } else if (key == "metric_samples") {
    t.metric_samples = to_uint(key, v);
  } else if (key == "metric_seed") {
    t.metric_seed = to_uint(key, v);
  } else if (key == "hjb_mc") {
    t.hjb_mc_samples = to_uint(key, v);
  } else if (key == "hjb_mode") {
    t.problem.hjb_mode = wrap(key, [&] { return pde::parse_hjb_mode(v); });
  } else if (key == "p") {
    t.problem.p = to_double(key, v);
  } else if (key == "d") {
    t.problem.d = to_uint(key, v);
  } else if (key == "a") {
    t.problem.a = to_double(key, v);
  } else if (key == "mu") {
    t.problem.mu = to_double(key, v);
  } else if (key == "T") {
    t.problem.T = to_double(key, v);
  } else {
    throw ConfigError(key, "unknown config key '" + key + "'");
  }
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "problem",   "trial",         "formulation",    "engine",        "seeds",  "output",
      "iterations", "learning_rate", "beta1",         "beta2",         "epsilon", "clip",
      "lambda_e",  "n_r",           "n_e",            "n_qubits",      "layers", "encoding",
      "classical_nodes", "fd_h",    "sigma",          "K",             "antithetic",
      "metric_samples", "metric_seed", "hjb_mc",      "hjb_mode",      "p",      "d",
      "a",         "mu",            "T"};
  return keys;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = to_uint("seeds", trim(part.substr(0, dash)));
      const auto hi = to_uint("seeds", trim(part.substr(dash + 1)));
      if (hi < lo) throw ConfigError("seeds", "seed range '" + part + "' is decreasing");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(to_uint("seeds", part));
    }
  }
  if (out.empty()) throw ConfigError("seeds", "seed list is empty");
  return out;
}

RunConfig parse_run_config(const std::string& text) {
  std::vector<Entry> entries;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(key, "unknown config key '" + key + "' (line " +
                                 std::to_string(lineno) + ")");
    }
    entries.push_back({section, key, trim(line.substr(eq + 1)), lineno});
  }

  RunConfig rc;
  for (const auto& e : entries) {
    if (e.section.empty() && e.key == "problem") rc.problem_name = e.value;
  }
  rc.train = wrap("problem", [&] { return train::default_config(rc.problem_name); });
  rc.output_dir = "qpinn_out/" + rc.problem_name;
  for (const auto& e : entries) {
    if (e.section.empty()) apply(rc, e.key, e.value);
  }
  for (const auto& e : entries) {
    if (!e.section.empty() && e.section == rc.problem_name) apply(rc, e.key, e.value);
  }
  wrap("problem", [&] {
    train::validate(rc.train.loss, rc.train.problem);
    return 0;
  });
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_config_text(const RunConfig& rc) {
  const train::TrainConfig& t = rc.train;
  std::ostringstream os;
  os << "problem = " << rc.problem_name << '\n';
  os << "trial = " << train::to_string(t.trial_kind) << '\n';
  os << "formulation = " << pde::to_string(t.loss.formulation) << '\n';
  os << "engine = " << trial::to_string(t.network.engine) << '\n';
  os << "seeds = ";
  for (std::size_t i = 0; i < rc.seeds.size(); ++i) os << (i ? "," : "") << rc.seeds[i];
  os << '\n';
  os << "output = " << rc.output_dir << '\n';
  os << "iterations = " << t.adam.iterations << '\n';
  os << "learning_rate = " << fmt(t.adam.learning_rate) << '\n';
  os << "beta1 = " << fmt(t.adam.beta1) << '\n';
  os << "beta2 = " << fmt(t.adam.beta2) << '\n';
  os << "epsilon = " << fmt(t.adam.epsilon) << '\n';
  os << "clip = " << (t.adam.clip ? fmt(*t.adam.clip) : std::string("none")) << '\n';
  os << "lambda_e = " << fmt(t.loss.lambda_e) << '\n';
  os << "n_r = " << t.loss.n_r << '\n';
  os << "n_e = " << t.loss.n_e << '\n';
  os << "n_qubits = " << t.network.n_qubits << '\n';
  os << "layers = " << t.network.layers << '\n';
  os << "encoding = " << qnet::to_string(t.network.encoding) << '\n';
  os << "classical_nodes = " << t.network.classical_nodes << '\n';
  os << "fd_h = " << fmt(t.network.classical_fd_h) << '\n';
  if (t.loss.smoothing) {
    os << "sigma = " << fmt(t.loss.smoothing->sigma) << '\n';
    os << "K = " << t.loss.smoothing->K << '\n';
    os << "antithetic = " << (t.loss.smoothing->antithetic ? "true" : "false") << '\n';
  }
  os << "metric_samples = " << t.metric_samples << '\n';
  os << "metric_seed = " << t.metric_seed << '\n';
  os << "hjb_mc = " << t.hjb_mc_samples << '\n';
  os << "hjb_mode = " << pde::to_string(t.problem.hjb_mode) << '\n';
  os << "p = " << fmt(t.problem.p) << '\n';
  os << "d = " << t.problem.d << '\n';
  os << "a = " << fmt(t.problem.a) << '\n';
  os << "mu = " << fmt(t.problem.mu) << '\n';
  os << "T = " << fmt(t.problem.T) << '\n';
  return os.str();
}

}  // namespace qpinn::config
