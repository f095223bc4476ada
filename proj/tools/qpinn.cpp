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

// qpinn command line: train, complexity, slices, verify.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpinn/complexity.hpp"
#include "qpinn/config.hpp"
#include "qpinn/experiment.hpp"
#include "qpinn/train.hpp"
#include "qpinn/verify.hpp"

namespace {

std::size_t workers_from_env() {
  if (const char* w = std::getenv("QPINN_WORKERS")) {
    try {
      const long v = std::stol(w);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid QPINN_WORKERS='" << w << "'\n";
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random quantum network PDE solver"};
  app.require_subcommand(1);

  std::size_t workers = workers_from_env();

  auto* train_cmd = app.add_subcommand("train", "Train all seeds of a run config");
  std::string config_path;
  train_cmd->add_option("config", config_path, "Run config file")->required();
  train_cmd->add_option("--workers", workers, "Seeds trained in parallel (env QPINN_WORKERS)");

  auto* cx_cmd = app.add_subcommand("complexity", "Print the evaluation-count table as CSV");
  std::uint64_t M = 2, n_per_d = 3, K = 1024, d_max = 20, n_r = 1, n_e = 1;
  std::string convention = "printed";
  cx_cmd->add_option("--M", M, "Trainable layers");
  cx_cmd->add_option("--n-per-d", n_per_d, "Qubits per dimension");
  cx_cmd->add_option("--K", K, "Gaussian samples");
  cx_cmd->add_option("--d-max", d_max, "Largest dimension");
  cx_cmd->add_option("--n-r", n_r, "Interior samples");
  cx_cmd->add_option("--n-e", n_e, "Boundary samples");
  cx_cmd->add_option("--convention", convention, "printed or generic")
      ->check(CLI::IsMember({"printed", "generic"}));

  auto* sl_cmd = app.add_subcommand("slices", "Emit solution slices from a checkpoint");
  std::string checkpoint, out_path;
  qpinn::experiment::SliceSpec spec;
  sl_cmd->add_option("checkpoint", checkpoint, "Checkpoint JSON")->required();
  sl_cmd->add_option("--fixed", spec.fixed, "Fixed coordinate values");
  sl_cmd->add_option("--points", spec.points, "Points per slice");
  sl_cmd->add_option("--time", spec.time, "Time for multi-dimensional heat slices");
  sl_cmd->add_option("-o,--out", out_path, "Output CSV (default stdout)");

  auto* ver_cmd = app.add_subcommand("verify", "Run the self-check suite");
  std::string level = "fast";
  bool tamper = false;
  ver_cmd->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  ver_cmd->add_flag("--tamper-shift", tamper, "Mutation test: corrupt the shift denominator");
  ver_cmd->add_option("--workers", workers, "Seeds trained in parallel (env QPINN_WORKERS)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const auto cfg = qpinn::config::load_run_config(config_path);
      const auto res = qpinn::experiment::run_experiment(cfg, workers);
      std::cout << "seed,metric\n";
      for (const auto& r : res.runs) std::cout << r.seed << ',' << r.final_metric << '\n';
      std::cout << "mean," << res.metric.mean << "\nstd," << res.metric.std_dev << '\n';
      std::cerr << "wrote " << res.output_dir << '\n';
    } else if (*cx_cmd) {
      const auto rows = qpinn::complexity::crossover_report(
          M, n_per_d, K, n_r, n_e, d_max, qpinn::complexity::parse_convention(convention));
      std::cout << qpinn::complexity::crossover_csv(rows);
    } else if (*sl_cmd) {
      const auto ck = qpinn::train::load_checkpoint(read_file(checkpoint));
      const std::string csv = qpinn::experiment::emit_slices(ck, spec);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(out_path) << csv;
      }
    } else if (*ver_cmd) {
      qpinn::verify::Options opts;
      opts.level = qpinn::verify::parse_level(level);
      opts.tamper_shift_denominator = tamper;
      opts.workers = workers;
      const auto results = qpinn::verify::run(opts, std::cout);
      for (const auto& r : results) {
        if (!r.passed) return 1;
      }
    }
  } catch (const qpinn::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
