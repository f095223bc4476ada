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

#include "qpinn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qpinn::experiment {
namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double s = 0.0;
    for (double v : values) s += (v - a.mean) * (v - a.mean);
    a.std_dev = std::sqrt(s / static_cast<double>(values.size() - 1));
  }
  return a;
}

std::string code_revision() {
#ifdef QPINN_GIT_REVISION
  return QPINN_GIT_REVISION;
#else
  return "unknown";
#endif
}

std::string manifest_text(const config::RunConfig& cfg) {
  std::ostringstream os;
  os << "# qpinn manifest, code revision " << code_revision() << '\n';
  os << config::to_config_text(cfg);
  return os.str();
}

std::string iterations_csv(const train::RunResult& run) {
  std::ostringstream os;
  os << "iteration,loss,wall_ms,eval_count\n";
  for (const auto& r : run.history) {
    os << r.iteration << ',' << fmt(r.loss) << ',' << fmt(r.wall_ms) << ',' << r.eval_count
       << '\n';
  }
  return os.str();
}

ExperimentResult run_experiment(const config::RunConfig& cfg, std::size_t workers) {
  namespace fs = std::filesystem;
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  ExperimentResult res;
  res.output_dir = out.string();
  res.runs.resize(cfg.seeds.size());

  // Shared reference table is computed once before the workers start.
  {
    train::TrainConfig t = cfg.train;
    train::metric_reference(t);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cfg.seeds.size()) return;
      try {
        train::TrainConfig t = cfg.train;
        t.seed = cfg.seeds[k];
        res.runs[k] = train::train(t);
        const std::string stem = "seed_" + std::to_string(t.seed);
        write_file(out / (stem + "_iterations.csv"), iterations_csv(res.runs[k]));
        write_file(out / (stem + "_checkpoint.json"), res.runs[k].checkpoint);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = cfg.seeds.size();
        return;
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, cfg.seeds.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> metrics;
  for (const auto& r : res.runs) metrics.push_back(r.final_metric);
  res.metric = aggregate(metrics);
  std::ostringstream agg;
  agg << "seed,metric,mean,std\n";
  for (const auto& r : res.runs) agg << r.seed << ',' << fmt(r.final_metric) << ",,\n";
  agg << "all,," << fmt(res.metric.mean) << ',' << fmt(res.metric.std_dev) << '\n';
  write_file(out / "aggregate.csv", agg.str());
  write_file(out / "manifest.ini", manifest_text(cfg));
  return res;
}

ExperimentResult run_experiment_file(const std::string& config_path, std::size_t workers) {
  return run_experiment(config::load_run_config(config_path), workers);
}

std::string emit_slices(const train::LoadedCheckpoint& ck, const SliceSpec& spec) {
  const pde::PdeProblem& pr = ck.problem;
  if (!pr.has_analytic_solution()) {
    throw std::invalid_argument("slices: problem has no analytic solution");
  }
  if (spec.points < 2) throw std::invalid_argument("slices: need at least 2 points per slice");
  const std::size_t dim = pr.input_dim();
  const std::size_t off = pr.spatial_offset();
  // Coordinate held at each fixed value.
  std::size_t fixed_coord = 1;
  if (pr.has_time() && pr.d == 1) fixed_coord = 0;
  if (pr.has_time() && pr.d >= 2) fixed_coord = off + 1;
  std::ostringstream os;
  os.precision(12);
  os << "x1,fixed_value,u_theta,u_exact,squared_error\n";
  EvalCounter counter;
  const DerivativeRequest value_only;
  for (double fv : spec.fixed) {
    for (std::size_t k = 0; k < spec.points; ++k) {
      const double x1 = static_cast<double>(k) / static_cast<double>(spec.points - 1);
      std::vector<double> z(dim, 0.5);
      if (pr.has_time()) z[0] = spec.time;
      z[off] = x1;
      z[fixed_coord] = fv;
      const double u = ck.trial->derivatives(z, value_only, counter).value;
      const double e = pr.exact(z);
      os << x1 << ',' << fv << ',' << u << ',' << e << ',' << (u - e) * (u - e) << '\n';
    }
  }
  return os.str();
}

}  // namespace qpinn::experiment
