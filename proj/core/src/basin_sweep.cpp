#include "arls/basin_sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

#include "arls/rng.hpp"
#include "arls/text_io.hpp"

namespace arls {
namespace {

// One observation index per landmark, ordered by how close the (true) camera
// center sits to the (true) landmark; ties fall back to scene order.
struct RankedObservation {
  int observation = 0;
  int camera = 0;
  double distance = 0.0;
};

std::vector<std::vector<RankedObservation>> rank_observers(const BAScene& scene) {
  std::vector<std::vector<RankedObservation>> ranked(scene.landmarks.size());
  for (std::size_t i = 0; i < scene.observations.size(); ++i) {
    const BAObservation& obs = scene.observations[i];
    const double distance =
        (scene.camera_center(obs.camera) - scene.landmarks[obs.landmark]).norm();
    ranked[obs.landmark].push_back({static_cast<int>(i), obs.camera, distance});
  }
  for (std::vector<RankedObservation>& list : ranked) {
    std::stable_sort(list.begin(), list.end(),
                     [](const RankedObservation& a, const RankedObservation& b) {
                       return a.distance < b.distance;
                     });
  }
  return ranked;
}

}  // namespace

BAScene perturb_scene(const BAScene& scene, double sigma, double rotation_noise,
                      int gauge_component, std::uint64_t seed) {
  if (gauge_component < 0 || gauge_component > 2) {
    throw std::invalid_argument("perturb_scene: gauge_component must be 0, 1, or 2");
  }
  if (scene.poses.size() < 2) {
    throw std::invalid_argument("perturb_scene: scene needs at least two cameras");
  }
  if (!(sigma >= 0.0) || !(rotation_noise >= 0.0)) {
    throw std::invalid_argument("perturb_scene: noise levels must be non-negative");
  }

  BAScene out = scene;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  // Camera 0 anchors the gauge and is never perturbed.
  for (std::size_t i = 1; i < out.poses.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      out.poses[i].translation[k] += sigma * unit_normal(rng);
    }
    if (rotation_noise > 0.0) {
      Vector6d xi = Vector6d::Zero();
      for (int k = 0; k < 3; ++k) {
        xi[3 + k] = rotation_noise * unit_normal(rng);
      }
      out.poses[i].q = (Pose3::exp(xi).q * out.poses[i].q).normalized();
    }
  }
  // The solver freezes this coordinate, so a perturbation of it could never
  // be undone; every start shares the true value instead.
  out.poses[1].translation[gauge_component] =
      scene.poses[1].translation[gauge_component];

  // Restart each landmark from a cheap triangulation under the perturbed
  // poses; landmarks seen by fewer than two distinct cameras keep their
  // previous value.
  const std::vector<std::vector<RankedObservation>> ranked = rank_observers(scene);
  for (std::size_t j = 0; j < out.landmarks.size(); ++j) {
    const std::vector<RankedObservation>& list = ranked[j];
    if (list.empty()) continue;
    const RankedObservation& first = list.front();
    const RankedObservation* second = nullptr;
    for (std::size_t k = 1; k < list.size(); ++k) {
      if (list[k].camera != first.camera) {
        second = &list[k];
        break;
      }
    }
    if (second == nullptr) continue;
    const BAObservation& obs_a = scene.observations[first.observation];
    const BAObservation& obs_b = scene.observations[second->observation];
    out.landmarks[j] = midpoint_triangulate(
        out.intrinsics[obs_a.camera], out.poses[obs_a.camera], obs_a.pixel,
        out.intrinsics[obs_b.camera], out.poses[obs_b.camera], obs_b.pixel);
  }
  return out;
}

BasinSweepResult basin_sweep(const BAScene& scene, const BasinSweepConfig& config,
                             const PartitionTable& table) {
  if (config.sigmas.empty()) {
    throw std::invalid_argument("basin_sweep: no noise levels given");
  }
  for (double sigma : config.sigmas) {
    if (!(sigma >= 0.0)) {
      throw std::invalid_argument("basin_sweep: noise levels must be non-negative");
    }
  }
  if (config.samples < 1) {
    throw std::invalid_argument("basin_sweep: samples must be at least 1");
  }
  if (config.policies.empty()) {
    throw std::invalid_argument("basin_sweep: no policies given");
  }
  if (!(config.success_rms > 0.0)) {
    throw std::invalid_argument("basin_sweep: success_rms must be positive");
  }
  config.solver.validate();
  scene.validate();

  // The gauge coordinate comes from the unperturbed scene so that every cell
  // (and the success metric) fixes the same degree of freedom.
  const int gauge = BAProblem(scene).gauge_component();

  struct Cell {
    int policy_index = 0;
    int sigma_index = 0;
    int sample = 0;
  };
  std::vector<Cell> cells;
  cells.reserve(config.policies.size() * config.sigmas.size() *
                static_cast<std::size_t>(config.samples));
  for (int p = 0; p < static_cast<int>(config.policies.size()); ++p) {
    for (int s = 0; s < static_cast<int>(config.sigmas.size()); ++s) {
      for (int m = 0; m < config.samples; ++m) {
        cells.push_back({p, s, m});
      }
    }
  }

  BasinSweepResult result;
  result.records.resize(cells.size());

  const auto run_cell = [&](std::size_t index) {
    const Cell& cell = cells[index];
    const PolicySpec& policy = config.policies[cell.policy_index];
    const double sigma = config.sigmas[cell.sigma_index];
    // The perturbation seed ignores the policy: every policy starts from the
    // exact same perturbed scene.
    const std::uint64_t seed = derive_seed(config.master_seed,
                                           static_cast<std::uint64_t>(cell.sigma_index),
                                           static_cast<std::uint64_t>(cell.sample));

    BasinSweepRecord record;
    record.policy = policy.name();
    record.sigma = sigma;
    record.sample = cell.sample;
    record.seed = seed;

    const BAScene start =
        perturb_scene(scene, sigma, config.rotation_noise, gauge, seed);
    BAProblem problem(start, gauge);
    try {
      const SolveReport report = solve_with_policy(
          problem, problem.initial_parameters(), policy, config.solver, &table);
      const BAScene solved = problem.scene_at(report.final_parameters);
      record.rms_error = camera_center_rms(solved, scene);
      record.success = record.rms_error < config.success_rms;
      record.final_alpha = report.final_alpha;
      record.iterations = static_cast<int>(report.iterations.size());
    } catch (const std::exception&) {
      // A solve that degenerates (e.g. non-finite residuals at the start
      // state) fails its cell; the sweep keeps going.
      record.rms_error = std::numeric_limits<double>::infinity();
      record.success = false;
    }
    result.records[index] = std::move(record);
  };

  int threads = config.threads;
  if (threads == 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
  }
  threads = std::min<int>(threads, static_cast<int>(cells.size()));

  if (threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size();
             i = next.fetch_add(1)) {
          run_cell(i);
        }
      });
    }
    for (std::thread& worker : pool) worker.join();
  }
  return result;
}

std::string sweep_csv(const BasinSweepResult& result) {
  std::string out = "policy,sigma,sample,seed,success,rms_error,final_alpha,iterations\n";
  for (const BasinSweepRecord& r : result.records) {
    out += r.policy;
    out += ',';
    out += format_double(r.sigma);
    out += ',';
    out += std::to_string(r.sample);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.success ? '1' : '0';
    out += ',';
    out += format_double(r.rms_error);
    out += ',';
    out += format_double(r.final_alpha);
    out += ',';
    out += std::to_string(r.iterations);
    out += '\n';
  }
  return out;
}

std::string sweep_summary_csv(const BasinSweepResult& result) {
  // Policies and sigmas in first-appearance order.
  std::vector<std::string> policies;
  std::vector<double> sigmas;
  for (const BasinSweepRecord& r : result.records) {
    if (std::find(policies.begin(), policies.end(), r.policy) == policies.end()) {
      policies.push_back(r.policy);
    }
    if (std::find(sigmas.begin(), sigmas.end(), r.sigma) == sigmas.end()) {
      sigmas.push_back(r.sigma);
    }
  }

  std::string out = "policy,sigma,successes,samples,success_rate\n";
  for (const std::string& policy : policies) {
    int policy_successes = 0;
    int policy_samples = 0;
    for (double sigma : sigmas) {
      int successes = 0;
      int samples = 0;
      for (const BasinSweepRecord& r : result.records) {
        if (r.policy != policy || r.sigma != sigma) continue;
        ++samples;
        if (r.success) ++successes;
      }
      if (samples == 0) continue;
      policy_successes += successes;
      policy_samples += samples;
      out += policy;
      out += ',';
      out += format_double(sigma);
      out += ',';
      out += std::to_string(successes);
      out += ',';
      out += std::to_string(samples);
      out += ',';
      out += format_double(static_cast<double>(successes) / samples);
      out += '\n';
    }
    out += policy;
    out += ",all,";
    out += std::to_string(policy_successes);
    out += ',';
    out += std::to_string(policy_samples);
    out += ',';
    out += format_double(static_cast<double>(policy_successes) / policy_samples);
    out += '\n';
  }
  return out;
}

double aggregate_success_rate(const BasinSweepResult& result, const std::string& policy) {
  int successes = 0;
  int samples = 0;
  for (const BasinSweepRecord& r : result.records) {
    if (r.policy != policy) continue;
    ++samples;
    if (r.success) ++successes;
  }
  if (samples == 0) {
    throw std::invalid_argument("aggregate_success_rate: no records for policy '" +
                                policy + "'");
  }
  return static_cast<double>(successes) / samples;
}

}  // namespace arls
