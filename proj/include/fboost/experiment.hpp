#pragma once

// Experiment plumbing: a JSON-backed configuration, a training run that
// records train/test curves after every iteration, and a three-way
// comparison of the descent algorithms on shared data.

#include <cstdint>
#include <string>
#include <vector>

#include "fboost/data.hpp"
#include "fboost/descent.hpp"
#include "fboost/serialize.hpp"

namespace fboost {

inline constexpr const char* kConfigSchema = "fboost.config/1";

struct ExperimentConfig {
  std::string objective = "squared";
  double lambda = 0.0;  // regularization added on top of the objective
  std::string learner = "regression-stump";
  Algorithm algorithm = Algorithm::Naive;
  // fixed | inv-lambda-t | inv-sqrt-t | line-search
  std::string schedule = "inv-sqrt-t";
  double eta = 1.0;  // fixed step, or the constant c in c / (lambda t)
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  bool standardize = false;
  // Threshold inner loop of repeated-threshold.
  double inner_base = 1e-2;
  double inner_power = 0.5;
  std::size_t max_inner = 1000;
  // Empty paths skip the corresponding artifact.
  std::string curves_path;
  std::string model_path;

  void validate() const;
};

json config_to_json(const ExperimentConfig& config);
// Missing fields keep their defaults. SchemaError on a wrong schema tag.
ExperimentConfig config_from_json(const json& j);
ExperimentConfig load_config(const std::string& path);

// The step schedule named by the config; inv-lambda-t takes lambda from the
// objective's strong convexity.
StepSchedule make_schedule(const ExperimentConfig& config, const Objective& obj);

struct ExperimentResult {
  RunResult run;
  std::vector<CurveRow> curve;
};

// Trains on data.train and evaluates on data.test after every iteration.
// The train objective in the curve is the descent record's own value. On an
// exception the rows gathered so far are written before rethrowing.
ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data);

// naive, repeated and residual on the same data and seed, run concurrently.
// Artifact paths get the algorithm name inserted before the extension.
std::vector<ExperimentResult> compare(const ExperimentConfig& config, const Dataset& data);

// "out/curves.csv" + "naive" -> "out/curves.naive.csv"
std::string tagged_path(const std::string& path, const std::string& tag);

}  // namespace fboost
