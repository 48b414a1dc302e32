#include "fboost/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>

#include "fboost/error.hpp"

namespace fboost {

namespace {

constexpr std::array kObjectives{"squared", "exponential", "hinge", "multiclass-hinge",
                                 "ranking-hinge", "two-point-abs"};
constexpr std::array kLearners{"regression-stump", "binary-stump", "multiclass-stump", "constant",
                               "basis"};
constexpr std::array kSchedules{"fixed", "inv-lambda-t", "inv-sqrt-t", "line-search"};

template <std::size_t N>
bool listed(const std::array<const char*, N>& names, const std::string& name) {
  return std::any_of(names.begin(), names.end(), [&](const char* s) { return name == s; });
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!listed(kObjectives, objective)) throw InvalidArgument("unknown objective '" + objective + "'");
  if (!listed(kLearners, learner)) throw InvalidArgument("unknown learner '" + learner + "'");
  if (!listed(kSchedules, schedule)) throw InvalidArgument("unknown schedule '" + schedule + "'");
  if (iterations < 1) throw InvalidArgument("iterations must be at least 1");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  if (!(eta > 0.0)) throw InvalidArgument("eta must be positive");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw InvalidArgument("test fraction must be in [0, 1)");
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"schema", kConfigSchema},
              {"objective", c.objective},
              {"lambda", c.lambda},
              {"learner", c.learner},
              {"algorithm", to_string(c.algorithm)},
              {"schedule", c.schedule},
              {"eta", c.eta},
              {"iterations", c.iterations},
              {"seed", c.seed},
              {"test_fraction", c.test_fraction},
              {"standardize", c.standardize},
              {"inner_base", c.inner_base},
              {"inner_power", c.inner_power},
              {"max_inner", c.max_inner},
              {"curves_path", c.curves_path},
              {"model_path", c.model_path}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  if (j.contains("schema") && j.at("schema") != kConfigSchema)
    throw SchemaError(std::string("unsupported config schema (expected ") + kConfigSchema + ")");
  ExperimentConfig c;
  try {
    auto read = [&](const char* key, auto& into) {
      if (j.contains(key)) into = j.at(key).get<std::decay_t<decltype(into)>>();
    };
    read("objective", c.objective);
    read("lambda", c.lambda);
    read("learner", c.learner);
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    read("schedule", c.schedule);
    read("eta", c.eta);
    read("iterations", c.iterations);
    read("seed", c.seed);
    read("test_fraction", c.test_fraction);
    read("standardize", c.standardize);
    read("inner_base", c.inner_base);
    read("inner_power", c.inner_power);
    read("max_inner", c.max_inner);
    read("curves_path", c.curves_path);
    read("model_path", c.model_path);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

StepSchedule make_schedule(const ExperimentConfig& config, const Objective& obj) {
  if (config.schedule == "fixed") return FixedStep{config.eta};
  if (config.schedule == "inv-sqrt-t") return InvSqrtT{};
  if (config.schedule == "line-search") return LineSearchStep{};
  if (config.schedule == "inv-lambda-t") {
    const auto lam = obj.strong_convexity();
    if (!lam || !(*lam > 0.0))
      throw InvalidArgument("inv-lambda-t needs a strongly convex objective (set lambda > 0)");
    return InvLambdaT{config.eta, *lam};
  }
  throw InvalidArgument("unknown schedule '" + config.schedule + "'");
}

std::string tagged_path(const std::string& path, const std::string& tag) {
  if (path.empty()) return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "." + tag;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data) {
  config.validate();
  data.validate();
  if (data.train.empty()) throw InvalidArgument("training split is empty");
  const auto train = data.train_part();
  const auto test = data.test_part();

  const auto obj = make_objective(config.objective, train.space, train.labels, config.lambda);
  const auto learner = make_learner(config.learner, train.space);
  ObjectivePtr test_obj;
  if (!test.empty()) test_obj = make_objective(config.objective, test.space, test.labels, config.lambda);

  std::vector<CurveRow> curve;
  std::optional<FnVec> test_pred;
  std::size_t seen_terms = 0;
  constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  DescentConfig dc;
  dc.schedule = make_schedule(config, *obj);
  dc.iterations = config.iterations;
  dc.inner = ThresholdInner{config.inner_base, config.inner_power, config.max_inner};
  if (config.algorithm != Algorithm::RepeatedThreshold) dc.inner = FixedInner{};
  dc.on_iteration = [&](const IterationRecord& rec, const Ensemble& model) {
    CurveRow row;
    row.t = rec.t;
    row.weak_learners = rec.weak_learners;
    row.train_objective = rec.objective;
    row.train_metric = task_metric(model.current(), train.labels);
    row.edge = rec.edge;
    row.step = rec.step;
    row.test_objective = kMissing;
    row.test_metric = kMissing;
    if (test_obj) {
      if (!test_pred) test_pred = Ensemble(test.space, model.offset()).current();
      const auto& terms = model.terms();
      for (; seen_terms < terms.size(); ++seen_terms)
        test_pred->axpy(-terms[seen_terms].coefficient, terms[seen_terms].hypothesis.evaluate_on(test.space));
      row.test_objective = test_obj->value(*test_pred);
      row.test_metric = task_metric(*test_pred, test.labels);
    }
    curve.push_back(row);
  };

  std::optional<RunResult> trained;
  try {
    trained.emplace(run(config.algorithm, *obj, *learner, dc));
  } catch (...) {
    if (!config.curves_path.empty()) write_curves(config.curves_path, curve);
    throw;
  }
  ExperimentResult result{std::move(*trained), std::move(curve)};
  if (!config.curves_path.empty()) write_curves(config.curves_path, result.curve);
  if (!config.model_path.empty()) save_model(config.model_path, result.run.model);
  return result;
}

std::vector<ExperimentResult> compare(const ExperimentConfig& config, const Dataset& data) {
  std::vector<std::future<ExperimentResult>> jobs;
  for (Algorithm a : {Algorithm::Naive, Algorithm::Repeated, Algorithm::Residual}) {
    ExperimentConfig c = config;
    c.algorithm = a;
    c.curves_path = tagged_path(config.curves_path, to_string(a));
    c.model_path = tagged_path(config.model_path, to_string(a));
    jobs.push_back(std::async(std::launch::async, [c, &data] { return run_experiment(c, data); }));
  }
  std::vector<ExperimentResult> out;
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

}  // namespace fboost
