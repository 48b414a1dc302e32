#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fboost/error.hpp"
#include "fboost/experiment.hpp"

using namespace fboost;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Dataset blobs() {
  Dataset d = gaussian_blobs(90, 3, 2, 1.0, 3);
  split(d, 0.2, 1);
  return d;
}

ExperimentConfig multiclass_config(Algorithm a) {
  ExperimentConfig c;
  c.objective = "multiclass-hinge";
  c.learner = "multiclass-stump";
  c.algorithm = a;
  c.iterations = 25;
  return c;
}

}  // namespace

TEST_CASE("one iteration gives a single-row curve") {
  auto c = multiclass_config(Algorithm::Naive);
  c.iterations = 1;
  c.curves_path = "experiment_single.csv";
  const auto r = run_experiment(c, blobs());
  CHECK(r.curve.size() == 1);
  std::ifstream in(c.curves_path);
  CHECK(read_curves(in).size() == 1);
}

TEST_CASE("curve train objective is the descent record's value") {
  const Dataset d = blobs();
  for (Algorithm a : {Algorithm::Naive, Algorithm::Repeated, Algorithm::RepeatedThreshold, Algorithm::Residual}) {
    const auto r = run_experiment(multiclass_config(a), d);
    const auto& recs = r.run.report.records;
    REQUIRE(recs.size() == r.curve.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(r.curve[i].train_objective == recs[i].objective);
      CHECK(r.curve[i].weak_learners == recs[i].weak_learners);
      CHECK(r.curve[i].edge == recs[i].edge);
      CHECK(std::isfinite(r.curve[i].test_objective));
    }
  }
}

TEST_CASE("test curve matches a from-scratch evaluation") {
  const Dataset d = blobs();
  const auto r = run_experiment(multiclass_config(Algorithm::Residual), d);
  const auto test = d.test_part();
  const auto obj = make_objective("multiclass-hinge", test.space, test.labels);
  const FnVec pred = r.run.model.predict_on(test.space);
  CHECK(r.curve.back().test_objective == doctest::Approx(obj->value(pred)).epsilon(1e-12));
  CHECK(r.curve.back().test_metric == doctest::Approx(task_metric(pred, test.labels)));
}

TEST_CASE("same config and data give byte-identical artifacts") {
  const Dataset d = blobs();
  std::string curves[2], models[2];
  for (int i = 0; i < 2; ++i) {
    auto c = multiclass_config(Algorithm::Repeated);
    c.curves_path = "experiment_det_" + std::to_string(i) + ".csv";
    c.model_path = "experiment_det_" + std::to_string(i) + ".json";
    run_experiment(c, d);
    curves[i] = slurp(c.curves_path);
    models[i] = slurp(c.model_path);
  }
  CHECK(!curves[0].empty());
  CHECK(curves[0] == curves[1]);
  CHECK(models[0] == models[1]);
}

TEST_CASE("compare runs all three algorithms with tagged artifacts") {
  auto c = multiclass_config(Algorithm::Naive);
  c.curves_path = "experiment_cmp.csv";
  c.model_path = "experiment_cmp.json";
  const auto results = compare(c, blobs());
  REQUIRE(results.size() == 3);
  CHECK(results[0].run.report.algorithm == "naive");
  CHECK(results[1].run.report.algorithm == "repeated");
  CHECK(results[2].run.report.algorithm == "residual");
  for (const char* tag : {"naive", "repeated", "residual"}) {
    CHECK(std::filesystem::exists(std::string("experiment_cmp.") + tag + ".csv"));
    CHECK(std::filesystem::exists(std::string("experiment_cmp.") + tag + ".json"));
  }
  CHECK(tagged_path("out/curves.csv", "naive") == "out/curves.naive.csv");
  CHECK(tagged_path("curves", "naive") == "curves.naive");
  CHECK(tagged_path("a.b/curves", "x") == "a.b/curves.x");
}

TEST_CASE("config JSON round trip and validation") {
  ExperimentConfig c;
  c.objective = "hinge";
  c.lambda = 0.5;
  c.learner = "binary-stump";
  c.algorithm = Algorithm::RepeatedThreshold;
  c.schedule = "inv-lambda-t";
  c.eta = 2.0;
  c.iterations = 42;
  c.seed = 9;
  c.standardize = true;
  c.curves_path = "x.csv";
  const auto back = config_from_json(json::parse(config_to_json(c).dump()));
  CHECK(config_to_json(back) == config_to_json(c));

  const auto defaults = config_from_json(json{{"schema", kConfigSchema}, {"iterations", 5}});
  CHECK(defaults.iterations == 5);
  CHECK(defaults.objective == "squared");

  CHECK_THROWS_AS(config_from_json(json{{"schema", "other/1"}}), SchemaError);
  ExperimentConfig bad;
  bad.learner = "forest";
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ExperimentConfig{};
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("schedules from config") {
  const Dataset d = blobs();
  const auto train = d.train_part();
  const auto plain = make_objective("multiclass-hinge", train.space, train.labels);
  const auto reg = make_objective("multiclass-hinge", train.space, train.labels, 0.5);
  ExperimentConfig c;
  c.schedule = "inv-lambda-t";
  c.eta = 2.0;
  CHECK(step_size(make_schedule(c, *reg), 4) == doctest::Approx(1.0));
  CHECK_THROWS(make_schedule(c, *plain));
  c.schedule = "fixed";
  c.eta = 0.3;
  CHECK(step_size(make_schedule(c, *plain), 10) == 0.3);
}

TEST_CASE("failed run still flushes its curve") {
  const std::string path = "experiment_partial.csv";
  std::filesystem::remove(path);
  auto c = multiclass_config(Algorithm::Naive);
  c.learner = "binary-stump";
  c.curves_path = path;
  CHECK_THROWS(run_experiment(c, blobs()));
  REQUIRE(std::filesystem::exists(path));
  CHECK(slurp(path) == std::string(kCurveHeader) + "\n");
}
