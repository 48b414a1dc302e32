// fboost: train, compare and inspect restricted-gradient boosting runs.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fboost/data.hpp"
#include "fboost/edge.hpp"
#include "fboost/error.hpp"
#include "fboost/experiment.hpp"
#include "fboost/numfmt.hpp"
#include "fboost/serialize.hpp"

using namespace fboost;

namespace {

struct DataArgs {
  std::string path;
  std::string format = "csv";
  std::string task = "auto";
  bool no_header = false;
  int label_column = -1;

  void attach(CLI::App* app) {
    app->add_option("--data", path, "Dataset file")->required()->check(CLI::ExistingFile);
    app->add_option("--format", format, "csv | libsvm | ranking")
        ->check(CLI::IsMember({"csv", "libsvm", "ranking"}));
    app->add_option("--task", task, "auto | regression | binary | multiclass | ranking")
        ->check(CLI::IsMember({"auto", "regression", "binary", "multiclass", "ranking"}));
    app->add_flag("--no-header", no_header, "CSV file has no header row");
    app->add_option("--label-column", label_column, "CSV label column (negative counts from the end)");
  }

  Dataset load() const {
    LoadOptions opts;
    opts.format = parse_format(format);
    opts.task = parse_task(task);
    opts.header = !no_header;
    opts.label_column = label_column;
    Dataset data = load_dataset(path, opts);
    if (data.task() == Task::Multiclass) {
      std::cerr << "class mapping:";
      for (std::size_t c = 0; c < data.class_names.size(); ++c)
        std::cerr << ' ' << data.class_names[c] << "->" << (c + 1);
      std::cerr << '\n';
    }
    return data;
  }
};

// Command-line values that, when given, replace the config file's.
struct Overrides {
  std::string config_path;
  std::optional<std::string> objective, learner, algorithm, schedule, curves, model;
  std::optional<double> lambda, eta, test_fraction;
  std::optional<std::size_t> iterations;
  std::optional<std::uint64_t> seed;
  bool standardize = false;

  void attach(CLI::App* app, bool with_algorithm) {
    app->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app->add_option("--objective", objective, "squared | exponential | hinge | multiclass-hinge | ranking-hinge");
    app->add_option("--lambda", lambda, "L2 regularization added to the objective");
    app->add_option("--learner", learner, "regression-stump | binary-stump | multiclass-stump | constant | basis");
    if (with_algorithm)
      app->add_option("--algorithm", algorithm, "naive | repeated | repeated-threshold | residual");
    app->add_option("--schedule", schedule, "fixed | inv-lambda-t | inv-sqrt-t | line-search");
    app->add_option("--eta", eta, "Fixed step, or c in c/(lambda t)");
    app->add_option("-T,--iterations", iterations, "Boosting iterations");
    app->add_option("--seed", seed, "Split seed");
    app->add_option("--test-fraction", test_fraction, "Held-out fraction");
    app->add_flag("--standardize", standardize, "Standardize features with train statistics");
    app->add_option("--curves", curves, "Curve CSV output path");
    app->add_option("--model", model, "Model JSON output path");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (objective) c.objective = *objective;
    if (lambda) c.lambda = *lambda;
    if (learner) c.learner = *learner;
    if (algorithm) c.algorithm = parse_algorithm(*algorithm);
    if (schedule) c.schedule = *schedule;
    if (eta) c.eta = *eta;
    if (iterations) c.iterations = *iterations;
    if (seed) c.seed = *seed;
    if (test_fraction) c.test_fraction = *test_fraction;
    if (standardize) c.standardize = true;
    if (curves) c.curves_path = *curves;
    if (model) c.model_path = *model;
    c.validate();
    return c;
  }
};

Dataset prepare(const DataArgs& args, const ExperimentConfig& config) {
  Dataset data = args.load();
  split(data, config.test_fraction, config.seed);
  if (config.standardize) standardize(data);
  return data;
}

void print_summary(const ExperimentResult& r) {
  const auto& report = r.run.report;
  std::printf("%-18s status=%-9s iterations=%zu learners=%zu", report.algorithm.c_str(),
              to_string(report.status).c_str(), report.records.size(),
              report.records.empty() ? std::size_t{0} : report.records.back().weak_learners);
  if (!r.curve.empty()) {
    const auto& last = r.curve.back();
    std::printf(" train_obj=%.6g train_metric=%.4f", last.train_objective, last.train_metric);
    if (!std::isnan(last.test_objective))
      std::printf(" test_obj=%.6g test_metric=%.4f", last.test_objective, last.test_metric);
  }
  std::printf("\n");
}

int cmd_train(const DataArgs& data_args, const Overrides& over) {
  const auto config = over.resolve();
  const auto data = prepare(data_args, config);
  print_summary(run_experiment(config, data));
  return 0;
}

int cmd_compare(const DataArgs& data_args, const Overrides& over) {
  const auto config = over.resolve();
  const auto data = prepare(data_args, config);
  for (const auto& r : compare(config, data)) print_summary(r);
  return 0;
}

int cmd_edge(const DataArgs& data_args, const Overrides& over, const std::string& out_path) {
  auto config = over.resolve();
  const auto data = prepare(data_args, config);
  const auto train = data.train_part();
  const auto obj = make_objective(config.objective, train.space, train.labels, config.lambda);
  const auto learner = make_learner(config.learner, train.space);
  if (!learner->supports(ProjectionMode::InnerProductMax))
    throw UnsupportedError("edge needs a learner that supports inner-product projection");

  DescentConfig dc;
  dc.schedule = make_schedule(config, *obj);
  dc.iterations = config.iterations;
  dc.collect_targets = true;
  if (config.algorithm == Algorithm::RepeatedThreshold)
    dc.inner = ThresholdInner{config.inner_base, config.inner_power, config.max_inner};
  const auto result = run(config.algorithm, *obj, *learner, dc);

  // The inner-product fit is the class's best response, so its realized edge
  // is the class edge on that target.
  EdgeEstimate worst;
  worst.gamma = 1.0;
  worst.raw = 1.0;
  worst.n_targets = result.report.targets.size();
  for (std::size_t i = 0; i < result.report.targets.size(); ++i) {
    const auto& target = result.report.targets[i];
    const auto h = learner->fit(target, ProjectionMode::InnerProductMax);
    const auto e = realized_edge(target, h);
    if (i == 0 || e.raw < worst.raw) {
      worst.raw = e.raw;
      worst.gamma = e.gamma;
      worst.negative = e.negative;
      worst.worst_target = i;
    }
  }
  const auto text = edge_to_json(worst).dump(1);
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream(out_path) << text << '\n';
  }
  return 0;
}

int cmd_demo(std::size_t iterations, const std::string& out_dir) {
  const auto space = TwoPointAbs::make_space();
  const TwoPointAbs obj(space);
  const EnumeratedClass basis(complete_basis(space), "axis-directions");
  const FnVec f0(space, {0.5, 1.0});
  std::printf("R[f0] = %s, f0 = (0.5, 1)\n", format_double(obj.value(f0)).c_str());
  for (Algorithm a : {Algorithm::Naive, Algorithm::Repeated, Algorithm::Residual}) {
    DescentConfig dc;
    dc.schedule = InvSqrtT{};
    dc.iterations = iterations;
    dc.initial = f0;
    std::vector<CurveRow> curve;
    dc.on_iteration = [&](const IterationRecord& rec, const Ensemble&) {
      curve.push_back({rec.t, rec.weak_learners, rec.objective, std::nan(""), std::nan(""), std::nan(""),
                       rec.edge, rec.step});
    };
    const auto result = run(a, obj, basis, dc);
    const auto& f = result.model.current();
    std::printf("%-9s R[f_T] = %-12s f_T = (%s, %s)  learners=%zu\n", to_string(a).c_str(),
                format_double(obj.value(f)).c_str(), format_double(f(0)).c_str(),
                format_double(f(1)).c_str(),
                result.report.records.empty() ? std::size_t{0} : result.report.records.back().weak_learners);
    if (!out_dir.empty()) write_curves(out_dir + "/counterexample." + to_string(a) + ".csv", curve);
  }
  return 0;
}

int cmd_eval(const DataArgs& data_args, const std::string& model_path, const std::string& objective,
             double lambda) {
  const Dataset data = data_args.load();
  const auto model = load_model(model_path, data.space);
  const auto& f = model.current();
  std::printf("points=%zu %s=%s", data.size(), metric_name(data.labels).c_str(),
              format_double(task_metric(f, data.labels)).c_str());
  if (!objective.empty()) {
    const auto obj = make_objective(objective, data.space, data.labels, lambda);
    std::printf(" objective=%s", format_double(obj->value(f)).c_str());
  }
  std::printf("\n");
  return 0;
}

struct GenerateArgs {
  std::string kind = "blobs";
  std::size_t n = 300, classes = 3, dim = 2, groups = 20, per_group = 10, levels = 3;
  double spread = 1.0, noise = 0.1;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
};

int cmd_generate(const GenerateArgs& g) {
  Dataset data;
  if (g.kind == "blobs") {
    data = gaussian_blobs(g.n, g.classes, g.dim, g.spread, g.seed);
  } else if (g.kind == "regression") {
    data = synthetic_regression(g.n, g.dim, g.noise, g.seed);
  } else {
    data = synthetic_ranking(g.groups, g.per_group, g.dim, g.levels, g.seed);
  }
  const auto format = g.kind == "ranking" ? DataFormat::Ranking : parse_format(g.format);
  if (g.out.empty()) {
    write_dataset(std::cout, data, format);
  } else {
    std::ofstream out(g.out);
    if (!out) throw Error("cannot write '" + g.out + "'");
    write_dataset(out, data, format);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restricted functional gradient descent (boosting) toolkit"};
  app.require_subcommand(1);

  DataArgs train_data, compare_data, edge_data, eval_data;
  Overrides train_over, compare_over, edge_over;

  auto* train = app.add_subcommand("train", "Train one model and write its curve and model files");
  train_data.attach(train);
  train_over.attach(train, true);

  auto* cmp = app.add_subcommand("compare", "Run naive, repeated and residual on shared data");
  compare_data.attach(cmp);
  compare_over.attach(cmp, false);

  std::string edge_out;
  auto* edge = app.add_subcommand("edge", "Certify the learner's edge over a run's projection targets");
  edge_data.attach(edge);
  edge_over.attach(edge, true);
  edge->add_option("--out", edge_out, "Edge JSON output path (default stdout)");

  std::size_t demo_iters = 500;
  std::string demo_dir;
  auto* demo = app.add_subcommand("demo-counterexample", "Two-point objective where naive descent stalls");
  demo->add_option("-T,--iterations", demo_iters, "Iterations")->check(CLI::PositiveNumber);
  demo->add_option("--out-dir", demo_dir, "Directory for per-algorithm curve CSVs")->check(CLI::ExistingDirectory);

  std::string eval_model, eval_objective;
  double eval_lambda = 0.0;
  auto* eval = app.add_subcommand("eval", "Evaluate a saved model on a dataset");
  eval_data.attach(eval);
  eval->add_option("--model", eval_model, "Model JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--objective", eval_objective, "Also report this objective");
  eval->add_option("--lambda", eval_lambda, "Regularization for --objective");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("--kind", gen.kind, "blobs | regression | ranking")
      ->check(CLI::IsMember({"blobs", "regression", "ranking"}));
  generate->add_option("-n,--points", gen.n, "Points (blobs, regression)");
  generate->add_option("--classes", gen.classes, "Classes (blobs)");
  generate->add_option("--dim", gen.dim, "Feature dimension");
  generate->add_option("--spread", gen.spread, "Blob standard deviation");
  generate->add_option("--noise", gen.noise, "Regression noise standard deviation");
  generate->add_option("--groups", gen.groups, "Query groups (ranking)");
  generate->add_option("--per-group", gen.per_group, "Documents per group (ranking)");
  generate->add_option("--levels", gen.levels, "Relevance levels (ranking)");
  generate->add_option("--seed", gen.seed, "Generator seed");
  generate->add_option("--format", gen.format, "csv | libsvm")->check(CLI::IsMember({"csv", "libsvm"}));
  generate->add_option("--out", gen.out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_data, train_over);
    if (*cmp) return cmd_compare(compare_data, compare_over);
    if (*edge) return cmd_edge(edge_data, edge_over, edge_out);
    if (*demo) return cmd_demo(demo_iters, demo_dir);
    if (*eval) return cmd_eval(eval_data, eval_model, eval_objective, eval_lambda);
    if (*generate) return cmd_generate(gen);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
