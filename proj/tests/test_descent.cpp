#include <doctest.h>

#include <cmath>
#include <memory>

#include "fboost/descent.hpp"
#include "fboost/error.hpp"
#include "support/oracles.hpp"

using namespace fboost;

namespace {

// Returns the target itself: a class that reproduces every gradient exactly.
class IdentityLearner final : public RestrictionSet {
 public:
  Hypothesis fit(const FnVec& target, ProjectionMode) const override {
    if (target.is_zero()) throw ZeroGradientError();
    return Hypothesis(TabulatedRule{0, target.values()}, target.space());
  }
  bool supports(ProjectionMode) const override { return true; }
  std::string describe() const override { return "identity"; }
};

SpacePtr line_space(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return SampleSpace::create(std::move(x), 1, 1);
}

struct Counterexample {
  SpacePtr space = TwoPointAbs::make_space();
  TwoPointAbs obj{space};
  EnumeratedClass basis{complete_basis(space)};
  FnVec f0{space, {0.5, 1.0}};

  DescentConfig config(std::size_t T) const {
    DescentConfig dc;
    dc.schedule = InvSqrtT{};
    dc.iterations = T;
    dc.initial = f0;
    return dc;
  }
};

// cos between t and its best signed axis direction under uniform weights.
double axis_edge(const FnVec& t) {
  double best = 0.0, sq = 0.0;
  for (double v : t.values()) {
    best = std::max(best, std::abs(v));
    sq += v * v;
  }
  return best / std::sqrt(sq);
}

}  // namespace

TEST_CASE("projection coefficient examples") {
  const auto s = line_space(2);
  const FnVec target(s, {2, 1});
  const Hypothesis e1(TabulatedRule{0, {1, 0}}, s);
  CHECK(project_coefficient(target, e1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(project_coefficient(target, Hypothesis(TabulatedRule{0, {2, 1}}, s)) == doctest::Approx(1.0));
  CHECK(project_coefficient(FnVec(s, {1, -1}), Hypothesis(TabulatedRule{0, {1, 1}}, s)) == 0.0);
  CHECK_THROWS_AS(project_coefficient(target, Hypothesis(TabulatedRule{0, {0, 0}}, s)), DegenerateError);
}

TEST_CASE("projection residual is orthogonal to the hypothesis") {
  oracle::Gen gen(3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = gen.space(gen.between(1, 10), 1, gen.between(1, 3), gen.coin());
    const FnVec t = gen.fn(s);
    const FnVec hv = gen.fn(s);
    const Hypothesis h(TabulatedRule{0, hv.values()}, s);
    const double c = project_coefficient(t, h);
    const double c_ref = oracle::inner(s, t.values(), hv.values()) / oracle::inner(s, hv.values(), hv.values());
    CHECK(c == doctest::Approx(c_ref).epsilon(1e-10));
    std::vector<double> rest = t.values();
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= c * hv.values()[i];
    CHECK(std::abs(oracle::inner(s, rest, hv.values())) <= 1e-10 * std::max(1.0, norm(t) * norm(hv)));
  }
}

TEST_CASE("step schedules") {
  CHECK(step_size(FixedStep{0.3}, 7) == 0.3);
  CHECK(step_size(InvLambdaT{2.0, 0.5}, 4) == doctest::Approx(1.0));
  CHECK(step_size(InvSqrtT{}, 16) == doctest::Approx(0.25));
  CHECK_THROWS_AS(step_size(LineSearchStep{}, 1), InvalidArgument);
  CHECK(parse_algorithm("residual") == Algorithm::Residual);
  CHECK(to_string(Algorithm::RepeatedThreshold) == "repeated-threshold");
  CHECK_THROWS_AS(parse_algorithm("adaboost"), InvalidArgument);
}

TEST_CASE("line search examples") {
  const auto s = line_space(3);
  const std::vector<double> y{1.0, -2.0, 0.5};
  const SquaredLoss obj(s, LabeledData::real(y));
  const FnVec f0(s);
  const FnVec grad = obj.subgradient(f0);

  // R(f - eta grad) = 1/2 (1 - eta)^2 mean(y^2): exact minimizer eta = 1.
  CHECK(line_search(obj, f0, grad, 0.5, 40) == 1.0);
  // Doubled direction: minimizer eta = 1/2; eta = 1 only ties the start.
  const double eta = line_search(obj, f0, 2.0 * grad, 0.5, 40);
  CHECK(eta == 0.5);
  CHECK(obj.value(combine(1.0, f0, -eta, 2.0 * grad)) < obj.value(f0));

  // At the optimum nothing improves.
  const FnVec opt(s, y);
  CHECK(line_search(obj, opt, FnVec(s, {1, 1, 1}), 0.5, 40) == 0.0);

  // Hinge far inside the margin is flat along small moves.
  const BinaryHinge hinge(s, LabeledData::binary({1, -1, 1}));
  const FnVec deep(s, {5, -5, 5});
  CHECK(line_search(hinge, deep, FnVec(s, {1, -1, 1}), 0.5, 10) == 0.0);

  CHECK_THROWS_AS(line_search(obj, f0, grad, 1.5, 10), InvalidArgument);
}

TEST_CASE("naive leaves the second point untouched on the two-point counterexample") {
  const Counterexample ce;
  for (std::size_t T : {1, 7, 50, 200}) {
    const auto result = run_naive(ce.obj, ce.basis, ce.config(T));
    CHECK(result.model.current()(1) == 1.0);
    CHECK(result.report.records.size() == T);
    CHECK(result.report.records.back().weak_learners == T);
  }
}

TEST_CASE("repeated updates the second point on the two-point counterexample") {
  const Counterexample ce;
  const auto result = run_repeated(ce.obj, ce.basis, ce.config(500));
  const auto& recs = result.report.records;
  REQUIRE(recs.size() == 500);
  CHECK(recs[0].weak_learners == 1);
  // The gradient has two nonzero coordinates, so the inner loop stops after two.
  for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].weak_learners - recs[i - 1].weak_learners == 2);
  CHECK(result.model.current()(1) != 1.0);
  CHECK(ce.obj.value(result.model.current()) <= 0.05 * ce.obj.value(ce.f0));
}

TEST_CASE("residual eventually selects the second point on the two-point counterexample") {
  const Counterexample ce;
  const auto result = run_residual(ce.obj, ce.basis, ce.config(500));
  CHECK(result.model.current()(1) != 1.0);
  CHECK(ce.obj.value(result.model.current()) <= 0.05 * ce.obj.value(ce.f0));
  CHECK(result.report.records.back().weak_learners == 500);
  for (const auto& r : result.report.records) CHECK(r.residual_norm.has_value());
  CHECK(result.report.projections.max_orthogonality_error <= 1e-10);
}

TEST_CASE("zero gradient at the start returns f0 as optimal") {
  const auto s = line_space(4);
  const std::vector<double> y{1, 2, 3, 4};
  const SquaredLoss obj(s, LabeledData::real(y));
  const RegressionStumps stumps;
  DescentConfig dc;
  dc.initial = FnVec(s, y);
  for (Algorithm a : {Algorithm::Naive, Algorithm::Repeated, Algorithm::Residual}) {
    const auto result = run(a, obj, stumps, dc);
    CHECK(result.report.status == RunStatus::Optimal);
    CHECK(result.report.records.empty());
    CHECK(result.model.current().values() == y);
    CHECK(result.model.terms().empty());
  }
}

TEST_CASE("complete basis with a long inner loop reproduces the gradient step") {
  oracle::Gen gen(21);
  const auto s = gen.space(6, 1, 1);
  const auto y = gen.normals(6);
  const SquaredLoss obj(s, LabeledData::real(y));
  const EnumeratedClass basis(complete_basis(s));
  DescentConfig dc;
  dc.schedule = FixedStep{0.5};
  dc.iterations = 12;
  dc.inner = ThresholdInner{1e-14, 0.0, 6};
  const auto result = run_repeated(obj, basis, dc);
  // Unrestricted descent on 1/2||f - y||^2 with eta = 1/2 from 0: f_t = (1 - 2^-t) y.
  const double scale = 1.0 - std::pow(0.5, 12);
  for (std::size_t i = 0; i < 6; ++i) CHECK(result.model.current()(i) == doctest::Approx(scale * y[i]).epsilon(1e-12));
}

TEST_CASE("exact learner makes all three algorithms coincide") {
  oracle::Gen gen(5);
  const auto s = gen.space(8, 2, 2);
  const SquaredLoss obj(s, LabeledData::real(gen.normals(16), 2));
  const IdentityLearner exact;
  DescentConfig dc;
  dc.schedule = FixedStep{0.3};
  dc.iterations = 25;
  const auto naive = run_naive(obj, exact, dc);
  for (Algorithm a : {Algorithm::Repeated, Algorithm::Residual}) {
    const auto other = run(a, obj, exact, dc);
    REQUIRE(other.report.records.size() == naive.report.records.size());
    for (std::size_t i = 0; i < naive.model.current().values().size(); ++i)
      CHECK(std::abs(other.model.current().values()[i] - naive.model.current().values()[i]) <= 1e-9);
  }
}

TEST_CASE("naive with step 1/Lambda decays geometrically on squared loss") {
  oracle::Gen gen(17);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = gen.between(2, 12);
    const auto s = gen.space(n, 1, 1);
    const auto y = gen.normals(n);
    const SquaredLoss obj(s, LabeledData::real(y));
    const EnumeratedClass basis(complete_basis(s));
    DescentConfig dc;
    dc.schedule = FixedStep{1.0};
    dc.iterations = 30;
    dc.collect_targets = true;
    const auto result = run_naive(obj, basis, dc);
    double gamma = 1.0;
    for (const auto& t : result.report.targets) gamma = std::min(gamma, axis_edge(t));
    CHECK(gamma >= 1.0 / std::sqrt(static_cast<double>(n)) - 1e-12);

    double prev = result.report.initial_objective;
    const double gap0 = prev;  // R* = 0 at f = y
    for (const auto& r : result.report.records) {
      CHECK(r.objective <= prev + 1e-15);
      CHECK(r.objective <= std::pow(1.0 - gamma * gamma, static_cast<double>(r.t)) * gap0 + 1e-12);
      prev = r.objective;
    }
  }
}

TEST_CASE("runs on random data keep their bookkeeping consistent") {
  oracle::Gen gen(29);
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t n = gen.between(5, 30);
    const auto s = gen.space(n, 3, 1, gen.coin(), gen.coin());
    const SquaredLoss obj(s, LabeledData::real(gen.normals(n)));
    const RegressionStumps stumps;
    for (Algorithm a : {Algorithm::Naive, Algorithm::Repeated, Algorithm::RepeatedThreshold, Algorithm::Residual}) {
      DescentConfig dc;
      dc.schedule = gen.coin() ? StepSchedule{InvSqrtT{}} : StepSchedule{LineSearchStep{}};
      dc.iterations = 15;
      const auto result = run(a, obj, stumps, dc);
      const auto& recs = result.report.records;
      CHECK(result.model.consistency_error() <= 1e-9);
      for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(recs[i].t == i + 1);
        CHECK(recs[i].step > 0.0);
        if (i) CHECK(recs[i].weak_learners >= recs[i - 1].weak_learners);
        CHECK(recs[i].residual_norm.has_value() == (a == Algorithm::Residual));
      }
      if (result.report.status == RunStatus::Completed) CHECK(recs.size() == 15);
      CHECK(result.report.projections.max_pythagoras_error <= 1e-10);
      CHECK(result.report.projections.max_orthogonality_error <= 1e-10);
      if (std::holds_alternative<LineSearchStep>(dc.schedule)) {
        double prev = result.report.initial_objective;
        for (const auto& r : recs) {
          CHECK(r.objective <= prev);
          prev = r.objective;
        }
      }
    }
  }
}

TEST_CASE("runs are deterministic") {
  oracle::Gen gen(41);
  const auto s = gen.space(40, 2, 3);
  std::vector<int> cls(40);
  for (int& c : cls) c = static_cast<int>(gen.index(3));
  const MulticlassHinge obj(s, LabeledData::classes_of(cls, 3));
  const MulticlassStumps stumps(3);
  DescentConfig dc;
  dc.iterations = 20;
  for (Algorithm a : {Algorithm::Naive, Algorithm::Repeated, Algorithm::Residual}) {
    const auto r1 = run(a, obj, stumps, dc);
    const auto r2 = run(a, obj, stumps, dc);
    CHECK(r1.model.current().values() == r2.model.current().values());
    REQUIRE(r1.report.records.size() == r2.report.records.size());
    for (std::size_t i = 0; i < r1.report.records.size(); ++i) {
      CHECK(r1.report.records[i].objective == r2.report.records[i].objective);
      CHECK(r1.report.records[i].edge == r2.report.records[i].edge);
    }
  }
}

TEST_CASE("threshold inner loop") {
  const Counterexample ce;
  DescentConfig loose = ce.config(40);
  loose.inner = ThresholdInner{1e9, 0.5, 1000};
  const auto naive = run_naive(ce.obj, ce.basis, ce.config(40));
  const auto one_each = run_repeated(ce.obj, ce.basis, loose);
  CHECK(one_each.model.current().values() == naive.model.current().values());
  CHECK(one_each.report.records.back().weak_learners == 40);

  DescentConfig tight = ce.config(40);
  tight.inner = ThresholdInner{1e-9, 0.5, 1000};
  const auto full = run(Algorithm::RepeatedThreshold, ce.obj, ce.basis, tight);
  CHECK(full.report.algorithm == "repeated-threshold");
  CHECK(full.report.records.back().weak_learners == 80);

  DescentConfig capped = ce.config(10);
  capped.inner = ThresholdInner{1e-9, 0.5, 1};
  CHECK(run_repeated(ce.obj, ce.basis, capped).report.records.back().weak_learners == 10);
}

TEST_CASE("residual norm stays within the accumulation bound") {
  oracle::Gen gen(53);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = gen.between(3, 10);
    const auto s = gen.space(n, 1, 1);
    std::vector<double> signs(n);
    for (double& v : signs) v = gen.sign();
    const BinaryHinge obj(s, LabeledData::binary(signs));
    const EnumeratedClass basis(complete_basis(s));
    DescentConfig dc;
    dc.iterations = 60;
    dc.collect_targets = true;
    const auto result = run_residual(obj, basis, dc);
    double gamma = 1.0;
    for (const auto& t : result.report.targets) gamma = std::min(gamma, axis_edge(t));
    const double G = result.report.max_grad_norm();
    const double q = std::sqrt(1.0 - gamma * gamma);
    const double bound = G * q / (1.0 - q);
    for (const auto& r : result.report.records) CHECK(*r.residual_norm <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("ensemble rebuild and prediction") {
  oracle::Gen gen(61);
  const auto s = gen.space(20, 2, 1);
  const SquaredLoss obj(s, LabeledData::real(gen.normals(20)));
  const RegressionStumps stumps;
  DescentConfig dc;
  dc.iterations = 30;
  const auto result = run_residual(obj, stumps, dc);
  const auto& model = result.model;
  CHECK(model.consistency_error() <= 1e-9);
  for (std::size_t i = 0; i < s->size(); ++i) {
    const std::vector<double> row{s->feature(i, 0), s->feature(i, 1)};
    CHECK(model.predict(row)[0] == doctest::Approx(model.current()(i)).epsilon(1e-12));
  }
  const auto other = gen.space(5, 2, 1);
  const FnVec out = model.predict_on(other);
  for (std::size_t i = 0; i < 5; ++i) {
    const std::vector<double> row{other->feature(i, 0), other->feature(i, 1)};
    CHECK(out(i) == doctest::Approx(model.predict(row)[0]).epsilon(1e-12));
  }

  Ensemble offset(s, {2.0});
  CHECK(offset.current()(3) == 2.0);
  CHECK_THROWS_AS(Ensemble(s, {1.0, 2.0}), InvalidArgument);
  const Ensemble tabulated(FnVec(s, gen.normals(20)));
  CHECK_THROWS_AS(tabulated.predict(std::vector<double>{0.0, 0.0}), UnsupportedError);
}

TEST_CASE("run preconditions") {
  const Counterexample ce;
  DescentConfig dc = ce.config(0);
  CHECK_THROWS_AS(run_naive(ce.obj, ce.basis, dc), InvalidArgument);

  DescentConfig wrong_space = ce.config(5);
  wrong_space.initial = FnVec(TwoPointAbs::make_space(), {0.5, 1.0});
  CHECK_THROWS_AS(run_naive(ce.obj, ce.basis, wrong_space), BindingError);

  DescentConfig norm_min = ce.config(5);
  norm_min.mode = ProjectionMode::NormMin;
  CHECK_THROWS_AS(run_naive(ce.obj, ce.basis, norm_min), UnsupportedError);
}
