#include "fboost/descent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fboost/error.hpp"

namespace fboost {

// ---------------------------------------------------------------------------
// Schedules

double step_size(const StepSchedule& schedule, std::size_t t) {
  const double tt = static_cast<double>(t);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedStep>) {
          return s.eta;
        } else if constexpr (std::is_same_v<T, InvLambdaT>) {
          return s.c / (s.lambda * tt);
        } else if constexpr (std::is_same_v<T, InvSqrtT>) {
          return 1.0 / std::sqrt(tt);
        } else {
          throw InvalidArgument("line search has no closed-form step size");
        }
      },
      schedule);
}

std::string describe(const StepSchedule& schedule) {
  std::ostringstream out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedStep>) {
          out << "fixed(" << s.eta << ")";
        } else if constexpr (std::is_same_v<T, InvLambdaT>) {
          out << s.c << "/(" << s.lambda << "t)";
        } else if constexpr (std::is_same_v<T, InvSqrtT>) {
          out << "1/sqrt(t)";
        } else {
          out << "line-search(shrink=" << s.shrink << ")";
        }
      },
      schedule);
  return out.str();
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::Optimal:
      return "optimal";
    case RunStatus::Stalled:
      return "stalled";
  }
  return "unknown";
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Naive:
      return "naive";
    case Algorithm::Repeated:
      return "repeated";
    case Algorithm::RepeatedThreshold:
      return "repeated-threshold";
    case Algorithm::Residual:
      return "residual";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "naive") return Algorithm::Naive;
  if (name == "repeated") return Algorithm::Repeated;
  if (name == "repeated-threshold") return Algorithm::RepeatedThreshold;
  if (name == "residual") return Algorithm::Residual;
  throw InvalidArgument("unknown algorithm '" + name + "'");
}

double TrainReport::max_grad_norm() const {
  double g = 0.0;
  for (const auto& r : records) g = std::max(g, r.grad_norm);
  return g;
}

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(SpacePtr space)
    : space_(space), offset_(space->output_dim(), 0.0), cached_(space) {}

Ensemble::Ensemble(SpacePtr space, std::vector<double> offset)
    : space_(space), offset_(std::move(offset)), cached_(space) {
  if (offset_.size() != space_->output_dim()) throw InvalidArgument("offset arity mismatch");
  for (std::size_t i = 0; i < cached_.size(); ++i)
    std::copy(offset_.begin(), offset_.end(), cached_.at(i).begin());
}

Ensemble::Ensemble(FnVec initial)
    : space_(initial.space()),
      offset_(initial.output_dim(), 0.0),
      base_(initial),
      cached_(std::move(initial)) {}

void Ensemble::add_term(double coefficient, Hypothesis h) {
  cached_.axpy(-coefficient, h.vec());
  terms_.push_back({coefficient, std::move(h)});
}

std::vector<double> Ensemble::predict(std::span<const double> row) const {
  if (base_) throw UnsupportedError("model with a tabulated start point only predicts on its training space");
  std::vector<double> out = offset_;
  for (const auto& term : terms_) {
    const auto v = term.hypothesis.evaluate(row);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] -= term.coefficient * v[c];
  }
  return out;
}

FnVec Ensemble::predict_on(const SpacePtr& space) const {
  if (space->token() == space_->token()) return cached_;
  if (base_) throw UnsupportedError("model with a tabulated start point only predicts on its training space");
  if (space->output_dim() != output_dim()) throw InvalidArgument("model arity does not match space");
  FnVec out(space);
  for (std::size_t i = 0; i < out.size(); ++i)
    std::copy(offset_.begin(), offset_.end(), out.at(i).begin());
  for (const auto& term : terms_) out.axpy(-term.coefficient, term.hypothesis.evaluate_on(space));
  return out;
}

FnVec Ensemble::rebuild() const {
  FnVec out = base_ ? *base_ : FnVec(space_);
  if (!base_) {
    for (std::size_t i = 0; i < out.size(); ++i)
      std::copy(offset_.begin(), offset_.end(), out.at(i).begin());
  }
  for (const auto& term : terms_) out.axpy(-term.coefficient, term.hypothesis.vec());
  return out;
}

double Ensemble::consistency_error() const {
  const FnVec rebuilt = rebuild();
  double err = 0.0;
  for (std::size_t i = 0; i < rebuilt.values().size(); ++i)
    err = std::max(err, std::abs(rebuilt.values()[i] - cached_.values()[i]));
  return err;
}

// ---------------------------------------------------------------------------
// Projection and line search

double project_coefficient(const FnVec& target, const Hypothesis& h) {
  const double hh = h.norm() * h.norm();
  if (!(hh > 0.0)) throw DegenerateError("cannot project onto a zero-norm hypothesis");
  return inner(target, h.vec()) / hh;
}

double line_search(const Objective& obj, const FnVec& f, const FnVec& direction, double shrink,
                   std::size_t max_evals) {
  if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("line search shrink must be in (0, 1)");
  if (direction.is_zero()) return 0.0;
  const double start = obj.value(f);
  auto value_at = [&](double eta) { return obj.value(combine(1.0, f, -eta, direction)); };

  double eta = 1.0;
  double best = 0.0;
  std::size_t evals = 0;
  bool found = false;
  while (evals < max_evals) {
    best = value_at(eta);
    ++evals;
    if (best < start) {
      found = true;
      break;
    }
    eta *= shrink;
  }
  if (!found) return 0.0;
  while (evals < max_evals) {
    const double candidate = eta * shrink;
    const double v = value_at(candidate);
    ++evals;
    if (!(v < best)) break;
    best = v;
    eta = candidate;
  }
  return eta;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

struct Projected {
  double coefficient;
  double edge;
};

// Projects `target` onto h, folding the Pythagoras and orthogonality residuals
// into the run's statistics.
Projected project(const FnVec& target, const Hypothesis& h, ProjectionStats& stats) {
  const double c = project_coefficient(target, h);
  const double tt = squared_norm(target);
  const double hh = h.norm() * h.norm();
  const FnVec rest = combine(1.0, target, -c, h.vec());
  const double rr = squared_norm(rest);
  const double pyth = std::abs(tt - c * c * hh - rr) / std::max(1.0, tt);
  const double orth = std::abs(inner(rest, h.vec())) / std::max(1.0, std::sqrt(tt) * h.norm());
  const double edge = inner(target, h.vec()) / (std::sqrt(tt) * h.norm());
  ++stats.count;
  stats.min_edge = std::min(stats.min_edge, edge);
  stats.max_pythagoras_error = std::max(stats.max_pythagoras_error, pyth);
  stats.max_orthogonality_error = std::max(stats.max_orthogonality_error, orth);
  return {c, edge};
}

class Runner {
 public:
  Runner(const Objective& obj, const RestrictionSet& learner, const DescentConfig& config,
         std::string algorithm)
      : obj_(obj),
        learner_(learner),
        config_(config),
        mode_(config.mode.value_or(learner.default_mode())),
        model_(config.initial ? Ensemble(*config.initial) : Ensemble(obj.space())) {
    if (config.iterations == 0) throw InvalidArgument("iteration count must be >= 1");
    if (config.initial && config.initial->space()->token() != obj.space()->token())
      throw BindingError("initial function is not on the objective's sample space");
    if (!learner.supports(mode_))
      throw UnsupportedError(learner.describe() + " does not support the requested projection mode");
    report_.algorithm = std::move(algorithm);
    report_.initial_objective = obj.value(model_.current());
  }

  const FnVec& f() const { return model_.current(); }

  Hypothesis fit(const FnVec& target) {
    if (config_.collect_targets) report_.targets.push_back(target);
    ++weak_learners_;
    return learner_.fit(target, mode_);
  }

  Projected project(const FnVec& target, const Hypothesis& h) {
    return fboost::project(target, h, report_.projections);
  }

  // Step size for moving along -direction; 0 means the line search stalled.
  double step(std::size_t t, const FnVec& direction) {
    if (const auto* ls = std::get_if<LineSearchStep>(&config_.schedule))
      return line_search(obj_, f(), direction, ls->shrink, ls->max_evals);
    return step_size(config_.schedule, t);
  }

  void add_term(double coefficient, Hypothesis h) { model_.add_term(coefficient, std::move(h)); }

  void record(IterationRecord rec) {
    rec.weak_learners = weak_learners_;
    rec.objective = obj_.value(f());
    report_.records.push_back(rec);
    if (config_.on_iteration) config_.on_iteration(report_.records.back(), model_);
  }

  void finish(RunStatus status) { report_.status = status; }

  RunResult result() && { return {std::move(model_), std::move(report_)}; }

  const Objective& objective() const { return obj_; }
  const DescentConfig& config() const { return config_; }

 private:
  const Objective& obj_;
  const RestrictionSet& learner_;
  const DescentConfig& config_;
  ProjectionMode mode_;
  Ensemble model_;
  TrainReport report_;
  std::size_t weak_learners_ = 0;
};

}  // namespace

RunResult run_naive(const Objective& obj, const RestrictionSet& learner, const DescentConfig& config) {
  Runner run(obj, learner, config, "naive");
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const FnVec grad = obj.subgradient(run.f());
    const double grad_norm = norm(grad);
    if (grad_norm <= kZeroGradient) {
      run.finish(RunStatus::Optimal);
      return std::move(run).result();
    }
    Hypothesis h = run.fit(grad);
    const auto [c, edge] = run.project(grad, h);
    const double eta = run.step(t, c * h.vec());
    if (eta == 0.0) {
      run.finish(RunStatus::Stalled);
      return std::move(run).result();
    }
    run.add_term(eta * c, std::move(h));
    run.record({.t = t, .grad_norm = grad_norm, .edge = edge, .step = eta, .residual_norm = std::nullopt});
  }
  run.finish(RunStatus::Completed);
  return std::move(run).result();
}

RunResult run_repeated(const Objective& obj, const RestrictionSet& learner,
                       const DescentConfig& config) {
  Runner run(obj, learner, config, "repeated");
  const auto* threshold = std::get_if<ThresholdInner>(&config.inner);
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const FnVec grad = obj.subgradient(run.f());
    const double grad_norm = norm(grad);
    if (grad_norm <= kZeroGradient) {
      run.finish(RunStatus::Optimal);
      return std::move(run).result();
    }

    const std::size_t limit = threshold ? threshold->max_inner : t;
    const double eps =
        threshold ? threshold->base / std::pow(static_cast<double>(t), threshold->power) : 0.0;
    FnVec leftover = grad;
    FnVec direction(obj.space());
    std::vector<std::pair<double, Hypothesis>> pieces;
    double min_edge = 1.0;
    for (std::size_t k = 1; k <= limit; ++k) {
      const double left_norm = norm(leftover);
      if (left_norm <= kZeroGradient) break;
      if (k > 1 && left_norm <= eps) break;
      std::optional<Hypothesis> h;
      try {
        h.emplace(run.fit(leftover));
      } catch (const DegenerateError&) {
        break;
      }
      const auto [c, edge] = run.project(leftover, *h);
      min_edge = std::min(min_edge, edge);
      direction.axpy(c, h->vec());
      leftover.axpy(-c, h->vec());
      pieces.emplace_back(c, std::move(*h));
    }
    if (pieces.empty()) {
      run.finish(RunStatus::Stalled);
      return std::move(run).result();
    }
    const double eta = run.step(t, direction);
    if (eta == 0.0) {
      run.finish(RunStatus::Stalled);
      return std::move(run).result();
    }
    for (auto& [c, h] : pieces) run.add_term(eta * c, std::move(h));
    run.record({.t = t, .grad_norm = grad_norm, .edge = min_edge, .step = eta, .residual_norm = std::nullopt});
  }
  run.finish(RunStatus::Completed);
  return std::move(run).result();
}

RunResult run_residual(const Objective& obj, const RestrictionSet& learner,
                       const DescentConfig& config) {
  Runner run(obj, learner, config, "residual");
  FnVec residual(obj.space());
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const FnVec grad = obj.subgradient(run.f());
    const double grad_norm = norm(grad);
    if (grad_norm <= kZeroGradient) {
      run.finish(RunStatus::Optimal);
      return std::move(run).result();
    }
    residual += grad;
    std::optional<Hypothesis> h;
    try {
      h.emplace(run.fit(residual));
    } catch (const ZeroGradientError&) {
      run.finish(RunStatus::Stalled);
      return std::move(run).result();
    }
    const auto [c, edge] = run.project(residual, *h);
    const double eta = run.step(t, c * h->vec());
    if (eta == 0.0) {
      run.finish(RunStatus::Stalled);
      return std::move(run).result();
    }
    residual.axpy(-c, h->vec());
    run.add_term(eta * c, std::move(*h));
    run.record({.t = t,
                .grad_norm = grad_norm,
                .edge = edge,
                .step = eta,
                .residual_norm = norm(residual)});
  }
  run.finish(RunStatus::Completed);
  return std::move(run).result();
}

RunResult run(Algorithm algorithm, const Objective& obj, const RestrictionSet& learner,
              const DescentConfig& config) {
  switch (algorithm) {
    case Algorithm::Naive:
      return run_naive(obj, learner, config);
    case Algorithm::Repeated:
      return run_repeated(obj, learner, config);
    case Algorithm::RepeatedThreshold: {
      if (std::holds_alternative<ThresholdInner>(config.inner)) {
        auto out = run_repeated(obj, learner, config);
        out.report.algorithm = "repeated-threshold";
        return out;
      }
      DescentConfig adjusted = config;
      adjusted.inner = ThresholdInner{};
      auto out = run_repeated(obj, learner, adjusted);
      out.report.algorithm = "repeated-threshold";
      return out;
    }
    case Algorithm::Residual:
      return run_residual(obj, learner, config);
  }
  throw InvalidArgument("unknown algorithm");
}

}  // namespace fboost
