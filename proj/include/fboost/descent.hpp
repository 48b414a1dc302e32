#pragma once

// Restricted gradient descent in the empirical L2 space: each step direction
// is a projection of a (modified) subgradient onto a weak-learner class.
//
//   naive     f_t = f_{t-1} - eta_t c h,     h fitted to grad_t
//   repeated  f_t = f_{t-1} - eta_t sum_k c_k h_k, the h_k greedily fitted
//             to what is left of grad_t after the earlier h's
//   residual  delta += grad_t; h fitted to delta; f_t = f_{t-1} - eta_t c h;
//             delta -= c h
//
// with c = <target, h> / ||h||^2 the vector-projection coefficient.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fboost/fspace.hpp"
#include "fboost/learners.hpp"
#include "fboost/objectives.hpp"

namespace fboost {

// Gradient norms at or below this terminate a run as optimal.
inline constexpr double kZeroGradient = 1e-12;

struct FixedStep {
  double eta = 1.0;
};
// eta_t = c / (lambda t)
struct InvLambdaT {
  double c = 1.0;
  double lambda = 1.0;
};
// eta_t = 1 / sqrt(t)
struct InvSqrtT {};
// Backtracking from eta = 1 along the step direction.
struct LineSearchStep {
  double shrink = 0.5;
  std::size_t max_evals = 40;
};

using StepSchedule = std::variant<FixedStep, InvLambdaT, InvSqrtT, LineSearchStep>;

// eta_t for closed-form schedules; throws for LineSearchStep.
double step_size(const StepSchedule& schedule, std::size_t t);
std::string describe(const StepSchedule& schedule);

// Inner loop of the repeated algorithm: k = 1..t projections, or project
// until the leftover gradient norm drops below eps_t = base / t^power.
struct FixedInner {};
struct ThresholdInner {
  double base = 1e-2;
  double power = 0.5;
  std::size_t max_inner = 1000;
};
using InnerLoop = std::variant<FixedInner, ThresholdInner>;

class Ensemble {
 public:
  struct Term {
    double coefficient;
    Hypothesis hypothesis;
  };

  // f_0 = 0 on `space`.
  explicit Ensemble(SpacePtr space);
  // f_0 = the given constant output.
  Ensemble(SpacePtr space, std::vector<double> offset);
  // f_0 = an arbitrary tabulated function on the training space.
  explicit Ensemble(FnVec initial);

  // f <- f - coefficient * h
  void add_term(double coefficient, Hypothesis h);

  const FnVec& current() const { return cached_; }
  const SpacePtr& space() const { return space_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<double>& offset() const { return offset_; }
  const std::optional<FnVec>& base() const { return base_; }
  std::size_t output_dim() const { return offset_.size(); }

  std::vector<double> predict(std::span<const double> row) const;
  FnVec predict_on(const SpacePtr& space) const;

  // f_T recomputed from the offset and every term.
  FnVec rebuild() const;
  // max |cached - rebuilt| over all entries.
  double consistency_error() const;

 private:
  SpacePtr space_;
  std::vector<double> offset_;
  std::optional<FnVec> base_;
  std::vector<Term> terms_;
  FnVec cached_;
};

struct IterationRecord {
  std::size_t t = 0;
  std::size_t weak_learners = 0;  // cumulative fits
  double objective = 0.0;         // R[f_t] after the update
  double grad_norm = 0.0;         // ||grad_t||, taken at f_{t-1}
  double edge = 0.0;              // smallest realized edge among this iteration's projections
  double step = 0.0;              // eta_t
  std::optional<double> residual_norm;  // ||delta|| after the update (residual only)
};

enum class RunStatus { Completed, Optimal, Stalled };
std::string to_string(RunStatus status);

// Aggregated checks over every projection a run performs.
struct ProjectionStats {
  std::size_t count = 0;
  double min_edge = 1.0;
  double max_pythagoras_error = 0.0;     // | ||t||^2 - c^2||h||^2 - ||t - ch||^2 | / max(1, ||t||^2)
  double max_orthogonality_error = 0.0;  // | <t - ch, h> | / max(1, ||t|| ||h||)
};

struct TrainReport {
  std::string algorithm;
  double initial_objective = 0.0;
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::Completed;
  ProjectionStats projections;
  // Every target handed to the learner, when DescentConfig::collect_targets.
  std::vector<FnVec> targets;

  double max_grad_norm() const;
};

struct DescentConfig {
  StepSchedule schedule = InvSqrtT{};
  std::size_t iterations = 100;
  // Defaults to the learner's own mode.
  std::optional<ProjectionMode> mode;
  // Defaults to the zero function.
  std::optional<FnVec> initial;
  InnerLoop inner = FixedInner{};
  bool collect_targets = false;
  std::function<void(const IterationRecord&, const Ensemble&)> on_iteration;
};

struct RunResult {
  Ensemble model;
  TrainReport report;
};

enum class Algorithm { Naive, Repeated, RepeatedThreshold, Residual };
std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

// c = <target, h> / ||h||^2; DegenerateError for a zero-norm h.
double project_coefficient(const FnVec& target, const Hypothesis& h);

// Backtracking from eta = 1: shrink while R[f - eta d] fails to decrease, then
// keep shrinking while it keeps improving. Returns 0 when no eta within
// max_evals objective evaluations decreases R.
double line_search(const Objective& obj, const FnVec& f, const FnVec& direction, double shrink,
                   std::size_t max_evals);

RunResult run_naive(const Objective& obj, const RestrictionSet& learner, const DescentConfig& config);
RunResult run_repeated(const Objective& obj, const RestrictionSet& learner,
                       const DescentConfig& config);
RunResult run_residual(const Objective& obj, const RestrictionSet& learner,
                       const DescentConfig& config);

// Dispatch; RepeatedThreshold forces a ThresholdInner loop (default
// parameters unless config.inner already is one).
RunResult run(Algorithm algorithm, const Objective& obj, const RestrictionSet& learner,
              const DescentConfig& config);

}  // namespace fboost
