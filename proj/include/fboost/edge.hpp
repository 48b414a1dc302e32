#pragma once

// Weak-learner edge: how well the best member of a class aligns with a target,
// and the conversions between that geometric edge and the classic
// weighted-classification advantage (binary and multiclass).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fboost/fspace.hpp"
#include "fboost/learners.hpp"

namespace fboost {

enum class EdgeMode { InnerProduct, NormResidual };
std::string to_string(EdgeMode mode);

struct EdgeEstimate {
  double gamma = 0.0;  // clamped to [0, 1]
  EdgeMode mode = EdgeMode::InnerProduct;
  double raw = 0.0;        // unclamped cosine (InnerProduct mode)
  bool negative = false;   // raw alignment was negative; gamma reported as 0
  std::size_t n_targets = 1;
  std::optional<std::size_t> worst_target;  // class_edge only
};

// InnerProduct: <t, h> / (||t|| ||h||). NormResidual: sqrt(1 - ||t - h||^2 / ||t||^2),
// clamped to [0, 1]. DegenerateError on zero norms.
EdgeEstimate realized_edge(const FnVec& target, const FnVec& h,
                           EdgeMode mode = EdgeMode::InnerProduct);
EdgeEstimate realized_edge(const FnVec& target, const Hypothesis& h,
                           EdgeMode mode = EdgeMode::InnerProduct);

// min over targets of max over members of the realized edge: a certified edge
// for the supplied target family only.
EdgeEstimate class_edge(std::span<const FnVec> members, std::span<const FnVec> targets);
EdgeEstimate class_edge(std::span<const Hypothesis> members, std::span<const FnVec> targets);

struct BinaryWeightedClassification {
  std::vector<double> weights;  // w_n >= 0
  std::vector<int> labels;      // +-1
  void validate() const;
  std::size_t size() const { return weights.size(); }
  // The equivalent L2 target grad_n = w_n y_n on a uniform N-point space.
  FnVec as_target(const SpacePtr& space) const;
  static BinaryWeightedClassification from_target(const FnVec& target);
};

struct MulticlassRewards {
  std::size_t num_classes = 0;
  std::vector<double> rewards;  // n x K, w_{nk}
  std::size_t size() const { return num_classes ? rewards.size() / num_classes : 0; }
  double at(std::size_t n, std::size_t k) const { return rewards[n * num_classes + k]; }
  bool zero_mean(double tol = 1e-9) const;
  void normalize();  // subtract each row's mean
  // y_n = argmax_k w_{nk}, lowest index on ties.
  std::vector<int> best_classes() const;
  FnVec as_target(const SpacePtr& space) const;
};

// Outcome of checking "premise => conclusion" on one concrete instance.
struct ImplicationCheck {
  bool premise = false;
  bool conclusion = false;
  double lhs = 0.0;  // measured side of the conclusion
  double rhs = 0.0;  // required side of the conclusion
  bool holds() const { return !premise || conclusion; }
  double margin() const { return lhs - rhs; }
};

// Implied L2 edge delta / sqrt(N) of a delta-advantage weak classifier.
double adaboost_to_l2(const BinaryWeightedClassification& wc, double delta);

// weighted error <= (1/2 - delta/2) sum w  =>  realized edge >= delta / sqrt(N),
// with h given as +-1 per point.
ImplicationCheck check_adaboost_implies_l2(const BinaryWeightedClassification& wc,
                                           std::span<const int> h, double delta);

// realized edge >= gamma  =>  sum_{h = sgn t} |t| >= (1/2 + gamma/2) sum |t|.
// Requires k = 1, a uniform space and a +-1 valued h.
ImplicationCheck l2_to_adaboost(const FnVec& target, const FnVec& h, double gamma);
ImplicationCheck l2_to_adaboost(const FnVec& target, const Hypothesis& h, double gamma);

struct MulticlassCheck {
  // sum_n w_{n,h(n)} >= (1/K - delta/K) sum w + delta sum_n w_{n,y_n}
  //   =>  realized edge >= delta / sqrt(N)
  ImplicationCheck forward;
  // realized edge >= delta  =>  the reward condition above
  ImplicationCheck reverse;
  // Forward conclusion against delta / ((K - 1) sqrt(N)), the constant the
  // inequality chain actually supports for K > 2.
  ImplicationCheck forward_tight;
  // Largest delta for which the reward condition holds (<= 0 if none).
  double max_reward_delta = 0.0;
  double edge = 0.0;
};

// `encoded` must hold encoded multiclass outputs (zero coordinate sum per
// point). Rows of `wc` must be zero-mean unless auto_normalize.
MulticlassCheck multiclass_requirement_check(MulticlassRewards wc, const FnVec& encoded, double delta,
                                             bool auto_normalize = false);

}  // namespace fboost
