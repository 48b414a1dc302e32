#include "fboost/edge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fboost/error.hpp"

namespace fboost {

std::string to_string(EdgeMode mode) {
  return mode == EdgeMode::InnerProduct ? "inner-product" : "norm-residual";
}

EdgeEstimate realized_edge(const FnVec& target, const FnVec& h, EdgeMode mode) {
  require_same_space(target, h);
  const double tt = squared_norm(target);
  if (!(tt > 0.0)) throw DegenerateError("edge of a zero target is undefined");
  EdgeEstimate est;
  est.mode = mode;
  if (mode == EdgeMode::InnerProduct) {
    const double hh = squared_norm(h);
    if (!(hh > 0.0)) throw DegenerateError("edge against a zero hypothesis is undefined");
    est.raw = inner(target, h) / std::sqrt(tt * hh);
  } else {
    const double rest = squared_norm(combine(1.0, target, -1.0, h));
    est.raw = std::sqrt(std::max(0.0, 1.0 - rest / tt));
  }
  est.negative = est.raw < 0.0;
  est.gamma = std::clamp(est.raw, 0.0, 1.0);
  return est;
}

EdgeEstimate realized_edge(const FnVec& target, const Hypothesis& h, EdgeMode mode) {
  return realized_edge(target, h.vec(), mode);
}

namespace {

template <class Member, class VecOf>
EdgeEstimate class_edge_impl(std::span<const Member> members, std::span<const FnVec> targets,
                             VecOf vec_of) {
  if (members.empty()) throw InvalidArgument("class is empty");
  if (targets.empty()) throw InvalidArgument("no targets supplied");
  std::vector<double> member_norms(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) member_norms[m] = norm(vec_of(members[m]));

  EdgeEstimate worst;
  worst.raw = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double tn = norm(targets[t]);
    if (!(tn > 0.0)) throw DegenerateError("class edge needs nonzero targets");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (!(member_norms[m] > 0.0)) continue;
      best = std::max(best, inner(targets[t], vec_of(members[m])) / (tn * member_norms[m]));
    }
    if (best < worst.raw) {
      worst.raw = best;
      worst.worst_target = t;
    }
  }
  worst.n_targets = targets.size();
  worst.negative = worst.raw < 0.0;
  worst.gamma = std::clamp(worst.raw, 0.0, 1.0);
  return worst;
}

}  // namespace

EdgeEstimate class_edge(std::span<const FnVec> members, std::span<const FnVec> targets) {
  return class_edge_impl(members, targets, [](const FnVec& f) -> const FnVec& { return f; });
}

EdgeEstimate class_edge(std::span<const Hypothesis> members, std::span<const FnVec> targets) {
  return class_edge_impl(members, targets, [](const Hypothesis& h) -> const FnVec& { return h.vec(); });
}

// ---------------------------------------------------------------------------
// Binary

void BinaryWeightedClassification::validate() const {
  if (weights.empty()) throw InvalidArgument("weighted classification needs at least one point");
  if (weights.size() != labels.size()) throw InvalidArgument("weight/label count mismatch");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be non-negative");
  for (int y : labels)
    if (y != 1 && y != -1) throw InvalidArgument("labels must be +1 or -1");
}

FnVec BinaryWeightedClassification::as_target(const SpacePtr& space) const {
  validate();
  if (space->size() != size() || space->output_dim() != 1)
    throw InvalidArgument("space does not match the weighted classification problem");
  FnVec t(space);
  for (std::size_t n = 0; n < size(); ++n) t(n) = weights[n] * labels[n];
  return t;
}

BinaryWeightedClassification BinaryWeightedClassification::from_target(const FnVec& target) {
  if (target.output_dim() != 1) throw InvalidArgument("binary reduction needs k = 1");
  BinaryWeightedClassification wc;
  for (std::size_t n = 0; n < target.size(); ++n) {
    wc.weights.push_back(std::abs(target(n)));
    wc.labels.push_back(target(n) >= 0.0 ? 1 : -1);
  }
  return wc;
}

double adaboost_to_l2(const BinaryWeightedClassification& wc, double delta) {
  wc.validate();
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("delta must be in (0, 1]");
  return delta / std::sqrt(static_cast<double>(wc.size()));
}

namespace {

SpacePtr index_space(std::size_t n, std::size_t k) {
  std::vector<double> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<double>(i);
  return SampleSpace::create(std::move(rows), 1, k);
}

}  // namespace

ImplicationCheck check_adaboost_implies_l2(const BinaryWeightedClassification& wc,
                                           std::span<const int> h, double delta) {
  const double bound = adaboost_to_l2(wc, delta);
  if (h.size() != wc.size()) throw InvalidArgument("classifier output count mismatch");
  double total = 0.0, wrong = 0.0;
  for (std::size_t n = 0; n < wc.size(); ++n) {
    if (h[n] != 1 && h[n] != -1) throw InvalidArgument("classifier outputs must be +-1");
    total += wc.weights[n];
    if (h[n] != wc.labels[n]) wrong += wc.weights[n];
  }
  ImplicationCheck check;
  check.premise = total > 0.0 && wrong <= (0.5 - 0.5 * delta) * total;
  check.rhs = bound;
  if (total > 0.0) {
    const SpacePtr space = index_space(wc.size(), 1);
    FnVec hv(space);
    for (std::size_t n = 0; n < wc.size(); ++n) hv(n) = h[n];
    check.lhs = realized_edge(wc.as_target(space), hv).raw;
  }
  check.conclusion = check.lhs >= check.rhs;
  return check;
}

ImplicationCheck l2_to_adaboost(const FnVec& target, const FnVec& h, double gamma) {
  require_same_space(target, h);
  if (target.output_dim() != 1) throw InvalidArgument("binary reduction needs k = 1");
  if (!target.space()->uniform()) throw InvalidArgument("binary reduction needs uniform point weights");
  for (double v : h.values())
    if (v != 1.0 && v != -1.0) throw InvalidArgument("hypothesis outputs must be +-1");
  const auto wc = BinaryWeightedClassification::from_target(target);
  double total = 0.0, correct = 0.0;
  for (std::size_t n = 0; n < wc.size(); ++n) {
    total += wc.weights[n];
    if (static_cast<int>(h(n)) == wc.labels[n]) correct += wc.weights[n];
  }
  ImplicationCheck check;
  check.premise = realized_edge(target, h).raw >= gamma;
  check.lhs = correct;
  check.rhs = (0.5 + 0.5 * gamma) * total;
  check.conclusion = check.lhs >= check.rhs;
  return check;
}

ImplicationCheck l2_to_adaboost(const FnVec& target, const Hypothesis& h, double gamma) {
  return l2_to_adaboost(target, h.vec(), gamma);
}

// ---------------------------------------------------------------------------
// Multiclass

bool MulticlassRewards::zero_mean(double tol) const {
  for (std::size_t n = 0; n < size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) s += at(n, k);
    if (std::abs(s) > tol) return false;
  }
  return true;
}

void MulticlassRewards::normalize() {
  for (std::size_t n = 0; n < size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) s += at(n, k);
    for (std::size_t k = 0; k < num_classes; ++k)
      rewards[n * num_classes + k] -= s / static_cast<double>(num_classes);
  }
}

std::vector<int> MulticlassRewards::best_classes() const {
  std::vector<int> y(size());
  for (std::size_t n = 0; n < size(); ++n) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < num_classes; ++k)
      if (at(n, k) > at(n, arg)) arg = k;
    y[n] = static_cast<int>(arg);
  }
  return y;
}

FnVec MulticlassRewards::as_target(const SpacePtr& space) const {
  if (space->size() != size() || space->output_dim() != num_classes)
    throw InvalidArgument("space does not match the reward matrix");
  return FnVec(space, rewards);
}

MulticlassCheck multiclass_requirement_check(MulticlassRewards wc, const FnVec& encoded, double delta,
                                             bool auto_normalize) {
  const std::size_t K = wc.num_classes;
  const std::size_t N = wc.size();
  if (K < 2) throw InvalidArgument("multiclass check needs K >= 2");
  if (N == 0 || wc.rewards.size() != N * K) throw InvalidArgument("reward matrix must be n x K");
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("delta must be in (0, 1]");
  if (!wc.zero_mean()) {
    if (!auto_normalize) throw InvalidArgument("reward rows must be zero-mean (or pass auto_normalize)");
    wc.normalize();
  }
  if (encoded.size() != N || encoded.output_dim() != K)
    throw InvalidArgument("encoded hypothesis does not match the reward matrix");

  // Recover predicted classes from the encoding.
  std::vector<std::size_t> predicted(N);
  for (std::size_t n = 0; n < N; ++n) {
    double row_sum = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < K; ++k) {
      row_sum += encoded(n, k);
      if (encoded(n, k) > encoded(n, arg)) arg = k;
    }
    if (std::abs(row_sum) > 1e-9) throw InvalidArgument("hypothesis is not in encoded form");
    predicted[n] = arg;
  }

  const auto y = wc.best_classes();
  double total = 0.0, chosen = 0.0, best = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t k = 0; k < K; ++k) total += wc.at(n, k);
    chosen += wc.at(n, predicted[n]);
    best += wc.at(n, static_cast<std::size_t>(y[n]));
  }
  const double kk = static_cast<double>(K);
  auto reward_rhs = [&](double d) { return (1.0 / kk - d / kk) * total + d * best; };

  const SpacePtr space = index_space(N, K);
  const FnVec target = wc.as_target(space);
  const FnVec h(space, encoded.values());
  const double edge = inner(target, h) / (norm(target) * norm(h));

  MulticlassCheck out;
  out.edge = edge;
  // Largest delta with chosen >= total/K + delta (best - total/K).
  const double slope = best - total / kk;
  out.max_reward_delta = slope > 0.0 ? (chosen - total / kk) / slope : 0.0;

  const double sqrt_n = std::sqrt(static_cast<double>(N));
  out.forward.premise = chosen >= reward_rhs(delta);
  out.forward.lhs = edge;
  out.forward.rhs = delta / sqrt_n;
  out.forward.conclusion = edge >= out.forward.rhs;

  out.forward_tight = out.forward;
  out.forward_tight.rhs = delta / ((kk - 1.0) * sqrt_n);
  out.forward_tight.conclusion = edge >= out.forward_tight.rhs;

  out.reverse.premise = edge >= delta;
  out.reverse.lhs = chosen;
  out.reverse.rhs = reward_rhs(delta);
  out.reverse.conclusion = chosen >= out.reverse.rhs - 1e-12 * std::max(1.0, std::abs(best));
  return out;
}

}  // namespace fboost
