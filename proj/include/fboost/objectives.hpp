#pragma once

// Convex empirical risk functionals over FnVec. Pointwise losses are averaged
// under the space's point weights, R[f] = sum_n p_n l(f(x_n), y_n), and the
// functional subgradient is the pointwise loss subgradient (the 1/N lives in
// the inner product).

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fboost/fspace.hpp"

namespace fboost {

enum class LabelKind { Real, Binary, Class, Ranking };

// Per-point targets. Real: n x arity values. Binary: +-1 in `targets`.
// Class: 0-based indices in `classes` (external files use 1..K).
// Ranking: relevance in `targets`, query id in `groups`.
struct LabeledData {
  LabelKind kind = LabelKind::Real;
  std::size_t arity = 1;
  std::vector<double> targets;
  std::vector<int> classes;
  std::vector<long long> groups;
  std::size_t num_classes = 0;

  std::size_t size() const;
  void validate(std::size_t n, std::size_t output_dim) const;

  static LabeledData real(std::vector<double> targets, std::size_t arity = 1);
  static LabeledData binary(std::vector<double> signs);
  static LabeledData classes_of(std::vector<int> classes, std::size_t num_classes);
  static LabeledData ranking(std::vector<double> relevance, std::vector<long long> groups);

  LabeledData subset(std::span<const std::size_t> rows) const;
};

class Objective {
 public:
  explicit Objective(SpacePtr space) : space_(std::move(space)) {}
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual double value(const FnVec& f) const = 0;
  virtual FnVec subgradient(const FnVec& f) const = 0;

  // lambda-strong convexity, Lambda-strong smoothness and a gradient-norm
  // bound, when known a priori.
  virtual std::optional<double> strong_convexity() const { return std::nullopt; }
  virtual std::optional<double> smoothness() const { return std::nullopt; }
  virtual std::optional<double> grad_bound() const { return std::nullopt; }

  // Separable objectives expose the per-point loss so optimum oracles can
  // minimize point by point.
  virtual bool separable() const { return false; }
  virtual double point_loss(std::size_t /*i*/, std::span<const double> /*v*/) const;
  virtual void point_subgradient(std::size_t i, std::span<const double> v,
                                 std::span<double> out) const;
  // Points with identical keys have identical per-point problems.
  virtual long long point_key(std::size_t i) const { return static_cast<long long>(i); }
  // Typical magnitude of the targets, used to size optimum search boxes.
  virtual double label_range() const { return 1.0; }

  const SpacePtr& space() const { return space_; }
  std::size_t output_dim() const { return space_->output_dim(); }

 protected:
  void require_bound(const FnVec& f) const;

 private:
  SpacePtr space_;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

// Base for losses of the form sum_n p_n l_n(f(x_n)).
class PointwiseObjective : public Objective {
 public:
  using Objective::Objective;
  double value(const FnVec& f) const override;
  FnVec subgradient(const FnVec& f) const override;
  bool separable() const override { return true; }
  double point_loss(std::size_t i, std::span<const double> v) const override = 0;
  void point_subgradient(std::size_t i, std::span<const double> v,
                         std::span<double> out) const override = 0;
};

// l = 1/2 ||v - y||^2; lambda = Lambda = 1.
class SquaredLoss final : public PointwiseObjective {
 public:
  SquaredLoss(SpacePtr space, LabeledData labels);
  std::string name() const override { return "squared"; }
  std::optional<double> strong_convexity() const override { return 1.0; }
  std::optional<double> smoothness() const override { return 1.0; }
  double point_loss(std::size_t i, std::span<const double> v) const override;
  void point_subgradient(std::size_t i, std::span<const double> v,
                         std::span<double> out) const override;
  long long point_key(std::size_t i) const override;
  double label_range() const override;

 private:
  LabeledData labels_;
};

// l = exp(-y v), y in {-1,+1}.
class ExponentialLoss final : public PointwiseObjective {
 public:
  ExponentialLoss(SpacePtr space, LabeledData labels);
  std::string name() const override { return "exponential"; }
  double point_loss(std::size_t i, std::span<const double> v) const override;
  void point_subgradient(std::size_t i, std::span<const double> v,
                         std::span<double> out) const override;
  long long point_key(std::size_t i) const override;

 private:
  LabeledData labels_;
};

// l = max(0, 1 - y v). At margin exactly 1 the zero subgradient is selected.
class BinaryHinge final : public PointwiseObjective {
 public:
  BinaryHinge(SpacePtr space, LabeledData labels);
  std::string name() const override { return "hinge"; }
  std::optional<double> grad_bound() const override { return 1.0; }
  double point_loss(std::size_t i, std::span<const double> v) const override;
  void point_subgradient(std::size_t i, std::span<const double> v,
                         std::span<double> out) const override;
  long long point_key(std::size_t i) const override;

 private:
  LabeledData labels_;
};

// Crammer-Singer: l = max(0, max_{k != y} (1 + v_k - v_y)). The violating
// class is the lowest index attaining the max; zero loss selects 0.
class MulticlassHinge final : public PointwiseObjective {
 public:
  MulticlassHinge(SpacePtr space, LabeledData labels);
  std::string name() const override { return "multiclass-hinge"; }
  std::optional<double> grad_bound() const override;
  double point_loss(std::size_t i, std::span<const double> v) const override;
  void point_subgradient(std::size_t i, std::span<const double> v,
                         std::span<double> out) const override;
  long long point_key(std::size_t i) const override;

 private:
  LabeledData labels_;
};

// Mean over in-group preference pairs (rel_i > rel_j) of
// max(0, 1 - (f(x_i) - f(x_j))). Not separable.
class PairwiseRankingHinge final : public Objective {
 public:
  PairwiseRankingHinge(SpacePtr space, LabeledData labels);
  std::string name() const override { return "ranking-hinge"; }
  double value(const FnVec& f) const override;
  FnVec subgradient(const FnVec& f) const override;

  struct Pair {
    std::size_t better;
    std::size_t worse;
  };
  const std::vector<Pair>& pairs() const { return pairs_; }

 private:
  std::vector<Pair> pairs_;
};

// The two-point objective 2|f(x_1)| + |f(x_2)|, averaged under P: each point
// carries its own absolute-value loss with slope 2 and 1.
class TwoPointAbs final : public PointwiseObjective {
 public:
  explicit TwoPointAbs(SpacePtr space);
  // Uniform two-point, one-feature, k = 1 space.
  static SpacePtr make_space();

  std::string name() const override { return "two-point-abs"; }
  std::optional<double> grad_bound() const override;
  double point_loss(std::size_t i, std::span<const double> v) const override;
  void point_subgradient(std::size_t i, std::span<const double> v,
                         std::span<double> out) const override;
};

// R'[f] = R[f] + (lam / 2) ||f||^2.
class Regularized final : public Objective {
 public:
  Regularized(ObjectivePtr base, double lam);
  std::string name() const override;
  double value(const FnVec& f) const override;
  FnVec subgradient(const FnVec& f) const override;
  std::optional<double> strong_convexity() const override;
  std::optional<double> smoothness() const override;
  bool separable() const override { return base_->separable(); }
  double point_loss(std::size_t i, std::span<const double> v) const override;
  void point_subgradient(std::size_t i, std::span<const double> v,
                         std::span<double> out) const override;
  long long point_key(std::size_t i) const override { return base_->point_key(i); }
  double label_range() const override { return base_->label_range(); }

  double lambda() const { return lam_; }
  const Objective& base() const { return *base_; }

 private:
  ObjectivePtr base_;
  double lam_;
};

ObjectivePtr regularize(ObjectivePtr base, double lam);

// Build an objective by registry name: squared, exponential, hinge,
// multiclass-hinge, ranking-hinge, two-point-abs.
ObjectivePtr make_objective(const std::string& name, SpacePtr space, const LabeledData& labels,
                            double lam = 0.0);

struct OptimalReference {
  FnVec f_star;
  double value_star = 0.0;
  std::string method;
};

// Per-point grid search over [-B, B]^k followed by pattern-search refinement.
// Requires a separable objective with k <= 3.
OptimalReference pointwise_optimum(const Objective& obj, double resolution);

// Unrestricted subgradient descent with eta_t = 1/sqrt(t); returns the best
// iterate seen. `init` defaults to the zero function.
OptimalReference subgradient_oracle(const Objective& obj, std::size_t iters,
                                    const std::optional<FnVec>& init = std::nullopt);

}  // namespace fboost
