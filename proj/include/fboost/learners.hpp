#pragma once

// Weak-learner restriction sets. Each fit projects a target function-vector
// onto the class, either by maximizing <target, h> / ||h|| or by minimizing
// ||target - h||^2.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fboost/fspace.hpp"

namespace fboost {

enum class ProjectionMode { InnerProductMax, NormMin };

enum class StumpKind { Regression, Binary, Multiclass };

// Axis-aligned split: rows with x[feature] <= threshold take `left`, the rest
// take `right`. Thresholds of +-infinity give constant stumps.
struct Stump {
  StumpKind kind = StumpKind::Regression;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::vector<double> left;
  std::vector<double> right;
  // Predicted classes for multiclass stumps (0-based), -1 otherwise.
  int class_left = -1;
  int class_right = -1;
};

struct ConstantRule {
  std::vector<double> value;
};

// Member `index` of an explicit finite class; only defined on the sample
// space it was tabulated on.
struct TabulatedRule {
  std::size_t index = 0;
  std::vector<double> values;
};

using Rule = std::variant<Stump, ConstantRule, TabulatedRule>;

class Hypothesis {
 public:
  // Evaluates `rule` on every point of `space` and caches the result.
  Hypothesis(Rule rule, SpacePtr space);

  const Rule& rule() const { return rule_; }
  const FnVec& vec() const { return cached_; }
  double norm() const { return cached_norm_; }
  std::size_t output_dim() const { return cached_.output_dim(); }

  // Evaluate on an arbitrary feature row. Tabulated rules throw UnsupportedError.
  std::vector<double> evaluate(std::span<const double> row) const;
  // Evaluate on every point of `space`; reuses the cache for the training space.
  FnVec evaluate_on(const SpacePtr& space) const;

  std::string kind_name() const;

 private:
  Rule rule_;
  FnVec cached_;
  double cached_norm_ = 0.0;
};

// Encoded multiclass output: 1 at the predicted class, -1/(K-1) elsewhere.
std::vector<double> encode_class(std::size_t cls, std::size_t num_classes);

class RestrictionSet {
 public:
  virtual ~RestrictionSet() = default;
  virtual Hypothesis fit(const FnVec& target, ProjectionMode mode) const = 0;
  virtual bool supports(ProjectionMode mode) const = 0;
  virtual ProjectionMode default_mode() const { return ProjectionMode::InnerProductMax; }
  virtual std::string describe() const = 0;

  Hypothesis fit(const FnVec& target) const { return fit(target, default_mode()); }
};

using RestrictionSetPtr = std::shared_ptr<const RestrictionSet>;

// Least-squares stump with P-weighted mean leaf values. Both modes pick the
// same partition; the leaf values are the norm-minimizing ones.
Hypothesis fit_regression_stump(const FnVec& target);

// +-1 stump maximizing <target, h> (k = 1). Orientation +1 puts +1 on the
// right of the threshold.
Hypothesis fit_binary_stump(const FnVec& target);

// Multiclass stump (j, theta, class_left, class_right) under the encoding above,
// maximizing <target, h'>. Requires k = num_classes >= 2.
Hypothesis fit_multiclass_stump(const FnVec& target, std::size_t num_classes);

// P-weighted mean as a constant hypothesis. Throws DegenerateError when the
// mean is exactly zero.
Hypothesis fit_constant(const FnVec& target);

// Exact optimizer over an explicit class; ties go to the lowest index.
Hypothesis fit_enumerated(const FnVec& target, std::span<const FnVec> members, ProjectionMode mode);

class RegressionStumps final : public RestrictionSet {
 public:
  Hypothesis fit(const FnVec& target, ProjectionMode mode) const override;
  bool supports(ProjectionMode) const override { return true; }
  ProjectionMode default_mode() const override { return ProjectionMode::NormMin; }
  std::string describe() const override { return "regression-stump"; }
};

class BinaryStumps final : public RestrictionSet {
 public:
  Hypothesis fit(const FnVec& target, ProjectionMode mode) const override;
  bool supports(ProjectionMode mode) const override {
    return mode == ProjectionMode::InnerProductMax;
  }
  std::string describe() const override { return "binary-stump"; }
};

class MulticlassStumps final : public RestrictionSet {
 public:
  explicit MulticlassStumps(std::size_t num_classes);
  Hypothesis fit(const FnVec& target, ProjectionMode mode) const override;
  bool supports(ProjectionMode mode) const override {
    return mode == ProjectionMode::InnerProductMax;
  }
  std::string describe() const override { return "multiclass-stump"; }
  std::size_t num_classes() const { return num_classes_; }

 private:
  std::size_t num_classes_;
};

class ConstantLearner final : public RestrictionSet {
 public:
  Hypothesis fit(const FnVec& target, ProjectionMode mode) const override;
  bool supports(ProjectionMode) const override { return true; }
  ProjectionMode default_mode() const override { return ProjectionMode::NormMin; }
  std::string describe() const override { return "constant"; }
};

class EnumeratedClass final : public RestrictionSet {
 public:
  explicit EnumeratedClass(std::vector<FnVec> members, std::string label = "enumerated");
  Hypothesis fit(const FnVec& target, ProjectionMode mode) const override;
  bool supports(ProjectionMode mode) const override {
    return mode == ProjectionMode::InnerProductMax;
  }
  std::string describe() const override { return label_; }

  const std::vector<FnVec>& members() const { return members_; }

 private:
  std::vector<FnVec> members_;
  std::string label_;
};

// {+e_{n,c}, -e_{n,c}} for every point n and output coordinate c (signed), or
// just the +e's.
std::vector<FnVec> complete_basis(const SpacePtr& space, bool signed_members = true);

// Every distinct stump of the given kind on the space, as hypotheses. Used for
// exhaustive edge certification.
std::vector<Hypothesis> enumerate_stumps(const SpacePtr& space, StumpKind kind,
                                         std::size_t num_classes = 0);

// Build a learner by registry name: regression-stump, binary-stump,
// multiclass-stump, constant, basis.
RestrictionSetPtr make_learner(const std::string& name, const SpacePtr& space);

}  // namespace fboost
