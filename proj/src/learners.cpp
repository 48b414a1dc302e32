#include "fboost/learners.hpp"

#include <cmath>
#include <limits>

#include "fboost/error.hpp"

namespace fboost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack for "strictly better" comparisons, so that candidates that
// tie up to rounding keep the earliest one in scan order.
bool better(double candidate, double incumbent) {
  if (std::isinf(incumbent)) return candidate > incumbent;
  return candidate > incumbent + 1e-12 * std::max(1.0, std::abs(incumbent));
}

void require_nonzero(const FnVec& target) {
  if (!target.bound()) throw BindingError("target is not bound to a sample space");
  if (target.is_zero()) throw ZeroGradientError();
}

// Calls visit(threshold, left_count) for every candidate split of feature j in
// ascending threshold order: -inf (nothing left), midpoints between
// consecutive distinct values, +inf (everything left).
template <class Visit>
void for_each_split(const SampleSpace& space, std::size_t j, Visit&& visit) {
  const auto& order = space.order(j);
  const std::size_t n = order.size();
  visit(-kInf, std::size_t{0});
  for (std::size_t s = 0; s + 1 < n; ++s) {
    const double a = space.feature(order[s], j);
    const double b = space.feature(order[s + 1], j);
    if (a < b) visit(a + 0.5 * (b - a), s + 1);
  }
  visit(kInf, n);
}

}  // namespace

// ---------------------------------------------------------------------------
// Hypothesis

std::vector<double> encode_class(std::size_t cls, std::size_t num_classes) {
  std::vector<double> v(num_classes, -1.0 / static_cast<double>(num_classes - 1));
  v[cls] = 1.0;
  return v;
}

Hypothesis::Hypothesis(Rule rule, SpacePtr space) : rule_(std::move(rule)), cached_(space) {
  if (const auto* tab = std::get_if<TabulatedRule>(&rule_)) {
    cached_ = FnVec(space, tab->values);
  } else {
    for (std::size_t i = 0; i < space->size(); ++i) {
      const auto v = evaluate(space->row(i));
      if (v.size() != cached_.output_dim())
        throw InvalidArgument("hypothesis output arity does not match the space");
      std::copy(v.begin(), v.end(), cached_.at(i).begin());
    }
  }
  cached_norm_ = fboost::norm(cached_);
}

std::vector<double> Hypothesis::evaluate(std::span<const double> row) const {
  return std::visit(
      [&](const auto& r) -> std::vector<double> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Stump>) {
          if (r.feature >= row.size()) throw InvalidArgument("stump feature index out of range");
          return row[r.feature] <= r.threshold ? r.left : r.right;
        } else if constexpr (std::is_same_v<T, ConstantRule>) {
          return r.value;
        } else {
          throw UnsupportedError("enumerated hypothesis is only defined on its training space");
        }
      },
      rule_);
}

FnVec Hypothesis::evaluate_on(const SpacePtr& space) const {
  if (space->token() == cached_.space()->token()) return cached_;
  FnVec out(space);
  for (std::size_t i = 0; i < space->size(); ++i) {
    const auto v = evaluate(space->row(i));
    if (v.size() != out.output_dim()) throw InvalidArgument("hypothesis arity mismatch");
    std::copy(v.begin(), v.end(), out.at(i).begin());
  }
  return out;
}

std::string Hypothesis::kind_name() const {
  if (const auto* s = std::get_if<Stump>(&rule_)) {
    switch (s->kind) {
      case StumpKind::Regression:
        return "regression-stump";
      case StumpKind::Binary:
        return "binary-stump";
      case StumpKind::Multiclass:
        return "multiclass-stump";
    }
  }
  if (std::holds_alternative<ConstantRule>(rule_)) return "constant";
  return "enumerated";
}

// ---------------------------------------------------------------------------
// Stump fits

Hypothesis fit_regression_stump(const FnVec& target) {
  require_nonzero(target);
  const auto& space = *target.space();
  const std::size_t k = target.output_dim();
  const auto& p = space.weights();

  // Total P-weighted sum and mass.
  std::vector<double> total(k, 0.0);
  double total_w = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    total_w += p[i];
    for (std::size_t c = 0; c < k; ++c) total[c] += p[i] * target(i, c);
  }

  double best_gain = -kInf;
  Stump best;
  best.kind = StumpKind::Regression;
  std::vector<double> left(k), right(k);

  for (std::size_t j = 0; j < space.dim(); ++j) {
    const auto& order = space.order(j);
    std::fill(left.begin(), left.end(), 0.0);
    double left_w = 0.0;
    std::size_t consumed = 0;
    for_each_split(space, j, [&](double threshold, std::size_t left_count) {
      for (; consumed < left_count; ++consumed) {
        const std::size_t i = order[consumed];
        left_w += p[i];
        for (std::size_t c = 0; c < k; ++c) left[c] += p[i] * target(i, c);
      }
      const double right_w = total_w - left_w;
      double gain = 0.0;
      double left_sq = 0.0, right_sq = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        right[c] = total[c] - left[c];
        left_sq += left[c] * left[c];
        right_sq += right[c] * right[c];
      }
      if (left_count > 0) gain += left_sq / left_w;
      if (left_count < order.size()) gain += right_sq / right_w;
      if (better(gain, best_gain)) {
        best_gain = gain;
        best.feature = j;
        best.threshold = threshold;
        best.left.assign(k, 0.0);
        best.right.assign(k, 0.0);
        for (std::size_t c = 0; c < k; ++c) {
          if (left_count > 0) best.left[c] = left[c] / left_w;
          if (left_count < order.size()) best.right[c] = right[c] / right_w;
        }
        if (left_count == 0) best.left = best.right;
        if (left_count == order.size()) best.right = best.left;
      }
    });
  }
  if (!(best_gain > 0.0)) throw DegenerateError("zero projection: every stump fits the zero function");
  return Hypothesis(std::move(best), target.space());
}

Hypothesis fit_binary_stump(const FnVec& target) {
  require_nonzero(target);
  if (target.output_dim() != 1) throw InvalidArgument("binary stumps need output dimension 1");
  const auto& space = *target.space();
  const auto& p = space.weights();

  double total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) total += p[i] * target(i);

  double best_score = -kInf;
  Stump best;
  best.kind = StumpKind::Binary;

  for (std::size_t j = 0; j < space.dim(); ++j) {
    const auto& order = space.order(j);
    double left = 0.0;
    std::size_t consumed = 0;
    for_each_split(space, j, [&](double threshold, std::size_t left_count) {
      for (; consumed < left_count; ++consumed) left += p[order[consumed]] * target(order[consumed]);
      const double right = total - left;
      for (double orientation : {1.0, -1.0}) {
        const double score = orientation * (right - left);
        if (better(score, best_score)) {
          best_score = score;
          best.feature = j;
          best.threshold = threshold;
          best.left = {-orientation};
          best.right = {orientation};
        }
      }
    });
  }
  return Hypothesis(std::move(best), target.space());
}

Hypothesis fit_multiclass_stump(const FnVec& target, std::size_t num_classes) {
  require_nonzero(target);
  if (num_classes < 2) throw InvalidArgument("multiclass stumps need at least two classes");
  if (target.output_dim() != num_classes)
    throw InvalidArgument("target arity does not match the class count");
  const auto& space = *target.space();
  const auto& p = space.weights();
  const std::size_t K = num_classes;
  const double kk = static_cast<double>(K);

  // reward(i, c) = <target(x_i), encode(c)> * p_i.
  std::vector<double> reward(target.size() * K);
  std::vector<double> total(K, 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    double row_sum = 0.0;
    for (std::size_t c = 0; c < K; ++c) row_sum += target(i, c);
    for (std::size_t c = 0; c < K; ++c) {
      reward[i * K + c] = p[i] * (kk / (kk - 1.0) * target(i, c) - row_sum / (kk - 1.0));
      total[c] += reward[i * K + c];
    }
  }

  auto argmax = [&](const std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t c = 1; c < v.size(); ++c)
      if (v[c] > v[arg]) arg = c;
    return arg;
  };

  double best_score = -kInf;
  Stump best;
  best.kind = StumpKind::Multiclass;
  std::vector<double> left(K), right(K);

  for (std::size_t j = 0; j < space.dim(); ++j) {
    const auto& order = space.order(j);
    std::fill(left.begin(), left.end(), 0.0);
    std::size_t consumed = 0;
    for_each_split(space, j, [&](double threshold, std::size_t left_count) {
      for (; consumed < left_count; ++consumed)
        for (std::size_t c = 0; c < K; ++c) left[c] += reward[order[consumed] * K + c];
      for (std::size_t c = 0; c < K; ++c) right[c] = total[c] - left[c];
      const bool left_empty = left_count == 0;
      const bool right_empty = left_count == order.size();
      std::size_t cl = argmax(left);
      std::size_t cr = argmax(right);
      if (left_empty) cl = cr;
      if (right_empty) cr = cl;
      const double score = (left_empty ? 0.0 : left[cl]) + (right_empty ? 0.0 : right[cr]);
      if (better(score, best_score)) {
        best_score = score;
        best.feature = j;
        best.threshold = threshold;
        best.class_left = static_cast<int>(cl);
        best.class_right = static_cast<int>(cr);
      }
    });
  }
  best.left = encode_class(static_cast<std::size_t>(best.class_left), K);
  best.right = encode_class(static_cast<std::size_t>(best.class_right), K);
  return Hypothesis(std::move(best), target.space());
}

Hypothesis fit_constant(const FnVec& target) {
  require_nonzero(target);
  const auto& p = target.space()->weights();
  std::vector<double> mean(target.output_dim(), 0.0);
  for (std::size_t i = 0; i < target.size(); ++i)
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += p[i] * target(i, c);
  bool all_zero = true;
  for (double m : mean) all_zero &= m == 0.0;
  if (all_zero) throw DegenerateError("zero projection: target has zero mean");
  return Hypothesis(ConstantRule{std::move(mean)}, target.space());
}

Hypothesis fit_enumerated(const FnVec& target, std::span<const FnVec> members, ProjectionMode mode) {
  require_nonzero(target);
  if (members.empty()) throw InvalidArgument("enumerated class is empty");
  double best_score = -kInf;
  std::size_t best_index = members.size();
  for (std::size_t m = 0; m < members.size(); ++m) {
    const FnVec& h = members[m];
    require_same_space(target, h);
    const double hh = squared_norm(h);
    if (!(hh > 0.0)) continue;
    const double th = inner(target, h);
    double score;
    if (mode == ProjectionMode::InnerProductMax) {
      score = th / std::sqrt(hh);
    } else {
      // -||t - h||^2 up to the constant ||t||^2.
      score = 2.0 * th - hh;
    }
    if (better(score, best_score)) {
      best_score = score;
      best_index = m;
    }
  }
  if (best_index == members.size()) throw DegenerateError("enumerated class has no nonzero member");
  return Hypothesis(TabulatedRule{best_index, members[best_index].values()}, target.space());
}

// ---------------------------------------------------------------------------
// Restriction sets

Hypothesis RegressionStumps::fit(const FnVec& target, ProjectionMode) const {
  return fit_regression_stump(target);
}

Hypothesis BinaryStumps::fit(const FnVec& target, ProjectionMode mode) const {
  if (!supports(mode))
    throw UnsupportedError("norm-min projection needs a class closed under scaling; +-1 stumps are not");
  return fit_binary_stump(target);
}

MulticlassStumps::MulticlassStumps(std::size_t num_classes) : num_classes_(num_classes) {
  if (num_classes < 2) throw InvalidArgument("multiclass stumps need at least two classes");
}

Hypothesis MulticlassStumps::fit(const FnVec& target, ProjectionMode mode) const {
  if (!supports(mode))
    throw UnsupportedError("norm-min projection is not offered for encoded multiclass stumps");
  return fit_multiclass_stump(target, num_classes_);
}

Hypothesis ConstantLearner::fit(const FnVec& target, ProjectionMode) const {
  return fit_constant(target);
}

EnumeratedClass::EnumeratedClass(std::vector<FnVec> members, std::string label)
    : members_(std::move(members)), label_(std::move(label)) {
  if (members_.empty()) throw InvalidArgument("enumerated class is empty");
  for (const auto& m : members_) require_same_space(members_.front(), m);
}

Hypothesis EnumeratedClass::fit(const FnVec& target, ProjectionMode mode) const {
  if (!supports(mode))
    throw UnsupportedError("norm-min projection needs a class closed under scaling; an enumerated class is not");
  return fit_enumerated(target, members_, mode);
}

std::vector<FnVec> complete_basis(const SpacePtr& space, bool signed_members) {
  std::vector<FnVec> out;
  const std::size_t k = space->output_dim();
  for (std::size_t i = 0; i < space->size(); ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      FnVec e(space);
      e(i, c) = 1.0;
      if (signed_members) {
        FnVec neg = e;
        neg(i, c) = -1.0;
        out.push_back(std::move(e));
        out.push_back(std::move(neg));
      } else {
        out.push_back(std::move(e));
      }
    }
  }
  return out;
}

std::vector<Hypothesis> enumerate_stumps(const SpacePtr& space, StumpKind kind,
                                         std::size_t num_classes) {
  if (kind == StumpKind::Regression)
    throw UnsupportedError("regression stumps have target-dependent leaves and cannot be enumerated");
  if (kind == StumpKind::Binary && space->output_dim() != 1)
    throw InvalidArgument("binary stumps need output dimension 1");
  if (kind == StumpKind::Multiclass) {
    if (num_classes == 0) num_classes = space->output_dim();
    if (num_classes < 2 || num_classes != space->output_dim())
      throw InvalidArgument("multiclass stumps need output dimension = class count >= 2");
  }
  std::vector<Hypothesis> out;
  for (std::size_t j = 0; j < space->dim(); ++j) {
    for_each_split(*space, j, [&](double threshold, std::size_t) {
      Stump s;
      s.kind = kind;
      s.feature = j;
      s.threshold = threshold;
      if (kind == StumpKind::Binary) {
        for (double orientation : {1.0, -1.0}) {
          s.left = {-orientation};
          s.right = {orientation};
          out.emplace_back(s, space);
        }
      } else {
        for (std::size_t cl = 0; cl < num_classes; ++cl) {
          for (std::size_t cr = 0; cr < num_classes; ++cr) {
            s.class_left = static_cast<int>(cl);
            s.class_right = static_cast<int>(cr);
            s.left = encode_class(cl, num_classes);
            s.right = encode_class(cr, num_classes);
            out.emplace_back(s, space);
          }
        }
      }
    });
  }
  return out;
}

RestrictionSetPtr make_learner(const std::string& name, const SpacePtr& space) {
  if (name == "regression-stump") return std::make_shared<RegressionStumps>();
  if (name == "binary-stump") return std::make_shared<BinaryStumps>();
  if (name == "multiclass-stump") return std::make_shared<MulticlassStumps>(space->output_dim());
  if (name == "constant") return std::make_shared<ConstantLearner>();
  if (name == "basis") return std::make_shared<EnumeratedClass>(complete_basis(space), "basis");
  throw InvalidArgument("unknown learner '" + name + "'");
}

}  // namespace fboost
