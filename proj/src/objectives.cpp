#include "fboost/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fboost/error.hpp"

namespace fboost {

// ---------------------------------------------------------------------------
// LabeledData

std::size_t LabeledData::size() const {
  switch (kind) {
    case LabelKind::Class:
      return classes.size();
    case LabelKind::Real:
      return arity ? targets.size() / arity : 0;
    default:
      return targets.size();
  }
}

void LabeledData::validate(std::size_t n, std::size_t output_dim) const {
  if (size() != n)
    throw InvalidArgument("label count " + std::to_string(size()) + " does not match " +
                          std::to_string(n) + " points");
  switch (kind) {
    case LabelKind::Real:
      if (arity != output_dim) throw InvalidArgument("label arity does not match output dimension");
      break;
    case LabelKind::Binary:
      if (output_dim != 1) throw InvalidArgument("binary labels need output dimension 1");
      for (double y : targets)
        if (y != 1.0 && y != -1.0) throw InvalidArgument("binary labels must be +1 or -1");
      break;
    case LabelKind::Class:
      if (num_classes != output_dim)
        throw InvalidArgument("class count does not match output dimension");
      for (int c : classes)
        if (c < 0 || static_cast<std::size_t>(c) >= num_classes)
          throw InvalidArgument("class index out of range");
      break;
    case LabelKind::Ranking:
      if (output_dim != 1) throw InvalidArgument("ranking labels need output dimension 1");
      if (groups.size() != targets.size()) throw InvalidArgument("ranking labels need a group per point");
      break;
  }
}

LabeledData LabeledData::real(std::vector<double> targets, std::size_t arity) {
  LabeledData d;
  d.kind = LabelKind::Real;
  d.arity = arity;
  d.targets = std::move(targets);
  return d;
}

LabeledData LabeledData::binary(std::vector<double> signs) {
  LabeledData d;
  d.kind = LabelKind::Binary;
  d.targets = std::move(signs);
  return d;
}

LabeledData LabeledData::classes_of(std::vector<int> classes, std::size_t num_classes) {
  LabeledData d;
  d.kind = LabelKind::Class;
  d.arity = num_classes;
  d.classes = std::move(classes);
  d.num_classes = num_classes;
  return d;
}

LabeledData LabeledData::ranking(std::vector<double> relevance, std::vector<long long> groups) {
  LabeledData d;
  d.kind = LabelKind::Ranking;
  d.targets = std::move(relevance);
  d.groups = std::move(groups);
  return d;
}

LabeledData LabeledData::subset(std::span<const std::size_t> rows) const {
  LabeledData out = *this;
  out.targets.clear();
  out.classes.clear();
  out.groups.clear();
  for (std::size_t r : rows) {
    if (kind == LabelKind::Class) {
      out.classes.push_back(classes[r]);
    } else {
      const std::size_t a = kind == LabelKind::Real ? arity : 1;
      for (std::size_t c = 0; c < a; ++c) out.targets.push_back(targets[r * a + c]);
      if (kind == LabelKind::Ranking) out.groups.push_back(groups[r]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Objective base

double Objective::point_loss(std::size_t, std::span<const double>) const {
  throw UnsupportedError(name() + " is not a pointwise objective");
}

void Objective::point_subgradient(std::size_t, std::span<const double>, std::span<double>) const {
  throw UnsupportedError(name() + " is not a pointwise objective");
}

void Objective::require_bound(const FnVec& f) const {
  if (!f.bound() || f.space()->token() != space_->token())
    throw BindingError("function vector is not bound to the objective's sample space");
}

double PointwiseObjective::value(const FnVec& f) const {
  require_bound(f);
  const auto& p = space()->weights();
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += p[i] * point_loss(i, f.at(i));
  return total;
}

FnVec PointwiseObjective::subgradient(const FnVec& f) const {
  require_bound(f);
  FnVec g(space());
  for (std::size_t i = 0; i < f.size(); ++i) point_subgradient(i, f.at(i), g.at(i));
  return g;
}

// ---------------------------------------------------------------------------
// SquaredLoss

SquaredLoss::SquaredLoss(SpacePtr space, LabeledData labels)
    : PointwiseObjective(std::move(space)), labels_(std::move(labels)) {
  if (labels_.kind == LabelKind::Binary || labels_.kind == LabelKind::Ranking) {
    labels_.kind = LabelKind::Real;
    labels_.arity = 1;
  }
  if (labels_.kind == LabelKind::Class) {
    // One-hot regression onto the class indicator.
    std::vector<double> onehot(labels_.classes.size() * labels_.num_classes, 0.0);
    for (std::size_t i = 0; i < labels_.classes.size(); ++i)
      onehot[i * labels_.num_classes + static_cast<std::size_t>(labels_.classes[i])] = 1.0;
    labels_ = LabeledData::real(std::move(onehot), labels_.num_classes);
  }
  labels_.validate(this->space()->size(), output_dim());
}

double SquaredLoss::point_loss(std::size_t i, std::span<const double> v) const {
  const std::size_t k = v.size();
  double s = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double r = v[c] - labels_.targets[i * k + c];
    s += r * r;
  }
  return 0.5 * s;
}

void SquaredLoss::point_subgradient(std::size_t i, std::span<const double> v,
                                    std::span<double> out) const {
  const std::size_t k = v.size();
  for (std::size_t c = 0; c < k; ++c) out[c] = v[c] - labels_.targets[i * k + c];
}

long long SquaredLoss::point_key(std::size_t i) const { return static_cast<long long>(i); }

double SquaredLoss::label_range() const {
  double m = 0.0;
  for (double y : labels_.targets) m = std::max(m, std::abs(y));
  return m;
}

// ---------------------------------------------------------------------------
// ExponentialLoss

ExponentialLoss::ExponentialLoss(SpacePtr space, LabeledData labels)
    : PointwiseObjective(std::move(space)), labels_(std::move(labels)) {
  if (labels_.kind != LabelKind::Binary) throw InvalidArgument("exponential loss needs binary labels");
  labels_.validate(this->space()->size(), output_dim());
}

double ExponentialLoss::point_loss(std::size_t i, std::span<const double> v) const {
  return std::exp(-labels_.targets[i] * v[0]);
}

void ExponentialLoss::point_subgradient(std::size_t i, std::span<const double> v,
                                        std::span<double> out) const {
  const double y = labels_.targets[i];
  out[0] = -y * std::exp(-y * v[0]);
}

long long ExponentialLoss::point_key(std::size_t i) const {
  return labels_.targets[i] > 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// BinaryHinge

BinaryHinge::BinaryHinge(SpacePtr space, LabeledData labels)
    : PointwiseObjective(std::move(space)), labels_(std::move(labels)) {
  if (labels_.kind != LabelKind::Binary) throw InvalidArgument("hinge loss needs binary labels");
  labels_.validate(this->space()->size(), output_dim());
}

double BinaryHinge::point_loss(std::size_t i, std::span<const double> v) const {
  return std::max(0.0, 1.0 - labels_.targets[i] * v[0]);
}

void BinaryHinge::point_subgradient(std::size_t i, std::span<const double> v,
                                    std::span<double> out) const {
  const double y = labels_.targets[i];
  out[0] = (1.0 - y * v[0] > 0.0) ? -y : 0.0;
}

long long BinaryHinge::point_key(std::size_t i) const { return labels_.targets[i] > 0 ? 1 : -1; }

// ---------------------------------------------------------------------------
// MulticlassHinge

MulticlassHinge::MulticlassHinge(SpacePtr space, LabeledData labels)
    : PointwiseObjective(std::move(space)), labels_(std::move(labels)) {
  if (labels_.kind != LabelKind::Class) throw InvalidArgument("multiclass hinge needs class labels");
  if (labels_.num_classes < 2) throw InvalidArgument("multiclass hinge needs at least two classes");
  labels_.validate(this->space()->size(), output_dim());
}

std::optional<double> MulticlassHinge::grad_bound() const { return std::sqrt(2.0); }

namespace {

// Returns (violating class, margin violation) for the Crammer-Singer hinge.
std::pair<std::size_t, double> worst_violation(std::span<const double> v, std::size_t y) {
  std::size_t arg = y == 0 ? 1 : 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (c == y) continue;
    const double m = 1.0 + v[c] - v[y];
    if (m > best) {
      best = m;
      arg = c;
    }
  }
  return {arg, best};
}

}  // namespace

double MulticlassHinge::point_loss(std::size_t i, std::span<const double> v) const {
  const auto [c, m] = worst_violation(v, static_cast<std::size_t>(labels_.classes[i]));
  return std::max(0.0, m);
}

void MulticlassHinge::point_subgradient(std::size_t i, std::span<const double> v,
                                        std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto y = static_cast<std::size_t>(labels_.classes[i]);
  const auto [c, m] = worst_violation(v, y);
  if (m > 0.0) {
    out[c] = 1.0;
    out[y] = -1.0;
  }
}

long long MulticlassHinge::point_key(std::size_t i) const { return labels_.classes[i]; }

// ---------------------------------------------------------------------------
// PairwiseRankingHinge

PairwiseRankingHinge::PairwiseRankingHinge(SpacePtr space, LabeledData labels)
    : Objective(std::move(space)) {
  if (labels.kind != LabelKind::Ranking) throw InvalidArgument("ranking hinge needs ranking labels");
  labels.validate(this->space()->size(), output_dim());
  std::map<long long, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < labels.groups.size(); ++i) by_group[labels.groups[i]].push_back(i);
  for (const auto& [g, members] : by_group) {
    for (std::size_t a : members)
      for (std::size_t b : members)
        if (labels.targets[a] > labels.targets[b]) pairs_.push_back({a, b});
  }
}

double PairwiseRankingHinge::value(const FnVec& f) const {
  require_bound(f);
  if (pairs_.empty()) return 0.0;
  double total = 0.0;
  for (const auto& pr : pairs_) total += std::max(0.0, 1.0 - (f(pr.better) - f(pr.worse)));
  return total / static_cast<double>(pairs_.size());
}

FnVec PairwiseRankingHinge::subgradient(const FnVec& f) const {
  require_bound(f);
  FnVec g(space());
  if (pairs_.empty()) return g;
  const double scale = 1.0 / static_cast<double>(pairs_.size());
  for (const auto& pr : pairs_) {
    if (1.0 - (f(pr.better) - f(pr.worse)) > 0.0) {
      g(pr.better) -= scale;
      g(pr.worse) += scale;
    }
  }
  // Directional derivative is sum_n g_n d_n; dividing by p_n makes it the
  // gradient under the weighted inner product.
  const auto& p = space()->weights();
  for (std::size_t i = 0; i < g.size(); ++i) g(i) /= p[i];
  return g;
}

// ---------------------------------------------------------------------------
// TwoPointAbs

namespace {
constexpr double kTwoPointSlopes[2] = {2.0, 1.0};
}

TwoPointAbs::TwoPointAbs(SpacePtr space) : PointwiseObjective(std::move(space)) {
  if (this->space()->size() != 2 || output_dim() != 1)
    throw InvalidArgument("two-point objective needs a two-point space with k = 1");
}

SpacePtr TwoPointAbs::make_space() {
  return SampleSpace::create({1.0, 2.0}, 1, 1, {}, {"x1", "x2"});
}

std::optional<double> TwoPointAbs::grad_bound() const {
  const auto& p = space()->weights();
  return std::sqrt(p[0] * 4.0 + p[1] * 1.0);
}

double TwoPointAbs::point_loss(std::size_t i, std::span<const double> v) const {
  return kTwoPointSlopes[i] * std::abs(v[0]);
}

void TwoPointAbs::point_subgradient(std::size_t i, std::span<const double> v,
                                    std::span<double> out) const {
  const double s = v[0] > 0.0 ? 1.0 : (v[0] < 0.0 ? -1.0 : 0.0);
  out[0] = kTwoPointSlopes[i] * s;
}

// ---------------------------------------------------------------------------
// Regularized

Regularized::Regularized(ObjectivePtr base, double lam)
    : Objective(base ? base->space() : nullptr), base_(std::move(base)), lam_(lam) {
  if (!base_) throw InvalidArgument("regularize needs a base objective");
  if (!(lam > 0.0)) throw InvalidArgument("regularization strength must be positive");
}

std::string Regularized::name() const { return base_->name() + "+l2"; }

double Regularized::value(const FnVec& f) const {
  return base_->value(f) + 0.5 * lam_ * squared_norm(f);
}

FnVec Regularized::subgradient(const FnVec& f) const {
  FnVec g = base_->subgradient(f);
  g.axpy(lam_, f);
  return g;
}

std::optional<double> Regularized::strong_convexity() const {
  return base_->strong_convexity().value_or(0.0) + lam_;
}

std::optional<double> Regularized::smoothness() const {
  if (auto s = base_->smoothness()) return *s + lam_;
  return std::nullopt;
}

double Regularized::point_loss(std::size_t i, std::span<const double> v) const {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return base_->point_loss(i, v) + 0.5 * lam_ * sq;
}

void Regularized::point_subgradient(std::size_t i, std::span<const double> v,
                                    std::span<double> out) const {
  base_->point_subgradient(i, v, out);
  for (std::size_t c = 0; c < v.size(); ++c) out[c] += lam_ * v[c];
}

ObjectivePtr regularize(ObjectivePtr base, double lam) {
  return std::make_shared<Regularized>(std::move(base), lam);
}

ObjectivePtr make_objective(const std::string& name, SpacePtr space, const LabeledData& labels,
                            double lam) {
  ObjectivePtr obj;
  if (name == "squared") {
    obj = std::make_shared<SquaredLoss>(space, labels);
  } else if (name == "exponential") {
    obj = std::make_shared<ExponentialLoss>(space, labels);
  } else if (name == "hinge") {
    obj = std::make_shared<BinaryHinge>(space, labels);
  } else if (name == "multiclass-hinge") {
    obj = std::make_shared<MulticlassHinge>(space, labels);
  } else if (name == "ranking-hinge") {
    obj = std::make_shared<PairwiseRankingHinge>(space, labels);
  } else if (name == "two-point-abs") {
    obj = std::make_shared<TwoPointAbs>(space);
  } else {
    throw InvalidArgument("unknown objective '" + name + "'");
  }
  if (lam > 0.0) obj = regularize(std::move(obj), lam);
  return obj;
}

}  // namespace fboost
