#include "fboost/fspace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numeric>

#include "fboost/error.hpp"

namespace fboost {

namespace {

std::atomic<std::uint64_t> next_token{1};

}  // namespace

SpacePtr SampleSpace::create(std::vector<double> features, std::size_t dim, std::size_t output_dim,
                             std::vector<double> weights, std::vector<std::string> ids) {
  if (dim == 0) throw InvalidArgument("sample space needs at least one feature");
  if (output_dim == 0) throw InvalidArgument("output dimension must be >= 1");
  if (features.empty() || features.size() % dim != 0)
    throw InvalidArgument("feature matrix must be a non-empty n x d array");
  const std::size_t n = features.size() / dim;

  for (double v : features) {
    if (std::isnan(v)) throw InvalidArgument("feature matrix contains NaN");
  }

  bool uniform = weights.empty();
  if (uniform) {
    weights.assign(n, 1.0 / static_cast<double>(n));
  } else {
    if (weights.size() != n) throw InvalidArgument("weight count does not match point count");
    double total = 0.0;
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("point weights must be positive");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      std::cerr << "fboost: warning: point weights sum to " << total << ", renormalizing\n";
    }
    for (double& w : weights) w /= total;
    uniform = std::all_of(weights.begin(), weights.end(),
                          [&](double w) { return w == weights.front(); });
  }
  if (!ids.empty() && ids.size() != n) throw InvalidArgument("id count does not match point count");

  auto space = std::shared_ptr<SampleSpace>(new SampleSpace());
  space->features_ = std::move(features);
  space->dim_ = dim;
  space->output_dim_ = output_dim;
  space->weights_ = std::move(weights);
  space->ids_ = std::move(ids);
  space->uniform_ = uniform;
  space->token_ = next_token.fetch_add(1);

  space->orders_.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    auto& order = space->orders_[j];
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& x = space->features_;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return x[a * dim + j] < x[b * dim + j];
    });
  }
  return space;
}

FnVec::FnVec(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw BindingError("function vector needs a sample space");
  n_ = space_->size();
  k_ = space_->output_dim();
  values_.assign(n_ * k_, 0.0);
}

FnVec::FnVec(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw BindingError("function vector needs a sample space");
  n_ = space_->size();
  k_ = space_->output_dim();
  if (values_.size() != n_ * k_)
    throw InvalidArgument("function vector has " + std::to_string(values_.size()) +
                          " values, space expects " + std::to_string(n_ * k_));
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("function vector values must be finite");
  }
}

bool FnVec::same_space(const FnVec& other) const {
  return space_ && other.space_ && space_->token() == other.space_->token();
}

bool FnVec::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

FnVec& FnVec::axpy(double alpha, const FnVec& other) {
  require_same_space(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += alpha * other.values_[i];
  return *this;
}

FnVec& FnVec::scale(double alpha) {
  for (double& v : values_) v *= alpha;
  return *this;
}

FnVec operator+(FnVec a, const FnVec& b) { return a += b; }
FnVec operator-(FnVec a, const FnVec& b) { return a -= b; }
FnVec operator*(double alpha, FnVec f) { return f.scale(alpha); }

void require_same_space(const FnVec& a, const FnVec& b) {
  if (!a.same_space(b)) throw BindingError("function vectors are bound to different sample spaces");
}

double inner(const FnVec& f, const FnVec& g) {
  require_same_space(f, g);
  const auto& p = f.space()->weights();
  const std::size_t k = f.output_dim();
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double dot = 0.0;
    for (std::size_t c = 0; c < k; ++c) dot += f(i, c) * g(i, c);
    total += p[i] * dot;
  }
  return total;
}

double squared_norm(const FnVec& f) { return inner(f, f); }

double norm(const FnVec& f) { return std::sqrt(squared_norm(f)); }

FnVec combine(double alpha, const FnVec& f, double beta, const FnVec& g) {
  require_same_space(f, g);
  FnVec out = f;
  out.scale(alpha);
  out.axpy(beta, g);
  return out;
}

}  // namespace fboost
