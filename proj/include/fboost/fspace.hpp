#pragma once

// Empirical L2(X, R^k, P) space: functions are identified with their values
// on a finite sample, and the inner product is the P-weighted sum of
// Euclidean dot products of those values.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fboost {

class SampleSpace;
using SpacePtr = std::shared_ptr<const SampleSpace>;

class SampleSpace {
 public:
  // features is row-major n x d. Empty weights means uniform 1/n. Weights that
  // do not sum to one are renormalized (with a warning on stderr if they are
  // off by more than 1e-9).
  static SpacePtr create(std::vector<double> features, std::size_t dim, std::size_t output_dim,
                         std::vector<double> weights = {}, std::vector<std::string> ids = {});

  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t output_dim() const { return output_dim_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  double feature(std::size_t i, std::size_t j) const { return features_[i * dim_ + j]; }
  const std::vector<double>& features() const { return features_; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::string>& ids() const { return ids_; }

  // Point indices sorted ascending by feature j (stable, so ties keep row order).
  const std::vector<std::size_t>& order(std::size_t j) const { return orders_[j]; }

  bool uniform() const { return uniform_; }

  // Identity token used for O(1) binding checks.
  std::uint64_t token() const { return token_; }

 private:
  SampleSpace() = default;

  std::vector<double> features_;
  std::size_t dim_ = 0;
  std::size_t output_dim_ = 1;
  std::vector<double> weights_;
  std::vector<std::string> ids_;
  std::vector<std::vector<std::size_t>> orders_;
  bool uniform_ = true;
  std::uint64_t token_ = 0;
};

// A function represented by its n x k values on a SampleSpace (row-major).
class FnVec {
 public:
  FnVec() = default;
  explicit FnVec(SpacePtr space);  // zero function
  FnVec(SpacePtr space, std::vector<double> values);

  static FnVec zeros(SpacePtr space) { return FnVec(std::move(space)); }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return n_; }
  std::size_t output_dim() const { return k_; }
  bool bound() const { return space_ != nullptr; }

  std::span<const double> at(std::size_t i) const { return {values_.data() + i * k_, k_}; }
  std::span<double> at(std::size_t i) { return {values_.data() + i * k_, k_}; }
  double operator()(std::size_t i, std::size_t c = 0) const { return values_[i * k_ + c]; }
  double& operator()(std::size_t i, std::size_t c = 0) { return values_[i * k_ + c]; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool same_space(const FnVec& other) const;
  bool is_zero() const;

  // this += alpha * other
  FnVec& axpy(double alpha, const FnVec& other);
  FnVec& scale(double alpha);

  FnVec& operator+=(const FnVec& other) { return axpy(1.0, other); }
  FnVec& operator-=(const FnVec& other) { return axpy(-1.0, other); }

 private:
  SpacePtr space_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> values_;
};

FnVec operator+(FnVec a, const FnVec& b);
FnVec operator-(FnVec a, const FnVec& b);
FnVec operator*(double alpha, FnVec f);

// Throws BindingError unless a and b share a space.
void require_same_space(const FnVec& a, const FnVec& b);

double inner(const FnVec& f, const FnVec& g);
double norm(const FnVec& f);
double squared_norm(const FnVec& f);
FnVec combine(double alpha, const FnVec& f, double beta, const FnVec& g);

}  // namespace fboost
