#pragma once

// Test-side generators and brute-force oracles. Everything here is computed
// from first principles (raw vectors, explicit enumeration), never by calling
// the library routine under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "fboost/fspace.hpp"
#include "fboost/objectives.hpp"

namespace oracle {

using fboost::FnVec;
using fboost::SampleSpace;
using fboost::SpacePtr;

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return index(2) == 1; }
  int sign() { return coin() ? 1 : -1; }

  std::vector<double> normals(std::size_t n, double sd = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = normal(sd);
    return v;
  }

  // Features drawn from a small integer grid when `ties` (to exercise equal
  // feature values), continuous otherwise.
  SpacePtr space(std::size_t n, std::size_t d, std::size_t k, bool uniform_weights = true,
                 bool ties = false) {
    std::vector<double> x(n * d);
    for (double& v : x) v = ties ? static_cast<double>(index(4)) : uniform(-2.0, 2.0);
    std::vector<double> w;
    if (!uniform_weights) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        w.push_back(uniform(0.1, 1.0));
        s += w.back();
      }
      for (double& v : w) v /= s;
    }
    return SampleSpace::create(std::move(x), d, k, std::move(w));
  }

  FnVec fn(const SpacePtr& s, double sd = 1.0) { return FnVec(s, normals(s->size() * s->output_dim(), sd)); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<double> raw(const FnVec& f) { return f.values(); }

// sum_n p_n <f(x_n), g(x_n)> straight from the definition.
inline double inner(const SpacePtr& s, const std::vector<double>& f, const std::vector<double>& g) {
  const std::size_t k = s->output_dim();
  double total = 0.0;
  for (std::size_t n = 0; n < s->size(); ++n) {
    double dot = 0.0;
    for (std::size_t c = 0; c < k; ++c) dot += f[n * k + c] * g[n * k + c];
    total += s->weight(n) * dot;
  }
  return total;
}

// Candidate thresholds per feature: -inf, midpoints of distinct sorted
// values, +inf.
inline std::vector<double> thresholds(const SpacePtr& s, std::size_t j) {
  std::set<double> distinct;
  for (std::size_t n = 0; n < s->size(); ++n) distinct.insert(s->feature(n, j));
  std::vector<double> v(distinct.begin(), distinct.end());
  std::vector<double> out{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back(0.5 * (v[i] + v[i + 1]));
  out.push_back(std::numeric_limits<double>::infinity());
  return out;
}

struct StumpChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
  std::vector<double> h;  // evaluated n x k
  int a = 0, b = 0;       // orientation or (class_left, class_right)
};

// Least-squares stump by exhaustion: every (j, theta), leaves = weighted means,
// score = -weighted SSE.
inline StumpChoice regression_stump(const FnVec& target) {
  const auto& s = target.space();
  const std::size_t n = s->size(), k = s->output_dim();
  StumpChoice best;
  for (std::size_t j = 0; j < s->dim(); ++j) {
    for (double th : thresholds(s, j)) {
      std::vector<double> sum_l(k, 0.0), sum_r(k, 0.0);
      double wl = 0.0, wr = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool left = s->feature(i, j) <= th;
        (left ? wl : wr) += s->weight(i);
        for (std::size_t c = 0; c < k; ++c) (left ? sum_l : sum_r)[c] += s->weight(i) * target(i, c);
      }
      std::vector<double> h(n * k);
      double sse = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool left = s->feature(i, j) <= th;
        for (std::size_t c = 0; c < k; ++c) {
          h[i * k + c] = left ? sum_l[c] / wl : sum_r[c] / wr;
          sse += s->weight(i) * std::pow(target(i, c) - h[i * k + c], 2);
        }
      }
      if (-sse > best.score + 1e-12) best = {j, th, -sse, h, 0, 0};
    }
  }
  return best;
}

// +-1 stump maximizing <target, h>: orientation s puts s on the right.
inline StumpChoice binary_stump(const FnVec& target) {
  const auto& s = target.space();
  const std::size_t n = s->size();
  StumpChoice best;
  for (std::size_t j = 0; j < s->dim(); ++j)
    for (double th : thresholds(s, j))
      for (int o : {1, -1}) {
        std::vector<double> h(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = s->feature(i, j) <= th ? -o : o;
        const double score = inner(s, raw(target), h);
        if (score > best.score + 1e-12) best = {j, th, score, h, o, 0};
      }
  return best;
}

inline std::vector<double> encode(std::size_t cls, std::size_t K) {
  std::vector<double> v(K, -1.0 / static_cast<double>(K - 1));
  v[cls] = 1.0;
  return v;
}

// Encoded multiclass stump maximizing <target, h'> over (j, theta, cl, cr).
inline StumpChoice multiclass_stump(const FnVec& target) {
  const auto& s = target.space();
  const std::size_t n = s->size(), K = s->output_dim();
  StumpChoice best;
  for (std::size_t j = 0; j < s->dim(); ++j)
    for (double th : thresholds(s, j))
      for (std::size_t cl = 0; cl < K; ++cl)
        for (std::size_t cr = 0; cr < K; ++cr) {
          std::vector<double> h(n * K);
          for (std::size_t i = 0; i < n; ++i) {
            const auto e = encode(s->feature(i, j) <= th ? cl : cr, K);
            std::copy(e.begin(), e.end(), h.begin() + static_cast<std::ptrdiff_t>(i * K));
          }
          const double score = inner(s, raw(target), h);
          if (score > best.score + 1e-12) best = {j, th, score, h, static_cast<int>(cl), static_cast<int>(cr)};
        }
  return best;
}

// Central difference of R along d.
inline double directional_fd(const fboost::Objective& obj, const FnVec& f, const FnVec& d, double eps) {
  FnVec plus = f, minus = f;
  plus.axpy(eps, d);
  minus.axpy(-eps, d);
  return (obj.value(plus) - obj.value(minus)) / (2.0 * eps);
}

}  // namespace oracle
