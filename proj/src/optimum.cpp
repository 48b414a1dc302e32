#include <cmath>
#include <limits>
#include <map>

#include "fboost/error.hpp"
#include "fboost/objectives.hpp"

namespace fboost {

namespace {

// Minimize a convex per-point loss over R^k (k <= 3): exhaustive grid, then a
// pattern search over all {-1,0,1}^k directions with a halving step. Diagonal
// directions let the search slide along the hinge kink planes.
std::vector<double> minimize_point(const Objective& obj, std::size_t i, std::size_t k, double bound,
                                   double resolution) {
  const auto half = static_cast<long long>(std::ceil(bound / resolution));
  const long long side = 2 * half + 1;
  long long cells = 1;
  for (std::size_t c = 0; c < k; ++c) cells *= side;

  std::vector<double> v(k), best(k);
  double best_loss = std::numeric_limits<double>::infinity();
  for (long long cell = 0; cell < cells; ++cell) {
    long long rest = cell;
    for (std::size_t c = 0; c < k; ++c) {
      v[c] = static_cast<double>(rest % side - half) * resolution;
      rest /= side;
    }
    const double loss = obj.point_loss(i, v);
    if (loss < best_loss) {
      best_loss = loss;
      best = v;
    }
  }

  std::vector<std::vector<double>> directions;
  long long combos = 1;
  for (std::size_t c = 0; c < k; ++c) combos *= 3;
  for (long long m = 0; m < combos; ++m) {
    std::vector<double> d(k);
    long long rest = m;
    bool nonzero = false;
    for (std::size_t c = 0; c < k; ++c) {
      d[c] = static_cast<double>(rest % 3) - 1.0;
      nonzero |= d[c] != 0.0;
      rest /= 3;
    }
    if (nonzero) directions.push_back(std::move(d));
  }

  double step = resolution;
  while (step > 1e-14) {
    bool improved = false;
    for (const auto& d : directions) {
      for (std::size_t c = 0; c < k; ++c) v[c] = best[c] + step * d[c];
      const double loss = obj.point_loss(i, v);
      if (loss < best_loss) {
        best_loss = loss;
        best = v;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

OptimalReference pointwise_optimum(const Objective& obj, double resolution) {
  if (!obj.separable())
    throw UnsupportedError(obj.name() + " is not separable; use subgradient_oracle");
  if (!(resolution > 0.0)) throw InvalidArgument("resolution must be positive");
  const std::size_t k = obj.output_dim();
  if (k > 3) throw UnsupportedError("grid optimum is limited to output dimension <= 3");

  const double bound = obj.label_range() + 2.0;
  const auto& space = obj.space();
  FnVec f_star(space);
  std::map<long long, std::vector<double>> solved;
  for (std::size_t i = 0; i < space->size(); ++i) {
    const long long key = obj.point_key(i);
    auto it = solved.find(key);
    if (it == solved.end()) it = solved.emplace(key, minimize_point(obj, i, k, bound, resolution)).first;
    for (std::size_t c = 0; c < k; ++c) f_star(i, c) = it->second[c];
  }
  const double value_star = obj.value(f_star);
  return {std::move(f_star), value_star, "pointwise-grid"};
}

OptimalReference subgradient_oracle(const Objective& obj, std::size_t iters,
                                    const std::optional<FnVec>& init) {
  FnVec f = init ? *init : FnVec(obj.space());
  FnVec best = f;
  double best_value = obj.value(f);
  for (std::size_t t = 1; t <= iters; ++t) {
    const FnVec g = obj.subgradient(f);
    if (g.is_zero()) break;
    f.axpy(-1.0 / std::sqrt(static_cast<double>(t)), g);
    const double v = obj.value(f);
    if (v < best_value) {
      best_value = v;
      best = f;
    }
  }
  return {std::move(best), best_value, "subgradient-descent"};
}

}  // namespace fboost
