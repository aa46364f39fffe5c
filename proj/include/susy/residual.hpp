#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "susy/grid.hpp"

namespace susy {

inline constexpr std::uint64_t default_seed = 20240601;
inline constexpr int default_test_fields = 8;
inline constexpr double identity_threshold = 1e-12;

/// Seeded batch of vectors with entries uniform in [-1, 1].
inline std::vector<Vector> random_fields(Eigen::Index size, std::uint64_t seed = default_seed, int count = default_test_fields) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = dist(rng);
    out.push_back(std::move(v));
  }
  return out;
}

using VectorMap = std::function<Vector(const Vector&)>;

/// max over the batch of |(lhs - rhs) x| / |x|.
inline double relation_residual(const VectorMap& lhs, const VectorMap& rhs, Eigen::Index input_size,
                                 std::uint64_t seed = default_seed, int count = default_test_fields) {
  double worst = 0.0;
  for (const Vector& x : random_fields(input_size, seed, count))
    worst = std::max(worst, (lhs(x) - rhs(x)).norm() / x.norm());
  return worst;
}

/// max over the batch of |op x| / |x|.
inline double annihilation_residual(const VectorMap& op, Eigen::Index input_size, std::uint64_t seed = default_seed,
                                    int count = default_test_fields) {
  double worst = 0.0;
  for (const Vector& x : random_fields(input_size, seed, count)) worst = std::max(worst, op(x).norm() / x.norm());
  return worst;
}

/// Observed convergence orders log2(e_k / e_{k+1}) for successive halvings of h.
inline std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) orders.push_back(std::log2(errors[i] / errors[i + 1]));
  return orders;
}

}  // namespace susy
