#pragma once

#include <cmath>
#include <cstddef>

#include "scorebands/errors.hpp"

namespace scorebands {

/// floor(n^(1/4)) in exact integer arithmetic (std::pow misrounds e.g. n=625).
inline std::size_t floor_fourth_root(std::size_t n) {
  auto root = static_cast<std::size_t>(std::pow(static_cast<double>(n), 0.25));
  const auto fourth = [](std::size_t r) { return r * r * r * r; };
  while (root > 0 && fourth(root) > n) --root;
  while (fourth(root + 1) <= n) ++root;
  return root;
}

/// Moving-block default l = q * floor(N^(1/4)), clamped into [1, N].
inline std::size_t default_block_length(std::size_t n_time, std::size_t q = 3) {
  const std::size_t l = q * floor_fourth_root(n_time);
  if (l < 1) return 1;
  return l > n_time ? n_time : l;
}

namespace detail {

/// 1-based index k of the ceil(level * n) order statistic. A small downward
/// guard absorbs IEEE noise: (1 - 0.1) * 4000 evaluates to 3600.0000000000005
/// and a bare ceil would land on 3601 instead of the intended 3600.
inline std::size_t order_statistic_index(double level, std::size_t n) {
  if (!(level > 0.0 && level <= 1.0) || n == 0) {
    throw InvalidInputError("order_statistic_index: invalid level or empty sample");
  }
  const double scaled = level * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
  if (k < 1) k = 1;
  if (k > n) k = n;
  return k;
}

}  // namespace detail

}  // namespace scorebands
