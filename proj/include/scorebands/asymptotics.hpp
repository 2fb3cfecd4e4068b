#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "scorebands/errors.hpp"
#include "scorebands/normal.hpp"
#include "scorebands/parallel.hpp"
#include "scorebands/rng.hpp"
#include "scorebands/stat_utils.hpp"

namespace scorebands {

/// Equicorrelated J-variate standard normal: unit diagonal, common
/// correlation rho >= 0. Draws use the one-factor representation
/// Z_j = sqrt(rho) W + sqrt(1 - rho) eps_j.
struct EquicorrSpec {
  std::size_t dimension = 1;  // J
  double rho = 0.0;
  double alpha = 0.1;
  std::size_t mc_draws = 2'000'000;
  std::uint64_t seed = 0;
};

inline void validate(const EquicorrSpec& spec) {
  if (spec.dimension < 1) throw InvalidInputError("EquicorrSpec: dimension must be >= 1");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) {
    throw InvalidInputError("EquicorrSpec: rho must lie in [0, 1)");
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw InvalidInputError("EquicorrSpec: alpha must lie in (0, 1)");
  }
  if (spec.mc_draws < 1) throw InvalidInputError("EquicorrSpec: mc_draws must be >= 1");
}

namespace detail {

inline constexpr std::size_t kMcChunk = 1 << 16;

/// Runs the one-factor MC in fixed-size chunks, stream (seed, chunk) per
/// chunk, so results do not depend on the thread count. per_draw receives the
/// draw index and the running maxima m_1 <= ... <= m_J of |Z_j|.
template <typename PerDraw>
inline void equicorr_mc(const EquicorrSpec& spec, std::size_t n_threads, PerDraw&& per_draw) {
  const std::size_t n_chunks = (spec.mc_draws + kMcChunk - 1) / kMcChunk;
  const double sqrt_rho = std::sqrt(spec.rho);
  const double sqrt_comp = std::sqrt(1.0 - spec.rho);
  parallel_for_ranges(n_chunks, n_threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> running(spec.dimension);
    for (std::size_t chunk = begin; chunk < end; ++chunk) {
      auto gen = rng::make_stream(spec.seed, chunk);
      const std::size_t lo = chunk * kMcChunk;
      const std::size_t hi = std::min(spec.mc_draws, lo + kMcChunk);
      for (std::size_t draw = lo; draw < hi; ++draw) {
        const double factor = sqrt_rho * rng::standard_normal(gen);
        double current = 0.0;
        for (std::size_t j = 0; j < spec.dimension; ++j) {
          const double z = factor + sqrt_comp * rng::standard_normal(gen);
          const double abs_z = std::fabs(z);
          if (abs_z > current) current = abs_z;
          running[j] = current;
        }
        per_draw(draw, std::span<const double>(running));
      }
    }
  });
}

}  // namespace detail

/// Hit counts of max_{j<=J} |Z_j| <= thresholds[J-1] for J = 1..dimension,
/// all from one MC pass.
inline std::vector<std::size_t> max_abs_hit_counts(const EquicorrSpec& spec,
                                                   std::span<const double> thresholds,
                                                   std::size_t n_threads) {
  validate(spec);
  if (thresholds.size() != spec.dimension) {
    throw InvalidInputError("max_abs_hit_counts: one threshold per dimension expected");
  }
  const std::size_t n_chunks = (spec.mc_draws + detail::kMcChunk - 1) / detail::kMcChunk;
  std::vector<std::size_t> chunk_counts(n_chunks * spec.dimension, 0);
  detail::equicorr_mc(spec, n_threads, [&](std::size_t draw, std::span<const double> running) {
    auto* counts = chunk_counts.data() + (draw / detail::kMcChunk) * spec.dimension;
    for (std::size_t j = 0; j < running.size(); ++j) {
      if (running[j] <= thresholds[j]) ++counts[j];
    }
  });
  std::vector<std::size_t> totals(spec.dimension, 0);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    for (std::size_t j = 0; j < spec.dimension; ++j) {
      totals[j] += chunk_counts[c * spec.dimension + j];
    }
  }
  return totals;
}

/// P(max_j |Z_j| <= threshold) at J = spec.dimension.
inline double max_abs_coverage(const EquicorrSpec& spec, double threshold,
                               std::size_t n_threads) {
  std::vector<double> thresholds(spec.dimension, threshold);
  const auto counts = max_abs_hit_counts(spec, thresholds, n_threads);
  return static_cast<double>(counts.back()) / static_cast<double>(spec.mc_draws);
}

inline double max_abs_coverage(const EquicorrSpec& spec, double threshold) {
  return max_abs_coverage(spec, threshold, default_thread_count());
}

/// The 1-alpha equicoordinate quantile of the equicorrelated normal vector:
/// the 1-alpha quantile of max_j |Z_j|, realized as the ceil((1-alpha) n)
/// order statistic of the MC sample.
inline double equicoordinate_quantile(const EquicorrSpec& spec, std::size_t n_threads) {
  validate(spec);
  std::vector<double> maxima(spec.mc_draws);
  detail::equicorr_mc(spec, n_threads, [&](std::size_t draw, std::span<const double> running) {
    maxima[draw] = running.back();
  });
  const std::size_t k = detail::order_statistic_index(1.0 - spec.alpha, spec.mc_draws);
  std::nth_element(maxima.begin(), maxima.begin() + (k - 1), maxima.end());
  return maxima[k - 1];
}

inline double equicoordinate_quantile(const EquicorrSpec& spec) {
  return equicoordinate_quantile(spec, default_thread_count());
}

/// Asymptotic coverage of pointwise bands: P(max_j |Z_j| <= z_{1-alpha/2}).
/// Equals (1-alpha)^J when rho = 0.
inline double pointwise_asymptotic_coverage(const EquicorrSpec& spec,
                                            std::size_t n_threads = 0) {
  validate(spec);
  if (n_threads == 0) n_threads = default_thread_count();
  return max_abs_coverage(spec, normal_quantile(1.0 - spec.alpha / 2.0), n_threads);
}

/// Asymptotic coverage of Bonferroni bands:
/// P(max_j |Z_j| <= z_{1-alpha/(2J)}); at least 1-alpha up to MC error.
inline double bonferroni_asymptotic_coverage(const EquicorrSpec& spec,
                                             std::size_t n_threads = 0) {
  validate(spec);
  if (n_threads == 0) n_threads = default_thread_count();
  const double z = normal_quantile(1.0 - spec.alpha / (2.0 * static_cast<double>(spec.dimension)));
  return max_abs_coverage(spec, z, n_threads);
}

/// Width of the Bonferroni band relative to sup-t: z_{1-alpha/(2J)} over the
/// equicoordinate quantile.
inline double width_ratio_bonf_vs_supt(const EquicorrSpec& spec, std::size_t n_threads = 0) {
  validate(spec);
  if (n_threads == 0) n_threads = default_thread_count();
  const double z = normal_quantile(1.0 - spec.alpha / (2.0 * static_cast<double>(spec.dimension)));
  return z / equicoordinate_quantile(spec, n_threads);
}

/// Pointwise-band coverage for every J = 1..spec.dimension in one pass.
inline std::vector<double> pointwise_coverage_curve(const EquicorrSpec& spec,
                                                    std::size_t n_threads = 0) {
  validate(spec);
  if (n_threads == 0) n_threads = default_thread_count();
  const std::vector<double> thresholds(spec.dimension, normal_quantile(1.0 - spec.alpha / 2.0));
  const auto counts = max_abs_hit_counts(spec, thresholds, n_threads);
  std::vector<double> coverage(spec.dimension);
  for (std::size_t j = 0; j < coverage.size(); ++j) {
    coverage[j] = static_cast<double>(counts[j]) / static_cast<double>(spec.mc_draws);
  }
  return coverage;
}

/// Bonferroni-band coverage for every J = 1..spec.dimension in one pass; the
/// threshold z_{1-alpha/(2J)} varies with J.
inline std::vector<double> bonferroni_coverage_curve(const EquicorrSpec& spec,
                                                     std::size_t n_threads = 0) {
  validate(spec);
  if (n_threads == 0) n_threads = default_thread_count();
  std::vector<double> thresholds(spec.dimension);
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    thresholds[j] = normal_quantile(1.0 - spec.alpha / (2.0 * static_cast<double>(j + 1)));
  }
  const auto counts = max_abs_hit_counts(spec, thresholds, n_threads);
  std::vector<double> coverage(spec.dimension);
  for (std::size_t j = 0; j < coverage.size(); ++j) {
    coverage[j] = static_cast<double>(counts[j]) / static_cast<double>(spec.mc_draws);
  }
  return coverage;
}

}  // namespace scorebands
