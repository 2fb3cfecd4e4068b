#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scorebands/bands.hpp"
#include "scorebands/errors.hpp"
#include "scorebands/panel.hpp"
#include "scorebands/parallel.hpp"
#include "scorebands/rng.hpp"

namespace scorebands {

/// Score process S_t = c + a S_{t-1} + eps_t with c = (1 - a) mean and
/// equicorrelated Gaussian errors, Var = 1, Corr = error_correlation.
struct Var1Config {
  std::size_t dimension = 2;  // P
  std::size_t n_time = 100;   // N
  double ar_coeff = 0.0;      // a
  double error_correlation = 0.0;
  std::vector<double> mean;  // empty: all entries 10
  std::size_t burn_in = 100;
  std::uint64_t seed = 0;
};

inline void validate(const Var1Config& config) {
  if (config.dimension < 2) throw InvalidInputError("Var1Config: dimension must be >= 2");
  if (config.n_time < 2) throw InvalidInputError("Var1Config: n_time must be >= 2");
  if (!(config.ar_coeff >= 0.0 && config.ar_coeff < 1.0)) {
    throw InvalidInputError("Var1Config: ar coefficient must lie in [0, 1)");
  }
  if (!(config.error_correlation >= 0.0 && config.error_correlation < 1.0)) {
    throw InvalidInputError("Var1Config: error correlation must lie in [0, 1)");
  }
  if (!config.mean.empty() && config.mean.size() != config.dimension) {
    throw InvalidInputError("Var1Config: mean vector must match the dimension");
  }
}

/// Simulates burn_in + N steps from S_0 = mean and returns the last N rows as
/// a panel whose single (method) axis has labels m1..mP. Errors are drawn via
/// the one-factor construction sqrt(v) W + sqrt(1 - v) eta_j.
inline ScorePanel simulate_var1_scores(const Var1Config& config, rng::Xoshiro256pp& gen) {
  validate(config);
  const std::size_t p = config.dimension;
  std::vector<double> mean = config.mean;
  if (mean.empty()) mean.assign(p, 10.0);

  const double a = config.ar_coeff;
  const double sqrt_v = std::sqrt(config.error_correlation);
  const double sqrt_comp = std::sqrt(1.0 - config.error_correlation);

  std::vector<double> state = mean;
  std::vector<double> values(config.n_time * p);
  const std::size_t total_steps = config.burn_in + config.n_time;
  for (std::size_t t = 0; t < total_steps; ++t) {
    const double factor = sqrt_v * rng::standard_normal(gen);
    for (std::size_t j = 0; j < p; ++j) {
      const double eps = factor + sqrt_comp * rng::standard_normal(gen);
      state[j] = (1.0 - a) * mean[j] + a * state[j] + eps;
    }
    if (t >= config.burn_in) {
      std::copy(state.begin(), state.end(), values.begin() + (t - config.burn_in) * p);
    }
  }

  DimensionSpec methods;
  methods.name = "method";
  methods.is_method_axis = true;
  methods.labels.reserve(p);
  for (std::size_t j = 1; j <= p; ++j) methods.labels.push_back("m" + std::to_string(j));
  return ScorePanel({std::move(methods)}, config.n_time, std::move(values));
}

inline ScorePanel simulate_var1_scores(const Var1Config& config) {
  auto gen = rng::make_stream(config.seed, 0);
  return simulate_var1_scores(config, gen);
}

/// Parameter grid of the coverage study. Block multiplier 0 denotes the iid
/// bootstrap arm (l = 1); q >= 1 uses l = q * floor(N^(1/4)).
struct CoverageGrid {
  std::vector<double> ar_coeffs{0.0};
  std::vector<double> error_correlations{0.0};
  std::vector<std::size_t> dimensions{5};
  std::vector<std::size_t> sample_sizes{400};
  std::vector<int> block_multipliers{0, 3};
  std::vector<BandType> band_types{BandType::pointwise, BandType::bonferroni, BandType::supt};
  Target target = Target::skill;
  std::size_t n_replications = 1000;  // R
  std::size_t n_bootstrap = 4000;     // B
  double alpha = 0.1;
  double mean_value = 10.0;
  std::size_t burn_in = 100;
  std::uint64_t seed = 0;
};

struct CoverageCell {
  double ar_coeff = 0.0;
  double error_correlation = 0.0;
  std::size_t dimension = 0;    // P
  std::size_t sample_size = 0;  // N
  int block_multiplier = 0;     // 0 = iid
  std::size_t block_length = 1;
  BandType band_type = BandType::pointwise;
  Target target = Target::skill;
  std::size_t n_replications = 0;
  std::size_t hits = 0;
  std::size_t failures = 0;  // aborted replicates, excluded from the denominator
  double coverage = 0.0;
  double mc_se = 0.0;
};

namespace detail {

/// Replicate seeds derive from (master seed, cell key, replicate index), so
/// cells can run in any order or in parallel without changing results.
inline std::uint64_t cell_key(double a, double v, std::size_t p, std::size_t n, int q,
                              Target target) {
  std::uint64_t key = rng::derive_seed(0x73636f7265ULL, std::bit_cast<std::uint64_t>(a));
  key = rng::derive_seed(key, std::bit_cast<std::uint64_t>(v));
  key = rng::derive_seed(key, p);
  key = rng::derive_seed(key, n);
  key = rng::derive_seed(key, static_cast<std::uint64_t>(q + 1));
  key = rng::derive_seed(key, static_cast<std::uint64_t>(target));
  return key;
}

}  // namespace detail

/// Runs the coverage study over the full grid. Per replicate: simulate a
/// panel, build all requested bands from one set of resamples, and test
/// whether the analytically known truth (skill 0, relative accuracy 1,
/// expected score = mean) lies inside the band at every entry. Replicates are
/// parallel; everything derives from (seed, cell key, replicate), so the
/// output is deterministic for any thread count.
inline std::vector<CoverageCell> run_coverage_experiment(const CoverageGrid& grid,
                                                         std::size_t n_threads) {
  if (grid.n_replications < 1) {
    throw InvalidInputError("run_coverage_experiment: needs at least one replication");
  }
  std::vector<CoverageCell> cells;
  for (const double a : grid.ar_coeffs) {
    for (const double v : grid.error_correlations) {
      for (const std::size_t p : grid.dimensions) {
        for (const std::size_t n : grid.sample_sizes) {
          for (const int q : grid.block_multipliers) {
            const std::size_t block_length =
                q == 0 ? 1 : default_block_length(n, static_cast<std::size_t>(q));

            Var1Config dgp;
            dgp.dimension = p;
            dgp.n_time = n;
            dgp.ar_coeff = a;
            dgp.error_correlation = v;
            dgp.mean.assign(p, grid.mean_value);
            dgp.burn_in = grid.burn_in;
            validate(dgp);

            ComparisonSelector selector;
            const std::string benchmark = "m" + std::to_string(p);
            for (std::size_t m = 1; m < p; ++m) {
              selector.pairs.emplace_back("m" + std::to_string(m), benchmark);
            }

            std::vector<double> truth;
            switch (grid.target) {
              case Target::skill: truth.assign(p - 1, 0.0); break;
              case Target::relative: truth.assign(p - 1, 1.0); break;
              case Target::expected: truth.assign(p, grid.mean_value); break;
            }

            BandConfig band_config;
            band_config.alpha = grid.alpha;
            band_config.n_replicates = grid.n_bootstrap;
            band_config.block_length = block_length;
            band_config.band_types = grid.band_types;
            band_config.target = grid.target;

            const std::uint64_t cell_seed =
                rng::derive_seed(grid.seed, detail::cell_key(a, v, p, n, q, grid.target));

            const std::size_t n_types = grid.band_types.size();
            const std::size_t r_total = grid.n_replications;
            std::vector<std::uint8_t> hit_flags(r_total * n_types, 0);
            std::vector<std::uint8_t> failed(r_total, 0);

            parallel_for_ranges(r_total, n_threads, [&](std::size_t begin, std::size_t end) {
              for (std::size_t r = begin; r < end; ++r) {
                const std::uint64_t replicate_seed = rng::derive_seed(cell_seed, r);
                auto dgp_gen = rng::make_stream(replicate_seed, 0);
                const ScorePanel panel = simulate_var1_scores(dgp, dgp_gen);
                BandConfig cfg = band_config;
                cfg.seed = rng::derive_seed(replicate_seed, 1);
                try {
                  const BandResult result = bootstrap_bands(panel, selector, cfg, 1);
                  for (std::size_t k = 0; k < n_types; ++k) {
                    hit_flags[r * n_types + k] =
                        result.contains(grid.band_types[k], truth) ? 1 : 0;
                  }
                } catch (const DegenerateBenchmarkError&) {
                  failed[r] = 1;
                } catch (const ZeroSigmaError&) {
                  failed[r] = 1;
                }
              }
            });

            std::size_t n_failed = 0;
            for (const auto f : failed) n_failed += f;
            const std::size_t completed = r_total - n_failed;

            for (std::size_t k = 0; k < n_types; ++k) {
              CoverageCell cell;
              cell.ar_coeff = a;
              cell.error_correlation = v;
              cell.dimension = p;
              cell.sample_size = n;
              cell.block_multiplier = q;
              cell.block_length = block_length;
              cell.band_type = grid.band_types[k];
              cell.target = grid.target;
              cell.n_replications = r_total;
              cell.failures = n_failed;
              std::size_t hits = 0;
              for (std::size_t r = 0; r < r_total; ++r) hits += hit_flags[r * n_types + k];
              cell.hits = hits;
              cell.coverage =
                  completed == 0 ? 0.0
                                 : static_cast<double>(hits) / static_cast<double>(completed);
              cell.mc_se = completed == 0
                               ? 0.0
                               : std::sqrt(cell.coverage * (1.0 - cell.coverage) /
                                           static_cast<double>(completed));
              cells.push_back(cell);
            }
          }
        }
      }
    }
  }
  return cells;
}

inline std::vector<CoverageCell> run_coverage_experiment(const CoverageGrid& grid) {
  return run_coverage_experiment(grid, default_thread_count());
}

}  // namespace scorebands
