#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scorebands/errors.hpp"
#include "scorebands/normal.hpp"
#include "scorebands/panel.hpp"
#include "scorebands/parallel.hpp"
#include "scorebands/rng.hpp"
#include "scorebands/stat_utils.hpp"

namespace scorebands {

enum class BandType { pointwise, bonferroni, supt };

inline const char* band_type_name(BandType type) {
  switch (type) {
    case BandType::pointwise: return "pointwise";
    case BandType::bonferroni: return "bonferroni";
    case BandType::supt: return "supt";
  }
  return "?";
}

inline BandType parse_band_type(const std::string& name) {
  if (name == "pointwise") return BandType::pointwise;
  if (name == "bonferroni") return BandType::bonferroni;
  if (name == "supt" || name == "sup-t") return BandType::supt;
  throw InvalidInputError("unknown band type '" + name +
                          "' (expected pointwise, bonferroni or supt)");
}

/// Bootstrap band configuration. block_length 0 resolves to the default
/// 3 * floor(N^(1/4)) against the panel at hand; block_length 1 is the
/// classical iid bootstrap.
struct BandConfig {
  double alpha = 0.1;
  std::size_t n_replicates = 4000;  // bootstrap replicates B
  std::size_t block_length = 0;
  std::uint64_t seed = 0;
  std::vector<BandType> band_types{BandType::pointwise, BandType::bonferroni, BandType::supt};
  Target target = Target::skill;
};

struct BandResult {
  Target target = Target::skill;
  double alpha = 0.1;
  std::size_t n_replicates = 0;
  std::size_t block_length = 0;
  std::uint64_t seed = 0;
  std::size_t n_entries = 0;  // J
  std::size_t n_time = 0;     // N
  bool method_reused = false;
  std::vector<std::string> entry_labels;
  std::vector<double> estimates;
  std::vector<double> sigma_hat;

  struct Band {
    BandType type;
    double scaling;  // the factor c, multiplied onto sigma_hat
    std::vector<double> lower;
    std::vector<double> upper;
  };
  std::vector<Band> bands;  // in requested order

  const Band& band(BandType type) const {
    for (const auto& b : bands) {
      if (b.type == type) return b;
    }
    throw InvalidInputError(std::string("band type '") + band_type_name(type) +
                            "' was not requested");
  }

  /// True when the band of the given type contains the whole truth vector.
  bool contains(BandType type, std::span<const double> truth) const {
    const Band& b = band(type);
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (truth[j] < b.lower[j] || truth[j] > b.upper[j]) return false;
    }
    return true;
  }
};

/// Start indices of the ceil(N / l) blocks of one moving-block resample, each
/// uniform on {0, ..., N - l}. With l = 1 this is the classical iid bootstrap
/// drawing N row indices.
inline std::vector<std::size_t> moving_block_starts(std::size_t n_time, std::size_t block_length,
                                                    rng::Xoshiro256pp& gen) {
  if (block_length < 1 || block_length > n_time) {
    throw InvalidInputError("moving block bootstrap: block length must lie in [1, N]");
  }
  const std::size_t n_blocks = (n_time + block_length - 1) / block_length;
  const std::uint64_t n_starts = n_time - block_length + 1;
  std::vector<std::size_t> starts(n_blocks);
  for (auto& s : starts) s = static_cast<std::size_t>(rng::uniform_below(gen, n_starts));
  return starts;
}

namespace detail {

/// Column means of the resample assembled from `starts`, accumulated in the
/// resample's time order so the result is bit-identical to materializing the
/// resample and averaging its columns. The trailing ceil(N/l)*l - N rows of
/// the last block are discarded.
inline void resample_means_into(const ScorePanel& panel, std::span<const std::size_t> starts,
                                std::size_t block_length, std::span<double> out) {
  const std::size_t n = panel.n_time();
  const std::size_t p = panel.n_cols();
  std::fill(out.begin(), out.end(), 0.0);
  std::size_t produced = 0;
  for (const std::size_t start : starts) {
    const std::size_t take = std::min(block_length, n - produced);
    for (std::size_t i = 0; i < take; ++i) {
      const auto row = panel.row(start + i);
      for (std::size_t c = 0; c < p; ++c) out[c] += row[c];
    }
    produced += take;
    if (produced == n) break;
  }
  const auto nd = static_cast<double>(n);
  for (auto& v : out) v /= nd;
}

}  // namespace detail

/// One moving-block resample of the full score vectors: draws ceil(N / l)
/// blocks with replacement from the N - l + 1 length-l windows, concatenates
/// them and truncates to length N. Entire rows are drawn, preserving the
/// cross-sectional structure.
inline ScorePanel moving_block_resample(const ScorePanel& panel, std::size_t block_length,
                                        rng::Xoshiro256pp& gen) {
  const auto starts = moving_block_starts(panel.n_time(), block_length, gen);
  const std::size_t n = panel.n_time();
  const std::size_t p = panel.n_cols();
  std::vector<double> values;
  values.reserve(n * p);
  std::size_t produced = 0;
  for (const std::size_t start : starts) {
    const std::size_t take = std::min(block_length, n - produced);
    const auto window = panel.values().subspan(start * p, take * p);
    values.insert(values.end(), window.begin(), window.end());
    produced += take;
    if (produced == n) break;
  }
  return ScorePanel(panel.dims(), n, std::move(values));
}

/// Moving-block/iid bootstrap confidence bands for the selected target.
///
/// Per replicate b the RNG stream is derived from (seed, b), replicate results
/// are stored by index and all reductions run in index order, so the output is
/// bit-identical for every thread count. All requested band types are computed
/// from the same B resamples. A benchmark mean that is not strictly positive
/// in some resample aborts the computation (redrawing would distort the
/// bootstrap distribution), as does a zero bootstrap standard deviation.
inline BandResult bootstrap_bands(const ScorePanel& panel, const ComparisonSelector& selector,
                                  const BandConfig& config, std::size_t n_threads) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw InvalidInputError("bootstrap_bands: alpha must lie in (0, 1)");
  }
  if (config.n_replicates < 2) {
    throw InvalidInputError("bootstrap_bands: needs at least two bootstrap replicates");
  }
  if (config.band_types.empty()) {
    throw InvalidInputError("bootstrap_bands: no band types requested");
  }
  const std::size_t n = panel.n_time();
  const std::size_t block_length =
      config.block_length == 0 ? default_block_length(n) : config.block_length;
  if (block_length < 1 || block_length > n) {
    throw InvalidInputError("bootstrap_bands: block length must lie in [1, N]");
  }

  auto [estimates, evaluator] = select_target(panel, selector, config.target);
  const std::size_t j_dim = evaluator.output_size();
  const std::size_t b_total = config.n_replicates;

  // Replicate target vectors, row b = replicate b.
  std::vector<double> replicate_targets(b_total * j_dim);
  std::optional<std::pair<std::size_t, std::string>> first_failure;
  std::mutex failure_mutex;
  parallel_for_ranges(b_total, n_threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> means(panel.n_cols());
    for (std::size_t b = begin; b < end; ++b) {
      auto gen = rng::make_stream(config.seed, b);
      const auto starts = moving_block_starts(n, block_length, gen);
      detail::resample_means_into(panel, starts, block_length, means);
      try {
        evaluator.evaluate_into(means, {replicate_targets.data() + b * j_dim, j_dim});
      } catch (const DegenerateBenchmarkError& err) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!first_failure || b < first_failure->first) first_failure = {{b, err.what()}};
      }
    }
  });
  if (first_failure) {
    std::ostringstream msg;
    msg << "bootstrap replicate " << first_failure->first << ": " << first_failure->second;
    throw DegenerateBenchmarkError(msg.str());
  }

  // Empirical standard deviation over replicates, divisor B - 1.
  std::vector<double> sigma(j_dim, 0.0);
  {
    std::vector<double> col_mean(j_dim, 0.0);
    for (std::size_t b = 0; b < b_total; ++b) {
      const double* row = replicate_targets.data() + b * j_dim;
      for (std::size_t j = 0; j < j_dim; ++j) col_mean[j] += row[j];
    }
    for (auto& m : col_mean) m /= static_cast<double>(b_total);
    for (std::size_t b = 0; b < b_total; ++b) {
      const double* row = replicate_targets.data() + b * j_dim;
      for (std::size_t j = 0; j < j_dim; ++j) {
        const double d = row[j] - col_mean[j];
        sigma[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < j_dim; ++j) {
      sigma[j] = std::sqrt(sigma[j] / static_cast<double>(b_total - 1));
      if (sigma[j] == 0.0) {
        throw ZeroSigmaError("bootstrap standard deviation is zero for entry '" +
                             evaluator.entry_labels()[j] + "'");
      }
    }
  }

  BandResult result;
  result.target = config.target;
  result.alpha = config.alpha;
  result.n_replicates = b_total;
  result.block_length = block_length;
  result.seed = config.seed;
  result.n_entries = j_dim;
  result.n_time = n;
  result.method_reused = evaluator.method_reused();
  result.entry_labels = evaluator.entry_labels();
  result.estimates = std::move(estimates);
  result.sigma_hat = std::move(sigma);

  const auto scaling_for = [&](BandType type) -> double {
    switch (type) {
      case BandType::pointwise:
        return normal_quantile(1.0 - config.alpha / 2.0);
      case BandType::bonferroni:
        return normal_quantile(1.0 - config.alpha / (2.0 * static_cast<double>(j_dim)));
      case BandType::supt: {
        // Empirical 1-alpha quantile of the max absolute t statistic,
        // realized as the ceil((1-alpha) B) order statistic.
        std::vector<double> max_stats(b_total);
        for (std::size_t b = 0; b < b_total; ++b) {
          const double* row = replicate_targets.data() + b * j_dim;
          double mx = 0.0;
          for (std::size_t j = 0; j < j_dim; ++j) {
            const double t = std::fabs(row[j] - result.estimates[j]) / result.sigma_hat[j];
            if (t > mx) mx = t;
          }
          max_stats[b] = mx;
        }
        const std::size_t k = detail::order_statistic_index(1.0 - config.alpha, b_total);
        std::nth_element(max_stats.begin(), max_stats.begin() + (k - 1), max_stats.end());
        return max_stats[k - 1];
      }
    }
    throw InvalidInputError("unknown band type");
  };

  for (const BandType type : config.band_types) {
    BandResult::Band band;
    band.type = type;
    band.scaling = scaling_for(type);
    band.lower.resize(j_dim);
    band.upper.resize(j_dim);
    for (std::size_t j = 0; j < j_dim; ++j) {
      const double half_width = result.sigma_hat[j] * band.scaling;
      band.lower[j] = result.estimates[j] - half_width;
      band.upper[j] = result.estimates[j] + half_width;
    }
    result.bands.push_back(std::move(band));
  }
  return result;
}

inline BandResult bootstrap_bands(const ScorePanel& panel, const ComparisonSelector& selector,
                                  const BandConfig& config) {
  return bootstrap_bands(panel, selector, config, default_thread_count());
}

/// One row per entry of the equal-predictive-accuracy readout: estimate,
/// bootstrap sigma and per band type the bounds plus a covers-zero flag.
struct BandReportRow {
  std::string label;
  double estimate = 0.0;
  double sigma = 0.0;
  struct Entry {
    BandType type;
    double lower;
    double upper;
    bool covers_zero;
  };
  std::vector<Entry> bands;
};

inline std::vector<BandReportRow> band_report(const BandResult& result) {
  std::vector<BandReportRow> rows(result.n_entries);
  for (std::size_t j = 0; j < result.n_entries; ++j) {
    auto& row = rows[j];
    row.label = result.entry_labels[j];
    row.estimate = result.estimates[j];
    row.sigma = result.sigma_hat[j];
    for (const auto& band : result.bands) {
      row.bands.push_back({band.type, band.lower[j], band.upper[j],
                           band.lower[j] <= 0.0 && 0.0 <= band.upper[j]});
    }
  }
  return rows;
}

}  // namespace scorebands
