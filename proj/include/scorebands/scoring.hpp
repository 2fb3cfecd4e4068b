#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scorebands/errors.hpp"

namespace scorebands {

namespace detail {

inline bool all_finite(std::span<const double> values) {
  for (const double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace detail

/// A realized outcome; one entry per target dimension.
struct Observation {
  std::vector<double> value;

  void validate() const {
    if (value.empty() || !detail::all_finite(value)) {
      throw InvalidInputError("Observation: value must be non-empty and finite");
    }
  }
};

/// Probabilistic forecast represented by its ensemble members; the forecast
/// distribution is the empirical distribution of the rows.
class EnsembleForecast {
 public:
  /// values holds the members row-major, n_members x dim.
  EnsembleForecast(std::size_t n_members, std::size_t dim, std::vector<double> values)
      : n_members_(n_members), dim_(dim), values_(std::move(values)) {
    if (n_members_ < 1 || dim_ < 1) {
      throw InvalidInputError("EnsembleForecast: needs at least one member and one dimension");
    }
    if (values_.size() != n_members_ * dim_) {
      throw InvalidInputError("EnsembleForecast: member matrix has wrong size");
    }
    if (!detail::all_finite(values_)) {
      throw InvalidInputError("EnsembleForecast: all member values must be finite");
    }
  }

  static EnsembleForecast univariate(std::vector<double> members) {
    const std::size_t m = members.size();
    return EnsembleForecast(m, 1, std::move(members));
  }

  std::size_t n_members() const { return n_members_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> member(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }

 private:
  std::size_t n_members_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Squared error (y - x)^2. With y in {0,1} and x in [0,1] this is the Brier
/// score.
inline double squared_error(double forecast, double outcome) {
  if (!std::isfinite(forecast) || !std::isfinite(outcome)) {
    throw InvalidInputError("squared_error: inputs must be finite");
  }
  const double d = outcome - forecast;
  return d * d;
}

/// Squared Euclidean distance between forecast and observation vectors; equals
/// the sum of the componentwise squared errors.
inline double multivariate_squared_error(std::span<const double> forecast,
                                         std::span<const double> outcome) {
  if (forecast.size() != outcome.size() || forecast.empty()) {
    throw InvalidInputError("multivariate_squared_error: dimension mismatch");
  }
  if (!detail::all_finite(forecast) || !detail::all_finite(outcome)) {
    throw InvalidInputError("multivariate_squared_error: inputs must be finite");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double d = outcome[i] - forecast[i];
    sum += d * d;
  }
  return sum;
}

/// Quantile (pinball) score rho_tau(y - x) with rho_tau(u) = u (tau - 1{u<0}).
inline double quantile_score(double forecast, double outcome, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidInputError("quantile_score: tau must lie in (0, 1)");
  }
  if (!std::isfinite(forecast) || !std::isfinite(outcome)) {
    throw InvalidInputError("quantile_score: inputs must be finite");
  }
  const double u = outcome - forecast;
  return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

/// CRPS of the empirical CDF given by the ensemble members, in closed form:
/// mean |x_i - y| minus half the mean absolute member spread over all pairs.
inline double crps_ensemble(const EnsembleForecast& forecast, double outcome) {
  if (forecast.dim() != 1) {
    throw InvalidInputError("crps_ensemble: requires a univariate ensemble");
  }
  if (!std::isfinite(outcome)) {
    throw InvalidInputError("crps_ensemble: outcome must be finite");
  }
  const std::size_t m = forecast.n_members();
  double accuracy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    accuracy += std::fabs(forecast.member(i)[0] - outcome);
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      spread += std::fabs(forecast.member(i)[0] - forecast.member(j)[0]);
    }
  }
  const auto md = static_cast<double>(m);
  return accuracy / md - spread / (2.0 * md * md);
}

/// Energy score, exact all-pairs estimator for the empirical forecast
/// distribution. For dim 1 it coincides with crps_ensemble.
inline double energy_score_ensemble(const EnsembleForecast& forecast,
                                    std::span<const double> outcome) {
  if (outcome.size() != forecast.dim()) {
    throw InvalidInputError("energy_score_ensemble: outcome dimension mismatch");
  }
  if (!detail::all_finite(outcome)) {
    throw InvalidInputError("energy_score_ensemble: outcome must be finite");
  }
  const std::size_t m = forecast.n_members();
  double accuracy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    accuracy += detail::euclidean_distance(forecast.member(i), outcome);
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      spread += detail::euclidean_distance(forecast.member(i), forecast.member(j));
    }
  }
  const auto md = static_cast<double>(m);
  return accuracy / md - spread / (2.0 * md * md);
}

/// Equal-weight aggregation: the sum of the individual scores.
inline double aggregate_scores(std::span<const double> scores) {
  if (scores.empty()) {
    throw InvalidInputError("aggregate_scores: empty input");
  }
  if (!detail::all_finite(scores)) {
    throw InvalidInputError("aggregate_scores: inputs must be finite");
  }
  double sum = 0.0;
  for (const double s : scores) sum += s;
  return sum;
}

}  // namespace scorebands
