#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scorebands/errors.hpp"

namespace scorebands {

/// One axis of the score index set (e.g. horizon, variable, method).
struct DimensionSpec {
  std::string name;
  std::vector<std::string> labels;
  bool is_method_axis = false;
};

/// Sample of score vectors: an N x P matrix in row-major time order. Column p
/// is the lexicographic flattening of the dimension labels in declaration
/// order, first dimension slowest.
class ScorePanel {
 public:
  ScorePanel(std::vector<DimensionSpec> dims, std::size_t n_time, std::vector<double> values)
      : dims_(std::move(dims)), n_time_(n_time), values_(std::move(values)) {
    if (dims_.empty()) throw InvalidInputError("ScorePanel: needs at least one dimension");
    if (n_time_ < 2) throw InvalidInputError("ScorePanel: needs at least two time points");
    std::size_t method_axes = 0;
    n_cols_ = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      const auto& dim = dims_[k];
      if (dim.labels.empty()) {
        throw InvalidInputError("ScorePanel: dimension '" + dim.name + "' has no labels");
      }
      const std::set<std::string> unique(dim.labels.begin(), dim.labels.end());
      if (unique.size() != dim.labels.size()) {
        throw InvalidInputError("ScorePanel: duplicate label in dimension '" + dim.name + "'");
      }
      if (dim.is_method_axis) {
        method_axis_ = k;
        ++method_axes;
      }
      n_cols_ *= dim.labels.size();
    }
    if (method_axes != 1) {
      throw InvalidInputError("ScorePanel: exactly one dimension must be the method axis");
    }
    if (values_.size() != n_time_ * n_cols_) {
      throw InvalidInputError("ScorePanel: value matrix size does not match N x P");
    }
    for (const double v : values_) {
      if (!std::isfinite(v)) throw InvalidInputError("ScorePanel: all scores must be finite");
    }
    strides_.assign(dims_.size(), 1);
    for (std::size_t k = dims_.size() - 1; k-- > 0;) {
      strides_[k] = strides_[k + 1] * dims_[k + 1].labels.size();
    }
  }

  std::size_t n_time() const { return n_time_; }
  std::size_t n_cols() const { return n_cols_; }
  const std::vector<DimensionSpec>& dims() const { return dims_; }
  std::span<const double> values() const { return values_; }

  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * n_cols_, n_cols_};
  }

  double value(std::size_t t, std::size_t p) const { return values_[t * n_cols_ + p]; }

  std::size_t method_axis() const { return method_axis_; }
  std::size_t n_methods() const { return dims_[method_axis_].labels.size(); }

  /// Number of combinations of the non-method dimensions (P / M).
  std::size_t n_base() const { return n_cols_ / n_methods(); }

  std::size_t method_label_index(const std::string& label) const {
    const auto& labels = dims_[method_axis_].labels;
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      throw InvalidInputError("unknown method label '" + label + "'");
    }
    return static_cast<std::size_t>(it - labels.begin());
  }

  std::size_t column_index(std::span<const std::size_t> tuple) const {
    std::size_t col = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) col += tuple[k] * strides_[k];
    return col;
  }

  std::vector<std::size_t> column_tuple(std::size_t p) const {
    std::vector<std::size_t> tuple(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      tuple[k] = (p / strides_[k]) % dims_[k].labels.size();
    }
    return tuple;
  }

  std::string column_label(std::size_t p) const {
    const auto tuple = column_tuple(p);
    std::string label;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (k > 0) label += '/';
      label += dims_[k].labels[tuple[k]];
    }
    return label;
  }

  /// Column of method `method_index` at non-method combination `base_index`,
  /// where base indices flatten the non-method dimensions lexicographically in
  /// declaration order.
  std::size_t column_for(std::size_t method_index, std::size_t base_index) const {
    std::size_t col = method_index * strides_[method_axis_];
    for (std::size_t k = dims_.size(); k-- > 0;) {
      if (k == method_axis_) continue;
      const std::size_t size = dims_[k].labels.size();
      col += (base_index % size) * strides_[k];
      base_index /= size;
    }
    return col;
  }

  /// Non-method labels of a base combination, joined with '/'; empty when the
  /// method axis is the only dimension.
  std::string base_label(std::size_t base_index) const {
    std::vector<std::string> parts(dims_.size());
    for (std::size_t k = dims_.size(); k-- > 0;) {
      if (k == method_axis_) continue;
      const std::size_t size = dims_[k].labels.size();
      parts[k] = dims_[k].labels[base_index % size];
      base_index /= size;
    }
    std::string label;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (k == method_axis_) continue;
      if (!label.empty()) label += '/';
      label += parts[k];
    }
    return label;
  }

 private:
  std::vector<DimensionSpec> dims_;
  std::size_t n_time_ = 0;
  std::size_t n_cols_ = 1;
  std::size_t method_axis_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
};

/// Set of (method, benchmark) comparisons. Each pair expands over every
/// combination of the non-method dimensions.
struct ComparisonSelector {
  std::vector<std::pair<std::string, std::string>> pairs;
};

/// A selector bound to a concrete panel layout: per skill entry the column of
/// the method and of the benchmark. Entries are ordered pair-major, base
/// combinations fastest.
class ResolvedSelector {
 public:
  static ResolvedSelector resolve(const ScorePanel& panel, const ComparisonSelector& selector) {
    if (selector.pairs.empty()) {
      throw InvalidInputError("ComparisonSelector: needs at least one (method, benchmark) pair");
    }
    std::set<std::pair<std::string, std::string>> seen;
    ResolvedSelector resolved;
    const std::size_t n_base = panel.n_base();
    std::set<std::string> labels_used;
    bool label_reused = false;
    for (const auto& [method, benchmark] : selector.pairs) {
      if (method == benchmark) {
        throw InvalidInputError("ComparisonSelector: method and benchmark coincide ('" + method + "')");
      }
      if (!seen.insert({method, benchmark}).second) {
        throw InvalidInputError("ComparisonSelector: duplicate pair " + method + ":" + benchmark);
      }
      if (!labels_used.insert(method).second) label_reused = true;
      if (!labels_used.insert(benchmark).second) label_reused = true;
      const std::size_t mi = panel.method_label_index(method);
      const std::size_t bi = panel.method_label_index(benchmark);
      for (std::size_t base = 0; base < n_base; ++base) {
        resolved.columns_.emplace_back(panel.column_for(mi, base), panel.column_for(bi, base));
        std::string label = method + "_vs_" + benchmark;
        const std::string base_part = panel.base_label(base);
        if (!base_part.empty()) label += "/" + base_part;
        resolved.entry_labels_.push_back(std::move(label));
        resolved.benchmark_labels_.push_back(panel.column_label(panel.column_for(bi, base)));
      }
    }
    resolved.method_reused_ = label_reused;
    return resolved;
  }

  std::size_t size() const { return columns_.size(); }

  std::span<const std::pair<std::size_t, std::size_t>> columns() const { return columns_; }
  const std::vector<std::string>& entry_labels() const { return entry_labels_; }
  const std::vector<std::string>& benchmark_labels() const { return benchmark_labels_; }

  /// True when some method label participates in more than one comparison;
  /// surfaced in output metadata.
  bool method_reused() const { return method_reused_; }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> columns_;
  std::vector<std::string> entry_labels_;
  std::vector<std::string> benchmark_labels_;
  bool method_reused_ = false;
};

/// Columnwise arithmetic means of the score matrix.
inline std::vector<double> average_scores(const ScorePanel& panel) {
  std::vector<double> means(panel.n_cols(), 0.0);
  for (std::size_t t = 0; t < panel.n_time(); ++t) {
    const auto row = panel.row(t);
    for (std::size_t p = 0; p < means.size(); ++p) means[p] += row[p];
  }
  const auto n = static_cast<double>(panel.n_time());
  for (auto& m : means) m /= n;
  return means;
}

namespace detail {

inline void check_benchmark_mean(double value, const std::string& column_label) {
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << "benchmark mean is not strictly positive for column '" << column_label
        << "' (value " << value << ")";
    throw DegenerateBenchmarkError(msg.str());
  }
}

}  // namespace detail

/// Entrywise skill scores 1 - mean(method) / mean(benchmark).
inline std::vector<double> skill_from_means(std::span<const double> means,
                                            const ResolvedSelector& selector) {
  std::vector<double> out(selector.size());
  const auto cols = selector.columns();
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double benchmark = means[cols[j].second];
    detail::check_benchmark_mean(benchmark, selector.benchmark_labels()[j]);
    out[j] = 1.0 - means[cols[j].first] / benchmark;
  }
  return out;
}

/// Entrywise relative accuracy mean(method) / mean(benchmark) = 1 - skill.
inline std::vector<double> relative_accuracy_from_means(std::span<const double> means,
                                                        const ResolvedSelector& selector) {
  std::vector<double> out(selector.size());
  const auto cols = selector.columns();
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double benchmark = means[cols[j].second];
    detail::check_benchmark_mean(benchmark, selector.benchmark_labels()[j]);
    out[j] = means[cols[j].first] / benchmark;
  }
  return out;
}

enum class Target { skill, expected, relative };

inline const char* target_name(Target target) {
  switch (target) {
    case Target::skill: return "skill";
    case Target::expected: return "expected";
    case Target::relative: return "relative";
  }
  return "?";
}

inline Target parse_target(const std::string& name) {
  if (name == "skill") return Target::skill;
  if (name == "expected") return Target::expected;
  if (name == "relative") return Target::relative;
  throw InvalidInputError("unknown target '" + name + "' (expected skill, expected or relative)");
}

/// Reusable map from a vector of column means to the target vector; applied to
/// the original sample and to every bootstrap resample.
class TargetEvaluator {
 public:
  Target target() const { return target_; }
  std::size_t output_size() const { return labels_.size(); }
  const std::vector<std::string>& entry_labels() const { return labels_; }
  bool method_reused() const { return method_reused_; }

  void evaluate_into(std::span<const double> means, std::span<double> out) const {
    if (target_ == Target::expected) {
      std::copy(means.begin(), means.end(), out.begin());
      return;
    }
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      const double benchmark = means[columns_[j].second];
      detail::check_benchmark_mean(benchmark, benchmark_labels_[j]);
      const double ratio = means[columns_[j].first] / benchmark;
      out[j] = target_ == Target::skill ? 1.0 - ratio : ratio;
    }
  }

  std::vector<double> operator()(std::span<const double> means) const {
    std::vector<double> out(output_size());
    evaluate_into(means, out);
    return out;
  }

 private:
  friend std::pair<std::vector<double>, TargetEvaluator> select_target(const ScorePanel&,
                                                                       const ComparisonSelector&,
                                                                       Target);
  Target target_ = Target::expected;
  std::vector<std::pair<std::size_t, std::size_t>> columns_;
  std::vector<std::string> labels_;
  std::vector<std::string> benchmark_labels_;
  bool method_reused_ = false;
};

/// Point estimate on the original panel plus the evaluator that reproduces the
/// same map on resampled means. For Target::expected the selector is ignored
/// and the target is the full mean vector.
inline std::pair<std::vector<double>, TargetEvaluator> select_target(
    const ScorePanel& panel, const ComparisonSelector& selector, Target target) {
  TargetEvaluator evaluator;
  evaluator.target_ = target;
  if (target == Target::expected) {
    evaluator.labels_.reserve(panel.n_cols());
    for (std::size_t p = 0; p < panel.n_cols(); ++p) {
      evaluator.labels_.push_back(panel.column_label(p));
    }
  } else {
    const ResolvedSelector resolved = ResolvedSelector::resolve(panel, selector);
    evaluator.columns_.assign(resolved.columns().begin(), resolved.columns().end());
    evaluator.labels_ = resolved.entry_labels();
    evaluator.benchmark_labels_ = resolved.benchmark_labels();
    evaluator.method_reused_ = resolved.method_reused();
  }
  const std::vector<double> means = average_scores(panel);
  std::vector<double> estimate(evaluator.output_size());
  evaluator.evaluate_into(means, estimate);
  return {std::move(estimate), std::move(evaluator)};
}

}  // namespace scorebands
