#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "scorebands/bands.hpp"
#include "scorebands/panel.hpp"
#include "scorebands/rng.hpp"

using namespace scorebands;
using Catch::Approx;

namespace {

// iid N(10, 1) scores for `methods` methods, method axis only.
ScorePanel synthetic_iid_panel(std::size_t methods, std::size_t n_time, std::uint64_t seed) {
  auto gen = rng::make_stream(seed, 0);
  std::vector<double> values(methods * n_time);
  for (auto& v : values) v = 10.0 + rng::standard_normal(gen);
  DimensionSpec dim;
  dim.name = "method";
  dim.is_method_axis = true;
  for (std::size_t m = 1; m <= methods; ++m) dim.labels.push_back("m" + std::to_string(m));
  return ScorePanel({dim}, n_time, std::move(values));
}

ComparisonSelector all_vs_last(std::size_t methods) {
  ComparisonSelector selector;
  const std::string benchmark = "m" + std::to_string(methods);
  for (std::size_t m = 1; m < methods; ++m) {
    selector.pairs.emplace_back("m" + std::to_string(m), benchmark);
  }
  return selector;
}

bool identical_results(const BandResult& a, const BandResult& b) {
  if (a.estimates != b.estimates || a.sigma_hat != b.sigma_hat) return false;
  if (a.bands.size() != b.bands.size()) return false;
  for (std::size_t k = 0; k < a.bands.size(); ++k) {
    if (a.bands[k].scaling != b.bands[k].scaling) return false;
    if (a.bands[k].lower != b.bands[k].lower || a.bands[k].upper != b.bands[k].upper) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("moving block starts") {
  auto gen = rng::make_stream(31, 0);
  const auto starts = moving_block_starts(5, 2, gen);
  CHECK(starts.size() == 3);  // ceil(5 / 2)
  for (const auto s : starts) CHECK(s <= 3);

  auto gen2 = rng::make_stream(31, 1);
  CHECK(moving_block_starts(8, 8, gen2) == std::vector<std::size_t>{0});

  CHECK_THROWS_AS(moving_block_starts(5, 0, gen), InvalidInputError);
  CHECK_THROWS_AS(moving_block_starts(5, 6, gen), InvalidInputError);
}

TEST_CASE("resample with block length N reproduces the panel") {
  const ScorePanel panel = synthetic_iid_panel(3, 20, 32);
  auto gen = rng::make_stream(32, 1);
  const ScorePanel resample = moving_block_resample(panel, 20, gen);
  CHECK(std::equal(resample.values().begin(), resample.values().end(), panel.values().begin()));
}

TEST_CASE("resample contiguity") {
  const ScorePanel panel = synthetic_iid_panel(2, 23, 33);
  for (const std::size_t l : {1UL, 4UL, 7UL}) {
    auto gen = rng::make_stream(33, l);
    const ScorePanel resample = moving_block_resample(panel, l, gen);
    REQUIRE(resample.n_time() == panel.n_time());
    // Every aligned length-l segment (except the truncated tail) must be a
    // contiguous window of the original panel.
    const std::size_t full_blocks = panel.n_time() / l;
    for (std::size_t k = 0; k < full_blocks; ++k) {
      bool found = false;
      for (std::size_t s = 0; s + l <= panel.n_time() && !found; ++s) {
        bool match = true;
        for (std::size_t i = 0; i < l && match; ++i) {
          const auto got = resample.row(k * l + i);
          const auto want = panel.row(s + i);
          match = std::equal(got.begin(), got.end(), want.begin());
        }
        found = match;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("block length one is the classical iid bootstrap") {
  const ScorePanel panel = synthetic_iid_panel(2, 17, 34);
  auto gen = rng::make_stream(99, 0);
  const ScorePanel resample = moving_block_resample(panel, 1, gen);

  // Independent row-resampling implementation fed by the same uniform stream.
  auto gen2 = rng::make_stream(99, 0);
  for (std::size_t t = 0; t < panel.n_time(); ++t) {
    const auto source = rng::uniform_below(gen2, panel.n_time());
    const auto got = resample.row(t);
    const auto want = panel.row(source);
    CHECK(std::equal(got.begin(), got.end(), want.begin()));
  }
}

TEST_CASE("bands at J = 1 collapse bonferroni onto pointwise") {
  const ScorePanel panel = synthetic_iid_panel(2, 60, 35);
  BandConfig config;
  config.alpha = 0.1;
  config.n_replicates = 400;
  config.block_length = 1;
  config.seed = 5;
  const BandResult result = bootstrap_bands(panel, all_vs_last(2), config);
  REQUIRE(result.n_entries == 1);
  const double z = normal_quantile(0.95);
  CHECK(result.band(BandType::pointwise).scaling == z);
  CHECK(result.band(BandType::bonferroni).scaling == z);
}

TEST_CASE("band symmetry and scaling nesting") {
  const ScorePanel panel = synthetic_iid_panel(6, 300, 36);
  BandConfig config;
  config.alpha = 0.1;
  config.n_replicates = 4000;
  config.block_length = 1;
  config.seed = 17;
  const BandResult result = bootstrap_bands(panel, all_vs_last(6), config);
  REQUIRE(result.n_entries == 5);

  for (const auto& band : result.bands) {
    for (std::size_t j = 0; j < result.n_entries; ++j) {
      const double up = band.upper[j] - result.estimates[j];
      const double down = result.estimates[j] - band.lower[j];
      CHECK(std::fabs(up - down) <= 1e-12);
      CHECK(band.lower[j] <= result.estimates[j]);
      CHECK(result.estimates[j] <= band.upper[j]);
    }
  }

  const double pointwise = result.band(BandType::pointwise).scaling;
  const double bonferroni = result.band(BandType::bonferroni).scaling;
  const double supt = result.band(BandType::supt).scaling;
  CHECK(pointwise <= bonferroni);
  CHECK(supt >= pointwise - 0.05);
  CHECK(supt <= bonferroni + 0.05);
}

TEST_CASE("identical output for any thread count") {
  const ScorePanel panel = synthetic_iid_panel(4, 120, 37);
  BandConfig config;
  config.n_replicates = 600;
  config.block_length = 6;
  config.seed = 23;
  const BandResult serial = bootstrap_bands(panel, all_vs_last(4), config, 1);
  const BandResult threaded = bootstrap_bands(panel, all_vs_last(4), config, 4);
  const BandResult again = bootstrap_bands(panel, all_vs_last(4), config, 4);
  CHECK(identical_results(serial, threaded));
  CHECK(identical_results(threaded, again));
}

TEST_CASE("degenerate benchmark in a resample aborts with the replicate index") {
  // Mean barely positive; iid resamples of four rows go non-positive often.
  std::vector<double> values;
  const std::vector<double> benchmark{4.0, -1.0, -1.0, -1.0};
  for (std::size_t t = 0; t < 4; ++t) {
    values.push_back(1.0);  // method column, irrelevant
    values.push_back(benchmark[t]);
  }
  const ScorePanel panel({DimensionSpec{"method", {"m", "b"}, true}}, 4, std::move(values));
  BandConfig config;
  config.n_replicates = 500;
  config.block_length = 1;
  config.seed = 3;
  try {
    bootstrap_bands(panel, {{{"m", "b"}}}, config);
    FAIL("expected a degenerate-benchmark abort");
  } catch (const DegenerateBenchmarkError& err) {
    CHECK(std::string(err.what()).find("replicate") != std::string::npos);
  }
}

TEST_CASE("zero bootstrap sigma aborts") {
  std::vector<double> values(2 * 10, 3.0);  // constant scores
  const ScorePanel panel({DimensionSpec{"method", {"m", "b"}, true}}, 10, std::move(values));
  BandConfig config;
  config.n_replicates = 50;
  config.block_length = 1;
  config.target = Target::expected;
  CHECK_THROWS_AS(bootstrap_bands(panel, {}, config), ZeroSigmaError);
}

TEST_CASE("bands on an equal-accuracy pair cover zero about 1 - alpha of the time") {
  const std::size_t trials = 200;
  std::size_t covered = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ScorePanel panel = synthetic_iid_panel(2, 150, 4000 + trial);
    BandConfig config;
    config.alpha = 0.1;
    config.n_replicates = 600;
    config.block_length = 1;
    config.seed = trial;
    config.band_types = {BandType::pointwise};
    const BandResult result = bootstrap_bands(panel, all_vs_last(2), config);
    const std::vector<double> truth{0.0};
    if (result.contains(BandType::pointwise, truth)) ++covered;
  }
  const double coverage = static_cast<double>(covered) / static_cast<double>(trials);
  CHECK(coverage == Approx(0.9).margin(0.07));
}

TEST_CASE("band report") {
  BandResult result;
  result.target = Target::skill;
  result.n_entries = 1;
  result.entry_labels = {"tvp_vs_const"};
  result.estimates = {0.062};
  result.sigma_hat = {0.0852};
  BandResult::Band band;
  band.type = BandType::bonferroni;
  band.scaling = 1.0;
  band.lower = {result.estimates[0] - result.sigma_hat[0]};
  band.upper = {result.estimates[0] + result.sigma_hat[0]};
  result.bands.push_back(band);

  const auto rows = band_report(result);
  REQUIRE(rows.size() == 1);
  // Matches the published rounded bounds of the aggregated density-forecast
  // skill band: (-2.28%, 14.7%).
  CHECK(rows[0].bands[0].lower == Approx(-0.0228).margin(5e-4));
  CHECK(rows[0].bands[0].upper == Approx(0.147).margin(5e-4));
  CHECK(rows[0].bands[0].covers_zero);
  CHECK(rows[0].bands[0].lower <= rows[0].bands[0].upper);
}

TEST_CASE("band report rows equal entries and bounds are ordered") {
  const ScorePanel panel = synthetic_iid_panel(4, 80, 39);
  BandConfig config;
  config.n_replicates = 300;
  config.block_length = 4;
  const BandResult result = bootstrap_bands(panel, all_vs_last(4), config);
  const auto rows = band_report(result);
  REQUIRE(rows.size() == result.n_entries);
  for (const auto& row : rows) {
    for (const auto& entry : row.bands) CHECK(entry.lower <= entry.upper);
  }
}

TEST_CASE("band config validation") {
  const ScorePanel panel = synthetic_iid_panel(2, 30, 40);
  BandConfig config;
  config.alpha = 0.0;
  CHECK_THROWS_AS(bootstrap_bands(panel, all_vs_last(2), config), InvalidInputError);
  config.alpha = 0.1;
  config.n_replicates = 1;
  CHECK_THROWS_AS(bootstrap_bands(panel, all_vs_last(2), config), InvalidInputError);
  config.n_replicates = 100;
  config.block_length = 31;
  CHECK_THROWS_AS(bootstrap_bands(panel, all_vs_last(2), config), InvalidInputError);
  config.block_length = 0;
  config.band_types = {};
  CHECK_THROWS_AS(bootstrap_bands(panel, all_vs_last(2), config), InvalidInputError);
}
