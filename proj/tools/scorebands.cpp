// Command line front end: score forecast files, build bootstrap confidence
// bands for skill scores / expected scores / relative accuracy, run the VAR(1)
// coverage study and emit the asymptotic width/coverage tables.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scorebands/asymptotics.hpp"
#include "scorebands/bands.hpp"
#include "scorebands/io.hpp"
#include "scorebands/panel.hpp"
#include "scorebands/simulation.hpp"

namespace {

using namespace scorebands;

std::vector<std::string> split_list(const std::string& text, char delim = ',') {
  std::vector<std::string> items;
  std::string current;
  for (const char c : text) {
    if (c == delim) {
      if (!current.empty()) items.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) items.push_back(current);
  return items;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidInputError(flag + ": cannot parse '" + item + "'");
    }
  }
  if (values.empty()) throw InvalidInputError(flag + ": empty list");
  return values;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> values;
  for (const auto& item : split_list(text)) {
    try {
      values.push_back(static_cast<std::size_t>(std::stoull(item)));
    } catch (const std::exception&) {
      throw InvalidInputError(flag + ": cannot parse '" + item + "'");
    }
  }
  if (values.empty()) throw InvalidInputError(flag + ": empty list");
  return values;
}

// "1:25" expands to 1..25; otherwise a comma list.
std::vector<std::size_t> parse_range_or_list(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto lo = static_cast<std::size_t>(std::stoull(text.substr(0, colon)));
    const auto hi = static_cast<std::size_t>(std::stoull(text.substr(colon + 1)));
    if (lo < 1 || hi < lo) throw InvalidInputError(flag + ": invalid range '" + text + "'");
    std::vector<std::size_t> values;
    for (std::size_t v = lo; v <= hi; ++v) values.push_back(v);
    return values;
  }
  return parse_size_list(text, flag);
}

std::vector<BandType> parse_band_types(const std::string& text) {
  std::vector<BandType> types;
  for (const auto& item : split_list(text)) types.push_back(parse_band_type(item));
  if (types.empty()) throw InvalidInputError("--types: empty list");
  return types;
}

ComparisonSelector parse_pairs(const std::string& text) {
  ComparisonSelector selector;
  for (const auto& item : split_list(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
      throw InvalidInputError("--pairs: expected method:benchmark, got '" + item + "'");
    }
    selector.pairs.emplace_back(item.substr(0, colon), item.substr(colon + 1));
  }
  return selector;
}

std::filesystem::path header_path_for(const std::string& header_flag,
                                      const std::filesystem::path& data_path) {
  if (!header_flag.empty()) return header_flag;
  return io::json_sidecar_path(data_path);
}

void print_band_table(const BandResult& result) {
  const auto rows = band_report(result);
  std::printf("%-28s %12s %12s", "entry", "estimate", "sigma");
  for (const auto& band : result.bands) {
    std::printf(" %26s", band_type_name(band.type));
  }
  std::printf("\n");
  for (const auto& row : rows) {
    std::printf("%-28s %12.6g %12.6g", row.label.c_str(), row.estimate, row.sigma);
    for (const auto& entry : row.bands) {
      char interval[32];
      std::snprintf(interval, sizeof(interval), "[%.4g, %.4g]%s", entry.lower, entry.upper,
                    entry.covers_zero ? "*" : " ");
      std::printf(" %26s", interval);
    }
    std::printf("\n");
  }
  std::printf("(* band covers zero)\n");
}

int run(int argc, char** argv) {
  CLI::App app{"Bootstrap confidence bands for forecast scores and skill scores"};
  app.require_subcommand(1);

  // ---- bands ----
  auto* bands_cmd = app.add_subcommand("bands", "bootstrap bands for a score panel");
  std::string bands_panel;
  std::string bands_header;
  std::string bands_target = "skill";
  std::string bands_pairs;
  std::string bands_types = "pointwise,bonferroni,supt";
  std::string bands_out;
  BandConfig band_config;
  std::size_t bands_block_q = 3;
  std::size_t bands_block_len = 0;
  bands_cmd->add_option("--panel", bands_panel, "panel CSV (long format)")->required();
  bands_cmd->add_option("--header", bands_header,
                        "JSON header declaring dimensions (default: panel path with .json)");
  bands_cmd->add_option("--target", bands_target, "skill | expected | relative");
  bands_cmd->add_option("--pairs", bands_pairs, "method:benchmark comparisons, comma separated");
  bands_cmd->add_option("--alpha", band_config.alpha, "1 - confidence level (default 0.1)");
  bands_cmd->add_option("--B", band_config.n_replicates, "bootstrap replicates (default 4000)");
  bands_cmd->add_option("--block-q", bands_block_q,
                        "block length multiplier: l = q * floor(N^(1/4)) (default 3)");
  bands_cmd->add_option("--block-len", bands_block_len,
                        "explicit block length; overrides --block-q; 1 = iid bootstrap");
  bands_cmd->add_option("--types", bands_types, "band types (default all three)");
  bands_cmd->add_option("--seed", band_config.seed, "RNG seed (default 0)");
  bands_cmd->add_option("--out", bands_out, "output CSV path (JSON sidecar added)")->required();

  // ---- score ----
  auto* score_cmd = app.add_subcommand("score", "score a forecast file into a panel");
  std::string score_forecasts_path;
  std::string score_header;
  std::string score_rule = "se";
  std::optional<double> score_tau;
  std::string score_aggregate;
  std::string score_out;
  score_cmd->add_option("--forecasts", score_forecasts_path, "forecast CSV (long format)")
      ->required();
  score_cmd->add_option("--header", score_header,
                        "JSON header declaring dimensions (default: forecasts path with .json)");
  score_cmd->add_option("--rule", score_rule, "se | mv_se | qs | crps | energy");
  double tau_value = 0.5;
  auto* tau_opt = score_cmd->add_option("--tau", tau_value, "quantile level for qs");
  score_cmd->add_option("--aggregate", score_aggregate,
                        "dimensions to sum scores over, comma separated");
  score_cmd->add_option("--out", score_out, "output panel CSV (JSON header sidecar added)")
      ->required();

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "coverage study on the VAR(1) score process");
  std::string sim_preset;
  std::string sim_a = "0";
  std::string sim_v = "0";
  std::string sim_p = "2,5";
  std::string sim_n = "400";
  std::string sim_q = "0,3";
  std::string sim_types = "pointwise,bonferroni,supt";
  std::string sim_target = "skill";
  std::string sim_out;
  bool sim_highdim = false;
  CoverageGrid grid;
  sim_cmd->add_option("--preset", sim_preset,
                      "appendix-e-small | appendix-e-indep | appendix-e-block | appendix-e-es");
  auto* a_opt = sim_cmd->add_option("--a", sim_a, "AR coefficients, comma separated");
  auto* v_opt = sim_cmd->add_option("--v", sim_v, "error correlations, comma separated");
  auto* p_opt = sim_cmd->add_option("--P", sim_p, "score vector dimensions, comma separated");
  auto* n_opt = sim_cmd->add_option("--N", sim_n, "sample sizes, comma separated");
  auto* q_opt = sim_cmd->add_option("--q", sim_q,
                                    "block multipliers (0 = iid arm), comma separated");
  sim_cmd->add_option("--types", sim_types, "band types");
  auto* target_opt = sim_cmd->add_option("--target", sim_target, "skill | expected | relative");
  auto* r_opt = sim_cmd->add_option("--R", grid.n_replications, "replications per cell");
  auto* b_opt = sim_cmd->add_option("--B", grid.n_bootstrap, "bootstrap replicates");
  sim_cmd->add_option("--alpha", grid.alpha, "1 - confidence level (default 0.1)");
  sim_cmd->add_option("--mean", grid.mean_value, "stationary mean of every score (default 10)");
  sim_cmd->add_option("--burn-in", grid.burn_in, "burn-in steps (default 100)");
  sim_cmd->add_option("--seed", grid.seed, "RNG seed (default 0)");
  sim_cmd->add_flag("--include-highdim", sim_highdim,
                    "append the runtime-heavy P = 100, 400 arms");
  sim_cmd->add_option("--out", sim_out, "output CSV path (JSON sidecar added)")->required();

  // ---- asymptotics ----
  auto* asym_cmd = app.add_subcommand("asymptotics",
                                      "equicoordinate quantiles, relative widths and coverages");
  std::string asym_j = "1:25";
  std::string asym_rho = "0,0.3,0.6";
  double asym_alpha = 0.1;
  std::size_t asym_draws = 2'000'000;
  std::uint64_t asym_seed = 0;
  std::string asym_out;
  asym_cmd->add_option("--J", asym_j, "dimensions, a:b range or comma list (default 1:25)");
  asym_cmd->add_option("--rho", asym_rho, "equicorrelations in [0,1), comma separated");
  asym_cmd->add_option("--alpha", asym_alpha, "1 - confidence level (default 0.1)");
  asym_cmd->add_option("--mc-draws", asym_draws, "Monte Carlo draws (default 2000000)");
  asym_cmd->add_option("--seed", asym_seed, "RNG seed (default 0)");
  asym_cmd->add_option("--out", asym_out, "output CSV path (JSON sidecar added)")->required();

  CLI11_PARSE(app, argc, argv);

  if (bands_cmd->parsed()) {
    const auto header = io::load_panel_header(header_path_for(bands_header, bands_panel));
    const ScorePanel panel = io::load_panel(bands_panel, header);
    band_config.target = parse_target(bands_target);
    band_config.band_types = parse_band_types(bands_types);
    if (bands_block_len > 0) {
      band_config.block_length = bands_block_len;
    } else {
      band_config.block_length = default_block_length(panel.n_time(), bands_block_q);
    }
    ComparisonSelector selector;
    if (band_config.target != Target::expected) {
      if (bands_pairs.empty()) {
        throw InvalidInputError("--pairs is required for skill / relative targets");
      }
      selector = parse_pairs(bands_pairs);
    }
    const BandResult result = bootstrap_bands(panel, selector, band_config);
    io::write_band_result(bands_out, result);
    print_band_table(result);
    return 0;
  }

  if (score_cmd->parsed()) {
    if (tau_opt->count() > 0) score_tau = tau_value;
    const auto header =
        io::load_panel_header(header_path_for(score_header, score_forecasts_path));
    const auto rule = io::parse_scoring_rule(score_rule, score_tau);
    std::vector<std::string> aggregate;
    if (!score_aggregate.empty()) aggregate = split_list(score_aggregate);
    const ScorePanel panel = io::score_forecasts(score_forecasts_path, header, rule, aggregate);
    io::write_panel(score_out, io::json_sidecar_path(score_out), panel);
    std::printf("wrote %zu x %zu panel to %s\n", panel.n_time(), panel.n_cols(),
                score_out.c_str());
    return 0;
  }

  if (sim_cmd->parsed()) {
    if (!sim_preset.empty()) {
      // Presets fill any grid field not given explicitly on the command line.
      struct Preset {
        const char *a, *v, *p, *n, *q, *target;
        std::size_t replications, bootstrap;
      };
      Preset preset{};
      if (sim_preset == "appendix-e-small") {
        preset = {"0,0.6", "0", "2,5", "400", "0,3", "skill", 200, 2000};
      } else if (sim_preset == "appendix-e-indep") {
        preset = {"0", "0", "2,5,25", "400", "0", "skill", 1000, 4000};
      } else if (sim_preset == "appendix-e-block") {
        preset = {"0.6", "0", "2,5,25", "400", "3", "skill", 1000, 4000};
      } else if (sim_preset == "appendix-e-es") {
        preset = {"0", "0.6", "5", "400", "0", "expected", 1000, 4000};
      } else {
        throw InvalidInputError("unknown preset '" + sim_preset + "'");
      }
      if (a_opt->count() == 0) sim_a = preset.a;
      if (v_opt->count() == 0) sim_v = preset.v;
      if (p_opt->count() == 0) sim_p = preset.p;
      if (n_opt->count() == 0) sim_n = preset.n;
      if (q_opt->count() == 0) sim_q = preset.q;
      if (target_opt->count() == 0) sim_target = preset.target;
      if (r_opt->count() == 0) grid.n_replications = preset.replications;
      if (b_opt->count() == 0) grid.n_bootstrap = preset.bootstrap;
    }
    grid.ar_coeffs = parse_double_list(sim_a, "--a");
    grid.error_correlations = parse_double_list(sim_v, "--v");
    grid.dimensions = parse_size_list(sim_p, "--P");
    grid.sample_sizes = parse_size_list(sim_n, "--N");
    const auto q_values = parse_size_list(sim_q, "--q");
    grid.block_multipliers.clear();
    for (const auto q : q_values) grid.block_multipliers.push_back(static_cast<int>(q));
    grid.band_types = parse_band_types(sim_types);
    grid.target = parse_target(sim_target);
    if (sim_highdim) {
      grid.dimensions.push_back(100);
      grid.dimensions.push_back(400);
    }
    const auto cells = run_coverage_experiment(grid);
    io::write_coverage_cells(sim_out, cells, grid);
    std::printf("wrote %zu coverage cells to %s\n", cells.size(), sim_out.c_str());
    return 0;
  }

  if (asym_cmd->parsed()) {
    const auto dims = parse_range_or_list(asym_j, "--J");
    const auto rhos = parse_double_list(asym_rho, "--rho");
    const double z_pointwise = normal_quantile(1.0 - asym_alpha / 2.0);
    std::vector<io::AsymptoticsRow> rows;
    for (const double rho : rhos) {
      const std::size_t j_max = *std::max_element(dims.begin(), dims.end());
      EquicorrSpec curve_spec{j_max, rho, asym_alpha, asym_draws, asym_seed};
      const auto pointwise_curve = pointwise_coverage_curve(curve_spec);
      const auto bonferroni_curve = bonferroni_coverage_curve(curve_spec);
      for (const std::size_t j : dims) {
        EquicorrSpec spec{j, rho, asym_alpha, asym_draws, asym_seed};
        io::AsymptoticsRow row;
        row.dimension = j;
        row.rho = rho;
        row.alpha = asym_alpha;
        row.supt_quantile = equicoordinate_quantile(spec);
        row.pointwise_scaling = z_pointwise;
        row.bonferroni_scaling =
            normal_quantile(1.0 - asym_alpha / (2.0 * static_cast<double>(j)));
        row.width_supt_vs_pointwise = row.supt_quantile / z_pointwise;
        row.width_bonf_vs_supt = row.bonferroni_scaling / row.supt_quantile;
        row.pointwise_coverage = pointwise_curve[j - 1];
        row.bonferroni_coverage = bonferroni_curve[j - 1];
        rows.push_back(row);
      }
    }
    io::write_asymptotics_table(asym_out, rows, asym_draws, asym_seed);
    std::printf("wrote %zu rows to %s\n", rows.size(), asym_out.c_str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const scorebands::Error& err) {
    std::cerr << "error: " << err.category() << ": " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: internal: " << err.what() << '\n';
    return 3;
  }
}
