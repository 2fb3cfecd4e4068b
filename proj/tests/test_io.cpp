#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "scorebands/io.hpp"
#include "scorebands/rng.hpp"

using namespace scorebands;
using Catch::Approx;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("scorebands_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int value = 0;
    return value;
  }
  fs::path file(const std::string& name) const { return path / name; }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

io::PanelHeader two_method_header() {
  io::PanelHeader header;
  header.dims = {DimensionSpec{"method", {"tvp", "const"}, true}};
  return header;
}

}  // namespace

TEST_CASE("panel header round trip") {
  TempDir dir;
  io::PanelHeader header;
  header.dims = {DimensionSpec{"horizon", {"1", "2"}, false},
                 DimensionSpec{"method", {"a", "b"}, true}};
  io::write_panel_header(dir.file("h.json"), header);
  const auto loaded = io::load_panel_header(dir.file("h.json"));
  REQUIRE(loaded.dims.size() == 2);
  CHECK(loaded.dims[0].name == "horizon");
  CHECK(loaded.dims[0].labels == std::vector<std::string>{"1", "2"});
  CHECK_FALSE(loaded.dims[0].is_method_axis);
  CHECK(loaded.dims[1].is_method_axis);
}

TEST_CASE("load a small panel") {
  TempDir dir;
  write_file(dir.file("p.csv"),
             "time,method,value\n"
             "0,tvp,1.5\n"
             "0,const,2.5\n"
             "1,tvp,3.5\n"
             "1,const,4.5\n");
  const ScorePanel panel = io::load_panel(dir.file("p.csv"), two_method_header());
  CHECK(panel.n_time() == 2);
  CHECK(panel.n_cols() == 2);
  CHECK(panel.value(0, 0) == 1.5);
  CHECK(panel.value(1, 1) == 4.5);
}

TEST_CASE("integer times sort numerically") {
  TempDir dir;
  write_file(dir.file("p.csv"),
             "time,method,value\n"
             "10,tvp,1.0\n10,const,2.0\n"
             "2,tvp,3.0\n2,const,4.0\n");
  const ScorePanel panel = io::load_panel(dir.file("p.csv"), two_method_header());
  CHECK(panel.value(0, 0) == 3.0);  // time 2 comes first
  CHECK(panel.value(1, 0) == 1.0);
}

TEST_CASE("iso timestamps sort lexicographically") {
  TempDir dir;
  write_file(dir.file("p.csv"),
             "time,method,value\n"
             "2020-02-01,tvp,1.0\n2020-02-01,const,2.0\n"
             "2020-01-01,tvp,3.0\n2020-01-01,const,4.0\n");
  const ScorePanel panel = io::load_panel(dir.file("p.csv"), two_method_header());
  CHECK(panel.value(0, 0) == 3.0);
}

TEST_CASE("panel file errors") {
  TempDir dir;
  write_file(dir.file("dup.csv"),
             "time,method,value\n"
             "0,tvp,1.0\n0,tvp,9.0\n0,const,2.0\n1,tvp,3.0\n1,const,4.0\n");
  try {
    io::load_panel(dir.file("dup.csv"), two_method_header());
    FAIL("expected duplicate-key error");
  } catch (const DuplicateKeyError& err) {
    const std::string what = err.what();
    CHECK(what.find("lines 2 and 3") != std::string::npos);
  }

  write_file(dir.file("missing.csv"),
             "time,method,value\n"
             "0,tvp,1.0\n0,const,2.0\n1,tvp,3.0\n");
  try {
    io::load_panel(dir.file("missing.csv"), two_method_header());
    FAIL("expected completeness error");
  } catch (const CompletenessError& err) {
    const std::string what = err.what();
    CHECK(what.find("const") != std::string::npos);
  }

  write_file(dir.file("nan.csv"),
             "time,method,value\n"
             "0,tvp,nan\n0,const,2.0\n1,tvp,3.0\n1,const,4.0\n");
  CHECK_THROWS_AS(io::load_panel(dir.file("nan.csv"), two_method_header()), ParseError);

  write_file(dir.file("label.csv"),
             "time,method,value\n"
             "0,tvp,1.0\n0,other,2.0\n");
  CHECK_THROWS_AS(io::load_panel(dir.file("label.csv"), two_method_header()), ParseError);

  CHECK_THROWS_AS(io::load_panel(dir.file("absent.csv"), two_method_header()), ParseError);
}

TEST_CASE("write then load reproduces the panel bitwise") {
  auto gen = rng::make_stream(71, 0);
  std::vector<DimensionSpec> dims{DimensionSpec{"h", {"1", "2", "3"}, false},
                                  DimensionSpec{"method", {"a", "b"}, true}};
  std::vector<double> values(5 * 6);
  for (auto& v : values) v = rng::standard_normal(gen) * 1.0e-3 + 1.0 / 3.0;
  const ScorePanel panel(dims, 5, values);

  TempDir dir;
  io::write_panel(dir.file("p.csv"), dir.file("p.json"), panel);
  const auto header = io::load_panel_header(dir.file("p.json"));
  const ScorePanel loaded = io::load_panel(dir.file("p.csv"), header);
  REQUIRE(loaded.n_time() == panel.n_time());
  REQUIRE(loaded.n_cols() == panel.n_cols());
  CHECK(std::equal(loaded.values().begin(), loaded.values().end(), panel.values().begin()));
}

namespace {

// 3 times x 2 methods, one row per member plus one observation row.
void write_forecast_fixture(const fs::path& path, bool multivariate = false) {
  std::ofstream out(path);
  out << (multivariate ? "time,method,member,v1,v2\n" : "time,method,member,v1\n");
  const std::vector<std::string> methods{"tvp", "const"};
  for (int t = 0; t < 3; ++t) {
    for (const auto& m : methods) {
      const double base = t + (m == "tvp" ? 0.1 : 0.4);
      for (int member = 0; member < 2; ++member) {
        out << t << ',' << m << ',' << member << ',' << (base + 0.2 * member);
        if (multivariate) out << ',' << (base - 0.2 * member);
        out << '\n';
      }
      out << t << ',' << m << ",obs," << t;
      if (multivariate) out << ',' << t;
      out << '\n';
    }
  }
}

}  // namespace

TEST_CASE("scoring a forecast file with crps") {
  TempDir dir;
  write_forecast_fixture(dir.file("f.csv"));
  const ScorePanel panel =
      io::score_forecasts(dir.file("f.csv"), two_method_header(), {io::ScoringRule::Kind::crps});
  REQUIRE(panel.n_time() == 3);
  REQUIRE(panel.n_cols() == 2);
  // Two members at base, base + 0.2; obs = t.
  const EnsembleForecast ensemble = EnsembleForecast::univariate({0.1, 0.3});
  CHECK(panel.value(0, 0) == Approx(crps_ensemble(ensemble, 0.0)));
}

TEST_CASE("single-member forecasts under crps give absolute errors") {
  TempDir dir;
  std::ofstream out(dir.file("f.csv"));
  out << "time,method,member,v1\n";
  for (int t = 0; t < 3; ++t) {
    for (const std::string m : {"tvp", "const"}) {
      const double x = t + (m == "tvp" ? 0.25 : -0.5);
      out << t << ',' << m << ",0," << x << '\n';
      out << t << ',' << m << ",obs," << t << '\n';
    }
  }
  out.close();
  const ScorePanel panel =
      io::score_forecasts(dir.file("f.csv"), two_method_header(), {io::ScoringRule::Kind::crps});
  CHECK(panel.value(0, 0) == Approx(0.25));
  CHECK(panel.value(2, 1) == Approx(0.5));
}

TEST_CASE("energy on univariate input equals crps") {
  TempDir dir;
  write_forecast_fixture(dir.file("f.csv"));
  const auto crps_panel =
      io::score_forecasts(dir.file("f.csv"), two_method_header(), {io::ScoringRule::Kind::crps});
  const auto energy_panel = io::score_forecasts(dir.file("f.csv"), two_method_header(),
                                                {io::ScoringRule::Kind::energy});
  for (std::size_t t = 0; t < crps_panel.n_time(); ++t) {
    for (std::size_t p = 0; p < crps_panel.n_cols(); ++p) {
      CHECK(std::fabs(crps_panel.value(t, p) - energy_panel.value(t, p)) <= 1e-12);
    }
  }
}

TEST_CASE("aggregating squared errors over variables gives the multivariate squared error") {
  TempDir dir;
  // Two univariate-variable cells per method; se then sum over 'variable'.
  std::ofstream out(dir.file("f.csv"));
  out << "time,variable,method,member,v1\n";
  for (int t = 0; t < 3; ++t) {
    for (const std::string var : {"gdp", "cpi"}) {
      for (const std::string m : {"tvp", "const"}) {
        const double x = t + (var == "gdp" ? 0.3 : -0.2) + (m == "tvp" ? 0.0 : 0.1);
        out << t << ',' << var << ',' << m << ",0," << x << '\n';
        out << t << ',' << var << ',' << m << ",obs," << t << '\n';
      }
    }
  }
  out.close();
  io::PanelHeader header;
  header.dims = {DimensionSpec{"variable", {"gdp", "cpi"}, false},
                 DimensionSpec{"method", {"tvp", "const"}, true}};
  const auto per_variable =
      io::score_forecasts(dir.file("f.csv"), header, {io::ScoringRule::Kind::se});
  const auto aggregated = io::score_forecasts(dir.file("f.csv"), header,
                                              {io::ScoringRule::Kind::se}, {"variable"});
  REQUIRE(per_variable.n_cols() == 4);
  REQUIRE(aggregated.n_cols() == 2);
  // tvp at t: componentwise errors 0.3 and -0.2 -> mv_se = 0.13.
  CHECK(aggregated.value(0, 0) == Approx(0.13));
  CHECK(aggregated.value(0, 0) ==
        Approx(per_variable.value(0, 0) + per_variable.value(0, 2)).margin(1e-12));
}

TEST_CASE("forecast file errors") {
  TempDir dir;
  // Missing observation.
  write_file(dir.file("noobs.csv"),
             "time,method,member,v1\n"
             "0,tvp,0,1.0\n0,const,0,1.0\n0,const,obs,0.5\n"
             "1,tvp,0,1.0\n1,tvp,obs,0.5\n1,const,0,1.0\n1,const,obs,0.5\n");
  CHECK_THROWS_AS(io::score_forecasts(dir.file("noobs.csv"), two_method_header(),
                                      {io::ScoringRule::Kind::crps}),
                  CompletenessError);

  // Duplicate observation.
  write_file(dir.file("twoobs.csv"),
             "time,method,member,v1\n"
             "0,tvp,0,1.0\n0,tvp,obs,0.5\n0,tvp,obs,0.6\n0,const,0,1.0\n0,const,obs,0.5\n"
             "1,tvp,0,1.0\n1,tvp,obs,0.5\n1,const,0,1.0\n1,const,obs,0.5\n");
  CHECK_THROWS_AS(io::score_forecasts(dir.file("twoobs.csv"), two_method_header(),
                                      {io::ScoringRule::Kind::crps}),
                  DuplicateKeyError);

  // se needs a single member.
  write_file(dir.file("two_members.csv"),
             "time,method,member,v1\n"
             "0,tvp,0,1.0\n0,tvp,1,2.0\n0,tvp,obs,0.5\n0,const,0,1.0\n0,const,obs,0.5\n"
             "1,tvp,0,1.0\n1,tvp,obs,0.5\n1,const,0,1.0\n1,const,obs,0.5\n");
  CHECK_THROWS_AS(io::score_forecasts(dir.file("two_members.csv"), two_method_header(),
                                      {io::ScoringRule::Kind::se}),
                  InvalidInputError);

  // Aggregating the method axis is rejected.
  TempDir dir2;
  write_forecast_fixture(dir2.file("f.csv"));
  CHECK_THROWS_AS(io::score_forecasts(dir2.file("f.csv"), two_method_header(),
                                      {io::ScoringRule::Kind::crps}, {"method"}),
                  InvalidInputError);
}

TEST_CASE("scoring rule parsing") {
  CHECK(io::parse_scoring_rule("se", {}).kind == io::ScoringRule::Kind::se);
  CHECK(io::parse_scoring_rule("qs", 0.9).tau == 0.9);
  CHECK_THROWS_AS(io::parse_scoring_rule("qs", {}), InvalidInputError);
  CHECK_THROWS_AS(io::parse_scoring_rule("nope", {}), InvalidInputError);
}

TEST_CASE("band result files") {
  TempDir dir;
  BandResult result;
  result.target = Target::skill;
  result.alpha = 0.1;
  result.n_replicates = 100;
  result.block_length = 3;
  result.n_entries = 2;
  result.n_time = 40;
  result.entry_labels = {"a_vs_b/h1", "a_vs_b/h2"};
  result.estimates = {0.05, -0.02};
  result.sigma_hat = {0.01, 0.02};
  BandResult::Band band;
  band.type = BandType::supt;
  band.scaling = 2.0;
  band.lower = {0.03, -0.06};
  band.upper = {0.07, 0.02};
  result.bands.push_back(band);

  io::write_band_result(dir.file("bands.csv"), result);
  std::ifstream in(dir.file("bands.csv"));
  std::string header_line;
  std::getline(in, header_line);
  CHECK(header_line == "entry,label,estimate,sigma,supt_lower,supt_upper,supt_covers_zero");
  std::string row;
  std::getline(in, row);
  CHECK(row.find("a_vs_b/h1") != std::string::npos);
  CHECK(row.find("false") != std::string::npos);
  std::getline(in, row);
  CHECK(row.find("true") != std::string::npos);

  CHECK(std::filesystem::exists(dir.file("bands.json")));
}
