#include "catch_amalgamated.hpp"
#include "vesp/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

using namespace vesp;

TEST_CASE("default configuration matches the documented operating point") {
  SystemConfig cfg;
  CHECK(cfg.process.sigma_va == 0.01);
  CHECK(cfg.process.sigma_vw == 0.01);
  CHECK(cfg.measurement.sigma_nx == 0.25);
  CHECK(cfg.measurement.sigma_ny == 0.25);
  CHECK(cfg.measurement.sigma_ntheta == 0.25);
  CHECK(cfg.ut.alpha == 1e-3);
  CHECK(cfg.ut.beta == 2.0);
  CHECK(std::isnan(cfg.ut.kappa));
  CHECK(cfg.init_v == 8.0);
  CHECK(cfg.champ.prior.mu_len == 50.0);
  CHECK(cfg.champ.prior.sigma_len == 60.0);
  CHECK(cfg.champ.prior.min_len == 25);
  CHECK(cfg.champ.likelihood.sigma_lik == 0.45);
  CHECK(cfg.geometry.ring_radius == 32.0);
  CHECK(cfg.geometry.leg_length == 88.0);
  CHECK(cfg.geometry.transition_length == 24.0);
  CHECK(cfg.route.cruise == 8.0);
  CHECK(cfg.route.dt == 0.1);
  CHECK(cfg.horizon == 2.0);
  CHECK(cfg.use_filter);
  CHECK(cfg.burn_in == 20);
}

TEST_CASE("key=value text overrides individual fields") {
  const std::string text =
      "process.sigma_va = 0.04\n"
      "measurement.sigma_ntheta=0.09\n"
      "ut.kappa = 0\n"
      "filter.init_v = 12.5\n"
      "prior.min_len = 30\n"
      "likelihood.sigma_lik = 0.5\n"
      "geometry.ring_radius = 15\n"
      "route.entry_leg = 1\n"
      "route.exit_leg = 3\n"
      "pipeline.horizon = 1.5\n"
      "pipeline.use_filter = false\n"
      "metrics.burn_in = 0\n";
  const auto cfg = parse_config_text(text);
  CHECK(cfg.process.sigma_va == 0.04);
  CHECK(cfg.process.sigma_vw == 0.01);  // untouched default
  CHECK(cfg.measurement.sigma_ntheta == 0.09);
  CHECK(cfg.ut.kappa == 0.0);
  CHECK(cfg.init_v == 12.5);
  CHECK(cfg.champ.prior.min_len == 30);
  CHECK(cfg.champ.likelihood.sigma_lik == 0.5);
  CHECK(cfg.geometry.ring_radius == 15.0);
  CHECK(cfg.route.entry_leg == 1);
  CHECK(cfg.route.exit_leg == 3);
  CHECK(cfg.horizon == 1.5);
  CHECK(!cfg.use_filter);
  CHECK(cfg.burn_in == 0);
}

TEST_CASE("comments, blank lines and inline comments are ignored") {
  const std::string text =
      "# full line comment\n"
      "\n"
      "   \t  \n"
      "route.cruise = 6.0   # trailing note\n"
      "# another\n";
  const auto cfg = parse_config_text(text);
  CHECK(cfg.route.cruise == 6.0);
}

TEST_CASE("boolean values accept word and digit forms") {
  CHECK(parse_config_text("pipeline.use_filter=true").use_filter);
  CHECK(parse_config_text("pipeline.use_filter=1").use_filter);
  CHECK(!parse_config_text("pipeline.use_filter=false").use_filter);
  CHECK(!parse_config_text("pipeline.use_filter=0").use_filter);
  CHECK_THROWS_AS(parse_config_text("pipeline.use_filter=yes"), ConfigError);
}

TEST_CASE("config errors carry enough context to fix the file") {
  SECTION("unknown key") {
    CHECK_THROWS_MATCHES(parse_config_text("filtre.init_v=8"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("unknown config key: filtre.init_v")));
  }
  SECTION("malformed number") {
    CHECK_THROWS_MATCHES(
        parse_config_text("route.cruise=fast"), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("route.cruise")));
  }
  SECTION("non-integer for integer key") {
    CHECK_THROWS_AS(parse_config_text("prior.min_len=25.5"), ConfigError);
  }
  SECTION("missing equals sign names the line") {
    const std::string text = "route.cruise=8\njust words\n";
    CHECK_THROWS_MATCHES(
        parse_config_text(text), ConfigError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("config line 2")));
  }
}

TEST_CASE("later entries and layered parses override earlier ones") {
  const auto base = parse_config_text("route.cruise=5\nroute.cruise=7\n");
  CHECK(base.route.cruise == 7.0);

  // A second pass starts from the first result.
  const auto layered = parse_config_text("route.dt=0.2", base);
  CHECK(layered.route.cruise == 7.0);
  CHECK(layered.route.dt == 0.2);
}

TEST_CASE("config files load from disk") {
  const auto path = std::filesystem::temp_directory_path() / "vesp_test_config.cfg";
  std::ofstream(path) << "geometry.ring_radius = 20\nroute.exit_leg = 1\n";
  const auto cfg = load_config(path.string());
  CHECK(cfg.geometry.ring_radius == 20.0);
  CHECK(cfg.route.exit_leg == 1);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}
