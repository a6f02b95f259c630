#include <gtest/gtest.h>

#include "hilsim/cli.hpp"
#include "hilsim/config.hpp"

using namespace hilsim;
using config::Config;
using config::ConfigError;

TEST(Config, ParsesSectionsListsAndComments) {
  const auto c = Config::parse(
      "# header\nschema_version = 1\n[coil]\nside_mm = 840.4  # trailing\nturns = 24\n"
      "[run]\nmethods = lms, convex\n",
      "t");
  EXPECT_EQ(c.get_double("coil", "side_mm", 0), 840.4);
  EXPECT_EQ(c.get_long("coil", "turns", 0), 24);
  EXPECT_EQ(c.get_strings("run", "methods", {}), (std::vector<std::string>{"lms", "convex"}));
  EXPECT_EQ(c.get_double("coil", "current_a", 2.5), 2.5);
  EXPECT_TRUE(c.has_section("coil"));
  EXPECT_FALSE(c.has("coil", "current_a"));
}

TEST(Config, RejectsUnknownKeysWithLocation) {
  try {
    Config::parse("schema_version = 1\n[coil]\nside_m = 1\n", "file.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("file.cfg:3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(Config::parse("schema_version = 1\n[nosuch]\n", "t"), ConfigError);
  EXPECT_THROW(Config::parse("[coil]\nturns = 2\n", "t"), ConfigError);  // no schema version
  EXPECT_THROW(Config::parse("schema_version = 2\n", "t"), ConfigError);
  EXPECT_THROW(Config::parse("schema_version = 1\n[coil]\nturns = 2\nturns = 3\n", "t"), ConfigError);
  EXPECT_THROW(Config::parse("schema_version = 1\n[coil]\nturns\n", "t"), ConfigError);
}

TEST(Config, TypeErrorsCarryLocation) {
  const auto c = Config::parse("schema_version = 1\n[coil]\nturns = many\n", "x.cfg");
  try {
    c.get_long("coil", "turns", 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.cfg:3:"), std::string::npos) << e.what();
  }
}

TEST(Config, MergeAndSetOverride) {
  auto a = Config::parse("schema_version = 1\n[lms]\nmu = 0.1\n", "a");
  a.merge(Config::parse("schema_version = 1\n[lms]\nmu = 0.2\n", "b"));
  EXPECT_EQ(a.get_double("lms", "mu", 0), 0.2);
  a.set("lms", "mu", "0.3");
  EXPECT_EQ(a.get_double("lms", "mu", 0), 0.3);
  EXPECT_THROW(a.set("lms", "nu", "1"), ConfigError);
}

TEST(Presets, AllShippedPresetsBuildScenarios) {
  const auto names = config::preset_names();
  for (const char* want : {"table2", "table4-0", "table4-10db", "table4-30db", "table7-up", "table7-down", "location"})
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  for (const auto& n : names) {
    const auto c = config::load_preset(n);
    EXPECT_NO_THROW(cli::pair_from(c)) << n;
    EXPECT_NO_THROW(cli::method_params_from(c)) << n;
    EXPECT_NO_THROW(cli::sysid_from(c)) << n;
    EXPECT_NO_THROW(cli::step_from(c)) << n;
  }
  EXPECT_THROW(config::load_preset("table9"), ConfigError);
}

TEST(Presets, Table4ParameterSets) {
  const auto p30 = cli::method_params_from(config::load_preset("table4-30db"));
  EXPECT_EQ(p30.lms.mu, 0.005);
  EXPECT_EQ(p30.svs.alpha, 4.0);
  EXPECT_EQ(p30.svs.beta, 0.15);
  EXPECT_EQ(p30.atlms.m, 900.0);
  EXPECT_EQ(p30.convex.alpha, 500.0);
  EXPECT_EQ(p30.convex.beta, 0.01);
  EXPECT_EQ(p30.convex.gammaO, 0.55);
  const auto p10 = cli::method_params_from(config::load_preset("table4-10db"));
  EXPECT_EQ(p10.lms.mu, 0.01);
  EXPECT_EQ(p10.svs.alpha, 6.0);
  EXPECT_EQ(p10.atlms.beta, 0.08);
  EXPECT_EQ(p10.convex.alpha, 1000.0);
  EXPECT_EQ(cli::sysid_from(config::load_preset("table4-10db")).snrDb, 10.0);
  const auto up = cli::step_from(config::load_preset("table7-up"));
  EXPECT_EQ(up.profile.value_at(10.0), 120000.0);
  EXPECT_EQ(up.sensor.quantizationStep, 435.0);
  const auto down = cli::step_from(config::load_preset("table7-down"));
  EXPECT_EQ(down.profile.value_at(10.0), 0.0);
  EXPECT_EQ(down.model.fitK, 46.253);
}
