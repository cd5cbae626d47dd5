#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mme/config.hpp"
#include "mme/errors.hpp"

namespace mme {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

json minimal() {
  return json::parse(R"({
    "schema_version": 1,
    "model": "relativistic",
    "source": { "wavelength_m": 1.55e-6 },
    "arms_a": { "l_m": 5.0, "s_m": 1.25 }
  })");
}

std::string field_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(ParseConfig, MinimalDefaults) {
  const CampaignConfig cfg = parse_config(minimal());
  EXPECT_TRUE(std::holds_alternative<Relativistic>(cfg.setup.model));
  EXPECT_EQ(cfg.setup.mode, GeometryMode::Aligned);
  EXPECT_EQ(cfg.setup.arms_b.l, 5.0);
  EXPECT_EQ(cfg.setup.constants.c, 299'792'458.0);
  EXPECT_EQ(cfg.events_per_point, 1'000'000u);
  ASSERT_EQ(cfg.stages.size(), 2u);
  EXPECT_EQ(cfg.stages[1], kPi / 2.0);
  EXPECT_TRUE(cfg.calibrate_trim);
}

TEST(ParseConfig, UnknownFieldsRejectedWithPath) {
  json doc = minimal();
  doc["colour"] = "blue";
  EXPECT_EQ(field_of(doc), "colour");
  doc = minimal();
  doc["arms_a"]["width_m"] = 1.0;
  EXPECT_EQ(field_of(doc), "arms_a.width_m");
}

TEST(ParseConfig, FieldErrors) {
  json doc = minimal();
  doc["schema_version"] = 2;
  EXPECT_EQ(field_of(doc), "schema_version");

  doc = minimal();
  doc["model"] = "preferred_frame";
  EXPECT_EQ(field_of(doc), "wind");

  doc["wind"] = {{"speed_m_s", 3.5e8}};
  EXPECT_EQ(field_of(doc), "wind.speed_m_s");

  doc = minimal();
  doc["arms_a"]["s_m"] = 6.0;
  EXPECT_EQ(field_of(doc).rfind("arms_a", 0), 0u);

  doc = minimal();
  doc["mode"] = "projected";
  EXPECT_EQ(field_of(doc), "site");

  doc = minimal();
  doc["source"]["omega_a_rad_s"] = 1.0;
  EXPECT_EQ(field_of(doc), "source.wavelength_m");

  doc = minimal();
  doc["events_per_point"] = -5;
  EXPECT_EQ(field_of(doc), "events_per_point");

  doc = minimal();
  doc["sidereal_times_h"] = {0.0};
  doc["sidereal_samples"] = 4;
  EXPECT_EQ(field_of(doc), "sidereal_samples");

  doc = minimal();
  doc["chsh"] = {{"alice_deg", {0}}, {"bob_deg", {0, 1}}};
  EXPECT_EQ(field_of(doc), "chsh.alice_deg");
}

TEST(ParseConfig, SiderealSamplesAndDegrees) {
  json doc = minimal();
  doc["mode"] = "projected";
  doc["site"] = {{"latitude_deg", 47.0}, {"arm_azimuth_deg", 90.0}};
  doc["sidereal_samples"] = 24;
  doc["stages_deg"] = {0, 45, 90};
  const CampaignConfig cfg = parse_config(doc);
  ASSERT_EQ(cfg.sidereal_times.size(), 24u);
  EXPECT_EQ(cfg.sidereal_times[0], 0.0);
  EXPECT_EQ(cfg.sidereal_times[23], 23.0);
  EXPECT_NEAR(cfg.setup.site.latitude, 47.0 * kPi / 180.0, 1e-15);
  EXPECT_NEAR(cfg.stages[1], kPi / 4.0, 1e-15);
}

TEST(ParseConfig, ChshSettings) {
  json doc = minimal();
  doc["chsh"] = {{"alice_deg", {0, 90}}, {"bob_deg", {-45, 45}}, {"subtract", "e12"}};
  const CampaignConfig cfg = parse_config(doc);
  ASSERT_TRUE(cfg.chsh.has_value());
  EXPECT_EQ(cfg.chsh->sign, ChshSign::SubtractE12);
  EXPECT_NEAR(cfg.chsh->bob[0], -kPi / 4.0, 1e-15);
}

fs::path example(const char* name) { return fs::path(MME_EXAMPLES_DIR) / name; }

TEST(Presets, RotationFilesMatchBuiltInPreset) {
  const CampaignConfig file = load_config(example("rotate_preferred_frame.json"));
  const CampaignConfig preset = rotation_preset(true);
  EXPECT_EQ(file.setup.constants.c, preset.setup.constants.c);
  EXPECT_EQ(file.setup.source.omega_a, preset.setup.source.omega_a);
  EXPECT_EQ(file.setup.arms_a.l, preset.setup.arms_a.l);
  EXPECT_EQ(file.setup.arms_a.s, preset.setup.arms_a.s);
  EXPECT_EQ(file.hypothesis_wind.speed, preset.hypothesis_wind.speed);
  EXPECT_EQ(file.rng.master_seed, preset.rng.master_seed);
  EXPECT_EQ(file.events_per_point, preset.events_per_point);
}

TEST(Presets, AllExamplesParse) {
  for (const auto& entry : fs::directory_iterator(MME_EXAMPLES_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
  }
}

TEST(LoadConfig, ManifestIsUnwrapped) {
  const fs::path dir = fs::temp_directory_path() / "mme_config_test";
  fs::create_directories(dir);
  json manifest{{"kind", "run_manifest"}, {"config", minimal()}};
  manifest["config"]["events_per_point"] = 1234;
  {
    std::ofstream(dir / "m.json") << manifest.dump();
  }
  EXPECT_EQ(load_config(dir / "m.json").events_per_point, 1234u);

  { std::ofstream(dir / "bad.json") << "{ not json"; }
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace mme
