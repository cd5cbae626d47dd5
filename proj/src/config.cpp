#include "mme/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "mme/errors.hpp"

namespace mme {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) throw ConfigError(field(key), "missing required field");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
    return d;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : (seen_.insert(key), fallback);
  }

  std::uint64_t count(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(field(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  ObjectReader object(const std::string& key) { return ObjectReader(raw(key), field(key)); }

  std::string field(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

ArmGeometry parse_arms(ObjectReader r) {
  ArmGeometry arms;
  arms.l = r.number("l_m");
  arms.s = r.number("s_m");
  arms.trim = r.number_or("trim_rad", 0.0);
  r.finish();
  return arms;
}

SourceSpec parse_source(ObjectReader r, const PhysicalConstants& consts) {
  const bool by_lambda = r.has("wavelength_m");
  const bool by_pair = r.has("wavelength_a_m") || r.has("wavelength_b_m");
  const bool by_omega = r.has("omega_a_rad_s") || r.has("omega_b_rad_s");
  if (by_lambda + by_pair + by_omega != 1) {
    throw ConfigError(r.field("wavelength_m"),
                      "give exactly one of wavelength_m, wavelength_{a,b}_m, "
                      "omega_{a,b}_rad_s");
  }
  SourceSpec src;
  auto positive = [&](const std::string& key) {
    const double v = r.number(key);
    if (!(v > 0.0)) throw ConfigError(r.field(key), "must be positive");
    return v;
  };
  if (by_lambda) {
    src = SourceSpec::from_wavelength(positive("wavelength_m"), consts);
  } else if (by_pair) {
    const double a = positive("wavelength_a_m");
    src = SourceSpec::from_wavelengths(a, positive("wavelength_b_m"), consts);
  } else {
    src.omega_a = positive("omega_a_rad_s");
    src.omega_b = positive("omega_b_rad_s");
  }
  r.finish();
  return src;
}

EtherWind parse_wind(ObjectReader r) {
  EtherWind wind;
  wind.speed = r.number("speed_m_s");
  if (r.has("direction")) {
    const auto dir = r.numbers("direction");
    if (dir.size() != 3) throw ConfigError(r.field("direction"), "expected 3 components");
    wind.direction = {dir[0], dir[1], dir[2]};
  }
  r.finish();
  return wind;
}

ChshSign parse_sign(const std::string& s, const std::string& field) {
  if (s == "e11") return ChshSign::SubtractE11;
  if (s == "e12") return ChshSign::SubtractE12;
  if (s == "e21") return ChshSign::SubtractE21;
  if (s == "e22") return ChshSign::SubtractE22;
  throw ConfigError(field, fmt::format("unknown sign pattern '{}'", s));
}

ChshSettings parse_chsh(ObjectReader r) {
  ChshSettings out;
  const auto alice = r.numbers("alice_deg");
  const auto bob = r.numbers("bob_deg");
  if (alice.size() != 2) throw ConfigError(r.field("alice_deg"), "expected 2 settings");
  if (bob.size() != 2) throw ConfigError(r.field("bob_deg"), "expected 2 settings");
  out.alice = {alice[0] * kDeg, alice[1] * kDeg};
  out.bob = {bob[0] * kDeg, bob[1] * kDeg};
  if (r.has("subtract")) out.sign = parse_sign(r.string("subtract"), r.field("subtract"));
  r.finish();
  return out;
}

}  // namespace

CampaignConfig parse_config(const json& doc) {
  ObjectReader root(doc, "");
  CampaignConfig cfg;

  const json& version = root.raw("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kConfigSchemaVersion) {
    throw ConfigError("schema_version",
                      fmt::format("expected {}", kConfigSchemaVersion));
  }

  ExperimentSetup& setup = cfg.setup;
  if (root.has("constants")) {
    auto r = root.object("constants");
    setup.constants.c = r.number("c");
    r.finish();
  }
  if (!(setup.constants.c > 0.0)) throw ConfigError("constants.c", "must be positive");

  setup.source = parse_source(root.object("source"), setup.constants);
  setup.arms_a = parse_arms(root.object("arms_a"));
  setup.arms_b = root.has("arms_b") ? parse_arms(root.object("arms_b")) : setup.arms_a;

  const std::string model = root.string("model");
  if (root.has("wind")) cfg.hypothesis_wind = parse_wind(root.object("wind"));
  if (model == "preferred_frame") {
    if (!root.has("wind")) throw ConfigError("wind", "preferred_frame model needs a wind");
    setup.model = PreferredFrame{cfg.hypothesis_wind};
  } else if (model == "relativistic") {
    setup.model = Relativistic{};
  } else {
    throw ConfigError("model", fmt::format("unknown model '{}'", model));
  }

  const std::string mode = root.has("mode") ? root.string("mode") : "aligned";
  if (mode == "aligned") {
    setup.mode = GeometryMode::Aligned;
  } else if (mode == "projected") {
    setup.mode = GeometryMode::Projected;
    if (!root.has("site")) throw ConfigError("site", "projected mode needs a site");
  } else {
    throw ConfigError("mode", fmt::format("unknown mode '{}'", mode));
  }
  if (root.has("site")) {
    auto r = root.object("site");
    setup.site.latitude = r.number("latitude_deg") * kDeg;
    setup.site.arm_azimuth = r.number_or("arm_azimuth_deg", 0.0) * kDeg;
    r.finish();
  }

  if (root.has("detector")) {
    auto r = root.object("detector");
    setup.detector.efficiency = r.number_or("efficiency", 1.0);
    setup.detector.dark_count_probability = r.number_or("dark_count_probability", 0.0);
    r.finish();
  }

  if (root.has("events_per_point")) cfg.events_per_point = root.count("events_per_point");
  if (root.has("rng")) {
    auto r = root.object("rng");
    cfg.rng.master_seed = r.count("master_seed");
    if (r.has("chunk_size")) cfg.rng.chunk_size = r.count("chunk_size");
    r.finish();
  }
  if (root.has("stages_deg")) {
    cfg.stages.clear();
    for (double d : root.numbers("stages_deg")) cfg.stages.push_back(d * kDeg);
  }

  if (root.has("sidereal_times_h") && root.has("sidereal_samples")) {
    throw ConfigError("sidereal_samples",
                      "give either sidereal_times_h or sidereal_samples");
  }
  if (root.has("sidereal_times_h")) cfg.sidereal_times = root.numbers("sidereal_times_h");
  if (root.has("sidereal_samples")) {
    const std::uint64_t n = root.count("sidereal_samples");
    if (n == 0) throw ConfigError("sidereal_samples", "must be positive");
    for (std::uint64_t i = 0; i < n; ++i) {
      cfg.sidereal_times.push_back(kSiderealDayHours * static_cast<double>(i) /
                                   static_cast<double>(n));
    }
  }

  if (root.has("chsh")) cfg.chsh = parse_chsh(root.object("chsh"));
  if (root.has("analysis")) {
    auto r = root.object("analysis");
    cfg.significance_sigma = r.number_or("significance_sigma", cfg.significance_sigma);
    cfg.target_shift = r.number_or("target_shift_rad", cfg.target_shift);
    r.finish();
  }
  cfg.calibrate_trim = root.boolean_or("calibrate_trim", true);
  root.finish();

  cfg.validate();
  return cfg;
}

json load_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot open '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", fmt::format("invalid JSON: {}", e.what()));
  }
  if (doc.is_object() && doc.value("kind", "") == "run_manifest") {
    if (!doc.contains("config")) throw ConfigError("config", "manifest has no config");
    return doc.at("config");
  }
  return doc;
}

}  // namespace mme
