#include "flapkin/material.hpp"

#include "flapkin/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace flapkin {

double mooney_rivlin_uniaxial(double stretch, double c10, double c01) {
  if (!(stretch > 0.0)) throw Error(ErrorCode::NonPositiveStretch, fmt::format("stretch ratio {} is not positive", stretch));
  return 2.0 * (stretch - 1.0 / (stretch * stretch)) * (c10 + c01 / stretch);
}

double mooney_rivlin_uniaxial(double stretch, const MaterialSpec& mat) {
  if (!mat.c10 || !mat.c01) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("material '{}' has no Mooney-Rivlin constants", mat.name));
  }
  return mooney_rivlin_uniaxial(stretch, *mat.c10, *mat.c01);
}

StrainCheck strain_budget_check(double strain_percent, const MaterialSpec& mat, double safety_factor) {
  if (!(strain_percent >= 0.0)) throw Error(ErrorCode::InvalidArgument, "strain must be non-negative");
  if (!(safety_factor >= 1.0)) throw Error(ErrorCode::InvalidArgument, "safety factor must be at least 1");
  const double demand = strain_percent * safety_factor;
  return {demand <= mat.break_min, mat.break_min - demand};
}

namespace {

std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

MaterialDatabase::MaterialDatabase(std::vector<MaterialSpec> materials) : materials_(std::move(materials)) {}

const MaterialSpec& MaterialDatabase::find(std::string_view name) const {
  const std::string key = normalize(name);
  for (const auto& m : materials_) {
    if (normalize(m.name) == key) return m;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown material '{}'", name));
}

MaterialDatabase parse_materials(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "material database must be an object keyed by name");
  std::vector<MaterialSpec> out;
  auto range = [](const nlohmann::json& j, const std::string& where, double& lo, double& hi) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
      throw Error(ErrorCode::SchemaError, where + ": expected [min, max]");
    }
    lo = j[0].get<double>();
    hi = j[1].get<double>();
    if (lo > hi) throw Error(ErrorCode::SchemaError, where + ": min exceeds max");
  };
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string where = it.key();
    const auto& j = it.value();
    if (!j.is_object()) throw Error(ErrorCode::SchemaError, where + ": expected an object");
    MaterialSpec m;
    m.name = it.key();
    if (!j.contains("shore_a") || !j.contains("elongation_at_break")) {
      throw Error(ErrorCode::SchemaError, where + ": needs shore_a and elongation_at_break");
    }
    range(j["shore_a"], where + ".shore_a", m.shore_min, m.shore_max);
    range(j["elongation_at_break"], where + ".elongation_at_break", m.break_min, m.break_max);
    auto number = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key)) return std::nullopt;
      if (!j[key].is_number()) throw Error(ErrorCode::SchemaError, fmt::format("{}.{}: expected a number", where, key));
      return j[key].get<double>();
    };
    m.c10 = number("c10_mpa");
    m.c01 = number("c01_mpa");
    m.poisson = number("poisson");
    if (m.poisson && !(*m.poisson > 0.0 && *m.poisson <= 0.5)) {
      throw Error(ErrorCode::SchemaError, where + ".poisson: must lie in (0, 0.5]");
    }
    out.push_back(std::move(m));
  }
  return MaterialDatabase(std::move(out));
}

MaterialDatabase load_materials(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_materials(ss.str());
}

MaterialDatabase builtin_materials() {
  return MaterialDatabase({
      {"FLX9850", 50, 55, 170, 210, std::nullopt, std::nullopt, std::nullopt},
      // Rubber constants used for the hinge simulations: -0.337 kPa = -0.000337 MPa.
      {"FLX9870", 60, 70, 120, 140, 0.3339, -0.000337, 0.4999},
      {"FLX9885", 80, 85, 70, 90, std::nullopt, std::nullopt, std::nullopt},
  });
}

}  // namespace flapkin
