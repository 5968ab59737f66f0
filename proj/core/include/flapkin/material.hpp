#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flapkin {

struct MaterialSpec {
  std::string name;
  double shore_min = 0.0;  ///< Shore A
  double shore_max = 0.0;
  double break_min = 0.0;  ///< elongation at break, %
  double break_max = 0.0;
  std::optional<double> c10;      ///< MPa
  std::optional<double> c01;      ///< MPa
  std::optional<double> poisson;
};

/// Incompressible uniaxial nominal stress 2 (l - l^-2) (C10 + C01 / l), MPa.
/// Throws NonPositiveStretch.
double mooney_rivlin_uniaxial(double stretch, double c10, double c01);
/// Throws InvalidArgument if the material has no Mooney-Rivlin constants.
double mooney_rivlin_uniaxial(double stretch, const MaterialSpec& mat);

struct StrainCheck {
  bool pass = false;
  double margin = 0.0;  ///< percentage points: min break - strain * factor
};

/// Throws InvalidArgument for negative strain or a factor below 1.
StrainCheck strain_budget_check(double strain_percent, const MaterialSpec& mat, double safety_factor = 1.0);

class MaterialDatabase {
 public:
  MaterialDatabase() = default;
  explicit MaterialDatabase(std::vector<MaterialSpec> materials);

  /// Case-insensitive, ignores spaces ("FLX 9870" == "flx9870"). Throws
  /// InvalidArgument when absent.
  const MaterialSpec& find(std::string_view name) const;
  const std::vector<MaterialSpec>& materials() const noexcept { return materials_; }

 private:
  std::vector<MaterialSpec> materials_;
};

/// JSON object keyed by material name. Throws SyntaxError / SchemaError.
MaterialDatabase parse_materials(std::string_view json);
MaterialDatabase load_materials(const std::filesystem::path& path);

/// The three hinge materials, compiled in.
MaterialDatabase builtin_materials();

}  // namespace flapkin
