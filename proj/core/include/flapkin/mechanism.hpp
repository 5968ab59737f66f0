#pragma once

#include "flapkin/fourbar.hpp"
#include "flapkin/geometry.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flapkin {

// ---------------------------------------------------------------------------
// LinkageSpec: the file-level description. Angles are stored in degrees here
// (the I/O unit) so that parse -> write is lossless; the validated Mechanism
// works in radians.
// ---------------------------------------------------------------------------

/// Reference to a point on a body. `body == "ground"` addresses a ground pivot
/// by id; otherwise `point` is `base`, `tip` or a named point of link `body`.
struct PointRef {
  std::string body;
  std::string point;

  bool operator==(const PointRef&) const = default;
};

inline constexpr std::string_view kGround = "ground";

struct NamedPoint {
  std::string name;
  double u = 0.0;  ///< along the link axis, mm
  double v = 0.0;  ///< normal to the axis (counterclockwise side), mm

  bool operator==(const NamedPoint&) const = default;
};

/// Fixes a link rigidly to the body frame: its base sits on `pivot` and its
/// axis points at `angle_deg`.
struct GroundMount {
  std::string pivot;
  double angle_deg = 0.0;

  bool operator==(const GroundMount&) const = default;
};

struct LinkSpec {
  std::string id;
  double length = 0.0;  ///< base (0,0) to tip (length,0), mm
  std::vector<NamedPoint> points;
  std::optional<GroundMount> ground;

  bool operator==(const LinkSpec&) const = default;
};

struct PivotSpec {
  std::string id;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const PivotSpec&) const = default;
};

struct JointSpec {
  std::string id;
  PointRef a;
  PointRef b;

  bool operator==(const JointSpec&) const = default;
};

/// Crank drive: angle of the driven link = direction * phi + offset.
struct DriverSpec {
  std::string joint;
  double direction = 1.0;
  double offset_deg = 0.0;

  bool operator==(const DriverSpec&) const = default;
};

/// Gear pair between two ground-pinned links: out = ratio * in + offset.
struct GearSpec {
  std::string id;
  std::string joint_in;
  std::string joint_out;
  double ratio = 1.0;
  double offset_deg = 0.0;

  bool operator==(const GearSpec&) const = default;
};

/// value = offset + sign * wrap(angle(link) - angle(reference)); an empty
/// reference measures from the body +x axis. `mirrored` marks outputs of a
/// reflected mechanism so that they read the same as the original.
struct AngleOutputSpec {
  std::string name;
  std::string link;
  std::string reference;
  double sign = 1.0;
  double offset_deg = 0.0;
  bool mirrored = false;

  bool operator==(const AngleOutputSpec&) const = default;
};

struct PointOutputSpec {
  std::string name;
  PointRef point;

  bool operator==(const PointOutputSpec&) const = default;
};

/// Assembly circuit of the dyad whose apex is `joint`.
struct BranchSpec {
  std::string joint;
  Branch branch = Branch::Open;

  bool operator==(const BranchSpec&) const = default;
};

enum class Stage { Humerus, Radius, Fixed };

std::string_view to_string(Stage s) noexcept;
std::optional<Stage> parse_stage(std::string_view s) noexcept;

struct ParameterSpec {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  Stage stage = Stage::Fixed;

  bool operator==(const ParameterSpec&) const = default;
};

/// Symmetry conditions evaluated by the fitting constraints.
/// `centered`: ground pivot `target` lies on the body y axis.
/// `aligned_y`: point `target` (link.point) lies on the body y axis at phi = 0.
struct SymmetrySpec {
  enum class Kind { Centered, AlignedY };
  Kind kind = Kind::Centered;
  std::string target;

  bool operator==(const SymmetrySpec&) const = default;
};

struct HomePose {
  std::string link;
  double x = 0.0;
  double y = 0.0;
  double angle_deg = 0.0;

  bool operator==(const HomePose&) const = default;
};

struct LinkageSpec {
  int format_version = 1;
  std::string name;
  std::string description;
  std::vector<PivotSpec> pivots;
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;
  std::optional<DriverSpec> driver;
  std::vector<GearSpec> gears;
  std::vector<AngleOutputSpec> angle_outputs;
  std::vector<PointOutputSpec> point_outputs;
  std::vector<BranchSpec> branches;
  std::vector<ParameterSpec> parameters;
  std::vector<SymmetrySpec> symmetry;
  std::vector<HomePose> home;

  bool operator==(const LinkageSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Mechanism: validated, indexed form.
// ---------------------------------------------------------------------------

/// Where a joint attaches: a fixed ground pivot, or a point of a link.
struct BodyPoint {
  int pivot = -1;  ///< ground pivot index, or -1
  int link = -1;   ///< link index (ground links included), or -1
  int point = -1;  ///< point index within the link

  bool is_pivot() const noexcept { return pivot >= 0; }
};

/// Local point slot: base is (0,0), tip is (length,0), named points read two
/// parameters.
struct PointSlot {
  std::string name;
  int u_param = -1;
  int v_param = -1;
};

inline constexpr int kBasePoint = 0;
inline constexpr int kTipPoint = 1;

enum class AngleSource { Free, Driver, Gear };

struct LinkInfo {
  std::string id;
  int length_param = -1;
  std::vector<PointSlot> points;  ///< [0] base, [1] tip, then named points
  bool ground = false;
  int mount_pivot = -1;
  double mount_angle = 0.0;  ///< radians
  AngleSource source = AngleSource::Free;
  int unknown_offset = -1;  ///< first Newton unknown (x, y, angle) for free links
  int ground_joint = -1;    ///< pin joint for driven / geared links
};

struct JointInfo {
  std::string id;
  BodyPoint a;
  BodyPoint b;
};

struct DriverInfo {
  int joint = -1;
  int link = -1;
  double direction = 1.0;
  double offset = 0.0;  ///< radians
};

struct GearInfo {
  std::string id;
  int joint_in = -1;
  int joint_out = -1;
  int link_in = -1;
  int link_out = -1;
  double ratio = 1.0;
  double offset = 0.0;  ///< radians
};

/// One analytic assembly step: two unknown links meeting at `apex_joint`,
/// each attached to an already-known body. Arm 1 is the side whose
/// attachment joint is declared first; `side` is the branch relative to
/// the directed line from attachment 1 to attachment 2.
struct DyadStep {
  int apex_joint = -1;
  int link1 = -1;
  int link2 = -1;
  int attach_joint1 = -1;
  int attach_joint2 = -1;
  BodyPoint known1;
  BodyPoint known2;
  int link1_attach_point = -1;
  int link1_apex_point = -1;
  int link2_attach_point = -1;
  int link2_apex_point = -1;
  Side side = Side::Left;
};

struct AngleOutputInfo {
  std::string name;
  int link = -1;
  int reference = -1;  ///< -1: body +x axis
  double sign = 1.0;
  double offset = 0.0;  ///< radians
  bool mirrored = false;
};

struct PointOutputInfo {
  std::string name;
  BodyPoint point;
};

/// Ordered joint cycle; bodies[i] sits between joints[i] and joints[i+1]
/// (cyclically). Body -1 denotes the ground.
struct Loop {
  std::vector<int> joints;
  std::vector<int> bodies;
};

struct Parameter {
  std::string name;
  double value = 0.0;
};

struct SymmetryInfo {
  SymmetrySpec::Kind kind = SymmetrySpec::Kind::Centered;
  std::string target;
  BodyPoint point;
};

class Mechanism {
 public:
  /// Validates a spec; throws flapkin::Error (MissingDriver, OpenChain,
  /// NonPositiveLength, DanglingOutput, MobilityMismatch, SchemaError,
  /// InvalidSpec).
  static Mechanism validate(const LinkageSpec& spec);

  /// Spec regenerated with the current parameter values.
  LinkageSpec spec() const;
  const std::string& name() const noexcept { return spec_.name; }

  const std::vector<Loop>& loops() const noexcept { return loops_; }
  const std::vector<Parameter>& parameters() const noexcept { return params_; }
  std::map<std::string, double> parameter_map() const;
  bool has_parameter(std::string_view name) const noexcept;
  int parameter_index(std::string_view name) const;  ///< throws UnknownParameter
  double parameter(std::string_view name) const;

  /// Copy with one or more geometric scalars replaced. The result is
  /// re-checked for positive lengths.
  Mechanism with_parameter(std::string_view name, double value) const;
  Mechanism with_parameters(const std::vector<std::pair<int, double>>& updates) const;

  const std::vector<PivotSpec>& pivots() const noexcept { return spec_.pivots; }
  const std::vector<LinkInfo>& links() const noexcept { return links_; }
  const std::vector<JointInfo>& joints() const noexcept { return joints_; }
  const DriverInfo& driver() const noexcept { return driver_; }
  const std::vector<GearInfo>& gears() const noexcept { return gears_; }
  const std::vector<DyadStep>& dyads() const noexcept { return dyads_; }
  const std::vector<AngleOutputInfo>& angle_outputs() const noexcept { return angle_outputs_; }
  const std::vector<PointOutputInfo>& point_outputs() const noexcept { return point_outputs_; }
  const std::vector<SymmetryInfo>& symmetry() const noexcept { return symmetry_; }
  const std::vector<std::optional<Pose2>>& home_poses() const noexcept { return home_; }
  const std::vector<ParameterSpec>& design_parameters() const noexcept { return spec_.parameters; }

  int link_index(std::string_view id) const;   ///< -1 if absent
  int joint_index(std::string_view id) const;  ///< -1 if absent
  int angle_output_index(std::string_view name) const noexcept;
  int point_output_index(std::string_view name) const noexcept;

  /// Number of Newton unknowns (3 per free link).
  int unknown_count() const noexcept { return unknowns_; }
  /// Joints whose constraint enters the Newton residual (all but the pins
  /// of driven and geared links).
  const std::vector<int>& residual_joints() const noexcept { return residual_joints_; }

  Vec2 local_point(int link, int point) const noexcept;
  Vec2 pivot_position(int pivot) const noexcept;

 private:
  Mechanism() = default;
  void compile();
  void sync_spec_from_params();

  LinkageSpec spec_;
  std::vector<Parameter> params_;
  std::map<std::string, int, std::less<>> param_index_;
  std::vector<LinkInfo> links_;
  std::vector<JointInfo> joints_;
  DriverInfo driver_;
  std::vector<GearInfo> gears_;
  std::vector<DyadStep> dyads_;
  std::vector<AngleOutputInfo> angle_outputs_;
  std::vector<PointOutputInfo> point_outputs_;
  std::vector<SymmetryInfo> symmetry_;
  std::vector<std::optional<Pose2>> home_;
  std::vector<Loop> loops_;
  std::vector<int> residual_joints_;
  int unknowns_ = 0;
};

/// Free-function form of Mechanism::validate.
Mechanism validate_mechanism(const LinkageSpec& spec);

/// Reflects the mechanism across the body y axis (x -> -x). Branch flags flip,
/// the driver reverses and angle outputs are marked mirrored, so that the
/// reflected mechanism reproduces the same angle series with point paths
/// negated in x.
Mechanism mirror_mechanism(const Mechanism& mech);
LinkageSpec mirror_spec(const LinkageSpec& spec);

/// Both wings: the mechanism plus its mirror image, whose crank is driven
/// from the original crank through an external gear mesh (ratio -1).
/// Mirrored ids carry the prefix "L_".
Mechanism gear_coupled_twin(const Mechanism& mech);

}  // namespace flapkin
