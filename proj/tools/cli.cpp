#include "cli.hpp"

#include "flapkin/errors.hpp"
#include "flapkin/fitting.hpp"
#include "flapkin/gait.hpp"
#include "flapkin/material.hpp"
#include "flapkin/mechanism_io.hpp"
#include "flapkin/report_io.hpp"
#include "flapkin/sensitivity.hpp"
#include "flapkin/solver.hpp"
#include "flapkin/svg.hpp"
#include "flapkin/target.hpp"
#include "flapkin/trajectory_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace flapkin {

namespace {

namespace fs = std::filesystem;

// Thrown for bad flag combinations that CLI11 cannot express.
struct UsageError {
  std::string message;
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void emit(std::ostream& out, const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

Mechanism load(const std::string& path) { return Mechanism::validate(parse_mechanism_file(path)); }

struct Common {
  std::string mech;
  int samples = 360;
  int threads = 1;
  std::string out;
};

// ---- validate ---------------------------------------------------------------

int run_validate(const std::string& path, std::ostream& out) {
  const Mechanism m = load(path);
  out << fmt::format("ok name={} links={} joints={} loops={} dyads={} parameters={}\n", m.name(), m.links().size(),
                     m.joints().size(), m.loops().size(), m.dyads().size(), m.parameters().size());
  return 0;
}

// ---- solve ------------------------------------------------------------------

int run_solve(const Common& c, double phi_deg, std::ostream& out) {
  const Mechanism m = load(c.mech);
  const Configuration q = solve_configuration(m, deg_to_rad(phi_deg));
  nlohmann::ordered_json doc;
  doc["phi_deg"] = phi_deg;
  doc["residual_mm"] = q.residual_norm;
  doc["iterations"] = q.iterations;
  doc["links"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.links().size(); ++i) {
    doc["links"].push_back({{"id", m.links()[i].id},
                            {"x", q.poses[i].origin.x()},
                            {"y", q.poses[i].origin.y()},
                            {"angle_deg", rad_to_deg(q.poses[i].angle)}});
  }
  doc["angles_deg"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < m.angle_outputs().size(); ++i) {
    doc["angles_deg"][m.angle_outputs()[i].name] = rad_to_deg(q.angles[i]);
  }
  doc["points_mm"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < m.point_outputs().size(); ++i) {
    doc["points_mm"][m.point_outputs()[i].name] = {q.points[i].x(), q.points[i].y()};
  }
  emit(out, doc.dump(2) + "\n", c.out);
  return 0;
}

// ---- sweep / target ---------------------------------------------------------

int run_sweep(const Common& c, const std::string& mode, std::ostream& out) {
  const Mechanism m = load(c.mech);
  SweepOptions so;
  so.mode = mode == "independent" ? SweepMode::Independent : SweepMode::Continuation;
  so.threads = c.threads;
  const GaitTrajectory t = sweep_gait(m, c.samples, so);
  emit(out, format_trajectory_csv(to_table(t)), c.out);
  return 0;
}

int run_target(const Common& c, std::ostream& out) {
  emit(out, format_trajectory_csv(to_table(sample_targets(c.samples))), c.out);
  return 0;
}

// ---- optimize ---------------------------------------------------------------

struct OptimizeArgs {
  std::string targets;
  std::string stage = "all";
  std::uint64_t seed = 0;
  int multistarts = 10;
  std::string start_mode = "box";
  double spread = 0.2;
  int constraint_samples = 360;
  int max_evaluations = 200000;
  std::string order = "humerus-first";
  std::string fitted;
};

fs::path default_fitted_path(const std::string& report, const std::string& mech) {
  if (report.empty() || report == "-") {
    fs::path p(mech);
    return p.parent_path() / (p.stem().string() + ".fitted.json");
  }
  fs::path p(report);
  return p.parent_path() / (p.stem().string() + ".mechanism.json");
}

int run_optimize(const Common& c, const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
  const Mechanism m = load(c.mech);
  const TargetGait targets =
      a.targets.empty() ? sample_targets(c.samples) : targets_from_table(read_trajectory_csv(a.targets));

  OptimizeOptions o;
  o.seed = a.seed;
  o.multistarts = a.multistarts;
  o.start_mode = a.start_mode == "relative" ? StartMode::Relative : StartMode::Box;
  o.spread = a.spread;
  o.threads = c.threads;
  o.max_evaluations = a.max_evaluations;
  o.constraints.samples = a.constraint_samples;
  o.order = a.order == "radius-first" ? StageOrder::RadiusFirst : StageOrder::HumerusFirst;

  const fs::path fitted = a.fitted.empty() ? default_fitted_path(c.out, c.mech) : fs::path(a.fitted);
  std::error_code ec;
  if (fs::exists(fitted) && fs::equivalent(fitted, c.mech, ec)) {
    throw UsageError{"the fitted mechanism would overwrite the input file"};
  }

  FitReport r;
  if (a.stage == "all") {
    r = optimize_armwing(m, targets, o);
  } else {
    const FitStage st = a.stage == "humerus" ? FitStage::Humerus
                        : a.stage == "radius" ? FitStage::Radius
                                              : FitStage::All;
    r = optimize_stage(m, targets, st, o);
  }
  for (const auto& w : r.warnings) err << "warning: " << one_line(w) << "\n";
  emit(out, format_fit_report(r), c.out);
  write_mechanism_file(apply_design(m, r.design).spec(), fitted);
  return 0;
}

// ---- sensitivity ------------------------------------------------------------

std::vector<double> parse_range(const std::string& s) {
  std::vector<double> v;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = s.find(':', start);
    const std::string part = s.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    char* end = nullptr;
    const double x = std::strtod(part.c_str(), &end);
    if (part.empty() || end != part.c_str() + part.size()) throw UsageError{"--range expects LO:HI:STEP"};
    v.push_back(x);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (v.size() != 3) throw UsageError{"--range expects LO:HI:STEP"};
  return v;
}

struct SensitivityArgs {
  std::string param;
  std::string range = "0.9:1.1:0.025";
  bool rank = false;
  double delta = 0.025;
  std::string svg;
  bool elbow = false;
};

int run_sensitivity(const Common& c, const SensitivityArgs& a, std::ostream& out) {
  const Mechanism m = load(c.mech);
  SensitivityOptions so;
  so.threads = c.threads;
  if (a.rank) {
    if (!a.param.empty()) throw UsageError{"--rank and --param are exclusive"};
    emit(out, format_ranking_csv(sensitivity_rank(m, a.delta, c.samples, so)), c.out);
    return 0;
  }
  if (a.param.empty()) throw UsageError{"sensitivity needs --param NAME or --rank"};
  const auto r = parse_range(a.range);
  const SensitivityResult res = sensitivity_sweep(m, a.param, scale_range(r[0], r[1], r[2]), c.samples, so);
  emit(out, format_sensitivity_csv(res), c.out);
  if (!a.svg.empty()) write_svg(sensitivity_plot(res, a.elbow), a.svg);
  return 0;
}

// ---- material ---------------------------------------------------------------

struct MaterialArgs {
  bool check = false;
  bool list = false;
  std::optional<double> strain;
  std::optional<double> stretch;
  std::string material = "FLX9870";
  double safety_factor = 1.0;
  std::string db;
};

MaterialDatabase material_db(const std::string& flag) {
  if (!flag.empty()) return load_materials(flag);
  if (const char* env = std::getenv("FLAPKIN_MATERIALS"); env && *env) return load_materials(env);
  return builtin_materials();
}

int run_material(const MaterialArgs& a, std::ostream& out) {
  const MaterialDatabase db = material_db(a.db);
  if (a.list) {
    for (const auto& m : db.materials()) {
      out << fmt::format("{} shore_a={}-{} break={}-{}%\n", m.name, m.shore_min, m.shore_max, m.break_min,
                         m.break_max);
    }
    return 0;
  }
  const MaterialSpec& mat = db.find(a.material);
  if (a.check) {
    if (!a.strain) throw UsageError{"--check needs --strain PERCENT"};
    const StrainCheck r = strain_budget_check(*a.strain, mat, a.safety_factor);
    out << fmt::format("material={} strain={} factor={} break_min={} margin={} result={}\n", mat.name, *a.strain,
                       a.safety_factor, mat.break_min, r.margin, r.pass ? "pass" : "fail");
    return 0;
  }
  if (a.stretch) {
    out << fmt::format("material={} stretch={} stress_mpa={:.9g}\n", mat.name, *a.stretch,
                       mooney_rivlin_uniaxial(*a.stretch, mat));
    return 0;
  }
  throw UsageError{"material needs --check, --stretch or --list"};
}

// ---- plot -------------------------------------------------------------------

struct PlotArgs {
  std::string trajectory;
  std::string kind = "angles";
  bool with_targets = false;
};

PlotSpec table_plot(const TrajectoryTable& t, const std::string& kind) {
  PlotSpec p;
  if (kind == "path") {
    p.title = "Wingtip path";
    p.x_label = "x (mm)";
    p.y_label = "y (mm)";
    p.equal_aspect = true;
    p.series.push_back({"wingtip", t.tip_x, t.tip_y, "#1f77b4", false});
    return p;
  }
  p.title = "Joint angles";
  p.x_label = "crank phase (deg)";
  p.y_label = "angle (deg)";
  p.series.push_back({"shoulder", t.phi_deg, t.theta_s_deg, "#1f77b4", false});
  p.series.push_back({"elbow", t.phi_deg, t.theta_e_deg, "#d62728", false});
  return p;
}

int run_plot(const Common& c, const PlotArgs& a, std::ostream& out) {
  if (c.mech.empty() == a.trajectory.empty()) throw UsageError{"plot needs exactly one of --mech or --trajectory"};
  PlotSpec spec;
  if (!a.trajectory.empty()) {
    spec = table_plot(read_trajectory_csv(a.trajectory), a.kind);
  } else {
    const GaitTrajectory t = sweep_gait(load(c.mech), c.samples);
    if (a.kind == "path") {
      spec = table_plot(to_table(t), a.kind);
    } else {
      const TargetGait g = sample_targets(c.samples);
      spec = gait_angle_plot(t, a.with_targets ? &g : nullptr);
    }
  }
  emit(out, render_svg(spec), c.out);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinematic design toolkit for crank-driven flapping-wing linkages", "flapkin"};
  app.require_subcommand(1);

  Common c;
  auto add_mech = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--mech", c.mech, "mechanism file (JSON)");
    if (required) o->required();
  };
  auto add_samples = [&](CLI::App* s) {
    s->add_option("--samples,-n", c.samples, "samples per wingbeat")->check(CLI::PositiveNumber);
  };
  auto add_out = [&](CLI::App* s, const char* what) { s->add_option("--out,-o", c.out, what); };
  auto add_threads = [&](CLI::App* s) {
    s->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a mechanism file");
  validate->add_option("file", validate_path, "mechanism file")->required();

  double phi_deg = 0.0;
  auto* solve = app.add_subcommand("solve", "assemble at one crank angle");
  add_mech(solve, true);
  solve->add_option("--phi", phi_deg, "crank phase (deg)");
  add_out(solve, "JSON output (default stdout)");

  std::string mode = "continuation";
  auto* sweep = app.add_subcommand("sweep", "trajectory over one wingbeat as CSV");
  add_mech(sweep, true);
  add_samples(sweep);
  add_threads(sweep);
  add_out(sweep, "CSV output (default stdout)");
  sweep->add_option("--mode", mode, "continuation or independent")
      ->check(CLI::IsMember({"continuation", "independent"}));

  auto* target = app.add_subcommand("target", "desired gait as CSV");
  add_samples(target);
  add_out(target, "CSV output (default stdout)");

  OptimizeArgs oa;
  auto* optimize = app.add_subcommand("optimize", "fit dimensions to the target gait");
  add_mech(optimize, true);
  add_samples(optimize);
  add_threads(optimize);
  add_out(optimize, "report JSON (default stdout)");
  optimize->add_option("--targets", oa.targets, "target trajectory CSV (default: built-in gait)");
  optimize->add_option("--stage", oa.stage, "humerus, radius, all (staged) or joint")
      ->check(CLI::IsMember({"humerus", "radius", "all", "joint"}));
  optimize->add_option("--seed", oa.seed, "random seed");
  optimize->add_option("--multistarts", oa.multistarts, "starts including the nominal")->check(CLI::PositiveNumber);
  optimize->add_option("--start-mode", oa.start_mode, "box or relative")->check(CLI::IsMember({"box", "relative"}));
  optimize->add_option("--spread", oa.spread, "relative start spread")->check(CLI::Range(0.0, 1.0));
  optimize->add_option("--constraint-samples", oa.constraint_samples, "grid for constraint checks")
      ->check(CLI::PositiveNumber);
  optimize->add_option("--max-evaluations", oa.max_evaluations, "evaluation budget per start")
      ->check(CLI::PositiveNumber);
  optimize->add_option("--order", oa.order, "humerus-first or radius-first")
      ->check(CLI::IsMember({"humerus-first", "radius-first"}));
  optimize->add_option("--fitted", oa.fitted, "where to write the fitted mechanism");

  SensitivityArgs sa;
  auto* sensitivity = app.add_subcommand("sensitivity", "wingtip sensitivity to one or all parameters");
  add_mech(sensitivity, true);
  add_samples(sensitivity);
  add_threads(sensitivity);
  add_out(sensitivity, "CSV output (default stdout)");
  sensitivity->add_option("--param", sa.param, "parameter name, e.g. coupler4.length");
  sensitivity->add_option("--range", sa.range, "scales LO:HI:STEP");
  sensitivity->add_flag("--rank", sa.rank, "rank every parameter");
  sensitivity->add_option("--delta", sa.delta, "relative step for --rank");
  sensitivity->add_option("--svg", sa.svg, "path family plot");
  sensitivity->add_flag("--elbow", sa.elbow, "plot the elbow path instead of the wingtip");

  MaterialArgs ma;
  auto* material = app.add_subcommand("material", "hinge material checks");
  material->add_flag("--check", ma.check, "compare a strain with elongation at break");
  material->add_flag("--list", ma.list, "list known materials");
  material->add_option("--strain", ma.strain, "peak strain (%)");
  material->add_option("--stretch", ma.stretch, "uniaxial stretch for the Mooney-Rivlin stress");
  material->add_option("--material", ma.material, "material name");
  material->add_option("--safety-factor", ma.safety_factor, "multiplier on the strain");
  material->add_option("--db", ma.db, "material database (default: $FLAPKIN_MATERIALS or built-in)");

  PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "SVG plot of a mechanism sweep or trajectory file");
  add_mech(plot, false);
  add_samples(plot);
  add_out(plot, "SVG output (default stdout)");
  plot->add_option("--trajectory", pa.trajectory, "trajectory CSV");
  plot->add_option("--kind", pa.kind, "angles or path")->check(CLI::IsMember({"angles", "path"}));
  plot->add_flag("--with-targets", pa.with_targets, "overlay the target gait");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*validate) return run_validate(validate_path, out);
    if (*solve) return run_solve(c, phi_deg, out);
    if (*sweep) return run_sweep(c, mode, out);
    if (*target) return run_target(c, out);
    if (*optimize) return run_optimize(c, oa, out, err);
    if (*sensitivity) return run_sensitivity(c, sa, out);
    if (*material) return run_material(ma, out);
    if (*plot) return run_plot(c, pa, out);
  } catch (const UsageError& e) {
    err << e.message << "\n";
    return 2;
  } catch (const Error& e) {
    std::string line = fmt::format("error code={}", to_string(e.code()));
    if (e.phase()) line += fmt::format(" phase_deg={:.6f}", rad_to_deg(*e.phase()));
    line += fmt::format(" message=\"{}\"", one_line(e.what()));
    err << line << "\n";
    return 1;
  }
  return 2;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace flapkin
