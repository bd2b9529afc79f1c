#pragma once

// Declarative scenario layer: versioned JSON configuration, validation with
// constraint healing, a preset gallery, and the driver that dispatches into
// the dynamics and radiation pipelines and writes trajectory, telemetry,
// and summary artifacts.

#include <array>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrlab/dynamics.hpp"
#include "rrlab/fields.hpp"
#include "rrlab/worldline.hpp"

namespace rrlab {

// Malformed configuration; the message names the offending field by path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind {
  ld4_single,
  sixd_single,
  two_charge,
  massless_admissibility,
  divergence_scan,
  interference_audit,
  conformal_audit,
};

enum class RunMode { direct, reduced, compare };

const char* to_string(ScenarioKind kind);
const char* to_string(RunMode mode);
ScenarioKind scenario_kind_from(const std::string& name);
RunMode run_mode_from(const std::string& name);

// Declarative field description; build() turns it into an evaluator.
// tabulated interpolates E(t), B(t) linearly between samples of ascending
// lab time and holds the end values beyond the sampled window.
struct FieldSpec {
  enum class Type { none, uniform, coulomb, null_crossed, tabulated };
  struct Sample {
    double t = 0.0;
    std::array<double, 3> E{0.0, 0.0, 0.0};
    std::array<double, 3> B{0.0, 0.0, 0.0};
  };

  Type type = Type::none;
  std::array<double, 3> E{0.0, 0.0, 0.0};
  std::array<double, 3> B{0.0, 0.0, 0.0};
  double source_charge = 1.0;  // coulomb
  double amplitude = 1.0;      // null_crossed
  std::vector<Sample> samples; // tabulated

  ExternalField build(int dim) const;
};

// One particle: properties plus the initial-state slots the selected kind
// consumes. Higher-derivative slots default to zero.
struct ParticleConfig {
  ParticleProps props;
  WorldlinePoint state;
  double e0 = 0.0;  // massless multiplier start; 0 means props.charge
};

// Massless stepping controls.
struct MasslessConfig {
  double dt = 1e-2;
  double eig_tol = 1e-9;
};

// Divergence scan source: massless circular orbit of radius rho in the 1-2
// plane, observed on the lab slice t_obs.
struct ScanConfig {
  double rho = 1.0;
  double t_obs = 4.0;
  double line_pad = 0.2;  // history beyond t_obs for the chart boundary
  int knots = 4201;
  std::vector<double> theta_min = {0.1, 0.141, 0.2, 0.282, 0.4,
                                   0.565, 0.8,  1.2, 1.6,  2.2};
  int n_s = 96;
  int n_theta = 64;
  int n_phi = 16;
};

// Interference audit source: two charges at rest at -+ separation/2 on
// axis 1 that bounce toward each other over ramp_time and return to rest
// (a smooth compact displacement profile), compared on the sphere radius.
struct InterferenceConfig {
  double separation = 2.0;
  double amplitude = 0.4;
  double ramp_time = 6.0;
  double radius = 20.0;
  double window_t0 = -2.0;
  double window_pad = 4.0;  // window closes at ramp_time + radius + pad
  double line_t0 = -48.0;   // prescribed span; must cover the causal past
  double line_t1 = 52.0;
  int knots = 5001;
  int n_theta = 64;
  int n_phi = 128;
  int n_time = 96;
};

// Conformal audit draw ranges; states below the regularity floors are
// redrawn so every audited point is an admissible input.
struct ConformalAuditConfig {
  int states = 1000;
  double theta_span = 0.5;
  double b_span = 0.25;
  double x_span = 1.5;
};

struct Scenario {
  int schema_version = 1;
  ScenarioKind kind = ScenarioKind::ld4_single;
  RunMode mode = RunMode::reduced;
  double duration = 1.0;  // proper time on single runs, lab time otherwise
  std::uint64_t seed = 0;
  std::vector<ParticleConfig> particles;
  FieldSpec field;
  IntegratorSettings integrator;
  TwoChargeSettings two_charge;
  MasslessConfig massless;
  ScanConfig scan;
  InterferenceConfig interference;
  ConformalAuditConfig audit;
  std::string out_dir = "out";
  std::string name;  // preset name or config stem, recorded in the summary
};

Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario(const std::filesystem::path& path);

// Structural checks (dimension consistency, kind/particle compatibility,
// positive step controls), then exact healing of the kinematic constraints
// of the initial states: u is renormalized onto its mass shell and the
// derivative slots are projected onto the orthogonality chain. States
// farther than 1e-6 from the constraint surface are rejected.
void validate_scenario(Scenario& sc);

struct Preset {
  std::string name;
  std::string rationale;  // one-line physics reason the preset exists
  Scenario scenario;
};

const std::vector<Preset>& preset_gallery();
Scenario preset_scenario(const std::string& name);  // throws ConfigError

// Runs a validated scenario and writes its artifacts under sc.out_dir.
// exit_code 0: clean run; 2: structured physics verdict (runaway detected,
// massless inadmissibility). Errors raise; the CLI maps them to 1.
struct RunArtifacts {
  int exit_code = 0;
  nlohmann::json summary;
  std::vector<std::string> files;  // relative to out_dir
};

RunArtifacts run_scenario(const Scenario& sc, std::ostream& log);

}  // namespace rrlab
