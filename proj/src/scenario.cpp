#include "rrlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "rrlab/conformal.hpp"
#include "rrlab/io.hpp"
#include "rrlab/lines.hpp"

namespace rrlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr ScenarioKind kAllKinds[] = {
    ScenarioKind::ld4_single,         ScenarioKind::sixd_single,
    ScenarioKind::two_charge,         ScenarioKind::massless_admissibility,
    ScenarioKind::divergence_scan,    ScenarioKind::interference_audit,
    ScenarioKind::conformal_audit,
};
constexpr RunMode kAllModes[] = {RunMode::direct, RunMode::reduced,
                                 RunMode::compare};

// Path-carrying view of a JSON node; every getter names the offending
// field on failure.
struct Node {
  const json* j;
  std::string path;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config error at " +
                      (path.empty() ? std::string("/") : path) + ": " + what);
  }

  bool has(const char* key) const { return j->contains(key); }

  Node child(const char* key) const {
    if (!has(key)) fail(std::string("missing field '") + key + "'");
    return Node{&(*j)[key], path + "/" + key};
  }

  void allow_keys(std::initializer_list<const char*> keys) const {
    if (!j->is_object()) fail("expected an object");
    for (const auto& item : j->items()) {
      bool known = false;
      for (const char* k : keys)
        if (item.key() == k) known = true;
      if (!known) fail("unknown field '" + item.key() + "'");
    }
  }

  double num(const char* key) const {
    Node c = child(key);
    if (!c.j->is_number()) c.fail("expected a number");
    return c.j->get<double>();
  }
  double num_or(const char* key, double def) const {
    return has(key) ? num(key) : def;
  }

  std::int64_t integer(const char* key) const {
    Node c = child(key);
    if (!c.j->is_number_integer()) c.fail("expected an integer");
    return c.j->get<std::int64_t>();
  }
  std::int64_t integer_or(const char* key, std::int64_t def) const {
    return has(key) ? integer(key) : def;
  }

  bool flag_or(const char* key, bool def) const {
    if (!has(key)) return def;
    Node c = child(key);
    if (!c.j->is_boolean()) c.fail("expected true or false");
    return c.j->get<bool>();
  }

  std::string str(const char* key) const {
    Node c = child(key);
    if (!c.j->is_string()) c.fail("expected a string");
    return c.j->get<std::string>();
  }
  std::string str_or(const char* key, const std::string& def) const {
    return has(key) ? str(key) : def;
  }

  std::vector<double> num_list(const char* key) const {
    Node c = child(key);
    if (!c.j->is_array()) c.fail("expected an array of numbers");
    std::vector<double> out;
    for (const json& e : *c.j) {
      if (!e.is_number()) c.fail("expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  LorentzVector vec(const char* key, int dim) const {
    const auto xs = num_list(key);
    if (static_cast<int>(xs.size()) != dim)
      child(key).fail("expected " + std::to_string(dim) + " components");
    LorentzVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = xs[static_cast<std::size_t>(i)];
    return v;
  }
  LorentzVector vec_or_zero(const char* key, int dim) const {
    return has(key) ? vec(key, dim) : LorentzVector(dim);
  }

  std::array<double, 3> triple_or(const char* key,
                                  std::array<double, 3> def) const {
    if (!has(key)) return def;
    const auto xs = num_list(key);
    if (xs.size() != 3) child(key).fail("expected 3 components");
    return {xs[0], xs[1], xs[2]};
  }
};

FieldSpec parse_field(const Node& n) {
  FieldSpec f;
  const std::string type = n.str("type");
  if (type == "none") {
    n.allow_keys({"type"});
    f.type = FieldSpec::Type::none;
  } else if (type == "uniform") {
    n.allow_keys({"type", "E", "B"});
    f.type = FieldSpec::Type::uniform;
    f.E = n.triple_or("E", {0.0, 0.0, 0.0});
    f.B = n.triple_or("B", {0.0, 0.0, 0.0});
  } else if (type == "coulomb") {
    n.allow_keys({"type", "source_charge"});
    f.type = FieldSpec::Type::coulomb;
    f.source_charge = n.num("source_charge");
  } else if (type == "null_crossed") {
    n.allow_keys({"type", "amplitude"});
    f.type = FieldSpec::Type::null_crossed;
    f.amplitude = n.num("amplitude");
  } else if (type == "tabulated") {
    n.allow_keys({"type", "samples"});
    f.type = FieldSpec::Type::tabulated;
    Node s = n.child("samples");
    if (!s.j->is_array() || s.j->empty())
      s.fail("expected a non-empty array of samples");
    int i = 0;
    for (const json& e : *s.j) {
      Node en{&e, s.path + "/" + std::to_string(i++)};
      en.allow_keys({"t", "E", "B"});
      FieldSpec::Sample smp;
      smp.t = en.num("t");
      smp.E = en.triple_or("E", {0.0, 0.0, 0.0});
      smp.B = en.triple_or("B", {0.0, 0.0, 0.0});
      f.samples.push_back(smp);
    }
  } else {
    n.child("type").fail("unknown field type '" + type + "'");
  }
  return f;
}

ParticleConfig parse_particle(const Node& n) {
  n.allow_keys({"mass", "charge", "mu6", "massless", "dim", "z", "u", "a",
                "da", "dda", "e0"});
  ParticleConfig pc;
  pc.props.dim = static_cast<int>(n.integer_or("dim", 4));
  if (pc.props.dim != 4 && pc.props.dim != 6)
    n.fail("dim must be 4 or 6");
  pc.props.mass = n.num_or("mass", 1.0);
  pc.props.charge = n.num_or("charge", 1.0);
  pc.props.mu6 = n.num_or("mu6", 0.0);
  pc.props.massless = n.flag_or("massless", false);
  const int d = pc.props.dim;
  pc.state.z = n.vec_or_zero("z", d);
  if (n.has("u")) {
    pc.state.u = n.vec("u", d);
  } else {
    pc.state.u = LorentzVector(d);
    pc.state.u[0] = 1.0;
  }
  pc.state.a = n.vec_or_zero("a", d);
  pc.state.da = n.vec_or_zero("da", d);
  pc.state.dda = n.vec_or_zero("dda", d);
  pc.e0 = n.num_or("e0", pc.props.charge);
  return pc;
}

// All-lower 4D tensor from lab-frame E and B triples.
RankTwoTensor eb_tensor(const std::array<double, 3>& E,
                        const std::array<double, 3>& B) {
  RankTwoTensor f(4, true);
  for (int i = 0; i < 3; ++i) {
    f.at(i + 1, 0) = E[static_cast<std::size_t>(i)];
    f.at(0, i + 1) = -E[static_cast<std::size_t>(i)];
  }
  const auto set = [&](int i, int j, double b) {
    f.at(i, j) = b;
    f.at(j, i) = -b;
  };
  set(1, 2, B[2]);
  set(2, 3, B[0]);
  set(3, 1, B[1]);
  return f;
}

[[noreturn]] void vfail(const std::string& what) { throw ConfigError(what); }

void require(bool ok, const std::string& what) {
  if (!ok) vfail(what);
}

// Exact renormalization of u onto its mass shell and projection of the
// derivative slots onto the orthogonality chain. Rejects states farther
// than 1e-6 from the constraint surface instead of silently bending them.
void heal_state(ParticleConfig& pc, const std::string& who) {
  WorldlinePoint& s = pc.state;
  const int d = pc.props.dim;
  require(s.u[0] > 0.0, who + ": u0 must be positive");

  double spatial2 = 0.0;
  for (int i = 1; i < d; ++i) spatial2 += s.u[i] * s.u[i];

  if (pc.props.massless) {
    require(spatial2 > 0.0, who + ": massless u needs a spatial direction");
    require(std::abs(minkowski_dot(s.u, s.u)) <= 1e-6 * s.u[0] * s.u[0],
            who + ": u is not null");
    const double scale = s.u[0] / std::sqrt(spatial2);
    for (int i = 1; i < d; ++i) s.u[i] *= scale;
    return;
  }

  require(std::abs(minkowski_dot(s.u, s.u) + 1.0) <=
              1e-6 * std::max(1.0, s.u[0] * s.u[0]),
          who + ": u is not unit timelike");
  s.u[0] = std::sqrt(1.0 + spatial2);

  const double au = minkowski_dot(s.a, s.u);
  require(std::abs(au) <=
              1e-6 * std::max(1.0, inf_norm(s.a)) * std::max(1.0, s.u[0]),
          who + ": a is not orthogonal to u");
  s.a += au * s.u;

  if (d == 6) {
    const double c3 = minkowski_dot(s.a, s.a) + minkowski_dot(s.u, s.da);
    require(std::abs(c3) <= 1e-6 * std::max(1.0, inf_norm(s.da) + inf_norm(s.a)),
            who + ": da violates the orthogonality chain");
    s.da += c3 * s.u;
    const double c4 =
        3.0 * minkowski_dot(s.a, s.da) + minkowski_dot(s.u, s.dda);
    require(std::abs(c4) <=
                1e-6 * std::max(1.0, inf_norm(s.dda) + inf_norm(s.da)),
            who + ": dda violates the orthogonality chain");
    s.dda += c4 * s.u;
  }
}

json envelope(const Scenario& sc) {
  return json{{"schema_version", sc.schema_version},
              {"kind", to_string(sc.kind)},
              {"mode", to_string(sc.mode)},
              {"name", sc.name},
              {"seed", sc.seed},
              {"duration", sc.duration},
              {"rel_tol", sc.integrator.rel_tol},
              {"abs_tol", sc.integrator.abs_tol}};
}

struct Aggregate {
  double em = 0.0, am = 0.0, mass = 0.0, norm = 0.0;
  int steps = 0;
  void add(const BalanceReport& r) {
    em = std::max(em, inf_norm(r.em_residual));
    am = std::max(am, inf_norm(r.am_residual));
    mass = std::max(mass, r.mass_drift);
    norm = std::max(norm, r.velocity_norm_drift);
    ++steps;
  }
  json to_json() const {
    return json{{"steps", steps},
                {"max_em_residual", em},
                {"max_am_residual", am},
                {"max_mass_drift", mass},
                {"max_velocity_norm_drift", norm}};
  }
};

// Accumulated per-step error allowance at momentum scale. The balance
// residual of an accurate run stays within a small multiple of it at
// every step; the factor 10 absorbs the audit-quadrature constants.
struct BudgetCheck {
  double budget = 0.0;
  bool within_10x = true;
  void add(const BalanceReport& r, double p_scale,
           const IntegratorSettings& in) {
    budget += in.rel_tol * p_scale + in.abs_tol;
    if (inf_norm(r.em_residual) > 10.0 * budget) within_10x = false;
  }
};

json summarize_run(const Scenario& sc, const RunResult& res, bool sixd,
                   RunawayVerdict* verdict) {
  const ParticleProps& pp = sc.particles[0].props;
  Aggregate agg;
  BudgetCheck bc;
  for (std::size_t k = 0; k < res.reports.size(); ++k) {
    const BalanceReport& r = res.reports[k];
    agg.add(r);
    const WorldlinePoint& pt = res.line.point(static_cast<int>(k) + 1);
    const LorentzVector p =
        sixd ? particle_momentum_6d(pt, pp.charge, pp.mass, pp.mu6)
             : particle_momentum_4d(pt, pp.charge, pp.mass);
    bc.add(r, std::max(1.0, inf_norm(p)), sc.integrator);
  }
  const RunawayVerdict rv = detect_runaway(res.line);
  if (verdict) *verdict = rv;
  json out{{"balance", agg.to_json()},
           {"p_rad", res.p_rad},
           {"f_ext_integral", res.f_ext_integral},
           {"final_tau", res.line.tau_max()},
           {"underflow", res.underflow},
           {"local_tolerance_budget", bc.budget},
           {"em_within_10x_budget", bc.within_10x},
           {"runaway",
            json{{"detected", rv.runaway},
                 {"efold_rate", rv.efold_rate},
                 {"tau0", rv.tau0},
                 {"tau1", rv.tau1},
                 {"points", rv.points}}}};
  if (res.underflow) out["underflow_tau"] = res.underflow_tau;
  return out;
}

void write_line_telemetry(TelemetryWriter& tele, const RunResult& res,
                          const char* branch) {
  for (std::size_t k = 0; k < res.reports.size(); ++k) {
    json rec = res.reports[k];
    const WorldlinePoint& pt = res.line.point(static_cast<int>(k) + 1);
    rec["branch"] = branch;
    rec["z"] = pt.z;
    rec["u"] = pt.u;
    tele.write(rec);
  }
}

RunArtifacts run_ld4(const Scenario& sc, std::ostream& log,
                     const fs::path& dir) {
  const ParticleConfig& pc = sc.particles[0];
  const ExternalField field = sc.field.build(4);

  struct Branch {
    const char* name;
    LdMode mode;
  };
  std::vector<Branch> branches;
  if (sc.mode == RunMode::compare)
    branches = {{"direct", LdMode::direct}, {"reduced", LdMode::reduced}};
  else if (sc.mode == RunMode::direct)
    branches = {{"direct", LdMode::direct}};
  else
    branches = {{"reduced", LdMode::reduced}};

  RunArtifacts art;
  json summary = envelope(sc);
  TelemetryWriter tele(dir / "telemetry.jsonl");
  art.files.push_back("telemetry.jsonl");

  std::vector<RunResult> results;
  std::vector<RunawayVerdict> verdicts;
  for (const Branch& b : branches) {
    log << "  " << b.name << " branch to tau=" << sc.duration << "\n";
    RunResult res =
        run_lorentz_dirac(pc.props, pc.state.z, pc.state.u, pc.state.a, field,
                          b.mode, sc.duration, sc.integrator);
    write_line_telemetry(tele, res, b.name);
    const std::string csv = branches.size() == 1
                                ? std::string("worldline.csv")
                                : "worldline_" + std::string(b.name) + ".csv";
    write_worldline_csv(dir / csv, res.line);
    art.files.push_back(csv);
    RunawayVerdict rv;
    summary["branches"][b.name] = summarize_run(sc, res, false, &rv);
    verdicts.push_back(rv);
    results.push_back(std::move(res));
  }

  if (sc.mode == RunMode::compare) {
    const Worldline& direct = results[0].line;
    const Worldline& reduced = results[1].line;
    const double end = std::min(direct.tau_max(), reduced.tau_max());
    double dz = 0.0, du = 0.0;
    for (const WorldlinePoint& pt : reduced.points()) {
      if (pt.tau > end) break;
      const WorldlinePoint q = interpolate(direct, pt.tau);
      dz = std::max(dz, inf_norm(pt.z - q.z));
      du = std::max(du, inf_norm(pt.u - q.u));
    }
    summary["compare"] =
        json{{"max_dz", dz}, {"max_du", du}, {"common_tau_end", end}};
  }

  int exit_code = 0;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (verdicts[i].runaway) {
      summary["verdicts"]["runaway"] =
          json{{"branch", branches[i].name},
               {"efold_rate", verdicts[i].efold_rate},
               {"tau0", verdicts[i].tau0},
               {"tau1", verdicts[i].tau1},
               {"self_force_efold_rate",
                1.5 * pc.props.mass / (pc.props.charge * pc.props.charge)}};
      exit_code = 2;
    } else if (results[i].underflow) {
      summary["error"] = "step underflow at tau=" +
                         format_double(results[i].underflow_tau);
      exit_code = 1;
    }
  }

  summary["exit_code"] = exit_code;
  write_summary(dir / "summary.json", summary);
  art.files.push_back("summary.json");
  art.summary = std::move(summary);
  art.exit_code = exit_code;
  return art;
}

RunArtifacts run_sixd_scenario(const Scenario& sc, std::ostream& log,
                               const fs::path& dir) {
  const ParticleConfig& pc = sc.particles[0];
  const ExternalField field = sc.field.build(6);

  RunArtifacts art;
  json summary = envelope(sc);
  TelemetryWriter tele(dir / "telemetry.jsonl");
  art.files.push_back("telemetry.jsonl");

  log << "  sixd run to tau=" << sc.duration << "\n";
  RunResult res = run_sixd(pc.props, pc.state, field, sc.duration,
                           sc.integrator);
  write_line_telemetry(tele, res, "sixd");
  write_worldline_csv(dir / "worldline.csv", res.line);
  art.files.push_back("worldline.csv");

  RunawayVerdict rv;
  summary["branches"]["sixd"] = summarize_run(sc, res, true, &rv);

  int exit_code = 0;
  if (rv.runaway) {
    summary["verdicts"]["runaway"] = json{{"branch", "sixd"},
                                          {"efold_rate", rv.efold_rate},
                                          {"tau0", rv.tau0},
                                          {"tau1", rv.tau1}};
    exit_code = 2;
  } else if (res.underflow) {
    summary["error"] =
        "step underflow at tau=" + format_double(res.underflow_tau);
    exit_code = 1;
  }

  summary["exit_code"] = exit_code;
  write_summary(dir / "summary.json", summary);
  art.files.push_back("summary.json");
  art.summary = std::move(summary);
  art.exit_code = exit_code;
  return art;
}

RunArtifacts run_two_charge(const Scenario& sc, std::ostream& log,
                            const fs::path& dir) {
  const std::array<ParticleProps, 2> props{sc.particles[0].props,
                                           sc.particles[1].props};
  const std::array<LorentzVector, 2> z0{sc.particles[0].state.z,
                                        sc.particles[1].state.z};
  const std::array<LorentzVector, 2> u0{sc.particles[0].state.u,
                                        sc.particles[1].state.u};

  TwoChargeRun run(props, z0, u0, sc.two_charge);
  const LorentzVector total0 = run.conserved_total();
  const long n = std::lround(sc.duration / sc.two_charge.dt);
  log << "  " << n << " shared lab steps of dt=" << sc.two_charge.dt << "\n";

  RunArtifacts art;
  json summary = envelope(sc);
  TelemetryWriter tele(dir / "telemetry.jsonl");
  art.files.push_back("telemetry.jsonl");

  std::array<Aggregate, 2> agg;
  double max_drift = 0.0;
  for (long k = 0; k < n; ++k) {
    const auto reps = run.step();
    const double drift = inf_norm(run.conserved_total() - total0);
    max_drift = std::max(max_drift, drift);
    json rec{{"t", run.t()}, {"conserved_drift", drift}};
    for (int i = 0; i < 2; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      agg[iu].add(reps[iu]);
      json pr = reps[iu];
      const WorldlinePoint& pt = run.line(i).points().back();
      pr["z"] = pt.z;
      pr["u"] = pt.u;
      rec["particles"].push_back(std::move(pr));
    }
    tele.write(rec);
  }

  for (int i = 0; i < 2; ++i) {
    const std::string csv = "worldline_" + std::to_string(i) + ".csv";
    write_worldline_csv(dir / csv, run.line(i));
    art.files.push_back(csv);
    summary["particles"].push_back(
        json{{"balance", agg[static_cast<std::size_t>(i)].to_json()}});
  }
  summary["conserved_total"] = total0;
  summary["max_conserved_drift"] = max_drift;
  summary["max_conserved_drift_rel"] =
      max_drift / std::max(inf_norm(total0), 1e-30);
  summary["final_t"] = run.t();

  summary["exit_code"] = 0;
  write_summary(dir / "summary.json", summary);
  art.files.push_back("summary.json");
  art.summary = std::move(summary);
  art.exit_code = 0;
  return art;
}

RunArtifacts run_massless(const Scenario& sc, std::ostream& log,
                          const fs::path& dir) {
  const ParticleConfig& pc = sc.particles[0];
  const ExternalField field = sc.field.build(4);
  const double h = sc.massless.dt;
  const long n = std::lround(sc.duration / h);
  log << "  " << n << " held-ray steps of dt=" << h << "\n";

  RunArtifacts art;
  json summary = envelope(sc);
  TelemetryWriter tele(dir / "telemetry.jsonl");
  art.files.push_back("telemetry.jsonl");

  MasslessState s{0.0, pc.state.z, pc.state.u, pc.e0};
  Worldline wl(pc.props);
  const auto add_knot = [&](const MasslessState& st) {
    WorldlinePoint p;
    p.tau = st.t;
    p.z = st.z;
    p.u = st.u;
    p.a = p.da = p.dda = LorentzVector(4);
    wl.add_point(p);
  };
  add_knot(s);

  int exit_code = 0;
  double lambda0 = 0.0;
  for (long k = 0; k < n; ++k) {
    const MasslessStepResult r =
        massless_step(s, pc.props.charge, field, h, sc.massless.eig_tol);
    if (k == 0) lambda0 = r.lambda;
    tele.write(json{{"t", s.t},
                    {"lambda", r.lambda},
                    {"residual", r.residual},
                    {"admissible", r.admissible},
                    {"e", r.state.e}});
    if (!r.admissible) {
      summary["verdicts"]["inadmissible"] =
          json{{"t", s.t},
               {"residual", r.residual},
               {"eig_tol", sc.massless.eig_tol}};
      exit_code = 2;
      break;
    }
    s = r.state;
    add_knot(s);
  }

  write_worldline_csv(dir / "worldline.csv", wl);
  art.files.push_back("worldline.csv");

  summary["admissible"] = exit_code == 0;
  summary["lambda_start"] = lambda0;
  summary["e_start"] = pc.e0;
  summary["e_final"] = s.e;
  // For a static field along the held ray the multiplier is linear in lab
  // time; the drift field is diagnostic only for time-dependent fields.
  summary["multiplier_drift_vs_constant_rate"] =
      std::abs(s.e - pc.e0 - pc.props.charge * lambda0 * s.t);

  summary["exit_code"] = exit_code;
  write_summary(dir / "summary.json", summary);
  art.files.push_back("summary.json");
  art.summary = std::move(summary);
  art.exit_code = exit_code;
  return art;
}

RunArtifacts run_divergence(const Scenario& sc, std::ostream& log,
                            const fs::path& dir) {
  const ScanConfig& scn = sc.scan;
  const ParticleProps& props = sc.particles[0].props;
  const Worldline src = make_massless_circular(
      props, scn.rho, 0.0, scn.t_obs + scn.line_pad, scn.knots);
  log << "  scanning " << scn.theta_min.size() << " cutoffs on the slice t="
      << scn.t_obs << "\n";
  const DivergenceScan scan = massless_divergence_scan(
      src, scn.t_obs, scn.theta_min, scn.n_s, scn.n_theta, scn.n_phi);

  RunArtifacts art;
  json summary = envelope(sc);
  TelemetryWriter tele(dir / "telemetry.jsonl");
  art.files.push_back("telemetry.jsonl");
  for (const DivergenceScanRow& row : scan.rows)
    tele.write(json{{"theta_min", row.theta_min},
                    {"energy", row.energy},
                    {"momentum", row.momentum},
                    {"error", row.error}});

  write_divergence_csv(dir / "scan.csv", scan);
  art.files.push_back("scan.csv");
  write_worldline_csv(dir / "worldline.csv", src);
  art.files.push_back("worldline.csv");

  summary["invariants"] = json{{"a2_integral", scan.a2_integral},
                               {"a2v_integral", scan.a2v_integral},
                               {"s0", scan.s0},
                               {"s1", scan.s1}};
  summary["no_divergence"] = scan.no_divergence;

  if (!scan.no_divergence) {
    const double q2h = 0.5 * props.charge * props.charge;
    const double I = scan.a2_integral;
    const EnergyFit ef = fit_divergence_energy(scan);
    const double eb_exp = q2h * I;
    const double ea_exp = -0.125 * q2h * I;
    const bool pass_b = std::abs(ef.B - eb_exp) < 0.01 * std::abs(eb_exp);
    const bool pass_a = std::abs(ef.A - ea_exp) < 0.03 * std::abs(eb_exp);
    summary["fits"]["energy"] = json{{"A", ef.A},
                                     {"B", ef.B},
                                     {"A_expected", ea_exp},
                                     {"B_expected", eb_exp},
                                     {"pass_A", pass_a},
                                     {"pass_B", pass_b}};
    double vmax = 1e-30;
    for (double v : scan.a2v_integral) vmax = std::max(vmax, std::abs(v));
    const double vscale = q2h * vmax;
    bool pass_p = true;
    summary["fits"]["momentum"] = json::array();
    for (int axis = 0; axis < 3; ++axis) {
      const MomentumFit mf = fit_divergence_momentum(scan, axis);
      const double V =
          q2h * scan.a2v_integral[static_cast<std::size_t>(axis)];
      const bool ok = std::abs(mf.A - 0.375 * V) < 0.03 * vscale &&
                      std::abs(mf.Bc + V) < 0.03 * vscale &&
                      std::abs(mf.Bc2 - V) < 0.03 * vscale;
      pass_p = pass_p && ok;
      summary["fits"]["momentum"].push_back(json{{"axis", axis + 1},
                                                 {"A", mf.A},
                                                 {"Bc", mf.Bc},
                                                 {"Bc2", mf.Bc2},
                                                 {"V_expected", V},
                                                 {"pass", ok}});
    }
    summary["fits"]["pass"] = pass_a && pass_b && pass_p;
  }

  summary["exit_code"] = 0;
  write_summary(dir / "summary.json", summary);
  art.files.push_back("summary.json");
  art.summary = std::move(summary);
  art.exit_code = 0;
  return art;
}

RunArtifacts run_interference(const Scenario& sc, std::ostream& log,
                              const fs::path& dir) {
  const InterferenceConfig& ic = sc.interference;
  const Worldline w0 =
      make_bounce_line(sc.particles[0].props, -0.5 * ic.separation,
                       ic.amplitude, ic.ramp_time, ic.line_t0, ic.line_t1,
                       ic.knots);
  const Worldline w1 =
      make_bounce_line(sc.particles[1].props, 0.5 * ic.separation,
                       -ic.amplitude, ic.ramp_time, ic.line_t0, ic.line_t1,
                       ic.knots);
  const double t1 = ic.ramp_time + ic.radius + ic.window_pad;
  log << "  flux window [" << ic.window_t0 << ", " << t1 << "] on the sphere R="
      << ic.radius << "\n";
  const FluxWorkReport rep = interference_flux_check(
      w0, w1, ic.window_t0, t1, ic.radius, ic.n_theta, ic.n_phi, ic.n_time);

  RunArtifacts art;
  json summary = envelope(sc);

  const LorentzVector residual = rep.flux + rep.work[0] + rep.work[1];
  const double scale = std::max(inf_norm(rep.flux), 1e-30);
  const double rel = inf_norm(residual) / scale;
  const bool pass =
      inf_norm(residual) <
      std::max(0.02 * scale, 10.0 * (rep.flux_error + rep.work_error));

  TelemetryWriter tele(dir / "telemetry.jsonl");
  art.files.push_back("telemetry.jsonl");
  tele.write(json{{"flux", rep.flux},
                  {"work", json::array({rep.work[0], rep.work[1]})},
                  {"residual", residual},
                  {"rel_discrepancy", rel}});

  write_worldline_csv(dir / "worldline_0.csv", w0);
  write_worldline_csv(dir / "worldline_1.csv", w1);
  art.files.push_back("worldline_0.csv");
  art.files.push_back("worldline_1.csv");

  summary["interference"] = json{{"flux", rep.flux},
                                 {"flux_error", rep.flux_error},
                                 {"work", json::array({rep.work[0],
                                                       rep.work[1]})},
                                 {"work_error", rep.work_error},
                                 {"residual", residual},
                                 {"flux_vs_work_rel_discrepancy", rel},
                                 {"pass", pass}};

  summary["exit_code"] = 0;
  write_summary(dir / "summary.json", summary);
  art.files.push_back("summary.json");
  art.summary = std::move(summary);
  art.exit_code = 0;
  return art;
}

RunArtifacts run_conformal(const Scenario& sc, std::ostream& log,
                           const fs::path& dir) {
  const ConformalAuditConfig& ac = sc.audit;
  std::mt19937_64 rng(sc.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const auto draw_field = [&] {
    RankTwoTensor F(4, true);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double v = unit(rng);
        F.at(i, j) = v;
        F.at(j, i) = -v;
      }
    return F;
  };

  RunArtifacts art;
  json summary = envelope(sc);
  TelemetryWriter tele(dir / "telemetry.jsonl");
  art.files.push_back("telemetry.jsonl");

  log << "  auditing " << ac.states << " random admissible states\n";
  int audited = 0;
  long attempts = 0;
  double worst_eig = 0.0, worst_null = 0.0, worst_conf = 0.0;
  while (audited < ac.states) {
    if (++attempts > 1000L * ac.states)
      throw std::runtime_error(
          "conformal audit draw ranges reject too much volume");
    const RankTwoTensor F = draw_field();
    const NullEigenReport rays = find_null_eigenvectors(F);
    if (rays.degenerate || rays.pairs.empty()) continue;
    for (const NullEigenPair& pr : rays.pairs) {
      if (audited >= ac.states) break;
      LorentzVector x(4), b(4);
      double theta = 0.0;
      bool ok = false;
      for (int tries = 0; tries < 64 && !ok; ++tries) {
        for (int i = 0; i < 4; ++i) x[i] = ac.x_span * unit(rng);
        theta = ac.theta_span * unit(rng);
        for (int i = 0; i < 4; ++i) b[i] = ac.b_span * unit(rng);
        if (std::abs(minkowski_dot(x, x)) < 0.05) continue;
        if (std::abs(conformal_factor(dilate(x, theta), b)) < 0.1) continue;
        ok = true;
      }
      if (!ok) continue;
      ConformalAudit a;
      try {
        a = audit_massless_invariance(F, pr.v, pr.lambda, x,
                                      ConformalParams{theta, b});
      } catch (const SingularSurfaceError&) {
        continue;
      }
      tele.write(json{{"state", audited},
                      {"lambda_in", a.lambda_in},
                      {"lambda_out", a.lambda_out},
                      {"eigen_residual", a.eigen_residual},
                      {"nullity_residual", a.nullity_residual},
                      {"conformality_residual", a.conformality_residual}});
      worst_eig = std::max(worst_eig, a.eigen_residual);
      worst_null = std::max(worst_null, a.nullity_residual);
      worst_conf = std::max(worst_conf, a.conformality_residual);
      ++audited;
    }
  }

  const double bound = 1e-9;
  summary["conformal"] =
      json{{"states", audited},
           {"worst_eigen_residual", worst_eig},
           {"worst_nullity_residual", worst_null},
           {"worst_conformality_residual", worst_conf},
           {"residual_bound", bound},
           {"pass",
            worst_eig < bound && worst_null < bound && worst_conf < bound}};

  summary["exit_code"] = 0;
  write_summary(dir / "summary.json", summary);
  art.files.push_back("summary.json");
  art.summary = std::move(summary);
  art.exit_code = 0;
  return art;
}

Scenario preset_hyperbola() {
  Scenario sc;
  sc.kind = ScenarioKind::ld4_single;
  sc.mode = RunMode::direct;
  sc.duration = 5.0;
  ParticleConfig pc;
  pc.props.mass = 1.0;
  pc.props.charge = std::sqrt(1.5);
  pc.state.z = LorentzVector{0.0, 0.0, 0.0, 1.0};
  pc.state.u = LorentzVector{1.0, 0.0, 0.0, 0.0};
  pc.state.a = LorentzVector{0.0, 0.0, 0.0, 1.0};
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::uniform;
  sc.field.E = {0.0, 0.0, pc.props.mass / pc.props.charge};
  sc.integrator.rel_tol = 1e-12;
  sc.integrator.abs_tol = 1e-14;
  return sc;
}

Scenario preset_circular_orbit() {
  Scenario sc;
  sc.kind = ScenarioKind::ld4_single;
  sc.mode = RunMode::reduced;
  const double beta = 0.5, r0 = 1.0, m = 1.0, e = 0.2;
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  sc.duration = 2.0 * M_PI * r0 / (gamma * beta);  // one proper-time turn
  ParticleConfig pc;
  pc.props.mass = m;
  pc.props.charge = e;
  pc.state.z = LorentzVector{0.0, r0, 0.0, 0.0};
  pc.state.u = LorentzVector{gamma, 0.0, gamma * beta, 0.0};
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::uniform;
  // Sign centers the orbit on the origin for the starting velocity +y.
  sc.field.B = {0.0, 0.0, -gamma * m * beta / (e * r0)};
  return sc;
}

Scenario preset_weak_coupling() {
  Scenario sc;
  sc.kind = ScenarioKind::ld4_single;
  sc.mode = RunMode::compare;
  sc.duration = 1.2;
  ParticleConfig pc;
  pc.props.mass = 1.0;
  pc.props.charge = std::sqrt(0.15);
  pc.state.z = LorentzVector{0.0, 0.0, 0.0, 1.0};
  pc.state.u = LorentzVector{1.0, 0.0, 0.0, 0.0};
  pc.state.a = LorentzVector{0.0, 0.0, 0.0, 1.0};
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::uniform;
  sc.field.E = {0.0, 0.0, pc.props.mass / pc.props.charge};
  sc.integrator.rel_tol = 1e-12;
  sc.integrator.abs_tol = 1e-14;
  return sc;
}

Scenario preset_runaway() {
  Scenario sc;
  sc.kind = ScenarioKind::ld4_single;
  sc.mode = RunMode::direct;
  sc.duration = 14.0;
  ParticleConfig pc;
  pc.props.mass = 1.0;
  pc.props.charge = std::sqrt(1.5);  // self-force e-fold rate 3m/2e^2 = 1
  pc.state.u = LorentzVector{1.0, 0.0, 0.0, 0.0};
  pc.state.a = LorentzVector{0.0, 0.0, 0.0, 1e-8};
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::none;
  return sc;
}

Scenario preset_two_charge_flyby() {
  Scenario sc;
  sc.kind = ScenarioKind::two_charge;
  sc.duration = 12.0;
  const double beta = 0.5;
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  ParticleConfig light;
  light.props.mass = 1.0;
  light.props.charge = 0.3;
  light.state.z = LorentzVector{0.0, -3.0, 1.0, 0.0};
  light.state.u = LorentzVector{gamma, gamma * beta, 0.0, 0.0};
  ParticleConfig heavy;
  heavy.props.mass = 1e4;
  heavy.props.charge = 0.3;
  heavy.state.z = LorentzVector(4);
  heavy.state.u = LorentzVector{1.0, 0.0, 0.0, 0.0};
  sc.particles = {light, heavy};
  sc.field.type = FieldSpec::Type::none;
  sc.two_charge.dt = 1e-2;
  return sc;
}

Scenario preset_massless_null_field() {
  Scenario sc;
  sc.kind = ScenarioKind::massless_admissibility;
  sc.duration = 5.0;
  ParticleConfig pc;
  pc.props.mass = 0.0;
  pc.props.charge = 0.5;
  pc.props.massless = true;
  pc.state.u = LorentzVector{1.0, 0.0, 0.0, 1.0};
  pc.e0 = 0.5;
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::null_crossed;
  sc.field.amplitude = 0.8;
  return sc;
}

Scenario preset_massless_inadmissible() {
  Scenario sc;
  sc.kind = ScenarioKind::massless_admissibility;
  sc.duration = 1.0;
  ParticleConfig pc;
  pc.props.mass = 0.0;
  pc.props.charge = 0.5;
  pc.props.massless = true;
  pc.state.u = LorentzVector{1.0, 1.0, 0.0, 0.0};  // transverse to E
  pc.e0 = 0.5;
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::uniform;
  sc.field.E = {0.0, 0.0, 0.5};
  return sc;
}

Scenario preset_divergence_scan() {
  Scenario sc;
  sc.kind = ScenarioKind::divergence_scan;
  ParticleConfig pc;
  pc.props.mass = 0.0;
  pc.props.charge = 0.3;
  pc.props.massless = true;
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::none;
  return sc;  // scan geometry at the documented defaults
}

Scenario preset_interference_audit() {
  Scenario sc;
  sc.kind = ScenarioKind::interference_audit;
  ParticleConfig a, b;
  a.props.charge = 0.5;
  b.props.charge = -0.5;
  sc.particles = {a, b};
  sc.field.type = FieldSpec::Type::none;
  return sc;  // bounce geometry at the documented defaults
}

Scenario preset_sixd_driven() {
  Scenario sc;
  sc.kind = ScenarioKind::sixd_single;
  sc.duration = 2.0;
  ParticleConfig pc;
  pc.props.dim = 6;
  pc.props.mass = 1.0;
  pc.props.charge = 1.0;
  pc.props.mu6 = 1.0;
  const double g = 0.05;  // Lorentz pull of the field at rest
  pc.state.z = LorentzVector(6);
  pc.state.u = LorentzVector(6);
  pc.state.u[0] = 1.0;
  pc.state.a = LorentzVector(6);
  pc.state.a[3] = g;
  // Derivative slots on the driven branch, so the homogeneous modes start
  // small and the acceleration stays clear of the runaway detector window.
  pc.state.da = LorentzVector(6);
  pc.state.da[0] = g * g;
  pc.state.dda = LorentzVector(6);
  pc.state.dda[3] = g * g * g;
  sc.particles = {pc};
  sc.field.type = FieldSpec::Type::uniform;
  sc.field.E = {0.0, 0.0, g};
  return sc;
}

Scenario preset_conformal_audit() {
  Scenario sc;
  sc.kind = ScenarioKind::conformal_audit;
  sc.field.type = FieldSpec::Type::none;
  sc.audit.states = 1000;
  return sc;
}

}  // namespace

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ld4_single: return "ld4_single";
    case ScenarioKind::sixd_single: return "sixd_single";
    case ScenarioKind::two_charge: return "two_charge";
    case ScenarioKind::massless_admissibility:
      return "massless_admissibility";
    case ScenarioKind::divergence_scan: return "divergence_scan";
    case ScenarioKind::interference_audit: return "interference_audit";
    case ScenarioKind::conformal_audit: return "conformal_audit";
  }
  return "?";
}

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::direct: return "direct";
    case RunMode::reduced: return "reduced";
    case RunMode::compare: return "compare";
  }
  return "?";
}

ScenarioKind scenario_kind_from(const std::string& name) {
  for (ScenarioKind k : kAllKinds)
    if (name == to_string(k)) return k;
  throw ConfigError("unknown scenario kind '" + name + "'");
}

RunMode run_mode_from(const std::string& name) {
  for (RunMode m : kAllModes)
    if (name == to_string(m)) return m;
  throw ConfigError("unknown run mode '" + name + "'");
}

ExternalField FieldSpec::build(int dim) const {
  switch (type) {
    case Type::none:
      return zero_field(dim);
    case Type::uniform: {
      if (dim == 6) return uniform_electric(E, 6);
      return uniform_field(eb_tensor(E, B), "uniform field");
    }
    case Type::coulomb:
      return coulomb_field(source_charge, dim);
    case Type::null_crossed:
      return null_crossed_field(amplitude);
    case Type::tabulated: {
      const std::vector<Sample> table = samples;
      ExternalField f;
      f.description = "tabulated field";
      f.F = [table](const LorentzVector& x) {
        const double t = x[0];
        if (t <= table.front().t)
          return eb_tensor(table.front().E, table.front().B);
        if (t >= table.back().t)
          return eb_tensor(table.back().E, table.back().B);
        std::size_t hi = 1;
        while (table[hi].t < t) ++hi;
        const Sample& s0 = table[hi - 1];
        const Sample& s1 = table[hi];
        const double w = (t - s0.t) / (s1.t - s0.t);
        std::array<double, 3> E, B;
        for (std::size_t i = 0; i < 3; ++i) {
          E[i] = (1.0 - w) * s0.E[i] + w * s1.E[i];
          B[i] = (1.0 - w) * s0.B[i] + w * s1.B[i];
        }
        return eb_tensor(E, B);
      };
      return f;
    }
  }
  throw std::logic_error("unhandled field type");
}

Scenario parse_scenario(const json& config) {
  Node root{&config, ""};
  root.allow_keys({"schema_version", "kind", "mode", "duration", "seed",
                   "particles", "field", "integrator", "two_charge",
                   "massless", "scan", "interference", "audit", "output",
                   "name"});
  Scenario sc;
  sc.schema_version = static_cast<int>(root.integer("schema_version"));
  if (sc.schema_version != 1)
    root.child("schema_version").fail("unsupported schema_version (expected 1)");

  const std::string kind_name = root.str("kind");
  try {
    sc.kind = scenario_kind_from(kind_name);
  } catch (const ConfigError&) {
    root.child("kind").fail("unknown kind '" + kind_name + "'");
  }
  if (root.has("mode")) {
    const std::string mode_name = root.str("mode");
    try {
      sc.mode = run_mode_from(mode_name);
    } catch (const ConfigError&) {
      root.child("mode").fail("unknown mode '" + mode_name + "'");
    }
  }

  sc.duration = root.num_or("duration", 1.0);
  const std::int64_t seed = root.integer_or("seed", 0);
  if (seed < 0) root.child("seed").fail("seed must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.name = root.str_or("name", "");

  if (root.has("particles")) {
    Node ps = root.child("particles");
    if (!ps.j->is_array()) ps.fail("expected an array of particles");
    int i = 0;
    for (const json& e : *ps.j) {
      Node en{&e, ps.path + "/" + std::to_string(i++)};
      sc.particles.push_back(parse_particle(en));
    }
  }
  if (root.has("field")) sc.field = parse_field(root.child("field"));

  if (root.has("integrator")) {
    Node n = root.child("integrator");
    n.allow_keys({"rel_tol", "abs_tol", "h_init", "h_min", "h_max",
                  "fd_delta"});
    IntegratorSettings& in = sc.integrator;
    in.rel_tol = n.num_or("rel_tol", in.rel_tol);
    in.abs_tol = n.num_or("abs_tol", in.abs_tol);
    in.h_init = n.num_or("h_init", in.h_init);
    in.h_min = n.num_or("h_min", in.h_min);
    in.h_max = n.num_or("h_max", in.h_max);
    in.fd_delta = n.num_or("fd_delta", in.fd_delta);
  }
  if (root.has("two_charge")) {
    Node n = root.child("two_charge");
    n.allow_keys({"dt", "pre_history_span", "fd_delta", "mutual_reaction"});
    TwoChargeSettings& tc = sc.two_charge;
    tc.dt = n.num_or("dt", tc.dt);
    tc.pre_history_span = n.num_or("pre_history_span", tc.pre_history_span);
    tc.fd_delta = n.num_or("fd_delta", tc.fd_delta);
    tc.with_mutual_reaction =
        n.flag_or("mutual_reaction", tc.with_mutual_reaction);
  }
  if (root.has("massless")) {
    Node n = root.child("massless");
    n.allow_keys({"dt", "eig_tol"});
    sc.massless.dt = n.num_or("dt", sc.massless.dt);
    sc.massless.eig_tol = n.num_or("eig_tol", sc.massless.eig_tol);
  }
  if (root.has("scan")) {
    Node n = root.child("scan");
    n.allow_keys({"rho", "t_obs", "line_pad", "knots", "theta_min", "n_s",
                  "n_theta", "n_phi"});
    ScanConfig& s = sc.scan;
    s.rho = n.num_or("rho", s.rho);
    s.t_obs = n.num_or("t_obs", s.t_obs);
    s.line_pad = n.num_or("line_pad", s.line_pad);
    s.knots = static_cast<int>(n.integer_or("knots", s.knots));
    if (n.has("theta_min")) s.theta_min = n.num_list("theta_min");
    s.n_s = static_cast<int>(n.integer_or("n_s", s.n_s));
    s.n_theta = static_cast<int>(n.integer_or("n_theta", s.n_theta));
    s.n_phi = static_cast<int>(n.integer_or("n_phi", s.n_phi));
  }
  if (root.has("interference")) {
    Node n = root.child("interference");
    n.allow_keys({"separation", "amplitude", "ramp_time", "radius",
                  "window_t0", "window_pad", "line_t0", "line_t1", "knots",
                  "n_theta", "n_phi", "n_time"});
    InterferenceConfig& ic = sc.interference;
    ic.separation = n.num_or("separation", ic.separation);
    ic.amplitude = n.num_or("amplitude", ic.amplitude);
    ic.ramp_time = n.num_or("ramp_time", ic.ramp_time);
    ic.radius = n.num_or("radius", ic.radius);
    ic.window_t0 = n.num_or("window_t0", ic.window_t0);
    ic.window_pad = n.num_or("window_pad", ic.window_pad);
    ic.line_t0 = n.num_or("line_t0", ic.line_t0);
    ic.line_t1 = n.num_or("line_t1", ic.line_t1);
    ic.knots = static_cast<int>(n.integer_or("knots", ic.knots));
    ic.n_theta = static_cast<int>(n.integer_or("n_theta", ic.n_theta));
    ic.n_phi = static_cast<int>(n.integer_or("n_phi", ic.n_phi));
    ic.n_time = static_cast<int>(n.integer_or("n_time", ic.n_time));
  }
  if (root.has("audit")) {
    Node n = root.child("audit");
    n.allow_keys({"states", "theta_span", "b_span", "x_span"});
    ConformalAuditConfig& a = sc.audit;
    a.states = static_cast<int>(n.integer_or("states", a.states));
    a.theta_span = n.num_or("theta_span", a.theta_span);
    a.b_span = n.num_or("b_span", a.b_span);
    a.x_span = n.num_or("x_span", a.x_span);
  }
  if (root.has("output")) {
    Node n = root.child("output");
    n.allow_keys({"dir"});
    sc.out_dir = n.str_or("dir", sc.out_dir);
  }
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  json config;
  try {
    config = json::parse(f, nullptr, true, true);  // comments allowed
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse failure in " + path.string() + ": " +
                      e.what());
  }
  Scenario sc = parse_scenario(config);
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

void validate_scenario(Scenario& sc) {
  require(sc.schema_version == 1, "unsupported schema_version");

  const IntegratorSettings& in = sc.integrator;
  require(in.rel_tol > 0.0 && in.abs_tol >= 0.0,
          "integrator tolerances must be positive");
  require(in.h_min > 0.0 && in.h_init >= in.h_min && in.h_max >= in.h_init,
          "integrator step bounds must satisfy 0 < h_min <= h_init <= h_max");
  require(in.fd_delta > 0.0, "integrator fd_delta must be positive");
  require(sc.mode == RunMode::reduced || sc.kind == ScenarioKind::ld4_single,
          "mode applies to ld4_single only");

  const std::size_t np = sc.particles.size();
  const auto who = [](std::size_t i) {
    return "particles[" + std::to_string(i) + "]";
  };
  const auto count = [&](std::size_t want) {
    require(np == want, std::string(to_string(sc.kind)) + " takes exactly " +
                            std::to_string(want) + " particle(s)");
  };
  const auto massive4 = [&](std::size_t i) {
    const ParticleProps& p = sc.particles[i].props;
    require(p.dim == 4, who(i) + ": dim must be 4 for this kind");
    require(!p.massless && p.mass > 0.0, who(i) + ": needs a massive particle");
  };

  for (std::size_t i = 0; i < np; ++i) {
    const ParticleProps& p = sc.particles[i].props;
    if (p.massless) {
      require(sc.kind == ScenarioKind::massless_admissibility ||
                  sc.kind == ScenarioKind::divergence_scan,
              who(i) + ": massless particles are limited to "
                       "massless_admissibility and divergence_scan");
      require(p.mass == 0.0, who(i) + ": massless particle must have mass 0");
    }
    if (p.dim == 6)
      require(sc.kind == ScenarioKind::sixd_single,
              who(i) + ": dim 6 is limited to sixd_single");
  }

  switch (sc.kind) {
    case ScenarioKind::ld4_single: {
      count(1);
      massive4(0);
      require(sc.duration > 0.0, "duration must be positive");
      if (sc.mode != RunMode::reduced)
        require(sc.particles[0].props.charge != 0.0,
                "direct mode needs a nonzero charge (the self-force term "
                "carries 1/e^2)");
      break;
    }
    case ScenarioKind::sixd_single: {
      count(1);
      const ParticleProps& p = sc.particles[0].props;
      require(p.dim == 6, who(0) + ": dim must be 6");
      require(!p.massless && p.mass > 0.0, who(0) + ": needs a massive particle");
      require(sc.duration > 0.0, "duration must be positive");
      bool b_zero = true;
      for (double b : sc.field.B) b_zero = b_zero && b == 0.0;
      require(sc.field.type == FieldSpec::Type::none ||
                  sc.field.type == FieldSpec::Type::coulomb ||
                  (sc.field.type == FieldSpec::Type::uniform && b_zero),
              "6D runs support none, coulomb, and uniform electric fields");
      break;
    }
    case ScenarioKind::two_charge: {
      count(2);
      massive4(0);
      massive4(1);
      require(sc.field.type == FieldSpec::Type::none,
              "two_charge couples the pair through their retarded fields; "
              "field must be none");
      require(sc.duration > 0.0, "duration must be positive");
      require(sc.two_charge.dt > 0.0 && sc.two_charge.pre_history_span > 0.0,
              "two_charge step controls must be positive");
      require(sc.duration >= sc.two_charge.dt,
              "duration must cover at least one step");
      double sep2 = 0.0;
      for (int i = 1; i < 4; ++i) {
        const double d = sc.particles[0].state.z[i] - sc.particles[1].state.z[i];
        sep2 += d * d;
      }
      require(std::sqrt(sep2) > 2.0 * sc.two_charge.dt,
              "initial separation must exceed the shared step, so the "
              "retarded roots stay behind the stage evaluations");
      break;
    }
    case ScenarioKind::massless_admissibility: {
      count(1);
      const ParticleProps& p = sc.particles[0].props;
      require(p.massless, who(0) + ": needs a massless particle");
      require(sc.duration > 0.0, "duration must be positive");
      require(sc.massless.dt > 0.0 && sc.massless.eig_tol > 0.0,
              "massless step controls must be positive");
      break;
    }
    case ScenarioKind::divergence_scan: {
      count(1);
      const ParticleProps& p = sc.particles[0].props;
      require(p.massless, who(0) + ": needs a massless particle");
      require(sc.field.type == FieldSpec::Type::none,
              "the scan integrates the source's own far field; field must "
              "be none");
      const ScanConfig& s = sc.scan;
      require(s.rho > 0.0 && s.t_obs > 0.0 && s.line_pad > 0.0,
              "scan geometry must be positive");
      require(s.knots >= 101, "scan source needs at least 101 knots");
      require(s.theta_min.size() >= 4,
              "scan needs at least 4 cutoffs to constrain the fits");
      for (double c : s.theta_min)
        require(c > 0.0 && c <= M_PI, "scan cutoffs must lie in (0, pi]");
      require(s.n_s >= 4 && s.n_theta >= 4 && s.n_phi >= 4,
              "scan quadrature orders must be at least 4");
      break;
    }
    case ScenarioKind::interference_audit: {
      count(2);
      massive4(0);
      massive4(1);
      require(sc.field.type == FieldSpec::Type::none,
              "interference_audit compares the pair's own fields; field "
              "must be none");
      const InterferenceConfig& ic = sc.interference;
      require(ic.separation > 0.0 && ic.ramp_time > 0.0 && ic.radius > 0.0,
              "interference geometry must be positive");
      require(ic.knots >= 101, "interference lines need at least 101 knots");
      require(ic.n_theta >= 4 && ic.n_phi >= 4 && ic.n_time >= 4,
              "interference quadrature orders must be at least 4");
      const double reach = 0.5 * ic.separation + std::abs(ic.amplitude);
      require(ic.line_t0 <= ic.window_t0 - ic.radius - reach,
              "prescribed lines must cover the causal past of the flux "
              "window (extend line_t0)");
      require(ic.line_t1 >= ic.ramp_time + ic.radius + ic.window_pad,
              "prescribed lines must cover the flux window (extend line_t1)");
      break;
    }
    case ScenarioKind::conformal_audit: {
      count(0);
      require(sc.field.type == FieldSpec::Type::none,
              "conformal_audit draws its own fields; field must be none");
      const ConformalAuditConfig& a = sc.audit;
      require(a.states >= 1, "audit needs at least one state");
      require(a.theta_span > 0.0 && a.b_span > 0.0 && a.x_span > 0.0,
              "audit draw spans must be positive");
      break;
    }
  }

  if (sc.field.type == FieldSpec::Type::tabulated) {
    require(!sc.field.samples.empty(), "tabulated field needs samples");
    for (std::size_t i = 1; i < sc.field.samples.size(); ++i)
      require(sc.field.samples[i].t > sc.field.samples[i - 1].t,
              "tabulated samples must have strictly increasing t");
  }

  const bool skip_state = sc.kind == ScenarioKind::conformal_audit ||
                          sc.kind == ScenarioKind::divergence_scan ||
                          sc.kind == ScenarioKind::interference_audit;
  if (!skip_state)
    for (std::size_t i = 0; i < np; ++i) heal_state(sc.particles[i], who(i));
}

const std::vector<Preset>& preset_gallery() {
  static const std::vector<Preset> gallery = [] {
    std::vector<Preset> g;
    g.push_back({"hyperbola",
                 "uniform-field hyperbola: the self-force vanishes "
                 "identically, so the path must track the radiation-free "
                 "closed form",
                 preset_hyperbola()});
    g.push_back({"circular-orbit",
                 "magnetic circular orbit at half light speed, shedding "
                 "energy at the invariant acceleration rate",
                 preset_circular_orbit()});
    g.push_back({"weak-coupling",
                 "direct and reduced branches of the same weakly coupled "
                 "run, compared pointwise",
                 preset_weak_coupling()});
    g.push_back({"runaway",
                 "free particle with a seeded acceleration: the self-force "
                 "amplifies it at the fixed e-fold rate 3m/2e^2 and the "
                 "detector must fire",
                 preset_runaway()});
    g.push_back({"two-charge-flyby",
                 "light charge passing a heavy one through retarded "
                 "mutual fields; summed momenta plus radiation and work "
                 "integrals stay constant",
                 preset_two_charge_flyby()});
    g.push_back({"massless-null-field",
                 "crossed null field with the ray on its null eigenvector: "
                 "propagation holds the ray and the multiplier follows the "
                 "eigenvalue integral",
                 preset_massless_null_field()});
    g.push_back({"massless-inadmissible",
                 "generic uniform field with a transverse ray: no real null "
                 "eigenvector exists, so the run returns the structured "
                 "inadmissibility verdict",
                 preset_massless_inadmissible()});
    g.push_back({"divergence-scan",
                 "angular energy of a massless circular source against the "
                 "cutoff: divergent and finite parts follow the closed-form "
                 "coefficients",
                 preset_divergence_scan()});
    g.push_back({"interference-audit",
                 "rest-to-rest bounce pair: escaped interference momentum "
                 "must equal the summed mutual work",
                 preset_interference_audit()});
    g.push_back({"sixd-driven",
                 "six-dimensional charge in a weak uniform field: the "
                 "five-slot balance residual stays within the integrator "
                 "budget",
                 preset_sixd_driven()});
    g.push_back({"conformal-audit",
                 "random admissible null eigenstates pushed through "
                 "dilatations and special conformal maps keep the effective "
                 "law's form",
                 preset_conformal_audit()});
    for (Preset& p : g) {
      p.scenario.name = p.name;
      p.scenario.out_dir = "out/" + p.name;
    }
    return g;
  }();
  return gallery;
}

Scenario preset_scenario(const std::string& name) {
  for (const Preset& p : preset_gallery())
    if (p.name == name) return p.scenario;
  throw ConfigError("unknown preset '" + name +
                    "' (see list-presets for the gallery)");
}

RunArtifacts run_scenario(const Scenario& sc, std::ostream& log) {
  const fs::path dir(sc.out_dir);
  fs::create_directories(dir);
  log << "scenario " << to_string(sc.kind)
      << (sc.name.empty() ? "" : " '" + sc.name + "'") << " -> "
      << dir.string() << "\n";

  RunArtifacts art;
  switch (sc.kind) {
    case ScenarioKind::ld4_single: art = run_ld4(sc, log, dir); break;
    case ScenarioKind::sixd_single:
      art = run_sixd_scenario(sc, log, dir);
      break;
    case ScenarioKind::two_charge: art = run_two_charge(sc, log, dir); break;
    case ScenarioKind::massless_admissibility:
      art = run_massless(sc, log, dir);
      break;
    case ScenarioKind::divergence_scan:
      art = run_divergence(sc, log, dir);
      break;
    case ScenarioKind::interference_audit:
      art = run_interference(sc, log, dir);
      break;
    case ScenarioKind::conformal_audit:
      art = run_conformal(sc, log, dir);
      break;
  }
  for (const std::string& f : art.files)
    log << "  wrote " << (dir / f).string() << "\n";
  log << "exit_code " << art.exit_code << "\n";
  return art;
}

}  // namespace rrlab
