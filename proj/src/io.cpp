#include "rrlab/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace rrlab {

namespace {

void open_or_throw(std::ofstream& f, const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  f.open(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
}

void write_vector_cells(std::ostream& os, const LorentzVector& v) {
  for (int i = 0; i < v.dim; ++i) os << ',' << format_double(v[i]);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void to_json(nlohmann::json& j, const LorentzVector& v) {
  j = nlohmann::json::array();
  for (int i = 0; i < v.dim; ++i) j.push_back(v[i]);
}

void to_json(nlohmann::json& j, const BalanceReport& r) {
  j = nlohmann::json{{"tau", r.tau},
                     {"h", r.h},
                     {"step_error", r.step_error},
                     {"em_residual", inf_norm(r.em_residual)},
                     {"am_residual", inf_norm(r.am_residual)},
                     {"mass_drift", r.mass_drift},
                     {"velocity_norm_drift", r.velocity_norm_drift}};
}

void write_worldline_csv(std::ostream& os, const Worldline& w) {
  const ParticleProps& p = w.props();
  os << "# dim=" << p.dim << " mass=" << format_double(p.mass)
     << " charge=" << format_double(p.charge)
     << " mu6=" << format_double(p.mu6)
     << " massless=" << (p.massless ? 1 : 0) << '\n';
  os << "tau";
  for (const char* name : {"z", "u", "a", "da", "dda"})
    for (int i = 0; i < p.dim; ++i) os << ',' << name << i;
  os << '\n';
  for (const WorldlinePoint& pt : w.points()) {
    os << format_double(pt.tau);
    write_vector_cells(os, pt.z);
    write_vector_cells(os, pt.u);
    write_vector_cells(os, pt.a);
    write_vector_cells(os, pt.da);
    write_vector_cells(os, pt.dda);
    os << '\n';
  }
}

void write_worldline_csv(const std::filesystem::path& path,
                         const Worldline& w) {
  std::ofstream f;
  open_or_throw(f, path);
  write_worldline_csv(f, w);
}

void write_divergence_csv(std::ostream& os, const DivergenceScan& scan) {
  os << "# a2_integral=" << format_double(scan.a2_integral);
  for (int i = 0; i < 3; ++i)
    os << " a2v_integral" << (i + 1) << '='
       << format_double(scan.a2v_integral[static_cast<std::size_t>(i)]);
  os << " s0=" << format_double(scan.s0) << " s1=" << format_double(scan.s1)
     << " no_divergence=" << (scan.no_divergence ? 1 : 0) << '\n';
  os << "theta_min,energy,px,py,pz,error_estimate\n";
  for (const DivergenceScanRow& row : scan.rows) {
    os << format_double(row.theta_min) << ',' << format_double(row.energy);
    for (double p : row.momentum) os << ',' << format_double(p);
    os << ',' << format_double(row.error) << '\n';
  }
}

void write_divergence_csv(const std::filesystem::path& path,
                          const DivergenceScan& scan) {
  std::ofstream f;
  open_or_throw(f, path);
  write_divergence_csv(f, scan);
}

TelemetryWriter::TelemetryWriter(const std::filesystem::path& path) {
  open_or_throw(file_, path);
  os_ = &file_;
}

void TelemetryWriter::write(const nlohmann::json& record) {
  *os_ << record.dump() << '\n';
  ++records_;
}

void write_summary(const std::filesystem::path& path,
                   const nlohmann::json& summary) {
  std::ofstream f;
  open_or_throw(f, path);
  f << summary.dump(2) << '\n';
}

}  // namespace rrlab
