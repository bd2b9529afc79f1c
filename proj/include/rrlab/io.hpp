#pragma once

// Artifact writers: worldline CSV, divergence-scan CSV, JSON-lines
// telemetry, and summary JSON. Floating-point fields print with 17
// significant digits, so identical runs produce bitwise-identical files
// on one platform.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "rrlab/dynamics.hpp"
#include "rrlab/radiation.hpp"
#include "rrlab/worldline.hpp"

namespace rrlab {

// %.17g: enough digits to reconstruct the double exactly.
std::string format_double(double x);

// ADL serializers; nlohmann objects order keys, so records with the same
// content dump identically.
void to_json(nlohmann::json& j, const LorentzVector& v);
void to_json(nlohmann::json& j, const BalanceReport& r);

// Columns: tau, z0..z{d-1}, u0.., a0.., da0.., dda0..; comment lines carry
// dim and the particle properties as key=value pairs.
void write_worldline_csv(std::ostream& os, const Worldline& w);
void write_worldline_csv(const std::filesystem::path& path,
                         const Worldline& w);

// Columns: theta_min, energy, px, py, pz, error_estimate; comment lines
// carry the emission-window invariants the fits are checked against.
void write_divergence_csv(std::ostream& os, const DivergenceScan& scan);
void write_divergence_csv(const std::filesystem::path& path,
                          const DivergenceScan& scan);

// One JSON object per line, flushed on destruction.
class TelemetryWriter {
 public:
  explicit TelemetryWriter(const std::filesystem::path& path);
  explicit TelemetryWriter(std::ostream& os) : os_(&os) {}

  void write(const nlohmann::json& record);
  int records() const { return records_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
  int records_ = 0;
};

// Pretty-printed with a trailing newline.
void write_summary(const std::filesystem::path& path,
                   const nlohmann::json& summary);

}  // namespace rrlab
