#pragma once

// End-to-end pipeline shared by the command-line front end and the tests:
// configuration, point detection with cluster handling, integrability scans
// and the machine-readable report (schema "charpoint-lab/1").

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "charpt/charlocus.hpp"
#include "charpt/geometry.hpp"
#include "charpt/quadrature.hpp"
#include "charpt/surface.hpp"

namespace charpt {

inline constexpr const char* kSchema = "charpoint-lab/1";
inline constexpr const char* kVersion = "0.1.0";

struct AnalysisConfig {
  std::string surface;
  Window window{};
  std::string frame = "heisenberg"; // or "contact"
  std::string beta = "0";
  std::string gamma = "0";
  int grid_n = 64;
  CharLocusOptions locus{};
  CurveOptions curve{};
  ScanOptions scan{};
  Quantity quantity = Quantity::inv_w;
  Measure measure = Measure::riemannian;
  std::vector<Strategy> strategies{Strategy::cartesian};
  bool all_strategies = false; // skip strategies that do not apply instead of failing
  std::vector<Point2> centers; // explicit centers in original coordinates
  std::string json_path;
  std::string csv_path;
};

// Throws ConfigError on an empty window, a bad ladder or an unknown frame.
void validate(const AnalysisConfig& cfg);

FrameModel make_frame(const AnalysisConfig& cfg);
GraphSurface make_surface(const AnalysisConfig& cfg);

struct Analysis {
  std::vector<CharPointRecord> points;
  std::vector<std::string> warnings;
  bool any_unresolved = false; // unresolved or non_isolated
};

// Root search, clustering and classification. A cluster of roots is
// classified at the root nearest its centroid; a non-isolated or degenerate
// centre stands for the whole cluster.
Analysis analyze(const FrameModel& frame, const GraphSurface& surf, const AnalysisConfig& cfg);

struct Integration {
  std::vector<IntegrabilityReport> reports;
  std::vector<std::string> warnings;
};

// One report per (center, strategy). Centers come from cfg.centers when given,
// else from the classified points.
Integration integrate(const FrameModel& frame, const GraphSurface& surf, const AnalysisConfig& cfg,
                      const Analysis& analysis);

// First degenerate point and its critical curve. Throws NoDegeneratePoint.
struct CurveReport {
  CharPointRecord point;
  CriticalCurve curve;
};
CurveReport critical_curve(const FrameModel& frame, const GraphSurface& surf, const AnalysisConfig& cfg,
                           const Analysis& analysis);

nlohmann::json to_json(const AnalysisConfig& cfg);
nlohmann::json to_json(const CharPointRecord& rec);
nlohmann::json to_json(const IntegrabilityReport& rep);
nlohmann::json make_report(const AnalysisConfig& cfg, const Analysis& analysis, const Integration* integration);

// Checks the top-level layout and the enumerated string values of a report.
// Returns an empty string when valid, else the first problem found.
std::string check_report_schema(const nlohmann::json& report);

std::string integration_csv(const Integration& integration);
std::string curve_csv(const CurveReport& cr);

Quantity parse_quantity(const std::string& s);
Measure parse_measure(const std::string& s);
std::vector<Strategy> parse_strategies(const std::string& s);

} // namespace charpt
