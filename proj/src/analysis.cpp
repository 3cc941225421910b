#include "charpt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "charpt/errors.hpp"

namespace charpt {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Non-finite doubles have no JSON literal; they become null.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

Quantity parse_quantity(const std::string& s) {
  if (s == "inv_w") return Quantity::inv_w;
  if (s == "abs_mean") return Quantity::abs_mean;
  if (s == "signed_mean") return Quantity::signed_mean;
  throw ConfigError("unknown quantity '" + s + "' (inv_w, abs_mean, signed_mean)");
}

Measure parse_measure(const std::string& s) {
  if (s == "riemannian") return Measure::riemannian;
  if (s == "sub_riemannian") return Measure::sub_riemannian;
  throw ConfigError("unknown measure '" + s + "' (riemannian, sub_riemannian)");
}

std::vector<Strategy> parse_strategies(const std::string& s) {
  if (s == "cartesian") return {Strategy::cartesian};
  if (s == "rectified") return {Strategy::rectified};
  if (s == "polar" || s == "weighted_polar") return {Strategy::weighted_polar};
  if (s == "all") return {Strategy::cartesian, Strategy::rectified, Strategy::weighted_polar};
  throw ConfigError("unknown strategy '" + s + "' (cartesian, rectified, polar, all)");
}

void validate(const AnalysisConfig& cfg) {
  if (!cfg.window.valid()) throw ConfigError("window must satisfy x0 < x1 and y0 < y1");
  if (cfg.grid_n < 2) throw ConfigError("grid must be at least 2");
  if (cfg.frame != "heisenberg" && cfg.frame != "contact") throw ConfigError("frame must be heisenberg or contact");
  const ScanOptions& s = cfg.scan;
  if (!(s.eps_min > 0.0 && s.eps_min < s.eps_max)) throw ConfigError("require 0 < eps_min < eps_max");
  if (s.eps_min < 1e-8 * s.eps_max * (1.0 - 1e-12)) throw ConfigError("eps_min must be at least 1e-8 eps_max");
  if (!(s.ratio > 0.0 && s.ratio < 1.0)) throw ConfigError("eps ratio must lie in (0, 1)");
  if (!(s.tol > 0.0)) throw ConfigError("tol must be positive");
  if (cfg.strategies.empty()) throw ConfigError("no strategy requested");
}

FrameModel make_frame(const AnalysisConfig& cfg) {
  if (cfg.frame == "heisenberg") return FrameModel::heisenberg();
  ParseOptions po;
  po.allow_z = true;
  return FrameModel::contact(parse_expr(cfg.beta, po), parse_expr(cfg.gamma, po));
}

GraphSurface make_surface(const AnalysisConfig& cfg) { return GraphSurface::parse(cfg.surface, cfg.window); }

namespace {

CharPointRecord classify_or_unresolved(const FrameModel& frame, const GraphSurface& surf, Point2 p,
                                       const AnalysisConfig& cfg) {
  try {
    return classify(frame, surf, p, cfg.locus, cfg.curve);
  } catch (const Error& e) {
    CharPointRecord rec;
    rec.location = p;
    rec.original = surf.to_original(p);
    rec.z = surf.original_z(p);
    rec.cls = PointClass::unresolved;
    rec.note = e.what();
    return rec;
  }
}

} // namespace

Analysis analyze(const FrameModel& frame, const GraphSurface& surf, const AnalysisConfig& cfg) {
  Analysis out;
  const RootSearch rs = find_characteristic_points(frame, surf, cfg.window, cfg.grid_n, cfg.locus);
  out.warnings = rs.warnings;
  const double radius = cfg.locus.isolation_radius * cfg.window.size();
  for (const auto& cluster : cluster_points(rs.points, radius)) {
    Point2 centroid{};
    for (const auto& fp : cluster) centroid = centroid + fp.p;
    centroid = (1.0 / static_cast<double>(cluster.size())) * centroid;
    std::size_t best = 0;
    for (std::size_t i = 1; i < cluster.size(); ++i)
      if ((cluster[i].p - centroid).norm() < (cluster[best].p - centroid).norm()) best = i;
    CharPointRecord rec = classify_or_unresolved(frame, surf, cluster[best].p, cfg);
    if (cluster.size() == 1) {
      rec.isolated = cluster[0].isolated && rec.cls != PointClass::non_isolated;
      out.points.push_back(rec);
      continue;
    }
    if (rec.cls == PointClass::non_isolated || rec.degenerate) {
      const std::string what = rec.cls == PointClass::non_isolated
                                   ? " roots form a non-isolated set"
                                   : " roots collapse onto the degenerate point nearest their centroid";
      rec.isolated = rec.cls != PointClass::non_isolated;
      rec.note += (rec.note.empty() ? "" : "; ") + std::to_string(cluster.size()) + what;
      out.points.push_back(rec);
      continue;
    }
    // Distinct nondegenerate points that happen to lie close together.
    for (const auto& fp : cluster) {
      CharPointRecord r = classify_or_unresolved(frame, surf, fp.p, cfg);
      r.isolated = false;
      out.points.push_back(r);
    }
  }
  for (const auto& r : out.points)
    if (r.cls == PointClass::unresolved || r.cls == PointClass::non_isolated) out.any_unresolved = true;
  return out;
}

Integration integrate(const FrameModel& frame, const GraphSurface& surf, const AnalysisConfig& cfg,
                      const Analysis& analysis) {
  Integration out;
  std::vector<CharPointRecord> centers;
  if (!cfg.centers.empty()) {
    for (Point2 c : cfg.centers) {
      const Point2 local = surf.to_local(c);
      try {
        centers.push_back(classify(frame, surf, local, cfg.locus, cfg.curve));
      } catch (const NotCharacteristic&) {
        CharPointRecord rec;
        rec.location = local;
        rec.original = c;
        rec.cls = PointClass::nondegenerate;
        rec.note = "not a characteristic point";
        centers.push_back(rec);
      }
    }
  } else {
    centers = analysis.points;
  }
  if (centers.empty()) throw ConfigError("no characteristic point found and no --center given");
  const IntegrandSpec spec{cfg.quantity, cfg.measure};
  for (const auto& rec : centers) {
    if (rec.cls == PointClass::non_isolated) {
      out.warnings.push_back("skipping non-isolated set at (" + num(rec.original.x) + ", " + num(rec.original.y) + ")");
      continue;
    }
    const double room = cfg.window.inradius(rec.original);
    if (cfg.scan.eps_max > room)
      throw ConfigError("eps_max " + num(cfg.scan.eps_max) + " exceeds the window inradius " + num(room) +
                        " at (" + num(rec.original.x) + ", " + num(rec.original.y) +
                        "); enlarge the window or select centers explicitly");
    for (Strategy st : cfg.strategies) {
      try {
        switch (st) {
        case Strategy::cartesian:
          out.reports.push_back(scan_cartesian(frame, surf, spec, rec.location, cfg.scan));
          break;
        case Strategy::rectified: {
          if (!frame.plain_heisenberg()) throw ConfigError("the rectified strategy needs the Heisenberg frame");
          const NormalForm nf = rotate_to_normal_form(surf, rec, cfg.locus);
          out.reports.push_back(scan_rectified(nf, spec, cfg.scan));
          break;
        }
        case Strategy::weighted_polar: {
          if (!frame.plain_heisenberg()) throw ConfigError("the weighted polar strategy needs the Heisenberg frame");
          if (rec.cls != PointClass::mildly_degenerate)
            throw NotMild("weighted polar coordinates need a mildly degenerate point");
          const NormalForm nf = rotate_to_normal_form(surf, rec, cfg.locus);
          out.reports.push_back(scan_weighted_polar(nf, spec, rec.order_k, rec.xi_leading, cfg.scan));
          break;
        }
        }
      } catch (const Error& e) {
        if (!cfg.all_strategies) throw;
        out.warnings.push_back(std::string(to_string(st)) + " skipped at (" + num(rec.original.x) + ", " +
                               num(rec.original.y) + "): " + e.what());
      }
    }
  }
  return out;
}

CurveReport critical_curve(const FrameModel& frame, const GraphSurface& surf, const AnalysisConfig& cfg,
                           const Analysis& analysis) {
  for (const auto& rec : analysis.points) {
    if (!rec.degenerate) continue;
    if (!frame.plain_heisenberg()) throw ConfigError("critical curves are traced in the Heisenberg frame only");
    CurveReport cr;
    cr.point = rec;
    const NormalForm nf = rotate_to_normal_form(surf, rec, cfg.locus);
    CurveOptions c = cfg.curve;
    c.need_z = true;
    c.x_max = std::min(c.x_max, 0.5 * cfg.window.inradius(rec.original));
    cr.curve = trace_critical_curve(nf, c);
    return cr;
  }
  throw NoDegeneratePoint("no degenerate characteristic point in the window");
}

json to_json(const AnalysisConfig& cfg) {
  json strategies = json::array();
  for (Strategy s : cfg.strategies) strategies.push_back(to_string(s));
  json centers = json::array();
  for (Point2 c : cfg.centers) centers.push_back({c.x, c.y});
  return json{{"surface", cfg.surface},
              {"window", {cfg.window.x0, cfg.window.x1, cfg.window.y0, cfg.window.y1}},
              {"frame", cfg.frame},
              {"beta", cfg.beta},
              {"gamma", cfg.gamma},
              {"grid", cfg.grid_n},
              {"tol_char", cfg.locus.tol_char},
              {"tol_degenerate", cfg.locus.tol_degenerate},
              {"k_max", cfg.locus.k_max},
              {"eps_max", cfg.scan.eps_max},
              {"eps_min", cfg.scan.eps_min},
              {"eps_ratio", cfg.scan.ratio},
              {"tol", cfg.scan.tol},
              {"tol_verdict", cfg.scan.tol_verdict},
              {"quantity", to_string(cfg.quantity)},
              {"measure", to_string(cfg.measure)},
              {"strategies", strategies},
              {"centers", centers}};
}

json to_json(const CharPointRecord& rec) {
  return json{{"x", rec.original.x},
              {"y", rec.original.y},
              {"z", jnum(rec.z)},
              {"hessian", {{rec.hessian[0][0], rec.hessian[0][1]}, {rec.hessian[1][0], rec.hessian[1][1]}}},
              {"det", rec.det},
              {"class", to_string(rec.cls)},
              {"N", {rec.N.x, rec.N.y}},
              {"theta", rec.theta},
              {"alpha", rec.alpha},
              {"order_k", rec.order_k},
              {"xi_leading", jnum(rec.xi_leading)},
              {"degenerate", rec.degenerate},
              {"ill_conditioned", rec.ill_conditioned},
              {"isolated", rec.isolated},
              {"order_mode", rec.order_mode},
              {"note", rec.note}};
}

json to_json(const IntegrabilityReport& rep) {
  json annuli = json::array();
  for (const auto& a : rep.annuli)
    annuli.push_back({{"eps", a.eps},
                      {"value", jnum(a.value)},
                      {"error", jnum(a.error)},
                      {"increment", jnum(a.increment)},
                      {"converged", a.converged}});
  return json{{"center", {rep.center.x, rep.center.y}},
              {"quantity", to_string(rep.spec.quantity)},
              {"measure", to_string(rep.spec.measure)},
              {"strategy", to_string(rep.strategy)},
              {"ladder", rep.ladder},
              {"ratio", rep.ratio},
              {"outer_radius", rep.outer_radius},
              {"annuli", annuli},
              {"verdict", to_string(rep.verdict)},
              {"limit", jnum(rep.limit)},
              {"tail_bound", jnum(rep.tail_bound)},
              {"growth_exponent", jnum(rep.growth_exponent)},
              {"decay_exponent", jnum(rep.decay_exponent)},
              {"quadrature_error", jnum(rep.quadrature_error)},
              {"notes", rep.notes}};
}

json make_report(const AnalysisConfig& cfg, const Analysis& analysis, const Integration* integration) {
  json points = json::array();
  for (const auto& r : analysis.points) points.push_back(to_json(r));
  json integ = json::array();
  std::vector<std::string> warnings = analysis.warnings;
  if (integration) {
    for (const auto& r : integration->reports) integ.push_back(to_json(r));
    warnings.insert(warnings.end(), integration->warnings.begin(), integration->warnings.end());
  }
  return json{{"schema", kSchema},
              {"version", kVersion},
              {"config", to_json(cfg)},
              {"char_points", points},
              {"integrability", integ},
              {"warnings", warnings}};
}

std::string check_report_schema(const json& r) {
  auto one_of = [](const json& v, std::initializer_list<const char*> allowed) {
    if (!v.is_string()) return false;
    for (const char* a : allowed)
      if (v.get<std::string>() == a) return true;
    return false;
  };
  auto is_num = [](const json& v) { return v.is_number() || v.is_null(); };
  if (!r.is_object()) return "report is not an object";
  if (r.value("schema", "") != kSchema) return "schema tag missing or wrong";
  for (const char* k : {"config", "char_points", "integrability"})
    if (!r.contains(k)) return std::string("missing top-level key ") + k;
  if (!r["config"].is_object()) return "config is not an object";
  if (!r["char_points"].is_array() || !r["integrability"].is_array()) return "point or integrability list is not an array";
  for (const auto& p : r["char_points"]) {
    for (const char* k : {"x", "y", "z", "det", "theta", "alpha", "order_k", "xi_leading"})
      if (!p.contains(k) || !is_num(p[k])) return std::string("char_point key ") + k + " missing or not numeric";
    if (!p.contains("hessian") || !p["hessian"].is_array() || p["hessian"].size() != 2) return "bad hessian";
    for (const auto& row : p["hessian"])
      if (!row.is_array() || row.size() != 2) return "bad hessian row";
    if (!p.contains("N") || !p["N"].is_array() || p["N"].size() != 2) return "bad N";
    if (!p.contains("class") ||
        !one_of(p["class"], {"nondegenerate", "mildly_degenerate", "not_mildly_degenerate", "unresolved", "non_isolated"}))
      return "bad class";
  }
  for (const auto& q : r["integrability"]) {
    if (!q.contains("center") || !q["center"].is_array() || q["center"].size() != 2) return "bad center";
    if (!q.contains("quantity") || !one_of(q["quantity"], {"inv_w", "abs_mean", "signed_mean"})) return "bad quantity";
    if (!q.contains("measure") || !one_of(q["measure"], {"riemannian", "sub_riemannian"})) return "bad measure";
    if (!q.contains("strategy") || !one_of(q["strategy"], {"cartesian", "rectified", "weighted_polar"}))
      return "bad strategy";
    if (!q.contains("verdict") || !one_of(q["verdict"], {"converged", "diverged", "inconclusive"})) return "bad verdict";
    for (const char* k : {"limit", "tail_bound", "growth_exponent"})
      if (!q.contains(k) || !is_num(q[k])) return std::string("integrability key ") + k + " missing or not numeric";
    if (!q.contains("annuli") || !q["annuli"].is_array()) return "bad annuli";
    for (const auto& a : q["annuli"])
      for (const char* k : {"eps", "value", "error"})
        if (!a.contains(k) || !is_num(a[k])) return std::string("annulus key ") + k + " missing or not numeric";
  }
  return {};
}

std::string integration_csv(const Integration& integration) {
  std::string out = "center_x,center_y,quantity,measure,strategy,eps,value,error\n";
  for (const auto& r : integration.reports)
    for (const auto& a : r.annuli)
      out += num(r.center.x) + "," + num(r.center.y) + "," + to_string(r.spec.quantity) + "," +
             to_string(r.spec.measure) + "," + to_string(r.strategy) + "," + num(a.eps) + "," + num(a.value) + "," +
             num(a.error) + "\n";
  return out;
}

std::string curve_csv(const CurveReport& cr) {
  std::string out = "x_param,x,y,z,xi\n";
  auto row = [&](const CurveSample& s) {
    if (!s.valid) return;
    out += num(s.x_param) + "," + num(s.original.x) + "," + num(s.original.y) + "," + num(s.z) + "," + num(s.xi) + "\n";
  };
  // Ascending x_param: the negative side is stored from far to near, the
  // positive side likewise.
  for (const auto& s : cr.curve.negative) row(s);
  for (auto it = cr.curve.positive.rbegin(); it != cr.curve.positive.rend(); ++it) row(*it);
  return out;
}

} // namespace charpt
