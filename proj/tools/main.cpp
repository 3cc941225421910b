// charpoint-lab: characteristic points of graph surfaces in the Heisenberg
// group and integrability of 1/W and H near them.
//
//   charpoint-lab analyze   --surface "x*y/2 + x^2*y"
//   charpoint-lab integrate --surface "0" --eps-max 1 --json report.json
//   charpoint-lab curve     --surface "x*y/2 + x^2*y" --csv curve.csv

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "charpt/analysis.hpp"
#include "charpt/errors.hpp"

using namespace charpt;

namespace {

Window parse_window(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("window entry '" + item + "' is not a number");
    }
  }
  if (v.size() != 4) throw ConfigError("window needs four numbers x0,x1,y0,y1");
  return {v[0], v[1], v[2], v[3]};
}

Point2 parse_center(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("center needs two numbers x,y");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("center '" + s + "' is not a pair of numbers");
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw ConfigError("failed writing " + path);
}

void print_points(const Analysis& a) {
  std::printf("%-4s %-13s %-13s %-23s %-12s %-3s %-12s %s\n", "#", "x", "y", "class", "det", "k", "xi_leading",
              "note");
  int i = 0;
  for (const auto& r : a.points)
    std::printf("%-4d %-13.6g %-13.6g %-23s %-12.6g %-3d %-12.6g %s\n", i++, r.original.x, r.original.y,
                to_string(r.cls), r.det, r.order_k, r.xi_leading, r.note.c_str());
  if (a.points.empty()) std::printf("(no characteristic points in the window)\n");
}

void print_reports(const Integration& in) {
  for (const auto& r : in.reports) {
    std::printf("\n%s / %s / %s at (%.6g, %.6g)\n", to_string(r.spec.quantity), to_string(r.spec.measure),
                to_string(r.strategy), r.center.x, r.center.y);
    std::printf("  %-14s %-22s %-12s\n", r.ladder.c_str(), "cumulative", "error");
    for (const auto& s : r.annuli) std::printf("  %-14.6g %-22.15g %-12.3g\n", s.eps, s.value, s.error);
    std::printf("  verdict %s  limit %.15g  tail_bound %.3g", to_string(r.verdict), r.limit, r.tail_bound);
    if (r.verdict == Verdict::diverged) std::printf("  growth_exponent %.4g", r.growth_exponent);
    std::printf("\n");
    for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
  }
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::fprintf(stderr, "warning: %s\n", s.c_str());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic points of Heisenberg graph surfaces and integrability of 1/W and H near them"};
  app.require_subcommand(1);

  AnalysisConfig cfg;
  std::string surface_file, window = "-1,1,-1,1", quantity = "inv_w", measure = "riemannian", strategy = "cartesian";
  std::vector<std::string> centers;

  auto add_common = [&](CLI::App* sub) {
    auto* s = sub->add_option("--surface", cfg.surface, "graph z = g(x, y), e.g. \"x*y/2 + x^2*y\"");
    auto* f = sub->add_option("--surface-file", surface_file, "file holding the surface expression");
    s->excludes(f);
    sub->add_option("--window", window, "x0,x1,y0,y1")->capture_default_str();
    sub->add_option("--grid", cfg.grid_n, "root-search grid size")->capture_default_str();
    sub->add_option("--frame", cfg.frame, "heisenberg or contact")->capture_default_str();
    sub->add_option("--beta", cfg.beta, "beta(x, y, z) of the contact normal form")->capture_default_str();
    sub->add_option("--gamma", cfg.gamma, "gamma(x, y, z) of the contact normal form")->capture_default_str();
    sub->add_option("--tol-char", cfg.locus.tol_char, "characteristic residual tolerance")->capture_default_str();
    sub->add_option("--tol-degenerate", cfg.locus.tol_degenerate, "relative determinant tolerance")
        ->capture_default_str();
    sub->add_option("--k-max", cfg.locus.k_max, "largest order of vanishing reported as finite")
        ->capture_default_str();
    sub->add_option("--json", cfg.json_path, "write the JSON report here");
    sub->add_option("--csv", cfg.csv_path, "write CSV output here");
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "locate and classify characteristic points");
  add_common(analyze_cmd);
  auto* integrate_cmd = app.add_subcommand("integrate", "integrability scans around characteristic points");
  add_common(integrate_cmd);
  integrate_cmd->add_option("--eps-max", cfg.scan.eps_max, "outer radius of the scan")->capture_default_str();
  integrate_cmd->add_option("--eps-min", cfg.scan.eps_min, "innermost ladder value")->capture_default_str();
  integrate_cmd->add_option("--eps-ratio", cfg.scan.ratio, "ladder ratio eps_{n+1}/eps_n")->capture_default_str();
  integrate_cmd->add_option("--quantity", quantity, "inv_w, abs_mean or signed_mean")->capture_default_str();
  integrate_cmd->add_option("--measure", measure, "riemannian or sub_riemannian")->capture_default_str();
  integrate_cmd->add_option("--strategy", strategy, "cartesian, rectified, polar or all")->capture_default_str();
  integrate_cmd->add_option("--tol", cfg.scan.tol, "per-shell relative tolerance")->capture_default_str();
  integrate_cmd->add_option("--tol-verdict", cfg.scan.tol_verdict, "relative tail bound for convergence")
      ->capture_default_str();
  integrate_cmd->add_option("--center", centers, "explicit center x,y (repeatable)");
  integrate_cmd->add_flag("--serial", [&](std::int64_t) { cfg.scan.parallel = false; }, "disable OpenMP");
  auto* curve_cmd = app.add_subcommand("curve", "critical curve and xi samples through a degenerate point");
  add_common(curve_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!surface_file.empty()) {
      std::ifstream in(surface_file);
      if (!in) throw ConfigError("cannot read " + surface_file);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg.surface = ss.str();
    }
    if (cfg.surface.empty()) throw ConfigError("give --surface or --surface-file");
    cfg.window = parse_window(window);
    cfg.quantity = parse_quantity(quantity);
    cfg.measure = parse_measure(measure);
    cfg.strategies = parse_strategies(strategy);
    cfg.all_strategies = strategy == "all";
    for (const auto& c : centers) cfg.centers.push_back(parse_center(c));
    validate(cfg);

    const FrameModel frame = make_frame(cfg);
    const GraphSurface surf = make_surface(cfg);
    const Analysis analysis = analyze(frame, surf, cfg);
    print_warnings(analysis.warnings);

    if (curve_cmd->parsed()) {
      const CurveReport cr = critical_curve(frame, surf, cfg, analysis);
      print_warnings(cr.curve.gaps);
      const std::string csv = curve_csv(cr);
      if (cfg.csv_path.empty())
        std::fputs(csv.c_str(), stdout);
      else
        write_file(cfg.csv_path, csv);
      if (!cfg.json_path.empty()) write_file(cfg.json_path, make_report(cfg, analysis, nullptr).dump(2) + "\n");
      return 0;
    }

    print_points(analysis);
    if (integrate_cmd->parsed()) {
      const Integration integration = integrate(frame, surf, cfg, analysis);
      print_warnings(integration.warnings);
      print_reports(integration);
      if (!cfg.csv_path.empty()) write_file(cfg.csv_path, integration_csv(integration));
      if (!cfg.json_path.empty()) write_file(cfg.json_path, make_report(cfg, analysis, &integration).dump(2) + "\n");
    } else if (!cfg.json_path.empty()) {
      write_file(cfg.json_path, make_report(cfg, analysis, nullptr).dump(2) + "\n");
    }
    return analysis.any_unresolved ? 2 : 0;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
