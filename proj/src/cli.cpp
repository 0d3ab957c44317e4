#include "duolind/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "duolind/observables.hpp"
#include "duolind/solver.hpp"
#include "duolind/superop.hpp"
#include "duolind/verify.hpp"

#ifndef DUOLIND_VERSION_STRING
#define DUOLIND_VERSION_STRING "0.0.0"
#endif

namespace duolind::cli {

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json config_json(const SimConfig& cfg) {
  return {{"g", cfg.g},          {"gamma1", cfg.gamma1},
          {"gamma2", cfg.gamma2}, {"nbar", cfg.nbar},
          {"cutoff", cfg.cutoff}, {"method", method_name(cfg.method)}};
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw ConfigError("failed while writing '" + path + "'");
}

void write_manifest(const std::string& out_path, nlohmann::json manifest) {
  manifest["tool"] = "duolind";
  manifest["version"] = tool_version();
  manifest["timestamp"] = iso_timestamp();
  write_text_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

struct Rgb {
  double r, g, b;
};

std::string heat_color(double v, bool valid) {
  if (!valid) return "#bbbbbb";
  static const Rgb stops[5] = {{0.267, 0.005, 0.329},
                               {0.229, 0.322, 0.545},
                               {0.127, 0.566, 0.551},
                               {0.369, 0.789, 0.383},
                               {0.993, 0.906, 0.144}};
  v = std::clamp(v, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(v));
  const double f = v - k;
  const auto mix = [&](double a, double b) { return a + f * (b - a); };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(255.0 * mix(stops[k].r, stops[k + 1].r))),
                static_cast<int>(std::lround(255.0 * mix(stops[k].g, stops[k + 1].g))),
                static_cast<int>(std::lround(255.0 * mix(stops[k].b, stops[k + 1].b))));
  return buf;
}

std::string render_heatmap_svg(const CoincidenceGrid& grid) {
  const int nt = static_cast<int>(grid.times.size());
  const int ng = static_cast<int>(grid.gamma1s.size());
  const double left = 70, bottom = 50, top = 40, right = 30;
  const double plot_w = 800, plot_h = 460;
  const double width = left + plot_w + right, height = top + plot_h + bottom;
  const double tmax = grid.times.back();
  const double gmax = std::max(grid.gamma1s.back(), 1e-300);
  const double g = grid.base.g;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"16\">coincidence rate of the photon pair</text>\n";

  const double cw = plot_w / nt, ch = plot_h / ng;
  for (int gi = 0; gi < ng; ++gi) {
    for (int ti = 0; ti < nt; ++ti) {
      const double x = left + ti * cw;
      const double y = top + plot_h - (gi + 1) * ch;
      char cell[160];
      std::snprintf(cell, sizeof(cell),
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                    "fill=\"%s\"/>\n",
                    x, y, cw + 0.5, ch + 0.5,
                    heat_color(grid.p11(ti, gi), grid.valid(ti, gi) != 0).c_str());
      svg << cell;
    }
  }
  // Reference line at the lossless dip position.
  const double dip_x = left + (std::acos(-1.0) / (4.0 * g)) / tmax * plot_w;
  svg << "<line x1=\"" << dip_x << "\" y1=\"" << top << "\" x2=\"" << dip_x
      << "\" y2=\"" << top + plot_h
      << "\" stroke=\"white\" stroke-dasharray=\"4 3\"/>\n";
  svg << "<text x=\"" << dip_x + 4 << "\" y=\"" << top + 16
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"white\">t = "
         "&#960;/4g</text>\n";

  for (int k = 0; k <= 4; ++k) {
    const double tx = left + plot_w * k / 4.0;
    const double tv = tmax * k / 4.0;
    svg << "<line x1=\"" << tx << "\" y1=\"" << top + plot_h << "\" x2=\"" << tx
        << "\" y2=\"" << top + plot_h + 6 << "\" stroke=\"black\"/>\n";
    char lab[160];
    std::snprintf(lab, sizeof(lab),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"12\" text-anchor=\"middle\">%.3g</text>\n",
                  tx, top + plot_h + 20, tv);
    svg << lab;
    const double gy = top + plot_h - plot_h * k / 4.0;
    const double gv = gmax * k / 4.0 / std::max(g, 1e-300);
    svg << "<line x1=\"" << left - 6 << "\" y1=\"" << gy << "\" x2=\"" << left
        << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
    std::snprintf(lab, sizeof(lab),
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"12\" text-anchor=\"end\">%.3g</text>\n",
                  left - 10, gy + 4, gv);
    svg << lab;
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">time (units of 1/g)</text>\n";
  svg << "<text x=\"18\" y=\"" << top + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 " << top + plot_h / 2
      << ")\">damping &#947;&#8321;/g</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string tool_version() { return DUOLIND_VERSION_STRING; }

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    SimConfig cfg = args.common.cfg;
    validate(cfg);
    if (args.number_state && args.thermal_nbar0)
      throw ConfigError("choose either a number state or a thermal state, not both");
    if (args.steps < 1) throw ConfigError("steps must be at least 1");

    const TwoModeSpace space = build_space(cfg.cutoff);
    DensityMatrix rho0{Matrix(), space};
    nlohmann::json state_json;
    if (args.thermal_nbar0) {
      rho0 = thermal_state(space, *args.thermal_nbar0);
      state_json = {{"kind", "thermal"}, {"nbar0", *args.thermal_nbar0}};
    } else {
      const auto [n1, n2] = args.number_state.value_or(std::make_pair(1, 1));
      const int occ = std::max(n1, n2);
      if (occ + 2 > cfg.cutoff)
        throw ConfigError("cutoff margin violation: state |" + std::to_string(n1) +
                          "," + std::to_string(n2) + "> occupies level " +
                          std::to_string(occ) + " and the cutoff must exceed the "
                          "occupation by at least 2 (cutoff >= " +
                          std::to_string(occ + 2) + ")");
      rho0 = density_from_state(number_state(space, n1, n2));
      state_json = {{"kind", "number"}, {"n1", n1}, {"n2", n2}};
    }

    const std::vector<double> times =
        (args.steps == 1) ? std::vector<double>{0.0} : make_grid(args.tmax, args.steps);

    std::ostringstream csv;
    csv << "t,trace,min_eigenvalue,leakage,P11,n1_occ,n2_occ\n";
    for (double t : times) {
      EvolveInfo info;
      const DensityMatrix rho = evolve(rho0, t, cfg, &info);
      const double trace = rho.mat.trace().real();
      csv << format_number(t) << ',' << format_number(trace) << ','
          << format_number(info.min_eig) << ',' << format_number(info.leakage) << ','
          << format_number(coincidence_rate(space, rho.mat)) << ','
          << format_number(mode_occupation(space, rho.mat, 1)) << ','
          << format_number(mode_occupation(space, rho.mat, 2)) << '\n';
    }

    if (args.common.out.empty()) {
      out << csv.str();
    } else {
      write_text_file(args.common.out, csv.str());
      nlohmann::json manifest = {
          {"command", "solve"},
          {"config", config_json(cfg)},
          {"state", state_json},
          {"grid", {{"tmax", args.tmax}, {"steps", args.steps},
                    {"rows", times.size()}}},
          {"seed", args.common.seed},
          {"jobs", args.common.jobs},
          {"output", args.common.out}};
      write_manifest(args.common.out, manifest);
      out << "wrote " << times.size() << " rows to " << args.common.out << "\n";
    }
    return kOk;
  });
}

int cmd_hom(const HomArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    SimConfig cfg = args.common.cfg;
    validate(cfg);
    HomSweepOptions opt = args.grid;
    opt.jobs = std::max(opt.jobs, args.common.jobs);
    const CoincidenceGrid grid = hom_sweep(cfg, opt);

    const int nt = static_cast<int>(grid.times.size());
    const int ng = static_cast<int>(grid.gamma1s.size());
    long invalid = 0;
    std::ostringstream csv;
    csv << "t,gamma1_over_g,P11,valid_flag\n";
    for (int gi = 0; gi < ng; ++gi) {
      for (int ti = 0; ti < nt; ++ti) {
        const int v = grid.valid(ti, gi);
        invalid += (v == 0);
        csv << format_number(grid.times[ti]) << ','
            << format_number(grid.gamma1s[gi] / cfg.g) << ','
            << format_number(grid.p11(ti, gi)) << ',' << v << '\n';
      }
    }

    if (args.common.out.empty()) {
      out << csv.str();
    } else {
      write_text_file(args.common.out, csv.str());
      nlohmann::json columns = nlohmann::json::array();
      for (const ColumnDiagnostics& c : grid.columns)
        columns.push_back({{"gamma1", c.gamma1},
                           {"max_trace_dev", c.max_trace_dev},
                           {"max_leakage", c.max_leakage},
                           {"min_eig_final", c.min_eig_final},
                           {"truncation_warning", c.truncation_warning}});
      nlohmann::json manifest = {
          {"command", "hom"},
          {"config", config_json(cfg)},
          {"grid", {{"tmax", grid.times.back()},
                    {"tpoints", nt},
                    {"gamma1_max", grid.gamma1s.back()},
                    {"gamma1_points", ng},
                    {"cells", static_cast<long>(nt) * ng},
                    {"invalid_cells", invalid}}},
          {"columns", columns},
          {"seed", args.common.seed},
          {"jobs", args.common.jobs},
          {"output", args.common.out}};
      if (!args.render.empty()) manifest["render"] = args.render;
      write_manifest(args.common.out, manifest);
      out << "wrote " << static_cast<long>(nt) * ng << " cells to "
          << args.common.out << " (" << invalid << " invalid)\n";
    }
    if (!args.render.empty()) write_text_file(args.render, render_heatmap_svg(grid));
    return invalid == 0 ? kOk : kFailed;
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    verify::Options opt;
    opt.seed = args.seed;
    opt.tol_override = args.tol_override;
    opt.jobs = args.jobs;
    std::vector<std::string> names = args.suites;
    if (names.empty()) names = verify::suite_names();
    const std::vector<std::string> known = verify::suite_names();
    for (const std::string& name : names)
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError("unknown verification suite '" + name + "'");
    bool all_pass = true;
    for (const std::string& name : names) {
      verify::Suite suite;
      try {
        suite = verify::run_suite(name, opt);
      } catch (const std::exception& e) {
        // One suite blowing up must not silence the others.
        suite.name = name;
        suite.pass = false;
        verify::Check c;
        c.name = "aborted";
        c.detail = e.what();
        suite.checks.push_back(c);
      }
      all_pass = all_pass && suite.pass;
      out << "suite " << suite.name << ": " << (suite.pass ? "PASS" : "FAIL") << "\n";
      for (const verify::Check& c : suite.checks) {
        out << "  " << c.name << ": observed=" << format_number(c.observed)
            << (c.larger_is_better ? " > " : " <= ")
            << "threshold=" << format_number(c.threshold) << " "
            << (c.pass ? "PASS" : "FAIL");
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << "\n";
      }
    }
    out << (all_pass ? "all suites passed" : "some suites FAILED") << "\n";
    return all_pass ? kOk : kFailed;
  });
}

}  // namespace duolind::cli
