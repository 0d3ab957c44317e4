#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "duolind/observables.hpp"
#include "duolind/sim_config.hpp"

namespace duolind::cli {

std::string tool_version();

// 17 significant digits, C locale, no trailing junk.
std::string format_number(double v);

struct CommonArgs {
  SimConfig cfg;
  std::string out;
  std::uint64_t seed = 20260816;
  int jobs = 1;
};

struct SolveArgs {
  CommonArgs common;
  double tmax = 1.0;
  int steps = 201;  // steps == 1 emits the single row t = 0
  std::optional<std::pair<int, int>> number_state;  // default (1,1)
  std::optional<double> thermal_nbar0;
};

struct HomArgs {
  CommonArgs common;
  HomSweepOptions grid;
  std::string render;  // optional SVG heatmap path
};

struct VerifyArgs {
  std::uint64_t seed = 20260816;
  std::optional<double> tol_override;
  std::vector<std::string> suites;  // empty runs all
  int jobs = 1;
};

// Each returns a process exit code: 0 ok, 1 failed checks or truncated
// results, 2 usage or configuration errors. Errors are reported on `err`.
int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err);
int cmd_hom(const HomArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err);

}  // namespace duolind::cli
