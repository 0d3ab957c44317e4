#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace duolind::verify {

struct Check {
  std::string name;
  double observed = 0.0;   // residual or quantity under test
  double threshold = 0.0;
  bool larger_is_better = false;  // e.g. strict-inequality checks
  bool pass = false;
  std::string detail;
};

struct Suite {
  std::string name;
  std::vector<Check> checks;
  bool pass = true;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 20260816;
  std::optional<double> tol_override;  // replaces every residual threshold
  int jobs = 1;
};

// Suite names double as CLI filters.
Suite run_hom_dip(const Options& opt);            // "hom-dip"
Suite run_hom_thermal(const Options& opt);        // "hom-thermal"
Suite run_oracle_equivalence(const Options& opt); // "oracle"
Suite run_superop_algebra(const Options& opt);    // "algebra"
Suite run_transform_params(const Options& opt);   // "params"
Suite run_diagonalization(const Options& opt);    // "diagonalization"
Suite run_conjugation(const Options& opt);        // "conjugation"
Suite run_thermalization(const Options& opt);     // "thermalization"

std::vector<std::string> suite_names();
Suite run_suite(const std::string& name, const Options& opt);  // ConfigError on unknown name

}  // namespace duolind::verify
