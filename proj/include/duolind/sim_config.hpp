#pragma once

#include <string>

#include "duolind/types.hpp"

namespace duolind {

enum class Method { automatic, diagonalized, direct };

std::string method_name(Method m);
Method method_from_name(const std::string& name);  // ConfigError on unknown name

// Physical and numerical parameters of one simulation.
struct SimConfig {
  double g = 1.0;        // beam-splitter coupling, > 0
  double gamma1 = 0.0;   // mode-1 damping rate, >= 0
  double gamma2 = 0.0;   // mode-2 damping rate, >= 0
  double nbar = 0.0;     // bath occupation, >= 0
  int cutoff = 6;        // per-mode truncation, >= 1
  Method method = Method::automatic;

  double gamma_sum() const { return gamma1 + gamma2; }
  double delta() const { return gamma2 - gamma1; }
};

// Throws ConfigError on invalid parameter ranges.
void validate(const SimConfig& cfg);

}  // namespace duolind
