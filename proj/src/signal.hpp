#pragma once

// Square-wave gated integration: a baseband signal multiplied by a unit
// square carrier with `carrier_n` periods across I, integrated only during
// the first `duty` fraction of each period.

#include <cstddef>
#include <vector>

#include "modified_sums.hpp"

namespace modsum {

struct GatedSignalSpec {
  RealFunction f;
  std::size_t carrier_n = 1;
  double duty = 0.5;
};

// Left-tagged modified sum over uniform(I, carrier_n) with images of
// relative length `duty` anchored at the start of each period.
double gated_integral(const GatedSignalSpec& spec, const Weight& w);

// Integrates f exactly(ish) over every gate: midpoint rule with
// `sub_cells` Psi-weighted cells per gate.
double gated_integral_reference(const GatedSignalSpec& spec, const Weight& w, std::size_t sub_cells = 64);

// Convergence of the gated sums toward duty * integral of f psi as the
// carrier frequency grows.
ConvergenceReport retrieval_study(const RealFunction& f, const Weight& w, const std::vector<std::size_t>& carrier_n,
                                  double duty, double tol = 1e-3);

}  // namespace modsum
