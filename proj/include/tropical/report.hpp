#pragma once

#include <string>
#include <vector>

#include "tropical/equil.hpp"

namespace tropical {

/// Equilibration report as JSON text. Rationals are "p/q" strings, branch
/// pairs are [j, k] or null for unconstrained equations.
std::string equilibration_report(const OdeSystem& sys, const std::vector<ExponentSolution>& solutions);

}  // namespace tropical
