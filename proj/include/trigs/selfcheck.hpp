#pragma once

#include <optional>
#include <string>
#include <vector>

namespace trigs {

struct SelfCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Names of the closed-form oracle checks, in run order.
std::vector<std::string> self_check_names();

/// Critically damped oscillator, quadratic viscosity point, Huber envelope
/// and fixed-step order probe. `rel_tol` overrides the adaptive integrator
/// tolerance used by the oscillator check.
std::vector<SelfCheck> run_self_checks(std::optional<double> rel_tol = std::nullopt);

}  // namespace trigs
