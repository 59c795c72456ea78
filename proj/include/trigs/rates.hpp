#pragma once

#include "trigs/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace trigs {

/// Log-log least-squares decay fit of one diagnostic quantity.
struct RateEstimate {
    std::string quantity;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// Theory says quantity = O(t^{-target_exponent}); slope target is its negative.
    std::optional<double> target_exponent;
    /// max over the window of quantity * t^{target_exponent}.
    std::optional<double> sup_scaled;
    int points_used = 0;
    int points_excluded = 0;  // at the rounding floor or non-finite
};

/// Fits log(value) = intercept + slope log(t) over samples with t in
/// [t_lo, t_hi]. Throws InsufficientData below 10 usable points.
RateEstimate fit_rate(const std::string& quantity, const std::vector<double>& times,
                      const std::vector<double>& values, double t_lo, double t_hi,
                      std::optional<double> target_exponent = std::nullopt);

/// Literal reading of an O(t^{-k}) claim over [t_lo, t_hi]:
/// sup quantity * t^k <= factor * (quantity * t^k at the first sample >= t_lo).
/// Values at the rounding floor count as zero in the sup; the reference
/// value is raised to the floor.
struct ScalingCheck {
    std::string quantity;
    double exponent = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double reference = 0.0;
    double sup = 0.0;
    double factor = 10.0;
    bool floor_limited = false;
    bool passed = false;
};

ScalingCheck bounded_scaling(const std::string& quantity, const std::vector<double>& times,
                             const std::vector<double>& values, double exponent, double t_lo,
                             double t_hi, double factor = 10.0);

}  // namespace trigs
