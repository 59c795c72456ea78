#include "trigs/rates.hpp"

#include "trigs/types.hpp"

#include <algorithm>
#include <cmath>

namespace trigs {

RateEstimate fit_rate(const std::string& quantity, const std::vector<double>& times,
                      const std::vector<double>& values, double t_lo, double t_hi,
                      std::optional<double> target_exponent) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_rate: times and values differ in length");
    RateEstimate r;
    r.quantity = quantity;
    r.t_lo = t_lo;
    r.t_hi = t_hi;
    r.target_exponent = target_exponent;

    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (t < t_lo || t > t_hi) continue;
        const double v = values[k];
        if (!std::isfinite(v) || v <= kRoundingFloor || !(t > 0.0)) {
            ++r.points_excluded;
            continue;
        }
        lx.push_back(std::log(t));
        ly.push_back(std::log(v));
        if (target_exponent) {
            const double scaled = v * std::pow(t, *target_exponent);
            r.sup_scaled = r.sup_scaled ? std::max(*r.sup_scaled, scaled) : scaled;
        }
    }
    r.points_used = static_cast<int>(lx.size());
    if (lx.size() < 10)
        throw InsufficientData(quantity + ": only " + std::to_string(lx.size()) +
                               " usable points in [" + std::to_string(t_lo) + ", " +
                               std::to_string(t_hi) + "] (" + std::to_string(r.points_excluded) +
                               " at the rounding floor)");

    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InsufficientData(quantity + ": window has a single distinct time");
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    const double ss_res = std::max(0.0, syy - r.slope * sxy);
    r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return r;
}

ScalingCheck bounded_scaling(const std::string& quantity, const std::vector<double>& times,
                             const std::vector<double>& values, double exponent, double t_lo,
                             double t_hi, double factor) {
    if (times.size() != values.size())
        throw std::invalid_argument("bounded_scaling: times and values differ in length");
    ScalingCheck c;
    c.quantity = quantity;
    c.exponent = exponent;
    c.t_lo = t_lo;
    c.t_hi = t_hi;
    c.factor = factor;

    std::size_t first = 0;
    while (first < times.size() && times[first] < t_lo) ++first;
    if (first == times.size() || times[first] > t_hi)
        throw InsufficientData(quantity + ": no sample in the scaling window");

    const double v0 = values[first];
    c.floor_limited = !(v0 > kRoundingFloor);
    c.reference = std::max(std::isfinite(v0) ? v0 : 0.0, kRoundingFloor) *
                  std::pow(times[first], exponent);
    c.sup = 0.0;
    bool finite = true;
    for (std::size_t k = first; k < times.size() && times[k] <= t_hi; ++k) {
        const double v = values[k];
        if (!std::isfinite(v)) {
            finite = false;
            continue;
        }
        if (v <= kRoundingFloor) continue;
        c.sup = std::max(c.sup, v * std::pow(times[k], exponent));
    }
    c.passed = finite && c.sup <= factor * c.reference;
    return c;
}

}  // namespace trigs
