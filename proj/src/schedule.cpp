#include "trigs/schedule.hpp"

#include "trigs/types.hpp"

#include <cmath>
#include <sstream>

namespace trigs {

RegularizationSchedule RegularizationSchedule::power_law(double c0, double p, double t_start) {
    if (!(c0 > 0.0) || !std::isfinite(c0)) throw ConfigError("c0", "c0 must be positive");
    if (!(p > 0.0 && p <= 2.0)) throw ConfigError("p", "p must lie in (0, 2]");
    if (!(t_start > 0.0) || !std::isfinite(t_start))
        throw ConfigError("t0", "t0 must be positive for power-law schedules");
    return {Kind::power_law, c0, p, t_start};
}

RegularizationSchedule RegularizationSchedule::constant(double eps0, double t_start) {
    if (!(eps0 >= 0.0) || !std::isfinite(eps0)) throw ConfigError("eps0", "eps0 must be >= 0");
    if (!(t_start >= 0.0)) throw ConfigError("t0", "t0 must be nonnegative");
    return {Kind::constant, eps0, 0.0, t_start};
}

RegularizationSchedule RegularizationSchedule::zero(double t_start) {
    if (!(t_start >= 0.0)) throw ConfigError("t0", "t0 must be nonnegative");
    return {Kind::zero, 0.0, 0.0, t_start};
}

void RegularizationSchedule::check_time(double t) const {
    if (!(t >= t_start_))
        throw std::domain_error("schedule evaluated at t=" + std::to_string(t) +
                                " before its start time " + std::to_string(t_start_));
}

double RegularizationSchedule::eps(double t) const {
    check_time(t);
    switch (kind_) {
        case Kind::power_law: return c0_ * std::pow(t, -p_);
        case Kind::constant: return c0_;
        case Kind::zero: return 0.0;
    }
    return 0.0;
}

double RegularizationSchedule::eps_dot(double t) const {
    check_time(t);
    if (kind_ == Kind::power_law) return -p_ * c0_ * std::pow(t, -p_ - 1.0);
    return 0.0;
}

double RegularizationSchedule::inv_sqrt_eps_rate(double t) const {
    check_time(t);
    if (kind_ != Kind::power_law) return 0.0;
    // -eps_dot / (2 eps^{3/2}) simplifies to (p/2) c0^{-1/2} t^{p/2 - 1}.
    return 0.5 * p_ / std::sqrt(c0_) * std::pow(t, 0.5 * p_ - 1.0);
}

std::string RegularizationSchedule::describe() const {
    std::ostringstream s;
    switch (kind_) {
        case Kind::power_law: s << c0_ << "/t^" << p_; break;
        case Kind::constant: s << "constant " << c0_; break;
        case Kind::zero: s << "zero"; break;
    }
    return s.str();
}

DampingSchedule DampingSchedule::trigs(double delta, RegularizationSchedule reg) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta", "delta must be positive");
    return {Kind::trigs, delta, reg};
}

DampingSchedule DampingSchedule::constant(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "gamma must be positive");
    return {Kind::constant, gamma, RegularizationSchedule::zero()};
}

DampingSchedule DampingSchedule::avd(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha", "alpha must be positive");
    return {Kind::avd, alpha, RegularizationSchedule::zero()};
}

double DampingSchedule::coefficient(double t) const {
    switch (kind_) {
        case Kind::trigs: return param_ * std::sqrt(reg_.eps(t));
        case Kind::constant: return param_;
        case Kind::avd:
            if (!(t > 0.0)) throw std::domain_error("alpha/t damping needs t > 0");
            return param_ / t;
    }
    return 0.0;
}

}  // namespace trigs
