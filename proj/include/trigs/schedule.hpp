#pragma once

#include <string>

namespace trigs {

/// Tikhonov parameter eps(t): c0 / t^p, a constant, or identically zero.
/// All kinds are nonincreasing; evaluating before t_start throws.
class RegularizationSchedule {
public:
    enum class Kind { power_law, constant, zero };

    /// c0 > 0, p in (0, 2], t_start > 0.
    static RegularizationSchedule power_law(double c0, double p, double t_start = 1.0);
    static RegularizationSchedule constant(double eps0, double t_start = 1.0);
    static RegularizationSchedule zero(double t_start = 0.0);

    Kind kind() const noexcept { return kind_; }
    double coefficient() const noexcept { return c0_; }
    double exponent() const noexcept { return p_; }
    double t_start() const noexcept { return t_start_; }

    double eps(double t) const;
    double eps_dot(double t) const;
    /// d/dt (1/sqrt(eps)) = -eps_dot / (2 eps^{3/2}); zero for constant kinds.
    double inv_sqrt_eps_rate(double t) const;

    /// p = 2 is admitted but the trajectory-convergence question is open there.
    bool trajectory_diagnostics_exploratory() const noexcept {
        return kind_ == Kind::power_law && p_ >= 2.0;
    }

    std::string describe() const;

private:
    RegularizationSchedule(Kind kind, double c0, double p, double t_start)
        : kind_(kind), c0_(c0), p_(p), t_start_(t_start) {}
    void check_time(double t) const;

    Kind kind_;
    double c0_;
    double p_;
    double t_start_;
};

/// Viscous damping coefficient in front of x'(t).
class DampingSchedule {
public:
    enum class Kind { trigs, constant, avd };

    /// delta * sqrt(eps(t)), the vanishing damping of the regularized system.
    static DampingSchedule trigs(double delta, RegularizationSchedule reg);
    static DampingSchedule constant(double gamma);
    /// alpha / t.
    static DampingSchedule avd(double alpha);

    Kind kind() const noexcept { return kind_; }
    /// delta, gamma or alpha depending on the kind.
    double parameter() const noexcept { return param_; }
    double coefficient(double t) const;

private:
    DampingSchedule(Kind kind, double param, RegularizationSchedule reg)
        : kind_(kind), param_(param), reg_(reg) {}

    Kind kind_;
    double param_;
    RegularizationSchedule reg_;
};

}  // namespace trigs
