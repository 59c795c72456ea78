#pragma once

#include "trigs/problem.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace trigs {

/// x_eps = argmin f + (eps/2)|x|^2, with the residual it was solved to.
struct ViscosityPoint {
    double epsilon = 0.0;
    Vec point;
    double residual = 0.0;  // |grad f(x_eps) + eps x_eps|
    int inner_iterations = 0;
};

struct MoreauEvaluation {
    double theta = 0.0;
    Vec input;
    double envelope_value = 0.0;
    Vec prox_point;
    Vec envelope_gradient;
};

struct InnerSolveOptions {
    double tol = 1e-10;
    int max_iterations = 100000;
    /// Skip the linear-system route for quadratics (used to cross-check it).
    bool force_iterative = false;
    std::optional<Vec> warm_start;
};

/// Inner solve ran out of iterations. Carries the best iterate found.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, ViscosityPoint best)
        : Error(message), best_(std::move(best)) {}
    const ViscosityPoint& best() const noexcept { return best_; }

private:
    ViscosityPoint best_;
};

/// Failure somewhere along a viscosity curve.
class ViscosityCurveError : public Error {
public:
    ViscosityCurveError(const std::string& message, double epsilon)
        : Error(message), epsilon_(epsilon) {}
    double epsilon() const noexcept { return epsilon_; }

private:
    double epsilon_;
};

/// phi_eps(x) = f(x) + (eps/2)|x|^2.
double phi(const ObjectiveFunction& obj, double epsilon, const Vec& x);

ViscosityPoint solve_viscosity_point(const ObjectiveFunction& obj, double epsilon,
                                     const InnerSolveOptions& options = {});

inline ViscosityPoint solve_viscosity_point(const ObjectiveFunction& obj, double epsilon,
                                            double tol) {
    InnerSolveOptions o;
    o.tol = tol;
    return solve_viscosity_point(obj, epsilon, o);
}

/// One solve per epsilon, each warm-started from the previous point.
std::vector<ViscosityPoint> viscosity_curve(const ObjectiveFunction& obj,
                                            const std::vector<double>& epsilons,
                                            const InnerSolveOptions& options = {});

/// Moreau envelope f_theta, prox_{theta f} and grad f_theta at x. Uses the
/// closed-form prox when the objective has one, otherwise solves the inner
/// strongly convex problem.
MoreauEvaluation moreau(const ObjectiveFunction& obj, double theta, const Vec& x,
                        const InnerSolveOptions& options = {});

/// Smooth objective f_theta with (1/theta)-Lipschitz gradient and the same
/// minimizers and minimum value as f.
ObjectiveFunction moreau_objective(const ObjectiveFunction& obj, double theta);

/// epsilon,residual,norm[,dist_to_xstar][,x1..xn]
void write_viscosity_csv(std::ostream& out, const std::vector<ViscosityPoint>& points,
                         const std::optional<Vec>& x_star, bool include_coordinates);

}  // namespace trigs
