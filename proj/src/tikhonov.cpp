#include "trigs/tikhonov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace trigs {

namespace {

struct InnerResult {
    Vec x;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Gradient descent for an m-strongly convex function, given only its
// gradient. Step 2/(L + m) with L estimated from gradient secants and
// doubled whenever a step reveals more curvature than assumed.
InnerResult minimize_strongly_convex(const std::function<Vec(const Vec&)>& grad, double modulus,
                                     Vec x, double tol, int max_iterations) {
    InnerResult best;
    Vec g = grad(x);
    double gnorm = g.norm();
    best.x = x;
    best.residual = gnorm;
    if (gnorm <= tol) {
        best.converged = true;
        return best;
    }

    double lip = modulus;
    {
        const Vec probe = x - g * (std::min(1.0, gnorm) / gnorm) * 1e-3;
        const double dx = (probe - x).norm();
        if (dx > 0.0) lip = std::max(lip, (grad(probe) - g).norm() / dx);
    }

    for (int it = 1; it <= max_iterations; ++it) {
        const double step = 2.0 / (lip + modulus);
        const Vec xn = x - step * g;
        const Vec gn = grad(xn);
        const double moved = (xn - x).norm();
        const double curvature = moved > 0.0 ? (gn - g).norm() / moved : 0.0;
        if (curvature > lip * (1.0 + 1e-12)) {
            lip = std::max(2.0 * lip, curvature);
            best.iterations = it;
            continue;
        }
        x = xn;
        g = gn;
        gnorm = g.norm();
        best.iterations = it;
        if (!std::isfinite(gnorm)) break;
        if (gnorm < best.residual) {
            best.residual = gnorm;
            best.x = x;
        }
        if (gnorm <= tol) {
            best.converged = true;
            return best;
        }
    }
    return best;
}

// Solve (H + shift I) x = rhs with a few rounds of iterative refinement.
Vec solve_shifted(const Mat& hessian, double shift, const Vec& rhs) {
    Mat m = hessian;
    m.diagonal().array() += shift;
    Eigen::LDLT<Mat> ldlt(m);
    Vec x = ldlt.solve(rhs);
    for (int k = 0; k < 3; ++k) {
        const Vec r = rhs - m * x;
        if (r.norm() == 0.0) break;
        x += ldlt.solve(r);
    }
    return x;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

}  // namespace

double phi(const ObjectiveFunction& obj, double epsilon, const Vec& x) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
    return obj.value(x) + 0.5 * epsilon * x.squaredNorm();
}

ViscosityPoint solve_viscosity_point(const ObjectiveFunction& obj, double epsilon,
                                     const InnerSolveOptions& options) {
    require_positive(epsilon, "epsilon");
    require_positive(options.tol, "tol");
    if (!obj.is_smooth())
        throw Unsupported(obj.name() + ": viscosity solve needs a smooth objective");

    auto grad_phi = [&obj, epsilon](const Vec& x) -> Vec {
        return obj.gradient(x) + epsilon * x;
    };

    ViscosityPoint out;
    out.epsilon = epsilon;
    if (obj.quadratic() && !options.force_iterative) {
        const auto& q = *obj.quadratic();
        out.point = solve_shifted(q.hessian, epsilon, q.linear);
        out.residual = grad_phi(out.point).norm();
        out.inner_iterations = 0;
        if (out.residual <= options.tol) return out;
        // Ill-conditioned system: polish iteratively from the direct answer.
    }

    Vec start = options.warm_start ? *options.warm_start
                                   : (out.point.size() ? out.point : Vec(Vec::Zero(obj.dimension())));
    if (start.size() != obj.dimension())
        throw std::invalid_argument("warm start has the wrong dimension");
    auto res = minimize_strongly_convex(grad_phi, epsilon, std::move(start), options.tol,
                                        options.max_iterations);
    out.point = std::move(res.x);
    out.residual = res.residual;
    out.inner_iterations = res.iterations;
    if (!res.converged)
        throw ConvergenceError("viscosity solve at epsilon=" + std::to_string(epsilon) +
                                   " did not reach tol after " +
                                   std::to_string(res.iterations) + " iterations (residual " +
                                   std::to_string(res.residual) + ")",
                               out);
    return out;
}

std::vector<ViscosityPoint> viscosity_curve(const ObjectiveFunction& obj,
                                            const std::vector<double>& epsilons,
                                            const InnerSolveOptions& options) {
    for (double e : epsilons)
        if (!(e > 0.0) || !std::isfinite(e))
            throw ViscosityCurveError("epsilon values must be strictly positive and finite", e);

    std::vector<ViscosityPoint> curve;
    curve.reserve(epsilons.size());
    InnerSolveOptions o = options;
    for (double e : epsilons) {
        try {
            curve.push_back(solve_viscosity_point(obj, e, o));
        } catch (const ConvergenceError& err) {
            throw ViscosityCurveError(err.what(), e);
        }
        o.warm_start = curve.back().point;
    }
    return curve;
}

MoreauEvaluation moreau(const ObjectiveFunction& obj, double theta, const Vec& x,
                        const InnerSolveOptions& options) {
    require_positive(theta, "theta");
    MoreauEvaluation m;
    m.theta = theta;
    m.input = x;
    if (obj.has_prox()) {
        m.prox_point = obj.prox(theta, x);
    } else if (obj.quadratic() && !options.force_iterative) {
        const auto& q = *obj.quadratic();
        m.prox_point = solve_shifted(q.hessian, 1.0 / theta, q.linear + x / theta);
    } else {
        auto grad = [&obj, &x, theta](const Vec& xi) -> Vec {
            return obj.gradient(xi) + (xi - x) / theta;
        };
        auto res = minimize_strongly_convex(grad, 1.0 / theta, options.warm_start.value_or(x),
                                            options.tol, options.max_iterations);
        if (!res.converged) {
            ViscosityPoint best{theta, res.x, res.residual, res.iterations};
            throw ConvergenceError("prox solve did not converge (residual " +
                                       std::to_string(res.residual) + ")",
                                   best);
        }
        m.prox_point = std::move(res.x);
    }
    const Vec diff = x - m.prox_point;
    m.envelope_value = obj.value(m.prox_point) + diff.squaredNorm() / (2.0 * theta);
    m.envelope_gradient = diff / theta;
    return m;
}

ObjectiveFunction moreau_objective(const ObjectiveFunction& obj, double theta) {
    require_positive(theta, "theta");
    if (!obj.has_prox())
        throw Unsupported(obj.name() + ": Moreau surrogate needs a closed-form prox");

    ObjectiveFunction::Parts parts;
    std::ostringstream name;
    name << "moreau(" << obj.name() << ",theta=" << theta << ")";
    parts.name = name.str();
    parts.dimension = obj.dimension();
    parts.value = [obj, theta](const Vec& x) { return moreau(obj, theta, x).envelope_value; };
    parts.gradient = [obj, theta](const Vec& x) -> Vec {
        return (x - obj.prox(theta, x)) / theta;
    };
    parts.known_min_value = obj.known_min_value();
    parts.known_min_norm_solution = obj.known_min_norm_solution();
    return ObjectiveFunction(std::move(parts));
}

void write_viscosity_csv(std::ostream& out, const std::vector<ViscosityPoint>& points,
                         const std::optional<Vec>& x_star, bool include_coordinates) {
    const auto old_precision = out.precision(17);
    out << "epsilon,residual,norm";
    if (x_star) out << ",dist_to_xstar";
    if (include_coordinates && !points.empty())
        for (Eigen::Index i = 0; i < points.front().point.size(); ++i) out << ",x" << i + 1;
    out << '\n';
    for (const auto& p : points) {
        out << p.epsilon << ',' << p.residual << ',' << p.point.norm();
        if (x_star) out << ',' << (p.point - *x_star).norm();
        if (include_coordinates)
            for (Eigen::Index i = 0; i < p.point.size(); ++i) out << ',' << p.point[i];
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace trigs
