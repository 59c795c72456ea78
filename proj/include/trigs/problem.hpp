#pragma once

#include "trigs/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace trigs {

enum class Smoothness { smooth, nonsmooth_with_prox };

/// f(x) = 1/2 x'Qx - b'x + c. Attached to objectives that are exactly
/// quadratic so solvers can take the linear-system route.
struct QuadraticForm {
    Mat hessian;
    Vec linear;
    double constant = 0.0;
};

/// Convex objective f together with whatever is known about argmin f.
///
/// Immutable after construction; copies share the underlying callables, so
/// an objective can be handed to concurrent sweeps freely.
class ObjectiveFunction {
public:
    using ValueFn = std::function<double(const Vec&)>;
    using GradientFn = std::function<Vec(const Vec&)>;
    using ProxFn = std::function<Vec(double theta, const Vec&)>;

    struct Parts {
        std::string name;
        int dimension = 0;
        ValueFn value;
        GradientFn gradient;  // empty for nonsmooth objectives
        ProxFn prox;          // optional
        std::optional<double> known_min_value;
        std::optional<Vec> known_min_norm_solution;
        std::optional<double> strong_convexity_modulus;
        std::optional<QuadraticForm> quadratic;
    };

    explicit ObjectiveFunction(Parts parts);

    const std::string& name() const noexcept { return parts_->name; }
    int dimension() const noexcept { return parts_->dimension; }
    Smoothness smoothness() const noexcept {
        return parts_->gradient ? Smoothness::smooth : Smoothness::nonsmooth_with_prox;
    }
    bool is_smooth() const noexcept { return static_cast<bool>(parts_->gradient); }
    bool has_prox() const noexcept { return static_cast<bool>(parts_->prox); }

    double value(const Vec& x) const;
    /// Throws Unsupported for nonsmooth objectives.
    Vec gradient(const Vec& x) const;
    /// prox_{theta f}(x). Throws Unsupported when no closed-form prox exists.
    Vec prox(double theta, const Vec& x) const;

    const std::optional<double>& known_min_value() const noexcept { return parts_->known_min_value; }
    const std::optional<Vec>& known_min_norm_solution() const noexcept {
        return parts_->known_min_norm_solution;
    }
    const std::optional<double>& strong_convexity_modulus() const noexcept {
        return parts_->strong_convexity_modulus;
    }
    const std::optional<QuadraticForm>& quadratic() const noexcept { return parts_->quadratic; }

private:
    void check_dimension(const Vec& x) const;

    std::shared_ptr<const Parts> parts_;
};

/// 1/2 sum_i (x_{2i-1} + x_{2i} - 1)^2 in dimension 2 * n_pairs. Convex but
/// not strongly convex; minimum-norm minimizer (1/2, ..., 1/2).
ObjectiveFunction make_paper_quadratic(int n_pairs);

/// 1/2 <A(x - s), x - s> for symmetric positive definite A.
ObjectiveFunction make_strongly_convex_quadratic(const Mat& matrix, const Vec& shift);

/// f(x) = |x| on the real line, exposed through its prox only.
ObjectiveFunction make_abs_value();

/// Central-difference gradient check:
/// max_i |fd_i - g_i| / max(1, |g_i|).
double check_gradient(const ObjectiveFunction& obj, const Vec& point, double step = 1e-5);

/// Built-in problems by identifier: "paper-quadratic-20" (any even
/// dimension after the last dash), "sc-quadratic", "abs".
ObjectiveFunction make_problem(const std::string& id);

}  // namespace trigs
