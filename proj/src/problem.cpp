#include "trigs/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trigs {

ObjectiveFunction::ObjectiveFunction(Parts parts) {
    if (parts.dimension <= 0) throw std::invalid_argument("objective dimension must be positive");
    if (!parts.value) throw std::invalid_argument("objective needs a value function");
    if (!parts.gradient && !parts.prox)
        throw std::invalid_argument("objective needs a gradient or a prox");
    if (parts.known_min_norm_solution && parts.known_min_norm_solution->size() != parts.dimension)
        throw std::invalid_argument("minimum-norm solution has the wrong dimension");
    parts_ = std::make_shared<const Parts>(std::move(parts));
}

void ObjectiveFunction::check_dimension(const Vec& x) const {
    if (x.size() != parts_->dimension)
        throw std::invalid_argument(parts_->name + ": expected a point of dimension " +
                                    std::to_string(parts_->dimension) + ", got " +
                                    std::to_string(x.size()));
}

double ObjectiveFunction::value(const Vec& x) const {
    check_dimension(x);
    return parts_->value(x);
}

Vec ObjectiveFunction::gradient(const Vec& x) const {
    if (!parts_->gradient)
        throw Unsupported(parts_->name + ": gradient unavailable; use Moreau envelope");
    check_dimension(x);
    return parts_->gradient(x);
}

Vec ObjectiveFunction::prox(double theta, const Vec& x) const {
    if (!parts_->prox) throw Unsupported(parts_->name + ": no closed-form prox");
    if (!(theta > 0.0)) throw std::invalid_argument("prox parameter theta must be positive");
    check_dimension(x);
    return parts_->prox(theta, x);
}

ObjectiveFunction make_paper_quadratic(int n_pairs) {
    if (n_pairs < 1) throw std::invalid_argument("n_pairs must be at least 1");
    const int n = 2 * n_pairs;
    QuadraticForm q;
    q.hessian = Mat::Zero(n, n);
    for (int i = 0; i < n_pairs; ++i) q.hessian.block<2, 2>(2 * i, 2 * i).setOnes();
    q.linear = Vec::Ones(n);
    q.constant = 0.5 * n_pairs;

    // Closed form beats the generic quadratic for value: no cancellation
    // between 1/2 x'Qx and b'x near the solution set.
    ObjectiveFunction::Parts parts;
    parts.name = "paper-quadratic-" + std::to_string(n);
    parts.dimension = n;
    parts.value = [n_pairs](const Vec& x) {
        double acc = 0.0;
        for (int i = 0; i < n_pairs; ++i) {
            const double r = x[2 * i] + x[2 * i + 1] - 1.0;
            acc += r * r;
        }
        return 0.5 * acc;
    };
    parts.gradient = [n_pairs](const Vec& x) -> Vec {
        Vec g(x.size());
        for (int i = 0; i < n_pairs; ++i) {
            const double r = x[2 * i] + x[2 * i + 1] - 1.0;
            g[2 * i] = r;
            g[2 * i + 1] = r;
        }
        return g;
    };
    parts.known_min_value = 0.0;
    parts.known_min_norm_solution = Vec::Constant(n, 0.5);
    parts.strong_convexity_modulus = 0.0;
    parts.quadratic = std::move(q);
    return ObjectiveFunction(std::move(parts));
}

ObjectiveFunction make_strongly_convex_quadratic(const Mat& matrix, const Vec& shift) {
    if (matrix.rows() != matrix.cols() || matrix.rows() != shift.size() || shift.size() == 0)
        throw ConfigError("matrix", "matrix must be square and match the shift dimension");
    if (!matrix.isApprox(matrix.transpose(), 1e-12))
        throw ConfigError("matrix", "matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> eig(matrix, Eigen::EigenvaluesOnly);
    const double lambda_min = eig.eigenvalues().minCoeff();
    if (!(lambda_min > 0.0))
        throw ConfigError("matrix", "matrix must be positive definite (smallest eigenvalue " +
                                        std::to_string(lambda_min) + ")");

    QuadraticForm q;
    q.hessian = matrix;
    q.linear = matrix * shift;
    q.constant = 0.5 * shift.dot(matrix * shift);

    auto a = std::make_shared<const Mat>(matrix);
    auto s = std::make_shared<const Vec>(shift);
    ObjectiveFunction::Parts parts;
    parts.name = "sc-quadratic";
    parts.dimension = static_cast<int>(shift.size());
    parts.value = [a, s](const Vec& x) {
        const Vec d = x - *s;
        return 0.5 * d.dot(*a * d);
    };
    parts.gradient = [a, s](const Vec& x) -> Vec { return *a * (x - *s); };
    parts.known_min_value = 0.0;
    parts.known_min_norm_solution = shift;
    parts.strong_convexity_modulus = lambda_min;
    parts.quadratic = std::move(q);
    return ObjectiveFunction(std::move(parts));
}

ObjectiveFunction make_abs_value() {
    ObjectiveFunction::Parts parts;
    parts.name = "abs";
    parts.dimension = 1;
    parts.value = [](const Vec& x) { return std::abs(x[0]); };
    parts.prox = [](double theta, const Vec& x) -> Vec {
        Vec out(1);
        const double m = std::max(std::abs(x[0]) - theta, 0.0);
        out[0] = std::copysign(m, x[0]);
        if (m == 0.0) out[0] = 0.0;
        return out;
    };
    parts.known_min_value = 0.0;
    parts.known_min_norm_solution = Vec::Zero(1);
    return ObjectiveFunction(std::move(parts));
}

double check_gradient(const ObjectiveFunction& obj, const Vec& point, double step) {
    if (!obj.is_smooth()) throw Unsupported(obj.name() + ": gradient check needs a smooth objective");
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("finite-difference step must be positive and finite");
    const Vec g = obj.gradient(point);
    double worst = 0.0;
    Vec probe = point;
    for (Eigen::Index i = 0; i < point.size(); ++i) {
        probe[i] = point[i] + step;
        const double up = obj.value(probe);
        probe[i] = point[i] - step;
        const double down = obj.value(probe);
        probe[i] = point[i];
        const double fd = (up - down) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
    }
    return worst;
}

ObjectiveFunction make_problem(const std::string& id) {
    if (id == "abs") return make_abs_value();
    if (id == "sc-quadratic") {
        Mat a = Mat::Zero(2, 2);
        a(0, 0) = 1.0;
        a(1, 1) = 4.0;
        return make_strongly_convex_quadratic(a, Vec::Ones(2));
    }
    const std::string prefix = "paper-quadratic-";
    if (id.rfind(prefix, 0) == 0) {
        const std::string tail = id.substr(prefix.size());
        int dim = 0;
        try {
            std::size_t used = 0;
            dim = std::stoi(tail, &used);
            if (used != tail.size()) dim = 0;
        } catch (const std::exception&) {
            dim = 0;
        }
        if (dim >= 2 && dim % 2 == 0) return make_paper_quadratic(dim / 2);
    }
    throw ConfigError("problem", "unknown problem '" + id +
                                     "' (expected paper-quadratic-<even n>, sc-quadratic or abs)");
}

}  // namespace trigs
