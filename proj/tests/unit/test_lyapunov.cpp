#include "trigs/lyapunov.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace trigs;

namespace {

// Bisection oracle for the first t with g(t) <= threshold, g decreasing.
double bisect_onset(const RegularizationSchedule& reg, double threshold, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (reg.inv_sqrt_eps_rate(mid) > threshold ? lo : hi) = mid;
    }
    return hi;
}

Trajectory single(double t, const Vec& x, const Vec& v) {
    Trajectory tr;
    tr.samples.push_back({t, x, v});
    return tr;
}

}  // namespace

TEST(LambdaInterval, Examples) {
    auto iv = admissible_lambda_interval(1, 2, 10);
    ASSERT_TRUE(iv);
    EXPECT_DOUBLE_EQ(iv->lower, 0.5);
    EXPECT_DOUBLE_EQ(iv->upper, 2.0 / 3.0);

    iv = admissible_lambda_interval(3, 100, 100);
    ASSERT_TRUE(iv);
    const double k = 3.01;
    EXPECT_NEAR(iv->lower, 0.5 * (k + std::sqrt(k * k - 4)), 1e-14);
    EXPECT_NEAR(iv->lower, 2.630, 1e-3);
    EXPECT_NEAR(iv->upper, 300.0 / 101.0, 1e-14);

    EXPECT_FALSE(admissible_lambda_interval(3, 1.01, 100));
}

TEST(LambdaInterval, ThresholdPositiveInside) {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> d(0.1, 5), ac(1.01, 200), u(0, 1);
    int nonempty = 0;
    for (int k = 0; k < 500; ++k) {
        const double delta = d(rng), a = ac(rng), c = ac(rng);
        const auto iv = admissible_lambda_interval(delta, a, c);
        if (!iv) continue;
        ++nonempty;
        const double lambda = iv->lower + (iv->upper - iv->lower) * (0.01 + 0.98 * u(rng));
        const LyapunovParams lp{delta, lambda, a, c};
        EXPECT_GT(lp.decay_threshold(), 0.0);
        EXPECT_NO_THROW(lp.validate());
    }
    EXPECT_GT(nonempty, 50);
}

TEST(LambdaInterval, ControlledDecay) {
    auto iv = controlled_decay_lambda_interval(1.0);
    ASSERT_TRUE(iv);
    EXPECT_DOUBLE_EQ(iv->lower, 0.5);
    EXPECT_DOUBLE_EQ(iv->upper, 1.0);
    iv = controlled_decay_lambda_interval(2.5);
    ASSERT_TRUE(iv);
    EXPECT_DOUBLE_EQ(iv->lower, 0.5 * (2.5 + std::sqrt(2.25)));
}

TEST(Params, DefaultPackAndValidation) {
    const auto lp = LyapunovParams::default_pack(1.0);
    EXPECT_EQ(lp.lambda, 0.6);
    EXPECT_EQ(lp.a, 2.0);
    EXPECT_EQ(lp.c, 10.0);
    EXPECT_DOUBLE_EQ(lp.b(), 6.0);
    EXPECT_NO_THROW(LyapunovParams::default_pack(3.0).validate());

    try {
        LyapunovParams{1.0, 0.9, 2.0, 10.0}.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "lambda");
        const std::string msg = e.what();
        EXPECT_NE(msg.find("(0.5, 0.666"), std::string::npos) << msg;
    }
    try {
        LyapunovParams{1.0, 0.5, 2.0, 10.0}.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("lambda must exceed delta/2"), std::string::npos);
    }
}

TEST(CheckH1, PaperConfiguration) {
    const auto reg = RegularizationSchedule::power_law(1.0, 2.0 / 3.0);
    const auto h = check_H1(reg, LyapunovParams{}, 1e4);
    ASSERT_TRUE(h.satisfied);
    EXPECT_NEAR(h.threshold, 0.1, 1e-15);
    EXPECT_NEAR(h.t1, std::pow(10.0 / 3.0, 1.5), 1e-6);
    EXPECT_NEAR(h.t1, bisect_onset(reg, 0.1, 1, 1e4), 1e-9);
}

TEST(CheckH1, RandomPowerLawsAgreeWithBisection) {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> p(0.05, 1.95), c0(0.2, 5);
    for (int k = 0; k < 100; ++k) {
        const auto reg = RegularizationSchedule::power_law(c0(rng), p(rng));
        const auto h = check_H1(reg, LyapunovParams{}, 1e12);
        if (!h.satisfied) continue;
        if (h.t1 == reg.t_start()) {
            EXPECT_LE(reg.inv_sqrt_eps_rate(h.t1), 0.1);
        } else {
            EXPECT_NEAR(h.t1, bisect_onset(reg, 0.1, 1, h.t1 * 2), 1e-8 * h.t1);
        }
    }
}

TEST(CheckH1, ConstantScheduleStartsImmediately) {
    const auto h = check_H1(RegularizationSchedule::constant(0.2, 3.0), LyapunovParams{}, 1e4);
    ASSERT_TRUE(h.satisfied);
    EXPECT_EQ(h.t1, 3.0);
}

TEST(CheckH1, InverseSquareFails) {
    const auto h = check_H1(RegularizationSchedule::power_law(1.0, 2.0), LyapunovParams{}, 1e12);
    EXPECT_FALSE(h.satisfied);
    EXPECT_NEAR(h.margin, 0.9, 1e-12);
    EXPECT_FALSE(h.reason.empty());
}

TEST(CheckH1, InverseSquareWithLargeCoefficientHolds) {
    const auto h = check_H1(RegularizationSchedule::power_law(400.0, 2.0), LyapunovParams{}, 1e4);
    EXPECT_TRUE(h.satisfied);  // g = 1/sqrt(400) = 0.05
}

TEST(CheckH1, OnsetBeyondHorizonFails) {
    const auto h = check_H1(RegularizationSchedule::power_law(1.0, 2.0 / 3.0), LyapunovParams{}, 5.0);
    EXPECT_FALSE(h.satisfied);
    EXPECT_GT(h.margin, 0.0);
}

TEST(CheckCD, Examples) {
    const auto reg = RegularizationSchedule::power_law(1.0, 2.0 / 3.0);
    const auto h = check_CD(reg, 1.0, 0.75);
    ASSERT_TRUE(h.satisfied);
    EXPECT_DOUBLE_EQ(h.threshold, 0.25);
    EXPECT_NEAR(h.t1, std::pow(4.0 / 3.0, 1.5), 1e-9);
    EXPECT_FALSE(check_CD(reg, 1.0, 1.0).satisfied);
    EXPECT_EQ(check_CD(RegularizationSchedule::constant(1.0, 2.0), 1.0, 0.75).t1, 2.0);
}

TEST(ScheduleTerms, IdentityForA) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> p(0.1, 2.0), lt(0, 6), lam(0.51, 0.66);
    for (int k = 0; k < 300; ++k) {
        const auto reg = RegularizationSchedule::power_law(1.0, p(rng));
        const LyapunovParams lp{1.0, lam(rng), 2.0, 10.0};
        const double t = std::pow(10.0, lt(rng));
        const auto s = schedule_terms(reg, lp, t);
        const double rhs = 2 * std::pow(s.eps, 1.5) * (reg.inv_sqrt_eps_rate(t) + lp.delta - 2 * lp.lambda);
        EXPECT_NEAR(s.A, rhs, 1e-10 * std::max(std::abs(s.A), 1e-300));
        EXPECT_GT(s.mu, 0.0);
    }
}

TEST(ScheduleTerms, AVanishesOnTheThreshold) {
    // g(t) = t^{-2/3}/3 = 2 lambda - delta = 0.2 at t = (5/3)^{3/2}.
    const auto reg = RegularizationSchedule::power_law(1.0, 2.0 / 3.0);
    const auto s = schedule_terms(reg, LyapunovParams{}, std::pow(5.0 / 3.0, 1.5));
    EXPECT_NEAR(s.A, 0.0, 1e-15);
}

TEST(ScheduleTerms, SignsAfterOnset) {
    const auto reg = RegularizationSchedule::power_law(1.0, 2.0 / 3.0);
    const LyapunovParams lp;
    const double t1 = check_H1(reg, lp, 1e9).t1;
    for (double t = t1; t < 1e8; t *= 1.37) {
        const auto s = schedule_terms(reg, lp, t);
        const double tol = 1e-12 * std::pow(s.eps, 1.5);
        EXPECT_LE(s.A, tol);
        EXPECT_LE(s.B, tol);
        EXPECT_LE(s.C, tol);
    }
}

TEST(Gamma, ClosedFormAgainstQuadrature) {
    for (double p : {1.0 / 3.0, 2.0 / 3.0, 1.0, 1.7, 2.0}) {
        const auto reg = RegularizationSchedule::power_law(p == 2.0 ? 400.0 : 1.0, p);
        const LyapunovParams lp;
        const double t1 = 2.0;
        std::vector<double> ts;
        for (double t = t1; t < 1e4; t *= 1.05) ts.push_back(t);
        const auto q = log_gamma_quadrature(reg, lp, t1, ts);
        double prev = -1;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double c = log_gamma(reg, lp, t1, ts[k]);
            EXPECT_NEAR(q[k], c, 1e-6 * std::max(1.0, std::abs(c))) << p;
            EXPECT_GT(c, prev);
            prev = c;
        }
        EXPECT_EQ(log_gamma(reg, lp, t1, t1), 0.0);
    }
}

TEST(Gamma, ConstantScheduleIsLinear) {
    const auto reg = RegularizationSchedule::constant(0.25);
    const LyapunovParams lp;
    EXPECT_NEAR(log_gamma(reg, lp, 1.0, 11.0), 10.0 * 0.4 * 0.5, 1e-14);
}

TEST(Evaluate, ViscosityPointHasZeroEnergy) {
    const auto f = make_paper_quadratic(10);
    const auto reg = RegularizationSchedule::power_law(1.0, 1.0);
    const double t = 10.0;
    const auto vp = solve_viscosity_point(f, reg.eps(t));
    const auto s = evaluate(single(t, vp.point, Vec::Zero(20)), f, reg, LyapunovParams{}, {vp})[0];
    EXPECT_EQ(s.phi_gap, 0.0);
    EXPECT_EQ(s.E, 0.0);
    EXPECT_GE(s.keybb_slack, 0.0);
    EXPECT_NEAR(s.keybb_slack, 0.5 * s.eps * 5.0 - f.value(vp.point), 1e-14);
    EXPECT_EQ(s.est_basic1_slack, 0.0);
}

TEST(Evaluate, OriginOracleAtEpsTenth) {
    const auto f = make_paper_quadratic(10);
    const auto reg = RegularizationSchedule::power_law(1.0, 1.0);
    const double t = 10.0, eps = 0.1, lambda = 0.6;
    const double sv = 1.0 / (2.0 + eps);
    const double phi0 = 5.0;
    const double phie = 10 * 0.5 * (2 * sv - 1) * (2 * sv - 1) + 0.5 * eps * 20 * sv * sv;
    const double oracle = (phi0 - phie) + 0.5 * lambda * lambda * eps * 20 * sv * sv;
    const auto vp = solve_viscosity_point(f, eps);
    const auto s = evaluate(single(t, Vec::Zero(20), Vec::Zero(20)), f, reg, LyapunovParams{}, {vp})[0];
    EXPECT_NEAR(s.phi_gap, phi0 - phie, 1e-13);
    EXPECT_NEAR(s.E, oracle, 1e-13);
    EXPECT_NEAR(s.E, s.phi_gap + 0.5 * s.v_norm * s.v_norm, 1e-15);
    EXPECT_NEAR(s.W, 5.0, 1e-15);
}

TEST(Evaluate, RejectsMismatchedEpsilon) {
    const auto f = make_paper_quadratic(1);
    const auto reg = RegularizationSchedule::power_law(1.0, 1.0);
    const auto vp = solve_viscosity_point(f, 0.3);
    EXPECT_THROW(evaluate(single(2.0, Vec::Zero(2), Vec::Zero(2)), f, reg, LyapunovParams{}, {vp}),
                 std::invalid_argument);
}

TEST(BasicGaps, PerturbedViscosityPointCanGoNegative) {
    // Huber surrogate of |x|: x_eps = 0. A point off by residual 1e-2 breaks the value bound.
    const auto f = moreau_objective(make_abs_value(), 1.0);
    const double eps = 0.1;
    const Vec bad = Vec::Constant(1, 0.01 / (1.0 + eps));
    EXPECT_NEAR(std::abs(f.gradient(bad)[0] + eps * bad[0]), 1e-2, 1e-15);
    const auto slacks = lemma_basic_gaps(f, eps, 0.0, bad, bad);
    EXPECT_LT(slacks.keybb, -inequality_tolerance(0.0));
    const auto good = lemma_basic_gaps(f, eps, 0.0, Vec::Zero(1), Vec::Zero(1));
    EXPECT_GE(good.keybb, 0.0);
}

TEST(Bound, RequiresVerifiedCondition) {
    DecayCheck h;
    h.satisfied = false;
    EXPECT_THROW(theoretical_bound({}, LyapunovParams{}, RegularizationSchedule::power_law(1, 2), 5.0, h),
                 UnverifiedCondition);
}

TEST(Bound, StartsAtTheAnchorEnergy) {
    const auto reg = RegularizationSchedule::power_law(1.0, 2.0 / 3.0);
    const LyapunovParams lp;
    const auto h = check_H1(reg, lp, 1e4);
    std::vector<LyapunovSample> samples;
    for (double t : {1.0, 5.0, 7.0, 10.0, 20.0}) {
        LyapunovSample s;
        s.t = t;
        s.E = 1.0 / t;
        samples.push_back(s);
    }
    const auto b = theoretical_bound(samples, lp, reg, 5.0, h);
    EXPECT_FALSE(b[1].applicable);
    ASSERT_TRUE(b[2].applicable);
    EXPECT_NEAR(b[2].bound, samples[2].E, 1e-15);
    // Later bounds: decayed anchor energy plus a positive forcing term.
    for (int k = 3; k < 5; ++k) {
        const double decayed = samples[2].E * std::exp(log_gamma(reg, lp, h.t1, samples[2].t) -
                                                       log_gamma(reg, lp, h.t1, samples[k].t));
        EXPECT_GT(b[k].bound, decayed);
        EXPECT_NEAR(std::log(b[k].bound), b[k].log_bound, 1e-12);
    }
}

TEST(Tolerance, Formula) {
    EXPECT_EQ(inequality_tolerance(0.0), 1e-8);
    EXPECT_EQ(inequality_tolerance(-1.0), 1e-6);
    EXPECT_EQ(inequality_tolerance(1e3), 1e-3);
}

TEST(ViscositySpeed, BoundOnQuadraticCurve) {
    const auto f = make_paper_quadratic(10);
    for (double p : {0.5, 1.0, 1.5}) {
        const auto reg = RegularizationSchedule::power_law(1.0, p);
        for (double t : {1.0, 3.0, 10.0, 100.0}) EXPECT_GE(viscosity_speed_slack(f, reg, t, 0.01 * t), -1e-9);
    }
}
