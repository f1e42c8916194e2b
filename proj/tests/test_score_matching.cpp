#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "otd/kde.hpp"
#include "otd/score_matching.hpp"

using otd::Basis;
using otd::BasisKind;
using otd::BasisSpec;
using otd::FittedScore;
using otd::GaussianMixture;

namespace {

const GaussianMixture& std_normal() {
    static GaussianMixture m({1.0}, {0.0}, {1.0});
    return m;
}

// Coefficients representing `target` exactly in the basis span (collocation).
std::vector<double> represent(const BasisSpec& spec, const std::function<double(double)>& target) {
    Basis basis(spec);
    const int d = basis.dim();
    Eigen::MatrixXd M(d, d);
    Eigen::VectorXd rhs(d);
    std::vector<double> beta(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        double y = spec.a + (spec.b - spec.a) * (i + 0.5) / d;
        basis.eval(y, 0, beta);
        for (int j = 0; j < d; ++j) M(i, j) = beta[static_cast<size_t>(j)];
        rhs(i) = target(y);
    }
    Eigen::VectorXd c = M.fullPivLu().solve(rhs);
    return {c.data(), c.data() + d};
}

double empirical_objective(const otd::SampleSet& s, const BasisSpec& spec,
                           const std::vector<double>& coeffs, int m) {
    Basis basis(spec);
    std::vector<double> beta(static_cast<size_t>(basis.dim()));
    double total = 0.0;
    size_t used = 0;
    double sign = (m % 2 == 0) ? -1.0 : 1.0;  // (-1)^{m+1}
    for (double y : s.values) {
        if (y < spec.a || y > spec.b) continue;
        basis.eval(y, 0, beta);
        double fv = 0.0;
        for (size_t j = 0; j < beta.size(); ++j) fv += coeffs[j] * beta[j];
        basis.eval(y, m, beta);
        double fd = 0.0;
        for (size_t j = 0; j < beta.size(); ++j) fd += coeffs[j] * beta[j];
        total += 0.5 * fv * fv + sign * fd;
        ++used;
    }
    return total / static_cast<double>(used);
}

}  // namespace

TEST_CASE("legendre basis values and derivatives") {
    BasisSpec spec{BasisKind::Legendre, 5, -2.0, 3.0, 3};
    Basis basis(spec);
    CHECK(basis.dim() == 6);
    std::vector<double> v0(6), vp(6), vm(6);
    // derivative vs central finite difference
    const double h = 1e-6;
    for (double y : {-1.5, 0.0, 0.4, 2.9}) {
        for (int d = 1; d <= 3; ++d) {
            basis.eval(y, d, v0);
            basis.eval(y + h, d - 1, vp);
            basis.eval(y - h, d - 1, vm);
            for (int j = 0; j < 6; ++j) {
                double fd = (vp[static_cast<size_t>(j)] - vm[static_cast<size_t>(j)]) / (2.0 * h);
                CHECK(v0[static_cast<size_t>(j)] ==
                      doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
    // degree-0 and degree-1 members are 1 and the affine map to [-1,1]
    basis.eval(0.5, 0, v0);
    CHECK(v0[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v0[1] == doctest::Approx(2.0 * (0.5 + 2.0) / 5.0 - 1.0).epsilon(1e-12));
}

TEST_CASE("cubic spline basis partitions unity") {
    BasisSpec spec{BasisKind::CubicSpline, 6, -3.0, 3.0, 3};
    Basis basis(spec);
    CHECK(basis.dim() == 10);
    std::vector<double> v(10);
    for (double y = -3.0; y <= 3.0; y += 0.173) {
        basis.eval(y, 0, v);
        double sum = 0.0;
        for (double b : v) {
            CHECK(b >= -1e-12);
            sum += b;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
    // first derivative vs finite difference
    std::vector<double> vp(10), vm(10);
    const double h = 1e-6;
    for (double y : {-2.1, 0.3, 2.4}) {
        basis.eval(y, 1, v);
        basis.eval(y + h, 0, vp);
        basis.eval(y - h, 0, vm);
        for (size_t j = 0; j < 10; ++j)
            CHECK(v[j] == doctest::Approx((vp[j] - vm[j]) / (2.0 * h)).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("gaussian score fits recover the analytic truth") {
    BasisSpec spec{BasisKind::Legendre, 3, -4.0, 4.0, 3};
    auto s = otd::draw_samples(std_normal(), 40000, 11);

    FittedScore f1 = otd::fit_score(s, 1, spec);
    for (double y : {-2.0, -0.5, 0.0, 1.0, 2.5})
        CHECK(otd::evaluate_fitted(f1, y) == doctest::Approx(-y).epsilon(0.05).scale(1.0));

    FittedScore f2 = otd::fit_score(s, 2, spec);
    for (double y : {-2.0, 0.0, 1.5})
        CHECK(otd::evaluate_fitted(f2, y) ==
              doctest::Approx(y * y - 1.0).epsilon(0.1).scale(1.0));
    // second derivative of y^2 - 1 is the constant 2
    CHECK(otd::evaluate_fitted(f2, 0.0, 2) == doctest::Approx(2.0).epsilon(0.15));

    CHECK(f1.gram_condition > 1.0);
    CHECK(f1.dropped_samples < s.n() / 100);
}

TEST_CASE("fitted coefficients satisfy the first-order conditions") {
    BasisSpec spec{BasisKind::Legendre, 4, -4.0, 4.0, 3};
    auto s = otd::draw_samples(std_normal(), 5000, 21);
    for (int m : {1, 2}) {
        FittedScore f = otd::fit_score(s, m, spec);
        // rebuild A and b
        Basis basis(spec);
        const int d = basis.dim();
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
        std::vector<double> beta(static_cast<size_t>(d)), dbeta(static_cast<size_t>(d));
        size_t used = 0;
        for (double y : s.values) {
            if (y < spec.a || y > spec.b) continue;
            basis.eval(y, 0, beta);
            basis.eval(y, m, dbeta);
            for (int i = 0; i < d; ++i) {
                b(i) += dbeta[static_cast<size_t>(i)];
                for (int j = 0; j < d; ++j) A(i, j) += beta[static_cast<size_t>(i)] * beta[static_cast<size_t>(j)];
            }
            ++used;
        }
        A /= static_cast<double>(used);
        b /= static_cast<double>(used);
        Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(f.coeffs.data(), d);
        double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
        double resid = ((A + f.ridge * Eigen::MatrixXd::Identity(d, d)) * c - sign * b).norm();
        CHECK(resid <= 1e-10 * std::max(1.0, b.norm()));
    }
}

TEST_CASE("empirical minimizer beats the true coefficients on its own sample") {
    BasisSpec spec{BasisKind::Legendre, 3, -4.0, 4.0, 3};
    auto s = otd::draw_samples(std_normal(), 3000, 31);
    for (int m : {1, 2}) {
        FittedScore f = otd::fit_score(s, m, spec, 0.0);
        auto truth = represent(spec, [m](double y) {
            return m == 1 ? -y : y * y - 1.0;  // q^{(m)}/q for the standard normal
        });
        double obj_hat = empirical_objective(s, spec, f.coeffs, m);
        double obj_true = empirical_objective(s, spec, truth, m);
        CHECK(obj_hat <= obj_true + 1e-12);
    }
}

TEST_CASE("risk identity and boundary diagnostic") {
    BasisSpec spec{BasisKind::Legendre, 3, -6.0, 6.0, 3};
    std::mt19937_64 gen(5150);
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    for (int m : {1, 2}) {
        auto truth = represent(spec, [m](double y) { return m == 1 ? -y : y * y - 1.0; });
        FittedScore exact;
        exact.basis = spec;
        exact.m = m;
        exact.coeffs = truth;
        auto r0 = otd::score_matching_risk(exact, std_normal(), 200001);
        CHECK(r0.half_l2_sq == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
        CHECK(r0.boundary_density < 1e-8);

        // shift by a constant: both sides of the identity equal c^2/2
        FittedScore shifted = exact;
        const double c = 0.37;
        shifted.coeffs[0] += c;  // basis member 0 is the constant 1
        auto rs = otd::score_matching_risk(shifted, std_normal(), 200001);
        CHECK(rs.half_l2_sq == doctest::Approx(0.5 * c * c).epsilon(1e-6));
        CHECK(rs.excess_objective == doctest::Approx(rs.half_l2_sq).epsilon(1e-6).scale(1.0));

        // random perturbations
        for (int trial = 0; trial < 5; ++trial) {
            FittedScore pert = exact;
            for (auto& v : pert.coeffs) v += unif(gen);
            auto rp = otd::score_matching_risk(pert, std_normal(), 200001);
            CHECK(rp.excess_objective ==
                  doctest::Approx(rp.half_l2_sq).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("analytic score derivatives") {
    GaussianMixture mix({0.5, 0.5}, {-0.8, 1.0}, {0.6, 0.5});
    // k = 0 is the plain m-th score
    for (int m : {1, 2, 3}) {
        for (double y : {-0.4, 0.2, 0.9}) {
            double want = mix.density_derivative(m, y) / mix.pdf(y);
            CHECK(otd::analytic_score_derivative(mix, m, 0, y) ==
                  doctest::Approx(want).epsilon(1e-12));
        }
    }
    // k = 1 vs finite difference of k = 0
    const double h = 1e-5;
    for (int m : {1, 2}) {
        for (double y : {-0.4, 0.6}) {
            double fd = (otd::analytic_score_derivative(mix, m, 0, y + h) -
                         otd::analytic_score_derivative(mix, m, 0, y - h)) /
                        (2.0 * h);
            CHECK(otd::analytic_score_derivative(mix, m, 1, y) ==
                  doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("fit_score input validation") {
    BasisSpec spec{BasisKind::Legendre, 3, -4.0, 4.0, 3};
    otd::SampleSet tiny;
    tiny.values = {0.1, 0.2};
    CHECK_THROWS(otd::fit_score(tiny, 1, spec));  // fewer samples than dimension

    otd::SampleSet outside;
    outside.values = {5.0, 6.0, 7.0, 8.0, 9.0};
    CHECK_THROWS(otd::fit_score(outside, 1, spec));  // nothing in the window

    auto s = otd::draw_samples(std_normal(), 100, 3);
    CHECK_THROWS(otd::fit_score(s, 4, spec));  // beyond max_derivative
}
