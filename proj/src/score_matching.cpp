#include "otd/score_matching.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace otd {

FittedScore fit_score(const SampleSet& samples, int m, const BasisSpec& spec, double ridge) {
    Basis basis(spec);
    if (m < 0 || m > spec.max_derivative)
        throw std::invalid_argument("fit_score: m exceeds basis max_derivative");
    const int d = basis.dim();

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd bvec = Eigen::VectorXd::Zero(d);
    std::vector<double> beta(static_cast<size_t>(d)), dbeta(static_cast<size_t>(d));
    size_t used = 0, dropped = 0;
    for (double y : samples.values) {
        if (y < spec.a || y > spec.b) {
            ++dropped;
            continue;
        }
        basis.eval(y, 0, beta);
        basis.eval(y, m, dbeta);
        for (int i = 0; i < d; ++i) {
            bvec(i) += dbeta[static_cast<size_t>(i)];
            for (int j = i; j < d; ++j)
                A(i, j) += beta[static_cast<size_t>(i)] * beta[static_cast<size_t>(j)];
        }
        ++used;
    }
    if (used == 0) throw std::runtime_error("fit_score: no samples inside the basis interval");
    if (used < static_cast<size_t>(d))
        throw std::runtime_error("fit_score: fewer in-window samples than basis dimension");
    A /= static_cast<double>(used);
    bvec /= static_cast<double>(used);
    A = A.selfadjointView<Eigen::Upper>();

    if (ridge < 0.0) ridge = 1e-8 * A.trace() / d;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    double cond = (lmin > 0.0) ? lmax / lmin : std::numeric_limits<double>::infinity();

    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    Eigen::MatrixXd M = A + ridge * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd c = M.ldlt().solve(sign * bvec);

    double resid = (M * c - sign * bvec).norm();
    double scale = std::max(bvec.norm(), 1e-300);
    if (resid > 1e-10 * scale)
        throw std::runtime_error("fit_score: ill-conditioned normal matrix (condition " +
                                 std::to_string(cond) + "), residual " + std::to_string(resid));

    FittedScore out;
    out.basis = spec;
    out.m = m;
    out.coeffs.assign(c.data(), c.data() + d);
    out.gram_condition = cond;
    out.dropped_samples = dropped;
    out.ridge = ridge;
    return out;
}

double evaluate_fitted(const FittedScore& f, double y, int derivative) {
    Basis basis(f.basis);
    std::vector<double> beta(static_cast<size_t>(basis.dim()));
    basis.eval(y, derivative, beta);
    double v = 0.0;
    for (size_t j = 0; j < beta.size(); ++j) v += f.coeffs[j] * beta[j];
    return v;
}

double analytic_score_derivative(const GaussianMixture& obs, int m, int k, double y) {
    // polynomial in u_j = q^{(j)}/q, monomial = sorted index multiset
    std::map<std::vector<int>, double> poly{{{m}, 1.0}};
    for (int step = 0; step < k; ++step) {
        std::map<std::vector<int>, double> next;
        auto add = [&next](std::vector<int> mono, double c) {
            std::sort(mono.begin(), mono.end());
            next[std::move(mono)] += c;
        };
        for (const auto& [mono, c] : poly) {
            for (size_t p = 0; p < mono.size(); ++p) {
                // u_j' = u_{j+1} - u_j u_1
                std::vector<int> up = mono;
                up[p] += 1;
                add(std::move(up), c);
                std::vector<int> down = mono;
                down.push_back(1);
                add(std::move(down), -c);
            }
        }
        poly = std::move(next);
    }
    double q = obs.pdf(y);
    if (q < kDensityFloor) throw DensityFloorError(y);
    int maxj = m + k;
    std::vector<double> u(static_cast<size_t>(maxj) + 1, 1.0);
    for (int j = 1; j <= maxj; ++j) u[static_cast<size_t>(j)] = obs.density_derivative(j, y) / q;
    double total = 0.0;
    for (const auto& [mono, c] : poly) {
        double prod = c;
        for (int j : mono) prod *= u[static_cast<size_t>(j)];
        total += prod;
    }
    return total;
}

RiskReport score_matching_risk(const FittedScore& f, const GaussianMixture& obs,
                               size_t quad_points) {
    const double a = f.basis.a, b = f.basis.b;
    const int m = f.m;
    Basis basis(f.basis);
    std::vector<double> beta(static_cast<size_t>(basis.dim()));
    std::vector<double> dbeta(static_cast<size_t>(basis.dim()));
    double dy = (b - a) / static_cast<double>(quad_points - 1);
    double half_l2 = 0.0, obj_f = 0.0, obj_star = 0.0;
    for (size_t i = 0; i < quad_points; ++i) {
        double y = a + dy * static_cast<double>(i);
        double wq = obs.pdf(y) * dy * ((i == 0 || i + 1 == quad_points) ? 0.5 : 1.0);
        basis.eval(y, 0, beta);
        basis.eval(y, m, dbeta);
        double fv = 0.0, fd = 0.0;
        for (size_t j = 0; j < beta.size(); ++j) {
            fv += f.coeffs[j] * beta[j];
            fd += f.coeffs[j] * dbeta[j];
        }
        double fstar = obs.density_derivative(m, y) / obs.pdf(y);
        double fstar_d = analytic_score_derivative(obs, m, m, y);
        double sign = (m % 2 == 0) ? -1.0 : 1.0;  // (-1)^{m+1}
        half_l2 += 0.5 * (fv - fstar) * (fv - fstar) * wq;
        obj_f += (0.5 * fv * fv + sign * fd) * wq;
        obj_star += (0.5 * fstar * fstar + sign * fstar_d) * wq;
    }
    RiskReport r;
    r.half_l2_sq = half_l2;
    r.excess_objective = obj_f - obj_star;
    r.boundary_density = std::max(obs.pdf(a), obs.pdf(b));
    return r;
}

}  // namespace otd
