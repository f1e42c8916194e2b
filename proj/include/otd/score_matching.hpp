#pragma once

#include <vector>

#include "otd/basis.hpp"
#include "otd/gaussian_mixture.hpp"
#include "otd/kde.hpp"

namespace otd {

// Basis-expansion fit of the m-th order score f*_m = q^{(m)}/q on [a,b].
struct FittedScore {
    BasisSpec basis;
    int m = 0;
    std::vector<double> coeffs;
    double gram_condition = 0.0;  // condition estimate of the normal matrix
    size_t dropped_samples = 0;   // samples outside the basis interval
    double ridge = 0.0;
};

// Minimizes the empirical objective E_n[ f^2/2 + (-1)^{m+1} f^{(m)} ] over the
// basis span: solves (A + ridge I) c = (-1)^m b with A = E_n[beta beta^T] and
// b = E_n[beta^{(m)}]. ridge < 0 selects the default 1e-8 * trace(A)/dim.
FittedScore fit_score(const SampleSet& samples, int m, const BasisSpec& basis,
                      double ridge = -1.0);

double evaluate_fitted(const FittedScore& f, double y, int derivative = 0);

struct RiskReport {
    double half_l2_sq = 0.0;       // (1/2) ||f - f*||^2_{L2(Q)} by quadrature
    double excess_objective = 0.0; // population objective gap, same quantity by
                                   // the score representation identity
    double boundary_density = 0.0; // max q at the interval endpoints
};

// Quadrature comparison of a fitted (or hand-built) score against the analytic
// m-th order score of `obs`, restricted to the basis interval.
RiskReport score_matching_risk(const FittedScore& f, const GaussianMixture& obs,
                               size_t quad_points = 4001);

// (d/dy)^k of q^{(m)}/q expressed through score ratios u_j = q^{(j)}/q via
// u_j' = u_{j+1} - u_j u_1; evaluated from the analytic model.
double analytic_score_derivative(const GaussianMixture& obs, int m, int k, double y);

}  // namespace otd
