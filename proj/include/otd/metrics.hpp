#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "otd/gaussian_mixture.hpp"

namespace otd {

// Sorted evaluation points inside the window with trapezoid q-weights.
struct QuadratureGrid {
    std::vector<double> points;
    std::vector<double> weights;
    double mass = 0.0;  // Q-mass of the window, for the tail-exclusion report
};

QuadratureGrid make_quadrature_grid(const GaussianMixture& obs,
                                    std::pair<double, double> window, size_t npts);

// ((1/n) sum |x_(i) - y_(i)|^r)^{1/r} over sorted order statistics.
double wasserstein_empirical(std::vector<double> xs, std::vector<double> ys, double r);

// (integral over the window of |T(y) - F^{-1}(G(y))|^r q(y) dy)^{1/r} by
// trapezoid quadrature. T must be monotone on the window unless
// `isotonic` is set, in which case T's grid values are PAV-projected first.
double wasserstein_restricted(const std::function<double(double)>& T,
                              const GaussianMixture& prior, const GaussianMixture& obs,
                              double r, std::pair<double, double> window,
                              size_t npts = 2001, bool isotonic = false,
                              const std::function<double(double)>* exact_map = nullptr);

// |F(T(y)) - G(y)|.
double monge_ampere_residual(const std::function<double(double)>& F_cdf,
                             const std::function<double(double)>& T,
                             const std::function<double(double)>& G_cdf, double y);

// (1/n) sum (T(y_i) - x_i)^2 over coupled pairs.
double mse(const std::function<double(double)>& T, std::span<const double> xs,
           std::span<const double> ys);

}  // namespace otd
