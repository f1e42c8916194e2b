#include "otd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otd/denoise.hpp"

namespace otd {

QuadratureGrid make_quadrature_grid(const GaussianMixture& obs,
                                    std::pair<double, double> window, size_t npts) {
    if (npts < 2) throw std::invalid_argument("make_quadrature_grid: npts >= 2 required");
    QuadratureGrid g;
    g.points.resize(npts);
    g.weights.resize(npts);
    double dy = (window.second - window.first) / static_cast<double>(npts - 1);
    for (size_t i = 0; i < npts; ++i) {
        double y = window.first + dy * static_cast<double>(i);
        g.points[i] = y;
        double w = obs.pdf(y) * dy;
        if (i == 0 || i + 1 == npts) w *= 0.5;
        g.weights[i] = w;
        g.mass += w;
    }
    return g;
}

double wasserstein_empirical(std::vector<double> xs, std::vector<double> ys, double r) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("wasserstein_empirical: length mismatch");
    if (r < 1.0) throw std::invalid_argument("wasserstein_empirical: r >= 1 required");
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double total = 0.0;
    for (size_t i = 0; i < xs.size(); ++i)
        total += std::pow(std::abs(xs[i] - ys[i]), r);
    return std::pow(total / static_cast<double>(xs.size()), 1.0 / r);
}

double wasserstein_restricted(const std::function<double(double)>& T,
                              const GaussianMixture& prior, const GaussianMixture& obs,
                              double r, std::pair<double, double> window, size_t npts,
                              bool isotonic, const std::function<double(double)>* exact_map) {
    if (r < 1.0) throw std::invalid_argument("wasserstein_restricted: r >= 1 required");
    QuadratureGrid g = make_quadrature_grid(obs, window, npts);
    std::vector<double> tv(g.points.size());
    for (size_t i = 0; i < g.points.size(); ++i) tv[i] = T(g.points[i]);
    bool mono = std::is_sorted(tv.begin(), tv.end());
    if (!mono) {
        if (!isotonic)
            throw std::runtime_error(
                "wasserstein_restricted: map is not monotone on the window "
                "(pass isotonic=true to project)");
        tv = isotonic_projection(tv);
    }
    auto oracle = exact_map ? *exact_map
                            : std::function<double(double)>([&](double y) {
                                  return ot_map_oracle(prior, obs, y);
                              });
    double total = 0.0;
    for (size_t i = 0; i < g.points.size(); ++i)
        total += std::pow(std::abs(tv[i] - oracle(g.points[i])), r) * g.weights[i];
    return std::pow(total, 1.0 / r);
}

double monge_ampere_residual(const std::function<double(double)>& F_cdf,
                             const std::function<double(double)>& T,
                             const std::function<double(double)>& G_cdf, double y) {
    return std::abs(F_cdf(T(y)) - G_cdf(y));
}

double mse(const std::function<double(double)>& T, std::span<const double> xs,
           std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("mse: length mismatch");
    if (xs.empty()) throw std::invalid_argument("mse: empty input");
    double total = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double e = T(ys[i]) - xs[i];
        total += e * e;
    }
    return total / static_cast<double>(xs.size());
}

}  // namespace otd
