#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "otd/numeric.hpp"

namespace otd {

// Probabilists' Hermite polynomial He_m(z), He_{m+1} = z He_m - m He_{m-1}.
double hermite(int m, double z);

// phi^{(m)}(z) = (-1)^m He_m(z) phi(z) for the standard normal density phi.
double gaussian_density_derivative(int m, double z);

struct NoiseModel {
    double sigma;
    double eta;  // sigma^2 / 2
    explicit NoiseModel(double sigma_) : sigma(sigma_), eta(sigma_ * sigma_ / 2.0) {
        if (sigma_ < 0.0) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
        if (sigma_ > 1.0)
            throw std::invalid_argument("NoiseModel: sigma must be <= 1 (rescale the data)");
    }
};

struct DensityFloorError : std::runtime_error {
    double y;
    explicit DensityFloorError(double y_)
        : std::runtime_error("density below floor at y = " + std::to_string(y_)), y(y_) {}
};

// Derivatives of a CDF at a point: values[m] = C^{(m)}(y) for 1 <= m <= max_order,
// ratios[m] = C^{(m)}(y)/C^{(1)}(y) (so ratios[1] == 1). Index 0 is unused.
struct ScoreStack {
    double y = 0.0;
    int max_order = 0;
    std::vector<double> values;
    std::vector<double> ratios;
};

class GaussianMixture {
public:
    GaussianMixture(std::vector<double> weights, std::vector<double> means,
                    std::vector<double> stds);

    size_t components() const { return w_.size(); }
    const std::vector<double>& weights() const { return w_; }
    const std::vector<double>& means() const { return mu_; }
    const std::vector<double>& stds() const { return s_; }

    double pdf(double y) const;
    double cdf(double y) const;

    // m-th derivative of the density (m = 0 gives the density itself).
    double density_derivative(int m, double y) const;

    // Inverse CDF; bisection to width 1e-8 then Newton polish,
    // |cdf(quantile(t)) - t| <= 1e-12. Requires t strictly in (0,1).
    double quantile(double t) const;

    // Truncated evaluation window [min mu_i - 6 s_i, max mu_i + 6 s_i].
    std::pair<double, double> window() const;

private:
    std::vector<double> w_, mu_, s_;
};

// Law of X + sigma Z for X ~ prior: same weights/means, stds sqrt(s_i^2 + sigma^2).
GaussianMixture observation_model(const GaussianMixture& prior, const NoiseModel& noise);

// G^{(m)}(y) for 1 <= m <= M plus the ratio vector; throws DensityFloorError
// where the density is below the floor.
ScoreStack score_stack(const GaussianMixture& obs, double y, int max_order);

// Exact transport map F^{-1}(G(y)) via cdf + quantile.
double ot_map_oracle(const GaussianMixture& prior, const GaussianMixture& obs, double y);

// Closed-form transport map for a single-component prior N(mu, tau^2):
// T(y) = mu + (y - mu) * tau / sqrt(tau^2 + sigma^2). Falls back to the
// numeric oracle for genuine mixtures.
std::function<double(double)> exact_ot_map(const GaussianMixture& prior,
                                           const GaussianMixture& obs);

}  // namespace otd
