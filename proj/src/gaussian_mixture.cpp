#include "otd/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace otd {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
}  // namespace

double hermite(int m, double z) {
    if (m < 0) throw std::invalid_argument("hermite: m >= 0 required");
    if (m == 0) return 1.0;
    double prev = 1.0, cur = z;
    for (int k = 1; k < m; ++k) {
        double next = z * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double gaussian_density_derivative(int m, double z) {
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * hermite(m, z) * std_normal_pdf(z);
}

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<double> means,
                                 std::vector<double> stds)
    : w_(std::move(weights)), mu_(std::move(means)), s_(std::move(stds)) {
    if (w_.empty() || w_.size() != mu_.size() || w_.size() != s_.size())
        throw std::invalid_argument("GaussianMixture: inconsistent component arrays");
    double total = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) {
        if (w_[i] <= 0.0) throw std::invalid_argument("GaussianMixture: weights must be > 0");
        if (s_[i] <= 0.0) throw std::invalid_argument("GaussianMixture: stds must be > 0");
        total += w_[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        for (auto& w : w_) w /= total;
}

double GaussianMixture::pdf(double y) const {
    double total = 0.0;
    for (size_t i = 0; i < w_.size(); ++i)
        total += w_[i] * std_normal_pdf((y - mu_[i]) / s_[i]) / s_[i];
    return total;
}

double GaussianMixture::cdf(double y) const {
    double total = 0.0;
    for (size_t i = 0; i < w_.size(); ++i)
        total += w_[i] * std_normal_cdf((y - mu_[i]) / s_[i]);
    return total;
}

double GaussianMixture::density_derivative(int m, double y) const {
    if (m < 0) throw std::invalid_argument("density_derivative: m >= 0 required");
    double total = 0.0;
    for (size_t i = 0; i < w_.size(); ++i) {
        double z = (y - mu_[i]) / s_[i];
        total += w_[i] * gaussian_density_derivative(m, z) / std::pow(s_[i], m + 1);
    }
    return total;
}

std::pair<double, double> GaussianMixture::window() const {
    double lo = mu_[0] - 6.0 * s_[0], hi = mu_[0] + 6.0 * s_[0];
    for (size_t i = 1; i < w_.size(); ++i) {
        lo = std::min(lo, mu_[i] - 6.0 * s_[i]);
        hi = std::max(hi, mu_[i] + 6.0 * s_[i]);
    }
    return {lo, hi};
}

double GaussianMixture::quantile(double t) const {
    if (!(t > 0.0 && t < 1.0))
        throw std::domain_error("quantile: t must lie strictly in (0,1)");
    // bracket: the generalized inverse lies within +-10 stds of the extreme means
    double lo = mu_[0] - 10.0 * s_[0], hi = mu_[0] + 10.0 * s_[0];
    for (size_t i = 1; i < w_.size(); ++i) {
        lo = std::min(lo, mu_[i] - 10.0 * s_[i]);
        hi = std::max(hi, mu_[i] + 10.0 * s_[i]);
    }
    while (cdf(lo) > t) lo -= 10.0;
    while (cdf(hi) < t) hi += 10.0;
    while (hi - lo > 1e-8) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < t)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 5; ++it) {
        double err = cdf(x) - t;
        if (std::abs(err) <= 1e-13) break;
        double d = pdf(x);
        if (d <= 0.0) break;
        double step = err / d;
        double xn = x - step;
        if (xn < lo || xn > hi) break;  // stay inside the bisection bracket
        x = xn;
    }
    return x;
}

GaussianMixture observation_model(const GaussianMixture& prior, const NoiseModel& noise) {
    std::vector<double> stds = prior.stds();
    for (auto& s : stds) s = std::sqrt(s * s + noise.sigma * noise.sigma);
    return GaussianMixture(prior.weights(), prior.means(), std::move(stds));
}

ScoreStack score_stack(const GaussianMixture& obs, double y, int max_order) {
    if (max_order < 1) throw std::invalid_argument("score_stack: max_order >= 1 required");
    double q = obs.pdf(y);
    if (q < kDensityFloor) throw DensityFloorError(y);
    ScoreStack st;
    st.y = y;
    st.max_order = max_order;
    st.values.assign(static_cast<size_t>(max_order) + 1, 0.0);
    st.ratios.assign(static_cast<size_t>(max_order) + 1, 0.0);
    for (int m = 1; m <= max_order; ++m) {
        st.values[static_cast<size_t>(m)] = obs.density_derivative(m - 1, y);
        st.ratios[static_cast<size_t>(m)] = st.values[static_cast<size_t>(m)] / q;
    }
    return st;
}

double ot_map_oracle(const GaussianMixture& prior, const GaussianMixture& obs, double y) {
    return prior.quantile(obs.cdf(y));
}

std::function<double(double)> exact_ot_map(const GaussianMixture& prior,
                                           const GaussianMixture& obs) {
    if (prior.components() == 1) {
        double mu = prior.means()[0];
        double scale = prior.stds()[0] / obs.stds()[0];
        return [mu, scale](double y) { return mu + (y - mu) * scale; };
    }
    return [prior, obs](double y) { return ot_map_oracle(prior, obs, y); };
}

}  // namespace otd
