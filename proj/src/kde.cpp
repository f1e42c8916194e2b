#include "otd/kde.hpp"

#include <cmath>

#include "otd/kernels.hpp"
#include "otd/rng.hpp"

namespace otd {

double Rng::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

SampleSet draw_samples(const GaussianMixture& model, size_t n, uint64_t seed) {
    SampleSet out;
    out.seed = seed;
    out.values.reserve(n);
    Rng rng(seed);
    const auto& w = model.weights();
    const auto& mu = model.means();
    const auto& s = model.stds();
    for (size_t i = 0; i < n; ++i) {
        double u = rng.next_double();
        size_t c = 0;
        double acc = w[0];
        while (c + 1 < w.size() && u > acc) acc += w[++c];
        out.values.push_back(mu[c] + s[c] * rng.next_normal());
    }
    return out;
}

double bandwidth(int m, size_t n, double L) {
    if (L <= 0.0) throw std::invalid_argument("bandwidth: L must be > 0");
    if (n < 1) throw std::invalid_argument("bandwidth: n >= 1 required");
    double mfact = 1.0;
    for (int i = 2; i <= m; ++i) mfact *= i;
    double c = std::pow(std::sqrt(8.0 / M_PI) * mfact / L, 1.0 / (2 * m + 5));
    return c * std::pow(static_cast<double>(n), -1.0 / (2 * m + 5));
}

double kde_derivative(const SampleSet& samples, int m, double b, double y) {
    if (b <= 0.0) throw std::invalid_argument("kde_derivative: b must be > 0");
    if (m < 0) throw std::invalid_argument("kde_derivative: m >= 0 required");
    double sum = kernels::kde_kernel_sum(samples.values, m, b, y);
    return sum / (static_cast<double>(samples.n()) * std::pow(b, m + 1));
}

double plug_in_ratio(const SampleSet& samples, int m, double y, double L) {
    double denom = kde_derivative(samples, 0, bandwidth(0, samples.n(), L), y);
    if (denom < kDensityFloor) throw DensityFloorError(y);
    double numer = kde_derivative(samples, m, bandwidth(m, samples.n(), L), y);
    return numer / denom;
}

}  // namespace otd
