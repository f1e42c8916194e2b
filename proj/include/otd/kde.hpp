#pragma once

#include <cstdint>
#include <vector>

#include "otd/gaussian_mixture.hpp"

namespace otd {

// i.i.d. draws from Q together with the seed that produced them.
struct SampleSet {
    std::vector<double> values;
    uint64_t seed = 0;
    size_t n() const { return values.size(); }
};

SampleSet draw_samples(const GaussianMixture& model, size_t n, uint64_t seed);

// b_m(n) = (sqrt(8/pi) m! / L)^{1/(2m+5)} * n^{-1/(2m+5)}.
double bandwidth(int m, size_t n, double L);

// (1/(n b^{m+1})) sum_i phi^{(m)}((y - Y_i)/b).
double kde_derivative(const SampleSet& samples, int m, double b, double y);

// q_hat^{(m)}_{b_m}(y) / q_hat_{b_0}(y) with the two order-specific bandwidths;
// throws DensityFloorError if the denominator estimate is below the floor.
double plug_in_ratio(const SampleSet& samples, int m, double y, double L);

}  // namespace otd
