#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otd/gaussian_mixture.hpp"
#include "otd/score_poly.hpp"

namespace otd {

// Supplies score ratios r_1..r_{2K} at a point; analytic oracle, KDE plug-in,
// or fitted score-matching evaluations all fit this shape.
using RatioProvider = std::function<ScoreStack(double, int /*max_order*/)>;

struct Denoiser {
    int K = 0;
    double eta = 0.0;
    DenoiserSeries series;  // side G, h_1..h_K
    RatioProvider provider;
    double ratio_cap = 1e3;  // estimated ratios are clamped to +-cap
};

Denoiser build_denoiser(int K, double eta, RatioProvider provider);

// T^bayes(y) = y + 2 eta r_2(y), expressed as an order-1 series with
// coefficient polynomial 2 r_2.
Denoiser bayes_denoiser(double eta, RatioProvider provider);

// Pointwise evaluation; throws what the provider throws (density floor).
double apply_at(const Denoiser& d, double y);

struct DenoiseReport {
    std::vector<double> grid;
    std::vector<double> outputs;
    std::vector<bool> ok;  // per-point provider success
    bool monotone = false;
    double min_slope = 0.0;  // finite-difference over the sorted grid
};

DenoiseReport apply(const Denoiser& d, std::vector<double> ys);

RatioProvider analytic_provider(const GaussianMixture& obs);

// Pool-adjacent-violators projection onto non-decreasing sequences
// (unit weights); used behind a flag for Wasserstein evaluation.
std::vector<double> isotonic_projection(const std::vector<double>& values);

}  // namespace otd
