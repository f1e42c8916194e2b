#include "otd/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otd {

Denoiser build_denoiser(int K, double eta, RatioProvider provider) {
    if (K < 0) throw std::invalid_argument("build_denoiser: K >= 0 required");
    if (eta < 0.0) throw std::invalid_argument("build_denoiser: eta >= 0 required");
    Denoiser d;
    d.K = K;
    d.eta = eta;
    d.series.side = Side::G;
    d.series.order = K;
    if (K >= 1) d.series.coefficient_polys = derive_h_sequence(K);
    d.provider = std::move(provider);
    return d;
}

Denoiser bayes_denoiser(double eta, RatioProvider provider) {
    Denoiser d;
    d.K = 1;
    d.eta = eta;
    d.series.side = Side::G;
    d.series.order = 1;
    d.series.coefficient_polys = {ScoreRatioPoly::ratio(2) * Rational(2)};
    d.provider = std::move(provider);
    return d;
}

double apply_at(const Denoiser& d, double y) {
    if (d.series.order == 0) return y;
    ScoreStack st = d.provider(y, 2 * d.series.order);
    std::vector<double> ratios = st.ratios;
    for (auto& r : ratios) r = std::clamp(r, -d.ratio_cap, d.ratio_cap);
    return evaluate_series(d.series, ratios, d.eta, y);
}

DenoiseReport apply(const Denoiser& d, std::vector<double> ys) {
    DenoiseReport rep;
    std::sort(ys.begin(), ys.end());
    rep.grid = std::move(ys);
    rep.outputs.assign(rep.grid.size(), std::nan(""));
    rep.ok.assign(rep.grid.size(), false);
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        try {
            rep.outputs[i] = apply_at(d, rep.grid[i]);
            rep.ok[i] = true;
        } catch (const DensityFloorError&) {
            // recorded per point, not fatal
        }
    }
    rep.min_slope = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < rep.grid.size(); ++i) {
        if (!rep.ok[i] || !rep.ok[i + 1]) continue;
        double dx = rep.grid[i + 1] - rep.grid[i];
        if (dx <= 0.0) continue;
        rep.min_slope = std::min(rep.min_slope, (rep.outputs[i + 1] - rep.outputs[i]) / dx);
    }
    rep.monotone = rep.min_slope > 0.0;
    return rep;
}

RatioProvider analytic_provider(const GaussianMixture& obs) {
    return [obs](double y, int max_order) { return score_stack(obs, y, max_order); };
}

std::vector<double> isotonic_projection(const std::vector<double>& values) {
    // pool adjacent violators, unit weights
    std::vector<double> level;
    std::vector<size_t> count;
    for (double v : values) {
        level.push_back(v);
        count.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            double merged = (level[level.size() - 2] * count[count.size() - 2] +
                             level.back() * count.back()) /
                            static_cast<double>(count[count.size() - 2] + count.back());
            count[count.size() - 2] += count.back();
            level[level.size() - 2] = merged;
            level.pop_back();
            count.pop_back();
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (size_t i = 0; i < level.size(); ++i)
        out.insert(out.end(), count[i], level[i]);
    return out;
}

}  // namespace otd
