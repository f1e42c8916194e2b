#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace otd {

// Ordinary least squares on (log x, log y); at least 4 sweep points.
struct SlopeFit {
    std::vector<std::pair<double, double>> points;  // (log x, log y)
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

inline SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_loglog: length mismatch");
    if (xs.size() < 4) throw std::invalid_argument("fit_loglog: need at least 4 points");
    SlopeFit f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0.0 || ys[i] <= 0.0)
            throw std::domain_error("fit_loglog: non-positive value");
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        f.points.emplace_back(lx, ly);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(xs.size());
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (auto [lx, ly] : f.points) {
        double e = ly - (f.intercept + f.slope * lx);
        ss += e * e;
    }
    f.residual_rms = std::sqrt(ss / n);
    return f;
}

}  // namespace otd
