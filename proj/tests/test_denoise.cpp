#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "otd/denoise.hpp"
#include "otd/slope.hpp"

using otd::Denoiser;
using otd::GaussianMixture;
using otd::NoiseModel;

TEST_CASE("K = 0 is the identity denoiser") {
    GaussianMixture prior({1.0}, {0.0}, {1.0});
    auto obs = otd::observation_model(prior, NoiseModel(0.3));
    Denoiser t0 = otd::build_denoiser(0, 0.045, otd::analytic_provider(obs));
    for (double y : {-2.0, 0.0, 1.3}) CHECK(otd::apply_at(t0, y) == y);

    auto rep = otd::apply(t0, {-1.0, 0.0, 2.0});
    CHECK(rep.outputs == std::vector<double>{-1.0, 0.0, 2.0});
    CHECK(rep.monotone);
}

TEST_CASE("Gaussian T1 is the expected linear shrinker") {
    const double tau = 0.8, eta = 0.02, sigma = std::sqrt(2.0 * eta);
    GaussianMixture prior({1.0}, {0.0}, {tau});
    auto obs = otd::observation_model(prior, NoiseModel(sigma));
    Denoiser t1 = otd::build_denoiser(1, eta, otd::analytic_provider(obs));
    double slope = 1.0 - eta / (tau * tau + 2.0 * eta);
    for (double y : {-1.5, -0.2, 0.0, 0.9, 2.0})
        CHECK(otd::apply_at(t1, y) == doctest::Approx(slope * y).epsilon(1e-12).scale(1.0));

    auto rep = otd::apply(t1, {-2.0, -1.0, 0.0, 1.0, 2.0});
    CHECK(rep.monotone);
    CHECK(rep.min_slope == doctest::Approx(slope).epsilon(1e-9));
}

TEST_CASE("Bayes denoiser relations") {
    const double tau = 1.1, eta = 0.03, sigma = std::sqrt(2.0 * eta);
    GaussianMixture prior({1.0}, {0.0}, {tau});
    auto obs = otd::observation_model(prior, NoiseModel(sigma));
    auto provider = otd::analytic_provider(obs);
    Denoiser tb = otd::bayes_denoiser(eta, provider);
    Denoiser t1 = otd::build_denoiser(1, eta, provider);
    double v = tau * tau + sigma * sigma;
    for (double y : {-1.0, 0.4, 1.7}) {
        // classical linear shrinker y (1 - sigma^2 / v)
        CHECK(otd::apply_at(tb, y) ==
              doctest::Approx(y * (1.0 - sigma * sigma / v)).epsilon(1e-12).scale(1.0));
        // T_bayes - id = 2 (T_1 - id)
        CHECK(otd::apply_at(tb, y) - y ==
              doctest::Approx(2.0 * (otd::apply_at(t1, y) - y)).epsilon(1e-12).scale(1.0));
    }

    Denoiser tb0 = otd::bayes_denoiser(0.0, provider);
    for (double y : {-1.0, 0.4}) CHECK(otd::apply_at(tb0, y) == doctest::Approx(y).epsilon(1e-15));
}

TEST_CASE("eta = 0 collapses every order to the identity") {
    GaussianMixture prior({0.5, 0.5}, {-1.0, 1.0}, {0.4, 0.4});
    auto provider = otd::analytic_provider(prior);  // sigma = 0: obs = prior
    for (int K : {1, 2, 3}) {
        Denoiser t = otd::build_denoiser(K, 0.0, provider);
        for (double y : {-1.2, 0.0, 0.8})
            CHECK(otd::apply_at(t, y) == doctest::Approx(y).epsilon(1e-15));
    }
}

TEST_CASE("monotonicity is diagnosed, not repaired") {
    // a provider with an overly steep score makes T1 overshoot; the report must
    // flag it instead of failing
    otd::RatioProvider steep = [](double y, int max_order) {
        otd::ScoreStack st;
        st.y = y;
        st.max_order = max_order;
        st.values.assign(static_cast<size_t>(max_order) + 1, 0.0);
        st.ratios.assign(static_cast<size_t>(max_order) + 1, 0.0);
        st.ratios[1] = 1.0;
        if (max_order >= 2) st.ratios[2] = -100.0 * y;  // score of N(0, 0.01)
        return st;
    };
    Denoiser t1 = otd::build_denoiser(1, 0.05, steep);
    std::vector<double> grid;
    for (double y = -1.0; y <= 1.0; y += 0.05) grid.push_back(y);
    auto rep = otd::apply(t1, grid);
    CHECK_FALSE(rep.monotone);
    CHECK(rep.min_slope < 0.0);
    CHECK(rep.min_slope == doctest::Approx(-4.0).epsilon(1e-9));  // 1 - 0.05 * 100
    for (bool ok : rep.ok) CHECK(ok);
}

TEST_CASE("provider failures are recorded per point") {
    GaussianMixture prior({1.0}, {0.0}, {0.5});
    auto obs = otd::observation_model(prior, NoiseModel(0.2));
    Denoiser t1 = otd::build_denoiser(1, 0.02, otd::analytic_provider(obs));
    auto rep = otd::apply(t1, {0.0, 50.0});  // the far tail is below the density floor
    CHECK(rep.ok[0]);
    CHECK_FALSE(rep.ok[1]);
}

TEST_CASE("isotonic projection") {
    CHECK(otd::isotonic_projection({3.0, 1.0, 2.0}) == std::vector<double>{2.0, 2.0, 2.0});
    std::vector<double> inc{-1.0, 0.0, 0.5, 2.0};
    CHECK(otd::isotonic_projection(inc) == inc);
    CHECK(otd::isotonic_projection({2.0, 1.0}) == std::vector<double>{1.5, 1.5});
}

TEST_CASE("Gaussian exactness order in eta") {
    // sup |T_K - T_inf| over the window decays like eta^{K+1}
    GaussianMixture prior({1.0}, {0.0}, {1.0});
    std::vector<double> etas{0.005, 0.01, 0.02, 0.04, 0.08};
    auto window = prior.window();
    for (int K : {1, 2, 3}) {
        std::vector<double> errs;
        for (double eta : etas) {
            double sigma = std::sqrt(2.0 * eta);
            auto obs = otd::observation_model(prior, NoiseModel(sigma));
            Denoiser tk = otd::build_denoiser(K, eta, otd::analytic_provider(obs));
            tk.ratio_cap = std::numeric_limits<double>::infinity();  // exact ratios, no clamp
            double c = 1.0 / std::sqrt(1.0 + sigma * sigma);
            double sup = 0.0;
            for (double y = window.first; y <= window.second; y += 0.05)
                sup = std::max(sup, std::abs(otd::apply_at(tk, y) - c * y));
            errs.push_back(sup);
        }
        auto fit = otd::fit_loglog(etas, errs);
        INFO("K = ", K, " slope = ", fit.slope);
        CHECK(std::abs(fit.slope - (K + 1)) <= 0.25);
    }
}

TEST_CASE("ratio cap clamps explosive provider output") {
    // a provider returning absurd ratios must not produce unbounded output
    otd::RatioProvider wild = [](double y, int max_order) {
        otd::ScoreStack st;
        st.y = y;
        st.max_order = max_order;
        st.values.assign(static_cast<size_t>(max_order) + 1, 0.0);
        st.ratios.assign(static_cast<size_t>(max_order) + 1, 0.0);
        st.ratios[1] = 1.0;
        for (int k = 2; k <= max_order; ++k) st.ratios[static_cast<size_t>(k)] = 1e9;
        return st;
    };
    Denoiser t1 = otd::build_denoiser(1, 0.01, wild);
    CHECK(otd::apply_at(t1, 0.0) == doctest::Approx(0.01 * t1.ratio_cap).epsilon(1e-12));
}
