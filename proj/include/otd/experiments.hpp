#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otd/basis.hpp"
#include "otd/gaussian_mixture.hpp"
#include "otd/slope.hpp"

namespace otd {

struct PriorSpec {
    std::vector<double> weights{1.0};
    std::vector<double> means{0.0};
    std::vector<double> stds{1.0};
    GaussianMixture build() const { return GaussianMixture(weights, means, stds); }
};

enum class Estimator { Analytic, Kde, ScoreMatching };

struct ExperimentConfig {
    std::string scenario;  // order | kde-rate | sm-rate | demo
    PriorSpec prior;
    std::vector<double> eta_sweep{0.005, 0.01, 0.02, 0.04, 0.08};
    std::vector<size_t> n_sweep{512, 1024, 2048, 4096, 8192, 16384, 32768};
    int K = 1;
    int m = 1;
    Estimator estimator = Estimator::Analytic;
    size_t replicates = 200;
    uint64_t seed = 0;
    bool has_seed = false;  // seed is mandatory; parsing enforces it
    std::string out_dir = "out";
    double L = 1.0;
    double sigma = 0.2;       // demo noise level
    size_t demo_n = 20000;    // demo sample size
    double eval_y = 0.5;      // fixed interior point for kde rates
    double wasserstein_r = 2.0;
    size_t grid_points = 1001;
    size_t quad_points = 2001;
    double slope_tol_eta = 0.25;
    double slope_tol_n = 0.15;
    int threads = 1;
    BasisSpec basis{BasisKind::Legendre, 3, -6.0, 6.0, 3};
    std::string kernel_impl = "auto";

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string echo_json() const;
};

struct Verdict {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ExperimentResult {
    std::vector<SlopeFit> fits;
    std::vector<Verdict> verdicts;
    std::string csv;  // full table, also written to out_dir
    bool all_pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
};

// eta sweep with the analytic provider: sup |T_K - T_inf|, W_r^*, and the
// sup Monge-Ampere residual, each slope-fitted against eta.
ExperimentResult run_order_experiment(const ExperimentConfig& cfg);

// n sweep of the KDE mean squared error at a fixed interior point.
ExperimentResult run_kde_rate_experiment(const ExperimentConfig& cfg);

// n sweep of the score-matching L2(Q) squared error against the analytic score.
ExperimentResult run_score_matching_experiment(const ExperimentConfig& cfg);

// end-to-end comparison table T0 / T1 / T2 / Tbayes on estimated scores.
ExperimentResult run_pipeline_demo(const ExperimentConfig& cfg);

// Runs replicate bodies with pre-assigned result slots; deterministic
// regardless of thread count.
void parallel_replicates(size_t count, int threads,
                         const std::function<void(size_t)>& body);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace otd
