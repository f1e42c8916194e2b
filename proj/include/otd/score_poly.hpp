#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "otd/bell.hpp"
#include "otd/numeric.hpp"

namespace otd {

// Which CDF the score ratios refer to: F (signal side) or G (observation side).
enum class Side { F, G };

// Monomial in the ratio variables r_m = C^{(m)}/C^{(1)}: a sorted multiset of
// ratio indices, each index >= 2 (r_1 == 1 is normalized away on construction).
using Monomial = std::vector<int>;

struct MonomialOrder {
    // total degree first, then lexicographic on the index multiset
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

// Polynomial in score-ratio variables with exact rational coefficients.
// Canonical form: monomials sorted by the order above, zero coefficients pruned.
class ScoreRatioPoly {
public:
    ScoreRatioPoly() = default;

    static ScoreRatioPoly constant(const Rational& c);
    static ScoreRatioPoly ratio(int m);  // r_m; r_1 collapses to the constant 1

    bool is_zero() const { return terms_.empty(); }
    const std::map<Monomial, Rational, MonomialOrder>& terms() const { return terms_; }

    ScoreRatioPoly& operator+=(const ScoreRatioPoly& o);
    ScoreRatioPoly& operator-=(const ScoreRatioPoly& o);
    ScoreRatioPoly operator+(const ScoreRatioPoly& o) const;
    ScoreRatioPoly operator-(const ScoreRatioPoly& o) const;
    ScoreRatioPoly operator*(const ScoreRatioPoly& o) const;
    ScoreRatioPoly operator-() const;
    ScoreRatioPoly operator*(const Rational& c) const;
    bool operator==(const ScoreRatioPoly& o) const { return terms_ == o.terms_; }

    // Largest ratio index appearing anywhere (0 for constants).
    int max_index() const;

    // Numeric evaluation; ratios[m] supplies r_m (ratios[1] must be 1).
    // Throws if a needed index is missing.
    double evaluate(std::span<const double> ratios) const;

    std::string to_string() const;

private:
    void add_term(Monomial mono, const Rational& c);
    std::map<Monomial, Rational, MonomialOrder> terms_;
};

// Truncated denoiser series T(y) = y + sum_{k=1}^{K} eta^k/k! * poly_k(ratios).
struct DenoiserSeries {
    Side side = Side::G;
    int order = 0;
    std::vector<ScoreRatioPoly> coefficient_polys;  // poly_1 ... poly_K
};

// g_1..g_K of the F-side expansion:
//   g_1 = r_2,  g_k = r_{2k} - sum_{j=2}^{k} r_j * B_{k,j}(g_1..g_{k-j+1}).
std::vector<ScoreRatioPoly> derive_g_sequence(int K);

// h_1..h_K of the G-side expansion, each the unique solution of the defining
// recursion (the l=0, j=1 term isolates G^{(1)} h_k).
std::vector<ScoreRatioPoly> derive_h_sequence(int K);

// Left side of the h_k defining recursion with the given h_1..h_k substituted
// (divided through by G^{(1)}); identically zero for correctly derived h's.
ScoreRatioPoly verify_recursion_residual(std::span<const ScoreRatioPoly> h_polys, int k);

// The non-recursive display for h_k in terms of h_1..h_{k-1}; used to
// cross-check the recursion-derived sequence.
std::vector<ScoreRatioPoly> closed_form_h_sequence(int K);

// Symbolic partial Bell polynomial with ScoreRatioPoly arguments.
ScoreRatioPoly bell_evaluate_poly(const BellPolynomial& b, std::span<const ScoreRatioPoly> args);

double evaluate_series(const DenoiserSeries& series, std::span<const double> ratios,
                       double eta, double y);

// Human-readable dump (monomial -> rational coefficient) as a JSON string.
std::string series_to_json(const DenoiserSeries& series);

}  // namespace otd
