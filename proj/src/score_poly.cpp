#include "otd/score_poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace otd {

namespace {

Rational binomial(int n, int k) {
    Rational r = 1;
    for (int i = 0; i < k; ++i) r *= Rational(n - i, i + 1);
    return r;
}

}  // namespace

void ScoreRatioPoly::add_term(Monomial mono, const Rational& c) {
    if (c == 0) return;
    // r_1 == 1: drop index-1 factors
    mono.erase(std::remove(mono.begin(), mono.end(), 1), mono.end());
    std::sort(mono.begin(), mono.end());
    auto [it, inserted] = terms_.emplace(std::move(mono), c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

ScoreRatioPoly ScoreRatioPoly::constant(const Rational& c) {
    ScoreRatioPoly p;
    p.add_term({}, c);
    return p;
}

ScoreRatioPoly ScoreRatioPoly::ratio(int m) {
    if (m < 1) throw std::invalid_argument("ratio index must be >= 1");
    ScoreRatioPoly p;
    p.add_term({m}, Rational(1));
    return p;
}

ScoreRatioPoly& ScoreRatioPoly::operator+=(const ScoreRatioPoly& o) {
    for (const auto& [mono, c] : o.terms_) add_term(mono, c);
    return *this;
}

ScoreRatioPoly& ScoreRatioPoly::operator-=(const ScoreRatioPoly& o) {
    for (const auto& [mono, c] : o.terms_) add_term(mono, -c);
    return *this;
}

ScoreRatioPoly ScoreRatioPoly::operator+(const ScoreRatioPoly& o) const {
    ScoreRatioPoly r = *this;
    r += o;
    return r;
}

ScoreRatioPoly ScoreRatioPoly::operator-(const ScoreRatioPoly& o) const {
    ScoreRatioPoly r = *this;
    r -= o;
    return r;
}

ScoreRatioPoly ScoreRatioPoly::operator-() const {
    ScoreRatioPoly r;
    for (const auto& [mono, c] : terms_) r.add_term(mono, -c);
    return r;
}

ScoreRatioPoly ScoreRatioPoly::operator*(const Rational& c) const {
    ScoreRatioPoly r;
    for (const auto& [mono, coef] : terms_) r.add_term(mono, coef * c);
    return r;
}

ScoreRatioPoly ScoreRatioPoly::operator*(const ScoreRatioPoly& o) const {
    ScoreRatioPoly r;
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            Monomial m = ma;
            m.insert(m.end(), mb.begin(), mb.end());
            r.add_term(std::move(m), ca * cb);
        }
    }
    return r;
}

int ScoreRatioPoly::max_index() const {
    int mx = 0;
    for (const auto& [mono, c] : terms_)
        for (int i : mono) mx = std::max(mx, i);
    return mx;
}

double ScoreRatioPoly::evaluate(std::span<const double> ratios) const {
    double total = 0.0;
    for (const auto& [mono, c] : terms_) {
        double prod = c.convert_to<double>();
        for (int i : mono) {
            if (i >= static_cast<int>(ratios.size()))
                throw std::out_of_range("ScoreRatioPoly::evaluate: missing ratio index " +
                                        std::to_string(i));
            prod *= ratios[i];
        }
        total += prod;
    }
    return total;
}

std::string ScoreRatioPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mono, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c;
        int run = 0;
        for (size_t i = 0; i < mono.size(); ++i) {
            ++run;
            bool last_of_kind = (i + 1 == mono.size() || mono[i + 1] != mono[i]);
            if (last_of_kind) {
                os << "*r" << mono[i];
                if (run > 1) os << "^" << run;
                run = 0;
            }
        }
    }
    return os.str();
}

ScoreRatioPoly bell_evaluate_poly(const BellPolynomial& b, std::span<const ScoreRatioPoly> args) {
    if (static_cast<int>(args.size()) < b.n - b.k + 1)
        throw std::invalid_argument("bell_evaluate_poly: too few arguments");
    ScoreRatioPoly total;
    for (const auto& t : b.terms) {
        ScoreRatioPoly prod = ScoreRatioPoly::constant(Rational(t.coefficient));
        for (size_t i = 0; i < t.multiplicities.size(); ++i)
            for (int rep = 0; rep < t.multiplicities[i]; ++rep) prod = prod * args[i];
        total += prod;
    }
    return total;
}

std::vector<ScoreRatioPoly> derive_g_sequence(int K) {
    if (K < 1) throw std::invalid_argument("derive_g_sequence: K >= 1 required");
    std::vector<ScoreRatioPoly> g;
    g.push_back(ScoreRatioPoly::ratio(2));
    for (int k = 2; k <= K; ++k) {
        ScoreRatioPoly gk = ScoreRatioPoly::ratio(2 * k);
        for (int j = 2; j <= k; ++j) {
            std::span<const ScoreRatioPoly> args(g.data(), k - j + 1);
            gk -= ScoreRatioPoly::ratio(j) * bell_evaluate_poly(bell_polynomial(k, j), args);
        }
        g.push_back(std::move(gk));
    }
    return g;
}

namespace {

// Left side of the defining recursion for h_k, divided through by G^{(1)}:
//   sum_{l=0}^{k-1} (-1)^l C(k,l) sum_{j=1}^{k-l} r_{2l+j} B_{k-l,j}(h_1..h_{k-l-j+1})
//   + (-1)^k r_{2k}.
// h may hold only h_1..h_{k-1}; missing entries are treated as zero, which is
// how the recursion is solved (the sole h_k occurrence is the l=0, j=1 term).
ScoreRatioPoly h_recursion_lhs(std::span<const ScoreRatioPoly> h, int k) {
    std::vector<ScoreRatioPoly> padded(h.begin(), h.end());
    padded.resize(static_cast<size_t>(k), ScoreRatioPoly{});
    ScoreRatioPoly lhs;
    for (int l = 0; l <= k - 1; ++l) {
        Rational sign = (l % 2 == 0) ? Rational(1) : Rational(-1);
        Rational cl = binomial(k, l) * sign;
        for (int j = 1; j <= k - l; ++j) {
            std::span<const ScoreRatioPoly> args(padded.data(), k - l - j + 1);
            ScoreRatioPoly term =
                ScoreRatioPoly::ratio(2 * l + j) * bell_evaluate_poly(bell_polynomial(k - l, j), args);
            lhs += term * cl;
        }
    }
    Rational signk = (k % 2 == 0) ? Rational(1) : Rational(-1);
    lhs += ScoreRatioPoly::ratio(2 * k) * signk;
    return lhs;
}

}  // namespace

std::vector<ScoreRatioPoly> derive_h_sequence(int K) {
    if (K < 1) throw std::invalid_argument("derive_h_sequence: K >= 1 required");
    std::vector<ScoreRatioPoly> h;
    for (int k = 1; k <= K; ++k) {
        ScoreRatioPoly rest = h_recursion_lhs(h, k);
        h.push_back(-rest);
    }
    return h;
}

ScoreRatioPoly verify_recursion_residual(std::span<const ScoreRatioPoly> h_polys, int k) {
    if (static_cast<int>(h_polys.size()) < k)
        throw std::invalid_argument("verify_recursion_residual: need h_1..h_k");
    return h_recursion_lhs(h_polys.subspan(0, k), k);
}

std::vector<ScoreRatioPoly> closed_form_h_sequence(int K) {
    if (K < 1) throw std::invalid_argument("closed_form_h_sequence: K >= 1 required");
    std::vector<ScoreRatioPoly> h;
    for (int k = 1; k <= K; ++k) {
        Rational signk = (k % 2 == 0) ? Rational(1) : Rational(-1);
        ScoreRatioPoly hk = ScoreRatioPoly::ratio(2 * k) * (-signk);
        for (int i = 1; i <= k - 1; ++i) {
            Rational sign = ((k - i) % 2 == 0) ? Rational(1) : Rational(-1);
            Rational ci = binomial(k, i) * sign;
            for (int j = 0; j <= i - 1; ++j) {
                std::span<const ScoreRatioPoly> args(h.data(), j + 1);
                ScoreRatioPoly term = ScoreRatioPoly::ratio(2 * k - i - j) *
                                      bell_evaluate_poly(bell_polynomial(i, i - j), args);
                hk -= term * ci;
            }
        }
        for (int j = 0; j <= k - 2; ++j) {
            std::span<const ScoreRatioPoly> args(h.data(), j + 1);
            hk -= ScoreRatioPoly::ratio(k - j) *
                  bell_evaluate_poly(bell_polynomial(k, k - j), args);
        }
        h.push_back(std::move(hk));
    }
    return h;
}

double evaluate_series(const DenoiserSeries& series, std::span<const double> ratios,
                       double eta, double y) {
    double total = y;
    double etak = 1.0;
    double kfact = 1.0;
    for (int k = 1; k <= series.order; ++k) {
        etak *= eta;
        kfact *= k;
        total += etak / kfact * series.coefficient_polys[static_cast<size_t>(k - 1)].evaluate(ratios);
    }
    return total;
}

std::string series_to_json(const DenoiserSeries& series) {
    nlohmann::json j;
    j["side"] = series.side == Side::G ? "G" : "F";
    j["order"] = series.order;
    j["coefficients"] = nlohmann::json::array();
    for (int k = 1; k <= series.order; ++k) {
        const auto& poly = series.coefficient_polys[static_cast<size_t>(k - 1)];
        nlohmann::json jp;
        jp["k"] = k;
        jp["pretty"] = poly.to_string();
        jp["terms"] = nlohmann::json::array();
        for (const auto& [mono, c] : poly.terms()) {
            nlohmann::json jt;
            jt["ratio_indices"] = mono;
            std::ostringstream os;
            os << c;
            jt["coefficient"] = os.str();
            jp["terms"].push_back(jt);
        }
        j["coefficients"].push_back(jp);
    }
    return j.dump(2);
}

}  // namespace otd
