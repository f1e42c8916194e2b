#include "otd/basis.hpp"

#include <cmath>

namespace otd {

Basis::Basis(const BasisSpec& spec) : spec_(spec) {
    if (spec.b <= spec.a) throw std::invalid_argument("Basis: need a < b");
    if (spec.size_param < 0) throw std::invalid_argument("Basis: size_param >= 0 required");
    if (spec.kind == BasisKind::Legendre) {
        dim_ = spec.size_param + 1;
        // Legendre coefficients in the rescaled variable t in [-1,1]:
        // (j+1) P_{j+1} = (2j+1) t P_j - j P_{j-1}
        leg_coeffs_.resize(static_cast<size_t>(dim_));
        leg_coeffs_[0] = {1.0};
        if (dim_ > 1) leg_coeffs_[1] = {0.0, 1.0};
        for (int j = 1; j + 1 < dim_; ++j) {
            const auto& pj = leg_coeffs_[static_cast<size_t>(j)];
            const auto& pjm = leg_coeffs_[static_cast<size_t>(j - 1)];
            std::vector<double> next(static_cast<size_t>(j) + 2, 0.0);
            for (size_t i = 0; i < pj.size(); ++i)
                next[i + 1] += (2.0 * j + 1.0) / (j + 1.0) * pj[i];
            for (size_t i = 0; i < pjm.size(); ++i)
                next[i] -= static_cast<double>(j) / (j + 1.0) * pjm[i];
            leg_coeffs_[static_cast<size_t>(j + 1)] = std::move(next);
        }
    } else {
        if (spec_.max_derivative > 3)
            throw std::invalid_argument("Basis: cubic splines support derivatives up to 3");
        dim_ = spec.size_param + 4;
        // clamped knot vector, uniform interior spacing
        int nseg = spec.size_param + 1;
        double h = (spec.b - spec.a) / nseg;
        for (int i = 0; i < 4; ++i) knots_.push_back(spec.a);
        for (int i = 1; i < nseg; ++i) knots_.push_back(spec.a + i * h);
        for (int i = 0; i < 4; ++i) knots_.push_back(spec.b);
    }
}

void Basis::eval(double y, int deriv, std::span<double> out) const {
    if (deriv < 0 || deriv > spec_.max_derivative)
        throw std::invalid_argument("Basis::eval: derivative order out of range");
    if (y < spec_.a || y > spec_.b)
        throw std::domain_error("Basis::eval: y outside the basis interval");
    if (static_cast<int>(out.size()) != dim_)
        throw std::invalid_argument("Basis::eval: output span size mismatch");
    if (spec_.kind == BasisKind::Legendre)
        eval_legendre(y, deriv, out);
    else
        eval_spline(y, deriv, out);
}

void Basis::eval_legendre(double y, int deriv, std::span<double> out) const {
    double scale = 2.0 / (spec_.b - spec_.a);
    double t = scale * (y - spec_.a) - 1.0;
    double chain = std::pow(scale, deriv);
    for (int j = 0; j < dim_; ++j) {
        const auto& c = leg_coeffs_[static_cast<size_t>(j)];
        // deriv-th derivative of sum c_i t^i, evaluated by Horner
        double v = 0.0;
        for (int i = static_cast<int>(c.size()) - 1; i >= deriv; --i) {
            double fall = 1.0;
            for (int d = 0; d < deriv; ++d) fall *= (i - d);
            v = v * t + fall * c[static_cast<size_t>(i)];
        }
        out[static_cast<size_t>(j)] = v * chain;
    }
}

namespace {

// Cox-de Boor value of B_{i,p} on the given knot vector.
double bspline_value(const std::vector<double>& kn, int i, int p, double x) {
    if (p == 0) {
        // half-open spans, except the last span which is closed at b
        bool last = (kn[static_cast<size_t>(i + 1)] == kn.back() &&
                     kn[static_cast<size_t>(i)] < kn[static_cast<size_t>(i + 1)]);
        if (last) return (x >= kn[static_cast<size_t>(i)] && x <= kn[static_cast<size_t>(i + 1)]) ? 1.0 : 0.0;
        return (x >= kn[static_cast<size_t>(i)] && x < kn[static_cast<size_t>(i + 1)]) ? 1.0 : 0.0;
    }
    double left = 0.0, right = 0.0;
    double d1 = kn[static_cast<size_t>(i + p)] - kn[static_cast<size_t>(i)];
    double d2 = kn[static_cast<size_t>(i + p + 1)] - kn[static_cast<size_t>(i + 1)];
    if (d1 > 0.0) left = (x - kn[static_cast<size_t>(i)]) / d1 * bspline_value(kn, i, p - 1, x);
    if (d2 > 0.0)
        right = (kn[static_cast<size_t>(i + p + 1)] - x) / d2 * bspline_value(kn, i + 1, p - 1, x);
    return left + right;
}

double bspline_deriv(const std::vector<double>& kn, int i, int p, int d, double x) {
    if (d == 0) return bspline_value(kn, i, p, x);
    double left = 0.0, right = 0.0;
    double d1 = kn[static_cast<size_t>(i + p)] - kn[static_cast<size_t>(i)];
    double d2 = kn[static_cast<size_t>(i + p + 1)] - kn[static_cast<size_t>(i + 1)];
    if (d1 > 0.0) left = bspline_deriv(kn, i, p - 1, d - 1, x) / d1;
    if (d2 > 0.0) right = bspline_deriv(kn, i + 1, p - 1, d - 1, x) / d2;
    return p * (left - right);
}

}  // namespace

void Basis::eval_spline(double y, int deriv, std::span<double> out) const {
    for (int j = 0; j < dim_; ++j)
        out[static_cast<size_t>(j)] = bspline_deriv(knots_, j, 3, deriv, y);
}

}  // namespace otd
