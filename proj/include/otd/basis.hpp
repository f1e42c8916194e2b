#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace otd {

enum class BasisKind { Legendre, CubicSpline };

// Finite linear basis on a compact interval [a,b] with closed-form derivatives.
// Legendre: orthogonal polynomials up to `size_param` degree (dim = degree+1).
// CubicSpline: clamped uniform cubic B-splines with `size_param` interior
// knots (dim = size_param + 4).
struct BasisSpec {
    BasisKind kind = BasisKind::Legendre;
    int size_param = 3;
    double a = -1.0;
    double b = 1.0;
    int max_derivative = 3;
};

class Basis {
public:
    explicit Basis(const BasisSpec& spec);

    const BasisSpec& spec() const { return spec_; }
    int dim() const { return dim_; }

    // Writes beta_j^{(deriv)}(y) for all j into out (size dim()).
    void eval(double y, int deriv, std::span<double> out) const;

private:
    void eval_legendre(double y, int deriv, std::span<double> out) const;
    void eval_spline(double y, int deriv, std::span<double> out) const;

    BasisSpec spec_;
    int dim_;
    std::vector<std::vector<double>> leg_coeffs_;  // monomial coeffs in t
    std::vector<double> knots_;
};

}  // namespace otd
