#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "otd/numeric.hpp"

namespace otd {

// One summand of a partial Bell polynomial: a multiplicity vector
// (j_1, ..., j_{n-k+1}) with sum(j_i) = k and sum(i*j_i) = n, together with
// the exact integer coefficient n! / (j_1!...j_{n-k+1}! (1!)^{j_1}...((n-k+1)!)^{j_{n-k+1}}).
struct PartitionTerm {
    std::vector<int> multiplicities;
    BigInt coefficient;
};

struct BellPolynomial {
    int n = 0;
    int k = 0;
    std::vector<PartitionTerm> terms;

    // Sum over terms of coeff * prod values[i]^{j_i}, values is 0-based
    // (values[0] plays the role of x_1). Requires values.size() >= n-k+1.
    double evaluate(std::span<const double> values) const;

    // Row value at x_i = 1, i.e. the Stirling number of the second kind S(n,k).
    BigInt stirling2() const;
};

// All multiplicity vectors satisfying the two partition constraints, in
// lexicographic order, each with its exact coefficient.
std::vector<PartitionTerm> enumerate_partitions(int n, int k);

// Memoized immutable instance; safe for concurrent use.
const BellPolynomial& bell_polynomial(int n, int k);

}  // namespace otd
