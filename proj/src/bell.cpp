#include "otd/bell.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace otd {

namespace {

BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void enumerate_rec(int n, int k, int idx, int maxidx, int parts_left, int weight_left,
                   std::vector<int>& mult, std::vector<PartitionTerm>& out) {
    if (idx == maxidx) {
        if (parts_left == 0 && weight_left == 0) {
            // coefficient = n! / (prod j_i! * prod (i!)^{j_i}); the division
            // is exact since the multinomial count is an integer
            BigInt denom = 1;
            for (int i = 1; i <= maxidx; ++i) {
                int j = mult[i - 1];
                denom *= factorial(j);
                BigInt fi = factorial(i);
                for (int rep = 0; rep < j; ++rep) denom *= fi;
            }
            out.push_back({mult, factorial(n) / denom});
        }
        return;
    }
    int i = idx + 1;  // part size at this slot
    int jmax = std::min(parts_left, weight_left / i);
    for (int j = 0; j <= jmax; ++j) {
        mult[idx] = j;
        enumerate_rec(n, k, idx + 1, maxidx, parts_left - j, weight_left - i * j, mult, out);
    }
    mult[idx] = 0;
}

}  // namespace

std::vector<PartitionTerm> enumerate_partitions(int n, int k) {
    if (n < 0 || k < 0 || k > n)
        throw std::invalid_argument("enumerate_partitions: need 0 <= k <= n");
    std::vector<PartitionTerm> out;
    if (n == 0 && k == 0) {
        out.push_back({{}, BigInt(1)});
        return out;
    }
    if (k == 0) return out;  // B_{n,0} = 0 for n >= 1
    int len = n - k + 1;
    std::vector<int> mult(len, 0);
    enumerate_rec(n, k, 0, len, k, n, mult, out);
    return out;
}

double BellPolynomial::evaluate(std::span<const double> values) const {
    if (static_cast<int>(values.size()) < n - k + 1)
        throw std::invalid_argument("BellPolynomial::evaluate: too few values");
    double total = 0.0;
    for (const auto& t : terms) {
        double prod = t.coefficient.convert_to<double>();
        for (size_t i = 0; i < t.multiplicities.size(); ++i)
            for (int rep = 0; rep < t.multiplicities[i]; ++rep) prod *= values[i];
        total += prod;
    }
    return total;
}

BigInt BellPolynomial::stirling2() const {
    BigInt s = 0;
    for (const auto& t : terms) s += t.coefficient;
    return s;
}

const BellPolynomial& bell_polynomial(int n, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, BellPolynomial> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, k});
    if (it == cache.end()) {
        BellPolynomial b{n, k, enumerate_partitions(n, k)};
        it = cache.emplace(std::make_pair(n, k), std::move(b)).first;
    }
    return it->second;
}

}  // namespace otd
